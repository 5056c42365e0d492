//! Truncated multivariate power series over [`Scalar`].
//!
//! A series stores every coefficient of total degree at most `order`, plus a
//! `reliable` degree up to which those coefficients are known to be exact.
//! Coefficients between `reliable` and `order` are whatever the truncated
//! arithmetic produced and carry no meaning. Series flagged `exact` are
//! polynomials whose stored terms are the whole story.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Q;
use crate::scalars::{PMono, Scalar, ScalarError};

pub const MAX_VARS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("substitution image {0} has a nonzero constant term")]
    NonNilpotentImage(usize),
    #[error("constant term is not a unit of the coefficient ring")]
    NotAUnit,
    #[error("not divisible: nonzero remainder in degree {0}")]
    NotDivisible(u32),
    #[error("divisor has no linear coefficient that is a unit")]
    NoPivot,
    #[error("vector {0:?} is not primitive")]
    NotPrimitive(Vec<i64>),
    #[error("malformed series: {0}")]
    Malformed(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A monomial `x_1^{e_1} ... x_n^{e_n}` with `n <= 8`, one exponent byte per
/// variable. Multiplication is addition of the packed words.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn new(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut packed = 0u64;
        for (k, &e) in exps.iter().enumerate() {
            assert!(e < 256, "exponent too large");
            packed |= (e as u64) << (8 * k);
        }
        Monomial(packed)
    }

    pub fn var(k: usize) -> Monomial {
        Monomial(1 << (8 * k))
    }

    pub fn exp(self, k: usize) -> u32 {
        ((self.0 >> (8 * k)) & 0xff) as u32
    }

    pub fn exps(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|k| self.exp(k)).collect()
    }

    pub fn degree(self) -> u32 {
        // Sum of the bytes; exact while the degree stays below 256.
        (self.0.wrapping_mul(0x0101_0101_0101_0101) >> 56) as u32
    }

    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 + other.0)
    }

    /// `self / x_k`, assuming `x_k` divides `self`.
    pub fn div_var(self, k: usize) -> Monomial {
        debug_assert!(self.exp(k) > 0);
        Monomial(self.0 - (1 << (8 * k)))
    }

    fn key(self) -> (u32, u64) {
        (self.degree(), self.0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps(MAX_VARS))
    }
}

/// A truncated power series in `nvars` variables.
#[derive(Clone, PartialEq, Eq)]
pub struct PowerSeries {
    nvars: usize,
    order: u32,
    reliable: u32,
    exact: bool,
    /// Sorted by (total degree, packed exponents); no zero coefficients.
    terms: Vec<(Monomial, Scalar)>,
}

impl PowerSeries {
    pub fn zero(nvars: usize, order: u32) -> PowerSeries {
        assert!(nvars <= MAX_VARS);
        PowerSeries { nvars, order, reliable: order, exact: true, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: Scalar) -> PowerSeries {
        PowerSeries::from_terms(nvars, order, vec![(Monomial::ONE, c)])
    }

    pub fn one(nvars: usize, order: u32) -> PowerSeries {
        PowerSeries::constant(nvars, order, Scalar::one())
    }

    /// The variable `x_{k+1}` (zero-based `k`).
    pub fn var(nvars: usize, order: u32, k: usize) -> PowerSeries {
        assert!(k < nvars);
        PowerSeries::from_terms(nvars, order, vec![(Monomial::var(k), Scalar::one())])
    }

    /// An exact polynomial; terms above `order` are dropped and then the
    /// result is no longer marked exact.
    pub fn from_terms(nvars: usize, order: u32, raw: Vec<(Monomial, Scalar)>) -> PowerSeries {
        let mut merged: BTreeMap<(u32, u64), (Monomial, Scalar)> = BTreeMap::new();
        let mut exact = true;
        for (m, c) in raw {
            if m.degree() > order {
                if !c.is_zero() {
                    exact = false;
                }
                continue;
            }
            let e = merged.entry(m.key()).or_insert_with(|| (m, Scalar::zero()));
            e.1 = e.1.add(&c);
        }
        let terms = merged.into_values().filter(|(_, c)| !c.is_zero()).collect();
        PowerSeries { nvars, order, reliable: order, exact, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn reliable(&self) -> u32 {
        if self.exact {
            self.order
        } else {
            self.reliable
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    /// Lowers the reliable order (never raises it).
    pub fn with_reliable(mut self, reliable: u32) -> PowerSeries {
        let r = self.reliable().min(reliable);
        if r < self.order {
            self.exact = false;
        }
        self.reliable = r;
        self
    }

    pub fn coeff(&self, m: Monomial) -> Scalar {
        self.terms
            .binary_search_by_key(&m.key(), |(k, _)| k.key())
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(Monomial::ONE)
    }

    /// Lowest degree carrying a nonzero coefficient within the reliable
    /// range, or `reliable + 1` if there is none.
    pub fn valuation(&self) -> u32 {
        let r = self.reliable();
        match self.terms.first() {
            Some((m, _)) if m.degree() <= r => m.degree(),
            _ => r + 1,
        }
    }

    /// True if every coefficient up to the reliable order vanishes.
    pub fn is_zero_to_reliable(&self) -> bool {
        self.valuation() > self.reliable()
    }

    /// True if the series has no stored terms at all.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops coefficients above the reliable order; they carry no
    /// information.
    pub fn clean(mut self) -> PowerSeries {
        let r = self.reliable();
        self.terms.retain(|(m, _)| m.degree() <= r);
        self
    }

    /// Changes the truncation order. Lowering it discards terms; raising it
    /// keeps the reliable order unless the series is an exact polynomial.
    pub fn with_order(&self, order: u32) -> PowerSeries {
        if order >= self.order {
            return PowerSeries {
                nvars: self.nvars,
                order,
                reliable: self.reliable(),
                exact: self.exact,
                terms: self.terms.clone(),
            };
        }
        let keep: Vec<_> = self.terms.iter().filter(|(m, _)| m.degree() <= order).cloned().collect();
        let dropped = keep.len() != self.terms.len();
        PowerSeries {
            nvars: self.nvars,
            order,
            reliable: self.reliable().min(order),
            exact: self.exact && !dropped,
            terms: keep,
        }
    }

    fn check_shape(&self, other: &PowerSeries) -> Result<(), SeriesError> {
        if self.nvars != other.nvars || self.order != other.order {
            return Err(SeriesError::ShapeMismatch(format!(
                "({} vars, order {}) vs ({} vars, order {})",
                self.nvars, self.order, other.nvars, other.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        self.check_shape(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &PowerSeries) -> PowerSeries {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.key().cmp(&b[j].0.key()) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = a[i].1.add(&b[j].1);
                    if !s.is_zero() {
                        out.push((a[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        PowerSeries {
            nvars: self.nvars,
            order: self.order,
            reliable: self.reliable().min(other.reliable()),
            exact: self.exact && other.exact,
            terms: out,
        }
    }

    pub fn neg(&self) -> PowerSeries {
        PowerSeries {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
            ..self.clone_shape()
        }
    }

    pub(crate) fn sub_unchecked(&self, other: &PowerSeries) -> PowerSeries {
        self.add_unchecked(&other.neg())
    }

    pub fn sub(&self, other: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        self.check_shape(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn scale(&self, c: &Scalar) -> PowerSeries {
        if c.is_zero() {
            let mut z = PowerSeries::zero(self.nvars, self.order);
            z.reliable = self.order;
            return z;
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, k)| (*m, k.mul(c)))
            .filter(|(_, k)| !k.is_zero())
            .collect();
        PowerSeries { terms, ..self.clone_shape() }
    }

    pub fn scale_q(&self, q: &Q) -> PowerSeries {
        self.scale(&Scalar::from_q(q.clone()))
    }

    fn clone_shape(&self) -> PowerSeries {
        PowerSeries {
            nvars: self.nvars,
            order: self.order,
            reliable: self.reliable,
            exact: self.exact,
            terms: Vec::new(),
        }
    }

    /// Multiplies every coefficient by `m` in the variables (shifting
    /// degrees up) and truncates.
    pub fn mul_monomial(&self, m: Monomial) -> PowerSeries {
        let shift = m.degree();
        let mut exact = self.exact;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            let p = k.mul(m);
            if p.degree() <= self.order {
                terms.push((p, c.clone()));
            } else {
                exact = false;
            }
        }
        terms.sort_by_key(|(k, _)| k.key());
        PowerSeries {
            nvars: self.nvars,
            order: self.order,
            reliable: (self.reliable() + shift).min(self.order),
            exact,
            terms,
        }
    }

    /// Product truncated to the common order, with reliable order
    /// `min(rho_f + val g, rho_g + val f, N)`.
    pub fn mul(&self, other: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.order;
        let reliable = (self.reliable() + other.valuation())
            .min(other.reliable() + self.valuation())
            .min(n);
        let mut exact = self.exact && other.exact;
        let mut acc: BTreeMap<(u32, u64), Vec<(PMono, Q)>> = BTreeMap::new();
        let b = &other.terms;
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in b {
                let db = mb.degree();
                if da + db > n {
                    // `b` is sorted by degree.
                    exact = false;
                    break;
                }
                let m = ma.mul(*mb);
                ca.mul_into(cb, acc.entry(m.key()).or_default());
            }
        }
        let terms = acc
            .into_iter()
            .filter_map(|((_, packed), raw)| {
                let c = Scalar::from_terms(raw);
                (!c.is_zero()).then_some((Monomial(packed), c))
            })
            .collect();
        PowerSeries { nvars: self.nvars, order: n, reliable, exact, terms }
    }

    pub fn pow(&self, e: u32) -> PowerSeries {
        let mut acc = PowerSeries::one(self.nvars, self.order);
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Homogeneous components indexed by degree `0..=order`.
    pub fn components(&self) -> Vec<&[(Monomial, Scalar)]> {
        let mut out = Vec::with_capacity(self.order as usize + 1);
        let mut start = 0;
        for d in 0..=self.order {
            let mut end = start;
            while end < self.terms.len() && self.terms[end].0.degree() == d {
                end += 1;
            }
            out.push(&self.terms[start..end]);
            start = end;
        }
        out
    }

    /// Compositional inverse of a univariate `x + O(x^2)`.
    pub fn reversion(&self) -> Result<PowerSeries, SeriesError> {
        let x = PowerSeries::var(1, self.order, 0);
        if self.nvars != 1 || !self.constant_term().is_zero() || !self.coeff(Monomial::var(0)).is_one() {
            return Err(SeriesError::Malformed("reversion needs a univariate x + O(x^2)".into()));
        }
        // g <- g - (f(g) - x) fixes one more degree per step.
        let mut g = x.clone();
        for _ in 1..self.order {
            let fg = self.substitute(std::slice::from_ref(&g))?;
            g = g.sub_unchecked(&fg.sub_unchecked(&x));
        }
        Ok(g.with_reliable(self.reliable()))
    }

    /// Multiplicative inverse of a series whose constant term is a unit.
    pub fn invert_unit(&self) -> Result<PowerSeries, SeriesError> {
        let c0inv = self.constant_term().inv().ok_or(SeriesError::NotAUnit)?;
        let comps = self.components();
        let mut inv_comps: Vec<BTreeMap<Monomial, Scalar>> = Vec::new();
        inv_comps.push(BTreeMap::from([(Monomial::ONE, c0inv.clone())]));
        let minus_c0inv = c0inv.neg();
        for d in 1..=self.order as usize {
            let mut acc: BTreeMap<Monomial, Vec<(PMono, Q)>> = BTreeMap::new();
            for k in 1..=d {
                for (mf, cf) in comps[k] {
                    for (mg, cg) in &inv_comps[d - k] {
                        cf.mul_into(cg, acc.entry(mf.mul(*mg)).or_default());
                    }
                }
            }
            let comp = acc
                .into_iter()
                .map(|(m, raw)| (m, Scalar::from_terms(raw).mul(&minus_c0inv)))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            inv_comps.push(comp);
        }
        let terms = flatten(inv_comps);
        Ok(PowerSeries {
            nvars: self.nvars,
            order: self.order,
            reliable: self.reliable(),
            exact: false,
            terms,
        }
        .normalize_exact())
    }

    /// An exact series stays exact only if it was an exact polynomial; series
    /// inverses are not, unless the input was constant.
    fn normalize_exact(mut self) -> PowerSeries {
        if self.terms.iter().all(|(m, _)| m.degree() == 0) && self.reliable == self.order {
            self.exact = self.exact || self.terms.len() <= 1;
        }
        self
    }

    /// Exact quotient `f / g` for a divisor of valuation one whose linear
    /// part has a unit coefficient. The quotient is reliable one degree below
    /// the inputs.
    pub fn divide(&self, divisor: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        self.check_shape(divisor)?;
        if !divisor.constant_term().is_zero() {
            return Err(SeriesError::NoPivot);
        }
        let gcomps = divisor.components();
        let linear: Vec<(usize, Scalar)> = gcomps
            .get(1)
            .map(|c| {
                c.iter()
                    .map(|(m, s)| ((0..self.nvars).find(|&k| m.exp(k) == 1).unwrap(), s.clone()))
                    .collect()
            })
            .unwrap_or_default();
        // Prefer a rational pivot: its inverse keeps coefficients small.
        let pivot = linear
            .iter()
            .filter(|(_, s)| s.is_unit())
            .min_by_key(|(_, s)| (s.as_rational().is_none(), s.len()))
            .map(|(k, s)| (*k, s.inv().unwrap()))
            .ok_or(SeriesError::NoPivot)?;

        let rho = self.reliable().min(divisor.reliable());
        let fcomps = self.components();
        let n = self.order as usize;
        if !fcomps[0].is_empty() && rho >= 1 {
            return Err(SeriesError::NotDivisible(0));
        }
        let mut q: Vec<BTreeMap<Monomial, Scalar>> = Vec::with_capacity(n);
        for d in 1..=n {
            // h = f_d - sum_{k=0}^{d-2} q_k g_{d-k}
            let mut acc: BTreeMap<Monomial, Vec<(PMono, Q)>> = BTreeMap::new();
            for (m, c) in fcomps[d] {
                acc.entry(*m).or_default().extend(c.terms().iter().cloned());
            }
            for (k, qk) in q.iter().enumerate() {
                let gd = d - k;
                if gd < 2 {
                    continue;
                }
                for (mg, cg) in gcomps[gd] {
                    let ncg = cg.neg();
                    for (mq, cq) in qk {
                        cq.mul_into(&ncg, acc.entry(mq.mul(*mg)).or_default());
                    }
                }
            }
            let mut h: BTreeMap<Monomial, Scalar> = acc
                .into_iter()
                .map(|(m, raw)| (m, Scalar::from_terms(raw)))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let (qd, remainder_zero) = divide_homogeneous(&mut h, &linear, pivot.0, &pivot.1);
            if !remainder_zero && d as u32 <= rho {
                return Err(SeriesError::NotDivisible(d as u32));
            }
            q.push(qd);
        }
        let terms = flatten(q);
        Ok(PowerSeries {
            nvars: self.nvars,
            order: self.order,
            reliable: rho.saturating_sub(1),
            exact: false,
            terms,
        })
    }

    /// Composite `f(images)`; every image must have zero constant term.
    pub fn substitute(&self, images: &[PowerSeries]) -> Result<PowerSeries, SeriesError> {
        let table = SubstitutionTable::new(images)?;
        if images.len() != self.nvars {
            return Err(SeriesError::ShapeMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars
            )));
        }
        Ok(table.apply(self))
    }

    /// Keeps only terms of degree at most `d`.
    pub fn truncate_degree(&self, d: u32) -> PowerSeries {
        let keep: Vec<_> = self.terms.iter().filter(|(m, _)| m.degree() <= d).cloned().collect();
        let dropped = keep.len() != self.terms.len();
        PowerSeries {
            terms: keep,
            exact: self.exact && !dropped,
            ..self.clone_shape()
        }
    }

    /// Applies a coefficientwise map, e.g. a specialization.
    pub fn map_coeffs<E>(
        &self,
        mut f: impl FnMut(&Scalar) -> Result<Scalar, E>,
    ) -> Result<PowerSeries, E> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let v = f(c)?;
            if !v.is_zero() {
                terms.push((*m, v));
            }
        }
        Ok(PowerSeries { terms, ..self.clone_shape() })
    }

    /// Zero-test up to degree `d` (inclusive).
    pub fn vanishes_to(&self, d: u32) -> bool {
        self.terms.first().map_or(true, |(m, _)| m.degree() > d)
    }

    /// Equality of coefficients up to the common reliable order; returns the
    /// degree to which equality was checked.
    pub fn agrees_with(&self, other: &PowerSeries) -> (bool, u32) {
        let r = self.reliable().min(other.reliable());
        let a = self.with_order(self.order.max(other.order));
        let b = other.with_order(self.order.max(other.order));
        let diff = a.add_unchecked(&b.neg());
        (diff.vanishes_to(r), r)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            nvars: self.nvars,
            order: self.order,
            reliable: self.reliable(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { exp: m.exps(self.nvars), coef: c.to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<PowerSeries, SeriesError> {
        if j.nvars > MAX_VARS {
            return Err(SeriesError::Malformed(format!("{} variables", j.nvars)));
        }
        if j.reliable > j.order {
            return Err(SeriesError::Malformed("reliable exceeds order".into()));
        }
        let mut raw = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.exp.len() != j.nvars || t.exp.iter().any(|&e| e > 255) {
                return Err(SeriesError::Malformed(format!("bad exponent vector {:?}", t.exp)));
            }
            let m = Monomial::new(&t.exp);
            if m.degree() > j.order {
                return Err(SeriesError::Malformed(format!("term {:?} exceeds order", t.exp)));
            }
            raw.push((m, t.coef.parse::<Scalar>()?));
        }
        let mut s = PowerSeries::from_terms(j.nvars, j.order, raw);
        s.reliable = j.reliable;
        s.exact = false;
        Ok(s)
    }
}

/// Divides a homogeneous polynomial `h` by the linear form `linear`, pivoting
/// on variable `p` whose coefficient has inverse `pinv`. Returns the quotient
/// and whether the remainder vanished. `h` is left holding the remainder.
fn divide_homogeneous(
    h: &mut BTreeMap<Monomial, Scalar>,
    linear: &[(usize, Scalar)],
    p: usize,
    pinv: &Scalar,
) -> (BTreeMap<Monomial, Scalar>, bool) {
    let mut quotient = BTreeMap::new();
    loop {
        // Highest power of x_p still present.
        let Some((&m, _)) = h.iter().filter(|(m, _)| m.exp(p) > 0).max_by_key(|(m, _)| (m.exp(p), m.0))
        else {
            break;
        };
        let c = h.remove(&m).unwrap();
        let qm = m.div_var(p);
        let qc = c.mul(pinv);
        for (k, lk) in linear {
            if *k == p {
                continue;
            }
            let target = qm.mul(Monomial::var(*k));
            let delta = qc.mul(lk).neg();
            let entry = h.entry(target).or_default();
            *entry = entry.add(&delta);
            if entry.is_zero() {
                h.remove(&target);
            }
        }
        quotient.insert(qm, qc);
    }
    let zero = h.is_empty();
    (quotient, zero)
}

fn flatten(comps: Vec<BTreeMap<Monomial, Scalar>>) -> Vec<(Monomial, Scalar)> {
    let mut out = Vec::new();
    for comp in comps {
        // BTreeMap order on packed words agrees with the (degree, packed) key
        // inside a single degree.
        out.extend(comp.into_iter().filter(|(_, c)| !c.is_zero()));
    }
    out
}

/// Precomputed powers of substitution images, reusable across many series.
#[derive(Clone, Debug)]
pub struct SubstitutionTable {
    nvars_out: usize,
    order: u32,
    reliable: u32,
    /// `powers[k][e]` is `images[k]^e`.
    powers: Vec<Vec<PowerSeries>>,
}

impl SubstitutionTable {
    pub fn new(images: &[PowerSeries]) -> Result<SubstitutionTable, SeriesError> {
        let first = images
            .first()
            .ok_or_else(|| SeriesError::ShapeMismatch("no substitution images".into()))?;
        let (nvars_out, order) = (first.nvars, first.order);
        let mut reliable = order;
        let mut powers = Vec::with_capacity(images.len());
        for (k, img) in images.iter().enumerate() {
            if img.nvars != nvars_out || img.order != order {
                return Err(SeriesError::ShapeMismatch("images differ in shape".into()));
            }
            if !img.constant_term().is_zero() {
                return Err(SeriesError::NonNilpotentImage(k));
            }
            reliable = reliable.min(img.reliable());
            let mut pk = vec![PowerSeries::one(nvars_out, order)];
            for e in 1..=order {
                let next = pk[e as usize - 1].mul_unchecked(img);
                pk.push(next);
            }
            powers.push(pk);
        }
        Ok(SubstitutionTable { nvars_out, order, reliable, powers })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Evaluates `f` at the images by Horner's scheme over the variables.
    pub fn apply(&self, f: &PowerSeries) -> PowerSeries {
        assert_eq!(f.nvars, self.powers.len(), "variable count mismatch");
        let f = f.with_order(self.order);
        let terms: Vec<(Monomial, Scalar)> = f.terms.clone();
        let mut out = self.apply_rec(&terms, 0);
        out.reliable = f.reliable().min(self.reliable).min(self.order);
        out.exact = false;
        if out.reliable == self.order && f.exact && self.all_images_exact() {
            out.exact = out.terms.iter().all(|(m, _)| m.degree() <= self.order);
        }
        out
    }

    fn all_images_exact(&self) -> bool {
        self.powers.iter().all(|p| p.len() > 1 && p[1].exact)
    }

    fn apply_rec(&self, terms: &[(Monomial, Scalar)], k: usize) -> PowerSeries {
        let nv = self.powers.len();
        if k + 1 == nv {
            let mut acc = PowerSeries::zero(self.nvars_out, self.order);
            acc.exact = false;
            for (m, c) in terms {
                let e = m.exp(k) as usize;
                acc = acc.add_unchecked(&self.powers[k][e].scale(c));
            }
            return acc;
        }
        let mut groups: BTreeMap<u32, Vec<(Monomial, Scalar)>> = BTreeMap::new();
        for (m, c) in terms {
            groups.entry(m.exp(k)).or_default().push((*m, c.clone()));
        }
        let mut acc = PowerSeries::zero(self.nvars_out, self.order);
        for (e, group) in groups {
            let inner = self.apply_rec(&group, k + 1);
            let part = if e == 0 { inner } else { inner.mul_unchecked(&self.powers[k][e as usize]) };
            acc = acc.add_unchecked(&part);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: String,
}

/// Wire format of a series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub nvars: usize,
    pub order: u32,
    pub reliable: u32,
    pub terms: Vec<TermJson>,
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = (0..self.nvars)
                .filter(|&v| m.exp(v) > 0)
                .map(|v| match m.exp(v) {
                    1 => format!("x{}", v + 1),
                    e => format!("x{}^{}", v + 1, e),
                })
                .collect();
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        if !self.exact {
            write!(f, " + O(deg {})", self.reliable() + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries[n={}, N={}, rho={}] {}", self.nvars, self.order, self.reliable(), self)
    }
}
