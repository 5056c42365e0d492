//! The twisted formal group algebra: fractions over the formal group algebra
//! localized at real-root symbols, the elements `delta_w`, formal Demazure
//! elements `X_w`, expansion in the `X_w` basis, and relation checks.
//!
//! Elements are stored as `sum_w psi_w delta_w` with coefficients written on
//! the left, so `(psi' delta_w')(psi delta_w) = psi' w'(psi) delta_{w'w}`.
//! Right multiplication by a generator then only touches denominators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::fga::{FgaContext, FgaError, FglKind, FormalGroupLaw};
use crate::roots::{CoxeterOrder, Lattice, RealRoot, WeylElement, WeylGroup};
use crate::scalars::Scalar;
use crate::series::{Monomial, PowerSeries, SubstitutionTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistedError {
    #[error("{0:?} is not a real root")]
    NotRealRoot(Vec<i64>),
    #[error("triangular solve failed: {0}")]
    SingularSolve(String),
    #[error("m_ij = infinity: there is no braid relation between X_{0} and X_{1}")]
    UnsupportedOrder(usize, usize),
    #[error("relation `{0}` needs i != j")]
    SameIndex(String),
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Fga(#[from] FgaError),
}

/// An element `num / prod x_beta` of the localization, with every `beta` a
/// positive real root in simple-root coordinates. Negative roots are folded
/// into the numerator through the unit `x_{-beta} / x_beta`.
#[derive(Clone)]
pub struct QFraction {
    num: PowerSeries,
    den: Vec<Vec<i64>>,
}

impl QFraction {
    pub fn numerator(&self) -> &PowerSeries {
        &self.num
    }

    pub fn denominator(&self) -> &[Vec<i64>] {
        &self.den
    }

    /// Degree up to which the Laurent expansion is determined.
    pub fn certified_order(&self) -> i64 {
        self.num.reliable() as i64 - self.den.len() as i64
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero_to_reliable()
    }

    pub fn neg(&self) -> QFraction {
        QFraction { num: self.num.neg(), den: self.den.clone() }
    }
}

impl fmt::Debug for QFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self.den.iter().map(|b| format!("x{b:?}")).collect();
        write!(f, "[{}] / ({})", self.num, den.join(" "))
    }
}

fn is_positive(r: &[i64]) -> bool {
    r.iter().all(|&x| x >= 0) && r.iter().any(|&x| x > 0)
}

fn negate(r: &[i64]) -> Vec<i64> {
    r.iter().map(|x| -x).collect()
}

/// Multiset union keeping the larger multiplicity; both inputs sorted.
fn multiset_lcm(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                out.push(x.clone());
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(x.clone());
                i += 1;
            }
            (Some(x), None) => {
                out.push(x.clone());
                i += 1;
            }
            (_, Some(y)) => {
                out.push(y.clone());
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// `big - small` as multisets, `small` contained in `big`.
fn multiset_diff(big: &[Vec<i64>], small: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut j = 0;
    for x in big {
        if j < small.len() && small[j] == *x {
            j += 1;
        } else {
            out.push(x.clone());
        }
    }
    debug_assert_eq!(j, small.len());
    out
}

/// An element `sum_w psi_w delta_w`, keyed by the reduced word of `w`.
#[derive(Clone, Default)]
pub struct TwistedElement {
    terms: BTreeMap<Vec<usize>, (WeylElement, QFraction)>,
}

impl TwistedElement {
    pub fn terms(&self) -> impl Iterator<Item = (&WeylElement, &QFraction)> {
        self.terms.values().map(|(w, q)| (w, q))
    }

    pub fn coeff(&self, word: &[usize]) -> Option<&QFraction> {
        self.terms.get(word).map(|(_, q)| q)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of coefficients that do not vanish to their reliable order.
    pub fn nonzero_terms(&self) -> usize {
        self.terms.values().filter(|(_, q)| !q.is_zero()).count()
    }

    /// Every coefficient vanishes; the certified order is the minimum over
    /// the coefficients (or `None` for the empty element).
    pub fn is_zero(&self) -> (bool, Option<i64>) {
        let zero = self.terms.values().all(|(_, q)| q.is_zero());
        let cert = self.terms.values().map(|(_, q)| q.certified_order()).min();
        (zero, cert)
    }
}

impl fmt::Debug for TwistedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TwistedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (word, (_, q)) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({q}) d{word:?}")?;
        }
        Ok(())
    }
}

/// Coefficients of an element in the basis `X_w`, keyed by reduced word.
#[derive(Clone, Debug, Default)]
pub struct XBasisExpansion {
    pub coeffs: BTreeMap<Vec<usize>, QFraction>,
    /// Smallest certified order among the coefficients that were judged
    /// zero during the solve.
    pub certified_order: Option<i64>,
}

impl XBasisExpansion {
    pub fn get(&self, word: &[usize]) -> Option<&QFraction> {
        self.coeffs.get(word)
    }

    /// Coefficients that do not vanish.
    pub fn support(&self) -> Vec<Vec<usize>> {
        self.coeffs.iter().filter(|(_, q)| !q.is_zero()).map(|(w, _)| w.clone()).collect()
    }
}

type Cache<K, V> = Mutex<HashMap<K, Arc<V>>>;

/// The twisted formal group algebra over a lattice, computing with series
/// truncated at a working order above the nominal one so that denominators
/// do not eat into the certified precision.
pub struct TwistedContext {
    fga: FgaContext,
    weyl: WeylGroup,
    nominal: u32,
    /// `G(u)/u` and its inverse, univariate.
    unit: PowerSeries,
    unit_inv: PowerSeries,
    units: Cache<Vec<i64>, (PowerSeries, PowerSeries)>,
    roots: Cache<Vec<i64>, (RealRoot, WeylElement)>,
    xwords: Cache<Vec<usize>, TwistedElement>,
}

impl fmt::Debug for TwistedContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistedContext")
            .field("law", &self.fga.fgl().kind())
            .field("nominal", &self.nominal)
            .field("working", &self.fga.order())
            .finish()
    }
}

impl TwistedContext {
    /// `nominal` is the order the caller wants certified; series are carried
    /// to `nominal + extra`.
    pub fn new(fgl: &FormalGroupLaw, lattice: &Lattice, nominal: u32, extra: u32) -> Result<TwistedContext, FgaError> {
        let mut work = nominal + extra;
        if fgl.kind() == FglKind::Custom {
            // A custom law is only known to its own order; the unit needs
            // one degree more than the working order.
            work = work.min(fgl.order().saturating_sub(1)).max(2);
        }
        let fga = FgaContext::new(fgl.with_order(work)?, lattice.clone());
        let hi = fgl.with_order(work + 1)?;
        let shifted = hi
            .formal_inverse()
            .terms()
            .iter()
            .map(|(m, c)| (Monomial::new(&[m.exp(0) - 1]), c.clone()))
            .collect();
        let unit = PowerSeries::from_terms(1, work, shifted).with_reliable(work);
        let unit_inv = unit.invert_unit().map_err(FgaError::from)?;
        Ok(TwistedContext {
            weyl: WeylGroup::new(lattice),
            fga,
            nominal,
            unit,
            unit_inv,
            units: Mutex::default(),
            roots: Mutex::default(),
            xwords: Mutex::default(),
        })
    }

    pub fn fga(&self) -> &FgaContext {
        &self.fga
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    pub fn nominal_order(&self) -> u32 {
        self.nominal
    }

    pub fn working_order(&self) -> u32 {
        self.fga.order()
    }

    pub fn rank(&self) -> usize {
        self.weyl.rank()
    }

    /// The real root with the given simple-root coordinates and its
    /// reflection.
    pub fn root(&self, coords: &[i64]) -> Result<Arc<(RealRoot, WeylElement)>, TwistedError> {
        if let Some(r) = self.roots.lock().unwrap().get(coords) {
            return Ok(r.clone());
        }
        let rr = self.weyl.real_root(coords).ok_or_else(|| TwistedError::NotRealRoot(coords.to_vec()))?;
        let s = self.weyl.reflection(&rr);
        let entry = Arc::new((rr, s));
        self.roots.lock().unwrap().insert(coords.to_vec(), entry.clone());
        Ok(entry)
    }

    pub fn simple(&self, i: usize) -> Vec<i64> {
        let mut r = vec![0; self.rank()];
        r[i] = 1;
        r
    }

    /// Extra working order that keeps the braid check of order `m` certified
    /// to `nominal - 6` (the order-6 relation carries about fifteen root
    /// factors in its denominators).
    pub fn margin_for(m: u32) -> u32 {
        match m {
            0..=3 => 4,
            4 => 6,
            _ => 11,
        }
    }

    /// `(x_{-beta}/x_beta, x_beta/x_{-beta})` for a positive root.
    fn unit_pair(&self, beta: &[i64]) -> Arc<(PowerSeries, PowerSeries)> {
        if let Some(u) = self.units.lock().unwrap().get(beta) {
            return u.clone();
        }
        let x = self.fga.x_root(beta);
        let table = SubstitutionTable::new(&[x]).expect("x_beta has no constant term");
        let pair = Arc::new((table.apply(&self.unit), table.apply(&self.unit_inv)));
        self.units.lock().unwrap().insert(beta.to_vec(), pair.clone());
        pair
    }

    // --- fractions -------------------------------------------------------

    pub fn qf(&self, num: PowerSeries) -> QFraction {
        QFraction { num, den: Vec::new() }
    }

    pub fn qf_scalar(&self, c: Scalar) -> QFraction {
        self.qf(self.fga.constant(c))
    }

    pub fn qf_one(&self) -> QFraction {
        self.qf_scalar(Scalar::one())
    }

    pub fn qf_zero(&self) -> QFraction {
        self.qf(self.fga.zero())
    }

    /// `x_r` for a root `r` in simple-root coordinates.
    pub fn qf_x(&self, r: &[i64]) -> QFraction {
        self.qf(self.fga.x_root(r))
    }

    /// `1 / x_r`.
    pub fn qf_inv_x(&self, r: &[i64]) -> QFraction {
        self.qf_mul_inv_x(&self.qf_one(), r)
    }

    /// `q / x_r`.
    pub fn qf_mul_inv_x(&self, q: &QFraction, r: &[i64]) -> QFraction {
        let (beta, num) = if is_positive(r) {
            (r.to_vec(), q.num.clone())
        } else {
            let beta = negate(r);
            let u = self.unit_pair(&beta);
            (beta, q.num.mul_unchecked(&u.1))
        };
        let pos = q.den.partition_point(|d| *d < beta);
        let mut den = q.den.clone();
        den.insert(pos, beta);
        QFraction { num, den }
    }

    /// `q * x_r`, cancelling a matching denominator factor when present.
    pub fn qf_mul_x(&self, q: &QFraction, r: &[i64]) -> QFraction {
        let (beta, negative) = if is_positive(r) { (r.to_vec(), false) } else { (negate(r), true) };
        if let Some(pos) = q.den.iter().position(|d| *d == beta) {
            let mut den = q.den.clone();
            den.remove(pos);
            let num = if negative { q.num.mul_unchecked(&self.unit_pair(&beta).0) } else { q.num.clone() };
            return QFraction { num, den };
        }
        QFraction { num: q.num.mul_unchecked(&self.fga.x_root(r)), den: q.den.clone() }
    }

    fn expand_to(&self, q: &QFraction, den: &[Vec<i64>]) -> PowerSeries {
        multiset_diff(den, &q.den)
            .iter()
            .fold(q.num.clone(), |acc, beta| acc.mul_unchecked(&self.fga.x_root(beta)))
    }

    pub fn qf_add(&self, a: &QFraction, b: &QFraction) -> QFraction {
        // only an exact zero may be dropped; a truncated one carries precision
        if b.num.is_empty() && b.num.is_exact() {
            return a.clone();
        }
        if a.num.is_empty() && a.num.is_exact() {
            return b.clone();
        }
        let den = multiset_lcm(&a.den, &b.den);
        let num = self.expand_to(a, &den).add_unchecked(&self.expand_to(b, &den));
        QFraction { num, den }
    }

    pub fn qf_sub(&self, a: &QFraction, b: &QFraction) -> QFraction {
        self.qf_add(a, &b.neg())
    }

    pub fn qf_mul(&self, a: &QFraction, b: &QFraction) -> QFraction {
        let mut den = a.den.clone();
        den.extend(b.den.iter().cloned());
        den.sort();
        QFraction { num: a.num.mul_unchecked(&b.num), den }
    }

    pub fn qf_scale(&self, q: &QFraction, c: &Scalar) -> QFraction {
        QFraction { num: q.num.scale(c), den: q.den.clone() }
    }

    /// `w(q)`.
    pub fn qf_act(&self, w: &WeylElement, q: &QFraction) -> QFraction {
        if w.is_identity() {
            return q.clone();
        }
        let mut num = self.fga.weyl_act(w, &q.num);
        let mut den = Vec::with_capacity(q.den.len());
        for beta in &q.den {
            let image = w.act_roots(beta);
            if is_positive(&image) {
                den.push(image);
            } else {
                let pos = negate(&image);
                num = num.mul_unchecked(&self.unit_pair(&pos).1);
                den.push(pos);
            }
        }
        den.sort();
        QFraction { num, den }
    }

    /// Equality by cross-multiplication; returns the certified order.
    pub fn qf_eq(&self, a: &QFraction, b: &QFraction) -> (bool, i64) {
        let d = self.qf_sub(a, b);
        (d.is_zero(), d.certified_order())
    }

    /// Cancels denominator factors by exact division where possible.
    pub fn qf_reduce(&self, q: &QFraction) -> QFraction {
        let mut out = q.clone();
        let mut k = 0;
        while k < out.den.len() {
            let beta = out.den[k].clone();
            let x = self.fga.x_root(&beta);
            match out.num.divide(&x) {
                Ok(n) => {
                    out.num = n;
                    out.den.remove(k);
                }
                Err(_) => k += 1,
            }
        }
        out
    }

    /// `Delta_alpha(q) = (q - s_alpha q) / x_alpha` on fractions.
    pub fn qf_demazure(&self, alpha: &[i64], q: &QFraction) -> Result<QFraction, TwistedError> {
        let root = self.root(alpha)?;
        let diff = self.qf_sub(q, &self.qf_act(&root.1, q));
        Ok(self.qf_mul_inv_x(&diff, alpha))
    }

    /// `kappa_{lambda,mu}` assembled from its defining fraction; the symbols
    /// involved must be real roots.
    pub fn qf_kappa_pair(&self, lambda: &[i64], mu: &[i64]) -> Result<QFraction, TwistedError> {
        let sum: Vec<i64> = lambda.iter().zip(mu).map(|(a, b)| a + b).collect();
        for r in [lambda, mu, &sum[..]] {
            self.root(r)?;
        }
        let inv_s = self.qf_inv_x(&sum);
        let inner = self.qf_sub(&self.qf_inv_x(mu), &self.qf_inv_x(&negate(lambda)));
        let first = self.qf_mul(&inv_s, &inner);
        let second = self.qf_mul(&self.qf_inv_x(lambda), &self.qf_inv_x(mu));
        Ok(self.qf_sub(&first, &second))
    }

    /// `kappa_alpha = 1/x_alpha + 1/x_{-alpha}`.
    pub fn qf_kappa(&self, alpha: &[i64]) -> QFraction {
        self.qf_add(&self.qf_inv_x(alpha), &self.qf_inv_x(&negate(alpha)))
    }

    // --- twisted elements -------------------------------------------------

    pub fn delta(&self, w: &WeylElement) -> TwistedElement {
        self.monomial(w.clone(), self.qf_one())
    }

    pub fn monomial(&self, w: WeylElement, q: QFraction) -> TwistedElement {
        let mut t = TwistedElement::default();
        t.terms.insert(w.word().to_vec(), (w, q));
        t
    }

    /// `q delta_e`.
    pub fn scalar(&self, q: QFraction) -> TwistedElement {
        self.monomial(self.weyl.identity(), q)
    }

    pub fn one(&self) -> TwistedElement {
        self.scalar(self.qf_one())
    }

    fn add_term(&self, t: &mut TwistedElement, w: &WeylElement, q: QFraction) {
        match t.terms.get_mut(w.word()) {
            Some((_, existing)) => *existing = self.qf_add(existing, &q),
            None => {
                t.terms.insert(w.word().to_vec(), (w.clone(), q));
            }
        }
    }

    pub fn add(&self, a: &TwistedElement, b: &TwistedElement) -> TwistedElement {
        let mut out = a.clone();
        for (w, q) in b.terms.values() {
            self.add_term(&mut out, w, q.clone());
        }
        out
    }

    pub fn neg(&self, a: &TwistedElement) -> TwistedElement {
        TwistedElement {
            terms: a.terms.iter().map(|(k, (w, q))| (k.clone(), (w.clone(), q.neg()))).collect(),
        }
    }

    pub fn sub(&self, a: &TwistedElement, b: &TwistedElement) -> TwistedElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &TwistedElement, c: &Scalar) -> TwistedElement {
        TwistedElement {
            terms: a.terms.iter().map(|(k, (w, q))| (k.clone(), (w.clone(), self.qf_scale(q, c)))).collect(),
        }
    }

    /// `q * a`.
    pub fn mul_left(&self, q: &QFraction, a: &TwistedElement) -> TwistedElement {
        TwistedElement {
            terms: a.terms.iter().map(|(k, (w, c))| (k.clone(), (w.clone(), self.qf_mul(q, c)))).collect(),
        }
    }

    /// `a * q = sum psi_w w(q) delta_w`.
    pub fn mul_right(&self, a: &TwistedElement, q: &QFraction) -> TwistedElement {
        TwistedElement {
            terms: a
                .terms
                .iter()
                .map(|(k, (w, c))| (k.clone(), (w.clone(), self.qf_mul(c, &self.qf_act(w, q)))))
                .collect(),
        }
    }

    pub fn mul(&self, a: &TwistedElement, b: &TwistedElement) -> TwistedElement {
        let mut out = TwistedElement::default();
        for (w1, q1) in a.terms.values() {
            for (w2, q2) in b.terms.values() {
                let w = self.weyl.mul(w1, w2);
                let q = self.qf_mul(q1, &self.qf_act(w1, q2));
                self.add_term(&mut out, &w, q);
            }
        }
        out
    }

    /// `a * X_i`, using `v(1/x_{alpha_i}) = 1/x_{v alpha_i}`.
    pub fn mul_generator(&self, a: &TwistedElement, i: usize) -> TwistedElement {
        let s = self.weyl.generator(i);
        let alpha = self.simple(i);
        let mut out = TwistedElement::default();
        for (v, q) in a.terms.values() {
            let c = self.qf_mul_inv_x(q, &v.act_roots(&alpha));
            let vs = self.weyl.mul(v, &s);
            self.add_term(&mut out, &vs, c.neg());
            self.add_term(&mut out, v, c);
        }
        out
    }

    pub fn coeff<'a>(&self, t: &'a TwistedElement, word: &[usize]) -> Option<&'a QFraction> {
        t.coeff(word)
    }

    pub fn coeff_or_zero(&self, t: &TwistedElement, word: &[usize]) -> QFraction {
        t.coeff(word).cloned().unwrap_or_else(|| self.qf_zero())
    }

    /// `X_alpha = (1/x_alpha)(1 - delta_{s_alpha})` for a real root.
    pub fn x_alpha(&self, alpha: &[i64]) -> Result<TwistedElement, TwistedError> {
        let root = self.root(alpha)?;
        let c = self.qf_inv_x(alpha);
        let mut t = self.scalar(c.clone());
        self.add_term(&mut t, &root.1, c.neg());
        Ok(t)
    }

    /// `X_{i_1} ... X_{i_k}`.
    pub fn x_word(&self, word: &[usize]) -> TwistedElement {
        if let Some(t) = self.xwords.lock().unwrap().get(word) {
            return TwistedElement::clone(t);
        }
        let t = match word.split_last() {
            None => self.one(),
            Some((&last, prefix)) => self.mul_generator(&self.x_word(prefix), last),
        };
        self.xwords.lock().unwrap().insert(word.to_vec(), Arc::new(t.clone()));
        t
    }

    /// `(-1)^k prod x_beta` over the inversion roots: the inverse of the
    /// `delta_w` coefficient of `X_w`.
    fn leading_inverse(&self, w: &WeylElement, q: &QFraction) -> QFraction {
        let mut c = q.clone();
        for beta in self.weyl.inversion_roots(w) {
            c = self.qf_mul_x(&c, &beta);
        }
        if w.length() % 2 == 1 {
            c = c.neg();
        }
        c
    }

    /// Triangular solve from the longest elements down. A coefficient that
    /// vanishes to its reliable order is still recorded and subtracted, so
    /// later comparisons see the precision it carried.
    fn solve(&self, e: &TwistedElement, max_len: usize, right: bool) -> Result<XBasisExpansion, TwistedError> {
        let mut rest = e.clone();
        let mut out = XBasisExpansion::default();
        loop {
            let Some(w) = rest
                .terms
                .values()
                .map(|(w, _)| w)
                .filter(|w| !out.coeffs.contains_key(w.word()))
                .max_by_key(|w| w.length())
                .cloned()
            else {
                break;
            };
            let psi = rest.coeff(w.word()).unwrap().clone();
            let negligible = psi.is_zero();
            if negligible {
                let c = psi.certified_order();
                out.certified_order = Some(out.certified_order.map_or(c, |x| x.min(c)));
            } else if w.length() > max_len {
                return Err(TwistedError::SingularSolve(format!("support element {:?} longer than {max_len}", w.word())));
            }
            let lead = self.leading_inverse(&w, &psi);
            let c = if right { self.qf_act(&self.weyl.inverse(&w), &lead) } else { lead };
            // subtract even a negligible term: its truncation error has to
            // reach the shorter coefficients
            let xw = self.x_word(w.word());
            let term = if right { self.mul_right(&xw, &c) } else { self.mul_left(&c, &xw) };
            rest = self.sub(&rest, &term);
            out.coeffs.insert(w.word().to_vec(), c);
        }
        Ok(out)
    }

    /// Left expansion `e = sum_w c_w X_w`.
    pub fn to_x_basis(&self, e: &TwistedElement, max_len: usize) -> Result<XBasisExpansion, TwistedError> {
        self.solve(e, max_len, false)
    }

    /// Right expansion `e = sum_w X_w eta_w`.
    pub fn to_x_basis_right(&self, e: &TwistedElement, max_len: usize) -> Result<XBasisExpansion, TwistedError> {
        self.solve(e, max_len, true)
    }

    /// Rebuilds `sum_w c_w X_w` (left coefficients).
    pub fn from_x_basis(&self, x: &XBasisExpansion) -> TwistedElement {
        x.coeffs.iter().fold(TwistedElement::default(), |acc, (word, c)| {
            self.add(&acc, &self.mul_left(c, &self.x_word(word)))
        })
    }
}

// --- relation checks ------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    /// `X_i^2 = kappa_i X_i`.
    Quadratic,
    /// The braid relation of the pair, with correction terms.
    Braid,
    /// `gamma X_alpha = X_alpha s_alpha(gamma) + Delta_alpha(gamma)`.
    Commutation,
}

/// Outcome of one relation check.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub relation: String,
    pub i: usize,
    pub j: usize,
    pub holds: bool,
    pub certified_order: Option<i64>,
    /// Right coefficients `eta_w` of `X_{jij...} - X_{iji...}`, by word.
    pub eta: BTreeMap<String, String>,
    pub residual_terms: usize,
    /// Named sub-checks and their verdicts.
    pub details: BTreeMap<String, bool>,
}

fn word_name(word: &[usize]) -> String {
    if word.is_empty() {
        return "e".into();
    }
    word.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

fn alternating(first: usize, second: usize, len: usize) -> Vec<usize> {
    (0..len).map(|k| if k % 2 == 0 { first } else { second }).collect()
}

fn min_cert(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

struct Tally {
    holds: bool,
    cert: Option<i64>,
    residual_terms: usize,
    details: BTreeMap<String, bool>,
}

impl Tally {
    fn new() -> Tally {
        Tally { holds: true, cert: None, residual_terms: 0, details: BTreeMap::new() }
    }

    fn element(&mut self, name: &str, residual: &TwistedElement) {
        let (zero, cert) = residual.is_zero();
        self.holds &= zero;
        self.cert = min_cert(self.cert, cert);
        self.residual_terms += residual.nonzero_terms();
        self.details.insert(name.to_string(), zero);
    }

    fn fraction(&mut self, name: &str, eq: (bool, i64)) {
        self.holds &= eq.0;
        self.cert = min_cert(self.cert, Some(eq.1));
        self.details.insert(name.to_string(), eq.0);
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.holds &= ok;
        self.details.insert(name.to_string(), ok);
    }

    fn report(self, relation: &str, i: usize, j: usize, eta: BTreeMap<String, String>) -> RelationReport {
        RelationReport {
            relation: relation.to_string(),
            i,
            j,
            holds: self.holds,
            certified_order: self.cert,
            eta,
            residual_terms: self.residual_terms,
            details: self.details,
        }
    }
}

impl TwistedContext {
    fn is_hyperbolic_family(&self) -> bool {
        self.fga.fgl().kind() != FglKind::Custom
    }

    fn check_index(&self, i: usize) -> Result<(), TwistedError> {
        if i >= self.rank() {
            return Err(TwistedError::BadIndex(i));
        }
        Ok(())
    }

    /// `X_i^2 - kappa_i X_i = 0`; for the hyperbolic family also
    /// `kappa_i = mu1`.
    pub fn verify_quadratic(&self, i: usize) -> Result<RelationReport, TwistedError> {
        self.check_index(i)?;
        let mut t = Tally::new();
        let alpha = self.simple(i);
        let kappa = self.qf_kappa(&alpha);
        let xi = self.x_word(&[i]);
        let lhs = self.x_word(&[i, i]);
        t.element("x_i^2 = kappa_i x_i", &self.sub(&lhs, &self.mul_left(&kappa, &xi)));
        let series = self.qf(self.fga.kappa_alpha(&self.fga.lattice().simple_root(i)));
        t.fraction("kappa_i = 1/x_i + 1/x_-i", self.qf_eq(&kappa, &series));
        if self.is_hyperbolic_family() {
            let mu1 = self.qf_scalar(self.fga.fgl().mu1().clone());
            t.fraction("kappa_i = mu1", self.qf_eq(&kappa, &mu1));
        }
        Ok(t.report("quadratic", i, i, BTreeMap::new()))
    }

    /// `gamma X_alpha - X_alpha s_alpha(gamma) - Delta_alpha(gamma) = 0` for
    /// each sample `gamma`.
    pub fn verify_commutation(&self, alpha: &[i64], samples: &[PowerSeries]) -> Result<RelationReport, TwistedError> {
        let root = self.root(alpha)?;
        let xa = self.x_alpha(alpha)?;
        let mut t = Tally::new();
        for (k, gamma) in samples.iter().enumerate() {
            let g = self.qf(gamma.clone());
            let lhs = self.mul_left(&g, &xa);
            let right = self.mul_right(&xa, &self.qf_act(&root.1, &g));
            let delta = self.qf_demazure(alpha, &g)?;
            let res = self.sub(&self.sub(&lhs, &right), &self.scalar(delta.clone()));
            t.element(&format!("sample {k}"), &res);
            // The Demazure operator on series agrees with the fraction form.
            let series = self.fga.demazure(&root.0, gamma);
            t.fraction(&format!("sample {k} divided difference"), self.qf_eq(&delta, &self.qf(series)));
        }
        let i = root.0.witness.1;
        Ok(t.report("commutation", i, i, BTreeMap::new()))
    }

    /// Braid relation between `X_i` and `X_j` in the form matching their
    /// Coxeter order, checked in the delta basis; the right coefficients of
    /// `X_{jij...} - X_{iji...}` are extracted and compared with the
    /// predicted ones.
    pub fn verify_braid(&self, i: usize, j: usize) -> Result<RelationReport, TwistedError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(TwistedError::SameIndex("braid".into()));
        }
        let a = self.fga.lattice().gcm().matrix();
        let m = match self.fga.lattice().gcm().coxeter_order(i, j) {
            CoxeterOrder::Finite(m) => m as usize,
            CoxeterOrder::Infinite => return Err(TwistedError::UnsupportedOrder(i, j)),
        };
        // Orient the pair so that alpha_i + k alpha_j (k = 2, 3) is a root,
        // i.e. <alpha_i, alpha_j^v> = a_ji is the long entry.
        let (p, q) = if m >= 4 && a[j][i] == -1 { (j, i) } else { (i, j) };
        let mut t = Tally::new();

        let lhs = self.sub(&self.x_word(&alternating(q, p, m)), &self.x_word(&alternating(p, q, m)));
        let predicted = self.braid_prediction(p, q, m)?;
        t.element("general form", &self.sub(&lhs, &self.from_right_terms(&predicted)?));

        if self.is_hyperbolic_family() {
            let special = self.hyperbolic_braid(p, q, m);
            t.element("hyperbolic form", &self.sub(&lhs, &special));
        }

        // Extract eta_w and compare with the prediction term by term.
        let expansion = self.to_x_basis_right(&lhs, m)?;
        t.cert = min_cert(t.cert, expansion.certified_order);
        let mut eta = BTreeMap::new();
        for (word, c) in &expansion.coeffs {
            if !c.is_zero() {
                let reduced = self.qf_reduce(c);
                t.flag(&format!("eta {} regular", word_name(word)), reduced.den.is_empty());
                eta.insert(word_name(word), reduced.num.clone().clean().to_string());
            }
            let want = predicted
                .iter()
                .filter(|(w, _)| w == word)
                .fold(self.qf_zero(), |acc, (_, x)| self.qf_add(&acc, x));
            let eqr = self.qf_eq(c, &want);
            t.fraction(&format!("eta {} matches", word_name(word)), eqr);
        }
        for (word, x) in &predicted {
            if !expansion.coeffs.contains_key(word) && !x.is_zero() {
                t.flag(&format!("eta {} present", word_name(word)), false);
            }
        }
        if m == 6 {
            let (xi_pq, xi_qp) = self.xi(p, q)?;
            let get = |w: &[usize]| expansion.get(w).cloned().unwrap_or_else(|| self.qf_zero());
            t.fraction("eta_ij = xi_ij", self.qf_eq(&get(&[p, q]), &xi_pq));
            t.fraction("eta_ji = -xi_ji", self.qf_eq(&get(&[q, p]), &xi_qp.neg()));
            if self.is_hyperbolic_family() {
                let mu2 = self.fga.fgl().mu2();
                let target = self.qf_scalar(mu2.mul(mu2).scale(&crate::Q::from_int(3)));
                t.fraction("xi_ij = 3 mu2^2", self.qf_eq(&xi_pq, &target));
                t.fraction("xi_ji = 3 mu2^2", self.qf_eq(&xi_qp, &target));
            }
        }
        Ok(t.report(&format!("braid-m{m}"), p, q, eta))
    }

    fn from_right_terms(&self, terms: &[(Vec<usize>, QFraction)]) -> Result<TwistedElement, TwistedError> {
        Ok(terms.iter().fold(TwistedElement::default(), |acc, (word, c)| {
            self.add(&acc, &self.mul_right(&self.x_word(word), c))
        }))
    }

    fn root_comb(&self, a: i64, i: usize, b: i64, j: usize) -> Vec<i64> {
        let mut r = vec![0; self.rank()];
        r[i] += a;
        r[j] += b;
        r
    }

    /// Right-coefficient terms `(word, eta)` of the braid relation.
    fn braid_prediction(&self, i: usize, j: usize, m: usize) -> Result<Vec<(Vec<usize>, QFraction)>, TwistedError> {
        let r = |a: i64, b: i64| self.root_comb(a, i, b, j);
        let kp = |l: Vec<i64>, mu: Vec<i64>| self.qf_kappa_pair(&l, &mu);
        let sum = |xs: Vec<QFraction>| xs.iter().fold(self.qf_zero(), |acc, x| self.qf_add(&acc, x));
        Ok(match m {
            2 => Vec::new(),
            3 => vec![(vec![i], kp(r(1, 0), r(0, 1))?), (vec![j], kp(r(0, 1), r(1, 0))?.neg())],
            4 => {
                let k1 = sum(vec![kp(r(1, 2), r(0, -1))?, kp(r(0, 1), r(1, 0))?]);
                let k2 = sum(vec![kp(r(1, 1), r(0, 1))?, kp(r(1, 0), r(0, 1))?]);
                vec![
                    (vec![i, j], k1.clone()),
                    (vec![j, i], k2.neg()),
                    (vec![j], self.qf_demazure(&r(1, 0), &k2)?),
                    (vec![i], self.qf_demazure(&r(0, 1), &k1)?.neg()),
                ]
            }
            6 => {
                let k1 = sum(vec![
                    kp(r(0, 1), r(1, 0))?,
                    kp(r(2, 3), r(-1, -2))?,
                    kp(r(-1, -3), r(1, 2))?,
                    kp(r(1, 2), r(0, -1))?,
                ]);
                let k2 = sum(vec![
                    kp(r(1, 0), r(0, 1))?,
                    kp(r(-2, -3), r(1, 2))?,
                    kp(r(-1, -2), r(1, 3))?,
                    kp(r(1, 1), r(0, 1))?,
                ]);
                let (xi_ij, xi_ji) = self.xi(i, j)?;
                vec![
                    (vec![i, j, i, j], k1.clone()),
                    (vec![j, i, j, i], k2.neg()),
                    (vec![j, i, j], self.qf_demazure(&r(1, 0), &k2)?),
                    (vec![i, j, i], self.qf_demazure(&r(0, 1), &k1)?.neg()),
                    (vec![i, j], xi_ij.clone()),
                    (vec![j, i], xi_ji.neg()),
                    (vec![j], self.qf_demazure(&r(1, 0), &xi_ji)?),
                    (vec![i], self.qf_demazure(&r(0, 1), &xi_ij)?.neg()),
                ]
            }
            _ => unreachable!("finite Coxeter orders are 2, 3, 4, 6"),
        })
    }

    /// The two nine-term sums `xi_ij`, `xi_ji` of the order-6 relation.
    pub fn xi(&self, i: usize, j: usize) -> Result<(QFraction, QFraction), TwistedError> {
        let term = |sign: i64, roots: [(i64, i64); 4]| -> Result<QFraction, TwistedError> {
            let mut q = self.qf_scalar(Scalar::from_int(sign));
            for (a, b) in roots {
                let r = self.root_comb(a, i, b, j);
                self.root(&r)?;
                q = self.qf_mul_inv_x(&q, &r);
            }
            Ok(q)
        };
        let xi_ij_terms = [
            (1, [(1, 0), (1, 1), (1, 2), (2, 3)]),
            (1, [(1, 0), (0, 1), (1, 2), (-2, -3)]),
            (1, [(1, 0), (0, 1), (2, 3), (-1, -1)]),
            // printed with a factor x_{-1-3j}; read as x_{-i-3j}
            (-1, [(1, 0), (1, 1), (1, 2), (-1, -3)]),
            (-1, [(1, 0), (1, 1), (1, 3), (0, -1)]),
            (1, [(1, 1), (1, 3), (0, -1), (-2, -3)]),
            (1, [(1, 3), (2, 3), (0, -1), (-1, -2)]),
            (1, [(1, 1), (1, 2), (-1, -3), (-2, -3)]),
            (-1, [(1, 0), (0, 1), (1, 2), (1, 3)]),
        ];
        let xi_ji_terms = [
            (1, [(1, 0), (0, 1), (2, 3), (-1, -2)]),
            (1, [(1, 0), (0, 1), (1, 2), (-1, -3)]),
            (1, [(0, 1), (1, 2), (1, 3), (2, 3)]),
            (-1, [(1, 0), (0, 1), (1, 1), (2, 3)]),
            (1, [(1, 1), (1, 2), (-1, 0), (-2, -3)]),
            (1, [(1, 3), (2, 3), (-1, -1), (-1, -2)]),
            (1, [(1, 1), (1, 3), (-1, 0), (-1, -2)]),
            (-1, [(0, 1), (1, 3), (2, 3), (-1, -1)]),
            (-1, [(0, 1), (1, 1), (1, 3), (-1, 0)]),
        ];
        let mut a = self.qf_zero();
        for (s, roots) in xi_ij_terms {
            a = self.qf_add(&a, &term(s, roots)?);
        }
        let mut b = self.qf_zero();
        for (s, roots) in xi_ji_terms {
            b = self.qf_add(&b, &term(s, roots)?);
        }
        Ok((a, b))
    }

    /// Right-hand side of the braid relation for the hyperbolic law, where
    /// every kappa class equals `mu2`.
    pub fn hyperbolic_braid(&self, i: usize, j: usize, m: usize) -> TwistedElement {
        let mu2 = self.fga.fgl().mu2().clone();
        let xw = |w: &[usize]| self.x_word(w);
        match m {
            2 => TwistedElement::default(),
            3 => self.scale(&self.sub(&xw(&[i]), &xw(&[j])), &mu2),
            4 => self.scale(&self.sub(&xw(&[i, j]), &xw(&[j, i])), &mu2.scale(&crate::Q::from_int(2))),
            6 => {
                let a = self.scale(&self.sub(&xw(&[i, j, i, j]), &xw(&[j, i, j, i])), &mu2.scale(&crate::Q::from_int(4)));
                let b = self.scale(&self.sub(&xw(&[i, j]), &xw(&[j, i])), &mu2.mul(&mu2).scale(&crate::Q::from_int(3)));
                self.add(&a, &b)
            }
            _ => unreachable!(),
        }
    }

    /// `kappa_i` for every simple root and `kappa_{i,j}`, `kappa_{j,i}` for
    /// every pair of finite Coxeter order at least 3, checked to be regular;
    /// for the hyperbolic family they must equal `mu1` and `mu2`, and the
    /// order-6 sums `xi` must equal `3 mu2^2`.
    pub fn verify_kappas(&self) -> Result<RelationReport, TwistedError> {
        let n = self.rank();
        let gcm = self.fga.lattice().gcm();
        let hyperbolic = self.is_hyperbolic_family();
        let mu1 = self.qf_scalar(self.fga.fgl().mu1().clone());
        let mu2 = self.fga.fgl().mu2().clone();
        let mut t = Tally::new();
        let mut values = BTreeMap::new();
        let mut record = |t: &mut Tally, name: String, q: &QFraction, target: Option<&QFraction>| {
            let reduced = self.qf_reduce(q);
            t.flag(&format!("{name} regular"), reduced.den.is_empty());
            values.insert(name.clone(), reduced.num.clone().clean().to_string());
            if let Some(target) = target {
                t.fraction(&format!("{name} value"), self.qf_eq(q, target));
            }
        };
        for i in 0..n {
            let k = self.qf_kappa(&self.simple(i));
            record(&mut t, format!("kappa_{i}"), &k, hyperbolic.then_some(&mu1));
        }
        let mu2q = self.qf_scalar(mu2.clone());
        let three = self.qf_scalar(mu2.mul(&mu2).scale(&crate::Q::from_int(3)));
        for i in 0..n {
            for j in i + 1..n {
                let m = match gcm.coxeter_order(i, j) {
                    CoxeterOrder::Finite(m) if m >= 3 => m,
                    _ => continue,
                };
                for (a, b) in [(i, j), (j, i)] {
                    let k = self.qf_kappa_pair(&self.simple(a), &self.simple(b))?;
                    record(&mut t, format!("kappa_{a},{b}"), &k, hyperbolic.then_some(&mu2q));
                }
                if m == 6 {
                    let a = gcm.matrix();
                    let (p, q) = if a[j][i] == -1 { (j, i) } else { (i, j) };
                    let (x1, x2) = self.xi(p, q)?;
                    record(&mut t, format!("xi_{p},{q}"), &x1, hyperbolic.then_some(&three));
                    record(&mut t, format!("xi_{q},{p}"), &x2, hyperbolic.then_some(&three));
                }
            }
        }
        Ok(t.report("kappa", 0, 0, values))
    }

    /// The elements `X_w` for distinct `w` of length at most `max_len` are
    /// independent: each expands back to the single basis vector `X_w`, and
    /// its `delta_w` coefficient is the expected invertible product.
    pub fn verify_independence(&self, max_len: usize) -> Result<RelationReport, TwistedError> {
        let mut t = Tally::new();
        for w in self.weyl.elements_up_to(max_len) {
            let name = word_name(w.word());
            let xw = self.x_word(w.word());
            let lead = xw.coeff(w.word()).cloned().unwrap_or_else(|| self.qf_zero());
            let normalized = self.leading_inverse(&w, &lead);
            t.fraction(&format!("leading {name}"), self.qf_eq(&normalized, &self.qf_one()));
            let expansion = self.to_x_basis(&xw, max_len)?;
            t.cert = min_cert(t.cert, expansion.certified_order);
            t.flag(&format!("support {name}"), expansion.support() == vec![w.word().to_vec()]);
        }
        Ok(t.report("independence", 0, 0, BTreeMap::new()))
    }

    /// Runs `kind` on the pair `(i, j)`.
    pub fn verify_relation(&self, kind: RelationKind, i: usize, j: usize) -> Result<RelationReport, TwistedError> {
        match kind {
            RelationKind::Quadratic => self.verify_quadratic(i),
            RelationKind::Braid => self.verify_braid(i, j),
            RelationKind::Commutation => {
                let samples = self.monomial_samples(3);
                self.verify_commutation(&self.simple(i), &samples)
            }
        }
    }

    /// Products `x_{e_1}^{a_1} ... x_{e_n}^{a_n}` of the basis symbols with
    /// `1 <= sum a <= max_deg`.
    pub fn monomial_samples(&self, max_deg: u32) -> Vec<PowerSeries> {
        let n = self.fga.nvars();
        let mut out = Vec::new();
        let mut exps = vec![0u32; n];
        loop {
            // odometer over exponent vectors
            let mut k = 0;
            loop {
                if k == n {
                    return out;
                }
                exps[k] += 1;
                if exps.iter().sum::<u32>() <= max_deg {
                    break;
                }
                exps[k] = 0;
                k += 1;
            }
            out.push(PowerSeries::from_terms(n, self.working_order(), vec![(Monomial::new(&exps), Scalar::one())]));
        }
    }
}
