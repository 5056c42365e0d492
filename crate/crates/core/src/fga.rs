//! Formal group laws and the formal group algebra of a lattice: the symbols
//! `x_lambda`, the Weyl action, Demazure operators and kappa classes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::intmat::{self, IMat};
use crate::roots::{Lattice, RealRoot, WeylElement};
use crate::scalars::{Bindings, Param, Scalar, ScalarError};
use crate::series::{Monomial, PowerSeries, SeriesError, SubstitutionTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FgaError {
    #[error("formal group law axiom violated: {0}")]
    AxiomViolation(String),
    #[error("kappa numerator is not divisible by {0}")]
    NotRegular(String),
    #[error("unknown formal group law `{0}`")]
    UnknownLaw(String),
    #[error("truncation order must be at least 2")]
    OrderTooSmall,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FglKind {
    Additive,
    Multiplicative,
    Hyperbolic,
    Custom,
}

impl FglKind {
    pub fn name(self) -> &'static str {
        match self {
            FglKind::Additive => "additive",
            FglKind::Multiplicative => "multiplicative",
            FglKind::Hyperbolic => "hyperbolic",
            FglKind::Custom => "custom",
        }
    }
}

impl FromStr for FglKind {
    type Err = FgaError;
    fn from_str(s: &str) -> Result<FglKind, FgaError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "additive" | "add" => Ok(FglKind::Additive),
            "multiplicative" | "mult" => Ok(FglKind::Multiplicative),
            "hyperbolic" | "hyp" => Ok(FglKind::Hyperbolic),
            other => Err(FgaError::UnknownLaw(other.to_string())),
        }
    }
}

impl fmt::Display for FglKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A one-dimensional commutative formal group law `F(u, v)` truncated at
/// total degree `order`.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    kind: FglKind,
    order: u32,
    mu1: Scalar,
    mu2: Scalar,
    f: PowerSeries,
    /// `g^F(u, v)` with `F = u + v - uv g^F`.
    g: PowerSeries,
    /// Univariate formal inverse.
    inverse: PowerSeries,
}

/// Outcome of checking the identities `F(u,0) = u`, `F(u,v) = F(v,u)` and
/// associativity up to the reliable order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub identity: bool,
    pub commutative: bool,
    pub associative: bool,
    pub checked_to: u32,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.identity && self.commutative && self.associative
    }
}

pub fn make_fgl(kind: FglKind, bindings: &Bindings, order: u32) -> Result<FormalGroupLaw, FgaError> {
    if order < 2 {
        return Err(FgaError::OrderTooSmall);
    }
    let mu1 = Scalar::param(Param::Mu1).specialize(bindings)?;
    let mu2 = Scalar::param(Param::Mu2).specialize(bindings)?;
    let (m1, m2) = match kind {
        FglKind::Additive => (Scalar::zero(), Scalar::zero()),
        FglKind::Multiplicative => (mu1, Scalar::zero()),
        FglKind::Hyperbolic | FglKind::Custom => (mu1, mu2),
    };
    let u = PowerSeries::var(2, order, 0);
    let v = PowerSeries::var(2, order, 1);
    let f = hyperbolic_sum(&u, &v, &m1, &m2);
    FormalGroupLaw::assemble(kind, order, m1, m2, f)
}

/// A law given by its expanded series; the axioms are checked.
pub fn custom_fgl(f: PowerSeries) -> Result<FormalGroupLaw, FgaError> {
    if f.nvars() != 2 {
        return Err(FgaError::AxiomViolation("a formal group law has two variables".into()));
    }
    let order = f.order();
    if order < 2 {
        return Err(FgaError::OrderTooSmall);
    }
    let lin = [Monomial::new(&[1, 0]), Monomial::new(&[0, 1])];
    if !f.constant_term().is_zero() || lin.iter().any(|m| !f.coeff(*m).is_one()) {
        return Err(FgaError::AxiomViolation("linear part must be u + v".into()));
    }
    let law = FormalGroupLaw::assemble(FglKind::Custom, order, Scalar::zero(), Scalar::zero(), f)?;
    let report = law.check_axioms();
    if !report.passed() {
        return Err(FgaError::AxiomViolation(format!("{report:?}")));
    }
    Ok(law)
}

/// The law `exp(log u + log v)` for a univariate logarithm `x + O(x^2)`
/// with rational coefficients; the result is a custom law.
pub fn law_from_logarithm(log: &PowerSeries) -> Result<FormalGroupLaw, FgaError> {
    let exp = log.reversion()?;
    let order = log.order();
    let u = PowerSeries::var(2, order, 0);
    let v = PowerSeries::var(2, order, 1);
    let sum = log.substitute(std::slice::from_ref(&u))?.add_unchecked(&log.substitute(std::slice::from_ref(&v))?);
    let f = exp.substitute(&[sum])?;
    custom_fgl(f.with_reliable(order))
}

/// `(a + b - mu1 ab) / (1 + mu2 ab)`.
fn hyperbolic_sum(a: &PowerSeries, b: &PowerSeries, mu1: &Scalar, mu2: &Scalar) -> PowerSeries {
    let ab = a.mul_unchecked(b);
    let num = a.add_unchecked(b).add_unchecked(&ab.scale(&mu1.neg()));
    if mu2.is_zero() {
        return num;
    }
    let one = PowerSeries::one(a.nvars(), a.order());
    let den = one.add_unchecked(&ab.scale(mu2));
    num.mul_unchecked(&den.invert_unit().expect("1 + mu2 ab is a unit"))
}

impl FormalGroupLaw {
    fn assemble(kind: FglKind, order: u32, mu1: Scalar, mu2: Scalar, f: PowerSeries) -> Result<FormalGroupLaw, FgaError> {
        let g = extract_g(&f)?;
        let mut law = FormalGroupLaw {
            kind,
            order,
            mu1,
            mu2,
            f,
            g,
            inverse: PowerSeries::zero(1, order),
        };
        law.inverse = law.compute_inverse();
        Ok(law)
    }

    pub fn kind(&self) -> FglKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn series(&self) -> &PowerSeries {
        &self.f
    }

    /// `g^F(u, v)`, reliable two degrees below the law.
    pub fn g_series(&self) -> &PowerSeries {
        &self.g
    }

    pub fn mu1(&self) -> &Scalar {
        &self.mu1
    }

    pub fn mu2(&self) -> &Scalar {
        &self.mu2
    }

    /// The formal inverse `G(u)` with `F(u, G(u)) = 0`.
    pub fn formal_inverse(&self) -> &PowerSeries {
        &self.inverse
    }

    /// `F(a, b)` for series of equal shape with zero constant terms.
    pub fn apply(&self, a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
        match self.kind {
            FglKind::Custom => {
                let fa = self.f.with_order(a.order());
                SubstitutionTable::new(&[a.clone(), b.clone()])
                    .expect("formal sum of nilpotent series")
                    .apply(&fa)
            }
            _ => hyperbolic_sum(a, b, &self.mu1, &self.mu2),
        }
    }

    fn compute_inverse(&self) -> PowerSeries {
        // Fix one coefficient per degree: [u^d] F(u, G(u)) = g_d + (terms in
        // lower coefficients of G).
        let n = self.order;
        let u = PowerSeries::var(1, n, 0);
        let mut g = u.neg();
        for d in 2..=n {
            let val = self.apply(&u, &g);
            let c = val.coeff(Monomial::new(&[d]));
            if !c.is_zero() {
                let corr = PowerSeries::from_terms(1, n, vec![(Monomial::new(&[d]), c.neg())]);
                g = g.add_unchecked(&corr);
            }
        }
        g.with_reliable(n)
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.order;
        let u = PowerSeries::var(2, n, 0);
        let v = PowerSeries::var(2, n, 1);
        let zero = PowerSeries::zero(2, n);
        let identity = self.apply(&u, &zero).agrees_with(&u).0;
        let commutative = self.apply(&v, &u).agrees_with(&self.apply(&u, &v)).0;
        let (x, y, z) = (PowerSeries::var(3, n, 0), PowerSeries::var(3, n, 1), PowerSeries::var(3, n, 2));
        let left = self.apply(&self.apply(&x, &y), &z);
        let right = self.apply(&x, &self.apply(&y, &z));
        let (associative, checked_to) = left.agrees_with(&right);
        AxiomReport { identity, commutative, associative, checked_to }
    }

    /// `F(u, G(u))`, which must vanish.
    pub fn inverse_residual(&self) -> PowerSeries {
        self.apply(&PowerSeries::var(1, self.order, 0), &self.inverse)
    }

    /// Formal multiple `[m] u` as a univariate series, by binary folding.
    pub fn multiple(&self, m: i64) -> PowerSeries {
        let n = self.order;
        let u = PowerSeries::var(1, n, 0);
        if m == 0 {
            return PowerSeries::zero(1, n);
        }
        let base = if m > 0 { u.clone() } else { self.inverse.clone() };
        let k = m.unsigned_abs();
        let top = 63 - k.leading_zeros();
        let mut acc = base.clone();
        for bit in (0..top).rev() {
            acc = self.apply(&acc, &acc);
            if (k >> bit) & 1 == 1 {
                acc = self.apply(&acc, &base);
            }
        }
        acc
    }

    /// Coefficients specialized through `bindings`.
    pub fn specialize(&self, bindings: &Bindings) -> Result<FormalGroupLaw, FgaError> {
        let sp = |s: &Scalar| s.specialize(bindings);
        Ok(FormalGroupLaw {
            kind: self.kind,
            order: self.order,
            mu1: sp(&self.mu1)?,
            mu2: sp(&self.mu2)?,
            f: self.f.map_coeffs(sp)?,
            g: self.g.map_coeffs(sp)?,
            inverse: self.inverse.map_coeffs(sp)?,
        })
    }

    /// The same law truncated at another order.
    pub fn with_order(&self, order: u32) -> Result<FormalGroupLaw, FgaError> {
        if order == self.order {
            return Ok(self.clone());
        }
        match self.kind {
            FglKind::Custom => {
                if order > self.order {
                    return Err(FgaError::AxiomViolation(format!(
                        "custom law known only to order {}",
                        self.order
                    )));
                }
                FormalGroupLaw::assemble(FglKind::Custom, order, Scalar::zero(), Scalar::zero(), self.f.with_order(order))
            }
            _ => {
                let u = PowerSeries::var(2, order, 0);
                let v = PowerSeries::var(2, order, 1);
                let f = hyperbolic_sum(&u, &v, &self.mu1, &self.mu2);
                FormalGroupLaw::assemble(self.kind, order, self.mu1.clone(), self.mu2.clone(), f)
            }
        }
    }
}

/// `(u + v - F(u, v)) / uv`, asserting exact divisibility.
fn extract_g(f: &PowerSeries) -> Result<PowerSeries, FgaError> {
    let n = f.order();
    let u = PowerSeries::var(2, n, 0);
    let v = PowerSeries::var(2, n, 1);
    let diff = u.add_unchecked(&v).add_unchecked(&f.neg());
    let mut terms = Vec::new();
    for (m, c) in diff.terms() {
        if m.exp(0) == 0 || m.exp(1) == 0 {
            return Err(FgaError::AxiomViolation(format!(
                "u + v - F has a pure term at {:?}",
                m.exps(2)
            )));
        }
        terms.push((Monomial::new(&[m.exp(0) - 1, m.exp(1) - 1]), c.clone()));
    }
    Ok(PowerSeries::from_terms(2, n, terms).with_reliable(f.reliable().saturating_sub(2)))
}

type Cache<K, V> = Mutex<HashMap<K, Arc<V>>>;

/// The formal group algebra of a lattice of rank `n`, realized as power
/// series in `x_1, ..., x_n` (the symbols of the chosen basis).
pub struct FgaContext {
    fgl: FormalGroupLaw,
    lattice: Lattice,
    order: u32,
    multiples: Cache<i64, PowerSeries>,
    x_cache: Cache<Vec<i64>, PowerSeries>,
    subst_cache: Cache<IMat, SubstitutionTable>,
}

impl fmt::Debug for FgaContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FgaContext")
            .field("law", &self.fgl.kind)
            .field("rank", &self.lattice.dim())
            .field("order", &self.order)
            .finish()
    }
}

impl Clone for FgaContext {
    fn clone(&self) -> FgaContext {
        FgaContext::new(self.fgl.clone(), self.lattice.clone())
    }
}

impl FgaContext {
    pub fn new(fgl: FormalGroupLaw, lattice: Lattice) -> FgaContext {
        FgaContext {
            order: fgl.order(),
            fgl,
            lattice,
            multiples: Mutex::default(),
            x_cache: Mutex::default(),
            subst_cache: Mutex::default(),
        }
    }

    /// Same law and lattice at another truncation order.
    pub fn with_order(&self, order: u32) -> Result<FgaContext, FgaError> {
        Ok(FgaContext::new(self.fgl.with_order(order)?, self.lattice.clone()))
    }

    pub fn fgl(&self) -> &FormalGroupLaw {
        &self.fgl
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.lattice.dim()
    }

    pub fn zero(&self) -> PowerSeries {
        PowerSeries::zero(self.nvars(), self.order)
    }

    pub fn one(&self) -> PowerSeries {
        PowerSeries::one(self.nvars(), self.order)
    }

    pub fn constant(&self, c: Scalar) -> PowerSeries {
        PowerSeries::constant(self.nvars(), self.order, c)
    }

    fn multiple(&self, m: i64) -> Arc<PowerSeries> {
        if let Some(s) = self.multiples.lock().unwrap().get(&m) {
            return s.clone();
        }
        let s = Arc::new(self.fgl.multiple(m));
        self.multiples.lock().unwrap().insert(m, s.clone());
        s
    }

    /// `[m] x_k` placed in variable `k`.
    fn multiple_in_var(&self, m: i64, k: usize) -> PowerSeries {
        let uni = self.multiple(m);
        let terms = uni
            .terms()
            .iter()
            .map(|(mono, c)| {
                let mut e = vec![0u32; self.nvars()];
                e[k] = mono.exp(0);
                (Monomial::new(&e), c.clone())
            })
            .collect();
        PowerSeries::from_terms(self.nvars(), self.order, terms).with_reliable(uni.reliable())
    }

    /// `x_lambda` for `lambda` in lattice coordinates.
    pub fn x_lambda(&self, lambda: &[i64]) -> PowerSeries {
        assert_eq!(lambda.len(), self.nvars(), "lambda has the wrong length");
        if let Some(s) = self.x_cache.lock().unwrap().get(lambda) {
            return (**s).clone();
        }
        let mut acc: Option<PowerSeries> = None;
        for (k, &m) in lambda.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let part = self.multiple_in_var(m, k);
            acc = Some(match acc {
                None => part,
                Some(a) => self.fgl.apply(&a, &part),
            });
        }
        let x = acc.unwrap_or_else(|| self.zero());
        self.x_cache.lock().unwrap().insert(lambda.to_vec(), Arc::new(x.clone()));
        x
    }

    /// `x_alpha` for a root given in simple-root coordinates.
    pub fn x_root(&self, root_coords: &[i64]) -> PowerSeries {
        self.x_lambda(&self.lattice.from_root_coords(root_coords))
    }

    fn table_for(&self, m: &IMat) -> Arc<SubstitutionTable> {
        if let Some(t) = self.subst_cache.lock().unwrap().get(m) {
            return t.clone();
        }
        let images: Vec<PowerSeries> =
            (0..self.nvars()).map(|k| self.x_lambda(&intmat::column(m, k))).collect();
        let table = Arc::new(SubstitutionTable::new(&images).expect("images of basis symbols are nilpotent"));
        self.subst_cache.lock().unwrap().insert(m.clone(), table.clone());
        table
    }

    /// Action of the lattice automorphism `m` (columns are images of basis
    /// vectors): `x_{e_k} -> x_{m e_k}`.
    pub fn act_matrix(&self, m: &IMat, f: &PowerSeries) -> PowerSeries {
        if *m == intmat::identity(self.nvars()) {
            return f.clone();
        }
        self.table_for(m).apply(f)
    }

    pub fn weyl_act(&self, w: &WeylElement, f: &PowerSeries) -> PowerSeries {
        self.act_matrix(w.lattice_matrix(), f)
    }

    /// Lattice matrix of the reflection `v -> v - <v, alpha^v> alpha`.
    pub fn reflection_matrix(&self, alpha: &RealRoot) -> IMat {
        let n = self.nvars();
        let mut m = intmat::identity(n);
        for r in 0..n {
            for k in 0..n {
                m[r][k] -= alpha.vec[r] * alpha.coroot[k];
            }
        }
        m
    }

    /// `f / x_lambda` for primitive `lambda`.
    pub fn divide_by_x(&self, f: &PowerSeries, lambda: &[i64]) -> Result<PowerSeries, SeriesError> {
        if intmat::gcd_all(lambda) != 1 {
            return Err(SeriesError::NotPrimitive(lambda.to_vec()));
        }
        f.divide(&self.x_lambda(lambda))
    }

    /// `f / x_lambda` for any nonzero `lambda`; the linear part of
    /// `x_lambda` always has a rational pivot.
    pub fn divide_by_x_any(&self, f: &PowerSeries, lambda: &[i64]) -> Result<PowerSeries, SeriesError> {
        f.divide(&self.x_lambda(lambda))
    }

    /// `Delta_alpha(f) = (f - s_alpha f) / x_alpha`.
    pub fn demazure(&self, alpha: &RealRoot, f: &PowerSeries) -> PowerSeries {
        let s = self.act_matrix(&self.reflection_matrix(alpha), f);
        let diff = f.add_unchecked(&s.neg());
        self.divide_by_x(&diff, &alpha.vec)
            .unwrap_or_else(|e| panic!("Demazure operator: x_alpha must divide f - s_alpha f ({e})"))
    }

    /// `kappa_alpha = g^F(x_alpha, x_{-alpha})`.
    pub fn kappa_alpha(&self, alpha: &[i64]) -> PowerSeries {
        let neg: Vec<i64> = alpha.iter().map(|x| -x).collect();
        let images = [self.x_lambda(alpha), self.x_lambda(&neg)];
        let g = self.fgl.g_series().with_order(self.order);
        SubstitutionTable::new(&images).expect("nilpotent").apply(&g)
    }

    /// `kappa_{lambda,mu} = 1/(x_{lambda+mu}) (1/x_mu - 1/x_{-lambda}) - 1/(x_lambda x_mu)`,
    /// computed as one numerator divided successively by the four factors
    /// of the common denominator. The result is reliable four degrees below
    /// the working order.
    pub fn kappa_pair(&self, lambda: &[i64], mu: &[i64]) -> Result<PowerSeries, FgaError> {
        let sum: Vec<i64> = lambda.iter().zip(mu).map(|(a, b)| a + b).collect();
        let neg: Vec<i64> = lambda.iter().map(|x| -x).collect();
        for (name, v) in [("lambda", lambda), ("mu", mu), ("lambda+mu", &sum[..])] {
            if v.iter().all(|&x| x == 0) {
                return Err(FgaError::NotRegular(format!("x_{name} = 0")));
            }
        }
        let xl = self.x_lambda(lambda);
        let xm = self.x_lambda(mu);
        let xs = self.x_lambda(&sum);
        let xn = self.x_lambda(&neg);
        let num = xl
            .mul_unchecked(&xn.add_unchecked(&xm.neg()))
            .add_unchecked(&xs.mul_unchecked(&xn).neg());
        let mut q = num;
        for (name, v) in [("x_{lambda+mu}", &sum), ("x_mu", &mu.to_vec()), ("x_{-lambda}", &neg), ("x_lambda", &lambda.to_vec())] {
            q = self
                .divide_by_x_any(&q, v)
                .map_err(|e| FgaError::NotRegular(format!("{name}: {e}")))?;
        }
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{Gcm, WeylGroup};

    fn sc(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn uni(terms: &[(u32, &str)], order: u32) -> PowerSeries {
        PowerSeries::from_terms(1, order, terms.iter().map(|(e, c)| (Monomial::new(&[*e]), sc(c))).collect())
    }

    fn a2_ctx(kind: FglKind, order: u32) -> FgaContext {
        let g = Gcm::new(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        FgaContext::new(make_fgl(kind, &Bindings::new(), order).unwrap(), Lattice::root_lattice(&g))
    }

    #[test]
    fn expanded_laws() {
        let f = make_fgl(FglKind::Hyperbolic, &Bindings::new(), 4).unwrap();
        let expect: Vec<(Monomial, Scalar)> = vec![
            (Monomial::new(&[0, 1]), sc("1")),
            (Monomial::new(&[1, 0]), sc("1")),
            (Monomial::new(&[1, 1]), sc("-mu1")),
            (Monomial::new(&[1, 2]), sc("-mu2")),
            (Monomial::new(&[2, 1]), sc("-mu2")),
            (Monomial::new(&[2, 2]), sc("mu1*mu2")),
        ];
        assert_eq!(f.series().terms(), PowerSeries::from_terms(2, 4, expect).terms());
        let m = make_fgl(FglKind::Multiplicative, &Bindings::new(), 4).unwrap();
        assert_eq!(m.series().terms().len(), 3);
        let a = make_fgl(FglKind::Additive, &Bindings::new(), 4).unwrap();
        assert_eq!(a.series().terms().len(), 2);
    }

    #[test]
    fn inverses() {
        let a = make_fgl(FglKind::Additive, &Bindings::new(), 6).unwrap();
        assert_eq!(a.formal_inverse().terms(), uni(&[(1, "-1")], 6).terms());
        // -u / (1 - mu1 u)
        let expect = uni(&[(1, "-1"), (2, "-mu1"), (3, "-mu1^2"), (4, "-mu1^3"), (5, "-mu1^4")], 5);
        for kind in [FglKind::Multiplicative, FglKind::Hyperbolic] {
            let f = make_fgl(kind, &Bindings::new(), 5).unwrap();
            assert_eq!(f.formal_inverse().terms(), expect.terms());
            assert!(f.inverse_residual().is_zero_to_reliable());
        }
    }

    #[test]
    fn axioms_hold() {
        for kind in [FglKind::Additive, FglKind::Multiplicative, FglKind::Hyperbolic] {
            assert!(make_fgl(kind, &Bindings::new(), 6).unwrap().check_axioms().passed());
        }
    }

    #[test]
    fn custom_law_rejects_non_associative() {
        // u + v + u^2 v^2: commutative with the right linear part, not
        // associative in degree 4.
        let f = PowerSeries::from_terms(
            2,
            4,
            vec![
                (Monomial::new(&[1, 0]), sc("1")),
                (Monomial::new(&[0, 1]), sc("1")),
                (Monomial::new(&[2, 2]), sc("1")),
            ],
        );
        assert!(matches!(custom_fgl(f), Err(FgaError::AxiomViolation(_))));
        let ok = make_fgl(FglKind::Hyperbolic, &Bindings::new(), 5).unwrap();
        assert!(custom_fgl(ok.series().clone()).is_ok());
    }

    #[test]
    fn multiples() {
        let f = make_fgl(FglKind::Multiplicative, &Bindings::new(), 5).unwrap();
        // [m]u = (1 - (1 - mu1 u)^m) / mu1
        let three = uni(&[(1, "3"), (2, "-3*mu1"), (3, "mu1^2")], 5);
        assert_eq!(f.multiple(3).terms(), three.terms());
        let two = uni(&[(1, "2"), (2, "-mu1")], 5);
        assert_eq!(f.multiple(2).terms(), two.terms());
        assert_eq!(f.multiple(1).terms(), uni(&[(1, "1")], 5).terms());
        for m in [4i64, 5, 6, 7, -1, -2, -5] {
            let direct = (0..m.unsigned_abs()).fold(PowerSeries::zero(1, 5), |acc, _| {
                let base = if m > 0 { PowerSeries::var(1, 5, 0) } else { f.formal_inverse().clone() };
                f.apply(&acc, &base)
            });
            assert!(f.multiple(m).agrees_with(&direct).0, "m = {m}");
        }
    }

    #[test]
    fn x_lambda_examples() {
        let ctx = a2_ctx(FglKind::Hyperbolic, 3);
        assert_eq!(ctx.x_lambda(&[1, 0]).terms(), PowerSeries::var(2, 3, 0).terms());
        assert!(ctx.x_lambda(&[0, 0]).is_empty());
        let expect = PowerSeries::from_terms(
            2,
            3,
            vec![
                (Monomial::new(&[1, 0]), sc("1")),
                (Monomial::new(&[0, 1]), sc("1")),
                (Monomial::new(&[1, 1]), sc("-mu1")),
                (Monomial::new(&[2, 1]), sc("-mu2")),
                (Monomial::new(&[1, 2]), sc("-mu2")),
            ],
        );
        assert_eq!(ctx.x_lambda(&[1, 1]).terms(), expect.terms());
    }

    #[test]
    fn demazure_examples() {
        let ctx = a2_ctx(FglKind::Additive, 6);
        let lat = ctx.lattice().clone();
        let roots = WeylGroup::new(&lat).real_roots_up_to(0);
        let a1 = &roots[0];
        assert!(ctx.demazure(a1, &ctx.one()).is_zero_to_reliable());
        let d = ctx.demazure(a1, &ctx.x_lambda(&[1, 0]));
        assert!(d.agrees_with(&ctx.constant(Scalar::from_int(2))).0);

        let hyp = a2_ctx(FglKind::Hyperbolic, 6);
        let d = hyp.demazure(a1, &hyp.x_lambda(&[1, 0]));
        // (x - G(x)) / x = 2 + mu1 x + mu1^2 x^2 + ...
        let expect = PowerSeries::from_terms(
            2,
            6,
            (0..6)
                .map(|k| {
                    let c = if k == 0 { sc("2") } else { Scalar::param_pow(Param::Mu1, k as i32) };
                    (Monomial::new(&[k, 0]), c)
                })
                .collect(),
        );
        let (ok, to) = d.agrees_with(&expect);
        assert!(ok);
        assert_eq!(to, 5);
    }

    #[test]
    fn kappas() {
        let hyp = a2_ctx(FglKind::Hyperbolic, 8);
        let k = hyp.kappa_alpha(&[1, 0]);
        assert!(k.agrees_with(&hyp.constant(sc("mu1"))).0);
        let kp = hyp.kappa_pair(&[1, 0], &[0, 1]).unwrap();
        let (ok, to) = kp.agrees_with(&hyp.constant(sc("mu2")));
        assert!(ok);
        assert_eq!(to, 4);
        let add = a2_ctx(FglKind::Additive, 6);
        assert!(add.kappa_alpha(&[1, 0]).is_zero_to_reliable());
        assert!(add.kappa_pair(&[1, 0], &[0, 1]).unwrap().is_zero_to_reliable());
        let mult = a2_ctx(FglKind::Multiplicative, 6);
        assert!(mult.kappa_alpha(&[1, 0]).agrees_with(&mult.constant(sc("mu1"))).0);
    }

    #[test]
    fn weyl_action_on_symbols() {
        let ctx = a2_ctx(FglKind::Hyperbolic, 6);
        let w = WeylGroup::new(ctx.lattice());
        for word in [&[0usize][..], &[0, 1], &[1, 0, 1]] {
            let e = w.from_word(word);
            for lam in [[1i64, 0], [0, 1], [1, 1], [2, -1]] {
                let lhs = ctx.weyl_act(&e, &ctx.x_lambda(&lam));
                let rhs = ctx.x_lambda(&e.act_lattice(&lam));
                assert!(lhs.agrees_with(&rhs).0, "{word:?} {lam:?}");
            }
        }
        let s = w.from_word(&[0]);
        let f = ctx.x_lambda(&[1, 1]).mul_unchecked(&ctx.x_lambda(&[0, 1]));
        assert!(ctx.weyl_act(&s, &ctx.weyl_act(&s, &f)).agrees_with(&f).0);
    }
}
