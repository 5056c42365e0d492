//! The coefficient ring `Q[mu1, mu2, t, t^-1, u, u^-1]`.
//!
//! A [`Scalar`] is a finite sum of rational multiples of parameter monomials.
//! Terms are kept sorted by packed exponent with no zero coefficients, so
//! structural equality is ring equality.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rational::Q;

/// One of the four ring parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Mu1,
    Mu2,
    T,
    U,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Mu1, Param::Mu2, Param::T, Param::U];

    fn slot(self) -> usize {
        match self {
            Param::Mu1 => 0,
            Param::Mu2 => 1,
            Param::T => 2,
            Param::U => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Mu1 => "mu1",
            Param::Mu2 => "mu2",
            Param::T => "t",
            Param::U => "u",
        }
    }

    /// Whether negative exponents are allowed for this parameter.
    pub fn is_laurent(self) -> bool {
        matches!(self, Param::T | Param::U)
    }
}

impl FromStr for Param {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Param, ScalarError> {
        match s.trim() {
            "mu1" | "μ1" | "μ₁" => Ok(Param::Mu1),
            "mu2" | "μ2" | "μ₂" => Ok(Param::Mu2),
            "t" => Ok(Param::T),
            "u" => Ok(Param::U),
            other => Err(ScalarError::Parse(format!("unknown parameter `{other}`"))),
        }
    }
}

const BIAS: i64 = 1 << 15;
const ALL_BIAS: u64 = (BIAS as u64) * (1 + (1 << 16) + (1 << 32) + (1 << 48));

/// A parameter monomial `mu1^a mu2^b t^c u^d`, packed as four biased 16-bit
/// fields so that multiplication is a single addition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PMono(u64);

impl PMono {
    pub const ONE: PMono = PMono(ALL_BIAS);

    pub fn new(exps: [i32; 4]) -> PMono {
        let mut packed = 0u64;
        for (k, &e) in exps.iter().enumerate() {
            let biased = e as i64 + BIAS;
            assert!((0..1 << 16).contains(&biased), "parameter exponent out of range");
            packed |= (biased as u64) << (48 - 16 * k);
        }
        PMono(packed)
    }

    pub fn exp(self, p: Param) -> i32 {
        let k = p.slot();
        (((self.0 >> (48 - 16 * k)) & 0xffff) as i64 - BIAS) as i32
    }

    pub fn exps(self) -> [i32; 4] {
        Param::ALL.map(|p| self.exp(p))
    }

    pub fn mul(self, other: PMono) -> PMono {
        // Exact whenever every resulting field is in range.
        PMono(self.0.wrapping_add(other.0).wrapping_sub(ALL_BIAS))
    }

    pub fn is_one(self) -> bool {
        self == PMono::ONE
    }

    /// Inverse monomial, available only when every nonzero exponent sits on a
    /// Laurent parameter.
    pub fn inv(self) -> Option<PMono> {
        let e = self.exps();
        if e[0] != 0 || e[1] != 0 {
            return None;
        }
        Some(PMono::new([0, 0, -e[2], -e[3]]))
    }
}

impl fmt::Debug for PMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("parameter {0} occurs in its own binding")]
    CyclicBinding(&'static str),
    #[error("cannot substitute a non-unit for {0} under a negative exponent")]
    NotInvertible(&'static str),
    #[error("negative exponent on polynomial parameter {0}")]
    NegativeExponent(&'static str),
    #[error("scalar parse error: {0}")]
    Parse(String),
}

/// An element of the parameter ring in canonical form.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Scalar {
    terms: Vec<(PMono, Q)>,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { terms: Vec::new() }
    }

    pub fn one() -> Scalar {
        Scalar::from_q(Q::ONE)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_q(Q::from_int(n))
    }

    pub fn from_q(q: Q) -> Scalar {
        Scalar::monomial(q, PMono::ONE)
    }

    pub fn monomial(q: Q, m: PMono) -> Scalar {
        if q.is_zero() {
            Scalar::zero()
        } else {
            Scalar { terms: vec![(m, q)] }
        }
    }

    /// The parameter `p` raised to `e`.
    pub fn param_pow(p: Param, e: i32) -> Scalar {
        let mut exps = [0; 4];
        exps[p.slot()] = e;
        Scalar::monomial(Q::ONE, PMono::new(exps))
    }

    pub fn param(p: Param) -> Scalar {
        Scalar::param_pow(p, 1)
    }

    /// Builds a scalar from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(mut raw: Vec<(PMono, Q)>) -> Scalar {
        raw.sort_unstable_by_key(|(m, _)| *m);
        let mut terms: Vec<(PMono, Q)> = Vec::with_capacity(raw.len());
        for (m, q) in raw {
            match terms.last_mut() {
                Some((lm, lq)) if *lm == m => *lq = lq.add(&q),
                _ => terms.push((m, q)),
            }
        }
        terms.retain(|(_, q)| !q.is_zero());
        Scalar { terms }
    }

    pub fn terms(&self) -> &[(PMono, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The rational value if this scalar is constant.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::ZERO),
            [(m, q)] if m.is_one() => Some(q.clone()),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
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
        Scalar { terms: out }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, q)| (*m, q.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if other.terms.len() == 1 && other.terms[0].0.is_one() {
            return self.scale(&other.terms[0].1);
        }
        if self.terms.len() == 1 && self.terms[0].0.is_one() {
            return other.scale(&self.terms[0].1);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                raw.push((ma.mul(*mb), qa.mul(qb)));
            }
        }
        Scalar::from_terms(raw)
    }

    /// Appends the raw (uncanonicalized) product terms of `self * other`.
    pub(crate) fn mul_into(&self, other: &Scalar, raw: &mut Vec<(PMono, Q)>) {
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                raw.push((ma.mul(*mb), qa.mul(qb)));
            }
        }
    }

    pub fn scale(&self, q: &Q) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        if q.is_one() {
            return self.clone();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (*m, c.mul(q))).collect(),
        }
    }

    pub fn mul_mono(&self, m: PMono) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Units of this ring are nonzero rational multiples of monomials in the
    /// Laurent parameters.
    pub fn inv(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [(m, q)] => Some(Scalar::monomial(q.inv()?, m.inv()?)),
            _ => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.inv().is_some()
    }

    /// Largest exponent of `p` across the terms (0 for the zero scalar).
    pub fn max_exp(&self, p: Param) -> i32 {
        self.terms.iter().map(|(m, _)| m.exp(p)).max().unwrap_or(0)
    }

    pub fn mentions(&self, p: Param) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(p) != 0)
    }

    /// Substitutes scalars for parameters. The bindings are applied
    /// simultaneously.
    pub fn specialize(&self, bindings: &Bindings) -> Result<Scalar, ScalarError> {
        bindings.check()?;
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut powers: BTreeMap<(Param, i32), Scalar> = BTreeMap::new();
        let mut acc = Vec::new();
        for (m, q) in &self.terms {
            let mut kept = [0i32; 4];
            let mut factor = Scalar::from_q(q.clone());
            for p in Param::ALL {
                let e = m.exp(p);
                if e == 0 {
                    continue;
                }
                match bindings.get(p) {
                    None => kept[p.slot()] = e,
                    Some(image) => {
                        let pw = match powers.get(&(p, e)) {
                            Some(s) => s.clone(),
                            None => {
                                let base = if e < 0 {
                                    image.inv().ok_or(ScalarError::NotInvertible(p.name()))?
                                } else {
                                    image.clone()
                                };
                                let s = base.pow(e.unsigned_abs());
                                powers.insert((p, e), s.clone());
                                s
                            }
                        };
                        factor = factor.mul(&pw);
                    }
                }
            }
            let term = factor.mul_mono(PMono::new(kept));
            acc.extend(term.terms);
        }
        Ok(Scalar::from_terms(acc))
    }
}

/// A simultaneous substitution of scalars for parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    map: BTreeMap<Param, Scalar>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn with(mut self, p: Param, value: Scalar) -> Bindings {
        self.map.insert(p, value);
        self
    }

    pub fn insert(&mut self, p: Param, value: Scalar) {
        self.map.insert(p, value);
    }

    pub fn get(&self, p: Param) -> Option<&Scalar> {
        self.map.get(&p)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Param, &Scalar)> {
        self.map.iter()
    }

    pub fn check(&self) -> Result<(), ScalarError> {
        for (p, image) in &self.map {
            if image.mentions(*p) {
                return Err(ScalarError::CyclicBinding(p.name()));
            }
        }
        Ok(())
    }

    /// Specialization used by the Hecke isomorphism:
    /// `mu1 = u(t + t^-1)`, `mu2 = -u^2`.
    pub fn hecke() -> Bindings {
        let t = Scalar::param(Param::T);
        let tinv = Scalar::param_pow(Param::T, -1);
        let u = Scalar::param(Param::U);
        Bindings::new()
            .with(Param::Mu1, u.mul(&t.add(&tinv)))
            .with(Param::Mu2, u.mul(&u).neg())
    }

    /// Specialization of the affine corollary: `u = 1`, `mu1 = t + t^-1`,
    /// `mu2 = -1`.
    pub fn affine_hecke() -> Bindings {
        let t = Scalar::param(Param::T);
        let tinv = Scalar::param_pow(Param::T, -1);
        Bindings::new()
            .with(Param::Mu1, t.add(&tinv))
            .with(Param::Mu2, Scalar::from_int(-1))
            .with(Param::U, Scalar::one())
    }

    /// Parses `PARAM=EXPR`.
    pub fn parse_assignment(s: &str) -> Result<(Param, Scalar), ScalarError> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| ScalarError::Parse(format!("expected PARAM=EXPR, got `{s}`")))?;
        Ok((lhs.parse()?, rhs.parse()?))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::from_int(n)
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Scalar {
        Scalar::from_q(q)
    }
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

fn fmt_mono(m: PMono, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for p in Param::ALL {
        match m.exp(p) {
            0 => {}
            1 => write!(f, "*{}", p.name())?,
            e => write!(f, "*{}^{}", p.name(), e)?,
        }
    }
    Ok(())
}

impl fmt::Display for Scalar {
    /// Terms as `<rational>*mu1^a*mu2^b*t^c*u^d`, highest monomial first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, q)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                if q.is_negative() {
                    write!(f, " - {}", q.neg())?;
                } else {
                    write!(f, " + {q}")?;
                }
            } else {
                write!(f, "{q}")?;
            }
            fmt_mono(*m, f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Parses sums, differences, products, integer powers and parentheses over
    /// rationals and the four parameters. The canonical output of `Display`
    /// is a special case.
    fn from_str(s: &str) -> Result<Scalar, ScalarError> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> ScalarError {
        ScalarError::Parse(format!(
            "{what} at byte {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let (base, param) = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let e: i32 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("bad exponent"))?;
        if e >= 0 {
            return Ok(base.pow(e as u32));
        }
        match param {
            Some(p) if p.is_laurent() => Ok(Scalar::param_pow(p, e)),
            Some(p) => Err(ScalarError::NegativeExponent(p.name())),
            None => base
                .inv()
                .map(|b| b.pow(e.unsigned_abs()))
                .ok_or_else(|| self.error("negative power of a non-unit")),
        }
    }

    fn atom(&mut self) -> Result<(Scalar, Option<Param>), ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok((v, None))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'/')
                {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let q: Q = lit.parse().map_err(|_| self.error("bad rational"))?;
                Ok((Scalar::from_q(q), None))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let p: Param = name.parse()?;
                Ok((Scalar::param(p), Some(p)))
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn laurent_product() {
        assert_eq!(s("t + t^-1").mul(&s("t")), s("t^2 + 1"));
    }

    #[test]
    fn monomial_scaling() {
        assert_eq!(s("mu2").mul(&s("3*mu2")), s("3*mu2^2"));
    }

    #[test]
    fn additive_inverse() {
        let a = s("2/3*mu1*t^-2 - 5*u + 1");
        assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn hecke_specialization_of_mu1() {
        let out = s("mu1").specialize(&Bindings::hecke()).unwrap();
        assert_eq!(out, s("u*t + u*t^-1"));
    }

    #[test]
    fn additive_specialization_kills_mixed_term() {
        let b = Bindings::new()
            .with(Param::Mu1, Scalar::zero())
            .with(Param::Mu2, Scalar::zero());
        assert!(s("mu1*mu2").specialize(&b).unwrap().is_zero());
    }

    #[test]
    fn untouched_parameter_survives() {
        let b = Bindings::new().with(Param::U, Scalar::one());
        assert_eq!(s("t").specialize(&b).unwrap(), s("t"));
    }

    #[test]
    fn cyclic_binding_rejected() {
        let b = Bindings::new().with(Param::Mu1, s("mu1 + 1"));
        assert_eq!(s("mu1").specialize(&b), Err(ScalarError::CyclicBinding("mu1")));
    }

    #[test]
    fn negative_exponent_needs_unit_image() {
        let b = Bindings::new().with(Param::T, s("1 + u"));
        assert!(matches!(
            s("t^-1").specialize(&b),
            Err(ScalarError::NotInvertible(_))
        ));
        let b = Bindings::new().with(Param::T, s("2*u"));
        assert_eq!(s("t^-2").specialize(&b).unwrap(), s("1/4*u^-2"));
    }

    #[test]
    fn display_roundtrip() {
        let a = s("-3/4*mu1^2*mu2*t^-3*u + 7 - t");
        let text = a.to_string();
        assert_eq!(s(&text), a);
        assert_eq!(Scalar::zero().to_string(), "0");
        assert_eq!(s("u*t^-1").to_string(), "1*t^-1*u");
    }

    #[test]
    fn polynomial_parameters_reject_negative_powers() {
        assert!(matches!(
            "mu1^-1".parse::<Scalar>(),
            Err(ScalarError::NegativeExponent("mu1"))
        ));
    }

    #[test]
    fn unit_inverse() {
        let a = s("-2*t^3*u");
        assert!(a.mul(&a.inv().unwrap()).is_one());
        assert!(s("1 + t").inv().is_none());
    }
}
