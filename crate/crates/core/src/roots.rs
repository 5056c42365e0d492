//! Generalized Cartan matrices, lattices with simple roots and coroots, and
//! Weyl group arithmetic through the integer action on lattices.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat::{self, IMat};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("invalid generalized Cartan matrix: {0}")]
    InvalidGcm(String),
    #[error("decomposable Cartan matrix with components {0:?}; classify each block separately")]
    Decomposable(Vec<Vec<usize>>),
    #[error("Cartan matrix is not of affine type")]
    NotAffine,
    #[error("B^-1 is not an integer matrix")]
    NotIntegralInverse,
    #[error("pairing <lambda_{basis}, alpha_{root}^v> = {value} is not an integer")]
    PairingNotIntegral { root: usize, basis: usize, value: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inconsistent lattice data: {0}")]
    Inconsistent(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// A generalized Cartan matrix `a_ij = <alpha_j, alpha_i^v>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GcmJson", into = "GcmJson")]
pub struct Gcm {
    a: IMat,
}

#[derive(Serialize, Deserialize)]
struct GcmJson {
    matrix: IMat,
}

impl TryFrom<GcmJson> for Gcm {
    type Error = RootError;
    fn try_from(j: GcmJson) -> Result<Gcm, RootError> {
        Gcm::new(j.matrix)
    }
}

impl From<Gcm> for GcmJson {
    fn from(g: Gcm) -> GcmJson {
        GcmJson { matrix: g.a }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoxeterOrder {
    Finite(u32),
    Infinite,
}

impl fmt::Display for CoxeterOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterOrder::Finite(m) => write!(f, "{m}"),
            CoxeterOrder::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CartanType {
    Finite,
    /// Affine, with the numerical labels `a_i` of the null root.
    Affine { labels: Vec<i64> },
    Indefinite,
}

impl CartanType {
    pub fn tag(&self) -> &'static str {
        match self {
            CartanType::Finite => "Fin",
            CartanType::Affine { .. } => "Aff",
            CartanType::Indefinite => "Ind",
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl Gcm {
    pub fn new(a: IMat) -> Result<Gcm, RootError> {
        let l = a.len();
        if l == 0 {
            return Err(RootError::InvalidGcm("empty matrix".into()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != l {
                return Err(RootError::InvalidGcm(format!("row {i} has length {}", row.len())));
            }
            if row[i] != 2 {
                return Err(RootError::InvalidGcm(format!("a_{i}{i} = {} (must be 2)", row[i])));
            }
            for j in 0..l {
                if i == j {
                    continue;
                }
                if row[j] > 0 {
                    return Err(RootError::InvalidGcm(format!("a_{i}{j} = {} is positive", row[j])));
                }
                if (row[j] == 0) != (a[j][i] == 0) {
                    return Err(RootError::InvalidGcm(format!("a_{i}{j} and a_{j}{i} differ in vanishing")));
                }
            }
        }
        Ok(Gcm { a })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &IMat {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn coxeter_order(&self, i: usize, j: usize) -> CoxeterOrder {
        match self.a[i][j] * self.a[j][i] {
            0 => CoxeterOrder::Finite(2),
            1 => CoxeterOrder::Finite(3),
            2 => CoxeterOrder::Finite(4),
            3 => CoxeterOrder::Finite(6),
            _ => CoxeterOrder::Infinite,
        }
    }

    /// Connected components of the Dynkin graph.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let l = self.rank();
        let mut seen = vec![false; l];
        let mut out = Vec::new();
        for start in 0..l {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < comp.len() {
                let i = comp[k];
                for j in 0..l {
                    if !seen[j] && self.a[i][j] != 0 {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Finite / affine / indefinite by the signs of the principal minors.
    pub fn classify(&self) -> Result<CartanType, RootError> {
        let comps = self.components();
        if comps.len() > 1 {
            return Err(RootError::Decomposable(comps));
        }
        let l = self.rank();
        let mut proper_positive = true;
        for mask in 1u32..(1 << l) - 1 {
            let idx: Vec<usize> = (0..l).filter(|&i| mask >> i & 1 == 1).collect();
            if intmat::principal_minor(&self.a, &idx) <= 0 {
                proper_positive = false;
                break;
            }
        }
        let d = intmat::det(&self.a);
        Ok(match (proper_positive, d.signum()) {
            (true, 1) => CartanType::Finite,
            (true, 0) => CartanType::Affine { labels: self.kernel_labels() },
            _ => CartanType::Indefinite,
        })
    }

    fn kernel_labels(&self) -> Vec<i64> {
        let k = intmat::kernel(&self.a);
        let mut v = intmat::primitive_integer(&k[0]);
        if v.iter().any(|&x| x < 0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }

    /// Numerical labels `a_i` with `delta = sum a_i alpha_i`.
    pub fn null_root(&self) -> Result<Vec<i64>, RootError> {
        match self.classify()? {
            CartanType::Affine { labels } => Ok(labels),
            _ => Err(RootError::NotAffine),
        }
    }
}

/// A lattice `Lambda` of rank `n` with simple roots and coroots.
///
/// `s` is `n x l` (column `j` holds `alpha_j` in the lattice basis) and `c`
/// is `l x n` (row `i` is the functional `<-, alpha_i^v>`), with `c s = A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    gcm: Gcm,
    s: IMat,
    c: IMat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeJson {
    FromB {
        #[serde(rename = "B")]
        b: Vec<Vec<String>>,
    },
    FromRoots {
        simple_roots: IMat,
        coroots: IMat,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FdlReport {
    /// Per simple root: gcd of its coordinates is one.
    pub fdl1: Vec<bool>,
    /// Per (coroot, basis vector): the pairing is integral.
    pub fdl2: Vec<Vec<bool>>,
}

impl FdlReport {
    pub fn passed(&self) -> bool {
        self.fdl1.iter().all(|&b| b) && self.fdl2.iter().flatten().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeComparison {
    pub first_in_second: bool,
    pub second_in_first: bool,
    /// Invariant factors (greater than one) of each lattice modulo the root
    /// lattice; a zero entry stands for a free summand.
    pub quotient_first: Vec<i64>,
    pub quotient_second: Vec<i64>,
}

impl Lattice {
    pub fn root_lattice(gcm: &Gcm) -> Lattice {
        Lattice { gcm: gcm.clone(), s: intmat::identity(gcm.rank()), c: gcm.a.clone() }
    }

    /// From `simple_roots` (one lattice vector per root) and `coroots` (one
    /// functional row per coroot).
    pub fn from_roots(gcm: &Gcm, simple_roots: &IMat, coroots: &IMat) -> Result<Lattice, RootError> {
        let l = gcm.rank();
        if simple_roots.len() != l || coroots.len() != l {
            return Err(RootError::DimensionMismatch(format!(
                "expected {l} simple roots and coroots, got {} and {}",
                simple_roots.len(),
                coroots.len()
            )));
        }
        let n = simple_roots[0].len();
        if n == 0 || n > crate::series::MAX_VARS {
            return Err(RootError::DimensionMismatch(format!("unsupported lattice rank {n}")));
        }
        if simple_roots.iter().chain(coroots).any(|v| v.len() != n) {
            return Err(RootError::DimensionMismatch("vectors of unequal length".into()));
        }
        let s = intmat::transpose(simple_roots);
        let c = coroots.clone();
        if intmat::rank(&s) != l {
            return Err(RootError::Inconsistent("simple roots are linearly dependent".into()));
        }
        let cs = intmat::mul(&c, &s);
        if cs != gcm.a {
            return Err(RootError::Inconsistent(format!(
                "coroot pairings {cs:?} do not reproduce the Cartan matrix"
            )));
        }
        Ok(Lattice { gcm: gcm.clone(), s, c })
    }

    /// The lattice spanned by the columns of `b`, written in simple-root
    /// coordinates.
    pub fn from_b(gcm: &Gcm, b: &[Vec<Q>]) -> Result<Lattice, RootError> {
        let l = gcm.rank();
        if b.len() != l || b.iter().any(|r| r.len() != l) {
            return Err(RootError::DimensionMismatch(format!("B must be {l} x {l}")));
        }
        let inv = intmat::qinverse(&b.to_vec())
            .ok_or_else(|| RootError::Inconsistent("B is singular".into()))?;
        let s = intmat::to_int(&inv).ok_or(RootError::NotIntegralInverse)?;
        // c_ij = sum_k b_kj a_ik
        let mut c = vec![vec![0i64; l]; l];
        for i in 0..l {
            for j in 0..l {
                let v = (0..l).fold(Q::ZERO, |acc, k| acc.add(&b[k][j].mul(&Q::from_int(gcm.a[i][k]))));
                c[i][j] = v.to_i64().ok_or_else(|| RootError::PairingNotIntegral {
                    root: i,
                    basis: j,
                    value: v.to_string(),
                })?;
            }
        }
        Ok(Lattice { gcm: gcm.clone(), s, c })
    }

    pub fn from_json(gcm: &Gcm, j: &LatticeJson) -> Result<Lattice, RootError> {
        match j {
            LatticeJson::FromB { b } => {
                let parsed: Result<Vec<Vec<Q>>, _> =
                    b.iter().map(|r| r.iter().map(|x| x.parse::<Q>()).collect()).collect();
                let parsed = parsed.map_err(|e| RootError::Malformed(e.to_string()))?;
                Lattice::from_b(gcm, &parsed)
            }
            LatticeJson::FromRoots { simple_roots, coroots } => {
                Lattice::from_roots(gcm, simple_roots, coroots)
            }
        }
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    /// Rank `n` of the lattice.
    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn simple_root(&self, j: usize) -> Vec<i64> {
        intmat::column(&self.s, j)
    }

    pub fn coroot(&self, i: usize) -> &[i64] {
        &self.c[i]
    }

    pub fn s_matrix(&self) -> &IMat {
        &self.s
    }

    pub fn c_matrix(&self) -> &IMat {
        &self.c
    }

    /// Lattice coordinates of a vector given in simple-root coordinates.
    pub fn from_root_coords(&self, r: &[i64]) -> Vec<i64> {
        intmat::mul_vec(&self.s, r)
    }

    /// `<v, alpha_i^v>` for a lattice vector `v`.
    pub fn pairing(&self, v: &[i64], i: usize) -> i64 {
        intmat::dot(v, &self.c[i])
    }

    pub fn check_fdl(&self) -> FdlReport {
        let l = self.gcm.rank();
        FdlReport {
            fdl1: (0..l).map(|j| intmat::gcd_all(&self.simple_root(j)) == 1).collect(),
            // Entries are integers by construction; the constructors reject
            // rational pairings.
            fdl2: self.c.iter().map(|row| row.iter().map(|_| true).collect()).collect(),
        }
    }

    /// Invariant factors of `Lambda / Lambda_r`.
    pub fn quotient_by_root_lattice(&self) -> Vec<i64> {
        let inv = intmat::smith_invariants(&self.s);
        let mut out: Vec<i64> = inv.into_iter().filter(|&d| d != 1).collect();
        out.extend(std::iter::repeat(0).take(self.dim() - self.gcm.rank()));
        out
    }

    /// Basis vectors of the lattice in simple-root coordinates, as columns.
    fn basis_in_roots(&self) -> Option<Vec<Vec<Q>>> {
        if self.dim() != self.gcm.rank() {
            return None;
        }
        intmat::qinverse(&intmat::to_q(&self.s))
    }

    /// `self` is contained in `other`, both living in the span of the roots.
    fn contained_in(&self, other: &Lattice) -> bool {
        let (Some(b1), Some(_)) = (self.basis_in_roots(), other.basis_in_roots()) else {
            return false;
        };
        // Coordinates of self's basis in other's basis: S_other * B_self.
        let coords = intmat::qmul(&intmat::to_q(&other.s), &b1);
        intmat::to_int(&coords).is_some()
    }

    pub fn compare(&self, other: &Lattice) -> Result<LatticeComparison, RootError> {
        if self.gcm != other.gcm {
            return Err(RootError::DimensionMismatch("lattices belong to different Cartan matrices".into()));
        }
        let l = self.gcm.rank();
        if self.dim() != l || other.dim() != l {
            return Err(RootError::DimensionMismatch(format!(
                "comparison needs lattices of rank {l} inside the root span (got {} and {})",
                self.dim(),
                other.dim()
            )));
        }
        Ok(LatticeComparison {
            first_in_second: self.contained_in(other),
            second_in_first: other.contained_in(self),
            quotient_first: self.quotient_by_root_lattice(),
            quotient_second: other.quotient_by_root_lattice(),
        })
    }
}

/// An element of the Weyl group together with its action on the root lattice
/// (which is faithful and decides equality) and on `Lambda`.
#[derive(Clone, Debug)]
pub struct WeylElement {
    word: Vec<usize>,
    root: IMat,
    root_inv: IMat,
    lat: IMat,
    lat_inv: IMat,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &WeylElement) -> bool {
        self.root == other.root
    }
}

impl Eq for WeylElement {}

impl std::hash::Hash for WeylElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.root.hash(state);
    }
}

impl WeylElement {
    /// Lexicographically least reduced word.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Action on simple-root coordinates.
    pub fn root_matrix(&self) -> &IMat {
        &self.root
    }

    /// Action on `Lambda` coordinates.
    pub fn lattice_matrix(&self) -> &IMat {
        &self.lat
    }

    pub fn lattice_matrix_inv(&self) -> &IMat {
        &self.lat_inv
    }

    pub fn act_roots(&self, r: &[i64]) -> Vec<i64> {
        intmat::mul_vec(&self.root, r)
    }

    pub fn act_lattice(&self, v: &[i64]) -> Vec<i64> {
        intmat::mul_vec(&self.lat, v)
    }

    /// `l(w s_i) < l(w)`.
    pub fn has_right_descent(&self, i: usize) -> bool {
        self.root.iter().any(|row| row[i] < 0)
    }

    /// `l(s_i w) < l(w)`.
    pub fn has_left_descent(&self, i: usize) -> bool {
        self.root_inv.iter().any(|row| row[i] < 0)
    }
}

/// Generators of the Weyl group acting on a lattice.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    lattice: Lattice,
    refl_root: Vec<IMat>,
    refl_lat: Vec<IMat>,
}

impl WeylGroup {
    pub fn new(lattice: &Lattice) -> WeylGroup {
        let a = lattice.gcm.matrix();
        let l = a.len();
        let n = lattice.dim();
        let refl_root = (0..l)
            .map(|i| {
                let mut m = intmat::identity(l);
                for j in 0..l {
                    m[i][j] -= a[i][j];
                }
                m
            })
            .collect();
        let refl_lat = (0..l)
            .map(|i| {
                let mut m = intmat::identity(n);
                for r in 0..n {
                    for k in 0..n {
                        m[r][k] -= lattice.s[r][i] * lattice.c[i][k];
                    }
                }
                m
            })
            .collect();
        WeylGroup { lattice: lattice.clone(), refl_root, refl_lat }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.refl_root.len()
    }

    pub fn reflection_root_matrix(&self, i: usize) -> &IMat {
        &self.refl_root[i]
    }

    pub fn reflection_lattice_matrix(&self, i: usize) -> &IMat {
        &self.refl_lat[i]
    }

    pub fn identity(&self) -> WeylElement {
        let (l, n) = (self.rank(), self.lattice.dim());
        WeylElement {
            word: Vec::new(),
            root: intmat::identity(l),
            root_inv: intmat::identity(l),
            lat: intmat::identity(n),
            lat_inv: intmat::identity(n),
        }
    }

    pub fn generator(&self, i: usize) -> WeylElement {
        self.from_word(&[i])
    }

    /// The product `s_{w_1} ... s_{w_k}`, with its reduced word.
    pub fn from_word(&self, word: &[usize]) -> WeylElement {
        let mut e = self.identity();
        for &i in word {
            assert!(i < self.rank(), "generator index {i} out of range");
            e.root = intmat::mul(&e.root, &self.refl_root[i]);
            e.root_inv = intmat::mul(&self.refl_root[i], &e.root_inv);
            e.lat = intmat::mul(&e.lat, &self.refl_lat[i]);
            e.lat_inv = intmat::mul(&self.refl_lat[i], &e.lat_inv);
        }
        e.word = self.reduced_word(&e);
        e
    }

    pub fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let mut e = WeylElement {
            word: Vec::new(),
            root: intmat::mul(&a.root, &b.root),
            root_inv: intmat::mul(&b.root_inv, &a.root_inv),
            lat: intmat::mul(&a.lat, &b.lat),
            lat_inv: intmat::mul(&b.lat_inv, &a.lat_inv),
        };
        e.word = self.reduced_word(&e);
        e
    }

    pub fn inverse(&self, a: &WeylElement) -> WeylElement {
        let mut e = WeylElement {
            word: Vec::new(),
            root: a.root_inv.clone(),
            root_inv: a.root.clone(),
            lat: a.lat_inv.clone(),
            lat_inv: a.lat.clone(),
        };
        e.word = self.reduced_word(&e);
        e
    }

    /// `s_i w`, cheaper than a general product.
    pub fn left_mul_generator(&self, i: usize, w: &WeylElement) -> WeylElement {
        self.mul(&self.generator(i), w)
    }

    /// Peels the smallest left descent until the identity is reached.
    fn reduced_word(&self, e: &WeylElement) -> Vec<usize> {
        let mut inv = e.root_inv.clone();
        let mut word = Vec::new();
        loop {
            let Some(i) = (0..self.rank()).find(|&i| inv.iter().any(|row| row[i] < 0)) else {
                break;
            };
            word.push(i);
            // (s_i w)^{-1} = w^{-1} s_i
            inv = intmat::mul(&inv, &self.refl_root[i]);
        }
        debug_assert!(inv == intmat::identity(self.rank()));
        word
    }

    /// All elements of length at most `max_len`, by increasing length and
    /// then by reduced word.
    pub fn elements_up_to(&self, max_len: usize) -> Vec<WeylElement> {
        let mut out = vec![self.identity()];
        let mut seen: HashMap<IMat, ()> = HashMap::from([(out[0].root.clone(), ())]);
        let mut level_start = 0;
        for _ in 0..max_len {
            let level_end = out.len();
            for k in level_start..level_end {
                for i in 0..self.rank() {
                    if out[k].has_right_descent(i) {
                        continue;
                    }
                    let w = &out[k];
                    let root = intmat::mul(&w.root, &self.refl_root[i]);
                    if seen.contains_key(&root) {
                        continue;
                    }
                    seen.insert(root.clone(), ());
                    let mut word = w.word.clone();
                    word.push(i);
                    out.push(WeylElement {
                        word,
                        root,
                        root_inv: intmat::mul(&self.refl_root[i], &w.root_inv),
                        lat: intmat::mul(&w.lat, &self.refl_lat[i]),
                        lat_inv: intmat::mul(&self.refl_lat[i], &w.lat_inv),
                    });
                }
            }
            level_start = level_end;
            if level_start == out.len() {
                break;
            }
        }
        out
    }

    /// Positive roots `beta` with `w^{-1} beta < 0`, in simple-root
    /// coordinates: `s_{i_1} ... s_{i_{k-1}} (alpha_{i_k})` along the reduced
    /// word.
    pub fn inversion_roots(&self, w: &WeylElement) -> Vec<Vec<i64>> {
        let l = self.rank();
        let mut prefix = intmat::identity(l);
        let mut out = Vec::new();
        for &i in &w.word {
            out.push(intmat::column(&prefix, i));
            prefix = intmat::mul(&prefix, &self.refl_root[i]);
        }
        out
    }

    pub fn real_roots_up_to(&self, max_len: usize) -> Vec<RealRoot> {
        real_roots(&self.lattice, max_len)
    }

    /// Recognizes a real root given in simple-root coordinates by reflecting
    /// it down to a simple root; `None` if it is not a real root.
    pub fn real_root(&self, coords: &[i64]) -> Option<RealRoot> {
        let a = self.lattice.gcm.matrix();
        let l = a.len();
        if coords.len() != l || coords.iter().all(|&x| x == 0) {
            return None;
        }
        let negative = coords.iter().all(|&x| x <= 0);
        if !negative && coords.iter().any(|&x| x < 0) {
            return None;
        }
        let mut r: Vec<i64> = coords.iter().map(|&x| if negative { -x } else { x }).collect();
        let mut steps = Vec::new();
        let simple = loop {
            if let Some(i) = (0..l).find(|&i| r.iter().enumerate().all(|(k, &x)| x == i64::from(k == i))) {
                break i;
            }
            // A positive real root that is not simple pairs positively with
            // some simple coroot; reflecting lowers its height.
            let j = (0..l).find(|&j| (0..l).map(|m| a[j][m] * r[m]).sum::<i64>() > 0)?;
            let p: i64 = (0..l).map(|m| a[j][m] * r[m]).sum();
            r[j] -= p;
            if r.iter().any(|&x| x < 0) {
                return None;
            }
            steps.push(j);
        };
        // coords = s_{steps[0]} ... s_{steps[k-1]} (+-alpha_simple)
        let mut word = steps.clone();
        if negative {
            word.push(simple);
        }
        let mut c = vec![0i64; l];
        c[simple] = 1;
        for &j in word.iter().rev() {
            let q: i64 = (0..l).map(|m| c[m] * a[m][j]).sum();
            c[j] -= q;
        }
        let coroot = (0..self.lattice.dim())
            .map(|k| (0..l).map(|i| c[i] * self.lattice.c[i][k]).sum())
            .collect();
        Some(RealRoot {
            vec: self.lattice.from_root_coords(coords),
            root_coords: coords.to_vec(),
            coroot,
            coroot_coords: c,
            witness: (word, simple),
        })
    }

    /// The reflection `s_alpha = w s_i w^{-1}` of a real root.
    pub fn reflection(&self, alpha: &RealRoot) -> WeylElement {
        let (w, i) = &alpha.witness;
        let mut word = w.clone();
        word.push(*i);
        word.extend(w.iter().rev());
        self.from_word(&word)
    }
}

pub fn weyl_reduce(lattice: &Lattice, word: &[usize]) -> WeylElement {
    WeylGroup::new(lattice).from_word(word)
}

/// A real root `w(alpha_i)` with its coroot `w(alpha_i^v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealRoot {
    /// Lattice coordinates.
    pub vec: Vec<i64>,
    /// Simple-root coordinates.
    pub root_coords: Vec<i64>,
    /// Coroot as a functional on the lattice.
    pub coroot: Vec<i64>,
    /// Coroot in simple-coroot coordinates.
    pub coroot_coords: Vec<i64>,
    /// `vec = s_{word[0]} ... s_{word[k-1]} (alpha_index)`.
    pub witness: (Vec<usize>, usize),
}

impl RealRoot {
    pub fn is_positive(&self) -> bool {
        self.root_coords.iter().all(|&x| x >= 0)
    }
}

/// Orbit of the simple roots under words of length at most `max_len`.
pub fn real_roots(lat: &Lattice, max_len: usize) -> Vec<RealRoot> {
    let a = lat.gcm.matrix();
    let l = a.len();
    let mut out: Vec<RealRoot> = Vec::new();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let make = |r: Vec<i64>, c: Vec<i64>, witness: (Vec<usize>, usize)| RealRoot {
        vec: lat.from_root_coords(&r),
        coroot: (0..lat.dim()).map(|k| (0..l).map(|i| c[i] * lat.c[i][k]).sum()).collect(),
        root_coords: r,
        coroot_coords: c,
        witness,
    };
    for i in 0..l {
        let mut r = vec![0; l];
        r[i] = 1;
        index.insert(r.clone(), out.len());
        out.push(make(r.clone(), r, (Vec::new(), i)));
    }
    let mut frontier: Vec<usize> = (0..l).collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &k in &frontier {
            for j in 0..l {
                let (r, c) = (&out[k].root_coords, &out[k].coroot_coords);
                // s_j(alpha) = alpha - <alpha, alpha_j^v> alpha_j
                let p: i64 = (0..l).map(|m| a[j][m] * r[m]).sum();
                let mut r2 = r.clone();
                r2[j] -= p;
                // s_j(beta^v) = beta^v - <alpha_j, beta^v> alpha_j^v
                let q: i64 = (0..l).map(|m| c[m] * a[m][j]).sum();
                let mut c2 = c.clone();
                c2[j] -= q;
                if let Some(&existing) = index.get(&r2) {
                    assert_eq!(out[existing].coroot_coords, c2, "coroot of a real root is not well defined");
                    continue;
                }
                let mut word = vec![j];
                word.extend_from_slice(&out[k].witness.0);
                let witness = (word, out[k].witness.1);
                index.insert(r2.clone(), out.len());
                next.push(out.len());
                out.push(make(r2, c2, witness));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcm(a: &[&[i64]]) -> Gcm {
        Gcm::new(a.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn lambda_n(n: i64) -> Lattice {
        let g = gcm(&[&[2, -2], &[-2, 2]]);
        let b = vec![
            vec![Q::ONE, Q::new(1 + 2 * n, 4 * n)],
            vec![Q::ZERO, Q::new(1, 4 * n)],
        ];
        Lattice::from_b(&g, &b).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(gcm(&[&[2, -1], &[-1, 2]]).classify().unwrap(), CartanType::Finite);
        assert_eq!(
            gcm(&[&[2, -2], &[-2, 2]]).classify().unwrap(),
            CartanType::Affine { labels: vec![1, 1] }
        );
        assert_eq!(gcm(&[&[2, -4], &[-4, 2]]).classify().unwrap(), CartanType::Indefinite);
        assert!(matches!(gcm(&[&[2, 0], &[0, 2]]).classify(), Err(RootError::Decomposable(_))));
    }

    #[test]
    fn invalid_gcm() {
        assert!(Gcm::new(vec![vec![2, 1], vec![-1, 2]]).is_err());
        assert!(Gcm::new(vec![vec![2, 0], vec![-1, 2]]).is_err());
        assert!(Gcm::new(vec![vec![1, 0], vec![0, 2]]).is_err());
    }

    #[test]
    fn null_roots() {
        assert_eq!(gcm(&[&[2, -2], &[-2, 2]]).null_root().unwrap(), vec![1, 1]);
        let g2aff = gcm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -3, 2]]);
        assert_eq!(g2aff.null_root().unwrap(), vec![1, 2, 3]);
        assert_eq!(gcm(&[&[2, -1], &[-1, 2]]).null_root(), Err(RootError::NotAffine));
    }

    #[test]
    fn coxeter_orders() {
        let g = gcm(&[&[2, -1, 0, 0], &[-1, 2, -2, 0], &[0, -1, 2, -3], &[0, 0, -1, 2]]);
        assert_eq!(g.coxeter_order(0, 2), CoxeterOrder::Finite(2));
        assert_eq!(g.coxeter_order(0, 1), CoxeterOrder::Finite(3));
        assert_eq!(g.coxeter_order(1, 2), CoxeterOrder::Finite(4));
        assert_eq!(g.coxeter_order(2, 3), CoxeterOrder::Finite(6));
        assert_eq!(gcm(&[&[2, -4], &[-1, 2]]).coxeter_order(0, 1), CoxeterOrder::Infinite);
    }

    #[test]
    fn lattice_from_b_examples() {
        let l1 = lambda_n(1);
        assert_eq!(l1.s_matrix(), &vec![vec![1, -3], vec![0, 4]]);
        assert!(l1.check_fdl().passed());
        let g = gcm(&[&[2, -2], &[-2, 2]]);
        let odd = vec![vec![q("1"), q("1/2")], vec![q("0"), q("1/2")]];
        assert!(Lattice::from_b(&g, &odd).unwrap().check_fdl().passed());
        let not_int = vec![vec![q("2"), q("0")], vec![q("0"), q("1")]];
        assert_eq!(Lattice::from_b(&g, &not_int), Err(RootError::NotIntegralInverse));
        let bad_pairing = vec![vec![q("1/4"), q("0")], vec![q("0"), q("1")]];
        assert!(matches!(
            Lattice::from_b(&g, &bad_pairing),
            Err(RootError::PairingNotIntegral { .. })
        ));
    }

    #[test]
    fn comparisons() {
        let cmp = lambda_n(1).compare(&lambda_n(3)).unwrap();
        assert!(cmp.first_in_second && !cmp.second_in_first);
        let cmp = lambda_n(1).compare(&lambda_n(2)).unwrap();
        assert!(!cmp.first_in_second && !cmp.second_in_first);
        assert_eq!(lambda_n(2).quotient_by_root_lattice(), vec![8]);
    }

    #[test]
    fn half_root_fails_fdl1() {
        let g = gcm(&[&[2, -2], &[-2, 2]]);
        // basis d*, alpha_1 / 2, delta
        let lat = Lattice::from_roots(&g, &vec![vec![0, -2, 1], vec![0, 2, 0]], &vec![vec![1, -1, 0], vec![0, 1, 0]])
            .unwrap();
        assert_eq!(lat.check_fdl().fdl1, vec![true, false]);
    }

    #[test]
    fn braid_and_lengths() {
        let g = gcm(&[&[2, -1], &[-1, 2]]);
        let w = WeylGroup::new(&Lattice::root_lattice(&g));
        assert!(w.from_word(&[0, 0]).is_identity());
        let a = w.from_word(&[0, 1, 0]);
        let b = w.from_word(&[1, 0, 1]);
        assert_eq!(a, b);
        assert_eq!(a.length(), 3);
        assert_eq!(b.word(), &[0, 1, 0]);
        assert_eq!(w.elements_up_to(10).len(), 6);
        assert_eq!(w.real_roots_up_to(3).len(), 6);
    }

    #[test]
    fn affine_words_stay_reduced() {
        let g = gcm(&[&[2, -2], &[-2, 2]]);
        let w = WeylGroup::new(&lambda_n(1));
        for k in 1..=6 {
            let word: Vec<usize> = (0..k).flat_map(|_| [0, 1]).collect();
            assert_eq!(w.from_word(&word).length(), 2 * k);
        }
        assert_eq!(g.rank(), 2);
    }

    #[test]
    fn recognizes_real_roots() {
        // G2 with alpha_i + 3 alpha_j a root
        let g = gcm(&[&[2, -1], &[-3, 2]]);
        let w = WeylGroup::new(&Lattice::root_lattice(&g));
        let mut found: Vec<Vec<i64>> = w.real_roots_up_to(12).into_iter().map(|r| r.root_coords).collect();
        found.sort();
        assert_eq!(found.len(), 12);
        for r in &found {
            let rr = w.real_root(r).unwrap();
            assert_eq!(intmat::dot(&rr.vec, &rr.coroot), 2);
            let s = w.reflection(&rr);
            let neg: Vec<i64> = r.iter().map(|x| -x).collect();
            assert_eq!(s.act_roots(r), neg);
        }
        assert!(w.real_root(&[1, 1]).is_some());
        assert!(w.real_root(&[1, 3]).is_some());
        assert!(w.real_root(&[3, 1]).is_none());
        assert!(w.real_root(&[1, -1]).is_none());
        let aff = WeylGroup::new(&Lattice::root_lattice(&gcm(&[&[2, -2], &[-2, 2]])));
        assert!(aff.real_root(&[1, 1]).is_none());
        assert!(aff.real_root(&[2, 1]).is_some());
    }

    #[test]
    fn inversion_set_sizes() {
        let g = gcm(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        let w = WeylGroup::new(&Lattice::root_lattice(&g));
        let longest = w.elements_up_to(10).into_iter().max_by_key(|e| e.length()).unwrap();
        assert_eq!(longest.length(), 6);
        let inv = w.inversion_roots(&longest);
        assert_eq!(inv.len(), 6);
        assert!(inv.iter().all(|r| r.iter().all(|&x| x >= 0)));
    }
}
