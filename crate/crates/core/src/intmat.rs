//! Small dense integer and rational matrix routines.

use num_integer::Integer;

use crate::rational::Q;

pub type IMat = Vec<Vec<i64>>;
pub type QMat = Vec<Vec<Q>>;

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()
        })
        .collect()
}

pub fn mul_vec(a: &IMat, v: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn transpose(a: &IMat) -> IMat {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

pub fn column(a: &IMat, j: usize) -> Vec<i64> {
    a.iter().map(|row| row[j]).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &IMat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Principal minor on the given index subset.
pub fn principal_minor(a: &IMat, idx: &[usize]) -> i128 {
    let sub: IMat = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j]).collect()).collect();
    det(&sub)
}

pub fn to_q(a: &IMat) -> QMat {
    a.iter().map(|r| r.iter().map(|&x| Q::from_int(x)).collect()).collect()
}

/// Integer matrix if every entry is integral.
pub fn to_int(a: &QMat) -> Option<IMat> {
    a.iter().map(|r| r.iter().map(Q::to_i64).collect()).collect()
}

pub fn qmul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::ZERO, |s, k| s.add(&row[k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

/// Row-reduces `[a | b]` and returns the solution `x` of `a x = b` for square
/// invertible `a`, or `None` when `a` is singular.
pub fn qsolve(a: &QMat, b: &QMat) -> Option<QMat> {
    let n = a.len();
    let w = b.first().map_or(0, Vec::len);
    let mut m: QMat = a.iter().zip(b).map(|(ra, rb)| ra.iter().chain(rb).cloned().collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].inv()?;
        for x in m[c].iter_mut() {
            *x = x.mul(&inv);
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..n + w {
                    let v = m[r][k].sub(&f.mul(&m[c][k]));
                    m[r][k] = v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn qinverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let id: QMat = (0..n).map(|i| (0..n).map(|j| if i == j { Q::ONE } else { Q::ZERO }).collect()).collect();
    qsolve(a, &id)
}

/// Rank over the rationals.
pub fn rank(a: &IMat) -> usize {
    let mut m = to_q(a);
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let f = m[i][c].div(&m[r][c]).unwrap();
                for k in c..cols {
                    let v = m[i][k].sub(&f.mul(&m[r][k]));
                    m[i][k] = v;
                }
            }
        }
        r += 1;
    }
    r
}

/// A basis of the rational kernel of `a`, one vector per free column.
pub fn kernel(a: &IMat) -> Vec<Vec<Q>> {
    let mut m = to_q(a);
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let v = m[i][k].sub(&f.mul(&m[r][k]));
                    m[i][k] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::ZERO; cols];
            v[f] = Q::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = m[row][f].neg();
            }
            v
        })
        .collect()
}

/// Scales a rational vector to a primitive integer vector.
pub fn primitive_integer(v: &[Q]) -> Vec<i64> {
    let lcm = v.iter().fold(1i64, |l, q| match q {
        Q::Small(_, d) => l.lcm(d),
        Q::Big(_) => panic!("denominator too large"),
    });
    let ints: Vec<i64> = v.iter().map(|q| q.mul(&Q::from_int(lcm)).to_i64().unwrap()).collect();
    let g = gcd_all(&ints).max(1);
    ints.into_iter().map(|x| x / g).collect()
}

/// Nonzero invariant factors `d_1 | d_2 | ...` of an integer matrix.
pub fn smith_invariants(a: &IMat) -> Vec<i64> {
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs())
        else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t] / m[t][t];
            for k in t..cols {
                m[i][k] -= q * m[t][k];
            }
            clean &= m[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = m[t][j] / m[t][t];
            for row in m.iter_mut().skip(t) {
                row[j] -= q * row[t];
            }
            clean &= m[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // Enforce divisibility of the rest of the block by the pivot.
        let p = m[t][t];
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0)) {
            for k in t..cols {
                m[t][k] += m[i][k];
            }
            continue;
        }
        out.push(p.abs() as i64);
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&vec![vec![2, -1], vec![-1, 2]]), 3);
        assert_eq!(det(&vec![vec![2, -2], vec![-2, 2]]), 0);
        assert_eq!(det(&vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 5]]), -5);
        let g2aff = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -3, 2]];
        assert_eq!(det(&g2aff), 0);
    }

    #[test]
    fn smith_form() {
        assert_eq!(smith_invariants(&vec![vec![1, -3], vec![0, 4]]), vec![1, 4]);
        assert_eq!(smith_invariants(&vec![vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(smith_invariants(&vec![vec![0, 2], vec![-2, 2], vec![1, 0]]), vec![1, 2]);
        assert_eq!(smith_invariants(&vec![vec![4, 6]]), vec![2]);
    }

    #[test]
    fn kernel_of_affine_g2() {
        let a = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -3, 2]];
        let k = kernel(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(primitive_integer(&k[0]), vec![1, 2, 3]);
    }

    #[test]
    fn rational_inverse() {
        let b = vec![vec![Q::ONE, Q::new(3, 4)], vec![Q::ZERO, Q::new(1, 4)]];
        let inv = qinverse(&b).unwrap();
        assert_eq!(to_int(&inv), Some(vec![vec![1, -3], vec![0, 4]]));
    }
}
