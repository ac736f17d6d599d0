//! Exact integer and rational linear algebra: Smith normal form, Bareiss
//! determinants, rational inverses.

use num_traits::{One, Zero};

use crate::Rat;

pub type IMat = Vec<Vec<i64>>;
pub type RMat = Vec<Vec<Rat>>;

/// U * A * W = D with U, W unimodular, D diagonal, D[i][i] >= 0 and
/// D[i][i] | D[i+1][i+1].
#[derive(Clone, Debug, PartialEq)]
pub struct Snf {
    pub u: IMat,
    pub d: IMat,
    pub w: IMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.len().min(self.d.first().map_or(0, |r| r.len()))).map(|i| self.d[i][i]).collect()
    }
}

pub fn smith_normal_form(a: &IMat) -> Snf {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u = identity_i128(n);
    let mut w = identity_i128(m);

    for t in 0..n.min(m) {
        loop {
            // smallest nonzero |entry| in the trailing block
            let mut piv: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..m {
                    if d[i][j] != 0 && piv.map_or(true, |(pi, pj)| d[i][j].abs() < d[pi][pj].abs()) {
                        piv = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = piv else { break };
            d.swap(t, pi);
            u.swap(t, pi);
            for row in d.iter_mut() {
                row.swap(t, pj);
            }
            for row in w.iter_mut() {
                row.swap(t, pj);
            }

            let p = d[t][t];
            let mut dirty = false;
            for i in t + 1..n {
                let q = d[i][t] / p;
                if q != 0 {
                    for j in 0..m {
                        d[i][j] -= q * d[t][j];
                    }
                    for j in 0..n {
                        u[i][j] -= q * u[t][j];
                    }
                }
                dirty |= d[i][t] != 0;
            }
            for j in t + 1..m {
                let q = d[t][j] / p;
                if q != 0 {
                    for i in 0..n {
                        d[i][j] -= q * d[i][t];
                    }
                    for i in 0..m {
                        w[i][j] -= q * w[i][t];
                    }
                }
                dirty |= d[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block
            let mut bad = None;
            'scan: for i in t + 1..n {
                for j in t + 1..m {
                    if d[i][j] % p != 0 {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in 0..m {
                        d[t][j] += d[i][j];
                    }
                    for j in 0..n {
                        u[t][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            d[t][t] = -d[t][t];
            for row in w.iter_mut() {
                row[t] = -row[t];
            }
        }
    }
    Snf { u: to_i64(&u), d: to_i64(&d), w: to_i64(&w) }
}

fn identity_i128(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn to_i64(a: &[Vec<i128>]) -> IMat {
    a.iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).expect("SNF entry overflow")).collect())
        .collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..m).map(|j| (0..k).map(|t| row[t] * b[t][j]).sum()).collect())
        .collect()
}

pub fn mat_vec(a: &IMat, v: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Exact determinant by fraction-free elimination.
pub fn det_bareiss(a: &IMat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&i| m[i][k] != 0) else { return 0 };
            m.swap(k, s);
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

/// Leading principal minors det(A[..k, ..k]), k = 1..n.
pub fn leading_minors(a: &IMat) -> Vec<i128> {
    (1..=a.len())
        .map(|k| {
            let sub: IMat = a[..k].iter().map(|r| r[..k].to_vec()).collect();
            det_bareiss(&sub)
        })
        .collect()
}

pub fn to_rat(a: &IMat) -> RMat {
    a.iter().map(|r| r.iter().map(|&x| Rat::from_integer(x as i128)).collect()).collect()
}

/// Gauss-Jordan inverse over Q; `None` if singular.
pub fn rat_inverse(a: &RMat) -> Option<RMat> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..2 * n {
                    let t = m[c][j] * f;
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rat_mat_vec(a: &RMat, v: &[Rat]) -> Vec<Rat> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// x^T A y over Q.
pub fn rat_bilinear(a: &RMat, x: &[Rat], y: &[Rat]) -> Rat {
    x.iter().zip(rat_mat_vec(a, y)).map(|(p, q)| p * q).sum()
}

/// Signature (n_plus, n_minus) of a symmetric rational matrix by congruence
/// diagonalisation (symmetric LDL^T with pivoting).
pub fn signature(a: &RMat) -> (usize, usize) {
    let mut m = a.clone();
    let n = m.len();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                // e_k <- e_k + e_j makes the pivot 2 m[k][j]
                for c in 0..n {
                    let t = m[j][c];
                    m[k][c] += t;
                }
                for r in 0..n {
                    let t = m[r][j];
                    m[r][k] += t;
                }
            } else {
                // zero row and column: degenerate direction
                k += 1;
                continue;
            }
        }
        let p = m[k][k];
        if p > Rat::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let f = m[i][k] / p;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = m[k][j] * f;
                m[i][j] -= t;
            }
        }
        for j in k + 1..n {
            m[k][j] = Rat::zero();
        }
        for i in k + 1..n {
            m[i][k] = Rat::zero();
        }
        k += 1;
    }
    (pos, neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_identity_holds() {
        let a = vec![vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -5]];
        let s = smith_normal_form(&a);
        assert_eq!(mat_mul(&mat_mul(&s.u, &a), &s.w), s.d);
        let diag = s.diagonal();
        assert_eq!(diag.iter().product::<i64>().abs() as i128, det_bareiss(&a).abs());
        for k in 1..diag.len() {
            assert_eq!(diag[k] % diag[k - 1], 0);
        }
    }

    #[test]
    fn snf_of_y_graph() {
        let a = vec![vec![-3, 1, 1, 1], vec![1, -2, 0, 0], vec![1, 0, -2, 0], vec![1, 0, 0, -2]];
        let s = smith_normal_form(&a);
        assert_eq!(mat_mul(&mat_mul(&s.u, &a), &s.w), s.d);
        assert_eq!(s.diagonal(), vec![1, 1, 2, 6]);
        assert_eq!(det_bareiss(&a), 12);
    }

    #[test]
    fn bareiss_matches_cofactor() {
        assert_eq!(det_bareiss(&vec![vec![-2, 1], vec![1, -2]]), 3);
        assert_eq!(det_bareiss(&vec![vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(leading_minors(&vec![vec![-2, 1], vec![1, -2]]), vec![-2, 3]);
    }

    #[test]
    fn inverse_exact() {
        let a = to_rat(&vec![vec![-2, 1], vec![1, -2]]);
        let inv = rat_inverse(&a).unwrap();
        assert_eq!(inv[0][0], Rat::new(-2, 3));
        assert_eq!(inv[0][1], Rat::new(-1, 3));
        assert!(rat_inverse(&to_rat(&vec![vec![1, 2], vec![2, 4]])).is_none());
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&to_rat(&vec![vec![0, 1], vec![1, 0]])), (1, 1));
        assert_eq!(signature(&to_rat(&vec![vec![-2, 1], vec![1, -2]])), (0, 2));
        assert_eq!(signature(&to_rat(&vec![vec![0, 0, 1], vec![0, 2, 0], vec![1, 0, 0]])), (2, 1));
    }
}
