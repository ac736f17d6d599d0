//! Plumbing graphs, the lattice Z^V with form B, and the finite quotients
//! H_1 = Z^V/BZ^V, Spin^c = (delta + 2Z^V)/2BZ^V and Spin.

mod graph;
pub mod snf;

pub use graph::{load_graph, mod2, parse_graph_json, parse_rational, CohomologyClass, PlumbingGraph};
pub use snf::{IMat, RMat, Snf};

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::Rat;
use snf::{det_bareiss, leading_minors, mat_vec, rat_inverse, smith_normal_form, to_rat};

#[derive(Clone, Debug)]
pub struct LatticeModel {
    pub b: IMat,
    pub binv: RMat,
    pub det: i64,
    pub snf: Snf,
    /// Inverse of `snf.u`.
    pub uinv: IMat,
    /// Eigenvalues of -B, ascending.
    pub eigs: Vec<f64>,
    /// Orthogonal eigenvector matrix of -B, columns matching `eigs`.
    pub l: Vec<Vec<f64>>,
    pub bplus: usize,
    pub bminus: usize,
}

pub fn lattice_model(g: &PlumbingGraph) -> Result<LatticeModel> {
    LatticeModel::from_matrix(g.adjacency())
}

impl LatticeModel {
    pub fn from_matrix(b: IMat) -> Result<Self> {
        let n = b.len();
        for (k, m) in leading_minors(&b).into_iter().enumerate() {
            if m == 0 || (m < 0) != (k % 2 == 0) {
                return Err(Error::NotNegativeDefinite { order: k + 1, value: m });
            }
        }
        let det = det_bareiss(&b);
        if det == 0 {
            return Err(Error::Singular);
        }
        let binv = rat_inverse(&to_rat(&b)).ok_or(Error::Singular)?;
        let snf = smith_normal_form(&b);
        let uinv_r = rat_inverse(&to_rat(&snf.u)).ok_or_else(|| Error::Internal("SNF transform not invertible".into()))?;
        let uinv: IMat = uinv_r
            .iter()
            .map(|r| {
                r.iter()
                    .map(|q| {
                        if q.is_integer() {
                            Ok(q.to_integer() as i64)
                        } else {
                            Err(Error::Internal("SNF transform not unimodular".into()))
                        }
                    })
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<IMat>>()?;
        let negb = DMatrix::from_fn(n, n, |i, j| -(b[i][j] as f64));
        let eig = nalgebra::SymmetricEigen::new(negb);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigs: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let l: Vec<Vec<f64>> = (0..n).map(|r| order.iter().map(|&c| eig.eigenvectors[(r, c)]).collect()).collect();
        if eigs.iter().any(|&x| x <= 0.0) {
            return Err(Error::Internal("float eigenvalues disagree with the exact definiteness certificate".into()));
        }
        Ok(LatticeModel { det: det as i64, binv, snf, uinv, eigs, l, bplus: 0, bminus: n, b })
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    /// |det B| = |H_1|.
    pub fn order(&self) -> usize {
        self.det.unsigned_abs() as usize
    }

    pub fn trace(&self) -> i64 {
        (0..self.rank()).map(|i| self.b[i][i]).sum()
    }

    /// Q(x) = -x^T B x.
    pub fn q_form(&self, x: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (i, row) in self.b.iter().enumerate() {
            for (j, &bij) in row.iter().enumerate() {
                s -= x[i] * x[j] * Rat::from_integer(bij as i128);
            }
        }
        s
    }

    /// x^T B^{-1} y exactly.
    pub fn binv_pair(&self, x: &[i64], y: &[i64]) -> Rat {
        let mut s = Rat::zero();
        for (i, row) in self.binv.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let xi = Rat::from_integer(x[i] as i128);
            for (j, bij) in row.iter().enumerate() {
                if y[j] != 0 {
                    s += xi * bij * Rat::from_integer(y[j] as i128);
                }
            }
        }
        s
    }

    /// Q_nu^{-1}(l) = -(I_nu l)^T B^{-1} (I_nu l).
    pub fn q_inv_nu(&self, nu: &SignVector, l: &[i64]) -> Rat {
        let y = nu.apply(l);
        -self.binv_pair(&y, &y)
    }

    pub fn mul_b(&self, x: &[i64]) -> Vec<i64> {
        mat_vec(&self.b, x)
    }

    /// Smallest eigenvalue of -B^{-1} (= 1 / largest eigenvalue of -B).
    pub fn lambda_min_neg_binv(&self) -> f64 {
        1.0 / self.eigs.last().copied().unwrap_or(1.0)
    }

    /// Canonical representative of x mod B Z^V.
    pub fn canon_h1(&self, x: &[i64]) -> Vec<i64> {
        let c = mat_vec(&self.snf.u, x);
        let red: Vec<i64> = c
            .iter()
            .zip(self.snf.diagonal())
            .map(|(&ci, d)| if d == 0 { ci } else { ci.rem_euclid(d) })
            .collect();
        mat_vec(&self.uinv, &red)
    }

    pub fn same_h1(&self, x: &[i64], y: &[i64]) -> bool {
        self.canon_h1(x) == self.canon_h1(y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyClass {
    pub rep: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpincStructure {
    pub rep: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinStructure {
    pub s: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    pub nu: Vec<i8>,
}

impl SignVector {
    pub fn new(nu: Vec<i8>) -> Self {
        assert!(nu.iter().all(|&s| s == 1 || s == -1));
        SignVector { nu }
    }

    /// All of {-1, +1}^n, starting from (+1, ..., +1).
    pub fn all(n: usize) -> Vec<SignVector> {
        (0..1u32 << n)
            .map(|mask| SignVector { nu: (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect() })
            .collect()
    }

    pub fn apply(&self, l: &[i64]) -> Vec<i64> {
        l.iter().zip(&self.nu).map(|(&x, &s)| x * s as i64).collect()
    }

    /// c_nu = prod nu_v^{deg v}.
    pub fn c_nu(&self, degrees: &[i64]) -> i64 {
        let odd = self.nu.iter().zip(degrees).filter(|(&s, &d)| s < 0 && d % 2 == 1).count();
        if odd % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Canonical representatives of Z^V/BZ^V (SNF coordinates, least residues).
pub fn homology_classes(lat: &LatticeModel) -> Vec<HomologyClass> {
    let diag = lat.snf.diagonal();
    let mut out = Vec::with_capacity(lat.order());
    let mut c = vec![0i64; diag.len()];
    loop {
        out.push(HomologyClass { rep: mat_vec(&lat.uinv, &c) });
        let mut k = 0;
        loop {
            if k == c.len() {
                return out;
            }
            c[k] += 1;
            if c[k] < diag[k] {
                break;
            }
            c[k] = 0;
            k += 1;
        }
    }
}

pub fn canon_spinc(lat: &LatticeModel, delta: &[i64], ell: &[i64]) -> Result<SpincStructure> {
    let mut half = Vec::with_capacity(ell.len());
    for (x, d) in ell.iter().zip(delta) {
        if (x - d).rem_euclid(2) != 0 {
            return Err(Error::Parity(format!("{ell:?} is not congruent to delta = {delta:?} mod 2")));
        }
        half.push((x - d) / 2);
    }
    let k = lat.canon_h1(&half);
    Ok(SpincStructure { rep: delta.iter().zip(&k).map(|(d, x)| d + 2 * x).collect() })
}

/// Canonical representatives of (delta + 2Z^V)/2BZ^V.
pub fn spinc_enumerate(lat: &LatticeModel, delta: &[i64]) -> Vec<SpincStructure> {
    homology_classes(lat)
        .into_iter()
        .map(|h| SpincStructure { rep: delta.iter().zip(&h.rep).map(|(d, x)| d + 2 * x).collect() })
        .collect()
}

/// All s in {0,1}^V with Bs = diag(B) mod 2, by elimination over GF(2).
pub fn spin_enumerate(lat: &LatticeModel) -> Result<Vec<SpinStructure>> {
    let n = lat.rank();
    let mut rows: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut r: Vec<u8> = lat.b[i].iter().map(|x| x.rem_euclid(2) as u8).collect();
            r.push(lat.b[i][i].rem_euclid(2) as u8);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&i| rows[i][col] == 1) else { continue };
        rows.swap(row, p);
        for i in 0..n {
            if i != row && rows[i][col] == 1 {
                let src = rows[row].clone();
                for (a, b) in rows[i].iter_mut().zip(src) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| r[n] == 1) {
        return Err(Error::Internal("Bs = diag(B) mod 2 has no solution".into()));
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::with_capacity(1 << free.len());
    for mask in 0..1u32 << free.len() {
        let mut s = vec![0i64; n];
        for (k, &f) in free.iter().enumerate() {
            s[f] = (mask >> k & 1) as i64;
        }
        for (r, &pc) in pivots.iter().enumerate() {
            let mut v = rows[r][n];
            for &f in &free {
                v ^= rows[r][f] & s[f] as u8;
            }
            s[pc] = v as i64;
        }
        out.push(SpinStructure { s });
    }
    out.sort();
    Ok(out)
}

/// sigma(b, s) = 2b + B(s + e), e = (1, ..., 1).
pub fn spinc_from_pair(lat: &LatticeModel, delta: &[i64], b: &HomologyClass, s: &SpinStructure) -> Result<SpincStructure> {
    let se: Vec<i64> = s.s.iter().map(|x| x + 1).collect();
    let bse = lat.mul_b(&se);
    let ell: Vec<i64> = b.rep.iter().zip(&bse).map(|(x, y)| 2 * x + y).collect();
    canon_spinc(lat, delta, &ell)
}

/// Solves ell = 2b + B(s + e) mod 2BZ^V with the least spin structure s.
pub fn spinc_decompose(ell: &[i64], lat: &LatticeModel, delta: &[i64]) -> Result<(HomologyClass, SpinStructure)> {
    let spins = spin_enumerate(lat)?;
    let s = spins.into_iter().next().ok_or_else(|| Error::Internal("no spin structure".into()))?;
    let b = decompose_with_spin(ell, lat, delta, &s)?;
    Ok((b, s))
}

/// The unique b with ell = 2b + B(s + e) mod 2BZ^V for a given spin structure s.
pub fn decompose_with_spin(ell: &[i64], lat: &LatticeModel, delta: &[i64], s: &SpinStructure) -> Result<HomologyClass> {
    for (x, d) in ell.iter().zip(delta) {
        if (x - d).rem_euclid(2) != 0 {
            return Err(Error::Parity(format!("{ell:?} is not congruent to delta = {delta:?} mod 2")));
        }
    }
    let se: Vec<i64> = s.s.iter().map(|x| x + 1).collect();
    let bse = lat.mul_b(&se);
    let mut half = Vec::with_capacity(ell.len());
    for (x, y) in ell.iter().zip(&bse) {
        let d = x - y;
        if d.rem_euclid(2) != 0 {
            return Err(Error::Internal(format!("B(s+e) has the wrong parity for s = {:?}", s.s)));
        }
        half.push(d / 2);
    }
    Ok(HomologyClass { rep: lat.canon_h1(&half) })
}

/// True iff every rational entry is an integer.
pub fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|q| q.is_integer())
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(x as i128)).collect()
}
