//! Truncated multivariate power series in `dim` variables, total degree <= `cap`.
//!
//! Coefficients live in a dense vector indexed by a shared [`MonomialBasis`]
//! (degree-graded, lexicographic within a degree). Every stored multi-index
//! has total degree at most `cap`; products drop the overflow.

use std::collections::HashMap;
use std::sync::Arc;

use rug::Float;

use super::ComplexAP;
use crate::error::{Error, Result};
use crate::Rat;

#[derive(Debug)]
pub struct MonomialBasis {
    dim: usize,
    cap: u32,
    monos: Vec<Vec<u32>>,
    degs: Vec<u32>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(dim: usize, cap: u32) -> Arc<Self> {
        let mut monos = Vec::new();
        for d in 0..=cap {
            let mut cur = vec![0u32; dim];
            push_degree(&mut monos, &mut cur, 0, d);
        }
        let degs = monos.iter().map(|m| m.iter().sum()).collect();
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Arc::new(MonomialBasis { dim, cap, monos, degs, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[u32] {
        &self.monos[i]
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degs[i]
    }

    pub fn index_of(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

// lexicographic descending in the first coordinate
fn push_degree(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
    if cur.is_empty() {
        if rem == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=rem).rev() {
        cur[pos] = k;
        push_degree(out, cur, pos + 1, rem - k);
    }
    cur[pos] = 0;
}

#[derive(Clone, Debug)]
pub struct Jet {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<ComplexAP>,
}

impl Jet {
    pub fn zero(basis: &Arc<MonomialBasis>, prec: u32) -> Self {
        Jet { basis: basis.clone(), coeffs: vec![ComplexAP::zero(prec); basis.len()] }
    }

    pub fn constant(basis: &Arc<MonomialBasis>, c: ComplexAP) -> Self {
        let mut j = Jet::zero(basis, c.prec());
        j.coeffs[0] = c;
        j
    }

    pub fn variable(basis: &Arc<MonomialBasis>, v: usize, prec: u32) -> Self {
        let mut j = Jet::zero(basis, prec);
        if basis.cap >= 1 {
            let mut m = vec![0; basis.dim];
            m[v] = 1;
            let i = basis.index_of(&m).expect("degree-one monomial");
            j.coeffs[i] = ComplexAP::one(prec);
        }
        j
    }

    /// Builds a jet from (multi-index, coefficient) pairs; entries above `cap` are dropped.
    pub fn from_terms(basis: &Arc<MonomialBasis>, prec: u32, terms: &[(Vec<u32>, ComplexAP)]) -> Self {
        let mut j = Jet::zero(basis, prec);
        for (m, c) in terms {
            if let Some(i) = basis.index_of(m) {
                j.coeffs[i] += c;
            }
        }
        j
    }

    /// Product of univariate series, `uni[v][k]` the coefficient of x_v^k.
    pub fn tensor(basis: &Arc<MonomialBasis>, uni: &[Vec<ComplexAP>]) -> Self {
        assert_eq!(uni.len(), basis.dim);
        let prec = uni.first().and_then(|u| u.first()).map(|c| c.prec()).unwrap_or(64);
        let coeffs = basis
            .monos
            .iter()
            .map(|m| {
                let mut acc = ComplexAP::one(prec);
                for (v, &k) in m.iter().enumerate() {
                    match uni[v].get(k as usize) {
                        Some(c) => acc = &acc * c,
                        None => return ComplexAP::zero(prec),
                    }
                }
                acc
            })
            .collect();
        Jet { basis: basis.clone(), coeffs }
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn cap(&self) -> u32 {
        self.basis.cap
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    pub fn coeffs(&self) -> &[ComplexAP] {
        &self.coeffs
    }

    pub fn coeff(&self, m: &[u32]) -> ComplexAP {
        match self.basis.index_of(m) {
            Some(i) => self.coeffs[i].clone(),
            None => ComplexAP::zero(self.prec()),
        }
    }

    pub fn value(&self) -> &ComplexAP {
        &self.coeffs[0]
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Jet { basis: self.basis.clone(), coeffs }
    }

    pub fn add_assign(&mut self, o: &Jet) {
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Jet { basis: self.basis.clone(), coeffs }
    }

    pub fn scale(&self, s: &ComplexAP) -> Jet {
        let coeffs = self.coeffs.iter().map(|a| a * s).collect();
        Jet { basis: self.basis.clone(), coeffs }
    }

    /// Multiplies the coefficient of x^m by nu^m, i.e. the jet of x -> j(I_nu x).
    pub fn reflect(&self, nu: &[i8]) -> Jet {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let odd = self.basis.monos[i]
                    .iter()
                    .zip(nu)
                    .filter(|(&k, &s)| s < 0 && k % 2 == 1)
                    .count();
                if odd % 2 == 1 {
                    -c
                } else {
                    c.clone()
                }
            })
            .collect();
        Jet { basis: self.basis.clone(), coeffs }
    }

    pub fn derivative(&self, v: usize) -> Jet {
        let prec = self.prec();
        let mut out = Jet::zero(&self.basis, prec);
        let mut m = vec![0u32; self.dim()];
        for (i, c) in self.coeffs.iter().enumerate() {
            let src = &self.basis.monos[i];
            if src[v] == 0 || c.is_zero() {
                continue;
            }
            m.copy_from_slice(src);
            m[v] -= 1;
            let t = self.basis.index_of(&m).expect("lower monomial");
            out.coeffs[t] += &c.scale_i64(src[v] as i64);
        }
        out
    }

    /// 1/j via the geometric series in (j - j0)/j0.
    pub fn inv(&self) -> Result<Jet> {
        let c0 = self.value();
        if c0.is_zero() {
            return Err(Error::Pole("jet inversion at a zero constant term".into()));
        }
        let inv0 = c0.inv();
        let mut u = self.scale(&inv0);
        u.coeffs[0] = ComplexAP::zero(self.prec());
        let u = u.scale(&ComplexAP::from_i64(-1, self.prec()));
        // 1 + u + u^2 + ... + u^cap
        let mut acc = Jet::constant(&self.basis, ComplexAP::one(self.prec()));
        for _ in 0..self.cap() {
            acc = jet_mul(&acc, &u).add(&Jet::constant(&self.basis, ComplexAP::one(self.prec())));
        }
        Ok(acc.scale(&inv0))
    }

    pub fn powu(&self, n: u32) -> Jet {
        let mut acc = Jet::constant(&self.basis, ComplexAP::one(self.prec()));
        for _ in 0..n {
            acc = jet_mul(&acc, self);
        }
        acc
    }

    /// exp(j) for a jet with zero constant term.
    pub fn exp_nilpotent(&self) -> Jet {
        debug_assert!(self.value().is_zero());
        let prec = self.prec();
        let mut acc = Jet::constant(&self.basis, ComplexAP::one(prec));
        let mut term = acc.clone();
        for k in 1..=self.cap() {
            term = jet_mul(&term, self);
            let inv_k = ComplexAP::from_real(Float::with_val(prec, 1) / Float::with_val(prec, k));
            term = term.scale(&inv_k);
            acc.add_assign(&term);
        }
        acc
    }

    /// Applies sum_{v,w} m[v][w] d_v d_w once.
    pub fn second_order(&self, m: &[Vec<Float>]) -> Jet {
        let prec = self.prec();
        let dim = self.dim();
        let mut out = Jet::zero(&self.basis, prec);
        let mut t = vec![0u32; dim];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let src = &self.basis.monos[i];
            for v in 0..dim {
                for w in 0..dim {
                    if m[v][w].is_zero() {
                        continue;
                    }
                    t.copy_from_slice(src);
                    if t[v] == 0 {
                        continue;
                    }
                    let f1 = t[v];
                    t[v] -= 1;
                    if t[w] == 0 {
                        continue;
                    }
                    let f2 = t[w];
                    t[w] -= 1;
                    let k = self.basis.index_of(&t).expect("lower monomial");
                    let mut s = Float::with_val(prec, &m[v][w] * (f1 * f2));
                    s.set_prec(prec);
                    out.coeffs[k] += &c.scale(&s);
                }
            }
        }
        out
    }
}

/// Truncated Cauchy product.
pub fn jet_mul(a: &Jet, b: &Jet) -> Jet {
    assert!(Arc::ptr_eq(&a.basis, &b.basis) || (a.dim() == b.dim() && a.cap() == b.cap()));
    let basis = &a.basis;
    let prec = a.prec().max(b.prec());
    let mut out = Jet::zero(basis, prec);
    let cap = basis.cap;
    let mut m = vec![0u32; basis.dim];
    for (i, ca) in a.coeffs.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        let di = basis.degs[i];
        let ma = &basis.monos[i];
        for (j, cb) in b.coeffs.iter().enumerate() {
            if basis.degs[j] + di > cap {
                // degree-graded order: nothing further fits
                break;
            }
            if cb.is_zero() {
                continue;
            }
            for ((t, x), y) in m.iter_mut().zip(ma).zip(&basis.monos[j]) {
                *t = x + y;
            }
            let k = basis.index_of(&m).expect("product monomial");
            out.coeffs[k] += &(ca * cb);
        }
    }
    out
}

/// Univariate jet of x -> F_v(zeta e^x), F_v(y) = (y - 1/y)^(2 - deg).
pub fn jet_vertex_factor(deg: i64, zeta: &ComplexAP, cap: u32) -> Result<Jet> {
    let prec = zeta.prec();
    let basis = MonomialBasis::new(1, cap);
    let exp_series = |k: i64| -> Jet {
        // (zeta^k) e^{k x}
        let zk = zeta.powi(k);
        let mut coeffs = Vec::with_capacity(cap as usize + 1);
        let mut c = zk;
        for n in 0..=cap {
            if n > 0 {
                let f = Float::with_val(prec, k) / Float::with_val(prec, n);
                c = c.scale(&f);
            }
            coeffs.push(c.clone());
        }
        Jet { basis: basis.clone(), coeffs }
    };
    match deg {
        2 => Ok(Jet::constant(&basis, ComplexAP::one(prec))),
        1 => Ok(exp_series(1).sub(&exp_series(-1))),
        0 => {
            let two = Jet::constant(&basis, ComplexAP::from_i64(2, prec));
            Ok(exp_series(2).sub(&two).add(&exp_series(-2)))
        }
        d if d >= 3 => {
            let g = exp_series(1).sub(&exp_series(-1));
            let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
            if g.value().abs() < tiny {
                return Err(Error::Pole(format!("F_v has a pole at zeta = {zeta} (deg {d})")));
            }
            Ok(g.inv()?.powu((d - 2) as u32))
        }
        d => Err(Error::Precondition(format!("negative degree {d}"))),
    }
}

/// (1/(4^l l!)) (sum_{v,w} m[v][w] d_v d_w)^l j (0).
pub fn laplacian_apply(j: &Jet, m: &[Vec<Rat>], l: u32) -> Result<ComplexAP> {
    if j.cap() < 2 * l {
        return Err(Error::CapTooSmall { cap: j.cap(), need: 2 * l });
    }
    let prec = j.prec();
    let mf: Vec<Vec<Float>> = m
        .iter()
        .map(|row| row.iter().map(|q| rat_to_float(q, prec)).collect())
        .collect();
    let mut cur = j.clone();
    for _ in 0..l {
        cur = cur.second_order(&mf);
    }
    let mut denom = Float::with_val(prec, 1);
    for k in 1..=l {
        denom *= 4 * k;
    }
    Ok(cur.value().scale(&(Float::with_val(prec, 1) / denom)))
}

pub fn rat_to_float(q: &Rat, prec: u32) -> Float {
    let mut f = Float::with_val(prec, *q.numer());
    f /= Float::with_val(prec, *q.denom());
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::root_of_unity;

    fn c(re: f64, prec: u32) -> ComplexAP {
        ComplexAP::from_f64(re, 0.0, prec)
    }

    #[test]
    fn basis_counts() {
        let b = MonomialBasis::new(3, 4);
        assert_eq!(b.len(), 35);
        assert_eq!(b.monomial(0), &[0, 0, 0]);
        assert_eq!(MonomialBasis::new(1, 6).len(), 7);
    }

    #[test]
    fn mul_truncates() {
        let b = MonomialBasis::new(2, 2);
        let x = Jet::variable(&b, 0, 64);
        let y = Jet::variable(&b, 1, 64);
        let xy = jet_mul(&x, &y);
        assert_eq!(xy.coeff(&[1, 1]).to_c64().re, 1.0);
        let x3 = jet_mul(&xy, &x);
        assert!(x3.coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn inverse_roundtrip() {
        let b = MonomialBasis::new(2, 5);
        let p = 128;
        let terms = vec![
            (vec![0, 0], c(2.0, p)),
            (vec![1, 0], c(-1.0, p)),
            (vec![0, 1], c(0.5, p)),
            (vec![1, 1], c(3.0, p)),
        ];
        let j = Jet::from_terms(&b, p, &terms);
        let prod = jet_mul(&j, &j.inv().unwrap());
        for (i, x) in prod.coeffs().iter().enumerate() {
            let want = if i == 0 { 1.0 } else { 0.0 };
            assert!((x.to_c64().re - want).abs() < 1e-30 && x.to_c64().im.abs() < 1e-30);
        }
    }

    #[test]
    fn vertex_factor_closed_forms() {
        let p = 192;
        let j = jet_vertex_factor(2, &root_of_unity(1, 7, p), 4).unwrap();
        assert_eq!(j.value().to_c64().re, 1.0);
        assert!(j.coeffs()[1..].iter().all(|c| c.is_zero()));
        let j0 = jet_vertex_factor(0, &ComplexAP::i(p), 3).unwrap();
        assert!((j0.value().to_c64() + 4.0).norm() < 1e-40);
        let j3 = jet_vertex_factor(3, &root_of_unity(1, 3, p), 3).unwrap();
        let want = num_complex::Complex64::new(0.0, -1.0 / 3f64.sqrt());
        assert!((j3.value().to_c64() - want).norm() < 1e-15);
    }

    #[test]
    fn vertex_factor_pole() {
        let e = jet_vertex_factor(4, &ComplexAP::one(128), 2);
        assert!(matches!(e, Err(Error::Pole(_))));
    }

    #[test]
    fn laplacian_of_square() {
        // j = x^2, m = (beta): (1/4) beta 2 = beta/2
        let b = MonomialBasis::new(1, 2);
        let j = Jet::from_terms(&b, 128, &[(vec![2], c(1.0, 128))]);
        let beta = Rat::new(-2, 7);
        let v = laplacian_apply(&j, &[vec![beta]], 1).unwrap();
        assert!((v.to_c64().re + 1.0 / 7.0).abs() < 1e-15);
        assert!(matches!(laplacian_apply(&j, &[vec![beta]], 2), Err(Error::CapTooSmall { .. })));
    }

    #[test]
    fn reflect_matches_substitution() {
        let b = MonomialBasis::new(2, 3);
        let p = 96;
        let terms = vec![(vec![1, 2], c(1.0, p)), (vec![2, 1], c(2.0, p)), (vec![0, 1], c(3.0, p))];
        let j = Jet::from_terms(&b, p, &terms).reflect(&[1, -1]);
        assert_eq!(j.coeff(&[1, 2]).to_c64().re, 1.0);
        assert_eq!(j.coeff(&[2, 1]).to_c64().re, -2.0);
        assert_eq!(j.coeff(&[0, 1]).to_c64().re, -3.0);
    }
}
