//! Finite verification of Gaussian reciprocity
//!
//! ```text
//! sum_{x in L/kL} e(<x,h x>/(2k) + <x,u>)
//!   = e(sigma/8) k^{n/2} / sqrt(|L'/L| |det h|) sum_{y in L'/h(L')} e(-(k/2) <y+u, h^{-1}(y+u)>)
//! ```
//!
//! on L = Z^n with the form <x,y> = x^T G y and h acting as a matrix on columns.
//! As printed, the dual sum over L'/h(L') is short by the factor |L'/L| whenever
//! the form is not unimodular; the default [`DualQuotient::HOfLattice`] sums
//! over L'/h(L) instead, which is the version that holds.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::model::snf::{det_bareiss, mat_mul, rat_inverse, signature, smith_normal_form, to_rat};
use crate::model::{IMat, RMat, SignVector};
use crate::precision::{e_rat, ordered_sum, root_of_unity, ComplexAP};
use crate::radial::in_index_cone;
use crate::Rat;

#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocityInstance {
    pub gram: IMat,
    pub h: IMat,
    pub k: i64,
    pub u: Vec<Rat>,
}

/// Which quotient of L' indexes the dual sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DualQuotient {
    /// L'/h(L).
    #[default]
    HOfLattice,
    /// L'/h(L'), the literal printed form.
    HOfDual,
}

#[derive(Clone, Debug)]
pub struct ReciprocityReport {
    pub lhs: ComplexAP,
    pub rhs: ComplexAP,
    pub diff: f64,
    pub pass: bool,
}

fn rat_matmul(a: &RMat, b: &RMat) -> RMat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

fn to_int(m: &RMat) -> Option<IMat> {
    m.iter()
        .map(|r| r.iter().map(|q| q.is_integer().then(|| q.to_integer() as i64)).collect())
        .collect()
}

struct Checked {
    n: usize,
    gram_q: RMat,
    /// <., h .> = G H.
    gh: RMat,
    /// G H^{-1}, the form <., h^{-1} .>.
    g_hinv: RMat,
    ginv: RMat,
    /// G H G^{-1}: h(L') in the coordinates z = G y.
    h_dual: IMat,
    /// G H: h(L) in the same coordinates.
    h_lat: IMat,
    det_g: i128,
    det_h: i128,
}

impl ReciprocityInstance {
    fn check(&self) -> Result<Checked> {
        let n = self.gram.len();
        let hyp = |s: String| Err(Error::Hypothesis(s));
        if n == 0 || self.gram.iter().any(|r| r.len() != n) || self.h.len() != n || self.h.iter().any(|r| r.len() != n) {
            return hyp("gram and h must be square of the same size".into());
        }
        if self.u.len() != n {
            return hyp("u has the wrong length".into());
        }
        for i in 0..n {
            for j in 0..n {
                if self.gram[i][j] != self.gram[j][i] {
                    return hyp("gram is not symmetric".into());
                }
            }
        }
        let det_g = det_bareiss(&self.gram);
        let det_h = det_bareiss(&self.h);
        if det_g == 0 {
            return hyp("gram is degenerate".into());
        }
        if det_h == 0 {
            return hyp("h is singular".into());
        }
        if self.k <= 0 {
            return hyp(format!("k = {} must be positive", self.k));
        }
        if (self.k as i128) % det_g.abs() != 0 {
            return hyp(format!("k = {} is not a multiple of |L'/L| = {}", self.k, det_g.abs()));
        }
        let gh_i = mat_mul(&self.gram, &self.h);
        for i in 0..n {
            for j in 0..n {
                if gh_i[i][j] != gh_i[j][i] {
                    return hyp("h is not self-adjoint for the form".into());
                }
            }
        }
        let gram_q = to_rat(&self.gram);
        let ginv = rat_inverse(&gram_q).ok_or(Error::Singular)?;
        let hq = to_rat(&self.h);
        let hinv = rat_inverse(&hq).ok_or(Error::Singular)?;
        let h_dual = to_int(&rat_matmul(&rat_matmul(&gram_q, &hq), &ginv))
            .ok_or_else(|| Error::Hypothesis("h does not preserve L'".into()))?;
        // (k/2) <y, h y> in Z for all y in L' = G^{-1} Z^n, i.e. for
        // the form G^{-1} G H G^{-1} = H G^{-1} on Z^n
        let q = rat_matmul(&hq, &ginv);
        let kq = Rat::from_integer(self.k as i128);
        for i in 0..n {
            if !(kq * q[i][i] / Rat::from_integer(2)).is_integer() {
                return hyp(format!("(k/2)<y,h(y)> is not integral on the dual basis vector {i}"));
            }
            for j in 0..i {
                if !(kq * q[i][j]).is_integer() {
                    return hyp(format!("k<y,h(y')> is not integral on dual basis vectors {j}, {i}"));
                }
            }
        }
        for (i, ui) in self.u.iter().enumerate() {
            if !(ui * kq).is_integer() {
                return hyp(format!("u[{i}] = {ui} is not in (1/k)L"));
            }
        }
        let gh = to_rat(&gh_i);
        let g_hinv = rat_matmul(&gram_q, &hinv);
        Ok(Checked { n, gram_q, gh, g_hinv, ginv, h_dual, h_lat: gh_i, det_g, det_h })
    }
}

fn bilinear(a: &RMat, x: &[Rat], y: &[Rat]) -> Rat {
    crate::model::snf::rat_bilinear(a, x, y)
}

/// Both sides with exact rational exponents at `prec` bits.
pub fn reciprocity_sides(inst: &ReciprocityInstance, prec: u32) -> Result<(ComplexAP, ComplexAP)> {
    reciprocity_sides_with(inst, prec, DualQuotient::default())
}

pub fn reciprocity_sides_with(
    inst: &ReciprocityInstance,
    prec: u32,
    quotient: DualQuotient,
) -> Result<(ComplexAP, ComplexAP)> {
    let c = inst.check()?;
    let n = c.n;
    let k = inst.k;
    let wp = prec + 16;
    let kq = Rat::from_integer(k as i128);

    let total = (k as usize).pow(n as u32);
    let lhs = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let x: Vec<Rat> = (0..n)
                .map(|_| {
                    let v = (idx % k as usize) as i128;
                    idx /= k as usize;
                    Rat::from_integer(v)
                })
                .collect();
            let e = bilinear(&c.gh, &x, &x) / (kq * Rat::from_integer(2)) + bilinear(&c.gram_q, &x, &inst.u);
            e_rat(&e, wp)
        })
;
    let lhs = ordered_sum(lhs, || ComplexAP::zero(wp), |a, b| &a + &b);

    // L' = Z^n in the coordinates z = G y
    let snf = smith_normal_form(match quotient {
        DualQuotient::HOfLattice => &c.h_lat,
        DualQuotient::HOfDual => &c.h_dual,
    });
    let uinv = rat_inverse(&to_rat(&snf.u)).ok_or_else(|| Error::Internal("SNF transform not invertible".into()))?;
    let diag = snf.diagonal();
    let count: usize = diag.iter().map(|&d| d.unsigned_abs() as usize).product();
    let half_k = kq / Rat::from_integer(2);
    let rhs_sum = (0..count)
        .into_par_iter()
        .map(|mut idx| {
            let cvec: Vec<Rat> = diag
                .iter()
                .map(|&d| {
                    let d = d.unsigned_abs() as usize;
                    let v = idx % d;
                    idx /= d;
                    Rat::from_integer(v as i128)
                })
                .collect();
            let z = crate::model::snf::rat_mat_vec(&uinv, &cvec);
            let y = crate::model::snf::rat_mat_vec(&c.ginv, &z);
            let yu: Vec<Rat> = y.iter().zip(&inst.u).map(|(a, b)| a + b).collect();
            e_rat(&(-half_k * bilinear(&c.g_hinv, &yu, &yu)), wp)
        })
;
    let rhs_sum = ordered_sum(rhs_sum, || ComplexAP::zero(wp), |a, b| &a + &b);

    let (pos, neg) = signature(&c.gh);
    let sigma = pos as i128 - neg as i128;
    let phase = root_of_unity(sigma, 8, wp);
    let mut scale = Float::with_val(wp, k).pow(n as u32);
    scale /= Float::with_val(wp, Integer::from(c.det_g.abs() * c.det_h.abs()));
    let scale = scale.sqrt();
    let rhs = (&phase * &rhs_sum).scale(&scale);
    Ok((lhs.with_prec(prec), rhs.with_prec(prec)))
}

/// Pass iff |lhs - rhs| <= 10^{1 - prec/4}.
pub fn reciprocity_check(inst: &ReciprocityInstance, prec: u32) -> Result<ReciprocityReport> {
    let (lhs, rhs) = reciprocity_sides(inst, prec)?;
    let diff = (&lhs - &rhs).abs_f64();
    let pass = diff <= 10f64.powf(1.0 - prec as f64 / 4.0);
    Ok(ReciprocityReport { lhs, rhs, diff, pass })
}

/// The three worked cases: two identities and one hypothesis breach.
pub fn hand_examples() -> Vec<(ReciprocityInstance, Option<(i64, i64)>)> {
    let one = |k: i64, h: i64| ReciprocityInstance { gram: vec![vec![1]], h: vec![vec![h]], k, u: vec![Rat::zero()] };
    // expected lhs as (re, im) integers
    vec![(one(2, 2), Some((0, 0))), (one(2, 1), Some((1, 1))), (one(3, 1), None)]
}

/// Random admissible instance: n <= 3, |gram entries| <= 4, k <= 6, h = M G
/// with M integral symmetric so that h is self-adjoint and preserves L'.
pub fn random_instance(rng: &mut ChaCha8Rng) -> ReciprocityInstance {
    loop {
        let n = rng.random_range(1..=3usize);
        let mut gram = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-4..=4);
                gram[i][j] = v;
                gram[j][i] = v;
            }
        }
        let det_g = det_bareiss(&gram).abs();
        if det_g == 0 || det_g > 6 {
            continue;
        }
        let ks: Vec<i64> = (1..=6).filter(|k| (*k as i128) % det_g == 0).collect();
        let k = ks[rng.random_range(0..ks.len())];
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-2..=2);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        if det_bareiss(&m) == 0 {
            continue;
        }
        let h = mat_mul(&m, &gram);
        let u = (0..n).map(|_| Rat::new(rng.random_range(0..k) as i128, k as i128)).collect();
        let inst = ReciprocityInstance { gram, h, k, u };
        if inst.check().is_ok() {
            return inst;
        }
    }
}

/// `count` random admissible instances from a seed.
pub fn random_family(seed: u64, count: usize) -> Vec<ReciprocityInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng)).collect()
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub cases: usize,
    /// max |lhs - rhs| over the reciprocity instances.
    pub reciprocity_diff: f64,
    /// max |e(const) lhs - C(I_nu l)| against the coset Gauss sums.
    pub gauss_sum_diff: f64,
}

/// For every nu and l in the index cone with |l_v| <= bound: L = Z^V, h = 2B,
/// k = r and u = (2 B alpha_0 + I_nu l)/r reproduce the Gauss sum
/// C(I_nu l) = sum_alpha e(alpha^T B alpha / r + alpha^T I_nu l / r).
pub fn specialization_audit(ctx: &Context, bound: i64) -> Result<AuditReport> {
    let m = ctx.rank();
    let r = ctx.r();
    let p = ctx.prec;
    let rq = Rat::from_integer(r as i128);
    let alpha0: Vec<Rat> = ctx
        .omega
        .values()
        .iter()
        .map(|w| (w + Rat::from_integer((r - 1) as i128)) / Rat::from_integer(2))
        .collect();
    let b = &ctx.lat.b;
    let bq = to_rat(b);
    let two_b_alpha: Vec<Rat> = crate::model::snf::rat_mat_vec(&bq, &alpha0).iter().map(|x| x * Rat::from_integer(2)).collect();
    let base_quad = bilinear(&bq, &alpha0, &alpha0);
    let h: IMat = b.iter().map(|row| row.iter().map(|x| 2 * x).collect()).collect();
    let gram: IMat = (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect();

    let mut ls: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..m {
        ls = ls
            .into_iter()
            .flat_map(|l| {
                (-bound..=bound).map(move |x| {
                    let mut v = l.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    ls.retain(|l| in_index_cone(l, &ctx.delta));
    let mut rec = 0f64;
    let mut gs = 0f64;
    let mut cases = 0;
    for nu in SignVector::all(m) {
        for l in &ls {
            let y = nu.apply(l);
            let yq: Vec<Rat> = y.iter().map(|&v| Rat::from_integer(v as i128)).collect();
            let u: Vec<Rat> = two_b_alpha.iter().zip(&yq).map(|(a, c)| (a + c) / rq).collect();
            let inst = ReciprocityInstance { gram: gram.clone(), h: h.clone(), k: r, u };
            let rep = reciprocity_check(&inst, p)?;
            let c = (base_quad + alpha0.iter().zip(&yq).map(|(a, c)| a * c).sum::<Rat>()) / rq;
            let lifted = &rep.lhs * &e_rat(&c, p);
            let direct = ctx.coset.gauss_sum(&y).with_prec(p);
            rec = rec.max(rep.diff);
            gs = gs.max((&lifted - &direct).abs_f64());
            cases += 1;
        }
    }
    Ok(AuditReport { cases, reciprocity_diff: rec, gauss_sum_diff: gs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_cases() {
        for (inst, want) in hand_examples() {
            match want {
                Some((re, im)) => {
                    let rep = reciprocity_check(&inst, 192).unwrap();
                    assert!(rep.pass, "{inst:?}");
                    let w = ComplexAP::from_f64(re as f64, im as f64, 192);
                    assert!((&rep.lhs - &w).abs_f64() < 1e-50);
                }
                None => assert!(matches!(reciprocity_check(&inst, 192), Err(Error::Hypothesis(_)))),
            }
        }
    }

    #[test]
    fn random_family_is_admissible_and_passes() {
        for inst in random_family(7, 20) {
            let rep = reciprocity_check(&inst, 192).unwrap();
            assert!(rep.diff <= 1e-20, "{inst:?} {}", rep.diff);
        }
    }

    #[test]
    fn printed_quotient_is_short_by_the_discriminant() {
        let inst = ReciprocityInstance { gram: vec![vec![3]], h: vec![vec![-6]], k: 3, u: vec![Rat::new(2, 3)] };
        let (lhs, rhs) = reciprocity_sides_with(&inst, 128, DualQuotient::HOfDual).unwrap();
        let three = ComplexAP::from_f64(3.0, 0.0, 128);
        assert!((&lhs - &three).abs_f64() < 1e-30);
        assert!((&rhs.scale(&Float::with_val(128, 3)) - &lhs).abs_f64() < 1e-30);
        assert!(reciprocity_check(&inst, 128).unwrap().pass);
    }

    #[test]
    fn non_self_adjoint_h_rejected() {
        let inst = ReciprocityInstance {
            gram: vec![vec![1, 0], vec![0, 1]],
            h: vec![vec![2, 2], vec![0, 2]],
            k: 2,
            u: vec![Rat::zero(); 2],
        };
        assert!(matches!(reciprocity_check(&inst, 128), Err(Error::Hypothesis(_))));
    }
}
