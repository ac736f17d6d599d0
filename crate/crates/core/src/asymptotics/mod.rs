//! Asymptotics of the radial function at tau -> 0: perturbative coefficients
//! from the jet of G, the Hadamard-product route, contour integrals, the
//! Borel transform and its Laplace resummation.

mod borel;
mod contour;
mod em;
pub mod quad;

pub use borel::{borel_laplace_resum, borel_transform, BorelCoefficients, BorelEval, borel_coefficients};
pub use contour::{contour_integral, ContourSpec, ContourEval, RANK_CAP};
pub use em::{euler_maclaurin_check, gaussian_selftest, CoefficientRule, EmReport, GaussianReport};

use std::collections::HashMap;

use rayon::prelude::*;
use rug::Float;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::model::SignVector;
use crate::precision::{jet_vertex_factor, laplacian_apply, ordered_sum, pi, ComplexAP, Jet, MonomialBasis};
use crate::radial::{radial_eval, RadialSeries};
use crate::Rat;

/// Taylor jet of G_{omega,r} at x = 0, truncated at total degree `cap`.
pub fn generating_jet(ctx: &Context, cap: u32) -> Result<Jet> {
    let m = ctx.rank();
    let basis = MonomialBasis::new(m, cap);
    let wp = ctx.coset.prec();
    // univariate factors depend only on (v, root index)
    let mut cache: HashMap<(usize, i128), Vec<ComplexAP>> = HashMap::new();
    for pt in &ctx.coset.points {
        for v in 0..m {
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((v, pt.lin[v])) {
                let j = jet_vertex_factor(ctx.delta[v], ctx.coset.zeta(pt, v), cap)?;
                e.insert(j.coeffs().to_vec());
            }
        }
    }
    let sum = ctx
        .coset
        .points
        .par_iter()
        .map(|pt| {
            let uni: Vec<Vec<ComplexAP>> = (0..m).map(|v| cache[&(v, pt.lin[v])].clone()).collect();
            Jet::tensor(&basis, &uni).scale(ctx.coset.quad_phase(pt))
        })
;
    let sum = ordered_sum(sum, || Jet::zero(&basis, wp), |a, b| a.add(&b));
    Ok(sum.scale(&ctx.lambda.with_prec(wp)))
}

/// Zhat_r(tau) ~ sum_l Zhat_l (2 pi i tau)^l as tau -> 0.
#[derive(Clone, Debug)]
pub struct PerturbativeSeries {
    pub coeffs: Vec<ComplexAP>,
}

impl PerturbativeSeries {
    /// Partial sum through order `upto` at tau.
    pub fn partial_sum(&self, tau: &ComplexAP, upto: usize) -> ComplexAP {
        let wp = tau.prec();
        let t = &two_pi_i(wp) * tau;
        let mut acc = ComplexAP::zero(wp);
        let mut pw = ComplexAP::one(wp);
        for c in self.coeffs.iter().take(upto + 1) {
            acc += &(c * &pw);
            pw = &pw * &t;
        }
        acc
    }
}

fn two_pi_i(wp: u32) -> ComplexAP {
    ComplexAP::from_real(Float::with_val(wp, pi(wp) * 2u32)).mul_i()
}

fn neg_binv(ctx: &Context) -> Vec<Vec<Rat>> {
    ctx.lat.binv.iter().map(|row| row.iter().map(|q| -q).collect()).collect()
}

/// Zhat_l = (1/(4^l l!)) (-sum b^{vw} d_v d_w)^l G(0) for l = 0..=order.
pub fn perturbative_coeffs(ctx: &Context, order: u32) -> Result<PerturbativeSeries> {
    let jet = generating_jet(ctx, 2 * order)?;
    let m = neg_binv(ctx);
    let coeffs = (0..=order)
        .map(|l| Ok(laplacian_apply(&jet, &m, l)?.with_prec(ctx.prec)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PerturbativeSeries { coeffs })
}

/// Coefficients of the Hadamard products G(I_nu .) (.) exp((pi/2) y^T I_nu B^{-1} I_nu y),
/// averaged over nu, in the variable t (tau = i t), and converted to the
/// (2 pi i tau)^l normalisation.
#[derive(Clone, Debug)]
pub struct HadamardSeries {
    pub t_coeffs: Vec<ComplexAP>,
    pub coeffs: Vec<ComplexAP>,
}

pub fn hadamard_coeffs(ctx: &Context, order: u32) -> Result<HadamardSeries> {
    let m = ctx.rank();
    let cap = 2 * order;
    let jet = generating_jet(ctx, cap)?;
    let basis = jet.basis().clone();
    let wp = jet.prec();
    let half_pi = Float::with_val(wp, pi(wp) / 2u32);
    let nus = SignVector::all(m);
    let mut t_coeffs = vec![ComplexAP::zero(wp); order as usize + 1];
    for nu in &nus {
        let gnu = jet.reflect(&nu.nu);
        // quadratic form (pi/2) y^T I_nu B^{-1} I_nu y as a jet, then exp
        let mut terms = Vec::new();
        for v in 0..m {
            for w in 0..m {
                let s = (nu.nu[v] as i128) * (nu.nu[w] as i128);
                let c = ctx.lat.binv[v][w] * Rat::from_integer(s);
                if c == Rat::from_integer(0) {
                    continue;
                }
                let mut mono = vec![0u32; m];
                mono[v] += 1;
                mono[w] += 1;
                let cf = crate::precision::jet::rat_to_float(&c, wp) * &half_pi;
                terms.push((mono, ComplexAP::from_real(cf)));
            }
        }
        let quad = Jet::from_terms(&basis, wp, &terms);
        let gauss = quad.exp_nilpotent();
        for (i, g) in gnu.coeffs().iter().enumerate() {
            let deg = basis.degree(i);
            if deg % 2 == 1 || g.is_zero() {
                continue;
            }
            let mono = basis.monomial(i);
            let mut fact = Float::with_val(wp, 1);
            for &k in mono {
                for j in 2..=k {
                    fact *= j;
                }
            }
            let f = gauss.coeff(mono).scale(&fact);
            t_coeffs[(deg / 2) as usize] += &(g * &f);
        }
    }
    let inv_n = Float::with_val(wp, 1) / Float::with_val(wp, nus.len());
    let t_coeffs: Vec<ComplexAP> = t_coeffs.into_iter().map(|c| c.scale(&inv_n)).collect();
    let neg_two_pi = Float::with_val(wp, -pi(wp) * 2u32);
    let mut div = Float::with_val(wp, 1);
    let mut coeffs = Vec::with_capacity(t_coeffs.len());
    for c in &t_coeffs {
        coeffs.push(c.scale(&(Float::with_val(wp, 1) / &div)).with_prec(ctx.prec));
        div *= &neg_two_pi;
    }
    let t_coeffs = t_coeffs.into_iter().map(|c| c.with_prec(ctx.prec)).collect();
    Ok(HadamardSeries { t_coeffs, coeffs })
}

/// Least-squares slope of log y against log x.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Remainders |Zhat_r(tau) - sum_{l<=L} Zhat_l (2 pi i tau)^l| along tau = t * dir.
#[derive(Clone, Debug)]
pub struct RemainderReport {
    pub order: u32,
    pub ts: Vec<f64>,
    pub remainders: Vec<f64>,
    pub slope: f64,
}

/// Radial values on tau = t * dir, t in `ts`, against the perturbative series.
pub fn remainder_order_check(
    ctx: &Context,
    series: &PerturbativeSeries,
    orders: &[u32],
    ts: &[f64],
    dir: (f64, f64),
    tol: f64,
) -> Result<Vec<RemainderReport>> {
    if let Some(&l) = orders.iter().max() {
        if l as usize >= series.coeffs.len() {
            return Err(Error::Precondition(format!("series has no coefficient of order {l}")));
        }
    }
    let wp = ctx.prec + 16;
    let min_im = ts.iter().cloned().fold(f64::INFINITY, f64::min) * dir.1;
    let cache = RadialSeries::new(ctx, &RadialSeries::order_for(ctx, min_im, tol))?;
    let vals = ts
        .iter()
        .map(|&t| {
            let tau = ComplexAP::from_f64(t * dir.0, t * dir.1, wp);
            Ok((tau.clone(), cache.eval(&tau, tol, ctx)?.value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(orders
        .iter()
        .map(|&l| {
            let rem: Vec<f64> = vals
                .iter()
                .map(|(tau, z)| (z - &series.partial_sum(tau, l as usize)).abs_f64())
                .collect();
            RemainderReport { order: l, ts: ts.to_vec(), slope: log_slope(ts, &rem), remainders: rem }
        })
        .collect())
}

/// |Zhat_r(i t) - Z_r| along a grid, expected to decrease to zero.
pub fn radial_approach(ctx: &Context, z: &ComplexAP, ts: &[f64], dir: (f64, f64), tol: f64) -> Result<Vec<f64>> {
    let wp = ctx.prec + 16;
    ts.iter()
        .map(|&t| {
            let tau = ComplexAP::from_f64(t * dir.0, t * dir.1, wp);
            Ok((&radial_eval(&tau, tol, ctx)?.value - z).abs_f64())
        })
        .collect()
}
