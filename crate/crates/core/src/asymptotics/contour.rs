//! Zhat_r(tau) = 2^{-|V|} c_tau sum_nu int_{i eps nu + R^V} exp(Q(x)/(2 pi i tau)) G(ix) dx,
//! c_tau = sqrt(det(-B)) / (pi sqrt 2)^{|V|} / (-i tau)^{|V|/2}.

use num_complex::Complex64;
use rayon::prelude::*;

use super::quad::{composite_gl, GenFn64};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::model::SignVector;
use crate::precision::ordered_sum;

/// Largest rank handled by the tensor-product quadratures.
pub const RANK_CAP: usize = 3;

#[derive(Clone, Debug)]
pub struct ContourSpec {
    /// Contour shift; `None` picks a quarter of the least distance of the
    /// points e(alpha_v/r) from +-1.
    pub eps: Option<f64>,
    /// Gauss-Legendre nodes per panel.
    pub order: usize,
    /// Gaussian damping exponent at the box edge.
    pub cutoff: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { eps: None, order: 16, cutoff: 40.0 }
    }
}

#[derive(Clone, Debug)]
pub struct ContourEval {
    pub value: Complex64,
    pub eps: f64,
    pub half_width: f64,
    pub nodes_per_axis: usize,
    /// Bound on the discarded Gaussian tail, relative to the integrand scale.
    pub truncation: f64,
}

pub fn contour_integral(tau: Complex64, spec: &ContourSpec, ctx: &Context) -> Result<ContourEval> {
    if tau.im <= 0.0 {
        return Err(Error::Precondition("Im(tau) must be positive".into()));
    }
    let m = ctx.rank();
    let g = GenFn64::new(ctx);
    let has_poles = ctx.delta.iter().any(|&d| d >= 3);
    let eps = spec.eps.unwrap_or(0.25 * g.pole_distance());
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Precondition(format!("contour shift {eps} must be finite and >= 0")));
    }
    if has_poles && eps < 1e-12 {
        return Err(Error::Pole("contour i eps nu + R^V meets the pole divisor of G(ix)".into()));
    }
    if m > RANK_CAP {
        return Err(Error::RankCap { rank: m, cap: RANK_CAP });
    }
    if spec.order < 2 || !(spec.cutoff > 0.0) {
        return Err(Error::Precondition("quadrature order >= 2 and cutoff > 0 required".into()));
    }

    let b: Vec<Vec<f64>> = ctx.lat.b.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let lmin = ctx.lat.eigs[0];
    let lmax = *ctx.lat.eigs.last().unwrap();
    // exp(Q(x) k), k = 1/(2 pi i tau)
    let k = Complex64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI)).conj() / tau;
    let damp = -k.re; // > 0
    let osc = k.norm();
    // Q(u + i eps nu) has a cross term linear in u of size <= 2 eps lmax sqrt(m) |u|
    let lin = 2.0 * eps * lmax * (m as f64).sqrt() * osc;
    let a = damp * lmin;
    let half_width = (lin + (lin * lin + 4.0 * a * (spec.cutoff + 2.0 * eps * eps * lmax * osc)).sqrt()) / (2.0 * a);
    // panel width resolves the Gaussian oscillation, the vertex exponentials and the pole distance
    let mut h = (0.5 / (osc * lmax).sqrt()).min(0.5);
    if has_poles {
        h = h.min(eps.max(1e-3));
    }
    let panels = ((2.0 * half_width) / h).ceil() as usize;
    let rule = composite_gl(-half_width, half_width, panels, spec.order);
    let n = rule.len();

    let det_neg_b = ctx.lat.det.unsigned_abs() as f64;
    let c_tau = det_neg_b.sqrt() / (std::f64::consts::PI * std::f64::consts::SQRT_2).powi(m as i32)
        / (Complex64::new(0.0, -1.0) * tau).powf(m as f64 / 2.0);

    let total = n.pow(m as u32);
    let nus = SignVector::all(m);
    let mut acc = Complex64::new(0.0, 0.0);
    for nu in &nus {
        let shift: Vec<f64> = nu.nu.iter().map(|&s| eps * s as f64).collect();
        let part = (0..total)
            .into_par_iter()
            .map(|mut idx| -> Result<Complex64> {
                let mut x = Vec::with_capacity(m);
                let mut w = 1.0;
                for sv in &shift {
                    let (u, wu) = rule[idx % n];
                    idx /= n;
                    x.push(Complex64::new(u, *sv));
                    w *= wu;
                }
                let mut q = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    for j in 0..m {
                        if b[i][j] != 0.0 {
                            q -= x[i] * x[j] * b[i][j];
                        }
                    }
                }
                let ix: Vec<Complex64> = x.iter().map(|v| v * Complex64::new(0.0, 1.0)).collect();
                Ok((q * k).exp() * g.eval(&ix)? * w)
            })
;
        let part = ordered_sum(part, || Ok(Complex64::new(0.0, 0.0)), |a: Result<Complex64>, b| Ok(a? + b?))?;
        acc += part;
    }
    let value = acc * c_tau / (nus.len() as f64);
    Ok(ContourEval { value, eps, half_width, nodes_per_axis: n, truncation: (-spec.cutoff).exp() })
}
