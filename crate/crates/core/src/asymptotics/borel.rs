//! B_r(z) = z^{|V|/2 - 1} int_{Q^{-1}(1)} G(i x sqrt z) Omega(x) by sphere
//! quadrature, with Omega normalised by Omega ^ dQ = sqrt(det(-B)/pi^{|V|}) dx.
//! On x = L diag(1/sqrt(lambda)) u this is
//! h(s) = (1 / (2 pi^{|V|/2})) int_{S^{|V|-1}} G(i x(u) s) d sigma(u),  B(z) = z^{|V|/2-1} h(sqrt z).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::contour::RANK_CAP;
use super::quad::{composite_gl, gauss_legendre, GenFn64};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::precision::ordered_sum;

/// Points x(u) on the ellipsoid Q(x) = 1 with sphere weights.
struct Ellipsoid {
    pts: Vec<(Vec<f64>, f64)>,
    /// 1 / (2 pi^{m/2}).
    norm: f64,
}

impl Ellipsoid {
    fn new(ctx: &Context, nodes: usize) -> Result<Self> {
        let m = ctx.rank();
        if m > RANK_CAP {
            return Err(Error::RankCap { rank: m, cap: RANK_CAP });
        }
        let map = |u: &[f64]| -> Vec<f64> {
            (0..m)
                .map(|i| (0..m).map(|j| ctx.lat.l[i][j] * u[j] / ctx.lat.eigs[j].sqrt()).sum())
                .collect()
        };
        let tp = 2.0 * std::f64::consts::PI;
        let sphere: Vec<(Vec<f64>, f64)> = match m {
            1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
            2 => (0..nodes)
                .map(|k| {
                    let th = tp * k as f64 / nodes as f64;
                    (vec![th.cos(), th.sin()], tp / nodes as f64)
                })
                .collect(),
            _ => {
                let (zs, ws) = gauss_legendre(nodes);
                let nphi = 2 * nodes;
                let mut out = Vec::with_capacity(nodes * nphi);
                for (z, wz) in zs.iter().zip(&ws) {
                    let rho = (1.0 - z * z).sqrt();
                    for k in 0..nphi {
                        let ph = tp * k as f64 / nphi as f64;
                        out.push((vec![rho * ph.cos(), rho * ph.sin(), *z], wz * tp / nphi as f64));
                    }
                }
                out
            }
        };
        let pts = sphere.into_iter().map(|(u, w)| (map(&u), w)).collect();
        Ok(Ellipsoid { pts, norm: 1.0 / (2.0 * std::f64::consts::PI.powf(m as f64 / 2.0)) })
    }

    fn h(&self, g: &GenFn64, s: Complex64) -> Result<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in &self.pts {
            let arg: Vec<Complex64> = x.iter().map(|xv| i * s * xv).collect();
            acc += g.eval(&arg)? * w;
        }
        Ok(acc * self.norm)
    }
}

/// Radius in s = sqrt(z) below which G(i x s) has no pole for x on the ellipsoid.
fn pole_free_radius(ctx: &Context, g: &GenFn64) -> f64 {
    let m = ctx.rank();
    let mut best = f64::INFINITY;
    for v in 0..m {
        if ctx.delta[v] >= 3 {
            let xmax = (-crate::precision::jet::rat_to_float(&ctx.lat.binv[v][v], 53).to_f64()).sqrt();
            best = best.min(g.pole_angle() / xmax);
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct BorelEval {
    pub z: f64,
    pub value: Complex64,
    /// |difference| between the quadrature at `nodes` and at half as many nodes.
    pub error_estimate: f64,
}

/// B_r(z) for real z > 0.
pub fn borel_transform(z: f64, ctx: &Context, nodes: usize) -> Result<BorelEval> {
    if !(z > 0.0) {
        return Err(Error::Precondition("z must be positive".into()));
    }
    let g = GenFn64::new(ctx);
    let s = z.sqrt();
    if s >= pole_free_radius(ctx, &g) {
        return Err(Error::Pole(format!("z = {z} reaches the pole divisor on the ellipsoid")));
    }
    let m = ctx.rank() as f64;
    let fine = Ellipsoid::new(ctx, nodes.max(4))?;
    let coarse = Ellipsoid::new(ctx, (nodes / 2).max(2))?;
    let hf = fine.h(&g, Complex64::new(s, 0.0))?;
    let hc = coarse.h(&g, Complex64::new(s, 0.0))?;
    let pw = z.powf(m / 2.0 - 1.0);
    Ok(BorelEval { z, value: hf * pw, error_estimate: (hf - hc).norm() * pw })
}

/// Taylor coefficients of z^{1-|V|/2} B_r(z) = h(sqrt z) = sum_n a_n z^{n/2},
/// read off by FFT of h on a circle |s| = radius.
#[derive(Clone, Debug)]
pub struct BorelCoefficients {
    pub radius: f64,
    /// a_{2l}, the integer-power coefficients c_l.
    pub even: Vec<Complex64>,
    /// a_{2l+1}, the half-power coefficients.
    pub odd: Vec<Complex64>,
}

pub fn borel_coefficients(ctx: &Context, count: usize, samples: usize, nodes: usize) -> Result<BorelCoefficients> {
    let g = GenFn64::new(ctx);
    let radius = (0.5 * pole_free_radius(ctx, &g)).min(1.0);
    let ell = Ellipsoid::new(ctx, nodes)?;
    let n = samples.max(4 * count + 4);
    let vals = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
            ell.h(&g, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut buf = vals;
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let coeff = |j: usize| buf[j] / (n as f64) / radius.powi(j as i32);
    Ok(BorelCoefficients {
        radius,
        even: (0..count).map(|l| coeff(2 * l)).collect(),
        odd: (0..count).map(|l| coeff(2 * l + 1)).collect(),
    })
}

/// t^{-|V|/2} int_{arg z = theta} e^{-z/t} B_r(z) dz with t = -2 pi i tau, i.e.
/// 2 t^{-|V|/2} int e^{-s^2/t} s^{|V|-1} h(s) ds along arg s = theta/2.
pub fn borel_laplace_resum(theta: f64, tau: Complex64, ctx: &Context, nodes: usize) -> Result<Complex64> {
    if tau.im <= 0.0 {
        return Err(Error::Precondition("Im(tau) must be positive".into()));
    }
    let m = ctx.rank();
    let g = GenFn64::new(ctx);
    let t = Complex64::new(0.0, -2.0 * std::f64::consts::PI) * tau;
    let dir = Complex64::from_polar(1.0, theta);
    let kappa = (dir / t).re;
    if !(kappa > 0.0) {
        return Err(Error::Precondition(format!("Laplace kernel does not decay along theta = {theta}")));
    }
    let half = Complex64::from_polar(1.0, theta / 2.0);
    let on_real_axis = (half.im).abs() < 1e-12;
    if on_real_axis && ctx.delta.iter().any(|&d| d >= 3) {
        return Err(Error::Pole(format!("ray theta = {theta} runs through singularities of B_r")));
    }
    // |G(i x s)| grows at most like exp(2 |Im s| sum_v |x_v|)
    let xsum: f64 = (0..m)
        .map(|v| (-crate::precision::jet::rat_to_float(&ctx.lat.binv[v][v], 53).to_f64()).sqrt())
        .sum();
    let grow = 2.0 * xsum * half.im.abs() * 3.0;
    let rho_max = (grow + (grow * grow + 4.0 * kappa * 60.0).sqrt()) / (2.0 * kappa);
    let panel = (0.5 / kappa.sqrt()).min(0.25);
    let rule = composite_gl(0.0, rho_max, (rho_max / panel).ceil() as usize, 16);
    let ell = Ellipsoid::new(ctx, nodes)?;
    let sum = rule
        .par_iter()
        .map(|&(rho, w)| {
            let s = half * rho;
            Ok((-(s * s) / t).exp() * s.powi(m as i32 - 1) * ell.h(&g, s)? * w)
        })
;
    let sum = ordered_sum(sum, || Ok(Complex64::new(0.0, 0.0)), |a: Result<Complex64>, b| Ok(a? + b?))?;
    Ok(sum * half * 2.0 / t.powf(m as f64 / 2.0))
}
