//! The averaged radial function
//!
//! ```text
//! Zhat_r(tau) = e(-Delta tau) sum_s z_r(omega, s) Zhat(M, s; e(tau + 1/r)),
//! ```
//!
//! the nu-series Zhat^nu(tau) = sum_l G^nu_l e(tau Q_nu^{-1}(l)/4), and the
//! identities linking them.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use rug::Float;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::model::{canon_spinc, SignVector, SpincStructure};
use crate::precision::{e_rat, ordered_sum, pi, ComplexAP};
use crate::qseries::{f_product, order_for_tol, qseries_eval_shifted, support_box, zhat_qseries, QSeries, TailData};
use crate::Rat;

/// True iff l = delta mod 2 and l_v >= deg v - 2.
pub fn in_index_cone(l: &[i64], delta: &[i64]) -> bool {
    l.iter().zip(delta).all(|(&x, &d)| (x - d).rem_euclid(2) == 0 && x >= d - 2)
}

/// G^nu_l = lambda c_nu F_l C^nu_l, or zero (with `in_cone = false`) outside the cone.
#[derive(Clone, Debug)]
pub struct NuCoeff {
    pub value: ComplexAP,
    pub in_cone: bool,
}

pub fn g_nu_coeff(nu: &SignVector, l: &[i64], ctx: &Context) -> NuCoeff {
    let p = ctx.prec;
    if !in_index_cone(l, &ctx.delta) {
        return NuCoeff { value: ComplexAP::zero(p), in_cone: false };
    }
    let f = f_product(&ctx.delta, l);
    if f == 0 {
        return NuCoeff { value: ComplexAP::zero(p), in_cone: true };
    }
    let c = ctx.coset.gauss_sum(&nu.apply(l));
    let k = f * nu.c_nu(&ctx.delta) as i128;
    let v = (&c * &ctx.lambda.with_prec(p + 16)).scale(&Float::with_val(p + 16, k));
    NuCoeff { value: v.with_prec(p), in_cone: true }
}

fn two_pi_i(wp: u32) -> ComplexAP {
    ComplexAP::from_real(Float::with_val(wp, pi(wp) * 2u32)).mul_i()
}

fn im_tau(tau: &ComplexAP) -> Result<f64> {
    let im = tau.im.to_f64();
    if im > 0.0 {
        Ok(im)
    } else {
        Err(Error::Precondition("Im(tau) must be positive".into()))
    }
}

/// Cap on the truncation radius R = Q^{-1} bound.
pub const RADIUS_CAP: f64 = 1.0e6;

/// Zhat^nu(tau) with its certified tail bound.
pub fn z_nu_eval(nu: &SignVector, tau: &ComplexAP, tol: f64, ctx: &Context) -> Result<(ComplexAP, f64)> {
    let im = im_tau(tau)?;
    let tail = TailData::new(&ctx.graph, &ctx.lat);
    let c = std::f64::consts::PI * im / 2.0;
    let env = ctx.lambda.abs_f64() * (ctx.coset.points.len() as f64);
    let radius = tail.radius_for(c, env, tol);
    if radius > RADIUS_CAP {
        return Err(Error::ToleranceUnreachable { tol, reason: format!("needs radius {radius:.3e} > {RADIUS_CAP:e}") });
    }
    let radius = radius.ceil();
    let bound = env * tail.gaussian_tail(c, radius);
    let rq = Rat::from_integer(radius as i128);
    let wp = ctx.prec + 16;
    let tpt = &two_pi_i(wp) * &tau.with_prec(wp);
    let pts: Vec<Vec<i64>> = support_box(&ctx.graph, &ctx.lat, radius + 1e-9)
        .into_iter()
        .filter(|l| in_index_cone(l, &ctx.delta))
        .collect();
    let sum = pts
        .par_iter()
        .map(|l| {
            let q = ctx.lat.q_inv_nu(nu, l);
            if q > rq {
                return None;
            }
            let g = g_nu_coeff(nu, l, ctx).value.with_prec(wp);
            let qf = Float::with_val(wp, q.numer()) / Float::with_val(wp, q.denom()) / 4u32;
            Some(&g * &tpt.scale(&qf).exp())
        });
    let sum = ordered_sum(sum, || None, |a, b| match (a, b) {
        (Some(a), Some(b)) => Some(&a + &b),
        (a, None) => a,
        (None, b) => b,
    })
    .unwrap_or_else(|| ComplexAP::zero(wp));
    Ok((sum.with_prec(ctx.prec), bound))
}

#[derive(Clone, Debug)]
pub struct RadialEval {
    pub tau: ComplexAP,
    pub value: ComplexAP,
    pub tail_bound: f64,
    /// Truncation order E of the q-series (radius R = 4(E - Delta)).
    pub order: Rat,
}

/// Cached Zhat(s) for every Spin^c structure up to a common order.
#[derive(Clone, Debug)]
pub struct RadialSeries {
    pub order: Rat,
    pub series: Vec<(SpincStructure, QSeries, ComplexAP)>,
}

impl RadialSeries {
    pub fn new(ctx: &Context, order: &Rat) -> Result<Self> {
        let series = ctx
            .zr
            .entries
            .par_iter()
            .map(|(s, z)| Ok((s.clone(), zhat_qseries(&ctx.graph, &ctx.lat, s, order)?, z.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialSeries { order: *order, series })
    }

    /// Order needed for a tail bound <= tol at Im(tau) = im.
    pub fn order_for(ctx: &Context, im: f64, tol: f64) -> Rat {
        let zmax = ctx.zr.entries.iter().map(|(_, z)| z.abs_f64()).fold(0.0, f64::max);
        let d = ctx.delta_exponent();
        // undo the |q^Delta| factor that e(-Delta tau) removes again
        let undo = (2.0 * std::f64::consts::PI * im * d.to_f64().unwrap_or(0.0)).exp();
        order_for_tol(&TailData::new(&ctx.graph, &ctx.lat), &d, im, zmax.max(1e-300) * undo, tol / 2.0)
    }

    pub fn eval(&self, tau: &ComplexAP, tol: f64, ctx: &Context) -> Result<RadialEval> {
        let im = im_tau(tau)?;
        let wp = ctx.prec + 16;
        let shift = Rat::new(1, ctx.r() as i128);
        let tw = tau.with_prec(wp);
        let mut acc = ComplexAP::zero(wp);
        // each tail bound covers all omitted w, and the w for distinct s are
        // disjoint, so the total is at most max |z_r| times one bound
        let mut bound = 0f64;
        for (_, z, zr) in &self.series {
            let (v, b) = qseries_eval_shifted(z, &tw, &shift, f64::INFINITY)?;
            acc += &(&v * &zr.with_prec(wp));
            bound = bound.max(b * zr.abs_f64());
        }
        // e(-Delta tau)
        let d = ctx.delta_exponent();
        let df = Float::with_val(wp, d.numer()) / Float::with_val(wp, d.denom());
        let pref = (&two_pi_i(wp) * &tw).scale(&-df).exp();
        let bound = bound * pref.abs_f64();
        if !(bound <= tol) {
            return Err(Error::ToleranceUnreachable { tol, reason: format!("tail bound {bound:e} at order {}", self.order) });
        }
        let _ = im;
        Ok(RadialEval { tau: tau.clone(), value: (&acc * &pref).with_prec(ctx.prec), tail_bound: bound, order: self.order })
    }
}

/// Zhat_r(M, omega; tau) with tail bound <= tol.
pub fn radial_eval(tau: &ComplexAP, tol: f64, ctx: &Context) -> Result<RadialEval> {
    let im = im_tau(tau)?;
    let order = RadialSeries::order_for(ctx, im, tol);
    RadialSeries::new(ctx, &order)?.eval(tau, tol, ctx)
}

#[derive(Clone, Debug)]
pub struct CentralReport {
    pub tau: ComplexAP,
    pub radial: ComplexAP,
    pub nu_average: ComplexAP,
    pub diff: f64,
    pub bound: f64,
    pub pass: bool,
}

/// |Zhat_r(tau) - 2^{-|V|} sum_nu Zhat^nu(tau)| against the combined tail bounds.
pub fn central_identity_check(tau: &ComplexAP, tol: f64, ctx: &Context) -> Result<CentralReport> {
    let n = ctx.rank();
    let rad = radial_eval(tau, tol, ctx)?;
    let nus = SignVector::all(n);
    let mut acc = ComplexAP::zero(ctx.prec);
    let mut nb = 0.0;
    for nu in &nus {
        let (v, b) = z_nu_eval(nu, tau, tol, ctx)?;
        acc += &v;
        nb += b;
    }
    let inv = Float::with_val(ctx.prec, 1u64 << n).recip();
    let avg = acc.scale(&inv);
    let diff = (&rad.value - &avg).abs_f64();
    let scale = rad.value.abs_f64().max(avg.abs_f64()).max(1.0);
    let floor = scale * 2f64.powi(-(ctx.prec as i32) + 40);
    let bound = rad.tail_bound + nb / (1u64 << n) as f64 + floor;
    Ok(CentralReport { tau: tau.clone(), radial: rad.value, nu_average: avg, diff, bound, pass: diff <= bound })
}

#[derive(Clone, Debug)]
pub struct CoefficientReport {
    pub lhs: ComplexAP,
    pub rhs: ComplexAP,
    pub diff: f64,
}

/// G^nu_l against e(Delta/r) z_r(s(I_nu l)) e(Q_nu^{-1}(l)/(4r)) c_nu F_l.
pub fn coefficient_identity_check(nu: &SignVector, l: &[i64], ctx: &Context) -> Result<CoefficientReport> {
    let lhs = g_nu_coeff(nu, l, ctx).value;
    let p = ctx.prec;
    let f = f_product(&ctx.delta, l);
    let rhs = if f == 0 || !in_index_cone(l, &ctx.delta) {
        ComplexAP::zero(p)
    } else {
        let s = canon_spinc(&ctx.lat, &ctx.delta, &nu.apply(l))?;
        let z = ctx.zr.get(&s).ok_or_else(|| Error::Internal(format!("no z_r for {:?}", s.rep)))?;
        let r = Rat::from_integer(ctx.r() as i128);
        let ph = ctx.delta_exponent() / r + ctx.lat.q_inv_nu(nu, l) / (Rat::from_integer(4) * r);
        let k = f * nu.c_nu(&ctx.delta) as i128;
        (&e_rat(&ph, p + 16) * &z.with_prec(p + 16)).scale(&Float::with_val(p + 16, k)).with_prec(p)
    };
    let diff = (&lhs - &rhs).abs_f64();
    Ok(CoefficientReport { lhs, rhs, diff })
}

/// Cone points with Q_nu^{-1}(l) <= radius for every nu (the same set for all nu
/// up to the sign action, enumerated once).
pub fn cone_points(ctx: &Context, radius: &Rat) -> Vec<Vec<i64>> {
    let rf = radius.to_f64().unwrap_or(0.0) + 1e-9;
    support_box(&ctx.graph, &ctx.lat, rf)
        .into_iter()
        .filter(|l| in_index_cone(l, &ctx.delta))
        .filter(|l| SignVector::all(ctx.rank()).iter().any(|nu| ctx.lat.q_inv_nu(nu, l) <= *radius))
        .collect()
}

/// Worst coefficient-identity difference over all nu and cone points with
/// Q_nu^{-1}(l) <= radius; also returns the number of (nu, l) pairs checked.
pub fn coefficient_identity_sweep(ctx: &Context, radius: &Rat) -> Result<(f64, usize)> {
    let pts = cone_points(ctx, radius);
    let nus = SignVector::all(ctx.rank());
    let pairs: Vec<(SignVector, Vec<i64>)> = nus
        .iter()
        .flat_map(|nu| pts.iter().filter(|l| ctx.lat.q_inv_nu(nu, l) <= *radius).map(move |l| (nu.clone(), l.clone())))
        .collect();
    let worst = pairs
        .par_iter()
        .map(|(nu, l)| coefficient_identity_check(nu, l, ctx).map(|r| r.diff))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst, pairs.len()))
}
