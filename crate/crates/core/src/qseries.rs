//! GPPV q-series Zhat(M, s; q) by the nu-averaged Laurent extraction
//!
//! ```text
//! Zhat(s) = 2^{-|V|} sum_nu sum_{w : -I_nu w in s + 2BZ^V} c_nu F_w q^{Delta + Q_nu^{-1}(w)/4}
//! ```
//!
//! and its evaluation with a Gaussian tail bound.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rug::Float;

use crate::context::delta_exponent;
use crate::error::{Error, Result};
use crate::model::{canon_spinc, LatticeModel, PlumbingGraph, SignVector, SpincStructure};
use crate::precision::{e_rat, pi, ComplexAP};
use crate::Rat;

fn binom(n: i64, k: i64) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Coefficient of x^{nu n} in F(x) = (x - 1/x)^{2 - deg} expanded in |x^nu| < 1.
pub fn f_vertex_coeff(deg: i64, n: i64, nu: i8) -> i128 {
    let plus = match deg {
        0 => match n {
            -2 | 2 => 1,
            0 => -2,
            _ => 0,
        },
        1 => match n {
            1 => 1,
            -1 => -1,
            _ => 0,
        },
        2 => i128::from(n == 0),
        _ => {
            let m = deg - 2;
            if n < m || (n - m) % 2 != 0 {
                0
            } else {
                let j = (n - m) / 2;
                let c = binom(m - 1 + j, m - 1);
                if m % 2 == 0 {
                    c
                } else {
                    -c
                }
            }
        }
    };
    if nu < 0 && deg % 2 != 0 {
        -plus
    } else {
        plus
    }
}

/// F_l = prod_v f(deg v, l_v, +1).
pub fn f_product(degrees: &[i64], l: &[i64]) -> i128 {
    let mut acc: i128 = 1;
    for (&d, &n) in degrees.iter().zip(l) {
        acc *= f_vertex_coeff(d, n, 1);
        if acc == 0 {
            break;
        }
    }
    acc
}

/// Indices n with f(deg, n, +1) != 0 and |n| <= bound, ascending.
pub fn f_support(deg: i64, bound: i64) -> Vec<i64> {
    let raw: Vec<i64> = match deg {
        0 => vec![-2, 0, 2],
        1 => vec![-1, 1],
        2 => vec![0],
        _ => (deg - 2..=bound.max(deg - 2)).step_by(2).collect(),
    };
    raw.into_iter().filter(|n| n.abs() <= bound).collect()
}

/// Data for the Gaussian tail bound: vertex degrees and a lower bound mu on
/// the least eigenvalue of -B^{-1}.
#[derive(Clone, Debug, PartialEq)]
pub struct TailData {
    pub degrees: Vec<i64>,
    pub mu: f64,
}

impl TailData {
    pub fn new(g: &PlumbingGraph, lat: &LatticeModel) -> Self {
        TailData { degrees: g.degrees(), mu: lat.lambda_min_neg_binv() * (1.0 - 1e-10) }
    }

    /// prod_v sum_n |f_v(n)| e^{-a n^2}.
    pub fn weighted_mass(&self, a: f64) -> f64 {
        self.degrees.iter().map(|&d| vertex_mass(d, a)).product()
    }

    /// Upper bound on sum_{w : Q^{-1}(w) > radius} |F_w| e^{-c Q^{-1}(w)}, c > 0.
    pub fn gaussian_tail(&self, c: f64, radius: f64) -> f64 {
        (-c * radius / 2.0).exp() * self.weighted_mass(c * self.mu / 2.0)
    }

    /// Smallest radius with `gaussian_tail(c, radius) * scale <= tol`.
    pub fn radius_for(&self, c: f64, scale: f64, tol: f64) -> f64 {
        let m = self.weighted_mass(c * self.mu / 2.0) * scale;
        if m <= tol {
            0.0
        } else {
            2.0 * (m / tol).ln() / c
        }
    }
}

fn vertex_mass(deg: i64, a: f64) -> f64 {
    if deg <= 2 {
        return f_support(deg, 2).iter().map(|&n| (f_vertex_coeff(deg, n, 1) as f64).abs() * (-a * (n * n) as f64).exp()).sum();
    }
    let m = deg - 2;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut j = 0i64;
    loop {
        let n = m + 2 * j;
        let c = binom_f64(m - 1 + j, m - 1);
        let t = c * (-a * (n as f64) * (n as f64)).exp();
        sum += t;
        // past the peak with ratio below 1/2: the rest is at most t
        if t < prev / 2.0 && t < 1e-20 * sum {
            return sum + t;
        }
        if j > 50_000_000 {
            return f64::INFINITY;
        }
        prev = t;
        j += 1;
    }
}

fn binom_f64(n: i64, k: i64) -> f64 {
    let mut acc = 1f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Support points l (F_l != 0) in the box |l_v| <= sqrt(radius |B_vv|) that
/// contains the ellipsoid {Q^{-1}(l) <= radius}.
pub fn support_box(g: &PlumbingGraph, lat: &LatticeModel, radius: f64) -> Vec<Vec<i64>> {
    let degs = g.degrees();
    let lists: Vec<Vec<i64>> = (0..g.len())
        .map(|v| {
            let b = (radius.max(0.0) * lat.b[v][v].unsigned_abs() as f64).sqrt().floor() as i64;
            f_support(degs[v], b)
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(lists.len());
    fn rec(lists: &[Vec<i64>], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == lists.len() {
            out.push(cur.clone());
            return;
        }
        for &x in &lists[cur.len()] {
            cur.push(x);
            rec(lists, cur, out);
            cur.pop();
        }
    }
    rec(&lists, &mut cur, &mut out);
    out
}

/// Sparse q-series with exact rational exponents and coefficients. All
/// terms with exponent <= `truncation` are present.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    pub terms: BTreeMap<Rat, Rat>,
    pub truncation: Rat,
    pub delta: Rat,
    pub tail: Option<TailData>,
}

impl QSeries {
    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Rat::zero(), c);
        }
        QSeries { terms, truncation: Rat::from_integer(i128::MAX / 4), delta: Rat::zero(), tail: None }
    }

    pub fn monomial(exponent: Rat, c: Rat) -> Self {
        let mut s = QSeries::constant(Rat::zero());
        if !c.is_zero() {
            s.terms.insert(exponent, c);
        }
        s
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Terms with exponent <= e.
    pub fn truncate(&self, e: &Rat) -> QSeries {
        QSeries {
            terms: self.terms.iter().filter(|(k, _)| *k <= e).map(|(k, v)| (*k, *v)).collect(),
            truncation: self.truncation.min(*e),
            delta: self.delta,
            tail: self.tail.clone(),
        }
    }

    /// Upper bound on the omitted terms at |q| = e^{-2 pi im_tau}.
    pub fn tail_bound(&self, im_tau: f64) -> f64 {
        match &self.tail {
            None => 0.0,
            Some(t) => {
                let c = std::f64::consts::PI * im_tau / 2.0;
                let radius = 4.0 * (self.truncation - self.delta).to_f64().unwrap_or(0.0);
                let pref = (-2.0 * std::f64::consts::PI * im_tau * self.delta.to_f64().unwrap_or(0.0)).exp();
                pref * t.gaussian_tail(c, radius)
            }
        }
    }
}

/// Zhat(M, s; q) with every term of exponent <= order.
pub fn zhat_qseries(g: &PlumbingGraph, lat: &LatticeModel, spinc: &SpincStructure, order: &Rat) -> Result<QSeries> {
    let delta = delta_exponent(lat);
    if *order < delta {
        return Err(Error::Precondition(format!("order {order} is below Delta = {delta}")));
    }
    let degs = g.degrees();
    let target = canon_spinc(lat, &degs, &spinc.rep)?;
    let radius = (*order - delta) * Rat::from_integer(4);
    let radius_f = radius.to_f64().unwrap_or(f64::INFINITY) + 1e-9;
    let n = g.len();
    let norm = Rat::new(1, 1i128 << n);
    let mut terms: BTreeMap<Rat, Rat> = BTreeMap::new();
    for w in support_box(g, lat, radius_f) {
        let f = f_product(&degs, &w);
        if f == 0 {
            continue;
        }
        for nu in SignVector::all(n) {
            let y = nu.apply(&w);
            let q = -lat.binv_pair(&y, &y);
            if q > radius {
                continue;
            }
            let neg: Vec<i64> = y.iter().map(|x| -x).collect();
            if canon_spinc(lat, &degs, &neg)? != target {
                continue;
            }
            let c = Rat::from_integer(f * nu.c_nu(&degs) as i128) * norm;
            let e = delta + q / Rat::from_integer(4);
            *terms.entry(e).or_insert_with(Rat::zero) += c;
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(QSeries { terms, truncation: *order, delta, tail: Some(TailData::new(g, lat)) })
}

/// Value of sum c_x e(tau x) and the tail bound; errors when the bound exceeds tol.
pub fn qseries_eval(z: &QSeries, tau: &ComplexAP, tol: f64) -> Result<(ComplexAP, f64)> {
    qseries_eval_shifted(z, tau, &Rat::zero(), tol)
}

/// sum c_x e((tau + shift) x), with the rational shift applied exactly.
pub fn qseries_eval_shifted(z: &QSeries, tau: &ComplexAP, shift: &Rat, tol: f64) -> Result<(ComplexAP, f64)> {
    let p = tau.prec();
    let im = tau.im.to_f64();
    if im <= 0.0 {
        return Err(Error::Precondition("Im(tau) must be positive".into()));
    }
    let bound = z.tail_bound(im);
    if !(bound <= tol) {
        return Err(Error::ToleranceUnreachable {
            tol,
            reason: format!("tail bound {bound:e} at order {}; raise the order", z.truncation),
        });
    }
    let wp = p + 16;
    let two_pi_i_tau = ComplexAP::from_real(Float::with_val(wp, pi(wp) * 2u32)).mul_i() * tau.with_prec(wp);
    let mut acc = ComplexAP::zero(wp);
    for (x, c) in &z.terms {
        let xf = Float::with_val(wp, x.numer()) / Float::with_val(wp, x.denom());
        let mut t = two_pi_i_tau.scale(&xf).exp();
        if !shift.is_zero() {
            t = &t * &e_rat(&(shift * x), wp);
        }
        let cf = Float::with_val(wp, c.numer()) / Float::with_val(wp, c.denom());
        acc += &t.scale(&cf);
    }
    Ok((acc.with_prec(p), bound))
}

/// Smallest integer order E with tail bound <= tol at the given Im(tau), times `scale`.
pub fn order_for_tol(tail: &TailData, delta: &Rat, im_tau: f64, scale: f64, tol: f64) -> Rat {
    let c = std::f64::consts::PI * im_tau / 2.0;
    let pref = (-2.0 * std::f64::consts::PI * im_tau * delta.to_f64().unwrap_or(0.0)).exp();
    let radius = tail.radius_for(c, scale * pref, tol);
    let e = delta.to_f64().unwrap_or(0.0) + radius / 4.0;
    let mut out = Rat::from_integer(e.ceil() as i128 + 1);
    if out < *delta {
        out = delta.ceil();
    }
    out
}
