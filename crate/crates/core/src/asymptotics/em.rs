//! Two self-tests behind the asymptotic routes: the Euler-Maclaurin type
//! expansion of sum_l F(l) f(t(l + alpha)) and the complex Gaussian integral.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::contour::RANK_CAP;
use super::log_slope;
use super::quad::composite_gl;
use crate::error::{Error, Result};
use crate::Rat;

/// F(l) = P(l) if l = residue mod modulus, else 0.
#[derive(Clone, Debug)]
pub struct ProgressionTerm {
    /// Coefficients of P, ascending powers.
    pub poly: Vec<Rat>,
    pub modulus: u32,
    pub residue: u32,
}

/// Sums of polynomial-times-progression terms, restricted to l >= 0.
#[derive(Clone, Debug)]
pub struct CoefficientRule {
    pub terms: Vec<ProgressionTerm>,
}

impl CoefficientRule {
    /// F = indicator of Z_{>=0}.
    pub fn indicator() -> Self {
        Self::progression(1, 0)
    }

    pub fn progression(modulus: u32, residue: u32) -> Self {
        CoefficientRule { terms: vec![ProgressionTerm { poly: vec![Rat::from_integer(1)], modulus, residue }] }
    }

    pub fn eval(&self, l: u64) -> Rat {
        let mut s = Rat::from_integer(0);
        for t in &self.terms {
            if l % t.modulus as u64 == t.residue as u64 {
                let x = Rat::from_integer(l as i128);
                let mut p = Rat::from_integer(0);
                for c in t.poly.iter().rev() {
                    p = p * x + c;
                }
                s += p;
            }
        }
        s
    }

    fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Precondition("empty coefficient rule".into()));
        }
        for t in &self.terms {
            if t.modulus == 0 || t.residue >= t.modulus {
                return Err(Error::Precondition(format!("bad progression {} mod {}", t.residue, t.modulus)));
            }
        }
        Ok(())
    }
}

fn rq(q: &Rat) -> Rational {
    Rational::from((Integer::from(*q.numer()), Integer::from(*q.denom())))
}

/// Bernoulli numbers B_0..=B_n with B_1 = -1/2.
fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        let mut s = Rational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate() {
            // binom = C(m + 1, j)
            s += Rational::from(&binom * bj);
            binom *= (m + 1 - j) as u32;
            binom /= (j + 1) as u32;
        }
        b.push(-s / Rational::from(m as u32 + 1));
    }
    b
}

type Laurent = BTreeMap<i64, Rational>;

/// Laurent coefficients of e^{beta x} / (1 - e^{k x}) from x^{-1} through x^{hi}.
fn progression_kernel(beta: &Rational, k: u32, hi: i64) -> Laurent {
    let n = (hi + 1) as usize;
    let bern = bernoulli(n);
    let mut out = Laurent::new();
    let kq = Rational::from(k);
    for total in 0..=n {
        let mut c = Rational::new();
        let mut fi = Integer::from(1);
        for i in 0..=total {
            if i > 0 {
                fi *= i as u32;
            }
            let j = total - i;
            let mut fj = Integer::from(1);
            for q in 2..=j {
                fj *= q as u32;
            }
            let ki = kq.clone().pow(i as i32);
            let bj = beta.clone().pow(j as i32);
            c += Rational::from(&bern[i] * &ki) * bj / Rational::from(&fi * &fj);
        }
        out.insert(total as i64 - 1, -c / kq.clone());
    }
    out
}

fn laurent_shifted_derivative(s: &Laurent, alpha: &Rational) -> Laurent {
    // (d/dx - alpha) s
    let mut out = Laurent::new();
    for (&e, c) in s {
        if e != 0 {
            *out.entry(e - 1).or_default() += Rational::from(c * e);
        }
        *out.entry(e).or_default() -= Rational::from(c * alpha);
    }
    out
}

/// Laurent expansion of phi(x) = sum_{l >= 0} F(l) e^{(l + alpha) x} at x = 0, valid through x^{hi}.
fn rule_laurent(rule: &CoefficientRule, alpha: &Rational, hi: i64) -> Laurent {
    let mut total = Laurent::new();
    for t in &rule.terms {
        let beta = Rational::from(t.residue) + alpha;
        let deg = t.poly.len() as i64;
        let base = progression_kernel(&beta, t.modulus, hi + deg);
        let mut pow = base;
        for (j, c) in t.poly.iter().enumerate() {
            if j > 0 {
                pow = laurent_shifted_derivative(&pow, alpha);
            }
            let cq = rq(c);
            for (&e, v) in &pow {
                if e <= hi {
                    *total.entry(e).or_default() += Rational::from(v * &cq);
                }
            }
        }
    }
    total.retain(|_, v| *v != 0);
    total
}

/// n-th derivative at 0 of f(x) = e^{-c x^2}; negative n are the iterated
/// integrals f^{(-p)}(0) = (-1)^p / (p-1)! int_0^inf x^{p-1} f.
fn gauss_derivative(n: i64, c: &Float) -> Float {
    let p = c.prec();
    if n >= 0 {
        if n % 2 == 1 {
            return Float::with_val(p, 0);
        }
        let j = (n / 2) as u32;
        let mut v = Float::with_val(p, -c.clone()).pow(j);
        for k in (j + 1)..=(2 * j) {
            v *= k;
        }
        v
    } else {
        let q = (-n) as u32;
        let half = Float::with_val(p, q) / 2u32;
        let mut v = half.clone().gamma() / (Float::with_val(p, c.clone()).pow(half) * 2u32);
        for k in 2..q {
            v /= k;
        }
        if q % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

#[derive(Clone, Debug)]
pub struct EmReport {
    pub order: u32,
    pub ts: Vec<f64>,
    pub remainders: Vec<f64>,
    pub slope: f64,
    /// Rounding floor of the direct sums.
    pub floor: f64,
    /// Every remainder is at the rounding floor (the expansion is exact to all orders).
    pub at_floor: bool,
    pub pass: bool,
}

/// Compares sum_{l >= 0} F(l) e^{-c t^2 (l + alpha)^2} with the partial sums
/// sum_{n} b_n f^{(n)}(0) t^n (all negative n, then 0 <= n <= L) on the grid.
pub fn euler_maclaurin_check(
    rule: &CoefficientRule,
    alpha: Rat,
    c: f64,
    orders: &[u32],
    ts: &[f64],
    prec: u32,
) -> Result<Vec<EmReport>> {
    rule.validate()?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Precondition(format!("test Gaussian e^(-c x^2) needs c > 0, got {c}")));
    }
    if alpha < Rat::from_integer(0) {
        return Err(Error::Precondition("alpha must be >= 0".into()));
    }
    if ts.len() < 2 || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Precondition("need at least two positive grid points".into()));
    }
    let wp = prec + 32;
    let cf = Float::with_val(wp, c);
    let aq = rq(&alpha);
    let af = Float::with_val(wp, &aq);
    let hi = orders.iter().copied().max().unwrap_or(0) as i64;
    let lau = rule_laurent(rule, &aq, hi);
    let pdeg = rule.terms.iter().map(|t| t.poly.len()).max().unwrap_or(1) as f64;

    let mut direct = Vec::with_capacity(ts.len());
    for &t in ts {
        let tf = Float::with_val(wp, t);
        let ct2 = Float::with_val(wp, &cf * &tf) * &tf;
        let mut s = Float::with_val(wp, 0);
        let mut l: u64 = 0;
        loop {
            let x = Float::with_val(wp, &af + l);
            let e = Float::with_val(wp, &ct2 * &x) * &x;
            let fl = rule.eval(l);
            if fl != Rat::from_integer(0) {
                let term = (-e.clone()).exp() * crate::precision::jet::rat_to_float(&fl, wp);
                s += term;
            }
            let lim = (wp as f64) * std::f64::consts::LN_2 + pdeg * ((l + 2) as f64).ln() + 10.0;
            if e.to_f64() > lim {
                break;
            }
            l += 1;
        }
        direct.push(s);
    }
    let scale = direct.iter().map(|s| s.to_f64().abs()).fold(0.0, f64::max).max(1.0);
    let floor = scale * 2f64.powi(-(prec as i32) + 8);

    Ok(orders
        .iter()
        .map(|&order| {
            let rem: Vec<f64> = ts
                .iter()
                .zip(&direct)
                .map(|(&t, s)| {
                    let tf = Float::with_val(wp, t);
                    let mut approx = Float::with_val(wp, 0);
                    for (&e, b) in &lau {
                        if e > order as i64 {
                            continue;
                        }
                        let term = Float::with_val(wp, b) * gauss_derivative(e, &cf) * tf.clone().pow(e as i32);
                        approx += term;
                    }
                    Float::with_val(wp, s - &approx).abs().to_f64()
                })
                .collect();
            let at_floor = rem.iter().all(|&r| r <= floor);
            let clipped: Vec<f64> = rem.iter().map(|&r| r.max(floor)).collect();
            let slope = log_slope(ts, &clipped);
            let pass = at_floor || slope >= order as f64 + 1.0 - 0.3;
            EmReport { order, ts: ts.to_vec(), remainders: rem, slope, floor, at_floor, pass }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct GaussianReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub diff: f64,
    pub pass: bool,
}

/// int_{R^m} exp(i/2 x^T B' x + i w^T x) dx against
/// sqrt((2 pi i)^m / det B') exp(-i/2 w^T B'^{-1} w), with the square root
/// continued along (1 - s) I + s (-i B' / 2 pi) from 1 at s = 0.
pub fn gaussian_selftest(bp: &[Vec<Complex64>], w: &[Complex64], order: usize) -> Result<GaussianReport> {
    let m = bp.len();
    if m == 0 || w.len() != m || bp.iter().any(|r| r.len() != m) {
        return Err(Error::Precondition("B' must be square and match w".into()));
    }
    if m > RANK_CAP {
        return Err(Error::RankCap { rank: m, cap: RANK_CAP });
    }
    for i in 0..m {
        for j in 0..m {
            if (bp[i][j] - bp[j][i]).norm() > 1e-14 * (1.0 + bp[i][j].norm()) {
                return Err(Error::Precondition("B' must be symmetric".into()));
            }
        }
    }
    let im = DMatrix::from_fn(m, m, |i, j| bp[i][j].im);
    let eig = nalgebra::SymmetricEigen::new(im);
    let lmin = eig.eigenvalues.min();
    if !(lmin > 0.0) {
        return Err(Error::Precondition("Im(B') is not positive definite".into()));
    }
    let bmat = DMatrix::from_fn(m, m, |i, j| bp[i][j]);
    let wv = nalgebra::DVector::from_vec(w.to_vec());
    let binv = bmat.clone().try_inverse().ok_or(Error::Singular)?;

    // sqrt(det A), A = -i B' / (2 pi), continued from A = I
    let a = bmat.map(|z| z * Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI)));
    let steps = 2000;
    let mut root = Complex64::new(1.0, 0.0);
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        let p = DMatrix::<Complex64>::identity(m, m).map(|z| z * (1.0 - s)) + a.map(|z| z * s);
        let d = p.determinant().sqrt();
        root = if (d - root).norm() <= (d + root).norm() { d } else { -d };
    }
    let quad = (wv.transpose() * &binv * &wv)[(0, 0)];
    let rhs = (Complex64::new(0.0, -0.5) * quad).exp() / root;

    // box from the damping exp(-x^T Im(B') x / 2 - Im(w)^T x)
    let wim = w.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
    let cut = 40.0;
    let half = (wim + (wim * wim + 2.0 * lmin * cut).sqrt()) / lmin;
    let bmax = bp.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let wmax = w.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let h = (0.5 / bmax.sqrt()).min(0.5).min(if wmax > 0.0 { 1.0 / wmax } else { 1.0 });
    let rule = composite_gl(-half, half, (2.0 * half / h).ceil() as usize, order.max(4));
    let n = rule.len();
    let mut lhs = Complex64::new(0.0, 0.0);
    for mut idx in 0..n.pow(m as u32) {
        let mut x = Vec::with_capacity(m);
        let mut wt = 1.0;
        for _ in 0..m {
            let (u, wu) = rule[idx % n];
            idx /= n;
            x.push(u);
            wt *= wu;
        }
        let mut e = Complex64::new(0.0, 0.0);
        for i in 0..m {
            e += w[i] * x[i];
            for j in 0..m {
                e += bp[i][j] * (0.5 * x[i] * x[j]);
            }
        }
        lhs += (Complex64::new(0.0, 1.0) * e).exp() * wt;
    }
    let diff = (lhs - rhs).norm();
    Ok(GaussianReport { lhs, rhs, diff, pass: diff <= 1e-10 * rhs.norm().max(1.0) })
}
