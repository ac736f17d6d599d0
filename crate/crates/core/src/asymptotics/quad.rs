//! Gauss-Legendre rules and a double-precision evaluator of G for the
//! quadrature routes.

use num_complex::Complex64;

use crate::context::Context;
use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` panels of `order` nodes.
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in xs.iter().zip(&ws) {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// G(x) = lambda sum_alpha e(alpha^T B alpha / r) prod_v F_v(e(alpha_v/r) e^{x_v}) in f64.
#[derive(Clone, Debug)]
pub struct GenFn64 {
    pub lambda: Complex64,
    pub degrees: Vec<i64>,
    /// (e(alpha^T B alpha / r), [e(alpha_v / r)]_v) per coset point.
    pub points: Vec<(Complex64, Vec<Complex64>)>,
}

impl GenFn64 {
    pub fn new(ctx: &Context) -> Self {
        let points = ctx
            .coset
            .points
            .iter()
            .map(|pt| {
                let q = ctx.coset.quad_phase(pt).to_c64();
                let z = (0..ctx.rank()).map(|v| ctx.coset.zeta(pt, v).to_c64()).collect();
                (q, z)
            })
            .collect();
        GenFn64 { lambda: ctx.lambda.to_c64(), degrees: ctx.delta.clone(), points }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn eval(&self, x: &[Complex64]) -> Result<Complex64> {
        let ex: Vec<Complex64> = x.iter().map(|v| v.exp()).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (q, zs) in &self.points {
            let mut t = *q;
            for ((z, e), &d) in zs.iter().zip(&ex).zip(&self.degrees) {
                let y = z * e;
                let f = y - 1.0 / y;
                if d >= 3 && f.norm() < 1e-12 {
                    return Err(Error::Pole(format!("F_v pole at y = {y}")));
                }
                t *= f.powi((2 - d) as i32);
            }
            acc += t;
        }
        Ok(acc * self.lambda)
    }

    /// Least distance from the points e(alpha_v/r) to {+1, -1} over deg >= 3
    /// vertices, measured as an angle in [0, pi/2]; pi/2 when there is no such vertex.
    pub fn pole_angle(&self) -> f64 {
        let mut best = std::f64::consts::FRAC_PI_2;
        for (_, zs) in &self.points {
            for (z, &d) in zs.iter().zip(&self.degrees) {
                if d >= 3 {
                    let a = z.arg().rem_euclid(std::f64::consts::PI);
                    best = best.min(a).min(std::f64::consts::PI - a);
                }
            }
        }
        best
    }

    /// Least distance |e(alpha_v/r) -/+ 1| over deg >= 3 vertices (2 if none).
    pub fn pole_distance(&self) -> f64 {
        let mut best: f64 = 2.0;
        for (_, zs) in &self.points {
            for (z, &d) in zs.iter().zip(&self.degrees) {
                if d >= 3 {
                    best = best.min((z - 1.0).norm()).min((z + 1.0).norm());
                }
            }
        }
        best
    }
}
