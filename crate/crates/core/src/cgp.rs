//! The CGP invariant Z_r(M, omega) as a colored plumbing-link state sum, the
//! Reidemeister torsion, and the generating function
//!
//! ```text
//! G(x) = lambda * sum_alpha e(-Q(alpha)/r) prod_v F_v(e(alpha_v/r) e^{x_v}),
//! ```
//!
//! summed over alpha in (omega + (r-1)e)/2 + Z^V / rZ^V.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::model::{CohomologyClass, PlumbingGraph};
use crate::precision::{ordered_sum, pi, root_of_unity, ComplexAP, RootTable};
use crate::Rat;

/// Level r with xi = e(1/(2r)) and the Gauss constants Delta_-, Delta_+.
#[derive(Clone, Debug)]
pub struct Level {
    pub r: i64,
    pub prec: u32,
    pub xi: ComplexAP,
    pub delta_minus: ComplexAP,
    pub delta_plus: ComplexAP,
}

impl Level {
    pub fn new(r: i64, prec: u32) -> Result<Self> {
        if r < 2 || r % 4 == 0 {
            return Err(Error::BadLevel(r));
        }
        let xi = root_of_unity(1, 2 * r as i128, prec);
        // xi^{3/2} sqrt(r) times i, 1 - i, -1 for r = 1, 2, 3 mod 4
        let xi32 = root_of_unity(3, 4 * r as i128, prec);
        let sr = ComplexAP::from_real(Float::with_val(prec, r).sqrt());
        let f = match r % 4 {
            1 => ComplexAP::from_f64(0.0, 1.0, prec),
            2 => ComplexAP::from_f64(1.0, -1.0, prec),
            _ => ComplexAP::from_f64(-1.0, 0.0, prec),
        };
        let delta_minus = &(&xi32 * &sr) * &f;
        let delta_plus = delta_minus.conj();
        Ok(Level { r, prec, xi, delta_minus, delta_plus })
    }

    /// H_r = {-(r-1), -(r-3), ..., r-1}.
    pub fn h_r(&self) -> Vec<i64> {
        (0..self.r).map(|k| -(self.r - 1) + 2 * k).collect()
    }
}

/// Exponents of the state sums share the denominator 4 D^2 r, D the lcm of
/// the denominators of omega.
pub fn common_modulus(omega: &CohomologyClass, r: i64) -> i128 {
    let d = omega.lcm_denominator();
    4 * d * d * r as i128
}

fn check_alpha(alpha: &Rat) -> Result<()> {
    if alpha.is_integer() {
        return Err(Error::IntegerAlpha(alpha.to_string()));
    }
    Ok(())
}

/// d(alpha) = sin(pi alpha/r) / sin(pi alpha); integers are rejected.
pub fn d_factor(alpha: &Rat, lvl: &Level) -> Result<Float> {
    check_alpha(alpha)?;
    let p = lvl.prec + 16;
    let s1 = root_of_unity(*alpha.numer(), 2 * alpha.denom() * lvl.r as i128, p).im;
    let s2 = root_of_unity(*alpha.numer(), 2 * alpha.denom(), p).im;
    Ok(Float::with_val(lvl.prec, s1 / s2))
}

/// Same as [`d_factor`] through a root table whose modulus is a multiple of 2 r den(alpha).
fn d_factor_table(alpha: &Rat, r: i64, table: &RootTable) -> Result<Float> {
    check_alpha(alpha)?;
    let s1 = &table.get(&(alpha / Rat::from_integer(2 * r as i128))).im;
    let s2 = &table.get(&(alpha / Rat::from_integer(2))).im;
    Ok(Float::with_val(s1.prec(), s1 / s2))
}

fn link_phase(g: &PlumbingGraph, alpha: &[Rat], r: i64) -> Rat {
    // T(alpha_v)^{B_vv} = e(B_vv (alpha^2 - (r-1)^2)/(4r)), S = e(alpha_v alpha_w/(2r))
    let r_q = Rat::from_integer(r as i128);
    let rm1 = Rat::from_integer((r - 1) as i128);
    let mut ph = Rat::from_integer(0);
    for (v, a) in alpha.iter().enumerate() {
        let bvv = Rat::from_integer(g.weights()[v] as i128);
        ph += bvv * (a * a - rm1 * rm1) / (Rat::from_integer(4) * r_q);
    }
    for &(v, w) in g.edges() {
        ph += alpha[v] * alpha[w] / (Rat::from_integer(2) * r_q);
    }
    ph
}

/// Z_r(L_Gamma, alpha) = prod_v d(alpha_v)^{1 - deg v} T(alpha_v)^{B_vv} prod_E S(alpha_v, alpha_w).
pub fn colored_link_invariant(g: &PlumbingGraph, alpha: &[Rat], lvl: &Level) -> Result<ComplexAP> {
    let p = lvl.prec;
    let mut mag = Float::with_val(p, 1);
    for (v, a) in alpha.iter().enumerate() {
        let d = d_factor(a, lvl)?;
        let e = 1 - g.degree(v);
        if d.is_zero() && e < 0 {
            return Err(Error::Pole(format!("d(alpha) = 0 at vertex {}", g.ids()[v])));
        }
        mag *= Float::with_val(p, d.pow(e as i32));
    }
    let ph = link_phase(g, alpha, lvl.r);
    Ok(crate::precision::e_rat(&ph, p).scale(&mag))
}

/// Z_r(M, omega) = Delta_-^{-|V|} sum_{alpha in omega + H_r^V} Z_r(L, alpha) prod_v d(alpha_v).
pub fn cgp_invariant(g: &PlumbingGraph, omega: &CohomologyClass, lvl: &Level) -> Result<ComplexAP> {
    let p = lvl.prec;
    let n = g.len();
    let table = RootTable::new(common_modulus(omega, lvl.r), p + 16);
    let hr = lvl.h_r();
    let w = omega.values();
    let degs = g.degrees();
    // d(alpha)^{2 - deg} per vertex and color
    let mut dpow: Vec<Vec<Float>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut row = Vec::with_capacity(hr.len());
        for &h in &hr {
            let a = w[v] + Rat::from_integer(h as i128);
            let d = d_factor_table(&a, lvl.r, &table)?;
            row.push(Float::with_val(p + 16, d.pow((2 - degs[v]) as i32)));
        }
        dpow.push(row);
    }
    let total = hr.len().pow(n as u32);
    let sum = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut alpha = Vec::with_capacity(n);
            let mut mag = Float::with_val(p + 16, 1);
            for v in 0..n {
                let k = idx % hr.len();
                idx /= hr.len();
                alpha.push(w[v] + Rat::from_integer(hr[k] as i128));
                mag *= &dpow[v][k];
            }
            table.get(&link_phase(g, &alpha, lvl.r)).scale(&mag)
        })
;
    let sum = ordered_sum(sum, || ComplexAP::zero(p + 16), |a, b| &a + &b);
    Ok((&sum * &lvl.delta_minus.powi(-(n as i64))).with_prec(p))
}

/// T(M, [omega]) = prod_v (e(omega_v/2) - e(-omega_v/2))^{deg v - 2}.
pub fn torsion(g: &PlumbingGraph, omega: &CohomologyClass, prec: u32) -> ComplexAP {
    let mut t = ComplexAP::one(prec);
    for (v, w) in omega.values().iter().enumerate() {
        let half = w / Rat::from_integer(2);
        let z = &crate::precision::e_rat(&half, prec) - &crate::precision::e_rat(&-half, prec);
        t = &t * &z.powi(g.degree(v) - 2);
    }
    t
}

/// One coset point alpha of (omega + (r-1)e)/2 + Z^V/rZ^V with its phases
/// expressed as indices into a root table of modulus N.
#[derive(Clone, Debug)]
pub struct CosetPoint {
    pub alpha: Vec<Rat>,
    /// N * alpha^T B alpha / r mod N.
    pub quad: i128,
    /// N * alpha_v / r mod N.
    pub lin: Vec<i128>,
}

/// The r^{|V|} coset points with a shared root table.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pub r: i64,
    pub table: RootTable,
    pub points: Vec<CosetPoint>,
}

impl CosetTable {
    pub fn new(g: &PlumbingGraph, omega: &CohomologyClass, r: i64, prec: u32) -> Self {
        let n = g.len();
        let modulus = common_modulus(omega, r);
        let table = RootTable::new(modulus, prec);
        let b = g.adjacency();
        let r_q = Rat::from_integer(r as i128);
        let base: Vec<Rat> = omega
            .values()
            .iter()
            .map(|w| (w + Rat::from_integer((r - 1) as i128)) / Rat::from_integer(2))
            .collect();
        let total = (r as usize).pow(n as u32);
        let to_index = |x: Rat| -> i128 {
            let y = x * Rat::from_integer(modulus);
            debug_assert!(y.is_integer());
            y.to_integer().rem_euclid(modulus)
        };
        let points = (0..total)
            .map(|mut idx| {
                let mut alpha = Vec::with_capacity(n);
                for bv in &base {
                    alpha.push(bv + Rat::from_integer((idx % r as usize) as i128));
                    idx /= r as usize;
                }
                let mut q = Rat::from_integer(0);
                for i in 0..n {
                    for j in 0..n {
                        if b[i][j] != 0 {
                            q += alpha[i] * alpha[j] * Rat::from_integer(b[i][j] as i128);
                        }
                    }
                }
                let quad = to_index(q / r_q);
                let lin = alpha.iter().map(|a| to_index(a / r_q)).collect();
                CosetPoint { alpha, quad, lin }
            })
            .collect();
        CosetTable { r, table, points }
    }

    pub fn prec(&self) -> u32 {
        self.table.get_index(0).prec()
    }

    /// C(y) = sum_alpha e(alpha^T B alpha / r + alpha^T y / r), y = I_nu l.
    pub fn gauss_sum(&self, y: &[i64]) -> ComplexAP {
        let n = self.table.modulus();
        let mut acc = ComplexAP::zero(self.prec());
        for pt in &self.points {
            let mut k = pt.quad;
            for (l, &yv) in pt.lin.iter().zip(y) {
                k += l * yv as i128;
            }
            acc += self.table.get_index(k.rem_euclid(n));
        }
        acc
    }

    /// e(alpha_v / r) for a coset point.
    pub fn zeta(&self, pt: &CosetPoint, v: usize) -> &ComplexAP {
        self.table.get_index(pt.lin[v])
    }

    /// e(alpha^T B alpha / r).
    pub fn quad_phase(&self, pt: &CosetPoint) -> &ComplexAP {
        self.table.get_index(pt.quad)
    }
}

/// F_v(y) = (y - 1/y)^{2 - deg}; errors near a pole when deg >= 3.
pub fn vertex_function(deg: i64, y: &ComplexAP) -> Result<ComplexAP> {
    let p = y.prec();
    let z = y - &y.inv();
    if deg >= 3 {
        let tiny = Float::with_val(p, Float::i_exp(1, -(p as i32) / 2));
        if z.abs() < tiny {
            return Err(Error::Pole(format!("F_v pole at y = {y}")));
        }
    }
    Ok(z.powi(2 - deg))
}

/// G(x) with lambda supplied by the caller (see `constants::lambda_constant`).
pub fn generating_function_with(
    g: &PlumbingGraph,
    coset: &CosetTable,
    lambda: &ComplexAP,
    x: &[ComplexAP],
) -> Result<ComplexAP> {
    let p = coset.prec();
    let degs = g.degrees();
    let ex: Vec<ComplexAP> = x.iter().map(|xv| xv.with_prec(p).exp()).collect();
    let mut acc = ComplexAP::zero(p);
    for pt in &coset.points {
        let mut term = coset.quad_phase(pt).clone();
        for v in 0..g.len() {
            let y = coset.zeta(pt, v) * &ex[v];
            term = &term * &vertex_function(degs[v], &y)?;
        }
        acc += &term;
    }
    Ok(&acc * lambda)
}

/// G_{omega,r}(x).
pub fn generating_function_eval(
    g: &PlumbingGraph,
    omega: &CohomologyClass,
    lvl: &Level,
    x: &[ComplexAP],
) -> Result<ComplexAP> {
    let lambda = crate::constants::lambda_constant(lvl, omega, g);
    let coset = CosetTable::new(g, omega, lvl.r, lvl.prec + 16);
    Ok(generating_function_with(g, &coset, &lambda, x)?.with_prec(lvl.prec))
}

/// |G| envelope |lambda| r^{|V|} max |F| over the coset for the given x.
pub fn generating_function_envelope(g: &PlumbingGraph, coset: &CosetTable, lambda: &ComplexAP, x: &[ComplexAP]) -> Result<f64> {
    let degs = g.degrees();
    let p = coset.prec();
    let ex: Vec<ComplexAP> = x.iter().map(|xv| xv.with_prec(p).exp()).collect();
    let mut worst = 0f64;
    for pt in &coset.points {
        let mut f = 1f64;
        for v in 0..g.len() {
            let y = coset.zeta(pt, v) * &ex[v];
            f *= vertex_function(degs[v], &y)?.abs_f64();
        }
        worst = worst.max(f);
    }
    Ok(lambda.abs_f64() * coset.points.len() as f64 * worst)
}

/// pi as used by callers that only hold a level.
pub fn level_pi(lvl: &Level) -> Float {
    pi(lvl.prec)
}
