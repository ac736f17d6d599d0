//! Configurable-precision complex arithmetic, exact roots of unity and
//! truncated multivariate power series.

mod complex;
pub mod jet;

pub use complex::{pi, ComplexAP};
pub use jet::{jet_mul, jet_vertex_factor, laplacian_apply, Jet, MonomialBasis};

use num_integer::Integer;
use rayon::prelude::*;
use rug::Float;

use crate::Rat;

pub const DEFAULT_PREC: u32 = 192;
pub const MIN_PREC: u32 = 64;

const CHUNK: usize = 256;

/// Parallel sum with a fixed summation order: fixed-size chunks are folded in
/// parallel and the partial sums combined left to right, so rounding does not
/// depend on the thread count.
pub fn ordered_sum<I, T, Z, F>(items: I, zero: Z, add: F) -> T
where
    I: IndexedParallelIterator<Item = T>,
    T: Send,
    Z: Fn() -> T + Send + Sync,
    F: Fn(T, T) -> T + Send + Sync,
{
    let parts: Vec<T> = items.fold_chunks(CHUNK, &zero, &add).collect();
    parts.into_iter().fold(zero(), &add)
}

/// Precision from `PLUMBTOP_PREC`, falling back to [`DEFAULT_PREC`].
pub fn prec_from_env() -> u32 {
    std::env::var("PLUMBTOP_PREC")
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .map(|p| p.max(MIN_PREC))
        .unwrap_or(DEFAULT_PREC)
}

/// e(p/q) = exp(2 pi i p/q), angle reduced exactly before evaluation.
pub fn root_of_unity(p: i128, q: i128, prec: u32) -> ComplexAP {
    assert!(q >= 1, "root_of_unity needs q >= 1");
    let g = p.gcd(&q);
    let (p, q) = if g > 1 { (p / g, q / g) } else { (p, q) };
    let p = p.rem_euclid(q);
    // exact quarter turns
    match (p, q) {
        (0, _) => return ComplexAP::one(prec),
        (1, 2) => return ComplexAP::from_f64(-1.0, 0.0, prec),
        (1, 4) => return ComplexAP::from_f64(0.0, 1.0, prec),
        (3, 4) => return ComplexAP::from_f64(0.0, -1.0, prec),
        _ => {}
    }
    let wp = prec + 16;
    let mut ang = pi(wp) * Float::with_val(wp, 2 * p);
    ang /= Float::with_val(wp, q);
    let (s, c) = ang.sin_cos(Float::new(wp));
    ComplexAP::new(Float::with_val(prec, c), Float::with_val(prec, s))
}

/// e(x) for an exact rational x.
pub fn e_rat(x: &Rat, prec: u32) -> ComplexAP {
    root_of_unity(*x.numer(), *x.denom(), prec)
}

/// e(x) for a real x given as a float.
pub fn e_float(x: &Float) -> ComplexAP {
    let p = x.prec();
    let mut ang = pi(p) * Float::with_val(p, 2);
    ang *= x;
    let (s, c) = ang.sin_cos(Float::new(p));
    ComplexAP::new(c, s)
}

/// x mod 1 into [0, 1).
pub fn frac(x: &Rat) -> Rat {
    let n = x.numer().rem_euclid(*x.denom());
    Rat::new(n, *x.denom())
}

/// Table of e(k/n), k = 0..n-1, for repeated lookups with a common denominator.
#[derive(Clone, Debug)]
pub struct RootTable {
    n: i128,
    vals: Vec<ComplexAP>,
}

impl RootTable {
    pub fn new(n: i128, prec: u32) -> Self {
        assert!(n >= 1);
        let vals = (0..n).map(|k| root_of_unity(k, n, prec)).collect();
        RootTable { n, vals }
    }

    pub fn modulus(&self) -> i128 {
        self.n
    }

    /// e(x), where the denominator of x divides n.
    pub fn get(&self, x: &Rat) -> &ComplexAP {
        let d = *x.denom();
        debug_assert!(self.n % d == 0, "denominator {} does not divide {}", d, self.n);
        let k = (x.numer() * (self.n / d)).rem_euclid(self.n);
        &self.vals[k as usize]
    }

    /// e(k/n).
    pub fn get_index(&self, k: i128) -> &ComplexAP {
        &self.vals[k.rem_euclid(self.n) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn closed_forms() {
        let p = 192;
        assert_eq!(root_of_unity(1, 2, p).to_c64(), Complex64::new(-1.0, 0.0));
        assert_eq!(root_of_unity(1, 4, p).to_c64(), Complex64::new(0.0, 1.0));
        let w = root_of_unity(1, 3, p);
        let half = Float::with_val(p, -0.5);
        let s3 = Float::with_val(p, 3).sqrt() / 2;
        assert!(Float::with_val(p, &w.re - &half).abs().to_f64() < 1e-55);
        assert!(Float::with_val(p, &w.im - &s3).abs().to_f64() < 1e-55);
    }

    #[test]
    fn reduction_is_exact() {
        let p = 128;
        let a = root_of_unity(7, 3, p);
        let b = root_of_unity(1, 3, p);
        assert_eq!(a, b);
        let c = root_of_unity(-2, 6, p);
        assert_eq!(c, root_of_unity(2, 3, p));
    }

    #[test]
    fn qth_power_is_one() {
        let p = 192;
        for q in [5i128, 12, 97, 360, 1000] {
            let w = root_of_unity(1, q, p);
            let z = w.powi(q as i64);
            assert!((&z - &ComplexAP::one(p)).abs_f64() < 1e-50, "q = {q}");
        }
    }

    #[test]
    fn table_lookup() {
        let t = RootTable::new(12, 128);
        assert_eq!(t.get(&Rat::new(-1, 4)).to_c64(), Complex64::new(0.0, -1.0));
        assert_eq!(*t.get(&Rat::new(5, 3)), root_of_unity(2, 3, 128));
    }
}
