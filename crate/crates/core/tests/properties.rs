//! Representative independence and counting properties over the test graphs.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use plumbtop::cgp::Level;
use plumbtop::constants::{linking_form, omega_eval, quadratic_refinement, rokhlin, z_r_sum};
use plumbtop::context::Context;
use plumbtop::model::{
    canon_spinc, decompose_with_spin, homology_classes, spin_enumerate, spinc_enumerate, spinc_from_pair,
    HomologyClass, SignVector, SpinStructure,
};
use plumbtop::qseries::f_product;
use plumbtop::radial::{g_nu_coeff, in_index_cone};
use plumbtop::reciprocity::{random_family, reciprocity_check};
use proptest::prelude::*;

const NAMES: [&str; 6] = ["e1", "lens3", "lens5", "lens7", "path", "y"];
const LEVELS: [i64; 5] = [2, 3, 5, 6, 7];

fn contexts() -> &'static Vec<Context> {
    static CTX: OnceLock<Vec<Context>> = OnceLock::new();
    CTX.get_or_init(|| {
        let mut out = Vec::new();
        for name in NAMES {
            for r in LEVELS {
                let path = format!("{}/../../graphs/{name}.json", env!("CARGO_MANIFEST_DIR"));
                out.push(Context::from_file(path, r, 128).unwrap());
            }
        }
        out
    })
}

fn shift(c: &Context, x: &[i64], k: &[i64]) -> Vec<i64> {
    let bk = c.lat.mul_b(&k[..c.rank()]);
    x.iter().zip(bk).map(|(a, b)| a + b).collect()
}

fn shifts() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 4)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() }
}

// each case draws a context, so 40 cases touch every graph about 7 times;
// the deterministic sweeps below add >= 20 shifts per graph explicitly
proptest! {
    #![proptest_config(config())]

    #[test]
    fn linking_form_is_well_defined(i in 0..30usize, a in 0..64usize, b in 0..64usize, k in shifts(), j in shifts()) {
        let c = &contexts()[i];
        let h = homology_classes(&c.lat);
        let (a, b) = (&h[a % h.len()], &h[b % h.len()]);
        let a2 = HomologyClass { rep: shift(c, &a.rep, &k) };
        let b2 = HomologyClass { rep: shift(c, &b.rep, &j) };
        prop_assert_eq!(linking_form(a, b, &c.lat), linking_form(&a2, &b2, &c.lat));
        prop_assert_eq!(linking_form(a, b, &c.lat), linking_form(b, a, &c.lat));
    }

    #[test]
    fn quadratic_refinement_is_well_defined(i in 0..30usize, a in 0..64usize, k in shifts(), j in shifts()) {
        let c = &contexts()[i];
        let h = homology_classes(&c.lat);
        let a = &h[a % h.len()];
        for s in spin_enumerate(&c.lat).unwrap() {
            let a2 = HomologyClass { rep: shift(c, &a.rep, &k) };
            let s2 = SpinStructure { s: s.s.iter().zip(&j).map(|(x, y)| x + 2 * y).collect() };
            prop_assert_eq!(quadratic_refinement(a, &s, &c.lat), quadratic_refinement(&a2, &s, &c.lat));
            prop_assert_eq!(quadratic_refinement(a, &s, &c.lat), quadratic_refinement(a, &s2, &c.lat));
        }
    }

    #[test]
    fn omega_evaluation_is_well_defined(i in 0..30usize, a in 0..64usize, k in shifts()) {
        let c = &contexts()[i];
        let h = homology_classes(&c.lat);
        let a = &h[a % h.len()];
        let a2 = HomologyClass { rep: shift(c, &a.rep, &k) };
        prop_assert_eq!(omega_eval(&c.omega, a), omega_eval(&c.omega, &a2));
    }

    #[test]
    fn rokhlin_lift_is_well_defined(i in 0..30usize, j in shifts()) {
        let c = &contexts()[i];
        for s in spin_enumerate(&c.lat).unwrap() {
            let s2 = SpinStructure { s: s.s.iter().zip(&j).map(|(x, y)| x + 2 * y).collect() };
            prop_assert_eq!(rokhlin(&s, &c.lat), rokhlin(&s2, &c.lat));
        }
    }

    #[test]
    fn spinc_class_is_well_defined(i in 0..30usize, k in shifts(), j in shifts()) {
        let c = &contexts()[i];
        let ell: Vec<i64> = c.delta.iter().zip(&k).map(|(d, x)| d + 2 * x).collect();
        let two_j: Vec<i64> = j.iter().map(|x| 2 * x).collect();
        let moved = shift(c, &ell, &two_j);
        prop_assert_eq!(canon_spinc(&c.lat, &c.delta, &ell).unwrap(), canon_spinc(&c.lat, &c.delta, &moved).unwrap());
    }

    #[test]
    fn z_r_is_independent_of_representatives(i in 0..30usize, b in 0..64usize, k in shifts(), j in shifts(), seed in 0..1000i64) {
        let c = &contexts()[i];
        let lvl = Level::new(c.r(), 128).unwrap();
        let h = homology_classes(&c.lat);
        let b = &h[b % h.len()];
        let s = &spin_enumerate(&c.lat).unwrap()[0];
        let base = z_r_sum(&lvl, &c.omega, &c.graph, &c.lat, b, s, &h, &h).unwrap();
        let b2 = HomologyClass { rep: shift(c, &b.rep, &k) };
        // move every summation representative by its own lattice vector
        let moved: Vec<HomologyClass> = h
            .iter()
            .enumerate()
            .map(|(n, a)| {
                let kk: Vec<i64> = j.iter().map(|x| (x * (n as i64 + seed)) % 5).collect();
                HomologyClass { rep: shift(c, &a.rep, &kk) }
            })
            .collect();
        let mut rev = moved.clone();
        rev.reverse();
        let other = z_r_sum(&lvl, &c.omega, &c.graph, &c.lat, &b2, s, &moved, &rev).unwrap();
        prop_assert!((&base - &other).abs_f64() <= 1e-20, "{} vs {}", base, other);
    }

    #[test]
    fn z_r_agrees_across_spin_decompositions(i in 0..30usize, k in shifts()) {
        let c = &contexts()[i];
        let lvl = Level::new(c.r(), 128).unwrap();
        let h = homology_classes(&c.lat);
        let ell: Vec<i64> = c.delta.iter().zip(&k).map(|(d, x)| d + 2 * x).collect();
        let mut vals = Vec::new();
        for s in spin_enumerate(&c.lat).unwrap() {
            let b = decompose_with_spin(&ell, &c.lat, &c.delta, &s).unwrap();
            vals.push(z_r_sum(&lvl, &c.omega, &c.graph, &c.lat, &b, &s, &h, &h).unwrap());
        }
        for v in &vals[1..] {
            prop_assert!((v - &vals[0]).abs_f64() <= 1e-20);
        }
    }

    #[test]
    fn g_nu_envelope(i in 0..30usize, k in shifts(), mask in 0..16u32) {
        let c = &contexts()[i];
        let m = c.rank();
        let l: Vec<i64> = c.delta.iter().zip(&k).map(|(d, x)| d + 2 * x.max(&-1)).collect();
        prop_assume!(in_index_cone(&l, &c.delta));
        let nu = SignVector::new((0..m).map(|v| if mask >> v & 1 == 1 { -1 } else { 1 }).collect());
        let g = g_nu_coeff(&nu, &l, c).value.abs_f64();
        let env = c.lambda.abs_f64() * (c.r() as f64).powi(m as i32) * f_product(&c.delta, &l).abs() as f64;
        prop_assert!(g <= env * (1.0 + 1e-12) + 1e-30);
    }

    #[test]
    fn reciprocity_random_seeds(seed in any::<u64>()) {
        for inst in random_family(seed, 3) {
            let rep = reciprocity_check(&inst, 160).unwrap();
            prop_assert!(rep.diff <= 1e-20, "{:?}", inst);
        }
    }
}

#[test]
fn sigma_is_onto_and_counts_match() {
    for c in contexts() {
        let classes: BTreeSet<_> = spinc_enumerate(&c.lat, &c.delta).into_iter().collect();
        assert_eq!(classes.len() as i64, c.lat.det.abs());
        for s in spin_enumerate(&c.lat).unwrap() {
            let image: BTreeSet<_> = homology_classes(&c.lat)
                .iter()
                .map(|b| spinc_from_pair(&c.lat, &c.delta, b, &s).unwrap())
                .collect();
            assert_eq!(image, classes);
        }
    }
}

#[test]
fn twenty_shifts_per_graph() {
    for c in contexts() {
        let lvl = Level::new(c.r(), 128).unwrap();
        let h = homology_classes(&c.lat);
        let s = &spin_enumerate(&c.lat).unwrap()[0];
        for t in 0..20i64 {
            let k: Vec<i64> = (0..c.rank() as i64).map(|v| (7 * t + 3 * v) % 9 - 4).collect();
            let a = &h[t as usize % h.len()];
            let a2 = HomologyClass { rep: shift(c, &a.rep, &k) };
            assert_eq!(quadratic_refinement(a, s, &c.lat), quadratic_refinement(&a2, s, &c.lat));
            assert_eq!(omega_eval(&c.omega, a), omega_eval(&c.omega, &a2));
            let z = z_r_sum(&lvl, &c.omega, &c.graph, &c.lat, a, s, &h, &h).unwrap();
            let z2 = z_r_sum(&lvl, &c.omega, &c.graph, &c.lat, &a2, s, &h, &h).unwrap();
            assert!((&z - &z2).abs_f64() <= 1e-20);
        }
    }
}
