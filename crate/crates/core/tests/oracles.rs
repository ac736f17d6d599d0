//! Reference values frozen from an independent mpmath implementation
//! (45 significant digits) and closed forms.

use num_complex::Complex64;
use plumbtop::asymptotics::{
    borel_coefficients, borel_laplace_resum, borel_transform, contour_integral, euler_maclaurin_check,
    gaussian_selftest, generating_jet, hadamard_coeffs, perturbative_coeffs, CoefficientRule, ContourSpec,
};
use plumbtop::cgp::{cgp_invariant, d_factor, generating_function_eval, torsion, Level};
use plumbtop::context::Context;
use plumbtop::model::{canon_spinc, parse_graph_json, SignVector, SpincStructure};
use plumbtop::precision::ComplexAP;
use plumbtop::qseries::{qseries_eval, zhat_qseries};
use plumbtop::radial::{central_identity_check, coefficient_identity_check, in_index_cone, radial_eval};
use plumbtop::reciprocity::{hand_examples, random_family, reciprocity_check};
use plumbtop::{Error, Rat};
use rug::Float;
use std::ops::Div;

const PREC: u32 = 192;

fn graph(name: &str) -> String {
    format!("{}/../../graphs/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn ctx(name: &str, r: i64) -> Context {
    Context::from_file(graph(name), r, PREC).unwrap()
}

fn val(re: &str, im: &str) -> ComplexAP {
    ComplexAP::new(
        Float::with_val(PREC, Float::parse(re).unwrap()),
        Float::with_val(PREC, Float::parse(im).unwrap()),
    )
}

fn assert_near(got: &ComplexAP, re: &str, im: &str, tol: f64) {
    let want = val(re, im);
    let d = (got - &want).abs_f64();
    assert!(d <= tol, "got {got}, want {re} + {im}i, diff {d:e}");
}

#[test]
fn cgp_against_direct_coloring_sum() {
    let table = [
        ("e1", 2, "0.288675134594812882254574390251", "0.166666666666666666666666666667"),
        ("e1", 3, "0.371113599484279577635275301365", "-0.442275965445958930803614213091"),
        ("e1", 5, "0.368176154422551157133278051601", "-0.245842970733534652201584798842"),
        ("e1", 6, "-0.542531787566249128563128811499", "-0.197465421817349228783558674595"),
        ("e1", 7, "0.577683957276608776174143829757", "0.350626023265985967780029213491"),
        ("path", 3, "0.371113599484279577635275301365", "0.442275965445958930803614213091"),
        ("path", 5, "0.368176154422551157133278051601", "0.245842970733534652201584798842"),
        ("lens5", 3, "0.213834107703843546504729644622", "-0.619237096056562271189861985621"),
    ];
    for (name, r, re, im) in table {
        let c = ctx(name, r);
        let z = cgp_invariant(&c.graph, &c.omega, &c.level).unwrap();
        assert_near(&z, re, im, 1e-28);
    }
}

#[test]
fn cgp_is_generating_function_at_origin() {
    for name in ["e1", "lens3", "lens5", "lens7", "path", "y"] {
        for r in [2, 3, 5, 6, 7] {
            let c = ctx(name, r);
            let z = cgp_invariant(&c.graph, &c.omega, &c.level).unwrap();
            let zero = vec![ComplexAP::zero(PREC); c.rank()];
            let g0 = generating_function_eval(&c.graph, &c.omega, &c.level, &zero).unwrap();
            assert!((&z - &g0).abs_f64() <= 1e-18 * z.abs_f64().max(1e-30), "{name} r={r}");
        }
    }
}

#[test]
fn cgp_independent_of_vertex_order() {
    let a = r#"{"vertices":[{"id":"a","weight":-2},{"id":"b","weight":-2}],"edges":[["a","b"]],"omega":{"a":"4/3","b":"2/3"}}"#;
    let b = r#"{"vertices":[{"id":"b","weight":-2},{"id":"a","weight":-2}],"edges":[["b","a"]],"omega":{"b":"2/3","a":"4/3"}}"#;
    let z = |s: &str| {
        let (g, w) = parse_graph_json(s).unwrap();
        cgp_invariant(&g, &w, &Level::new(5, PREC).unwrap()).unwrap()
    };
    assert!((&z(a) - &z(b)).abs_f64() < 1e-50);
}

#[test]
fn d_factor_closed_form() {
    let lvl = Level::new(5, PREC).unwrap();
    let d = d_factor(&Rat::new(2, 3), &lvl).unwrap();
    let pi = Float::with_val(PREC, rug::float::Constant::Pi);
    let want = Float::with_val(PREC, &pi * 2u32).div(15u32).sin() / Float::with_val(PREC, &pi * 2u32).div(3u32).sin();
    assert!(Float::with_val(PREC, d - want).abs().to_f64() < 1e-50);
    assert!(matches!(d_factor(&Rat::from_integer(1), &lvl), Err(Error::IntegerAlpha(_))));
}

#[test]
fn torsion_and_lambda_e1() {
    let c = ctx("e1", 5);
    assert_near(&torsion(&c.graph, &c.omega, PREC), "-0.333333333333333333333333333333", "0", 1e-28);
    assert_near(&c.lambda, "-0.149071198499985979760611577915", "0", 1e-28);
}

#[test]
fn z_r_table_e1() {
    let cases = [
        (5, 0, "-0.166666666666666666666666666667", "0.288675134594812882254574390251"),
        (5, 2, "0.333333333333333333333333333333", "0"),
        (5, 4, "-0.166666666666666666666666666667", "0.288675134594812882254574390251"),
        (6, 0, "0", "0"),
        (6, 2, "-0.577350269189625764509148780502", "0"),
        (6, 4, "0", "0"),
    ];
    for (r, s, re, im) in cases {
        let c = ctx("e1", r);
        let z = c.zr.get(&SpincStructure { rep: vec![s] }).unwrap();
        assert_near(z, re, im, 1e-28);
    }
}

#[test]
fn zhat_e1_hand_values() {
    let c = ctx("e1", 5);
    let order = Rat::from_integer(20);
    let z0 = zhat_qseries(&c.graph, &c.lat, &SpincStructure { rep: vec![0] }, &order).unwrap();
    assert_eq!(z0.terms.len(), 1);
    assert_eq!(z0.terms[&Rat::from_integer(0)], Rat::from_integer(-2));
    for s in [2, 4] {
        let z = zhat_qseries(&c.graph, &c.lat, &SpincStructure { rep: vec![s] }, &order).unwrap();
        assert_eq!(z.terms.len(), 1);
        assert_eq!(z.terms[&Rat::new(1, 3)], Rat::from_integer(1));
    }
    // q^{1/3} at tau = i is e^{-2 pi / 3}
    let z = zhat_qseries(&c.graph, &c.lat, &SpincStructure { rep: vec![2] }, &order).unwrap();
    let (v, _) = qseries_eval(&z, &ComplexAP::i(PREC), 1e-20).unwrap();
    assert!((v.to_c64() - Complex64::new((-2.0 * std::f64::consts::PI / 3.0).exp(), 0.0)).norm() < 1e-15);
}

#[test]
fn radial_value_e1() {
    let c = ctx("e1", 5);
    let v = radial_eval(&val("0", "0.1"), 1e-30, &c).unwrap();
    assert_near(&v.value, "0.361592209566271537633449401351", "-0.308485021642683089558277912527", 1e-25);
}

#[test]
fn central_identity_examples() {
    for (name, r, t, tol) in [("e1", 5, 0.1, 1e-15), ("e1", 2, 0.2, 1e-15), ("y", 3, 0.1, 1e-12)] {
        let c = ctx(name, r);
        let rep = central_identity_check(&ComplexAP::from_f64(0.0, t, PREC), tol, &c).unwrap();
        assert!(rep.pass && rep.diff <= tol, "{name} r={r}: {} > {}", rep.diff, rep.bound);
    }
}

#[test]
fn coefficient_identity_e1_box() {
    for r in [2, 3, 5, 6, 7] {
        let c = ctx("e1", r);
        for nu in SignVector::all(1) {
            for l in -20..=20i64 {
                if !in_index_cone(&[l], &c.delta) {
                    continue;
                }
                let rep = coefficient_identity_check(&nu, &[l], &c).unwrap();
                assert!(rep.diff <= 1e-20, "r={r} l={l}: {:e}", rep.diff);
            }
        }
    }
}

#[test]
fn spinc_parity_violation() {
    let c = ctx("e1", 5);
    assert!(matches!(canon_spinc(&c.lat, &c.delta, &[1]), Err(Error::Parity(_))));
}

#[test]
fn perturbative_coefficients_e1() {
    let c = ctx("e1", 5);
    let p = perturbative_coeffs(&c, 3).unwrap();
    let want = [
        ("0.368176154422551157133278051601", "-0.245842970733534652201584798842"),
        ("0.0116142736964059412666482394225", "0.110502432818697037435854660553"),
        ("0.00193571228273432354444137323708", "0.0184170721364495062393091100922"),
        ("0.00021507914252603594938237480412", "0.00204634134849438958214545667691"),
    ];
    for (z, (re, im)) in p.coeffs.iter().zip(want) {
        assert_near(z, re, im, 1e-25);
    }
    let h = hadamard_coeffs(&c, 3).unwrap();
    for (a, b) in p.coeffs.iter().zip(&h.coeffs) {
        assert!((a - b).abs_f64() <= 1e-12);
    }
}

#[test]
fn jet_against_finite_differences() {
    let c = ctx("path", 5);
    let jet = generating_jet(&c, 2).unwrap();
    assert_near(&jet.coeff(&[1, 0]), "0.574187484005849439868140329723", "0.0603495364055576404715733214325", 1e-25);
    assert_near(&jet.coeff(&[1, 1]), "0.298490512244115509533388615066", "0.908857567645716876816712762162", 1e-25);
    let h = 1e-20;
    for v in 0..2 {
        let at = |s: f64| {
            let mut x = vec![ComplexAP::zero(PREC); 2];
            x[v] = ComplexAP::from_f64(s, 0.0, PREC);
            generating_function_eval(&c.graph, &c.omega, &c.level, &x).unwrap()
        };
        let fd = (&at(h) - &at(-h)).scale(&Float::with_val(PREC, 0.5 / h));
        let mut mono = vec![0u32; 2];
        mono[v] = 1;
        let j = jet.coeff(&mono);
        assert!((&j - &fd).abs_f64() <= 1e-10 * j.abs_f64(), "v={v}: {j} vs {fd}");
    }
}

#[test]
fn contour_matches_series() {
    let c = ctx("e1", 5);
    let s = 0.5f64.sqrt();
    for tau in [Complex64::new(0.0, 0.1), Complex64::new(-0.1 * s, 0.1 * s)] {
        let q = contour_integral(tau, &ContourSpec::default(), &c).unwrap();
        let v = radial_eval(&ComplexAP::from_c64(tau, PREC), 1e-20, &c).unwrap().value.to_c64();
        assert!((q.value - v).norm() <= 1e-6 * v.norm(), "{tau}: {} vs {v}", q.value);
    }
}

#[test]
fn contour_through_pole_rejected() {
    let c = ctx("y", 3);
    let spec = ContourSpec { eps: Some(0.0), ..ContourSpec::default() };
    assert!(matches!(contour_integral(Complex64::new(0.0, 0.1), &spec, &c), Err(Error::Pole(_))));
}

#[test]
fn borel_rank_one_closed_form() {
    // two-point sphere: B(z) = z^{-1/2} (G(i sqrt(z/3)) + G(-i sqrt(z/3))) / (2 sqrt(pi))
    let c = ctx("e1", 5);
    let z = 0.7;
    let b = borel_transform(z, &c, 8).unwrap();
    let x = (z / 3.0).sqrt();
    let g = |s: f64| {
        generating_function_eval(&c.graph, &c.omega, &c.level, &[ComplexAP::from_f64(0.0, s, PREC)])
            .unwrap()
            .to_c64()
    };
    let want = (g(x) + g(-x)) / (2.0 * std::f64::consts::PI.sqrt() * z.sqrt());
    assert!((b.value - want).norm() < 1e-12 * want.norm());
}

#[test]
fn borel_coefficients_match_perturbative_series() {
    for name in ["e1", "lens5", "path"] {
        let c = ctx(name, 5);
        let p = perturbative_coeffs(&c, 1).unwrap();
        let bc = borel_coefficients(&c, 2, 64, 64).unwrap();
        let m = c.rank() as f64;
        for l in 0..2 {
            let gam = Float::with_val(64, m / 2.0 + l as f64).gamma().to_f64();
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert!((bc.even[l] * gam - p.coeffs[l].to_c64() * sign).norm() <= 1e-6, "{name} l={l}");
        }
        assert!(bc.odd.iter().all(|o| o.norm() <= 1e-8), "{name}");
    }
}

#[test]
fn resummation_cubic_remainder() {
    let c = ctx("e1", 5);
    let p = perturbative_coeffs(&c, 2).unwrap();
    let ts = [0.05, 0.025, 0.0125];
    let rem: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let tau = Complex64::new(0.0, t);
            let v = borel_laplace_resum(0.0, tau, &c, 16).unwrap();
            (v - p.partial_sum(&ComplexAP::from_c64(tau, PREC), 2).to_c64()).norm()
        })
        .collect();
    let slope = plumbtop::asymptotics::log_slope(&ts, &rem);
    assert!((slope - 3.0).abs() < 0.3, "slope {slope}, remainders {rem:?}");
}

#[test]
fn resummation_ray_through_singularities_rejected() {
    let c = ctx("y", 3);
    let r = borel_laplace_resum(0.0, Complex64::new(0.0, 0.05), &c, 8);
    assert!(matches!(r, Err(Error::Pole(_))));
}

#[test]
fn euler_maclaurin_rules() {
    let ts = [0.25, 0.125, 0.0625, 1.0 / 64.0];
    for (rule, a) in [
        (CoefficientRule::indicator(), Rat::from_integer(0)),
        (CoefficientRule::indicator(), Rat::new(1, 3)),
        (CoefficientRule::progression(2, 1), Rat::new(1, 3)),
    ] {
        for rep in euler_maclaurin_check(&rule, a, 1.0, &[0, 1, 2, 3], &ts, 192).unwrap() {
            assert!(rep.pass, "L={} slope={}", rep.order, rep.slope);
        }
    }
}

#[test]
fn gaussian_product_case() {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let r = gaussian_selftest(&[vec![i, z], vec![z, 2.0 * i]], &[z, z], 16).unwrap();
    let want = (2.0 * std::f64::consts::PI).sqrt() * std::f64::consts::PI.sqrt();
    assert!(r.pass && (r.rhs - want).norm() < 1e-12);
}

#[test]
fn reciprocity_hand_and_random() {
    for (inst, want) in hand_examples() {
        match want {
            Some((re, im)) => {
                let rep = reciprocity_check(&inst, PREC).unwrap();
                assert!(rep.pass);
                assert!((rep.lhs.to_c64() - Complex64::new(re as f64, im as f64)).norm() < 1e-40);
            }
            None => assert!(matches!(reciprocity_check(&inst, PREC), Err(Error::Hypothesis(_)))),
        }
    }
    for inst in random_family(2024, 50) {
        assert!(reciprocity_check(&inst, PREC).unwrap().diff <= 1e-20, "{inst:?}");
    }
}

#[test]
fn y_graph_principal_value_halves() {
    // brute-force pairing of the theta series with the average of both
    // expansions at the central vertex
    let c = ctx("y", 2);
    let z = zhat_qseries(&c.graph, &c.lat, &SpincStructure { rep: vec![3, 1, 1, 3] }, &Rat::from_integer(5)).unwrap();
    let want = [(Rat::new(-1, 3), Rat::new(-1, 2)), (Rat::new(2, 3), Rat::new(-1, 2)), (Rat::new(5, 3), Rat::new(1, 2)), (Rat::new(14, 3), Rat::new(1, 2))];
    assert_eq!(z.terms.into_iter().collect::<Vec<_>>(), want.to_vec());
    let z = zhat_qseries(&c.graph, &c.lat, &SpincStructure { rep: vec![3, 1, 1, 1] }, &Rat::from_integer(5)).unwrap();
    assert_eq!(z.terms.into_iter().collect::<Vec<_>>(), vec![(Rat::from_integer(0), Rat::from_integer(1)), (Rat::from_integer(3), Rat::from_integer(-1))]);
}
