//! Acceptance suite: one PASS/FAIL line per criterion over the test graphs and
//! levels. Exits non-zero on any failure not listed in `KNOWN_FAILURES`.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plumbtop::asymptotics::{
    borel_coefficients, contour_integral, hadamard_coeffs, perturbative_coeffs, radial_approach,
    remainder_order_check, ContourSpec, RANK_CAP,
};
use plumbtop::cgp::{cgp_invariant, generating_function_with};
use plumbtop::constants::{omega_eval, quadratic_refinement, rokhlin, z_r_sum};
use plumbtop::context::Context;
use plumbtop::model::{
    canon_spinc, homology_classes, spin_enumerate, spinc_enumerate, spinc_from_pair, HomologyClass, SpinStructure,
};
use plumbtop::precision::ComplexAP;
use plumbtop::qseries::zhat_qseries;
use plumbtop::radial::{central_identity_check, coefficient_identity_sweep};
use plumbtop::reciprocity::{hand_examples, random_family, reciprocity_check};
use plumbtop::Rat;

const PREC: u32 = 192;
const GRAPHS: [&str; 6] = ["e1", "lens3", "lens5", "lens7", "path", "y"];
const LEVELS: [i64; 5] = [2, 3, 5, 6, 7];
const TS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// (criterion, graph) pairs that fail for a documented reason; see README.
const KNOWN_FAILURES: [(u32, &str); 2] = [(4, "y"), (9, "y")];

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: String) {
        if !ok {
            self.failures.push(what);
        }
    }
}

fn ctx(name: &str, r: i64) -> Context {
    let path = format!("{}/../../graphs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Context::from_file(path, r, PREC).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn sector(t: f64) -> Complex64 {
    let s = 0.5f64.sqrt();
    Complex64::new(-t * s, t * s)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    for name in GRAPHS {
        for r in LEVELS {
            let t = Instant::now();
            let c = ctx(name, r);
            let z = cgp_invariant(&c.graph, &c.omega, &c.level).unwrap();
            let zero = vec![ComplexAP::zero(PREC + 16); c.rank()];
            let g0 = generating_function_with(&c.graph, &c.coset, &c.lambda, &zero).unwrap();
            let rel = (&z - &g0).abs_f64() / z.abs_f64().max(1e-300);
            let secs = t.elapsed().as_secs_f64();
            out.check(rel <= 1e-18 && secs < 5.0, format!("{name} r={r}: rel {rel:.1e}, {secs:.2}s"));
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let mut pairs = 0;
    for name in GRAPHS {
        let t = Instant::now();
        let mut worst = 0f64;
        for r in LEVELS {
            let c = ctx(name, r);
            let (w, n) = coefficient_identity_sweep(&c, &Rat::from_integer(400)).unwrap();
            worst = worst.max(w);
            pairs += n;
        }
        let secs = t.elapsed().as_secs_f64();
        out.check(worst <= 1e-18 && secs < 60.0, format!("{name}: max diff {worst:.1e}, {secs:.1}s"));
    }
    out.notes.push(format!("{pairs} (nu, l) pairs"));
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let taus = [Complex64::new(0.0, 0.2), Complex64::new(0.0, 0.1), Complex64::new(0.0, 0.05), sector(0.1)];
    let mut worst = 0f64;
    for name in GRAPHS {
        for r in LEVELS {
            let c = ctx(name, r);
            for tau in taus {
                let rep = central_identity_check(&ComplexAP::from_c64(tau, PREC), 1e-15, &c).unwrap();
                worst = worst.max(rep.diff);
                out.check(rep.pass, format!("{name} r={r} tau={tau}: diff {:.1e} > bound {:.1e}", rep.diff, rep.bound));
            }
        }
    }
    out.notes.push(format!("max diff {worst:.1e}"));
    out
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    for name in GRAPHS {
        for r in LEVELS {
            let c = ctx(name, r);
            let z = cgp_invariant(&c.graph, &c.omega, &c.level).unwrap();
            let p = perturbative_coeffs(&c, 2).unwrap();
            let app = radial_approach(&c, &z, &TS, (0.0, 1.0), 1e-25).unwrap();
            let sec = radial_approach(&c, &z, &TS, (sector(1.0).re, sector(1.0).im), 1e-25).unwrap();
            let rems = remainder_order_check(&c, &p, &[0, 2], &TS, (0.0, 1.0), 1e-25).unwrap();
            let slopes_ok = rems.iter().all(|rep| (rep.slope - (rep.order as f64 + 1.0)).abs() <= 0.3);
            let ok = strictly_decreasing(&app) && strictly_decreasing(&sec) && slopes_ok;
            out.check(
                ok,
                format!(
                    "{name} r={r}: |Zhat-Z| {:?}, sector {:?}, slopes {:.2}/{:.2}",
                    app.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>(),
                    sec.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>(),
                    rems[0].slope,
                    rems[1].slope
                ),
            );
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let t = Instant::now();
    let mut worst = 0f64;
    for name in GRAPHS {
        for r in LEVELS {
            let c = ctx(name, r);
            if c.rank() > 2 {
                continue;
            }
            for tau in [Complex64::new(0.0, 0.1), sector(0.1)] {
                let q = contour_integral(tau, &ContourSpec::default(), &c).unwrap();
                let v = plumbtop::radial::radial_eval(&ComplexAP::from_c64(tau, PREC), 1e-20, &c).unwrap();
                let v = v.value.to_c64();
                let rel = (q.value - v).norm() / v.norm();
                worst = worst.max(rel);
                out.check(rel <= 1e-6, format!("{name} r={r} tau={tau}: rel {rel:.1e}"));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    out.check(secs < 120.0, format!("runtime {secs:.1}s"));
    out.notes.push(format!("max rel {worst:.1e}, {secs:.1}s"));
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut worst = 0f64;
    for name in GRAPHS {
        for r in LEVELS {
            let c = ctx(name, r);
            let p = perturbative_coeffs(&c, 3).unwrap();
            let h = hadamard_coeffs(&c, 3).unwrap();
            let d = p.coeffs.iter().zip(&h.coeffs).map(|(a, b)| (a - b).abs_f64()).fold(0.0, f64::max);
            worst = worst.max(d);
            out.check(d <= 1e-12, format!("{name} r={r}: {d:.1e}"));
        }
    }
    out.notes.push(format!("max diff {worst:.1e}"));
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut worst = (0f64, 0f64);
    for name in GRAPHS {
        for r in LEVELS {
            let c = ctx(name, r);
            if c.rank() > RANK_CAP {
                continue;
            }
            let p = perturbative_coeffs(&c, 1).unwrap();
            let bc = borel_coefficients(&c, 2, 64, 64).unwrap();
            let m = c.rank() as f64;
            for l in 0..2 {
                let gam = rug::Float::with_val(64, m / 2.0 + l as f64).gamma().to_f64();
                // sigma_l = (-1)^l
                let sigma = if l % 2 == 0 { 1.0 } else { -1.0 };
                let d = (bc.even[l] * gam - p.coeffs[l].to_c64() * sigma).norm();
                worst.0 = worst.0.max(d);
                out.check(d <= 1e-6, format!("{name} r={r} l={l}: {d:.1e}"));
            }
            let odd = bc.odd.iter().map(|o| o.norm()).fold(0.0, f64::max);
            worst.1 = worst.1.max(odd);
            out.check(odd <= 1e-8, format!("{name} r={r}: odd {odd:.1e}"));
        }
    }
    out.notes.push(format!("sigma_l = (-1)^l, max diff {:.1e}, max odd {:.1e}", worst.0, worst.1));
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    for (inst, want) in hand_examples() {
        match (reciprocity_check(&inst, PREC), want) {
            (Ok(rep), Some((re, im))) => {
                let d = (rep.lhs.to_c64() - Complex64::new(re as f64, im as f64)).norm();
                out.check(rep.pass && d < 1e-40, format!("hand {inst:?}: lhs {}", rep.lhs));
            }
            (Err(plumbtop::Error::Hypothesis(_)), None) => {}
            (r, _) => out.check(false, format!("hand {inst:?}: {:?}", r.map(|x| x.diff))),
        }
    }
    let mut worst = 0f64;
    for inst in random_family(2024, 50) {
        match reciprocity_check(&inst, PREC) {
            Ok(rep) => {
                worst = worst.max(rep.diff);
                out.check(rep.diff <= 1e-20, format!("{inst:?}: {:.1e}", rep.diff));
            }
            Err(e) => out.check(false, format!("{inst:?}: {e}")),
        }
    }
    out.notes.push(format!("50 random, max diff {worst:.1e}"));
    out
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::new();
    let c = ctx("e1", 5);
    let order = Rat::from_integer(20);
    let one = |s: i64| zhat_qseries(&c.graph, &c.lat, &plumbtop::model::SpincStructure { rep: vec![s] }, &order).unwrap();
    let z0 = one(0);
    out.check(
        z0.terms.len() == 1 && z0.terms.get(&Rat::from_integer(0)) == Some(&Rat::from_integer(-2)),
        format!("E1 s=0: {:?}", z0.terms),
    );
    for s in [2, 4] {
        let z = one(s);
        out.check(
            z.terms.len() == 1 && z.terms.get(&Rat::new(1, 3)) == Some(&Rat::from_integer(1)),
            format!("E1 s={s}: {:?}", z.terms),
        );
    }
    let mut count = 0;
    for name in GRAPHS {
        let c = ctx(name, 2);
        let e = c.delta_exponent() + Rat::from_integer(20);
        // the principal value halves every expansion at a vertex of degree >= 3
        let scale = Rat::from_integer(1 << c.delta.iter().filter(|&&d| d >= 3).count());
        for s in spinc_enumerate(&c.lat, &c.delta) {
            let z = zhat_qseries(&c.graph, &c.lat, &s, &e).unwrap();
            count += z.terms.len();
            if let Some((x, v)) = z.terms.iter().find(|(_, v)| !v.is_integer()) {
                out.check(false, format!("{name} s={:?}: coefficient {v} at q^{x}", s.rep));
            }
            let neg: Vec<i64> = s.rep.iter().map(|x| -x).collect();
            let conj = zhat_qseries(&c.graph, &c.lat, &canon_spinc(&c.lat, &c.delta, &neg).unwrap(), &e).unwrap();
            let mut sum = z.terms.clone();
            for (x, v) in &conj.terms {
                *sum.entry(*x).or_insert_with(|| Rat::from_integer(0)) += v;
            }
            let weak = z.terms.values().all(|v| (v * scale).is_integer()) && sum.values().all(|v| v.is_integer());
            out.check(weak, format!("{name}: s={:?} not integral after scaling by {scale} or adding -s", s.rep));
        }
    }
    out.notes.push(format!("{count} coefficients"));
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checks = 0usize;
    for name in GRAPHS {
        for r in LEVELS {
            let c = ctx(name, r);
            let n = c.rank();
            let h = homology_classes(&c.lat);
            let spins = spin_enumerate(&c.lat).unwrap();
            let classes = spinc_enumerate(&c.lat, &c.delta);
            out.check(classes.len() as i64 == c.lat.det.abs(), format!("{name}: |Spin^c| != |det B|"));
            for s in &spins {
                let mut image: Vec<_> = h.iter().map(|b| spinc_from_pair(&c.lat, &c.delta, b, s).unwrap()).collect();
                image.sort();
                image.dedup();
                out.check(image.len() == classes.len(), format!("{name}: sigma not onto for s={:?}", s.s));
            }
            for _ in 0..20 {
                let k: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
                let j: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
                let bk = c.lat.mul_b(&k);
                let a = &h[rng.random_range(0..h.len())];
                let a2 = HomologyClass { rep: a.rep.iter().zip(&bk).map(|(x, y)| x + y).collect() };
                let s = &spins[rng.random_range(0..spins.len())];
                let s2 = SpinStructure { s: s.s.iter().zip(&j).map(|(x, y)| x + 2 * y).collect() };
                let z = z_r_sum(&c.level, &c.omega, &c.graph, &c.lat, a, s, &h, &h).unwrap();
                let z2 = z_r_sum(&c.level, &c.omega, &c.graph, &c.lat, &a2, &s2, &h, &h).unwrap();
                let ell: Vec<i64> = c.delta.iter().zip(&k).map(|(d, x)| d + 2 * x).collect();
                let ell2: Vec<i64> = ell.iter().zip(c.lat.mul_b(&j)).map(|(x, y)| x + 2 * y).collect();
                let ok = (&z - &z2).abs_f64() <= 1e-20
                    && quadratic_refinement(a, s, &c.lat) == quadratic_refinement(&a2, &s2, &c.lat)
                    && omega_eval(&c.omega, a) == omega_eval(&c.omega, &a2)
                    && rokhlin(s, &c.lat) == rokhlin(&s2, &c.lat)
                    && canon_spinc(&c.lat, &c.delta, &ell).unwrap() == canon_spinc(&c.lat, &c.delta, &ell2).unwrap();
                checks += 1;
                out.check(ok, format!("{name} r={r}: shift k={k:?} j={j:?}"));
            }
        }
    }
    out.notes.push(format!("{checks} randomized shifts"));
    out
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "dual-path CGP invariant", criterion_1),
        (2, "coefficient identity", criterion_2),
        (3, "central identity", criterion_3),
        (4, "radial limit and remainder slopes", criterion_4),
        (5, "contour representation", criterion_5),
        (6, "route equality", criterion_6),
        (7, "Borel consistency", criterion_7),
        (8, "Gaussian reciprocity", criterion_8),
        (9, "q-series hand values and integrality", criterion_9),
        (10, "well-definedness properties", criterion_10),
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = 0;
    for (k, label, run) in criteria {
        if only.is_some_and(|o| o != k) {
            continue;
        }
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        let status = if out.failures.is_empty() { "PASS" } else { "FAIL" };
        let notes = if out.notes.is_empty() { String::new() } else { format!(" [{}]", out.notes.join("; ")) };
        println!("criterion {k:>2} {status} {label} ({secs:.1}s){notes}");
        for f in &out.failures {
            let known = KNOWN_FAILURES.iter().any(|(c, g)| *c == k && f.starts_with(&format!("{g} ")));
            if !known {
                unexpected += 1;
            }
            println!("    {} {f}", if known { "known:" } else { "failed:" });
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
