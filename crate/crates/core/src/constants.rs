//! Homological constants: linking form, the spin-refined quadratic form,
//! Rokhlin invariant, omega evaluation, z_r(omega, s) and lambda.

use rayon::prelude::*;

use crate::cgp::{torsion, Level};
use crate::error::{Error, Result};
use crate::model::{
    homology_classes, spinc_decompose, spinc_enumerate, CohomologyClass, HomologyClass, LatticeModel, PlumbingGraph,
    SpinStructure, SpincStructure,
};
use crate::precision::{e_rat, frac, ordered_sum, ComplexAP};
use crate::Rat;

fn rint(x: i64) -> Rat {
    Rat::from_integer(x as i128)
}

/// lk(a, b) = a^T B^{-1} b mod 1, in [0, 1).
pub fn linking_form(a: &HomologyClass, b: &HomologyClass, lat: &LatticeModel) -> Rat {
    frac(&lat.binv_pair(&a.rep, &b.rep))
}

/// q_s(a) = a^T B^{-1} a + a^T s mod 2, in [0, 2).
pub fn quadratic_refinement(a: &HomologyClass, s: &SpinStructure, lat: &LatticeModel) -> Rat {
    let lin: i64 = a.rep.iter().zip(&s.s).map(|(x, y)| x * y).sum();
    crate::model::mod2(&(lat.binv_pair(&a.rep, &a.rep) + rint(lin)))
}

/// mu(M, s) = -|V| - s^T B s mod 4.
pub fn rokhlin(s: &SpinStructure, lat: &LatticeModel) -> i64 {
    let bs = lat.mul_b(&s.s);
    let sbs: i64 = s.s.iter().zip(&bs).map(|(x, y)| x * y).sum();
    (-(lat.rank() as i64) - sbs).rem_euclid(4)
}

/// omega(a) = sum_v a_v omega_v mod 2.
pub fn omega_eval(omega: &CohomologyClass, a: &HomologyClass) -> Rat {
    let s: Rat = a.rep.iter().zip(omega.values()).map(|(&x, w)| w * rint(x)).sum();
    crate::model::mod2(&s)
}

/// lambda = Delta_-^{-|V|} e(-tr B (r-1)^2 / (4r)) T(M, [omega]).
pub fn lambda_constant(lvl: &Level, omega: &CohomologyClass, g: &PlumbingGraph) -> ComplexAP {
    let p = lvl.prec;
    let tr: i64 = g.weights().iter().sum();
    let ph = Rat::new(-(tr as i128) * ((lvl.r - 1) as i128).pow(2), 4 * lvl.r as i128);
    let t = torsion(g, omega, p + 16);
    let dm = lvl.delta_minus.with_prec(p + 16).powi(-(g.len() as i64));
    (&(&dm * &e_rat(&ph, p + 16)) * &t).with_prec(p)
}

/// The Gauss sum defining z_r for an explicit pair (b, s) and explicit lists of
/// representatives for H_1 (one per class each for a and f).
#[allow(clippy::too_many_arguments)]
pub fn z_r_sum(
    lvl: &Level,
    omega: &CohomologyClass,
    g: &PlumbingGraph,
    lat: &LatticeModel,
    b: &HomologyClass,
    s: &SpinStructure,
    reps_a: &[HomologyClass],
    reps_f: &[HomologyClass],
) -> Result<ComplexAP> {
    let r = lvl.r;
    let wp = lvl.prec + 16;
    let h = lat.order();
    if reps_a.len() != h || reps_f.len() != h {
        return Err(Error::Precondition(format!("need {h} representatives of H_1")));
    }
    let bs = lat.mul_b(&s.s);
    let sbs: i64 = s.s.iter().zip(&bs).map(|(x, y)| x * y).sum();
    let mu = rint(-(lat.rank() as i64) - sbs);
    let lk = |x: &[i64], y: &[i64]| lat.binv_pair(x, y);
    let om_half = |a: &HomologyClass| -> Rat {
        a.rep.iter().zip(omega.values()).map(|(&x, w)| w * rint(x)).sum::<Rat>() / rint(2)
    };
    let sum_phases = |phases: Vec<Rat>| -> ComplexAP {
        ordered_sum(phases.par_iter().map(|q| e_rat(q, wp)), || ComplexAP::zero(wp), |a, b| &a + &b)
    };
    let (pref, total) = match r.rem_euclid(4) {
        1 | 3 => {
            let plus = r % 4 == 1;
            let k = if plus { rint((r - 1) / 4) } else { rint((r + 1) / 4) };
            let mut phases = Vec::with_capacity(h * h);
            for a in reps_a {
                let aa = lk(&a.rep, &a.rep);
                let wa = om_half(a);
                for f in reps_f {
                    let ff = lk(&f.rep, &f.rep);
                    let q = if plus {
                        let fb: Vec<i64> = f.rep.iter().zip(&b.rep).map(|(x, y)| x - y).collect();
                        -k * aa + lk(&a.rep, &fb) - wa + ff
                    } else {
                        let fb: Vec<i64> = f.rep.iter().zip(&b.rep).map(|(x, y)| x + y).collect();
                        -k * aa - lk(&a.rep, &fb) - wa - ff
                    };
                    phases.push(q);
                }
            }
            let sign = if plus { -mu } else { mu };
            let pref = -e_rat(&(sign / rint(4)), wp);
            (pref, sum_phases(phases))
        }
        2 => {
            let quarter = Rat::new(r as i128, 4);
            let phases: Vec<Rat> = reps_a
                .iter()
                .map(|a| {
                    let lin: i64 = a.rep.iter().zip(&s.s).map(|(x, y)| x * y).sum();
                    let qs = lk(&a.rep, &a.rep) + rint(lin);
                    -quarter * qs - lk(&a.rep, &b.rep) - om_half(a)
                })
                .collect();
            let sq = rug::Float::with_val(wp, h as u64).sqrt();
            (ComplexAP::from_real(sq), sum_phases(phases))
        }
        _ => return Err(Error::BadLevel(r)),
    };
    let t = torsion(g, omega, wp);
    let scale = rug::Float::with_val(wp, h as u64).recip();
    Ok((&(&t * &pref) * &total).scale(&scale).with_prec(lvl.prec))
}

/// z_r(omega, s) through the canonical decomposition of s.
pub fn z_r_constant(
    lvl: &Level,
    omega: &CohomologyClass,
    spinc: &SpincStructure,
    g: &PlumbingGraph,
    lat: &LatticeModel,
) -> Result<ComplexAP> {
    let delta = g.degrees();
    let (b, s) = spinc_decompose(&spinc.rep, lat, &delta)?;
    let reps = homology_classes(lat);
    z_r_sum(lvl, omega, g, lat, &b, &s, &reps, &reps)
}

/// z_r(omega, s) for every canonical Spin^c structure.
#[derive(Clone, Debug)]
pub struct ZrCoefficientTable {
    pub r: i64,
    pub entries: Vec<(SpincStructure, ComplexAP)>,
}

impl ZrCoefficientTable {
    pub fn new(lvl: &Level, omega: &CohomologyClass, g: &PlumbingGraph, lat: &LatticeModel) -> Result<Self> {
        let delta = g.degrees();
        let entries = spinc_enumerate(lat, &delta)
            .into_iter()
            .map(|sp| {
                let z = z_r_constant(lvl, omega, &sp, g, lat)?;
                Ok((sp, z))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ZrCoefficientTable { r: lvl.r, entries })
    }

    pub fn get(&self, s: &SpincStructure) -> Option<&ComplexAP> {
        self.entries.iter().find(|(k, _)| k == s).map(|(_, v)| v)
    }
}
