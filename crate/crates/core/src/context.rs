use std::path::Path;

use crate::cgp::{CosetTable, Level};
use crate::constants::{lambda_constant, ZrCoefficientTable};
use crate::error::Result;
use crate::model::{lattice_model, load_graph, CohomologyClass, LatticeModel, PlumbingGraph};
use crate::precision::ComplexAP;
use crate::Rat;

/// Everything derived once from (graph, omega, r, precision).
#[derive(Clone, Debug)]
pub struct Context {
    pub graph: PlumbingGraph,
    pub omega: CohomologyClass,
    pub lat: LatticeModel,
    pub level: Level,
    /// delta = vertex degrees.
    pub delta: Vec<i64>,
    pub prec: u32,
    pub lambda: ComplexAP,
    /// Coset table at working precision prec + 16.
    pub coset: CosetTable,
    pub zr: ZrCoefficientTable,
}

impl Context {
    pub fn new(graph: PlumbingGraph, omega: CohomologyClass, r: i64, prec: u32) -> Result<Self> {
        let lat = lattice_model(&graph)?;
        let level = Level::new(r, prec)?;
        let delta = graph.degrees();
        let lambda = lambda_constant(&level, &omega, &graph);
        let coset = CosetTable::new(&graph, &omega, r, prec + 16);
        let zr = ZrCoefficientTable::new(&level, &omega, &graph, &lat)?;
        Ok(Context { graph, omega, lat, level, delta, prec, lambda, coset, zr })
    }

    pub fn from_file(path: impl AsRef<Path>, r: i64, prec: u32) -> Result<Self> {
        let (g, w) = load_graph(path)?;
        Context::new(g, w, r, prec)
    }

    pub fn rank(&self) -> usize {
        self.graph.len()
    }

    pub fn r(&self) -> i64 {
        self.level.r
    }

    /// Delta = -(3|V| + tr B)/4.
    pub fn delta_exponent(&self) -> Rat {
        delta_exponent(&self.lat)
    }
}

/// Delta = -(3|V| + tr B)/4.
pub fn delta_exponent(lat: &LatticeModel) -> Rat {
    Rat::new(-(3 * lat.rank() as i128 + lat.trace() as i128), 4)
}
