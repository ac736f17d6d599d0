use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_traits::Zero;
use serde::Deserialize;

use super::snf::{leading_minors, IMat};
use crate::error::{Error, Result};
use crate::Rat;

/// Weighted tree. Vertices are stored in sorted id order and every vector or
/// matrix in the crate uses that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlumbingGraph {
    ids: Vec<String>,
    weights: Vec<i64>,
    edges: Vec<(usize, usize)>,
}

impl PlumbingGraph {
    pub fn new<S: AsRef<str>>(vertices: &[(S, i64)], edges: &[(S, S)]) -> Result<Self> {
        let mut vs: Vec<(String, i64)> = vertices.iter().map(|(s, w)| (s.as_ref().to_string(), *w)).collect();
        if vs.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        vs.sort();
        for pair in vs.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", pair[0].0)));
            }
        }
        let pos: HashMap<&str, usize> = vs.iter().enumerate().map(|(i, (s, _))| (s.as_str(), i)).collect();
        let mut es = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *pos.get(a).ok_or_else(|| Error::InvalidGraph(format!("edge mentions unknown vertex {a}")))?;
            let ib = *pos.get(b).ok_or_else(|| Error::InvalidGraph(format!("edge mentions unknown vertex {b}")))?;
            if ia == ib {
                return Err(Error::NotATree(format!("self-loop at {a}")));
            }
            es.push((ia.min(ib), ia.max(ib)));
        }
        es.sort();
        let n = vs.len();
        if es.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::NotATree("repeated edge".into()));
        }
        if es.len() + 1 != n {
            return Err(Error::NotATree(format!("{} edges for {} vertices", es.len(), n)));
        }
        // connectivity by union-find
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &es {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::NotATree(format!("cycle through {} - {}", vs[a].0, vs[b].0)));
            }
            parent[ra] = rb;
        }
        let g = PlumbingGraph {
            ids: vs.iter().map(|(s, _)| s.clone()).collect(),
            weights: vs.iter().map(|(_, w)| *w).collect(),
            edges: es,
        };
        for (k, m) in leading_minors(&g.adjacency()).into_iter().enumerate() {
            let want_negative = k % 2 == 0;
            if m == 0 || (m < 0) != want_negative {
                return Err(Error::NotNegativeDefinite { order: k + 1, value: m });
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> i64 {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count() as i64
    }

    /// delta = (deg v)_v.
    pub fn degrees(&self) -> Vec<i64> {
        (0..self.len()).map(|v| self.degree(v)).collect()
    }

    pub fn adjacency(&self) -> IMat {
        let n = self.len();
        let mut b = vec![vec![0i64; n]; n];
        for (i, w) in self.weights.iter().enumerate() {
            b[i][i] = *w;
        }
        for &(a, c) in &self.edges {
            b[a][c] = 1;
            b[c][a] = 1;
        }
        b
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }
}

/// omega~ in (Q/2Z)^V, stored reduced to [0, 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    omega: Vec<Rat>,
}

impl CohomologyClass {
    /// Checks omega_v not integral and B omega in 2Z^V.
    pub fn new(g: &PlumbingGraph, omega: Vec<Rat>) -> Result<Self> {
        if omega.len() != g.len() {
            return Err(Error::InvalidGraph(format!("omega has {} entries for {} vertices", omega.len(), g.len())));
        }
        let omega: Vec<Rat> = omega.into_iter().map(|q| mod2(&q)).collect();
        for (v, q) in omega.iter().enumerate() {
            if q.is_integer() {
                return Err(Error::OmegaIntegral { vertex: g.ids[v].clone() });
            }
        }
        let b = g.adjacency();
        for (v, row) in b.iter().enumerate() {
            let s: Rat = row.iter().zip(&omega).map(|(&x, q)| q * Rat::from_integer(x as i128)).sum();
            let half = s / Rat::from_integer(2);
            if !half.is_integer() {
                return Err(Error::OmegaNotAdmissible { vertex: g.ids[v].clone(), value: s.to_string() });
            }
        }
        Ok(CohomologyClass { omega })
    }

    pub fn values(&self) -> &[Rat] {
        &self.omega
    }

    pub fn lcm_denominator(&self) -> i128 {
        self.omega.iter().fold(1i128, |acc, q| num_integer::lcm(acc, *q.denom()))
    }
}

pub fn mod2(q: &Rat) -> Rat {
    let two_d = 2 * q.denom();
    Rat::new(q.numer().rem_euclid(two_d), *q.denom())
}

#[derive(Deserialize)]
struct RawVertex {
    id: String,
    weight: i64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct RawGraph {
    vertices: Vec<RawVertex>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    #[serde(default)]
    omega: BTreeMap<String, RawRational>,
}

pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses the graph JSON schema and validates graph and omega.
pub fn parse_graph_json(text: &str) -> Result<(PlumbingGraph, CohomologyClass)> {
    let raw: RawGraph = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let vertices: Vec<(String, i64)> = raw.vertices.iter().map(|v| (v.id.clone(), v.weight)).collect();
    let g = PlumbingGraph::new(&vertices, &raw.edges)?;
    for k in raw.omega.keys() {
        if g.index_of(k).is_none() {
            return Err(Error::InvalidGraph(format!("omega given for unknown vertex {k}")));
        }
    }
    let mut omega = Vec::with_capacity(g.len());
    for id in g.ids() {
        let q = match raw.omega.get(id) {
            Some(RawRational::Int(i)) => Rat::from_integer(*i as i128),
            Some(RawRational::Text(s)) => parse_rational(s)?,
            None => return Err(Error::InvalidGraph(format!("omega missing at vertex {id}"))),
        };
        omega.push(q);
    }
    let w = CohomologyClass::new(&g, omega)?;
    Ok((g, w))
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<(PlumbingGraph, CohomologyClass)> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
    parse_graph_json(&text)
}
