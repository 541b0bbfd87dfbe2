//! JSON file formats: graphs with optional colors/weights/cycles,
//! polyhedra as sheet + planar coordinates, horocyclic polygons as
//! disk-model bases and canonical sizes.

use crate::graph::{edge, ColoredGraph, CycleCover, EdgeColor, WeightedGraph};
use crate::horocycle::{HorocyclicPolygon, HorocycleError};
use crate::lp::Rat;
use crate::minkowski::Sheet;
use crate::polyhedron::{IdealPolyhedron, IdealVertex, PolyhedronError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("vertex {index} is not on the quadric: stored x2 = {stored}, expected {expected}")]
    NotOnQuadric {
        index: usize,
        stored: f64,
        expected: f64,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Exact rational weight, in units of π when `pi` is set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeightTriple {
    pub num: i64,
    pub den: i64,
    pub pi: bool,
}

impl WeightTriple {
    pub fn to_rational(&self) -> Result<Rat, IoError> {
        if self.den == 0 {
            return Err(IoError::Malformed("weight with zero denominator".into()));
        }
        Ok(BigRational::new(BigInt::from(self.num), BigInt::from(self.den)))
    }

    pub fn from_rational(r: &Rat, pi: bool) -> Result<Self, IoError> {
        let num = r.numer().to_i64();
        let den = r.denom().to_i64();
        match (num, den) {
            (Some(num), Some(den)) => Ok(WeightTriple { num, den, pi }),
            _ => Err(IoError::Malformed(format!(
                "weight {r} does not fit the integer triple encoding"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: usize,
    pub v: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightTriple>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<EdgeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<[Vec<usize>; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Build the colored graph. Colors come from explicit tags, else from
    /// the cycles; a graph with neither is returned uncolored (empty color
    /// tags) for the cover search to fill in.
    pub fn to_colored(&self) -> Result<(ColoredGraph, Option<BTreeMap<(usize, usize), Rat>>), IoError> {
        let mut edges_set: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut explicit: BTreeMap<(usize, usize), EdgeColor> = BTreeMap::new();
        let mut weights: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        let mut pi_flags: BTreeSet<bool> = BTreeSet::new();
        for e in &self.edges {
            if e.u >= self.n || e.v >= self.n || e.u == e.v {
                return Err(IoError::Malformed(format!("bad edge ({}, {})", e.u, e.v)));
            }
            let key = edge(e.u, e.v);
            if !edges_set.insert(key) {
                return Err(IoError::Malformed(format!("repeated edge ({}, {})", e.u, e.v)));
            }
            if let Some(c) = &e.color {
                let col = match c.as_str() {
                    "r" | "red" => EdgeColor::Red,
                    "b" | "blue" => EdgeColor::Blue,
                    other => {
                        return Err(IoError::Malformed(format!("unknown color {other:?}")))
                    }
                };
                explicit.insert(key, col);
            }
            if let Some(w) = &e.weight {
                weights.insert(key, w.to_rational()?);
                pi_flags.insert(w.pi);
            }
        }
        if pi_flags.len() > 1 {
            return Err(IoError::Malformed(
                "mixing pi and plain weights in one graph".into(),
            ));
        }
        let cover = self.cycles.clone().map(|cycles| CycleCover { cycles });
        let graph = if let Some(cover) = cover {
            let mut g = ColoredGraph::from_cover(self.n, &edges_set, cover)
                .map_err(|e| IoError::Malformed(e.to_string()))?;
            // Explicit colors must agree with the cover-derived ones.
            for (k, c) in &explicit {
                if g.colors.get(k) != Some(c) {
                    return Err(IoError::Malformed(format!(
                        "edge {k:?} color disagrees with the cycles"
                    )));
                }
            }
            let _ = &mut g;
            g
        } else {
            let mut colors = BTreeMap::new();
            for &k in &edges_set {
                if let Some(c) = explicit.get(&k) {
                    colors.insert(k, *c);
                }
            }
            if !colors.is_empty() && colors.len() != edges_set.len() {
                return Err(IoError::Malformed(
                    "either color every edge or none".into(),
                ));
            }
            ColoredGraph {
                n: self.n,
                colors,
                cover: None,
            }
        };
        let w = if weights.is_empty() { None } else { Some(weights) };
        Ok((graph, w))
    }

    pub fn from_weighted(wg: &WeightedGraph, note: Option<String>) -> Result<Self, IoError> {
        let mut edges = Vec::new();
        for (&(u, v), c) in &wg.graph.colors {
            let w = wg.weights.get(&(u, v));
            edges.push(EdgeEntry {
                u,
                v,
                color: Some(match c {
                    EdgeColor::Red => "r".into(),
                    EdgeColor::Blue => "b".into(),
                }),
                weight: w
                    .map(|r| WeightTriple::from_rational(r, true))
                    .transpose()?,
            });
        }
        Ok(GraphFile {
            n: wg.graph.n,
            edges,
            cycles: wg.graph.cover.as_ref().map(|c| c.cycles.clone()),
            note,
        })
    }
}

/// Reconstruct a weighted graph from parsed parts; weights must cover the
/// edge set exactly.
pub fn weighted_from_parts(
    graph: ColoredGraph,
    weights: BTreeMap<(usize, usize), Rat>,
) -> Result<WeightedGraph, IoError> {
    for k in weights.keys() {
        if !graph.colors.contains_key(k) {
            return Err(IoError::Malformed(format!("weight on unknown edge {k:?}")));
        }
    }
    let zero_flagged: BTreeSet<(usize, usize)> = weights
        .iter()
        .filter(|(_, w)| w.is_zero())
        .map(|(&k, _)| k)
        .collect();
    Ok(WeightedGraph {
        graph,
        weights,
        zero_flagged,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub sheet: String,
    pub u0: f64,
    pub u1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Never written; accepted on input only to cross-check that the point
    /// sits on the quadric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyhedronFile {
    pub vertices: Vec<VertexEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PolyhedronFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_vertices(&self, tol: f64) -> Result<Vec<IdealVertex>, IoError> {
        let mut out = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let sheet = match v.sheet.as_str() {
                "+" | "plus" => Sheet::Plus,
                "-" | "minus" => Sheet::Minus,
                other => return Err(IoError::Malformed(format!("unknown sheet {other:?}"))),
            };
            let vert = IdealVertex::new(sheet, v.u0, v.u1);
            if let Some(stored) = v.x2 {
                let expected = vert.embed().x2;
                if (stored - expected).abs() > tol.max(1e-12) * expected.abs().max(1.0) {
                    return Err(IoError::NotOnQuadric {
                        index: i,
                        stored,
                        expected,
                    });
                }
            }
            out.push(vert);
        }
        Ok(out)
    }

    pub fn from_polyhedron(poly: &IdealPolyhedron, note: Option<String>) -> Self {
        PolyhedronFile {
            vertices: poly
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| VertexEntry {
                    sheet: match v.sheet {
                        Sheet::Plus => "+".into(),
                        Sheet::Minus => "-".into(),
                    },
                    u0: v.u0,
                    u1: v.u1,
                    label: Some(poly.labels[i].clone()),
                    x2: None,
                })
                .collect(),
            note,
        }
    }

    pub fn build(&self, tol: f64) -> Result<IdealPolyhedron, BuildError> {
        let verts = self.to_vertices(tol)?;
        Ok(IdealPolyhedron::build(verts)?)
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Polyhedron(#[from] PolyhedronError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonFile {
    /// Base points as angles on the disk-model boundary circle.
    pub bases: Vec<f64>,
    /// Canonical sizes: half-plane diameters (1/height at the base ∞).
    pub sizes: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PolygonFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<HorocyclicPolygon, HorocycleError> {
        HorocyclicPolygon::from_disk(&self.bases, &self.sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_c2, verify_w1_w2};

    #[test]
    fn graph_roundtrip_with_weights() {
        let text = r#"{
            "n": 5,
            "edges": [
                {"u": 0, "v": 1, "color": "b", "weight": {"num": -1, "den": 2, "pi": true}},
                {"u": 0, "v": 2, "color": "b", "weight": {"num": -1, "den": 2, "pi": true}},
                {"u": 0, "v": 3, "color": "b", "weight": {"num": -1, "den": 2, "pi": true}},
                {"u": 0, "v": 4, "color": "b", "weight": {"num": -1, "den": 2, "pi": true}},
                {"u": 1, "v": 2, "color": "r", "weight": {"num": 1, "den": 4, "pi": true}},
                {"u": 2, "v": 3, "color": "r", "weight": {"num": 1, "den": 4, "pi": true}},
                {"u": 3, "v": 4, "color": "r", "weight": {"num": 1, "den": 4, "pi": true}},
                {"u": 1, "v": 4, "color": "r", "weight": {"num": 1, "den": 4, "pi": true}}
            ],
            "cycles": [[0], [1, 2, 3, 4]]
        }"#;
        let file = GraphFile::parse(text).unwrap();
        let (graph, weights) = file.to_colored().unwrap();
        assert!(check_c2(&graph).unwrap().ok);
        let wg = weighted_from_parts(graph, weights.unwrap()).unwrap();
        verify_w1_w2(&wg).unwrap();
        let back = GraphFile::from_weighted(&wg, None).unwrap();
        let json = serde_json::to_string(&back).unwrap();
        let again = GraphFile::parse(&json).unwrap();
        assert_eq!(again.n, 5);
        assert_eq!(again.edges.len(), 8);
    }

    #[test]
    fn polyhedron_quadric_check() {
        let text = r#"{
            "vertices": [
                {"sheet": "+", "u0": 0.0, "u1": 0.0, "x2": 1.5},
                {"sheet": "-", "u0": 1.0, "u1": 0.0},
                {"sheet": "-", "u0": 0.0, "u1": 1.0},
                {"sheet": "-", "u0": -1.0, "u1": -1.0}
            ]
        }"#;
        let file = PolyhedronFile::parse(text).unwrap();
        assert!(matches!(
            file.to_vertices(1e-9),
            Err(IoError::NotOnQuadric { index: 0, .. })
        ));
    }

    #[test]
    fn bad_color_rejected() {
        let text = r#"{"n": 2, "edges": [{"u": 0, "v": 1, "color": "green"}]}"#;
        let file = GraphFile::parse(text).unwrap();
        assert!(file.to_colored().is_err());
    }
}
