//! Weakly ideal polyhedra: construction from quadric points, red/blue edge
//! classification, signed exterior dihedral angles, structural invariants,
//! vertex figures, the two-circle generator and its deformation, and the
//! finite-difference rigidity rank test.

use crate::hull::{self, Extremality, HullCombinatorics, HullError};
use crate::minkowski::{
    self, ideal_point, inner, plane_through, quad, Lorentz, ProjPlane, Sheet, Vec4,
};
use crate::numeric;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyhedronError {
    #[error("fewer than 4 vertices ({0})")]
    TooFewVertices(usize),
    #[error("duplicate vertices {0} and {1}")]
    DuplicateVertex(usize, usize),
    #[error("all vertices on one sheet: strongly ideal polyhedra are out of scope")]
    StronglyIdeal,
    #[error("degenerate input: flat polyhedron")]
    FlatPolyhedron,
    #[error("vertex {id} is not extreme ({kind:?})")]
    NonExtremeVertex { id: usize, kind: Extremality },
    #[error("sheet rule and midpoint test disagree on edge ({0}, {1})")]
    ClassificationMismatch(usize, usize),
    #[error("face {0} has a normal that is not space-like")]
    NormalNotSpacelike(usize),
    #[error("normal product {0} out of the arccos domain on edge ({1}, {2})")]
    AngleDomain(f64, usize, usize),
    #[error("structural invariant violated: {0}")]
    StructureViolation(String),
    #[error("polyhedron does not contain the chart points (0,0,±1)")]
    InteriorConditionUnmet,
    #[error("invalid generator input: {0}")]
    BadGeneratorInput(String),
    #[error(transparent)]
    Hull(HullError),
    #[error(transparent)]
    Minkowski(#[from] minkowski::MinkowskiError),
}

impl From<HullError> for PolyhedronError {
    fn from(e: HullError) -> Self {
        match e {
            HullError::DegenerateInput => PolyhedronError::FlatPolyhedron,
            HullError::DuplicatePoint(i, j) => PolyhedronError::DuplicateVertex(i, j),
            HullError::TooFewPoints(n) => PolyhedronError::TooFewVertices(n),
            other => PolyhedronError::Hull(other),
        }
    }
}

/// An ideal vertex given by its sheet and planar coordinates; the embedded
/// point is ideal_point(sheet, u0, u1) and always lies on the quadric.
#[derive(Debug, Clone)]
pub struct IdealVertex {
    pub sheet: Sheet,
    pub u0: f64,
    pub u1: f64,
}

impl IdealVertex {
    pub fn new(sheet: Sheet, u0: f64, u1: f64) -> Self {
        IdealVertex { sheet, u0, u1 }
    }

    pub fn embed(&self) -> Vec4 {
        ideal_point(self.sheet, self.u0, self.u1)
    }
}

pub use crate::graph::EdgeColor;

/// The weighted graph of signed HS exterior dihedral angles, supported on
/// the hull's edge set.
#[derive(Debug, Clone)]
pub struct AngleGraph {
    pub n: usize,
    pub weights: BTreeMap<(usize, usize), f64>,
    pub colors: BTreeMap<(usize, usize), EdgeColor>,
}

impl AngleGraph {
    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.weights.get(&key(u, v)).copied()
    }

    /// θ_v = Σ_u θ(u, v).
    pub fn vertex_weight(&self, v: usize) -> f64 {
        self.weights
            .iter()
            .filter(|((a, b), _)| *a == v || *b == v)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn blue_sum(&self) -> f64 {
        self.weights
            .iter()
            .filter(|(e, _)| self.colors.get(e) == Some(&EdgeColor::Blue))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn red_edges(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.weights
            .iter()
            .filter(|(e, _)| self.colors.get(e) == Some(&EdgeColor::Red))
            .map(|(e, w)| (*e, *w))
    }

    pub fn blue_edges(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.weights
            .iter()
            .filter(|(e, _)| self.colors.get(e) == Some(&EdgeColor::Blue))
            .map(|(e, w)| (*e, *w))
    }
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// A built weakly ideal polyhedron. `points` are the embedded quadric
/// points, `chart` their affine coordinates, ids are input indices.
#[derive(Debug, Clone)]
pub struct IdealPolyhedron {
    pub vertices: Vec<IdealVertex>,
    pub points: Vec<Vec4>,
    pub chart: Vec<[f64; 3]>,
    pub hull: HullCombinatorics,
    pub p: usize,
    pub q: usize,
    pub labels: Vec<String>,
}

/// Interior structure: the red subgraph of each sheet with its boundary
/// cycle (a 1-cycle or 2-cycle in the degenerate cases) and chords.
#[derive(Debug, Clone)]
pub struct SheetComponent {
    pub sheet: Sheet,
    pub vertices: Vec<usize>,
    /// Cyclic boundary; length 1 and 2 encode the degenerate conventions.
    pub boundary_cycle: Vec<usize>,
    pub chords: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct InteriorComplex {
    pub plus: SheetComponent,
    pub minus: SheetComponent,
}

impl InteriorComplex {
    /// The two boundary cycles as a cover (plus first).
    pub fn cycle_cover(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.plus.boundary_cycle.clone(),
            self.minus.boundary_cycle.clone(),
        )
    }
}

/// Per-condition admissibility report for an angle graph.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub a1_ok: bool,
    pub a1_violations: Vec<((usize, usize), f64)>,
    pub a2_ok: bool,
    pub a2_max_residual: f64,
    pub a2_vertex_sums: Vec<(usize, f64, f64)>,
    pub a3_ok: bool,
    pub a3_blue_sum: f64,
    pub a3_equality_expected: bool,
    pub a3_equality_observed: bool,
}

impl AdmissibilityReport {
    pub fn pass(&self) -> bool {
        self.a1_ok && self.a2_ok && self.a3_ok
    }
}

impl IdealPolyhedron {
    /// Hull construction plus all the structural checks: both sheets
    /// populated, every input extreme, every face plane carrying a
    /// space-like normal, red subgraph splitting into the two expected
    /// components, sheet rule agreeing with the midpoint sign.
    pub fn build(vertices: Vec<IdealVertex>) -> Result<Self, PolyhedronError> {
        let n = vertices.len();
        if n < 4 {
            return Err(PolyhedronError::TooFewVertices(n));
        }
        let p = vertices.iter().filter(|v| v.sheet == Sheet::Plus).count();
        let q = n - p;
        if p == 0 || q == 0 {
            return Err(PolyhedronError::StronglyIdeal);
        }
        let points: Vec<Vec4> = vertices.iter().map(|v| v.embed()).collect();
        let chart: Vec<[f64; 3]> = points.iter().map(|pt| [pt.x0, pt.x1, pt.x2]).collect();
        let hull = hull::convex_hull(&chart)?;
        if let Some(&(id, kind)) = hull.non_extreme.first() {
            return Err(PolyhedronError::NonExtremeVertex { id, kind });
        }
        let labels = assign_labels(&vertices);
        let poly = IdealPolyhedron {
            vertices,
            points,
            chart,
            hull,
            p,
            q,
            labels,
        };
        poly.face_planes()?;
        poly.classify_edges()?;
        poly.interior_complex()?;
        Ok(poly)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Outward unit space-like normals of the hull faces, normalized to
    /// ⟨n, n⟩ = 1 and oriented so ⟨n, x⟩ ≤ 0 for every hull point x.
    pub fn face_planes(&self) -> Result<Vec<ProjPlane>, PolyhedronError> {
        let centroid = {
            let mut c = [0.0; 3];
            for pt in &self.chart {
                for k in 0..3 {
                    c[k] += pt[k];
                }
            }
            Vec4::new(
                c[0] / self.n() as f64,
                c[1] / self.n() as f64,
                c[2] / self.n() as f64,
                1.0,
            )
        };
        let mut planes = Vec::with_capacity(self.hull.faces.len());
        for (fi, f) in self.hull.faces.iter().enumerate() {
            let plane = plane_through(&self.points[f[0]], &self.points[f[1]], &self.points[f[2]])
                .map_err(PolyhedronError::Minkowski)?;
            let qn = quad(&plane.n);
            if qn <= 1e-12 * plane.n.euclidean_norm_sqr() {
                return Err(PolyhedronError::NormalNotSpacelike(fi));
            }
            let mut n = plane.n.scale(1.0 / qn.sqrt());
            if inner(&n, &centroid) > 0.0 {
                n = n.scale(-1.0);
            }
            planes.push(ProjPlane { n });
        }
        Ok(planes)
    }

    /// Red ⟺ both endpoints on the same sheet; cross-checked against the
    /// sign of q at the edge midpoint (≤ 0 inside H³, > 0 in dS³).
    pub fn classify_edges(&self) -> Result<BTreeMap<(usize, usize), EdgeColor>, PolyhedronError> {
        let mut colors = BTreeMap::new();
        for e in &self.hull.edges {
            let (u, v) = (e.u, e.v);
            let same = self.vertices[u].sheet == self.vertices[v].sheet;
            let mid = self.points[u].add(&self.points[v]).scale(0.5);
            let qm = quad(&mid);
            let scale = mid.euclidean_norm_sqr();
            let consistent = if same {
                qm <= 1e-9 * scale
            } else {
                qm > -1e-9 * scale
            };
            if !consistent {
                return Err(PolyhedronError::ClassificationMismatch(u, v));
            }
            colors.insert(
                key(u, v),
                if same { EdgeColor::Red } else { EdgeColor::Blue },
            );
        }
        Ok(colors)
    }

    /// The angle graph Θ(P): on each edge the hyperbolic exterior dihedral
    /// angle ϑ = arccos⟨n1, n2⟩ between the outward unit normals, signed
    /// +ϑ on red edges and −ϑ on blue ones.
    pub fn dihedral_angles(&self) -> Result<AngleGraph, PolyhedronError> {
        let planes = self.face_planes()?;
        let colors = self.classify_edges()?;
        let mut weights = BTreeMap::new();
        for e in &self.hull.edges {
            let c = inner(&planes[e.faces[0]].n, &planes[e.faces[1]].n);
            if c.abs() > 1.0 + 1e-9 {
                return Err(PolyhedronError::AngleDomain(c, e.u, e.v));
            }
            let theta = c.clamp(-1.0, 1.0).acos();
            let signed = match colors[&key(e.u, e.v)] {
                EdgeColor::Red => theta,
                EdgeColor::Blue => -theta,
            };
            weights.insert(key(e.u, e.v), signed);
        }
        Ok(AngleGraph {
            n: self.n(),
            weights,
            colors,
        })
    }

    /// Whether vertex v is the single vertex of a 1-cycle (its sheet holds
    /// nobody else), in which case its angle sum is −2π instead of 0.
    pub fn is_apex(&self, v: usize) -> bool {
        let count = match self.vertices[v].sheet {
            Sheet::Plus => self.p,
            Sheet::Minus => self.q,
        };
        count == 1
    }

    /// The red subgraph split by sheet, with boundary cycles and chords.
    pub fn interior_complex(&self) -> Result<InteriorComplex, PolyhedronError> {
        let plus = self.sheet_component(Sheet::Plus)?;
        let minus = self.sheet_component(Sheet::Minus)?;
        Ok(InteriorComplex { plus, minus })
    }

    fn sheet_component(&self, sheet: Sheet) -> Result<SheetComponent, PolyhedronError> {
        let verts: Vec<usize> = (0..self.n())
            .filter(|&v| self.vertices[v].sheet == sheet)
            .collect();
        let red_edges: Vec<(usize, usize)> = self
            .hull
            .edges
            .iter()
            .filter(|e| {
                self.vertices[e.u].sheet == sheet && self.vertices[e.v].sheet == sheet
            })
            .map(|e| (e.u, e.v))
            .collect();

        // Connectivity of the red subgraph on this sheet.
        if verts.len() > 1 {
            let pos: BTreeMap<usize, usize> =
                verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut adj = vec![Vec::new(); verts.len()];
            for &(u, v) in &red_edges {
                adj[pos[&u]].push(pos[&v]);
                adj[pos[&v]].push(pos[&u]);
            }
            let mut seen = vec![false; verts.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            if !seen.iter().all(|&s| s) {
                return Err(PolyhedronError::StructureViolation(format!(
                    "red subgraph of sheet {sheet:?} is disconnected"
                )));
            }
        }

        if verts.len() == 1 {
            return Ok(SheetComponent {
                sheet,
                vertices: verts.clone(),
                boundary_cycle: verts,
                chords: Vec::new(),
            });
        }
        if verts.len() == 2 {
            if red_edges.is_empty() {
                return Err(PolyhedronError::StructureViolation(format!(
                    "two vertices on sheet {sheet:?} without the 2-cycle edge"
                )));
            }
            return Ok(SheetComponent {
                sheet,
                vertices: verts.clone(),
                boundary_cycle: verts,
                chords: Vec::new(),
            });
        }

        // Interior faces of this sheet: hull faces with all vertices here.
        let interior_face: Vec<bool> = self
            .hull
            .faces
            .iter()
            .map(|f| f.iter().all(|&v| self.vertices[v].sheet == sheet))
            .collect();
        let mut boundary = Vec::new();
        let mut chords = Vec::new();
        for e in &self.hull.edges {
            if self.vertices[e.u].sheet != sheet || self.vertices[e.v].sheet != sheet {
                continue;
            }
            let inside = e
                .faces
                .iter()
                .filter(|&&f| interior_face[f])
                .count();
            match inside {
                2 => chords.push((e.u, e.v)),
                _ => boundary.push((e.u, e.v)),
            }
        }
        // The boundary edges must chain into one Hamiltonian cycle.
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(u, v) in &boundary {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        if adj.len() != verts.len() || adj.values().any(|nb| nb.len() != 2) {
            return Err(PolyhedronError::StructureViolation(format!(
                "boundary of sheet {sheet:?} is not a Hamiltonian cycle"
            )));
        }
        let start = verts[0];
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = adj[&start][0];
        while cur != start {
            cycle.push(cur);
            let nb = &adj[&cur];
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
            if cycle.len() > verts.len() {
                return Err(PolyhedronError::StructureViolation(format!(
                    "boundary of sheet {sheet:?} does not close into one cycle"
                )));
            }
        }
        if cycle.len() != verts.len() {
            return Err(PolyhedronError::StructureViolation(format!(
                "boundary cycle of sheet {sheet:?} misses vertices"
            )));
        }
        // Outerplanarity: chords must not interleave along the cycle.
        let pos: BTreeMap<usize, usize> = cycle.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let normalized: Vec<(usize, usize)> = chords
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (pos[&u], pos[&v]);
                (a.min(b), a.max(b))
            })
            .collect();
        for (i, &(a, b)) in normalized.iter().enumerate() {
            for &(c, d) in &normalized[i + 1..] {
                let crossing = (a < c && c < b && b < d) || (c < a && a < d && d < b);
                if crossing {
                    return Err(PolyhedronError::StructureViolation(format!(
                        "chords cross on sheet {sheet:?}"
                    )));
                }
            }
        }
        Ok(SheetComponent {
            sheet,
            vertices: verts,
            boundary_cycle: cycle,
            chords,
        })
    }

    /// The vertex figure at v: incident edges in rotation order with the
    /// turning angles of the projected polygon, computed in the Euclidean
    /// chart a horosphere at v provides. Signs are arranged so red edges
    /// turn anticlockwise; crossing the plane at infinity flips the walk.
    pub fn vertex_figure(&self, v: usize) -> Result<VertexFigure, PolyhedronError> {
        let rotation = self.hull.rotation(v).map_err(PolyhedronError::Hull)?;
        let colors = self.classify_edges()?;
        let vp = &self.points[v];

        // q-orthonormal basis of v-perp modulo v.
        let w0 = Vec4::new(vp.x0, vp.x1, -vp.x2, vp.x3);
        let s0 = inner(vp, &w0);
        let project = |x: &Vec4| -> Vec4 {
            let t = inner(x, vp) / s0;
            x.sub(&w0.scale(t))
        };
        let mut basis: Vec<Vec4> = Vec::new();
        let candidates = [
            Vec4::new(1.0, 0.0, 0.0, 0.0),
            Vec4::new(0.0, 1.0, 0.0, 0.0),
            Vec4::new(0.0, 0.0, 1.0, 0.0),
            Vec4::new(0.0, 0.0, 0.0, 1.0),
        ];
        for c in &candidates {
            if basis.len() == 2 {
                break;
            }
            let mut w = project(c);
            for b in &basis {
                let coef = inner(&w, b);
                w = w.sub(&b.scale(coef));
            }
            let qw = quad(&w);
            if qw > 1e-9 {
                basis.push(w.scale(1.0 / qw.sqrt()));
            }
        }
        if basis.len() != 2 {
            return Err(PolyhedronError::StructureViolation(format!(
                "could not build the horosphere chart at vertex {v}"
            )));
        }

        // Projected neighbor points and their affine side classes.
        let k = rotation.len();
        let mut pts2 = Vec::with_capacity(k);
        let mut signs = Vec::with_capacity(k);
        let base = {
            let u = &self.points[rotation[0]];
            let s = inner(u, vp);
            u.scale(-1.0 / s)
        };
        for &u in &rotation {
            let upt = &self.points[u];
            let s = inner(upt, vp);
            if s.abs() < 1e-12 {
                return Err(PolyhedronError::StructureViolation(format!(
                    "edge ({v}, {u}) tangent to the quadric"
                )));
            }
            let affine = upt.scale(-1.0 / s);
            let d = affine.sub(&base);
            pts2.push([inner(&d, &basis[0]), inner(&d, &basis[1])]);
            signs.push(s > 0.0);
        }

        // Travel directions; a sign change between consecutive corners
        // means the side passes through infinity and the walk reverses.
        let dir = |i: usize| -> [f64; 2] {
            let j = (i + 1) % k;
            let mut d = [pts2[j][0] - pts2[i][0], pts2[j][1] - pts2[i][1]];
            if signs[i] != signs[j] {
                d = [-d[0], -d[1]];
            }
            let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
            [d[0] / n, d[1] / n]
        };
        let mut turnings = Vec::with_capacity(k);
        for i in 0..k {
            let prev = dir((i + k - 1) % k);
            let next = dir(i);
            let cross = prev[0] * next[1] - prev[1] * next[0];
            let dot = prev[0] * next[0] + prev[1] * next[1];
            turnings.push(cross.atan2(dot));
        }
        // Handedness of the chart basis is arbitrary; orient it so red
        // edges turn anticlockwise (an all-blue apex turns through −2π).
        let red_total: f64 = (0..k)
            .filter(|&i| colors[&key(v, rotation[i])] == EdgeColor::Red)
            .map(|i| turnings[i])
            .sum();
        let flip = if red_total.abs() > 1e-12 {
            red_total < 0.0
        } else {
            turnings.iter().sum::<f64>() > 0.0
        };
        if flip {
            for t in &mut turnings {
                *t = -*t;
            }
        }

        let entries: Vec<VertexFigureEntry> = (0..k)
            .map(|i| VertexFigureEntry {
                neighbor: rotation[i],
                edge: key(v, rotation[i]),
                turning: turnings[i],
                chart_point: pts2[i],
            })
            .collect();
        let turning_sum = turnings.iter().sum();
        Ok(VertexFigure {
            vertex: v,
            entries,
            turning_sum,
        })
    }

    /// Height-t gradient-flow deformation: every vertex above |x2| = t is
    /// flowed radially down its sheet to that height; requires the chart
    /// points (0,0,±1) strictly inside.
    pub fn deform_toward_planes(&self, t: f64) -> Result<IdealPolyhedron, PolyhedronError> {
        if t <= 1.0 {
            return Err(PolyhedronError::BadGeneratorInput(format!(
                "deformation height must exceed 1, got {t}"
            )));
        }
        let planes = self.face_planes()?;
        for pole in [Vec4::new(0.0, 0.0, 1.0, 1.0), Vec4::new(0.0, 0.0, -1.0, 1.0)] {
            for pl in &planes {
                if inner(&pl.n, &pole) >= -1e-12 {
                    return Err(PolyhedronError::InteriorConditionUnmet);
                }
            }
        }
        let r_max = (t * t - 1.0).sqrt();
        let moved: Vec<IdealVertex> = self
            .vertices
            .iter()
            .map(|v| {
                let r = (v.u0 * v.u0 + v.u1 * v.u1).sqrt();
                if r > r_max {
                    let s = r_max / r;
                    IdealVertex::new(v.sheet, v.u0 * s, v.u1 * s)
                } else {
                    v.clone()
                }
            })
            .collect();
        IdealPolyhedron::build(moved)
    }

    /// Numerical rank of the Jacobian of the edge-angle vector (angles on
    /// this polyhedron's own edges) with respect to the 2n planar vertex
    /// coordinates, by central differences with step h. Nearby hulls may
    /// refine a merged face; angles on edges absent from a perturbed hull
    /// read as 0. Expected rank is 2n − 6.
    pub fn angle_jacobian_rank(&self, h: f64) -> Result<usize, PolyhedronError> {
        let n = self.n();
        let pairs: Vec<(usize, usize)> = self.hull.edges.iter().map(|e| (e.u, e.v)).collect();
        let eval = |coords: &[f64]| -> Result<Vec<f64>, PolyhedronError> {
            let verts: Vec<IdealVertex> = (0..n)
                .map(|i| {
                    IdealVertex::new(self.vertices[i].sheet, coords[2 * i], coords[2 * i + 1])
                })
                .collect();
            let poly = IdealPolyhedron::build(verts)?;
            let angles = poly.dihedral_angles()?;
            Ok(pairs
                .iter()
                .map(|&(i, j)| angles.weight(i, j).unwrap_or(0.0))
                .collect())
        };
        let mut base = Vec::with_capacity(2 * n);
        for v in &self.vertices {
            base.push(v.u0);
            base.push(v.u1);
        }
        let mut rows = vec![vec![0.0; 2 * n]; pairs.len()];
        for col in 0..2 * n {
            let mut up = base.clone();
            let mut dn = base.clone();
            up[col] += h;
            dn[col] -= h;
            let (fu, fd) = (eval(&up)?, eval(&dn)?);
            for r in 0..pairs.len() {
                rows[r][col] = (fu[r] - fd[r]) / (2.0 * h);
            }
        }
        // At a merged-face stratum the one-sided kinks leak O(h) into the
        // null directions, so the cutoff scales with √h.
        Ok(numeric::numerical_rank(&rows, h.sqrt().max(1e-6)))
    }

    /// Apply a form-preserving transformation to all vertices and rebuild.
    pub fn transformed(&self, t: &Lorentz) -> Result<IdealPolyhedron, PolyhedronError> {
        let mut verts = Vec::with_capacity(self.n());
        for pt in &self.points {
            let img = t.apply(pt);
            if img.x3.abs() < 1e-6 {
                return Err(PolyhedronError::BadGeneratorInput(
                    "transformation pushes a vertex to the chart plane at infinity".into(),
                ));
            }
            let c = img.to_chart();
            let sheet = if c[2] > 0.0 { Sheet::Plus } else { Sheet::Minus };
            verts.push(IdealVertex::new(sheet, c[0], c[1]));
        }
        IdealPolyhedron::build(verts)
    }
}

#[derive(Debug, Clone)]
pub struct VertexFigureEntry {
    pub neighbor: usize,
    pub edge: (usize, usize),
    pub turning: f64,
    pub chart_point: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct VertexFigure {
    pub vertex: usize,
    pub entries: Vec<VertexFigureEntry>,
    pub turning_sum: f64,
}

fn assign_labels(vertices: &[IdealVertex]) -> Vec<String> {
    // Increasing phase angle on sheet +, decreasing on sheet −; only the
    // consistency of the convention matters downstream.
    let mut labels = vec![String::new(); vertices.len()];
    for (sheet, suffix, ascending) in [(Sheet::Plus, "+", true), (Sheet::Minus, "-", false)] {
        let mut ids: Vec<usize> = (0..vertices.len())
            .filter(|&i| vertices[i].sheet == sheet)
            .collect();
        ids.sort_by(|&a, &b| {
            let pa = vertices[a].u1.atan2(vertices[a].u0);
            let pb = vertices[b].u1.atan2(vertices[b].u0);
            if ascending {
                pa.partial_cmp(&pb).unwrap()
            } else {
                pb.partial_cmp(&pa).unwrap()
            }
        });
        for (rank, &id) in ids.iter().enumerate() {
            labels[id] = format!("{}{}", rank + 1, suffix);
        }
    }
    labels
}

/// Run the A1–A3 checks on an angle graph. `one_cycle` names the apex
/// vertices (the 1-cycles of the cover), which carry the −2π sums.
pub fn verify_admissible(
    graph: &AngleGraph,
    one_cycle: &BTreeSet<usize>,
    tol: f64,
) -> AdmissibilityReport {
    let mut a1_violations = Vec::new();
    for (&e, &w) in &graph.weights {
        let ok = match graph.colors[&e] {
            EdgeColor::Red => w > 0.0 && w < PI,
            EdgeColor::Blue => w < 0.0 && w > -PI,
        };
        if !ok {
            a1_violations.push((e, w));
        }
    }
    let mut a2_vertex_sums = Vec::new();
    let mut a2_max_residual: f64 = 0.0;
    for v in 0..graph.n {
        let target = if one_cycle.contains(&v) { -2.0 * PI } else { 0.0 };
        let sum = graph.vertex_weight(v);
        a2_max_residual = a2_max_residual.max((sum - target).abs());
        a2_vertex_sums.push((v, sum, target));
    }
    // The blue sum is bounded below by −2π, with equality exactly when the
    // cover has a 1-cycle; for 2 ≤ p ≤ q it sits strictly inside (−2π, 0).
    let a3_blue_sum = graph.blue_sum();
    let a3_equality_expected = !one_cycle.is_empty();
    let a3_equality_observed = (a3_blue_sum + 2.0 * PI).abs() <= tol;
    let a3_ok = if a3_equality_expected {
        a3_equality_observed
    } else {
        a3_blue_sum > -2.0 * PI + tol && a3_blue_sum < -tol
    };
    AdmissibilityReport {
        a1_ok: a1_violations.is_empty(),
        a1_violations,
        a2_ok: a2_max_residual <= tol,
        a2_max_residual,
        a2_vertex_sums,
        a3_ok,
        a3_blue_sum,
        a3_equality_expected,
        a3_equality_observed,
    }
}

/// Two-circle generator: p vertices at height +t and q at −t, at the given
/// phases (radius √(t²−1)); a side with a single vertex sits at the sheet
/// tip (0,0,±1) instead.
pub fn generate_two_circle(
    p: usize,
    q: usize,
    t: f64,
    phases_plus: &[f64],
    phases_minus: &[f64],
) -> Result<IdealPolyhedron, PolyhedronError> {
    if p == 0 || q == 0 || p + q < 4 {
        return Err(PolyhedronError::BadGeneratorInput(format!(
            "need p ≥ 1, q ≥ 1, p + q ≥ 4; got ({p}, {q})"
        )));
    }
    if t <= 1.0 {
        return Err(PolyhedronError::BadGeneratorInput(format!(
            "need t > 1, got {t}"
        )));
    }
    let check_phases = |phases: &[f64], count: usize, side: &str| {
        if count == 1 {
            return Ok(());
        }
        if phases.len() != count {
            return Err(PolyhedronError::BadGeneratorInput(format!(
                "{side} side needs {count} phases, got {}",
                phases.len()
            )));
        }
        for w in phases.windows(2) {
            if w[1] <= w[0] {
                return Err(PolyhedronError::BadGeneratorInput(format!(
                    "{side} phases must be strictly increasing"
                )));
            }
        }
        if phases[count - 1] - phases[0] >= 2.0 * PI {
            return Err(PolyhedronError::BadGeneratorInput(format!(
                "{side} phases must fit one turn"
            )));
        }
        Ok(())
    };
    check_phases(phases_plus, p, "plus")?;
    check_phases(phases_minus, q, "minus")?;
    let r = (t * t - 1.0).sqrt();
    let mut verts = Vec::with_capacity(p + q);
    if p == 1 {
        verts.push(IdealVertex::new(Sheet::Plus, 0.0, 0.0));
    } else {
        for &phi in phases_plus {
            verts.push(IdealVertex::new(Sheet::Plus, r * phi.cos(), r * phi.sin()));
        }
    }
    if q == 1 {
        verts.push(IdealVertex::new(Sheet::Minus, 0.0, 0.0));
    } else {
        for &phi in phases_minus {
            verts.push(IdealVertex::new(Sheet::Minus, r * phi.cos(), r * phi.sin()));
        }
    }
    IdealPolyhedron::build(verts)
}

/// Equally spaced phases with an offset.
pub fn regular_phases(count: usize, offset: f64) -> Vec<f64> {
    (0..count)
        .map(|i| offset + 2.0 * PI * i as f64 / count as f64)
        .collect()
}

/// Random strictly increasing phase list with a minimum gap.
pub fn random_phases<R: Rng>(rng: &mut R, count: usize, min_gap: f64) -> Vec<f64> {
    loop {
        let mut phases: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ok = phases
            .windows(2)
            .all(|w| w[1] - w[0] >= min_gap)
            && (phases[0] + 2.0 * PI - phases[count - 1]) >= min_gap;
        if ok {
            return phases;
        }
    }
}

/// Random two-circle polyhedron with phase gaps bounded away from zero.
pub fn random_two_circle<R: Rng>(
    rng: &mut R,
    p: usize,
    q: usize,
) -> Result<IdealPolyhedron, PolyhedronError> {
    let t = rng.gen_range(1.3..2.5);
    let pp = if p == 1 {
        vec![0.0]
    } else {
        random_phases(rng, p, 0.25)
    };
    let qq = if q == 1 {
        vec![0.0]
    } else {
        random_phases(rng, q, 0.25)
    };
    generate_two_circle(p, q, t, &pp, &qq)
}

/// Random moderate form-preserving transformation. The (·,3) rotation
/// angles stay small so that chart points of our corpora keep x3 > 0 and
/// the transformed polyhedron remains inside the chart.
pub fn random_lorentz<R: Rng>(rng: &mut R) -> Lorentz {
    let mut t = Lorentz::rotation(0, 1, rng.gen_range(0.0..2.0 * PI));
    t = t.compose(&Lorentz::boost(0, rng.gen_range(-0.3..0.3)));
    t = t.compose(&Lorentz::rotation(0, 3, rng.gen_range(-0.25..0.25)));
    t = t.compose(&Lorentz::boost(1, rng.gen_range(-0.3..0.3)));
    t = t.compose(&Lorentz::rotation(1, 3, rng.gen_range(-0.25..0.25)));
    t
}

/// Rejection-sample a polyhedron with all faces triangular: random planar
/// coordinates on both sheets, rebuilt until every point is extreme and no
/// merged face survives. Used where the angle map must be differentiable.
pub fn random_simplicial<R: Rng>(
    rng: &mut R,
    p: usize,
    q: usize,
) -> Result<IdealPolyhedron, PolyhedronError> {
    for _ in 0..2000 {
        let mut verts = Vec::with_capacity(p + q);
        for i in 0..p + q {
            let sheet = if i < p { Sheet::Plus } else { Sheet::Minus };
            verts.push(IdealVertex::new(
                sheet,
                rng.gen_range(-1.6..1.6),
                rng.gen_range(-1.6..1.6),
            ));
        }
        let min_sep = verts
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                verts[i + 1..]
                    .iter()
                    .filter(|b| b.sheet == a.sheet)
                    .map(move |b| ((a.u0 - b.u0).powi(2) + (a.u1 - b.u1).powi(2)).sqrt())
            })
            .fold(f64::INFINITY, f64::min);
        if min_sep < 0.3 {
            continue;
        }
        match IdealPolyhedron::build(verts) {
            Ok(poly) => {
                if poly.hull.faces.iter().all(|f| f.len() == 3) {
                    return Ok(poly);
                }
            }
            Err(PolyhedronError::NonExtremeVertex { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PolyhedronError::BadGeneratorInput(
        "rejection sampling failed to find a simplicial instance".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn square_pyramid() -> IdealPolyhedron {
        generate_two_circle(1, 4, 2.0, &[0.0], &regular_phases(4, 0.0)).unwrap()
    }

    #[test]
    fn pyramid_structure() {
        let p = square_pyramid();
        assert_eq!((p.p, p.q), (1, 4));
        assert_eq!(p.hull.edges.len(), 8);
        assert_eq!(p.hull.faces.len(), 5);
        let colors = p.classify_edges().unwrap();
        let reds = colors.values().filter(|&&c| c == EdgeColor::Red).count();
        let blues = colors.values().filter(|&&c| c == EdgeColor::Blue).count();
        assert_eq!((reds, blues), (4, 4));
        assert_eq!(p.labels[0], "1+");
    }

    #[test]
    fn pyramid_angles_match_hand_computation() {
        let p = square_pyramid();
        let g = p.dihedral_angles().unwrap();
        // Hand computation: base edges +π/4, side edges −π/2.
        for ((u, v), w) in g.red_edges() {
            assert!((w - PI / 4.0).abs() < 1e-12, "red ({u},{v}) = {w}");
        }
        for ((u, v), w) in g.blue_edges() {
            assert!((w + PI / 2.0).abs() < 1e-12, "blue ({u},{v}) = {w}");
        }
        // Apex weight −2π, base weights 0.
        assert!((g.vertex_weight(0) + 2.0 * PI).abs() < 1e-9);
        for v in 1..5 {
            assert!(g.vertex_weight(v).abs() < 1e-9);
        }
        assert!((g.blue_sum() + 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn pyramid_admissibility_report() {
        let p = square_pyramid();
        let g = p.dihedral_angles().unwrap();
        let apex: BTreeSet<usize> = (0..p.n()).filter(|&v| p.is_apex(v)).collect();
        assert_eq!(apex.len(), 1);
        let rep = verify_admissible(&g, &apex, 1e-9);
        assert!(rep.pass(), "{rep:?}");
        assert!(rep.a3_equality_expected && rep.a3_equality_observed);
        // A positive blue weight breaks A1.
        let mut bad = g.clone();
        let blue_edge = bad
            .colors
            .iter()
            .find(|(_, &c)| c == EdgeColor::Blue)
            .map(|(&e, _)| e)
            .unwrap();
        bad.weights.insert(blue_edge, 0.3);
        let rep_bad = verify_admissible(&bad, &apex, 1e-9);
        assert!(!rep_bad.a1_ok);
    }

    #[test]
    fn antiprism_classification() {
        let p = generate_two_circle(
            3,
            3,
            2.0,
            &regular_phases(3, 0.0),
            &regular_phases(3, PI / 3.0),
        )
        .unwrap();
        assert_eq!(p.hull.edges.len(), 12);
        let colors = p.classify_edges().unwrap();
        let blues = colors.values().filter(|&&c| c == EdgeColor::Blue).count();
        assert_eq!(blues, 6);
        let g = p.dihedral_angles().unwrap();
        let rep = verify_admissible(&g, &BTreeSet::new(), 1e-9);
        assert!(rep.pass(), "{rep:?}");
        // Strict A3 for 2 ≤ p ≤ q: bounded away from the −2π wall.
        assert!(g.blue_sum() > -2.0 * PI + 1e-6 && g.blue_sum() < -1e-6);
    }

    #[test]
    fn strongly_ideal_rejected() {
        let verts: Vec<IdealVertex> = (0..5)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / 5.0;
                IdealVertex::new(Sheet::Plus, phi.cos(), phi.sin())
            })
            .collect();
        assert!(matches!(
            IdealPolyhedron::build(verts),
            Err(PolyhedronError::StronglyIdeal)
        ));
    }

    #[test]
    fn non_extreme_vertex_rejected() {
        // A low center point on the + sheet inside the hull of a high
        // triangle and a deep − triangle.
        let mut verts = Vec::new();
        for phi in regular_phases(3, 0.0) {
            verts.push(IdealVertex::new(Sheet::Plus, 2.0 * phi.cos(), 2.0 * phi.sin()));
        }
        for phi in regular_phases(3, 0.3) {
            verts.push(IdealVertex::new(Sheet::Minus, 3.0 * phi.cos(), 3.0 * phi.sin()));
        }
        verts.push(IdealVertex::new(Sheet::Plus, 0.0, 0.0));
        match IdealPolyhedron::build(verts) {
            Err(PolyhedronError::NonExtremeVertex { id: 6, .. }) => {}
            other => panic!("expected NonExtremeVertex, got {other:?}"),
        }
    }

    #[test]
    fn midpoint_signs() {
        let p = square_pyramid();
        let colors = p.classify_edges().unwrap();
        for (&(u, v), &c) in &colors {
            let mid = p.points[u].add(&p.points[v]).scale(0.5);
            match c {
                EdgeColor::Red => assert!(quad(&mid) <= 0.0),
                EdgeColor::Blue => assert!(quad(&mid) > 0.0),
            }
        }
    }

    #[test]
    fn interior_complex_examples() {
        let pyramid = square_pyramid();
        let ic = pyramid.interior_complex().unwrap();
        assert_eq!(ic.plus.boundary_cycle, vec![0]);
        assert_eq!(ic.minus.boundary_cycle.len(), 4);

        let p34 = generate_two_circle(
            3,
            4,
            1.7,
            &regular_phases(3, 0.1),
            &regular_phases(4, 0.5),
        )
        .unwrap();
        let ic = p34.interior_complex().unwrap();
        assert_eq!(ic.plus.boundary_cycle.len(), 3);
        assert_eq!(ic.minus.boundary_cycle.len(), 4);

        let p25 = generate_two_circle(
            2,
            5,
            2f64.sqrt(),
            &[0.0, 2.0],
            &regular_phases(5, 0.2),
        )
        .unwrap();
        let ic = p25.interior_complex().unwrap();
        assert_eq!(ic.plus.boundary_cycle.len(), 2);
        assert_eq!(ic.minus.boundary_cycle.len(), 5);
        // The two cycles cover all vertices disjointly.
        let mut all: Vec<usize> = ic
            .plus
            .boundary_cycle
            .iter()
            .chain(&ic.minus.boundary_cycle)
            .copied()
            .collect();
        all.sort();
        assert_eq!(all, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn vertex_figure_turnings() {
        let p = square_pyramid();
        // Apex: 4 turns of −π/2.
        let fig = p.vertex_figure(0).unwrap();
        for e in &fig.entries {
            assert!((e.turning + PI / 2.0).abs() < 1e-9, "{:?}", e);
        }
        assert!((fig.turning_sum + 2.0 * PI).abs() < 1e-9);
        // Base vertex: turnings match θ and sum to 0.
        let g = p.dihedral_angles().unwrap();
        for v in 1..5 {
            let fig = p.vertex_figure(v).unwrap();
            assert!(fig.turning_sum.abs() < 1e-9);
            for e in &fig.entries {
                let want = g.weight(e.edge.0, e.edge.1).unwrap();
                assert!(
                    (e.turning - want).abs() < 1e-9,
                    "vertex {v} edge {:?}: turning {} vs θ {}",
                    e.edge,
                    e.turning,
                    want
                );
            }
        }
    }

    #[test]
    fn vertex_figures_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let poly = random_simplicial(&mut rng, 3, 4).unwrap();
            let g = poly.dihedral_angles().unwrap();
            for v in 0..poly.n() {
                let fig = poly.vertex_figure(v).unwrap();
                for e in &fig.entries {
                    let want = g.weight(e.edge.0, e.edge.1).unwrap();
                    assert!(
                        (e.turning - want).abs() < 1e-7,
                        "turning {} vs θ {}",
                        e.turning,
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn deform_flow() {
        // Antipodal 2-cycle so the polyhedron contains the poles (0,0,±1).
        let p = generate_two_circle(
            2,
            5,
            1.5,
            &[0.0, PI],
            &regular_phases(5, 0.4),
        )
        .unwrap();
        // Larger t than any height: unchanged.
        let same = p.deform_toward_planes(10.0).unwrap();
        for (a, b) in p.vertices.iter().zip(&same.vertices) {
            assert!((a.u0 - b.u0).abs() < 1e-12 && (a.u1 - b.u1).abs() < 1e-12);
        }
        // t close to 1: everyone lands on the two planes.
        let t = 1.05;
        let flat = p.deform_toward_planes(t).unwrap();
        for v in &flat.vertices {
            let h = (v.u0 * v.u0 + v.u1 * v.u1 + 1.0).sqrt();
            assert!((h - t).abs() < 1e-6);
        }
        assert_eq!((flat.p, flat.q), (p.p, p.q));
    }

    #[test]
    fn jacobian_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let antiprism = random_simplicial(&mut rng, 3, 3).unwrap();
        assert_eq!(antiprism.angle_jacobian_rank(1e-5).unwrap(), 6);
        let pyramid = square_pyramid();
        assert_eq!(pyramid.angle_jacobian_rank(1e-5).unwrap(), 4);
    }

    #[test]
    fn lorentz_invariance_of_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let poly = random_simplicial(&mut rng, 2, 4).unwrap();
        let g0 = poly.dihedral_angles().unwrap();
        for _ in 0..5 {
            let t = random_lorentz(&mut rng);
            let moved = poly.transformed(&t).unwrap();
            let g1 = moved.dihedral_angles().unwrap();
            for (&e, &w) in &g0.weights {
                let w1 = g1.weights.get(&e).copied().unwrap_or(f64::NAN);
                assert!(
                    (w1 - w).abs() < 1e-7,
                    "edge {e:?}: {w} vs {w1} after transformation"
                );
            }
        }
    }

    #[test]
    fn killing_perturbation_changes_angles_quadratically() {
        // Moving vertices along an ambient isometry field changes the
        // angles only at second order in the step: the field is tangent to
        // the quadric, so stepping the planar coordinates by its chart
        // components realizes the flow up to O(h²).
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let poly = random_simplicial(&mut rng, 3, 3).unwrap();
        let g0 = poly.dihedral_angles().unwrap();
        let gen = crate::minkowski::KillingGenerator::basis()[3];
        let max_change = |h: f64| -> f64 {
            let moved: Vec<IdealVertex> = poly
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let f = gen.field_at(poly.chart[i]);
                    IdealVertex::new(v.sheet, v.u0 + h * f[0], v.u1 + h * f[1])
                })
                .collect();
            let g1 = IdealPolyhedron::build(moved)
                .unwrap()
                .dihedral_angles()
                .unwrap();
            g0.weights
                .iter()
                .map(|(&e, &w)| (g1.weights.get(&e).copied().unwrap_or(0.0) - w).abs())
                .fold(0.0, f64::max)
        };
        let d3 = max_change(1e-3);
        let d4 = max_change(1e-4);
        assert!(d3 < 1e-4, "first-order leak: {d3}");
        assert!(d3 / d4.max(1e-14) > 20.0, "not quadratic: {d3} vs {d4}");
    }
}
