//! Incremental convex hull in the affine chart, with coplanar-face merging
//! and face-lattice extraction.
//!
//! The same algorithm runs over two scalar types: `f64` with tolerances
//! scaled by the bounding box, and `BigRational` with exact predicates.
//! Vertices of ideal polyhedra sit exactly on a quadric, so coplanarities
//! are structural rather than accidental; the merge pass is what turns the
//! interim triangulation into the true face lattice.

use num_bigint::BigInt;
use num_rational::BigRational;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HullError {
    #[error("need at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("duplicate input points {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("input is degenerate (all points coplanar)")]
    DegenerateInput,
    #[error("hull structure broke down: {0}")]
    Internal(String),
}

/// Sign of a 4×4 orientation determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
    Coplanar,
}

/// How an input point relates to the hull of the remaining points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremality {
    Extreme,
    InVertex,
    InEdge,
    InFacet,
    Interior,
}

/// Coordinate scalar for hull predicates.
pub trait HullScalar: Clone + PartialEq + PartialOrd + Debug {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn abs(&self) -> Self;
    /// Strict-visibility threshold on determinant values, from the
    /// bounding-box diameter. Zero for exact scalars.
    fn visibility_tol(diameter: &Self) -> Self;
    /// Coplanar-merge threshold on determinant values (a distance of
    /// 1e-9 × bbox times a bbox² area for floats, zero for rationals).
    fn coplanar_tol(diameter: &Self) -> Self;
    /// Input-point identity test; exact scalars compare exactly.
    fn points_equal(a: &[Self; 3], b: &[Self; 3], diameter: &Self) -> bool
    where
        Self: Sized;
}

impl HullScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn visibility_tol(d: &Self) -> Self {
        1e-10 * d * d * d
    }
    fn coplanar_tol(d: &Self) -> Self {
        1e-9 * d * d * d
    }
    fn points_equal(a: &[f64; 3], b: &[f64; 3], diameter: &f64) -> bool {
        let worst = (a[0] - b[0])
            .abs()
            .max((a[1] - b[1]).abs())
            .max((a[2] - b[2]).abs());
        worst <= 1e-12 * diameter.max(1.0)
    }
}

impl HullScalar for BigRational {
    fn zero() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn abs(&self) -> Self {
        num_traits::Signed::abs(self)
    }
    fn visibility_tol(_d: &Self) -> Self {
        <BigRational as HullScalar>::zero()
    }
    fn coplanar_tol(_d: &Self) -> Self {
        <BigRational as HullScalar>::zero()
    }
    fn points_equal(a: &[BigRational; 3], b: &[BigRational; 3], _d: &BigRational) -> bool {
        a == b
    }
}

type Pt<S> = [S; 3];

/// Signed 6×volume of the tetrahedron (a, b, c, d): positive when d lies on
/// the side from which (a, b, c) winds counterclockwise.
pub fn orient3d<S: HullScalar>(a: &Pt<S>, b: &Pt<S>, c: &Pt<S>, d: &Pt<S>) -> S {
    let u = [b[0].sub(&a[0]), b[1].sub(&a[1]), b[2].sub(&a[2])];
    let v = [c[0].sub(&a[0]), c[1].sub(&a[1]), c[2].sub(&a[2])];
    let w = [d[0].sub(&a[0]), d[1].sub(&a[1]), d[2].sub(&a[2])];
    let cx = u[1].mul(&v[2]).sub(&u[2].mul(&v[1]));
    let cy = u[2].mul(&v[0]).sub(&u[0].mul(&v[2]));
    let cz = u[0].mul(&v[1]).sub(&u[1].mul(&v[0]));
    cx.mul(&w[0]).add(&cy.mul(&w[1])).add(&cz.mul(&w[2]))
}

pub fn orientation<S: HullScalar>(a: &Pt<S>, b: &Pt<S>, c: &Pt<S>, d: &Pt<S>, tol: &S) -> Orientation {
    let v = orient3d(a, b, c, d);
    if HullScalar::abs(&v) <= *tol {
        Orientation::Coplanar
    } else if v > <S as HullScalar>::zero() {
        Orientation::Positive
    } else {
        Orientation::Negative
    }
}

/// An edge of the hull with its two adjacent faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullEdge {
    pub u: usize,
    pub v: usize,
    pub faces: [usize; 2],
}

/// The face lattice of a full-dimensional hull. Vertex ids are input indices.
#[derive(Debug, Clone)]
pub struct HullCombinatorics {
    pub n_input: usize,
    pub vertices: Vec<usize>,
    /// Maximal faces as cyclic vertex lists with outward orientation.
    pub faces: Vec<Vec<usize>>,
    pub edges: Vec<HullEdge>,
    pub non_extreme: Vec<(usize, Extremality)>,
}

impl HullCombinatorics {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.iter().position(|e| (e.u, e.v) == key)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.u == v {
                out.push(e.v);
            } else if e.v == v {
                out.push(e.u);
            }
        }
        out
    }

    /// Neighbors of `v` in cyclic order, read off from the oriented faces:
    /// a face (…, a, v, b, …) places b right after a in the rotation.
    pub fn rotation(&self, v: usize) -> Result<Vec<usize>, HullError> {
        let mut succ: BTreeMap<usize, usize> = BTreeMap::new();
        for f in &self.faces {
            if let Some(pos) = f.iter().position(|&x| x == v) {
                let k = f.len();
                let prev = f[(pos + k - 1) % k];
                let next = f[(pos + 1) % k];
                if succ.insert(prev, next).is_some() {
                    return Err(HullError::Internal(format!(
                        "inconsistent rotation at vertex {v}"
                    )));
                }
            }
        }
        let deg = succ.len();
        if deg < 3 {
            return Err(HullError::Internal(format!("vertex {v} has degree {deg}")));
        }
        let start = *succ.keys().next().unwrap();
        let mut order = vec![start];
        let mut cur = start;
        for _ in 0..deg {
            cur = *succ
                .get(&cur)
                .ok_or_else(|| HullError::Internal(format!("broken rotation at {v}")))?;
            if cur == start {
                break;
            }
            order.push(cur);
        }
        if order.len() != deg {
            return Err(HullError::Internal(format!(
                "rotation at vertex {v} is not a single cycle"
            )));
        }
        Ok(order)
    }

    /// 3-connectivity of the 1-skeleton by exhaustive vertex-pair deletion.
    pub fn is_three_connected(&self) -> bool {
        let ids = &self.vertices;
        let n = ids.len();
        if n < 4 {
            return false;
        }
        let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            let (a, b) = (pos[&e.u], pos[&e.v]);
            adj[a].push(b);
            adj[b].push(a);
        }
        connectivity_at_least(&adj, 3)
    }
}

/// Vertex connectivity ≥ k, by deleting every subset of k−1 vertices.
/// Exponential in k but k ≤ 3 here and graphs are small.
pub fn connectivity_at_least(adj: &[Vec<usize>], k: usize) -> bool {
    let n = adj.len();
    if n <= k {
        return false;
    }
    let mut removed = vec![false; n];
    fn connected(adj: &[Vec<usize>], removed: &[bool]) -> bool {
        let n = adj.len();
        let start = match (0..n).find(|&i| !removed[i]) {
            Some(s) => s,
            None => return true,
        };
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !removed[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..n).all(|i| removed[i] || seen[i])
    }
    fn rec(adj: &[Vec<usize>], removed: &mut Vec<bool>, left: usize, from: usize) -> bool {
        if !connected(adj, removed) {
            return false;
        }
        if left == 0 {
            return true;
        }
        for v in from..adj.len() {
            removed[v] = true;
            let ok = rec(adj, removed, left - 1, v + 1);
            removed[v] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    rec(adj, &mut removed, k - 1, 0)
}

#[derive(Clone)]
struct Tri {
    v: [usize; 3],
    alive: bool,
}

/// Convex hull of ≥ 4 points. Every input point ends up either a hull vertex
/// or in `non_extreme` with its degeneration kind; duplicates are an error.
pub fn convex_hull<S: HullScalar>(points: &[Pt<S>]) -> Result<HullCombinatorics, HullError> {
    let n = points.len();
    if n < 4 {
        return Err(HullError::TooFewPoints(n));
    }
    let diam = bbox_diameter(points);
    let vis_tol = S::visibility_tol(&diam);
    let cop_tol = S::coplanar_tol(&diam);

    // Duplicate detection. For floats "same point" means within the
    // 1e-12 × bbox scale; exact scalars require exact equality.
    for i in 0..n {
        for j in (i + 1)..n {
            if S::points_equal(&points[i], &points[j], &diam) {
                return Err(HullError::DuplicatePoint(i, j));
            }
        }
    }

    // Initial simplex.
    let i0 = 0usize;
    let i1 = (1..n)
        .find(|&i| !S::points_equal(&points[i0], &points[i], &diam))
        .ok_or(HullError::DegenerateInput)?;
    let i2 = (1..n)
        .filter(|&i| i != i1)
        .find(|&i| !collinear(&points[i0], &points[i1], &points[i], &cop_tol, &diam))
        .ok_or(HullError::DegenerateInput)?;
    let i3 = (1..n)
        .filter(|&i| i != i1 && i != i2)
        .find(|&i| {
            HullScalar::abs(&orient3d(&points[i0], &points[i1], &points[i2], &points[i]))
                > S::visibility_tol(&diam)
        })
        .ok_or(HullError::DegenerateInput)?;

    let (a, b) = if orient3d(&points[i0], &points[i1], &points[i2], &points[i3])
        > <S as HullScalar>::zero()
    {
        (i1, i2)
    } else {
        (i2, i1)
    };
    // Tetrahedron i0, a, b, i3 with orient(i0, a, b, i3) < 0: i3 is below
    // the outward face (i0, a, b).
    let mut tris: Vec<Tri> = Vec::new();
    let push_face = |tris: &mut Vec<Tri>, t: [usize; 3], opposite: usize| {
        let o = orient3d(&points[t[0]], &points[t[1]], &points[t[2]], &points[opposite]);
        let t = if o > <S as HullScalar>::zero() {
            [t[0], t[2], t[1]]
        } else {
            t
        };
        tris.push(Tri { v: t, alive: true });
    };
    push_face(&mut tris, [i0, a, b], i3);
    push_face(&mut tris, [i0, a, i3], b);
    push_face(&mut tris, [i0, b, i3], a);
    push_face(&mut tris, [a, b, i3], i0);

    for p in 0..n {
        if p == i0 || p == a || p == b || p == i3 {
            continue;
        }
        let visible: Vec<usize> = tris
            .iter()
            .enumerate()
            .filter(|(_, t)| t.alive)
            .filter(|(_, t)| {
                orient3d(&points[t.v[0]], &points[t.v[1]], &points[t.v[2]], &points[p]) > vis_tol
            })
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        // Horizon: directed edges of visible faces whose reverse belongs to
        // a hidden face.
        let vis_set: BTreeSet<usize> = visible.iter().copied().collect();
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (ti, t) in tris.iter().enumerate() {
            if !t.alive {
                continue;
            }
            for k in 0..3 {
                directed.insert((t.v[k], t.v[(k + 1) % 3]), ti);
            }
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &ti in &visible {
            let t = &tris[ti];
            for k in 0..3 {
                let (x, y) = (t.v[k], t.v[(k + 1) % 3]);
                match directed.get(&(y, x)) {
                    Some(&other) if !vis_set.contains(&other) => horizon.push((x, y)),
                    Some(_) => {}
                    None => {
                        return Err(HullError::Internal("open horizon edge".into()));
                    }
                }
            }
        }
        for &ti in &visible {
            tris[ti].alive = false;
        }
        // Visible face traversed (x→y); the replacement keeps direction.
        for (x, y) in horizon {
            tris.push(Tri {
                v: [x, y, p],
                alive: true,
            });
        }
    }

    let live: Vec<[usize; 3]> = tris.iter().filter(|t| t.alive).map(|t| t.v).collect();
    if live.is_empty() {
        return Err(HullError::Internal("no faces survived".into()));
    }
    check_closed(&live)?;

    // Merge coplanar adjacent triangles into maximal faces; canonicalize
    // before anything records face indices.
    let faces = canonical_faces(merge_coplanar(points, &live, &cop_tol)?);

    // Assemble edges and vertices from the merged faces.
    let mut edge_faces: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..f.len() {
            let (x, y) = (f[k], f[(k + 1) % f.len()]);
            edge_faces.entry((x.min(y), x.max(y))).or_default().push(fi);
        }
    }
    let mut edges = Vec::new();
    for ((u, v), fs) in &edge_faces {
        if fs.len() != 2 {
            return Err(HullError::Internal(format!(
                "edge ({u},{v}) lies on {} faces",
                fs.len()
            )));
        }
        edges.push(HullEdge {
            u: *u,
            v: *v,
            faces: [fs[0], fs[1]],
        });
    }
    let mut vset = BTreeSet::new();
    for f in &faces {
        vset.extend(f.iter().copied());
    }
    let vertices: Vec<usize> = vset.into_iter().collect();

    // Every input index absent from the final hull is non-extreme; this
    // also catches points that entered the hull and were buried later.
    let mut non_extreme = Vec::new();
    for p in 0..n {
        if vertices.binary_search(&p).is_ok() {
            continue;
        }
        let kind = classify_against(points, &faces, &points[p], &vis_tol, &cop_tol);
        non_extreme.push((p, kind));
    }

    let hull = HullCombinatorics {
        n_input: n,
        vertices,
        faces,
        edges,
        non_extreme,
    };
    if hull.euler_characteristic() != 2 {
        return Err(HullError::Internal(format!(
            "Euler characteristic {} ≠ 2",
            hull.euler_characteristic()
        )));
    }
    Ok(hull)
}

/// Classification of `idx` against the hull of the other points.
pub fn is_vertex_extreme<S: HullScalar>(
    points: &[Pt<S>],
    idx: usize,
) -> Result<Extremality, HullError> {
    if idx >= points.len() {
        return Err(HullError::Internal(format!("index {idx} out of range")));
    }
    let diam = bbox_diameter(points);
    for (j, q) in points.iter().enumerate() {
        if j != idx && S::points_equal(&points[idx], q, &diam) {
            return Ok(Extremality::InVertex);
        }
    }
    let others: Vec<Pt<S>> = points
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != idx)
        .map(|(_, p)| p.clone())
        .collect();
    let hull = convex_hull(&others)?;
    let vis_tol = S::visibility_tol(&diam);
    let cop_tol = S::coplanar_tol(&diam);
    Ok(classify_against(
        &others,
        &hull.faces,
        &points[idx],
        &vis_tol,
        &cop_tol,
    ))
}

fn classify_against<S: HullScalar>(
    face_points: &[Pt<S>],
    faces: &[Vec<usize>],
    pt: &Pt<S>,
    vis_tol: &S,
    cop_tol: &S,
) -> Extremality {
    let mut touching = 0usize;
    for f in faces {
        let o = orient3d(
            &face_points[f[0]],
            &face_points[f[1]],
            &face_points[f[2]],
            pt,
        );
        if o > *vis_tol {
            return Extremality::Extreme;
        }
        if HullScalar::abs(&o) <= *cop_tol {
            touching += 1;
        }
    }
    match touching {
        0 => Extremality::Interior,
        1 => Extremality::InFacet,
        _ => Extremality::InEdge,
    }
}

fn bbox_diameter<S: HullScalar>(points: &[Pt<S>]) -> S {
    let mut d = <S as HullScalar>::zero();
    for k in 0..3 {
        let mut lo = points[0][k].clone();
        let mut hi = points[0][k].clone();
        for p in points {
            if p[k] < lo {
                lo = p[k].clone();
            }
            if p[k] > hi {
                hi = p[k].clone();
            }
        }
        let spread = hi.sub(&lo);
        if spread > d {
            d = spread;
        }
    }
    d
}

fn collinear<S: HullScalar>(a: &Pt<S>, b: &Pt<S>, c: &Pt<S>, tol: &S, diam: &S) -> bool {
    let u = [b[0].sub(&a[0]), b[1].sub(&a[1]), b[2].sub(&a[2])];
    let v = [c[0].sub(&a[0]), c[1].sub(&a[1]), c[2].sub(&a[2])];
    let cx = u[1].mul(&v[2]).sub(&u[2].mul(&v[1]));
    let cy = u[2].mul(&v[0]).sub(&u[0].mul(&v[2]));
    let cz = u[0].mul(&v[1]).sub(&u[1].mul(&v[0]));
    let norm1 = HullScalar::abs(&cx)
        .add(&HullScalar::abs(&cy))
        .add(&HullScalar::abs(&cz));
    if *tol == <S as HullScalar>::zero() {
        norm1 == <S as HullScalar>::zero()
    } else {
        // Cross-product entries scale like diam²; compare per unit diam³
        // consistently with the determinant tolerances.
        norm1.mul(diam) <= *tol
    }
}

fn check_closed(tris: &[[usize; 3]]) -> Result<(), HullError> {
    let mut directed = BTreeSet::new();
    for t in tris {
        for k in 0..3 {
            if !directed.insert((t[k], t[(k + 1) % 3])) {
                return Err(HullError::Internal("repeated directed edge".into()));
            }
        }
    }
    for &(x, y) in &directed {
        if !directed.contains(&(y, x)) {
            return Err(HullError::Internal("unmatched directed edge".into()));
        }
    }
    Ok(())
}

fn merge_coplanar<S: HullScalar>(
    points: &[Pt<S>],
    tris: &[[usize; 3]],
    cop_tol: &S,
) -> Result<Vec<Vec<usize>>, HullError> {
    let m = tris.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    // Adjacency via shared directed edges.
    let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            owner.insert((t[k], t[(k + 1) % 3]), ti);
        }
    }
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (x, y) = (t[k], t[(k + 1) % 3]);
            if let Some(&tj) = owner.get(&(y, x)) {
                if tj <= ti {
                    continue;
                }
                // Coplanar iff the opposite vertex of tj lies in ti's plane.
                let opp = tris[tj].iter().copied().find(|&v| v != x && v != y).unwrap();
                let o = orient3d(
                    &points[t[0]],
                    &points[t[1]],
                    &points[t[2]],
                    &points[opp],
                );
                if HullScalar::abs(&o) <= *cop_tol {
                    let (ri, rj) = (find(&mut parent, ti), find(&mut parent, tj));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for ti in 0..m {
        groups.entry(find(&mut parent, ti)).or_default().push(ti);
    }
    let mut faces = Vec::new();
    for (_, group) in groups {
        let members: BTreeSet<usize> = group.iter().copied().collect();
        // Boundary = directed edges whose reverse is outside the group.
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        let mut count = 0usize;
        for &ti in &group {
            let t = &tris[ti];
            for k in 0..3 {
                let (x, y) = (t[k], t[(k + 1) % 3]);
                let rev_owner = owner.get(&(y, x)).copied();
                let internal = rev_owner.map(|o| members.contains(&o)).unwrap_or(false);
                if !internal {
                    if next.insert(x, y).is_some() {
                        return Err(HullError::Internal(
                            "merged face boundary is not a simple cycle".into(),
                        ));
                    }
                    count += 1;
                }
            }
        }
        let start = *next
            .keys()
            .next()
            .ok_or_else(|| HullError::Internal("merged face has empty boundary".into()))?;
        let mut cycle = vec![start];
        let mut cur = start;
        loop {
            cur = *next
                .get(&cur)
                .ok_or_else(|| HullError::Internal("broken face boundary".into()))?;
            if cur == start {
                break;
            }
            cycle.push(cur);
            if cycle.len() > count {
                return Err(HullError::Internal("face boundary loops".into()));
            }
        }
        if cycle.len() != count {
            return Err(HullError::Internal(
                "merged face boundary has several cycles".into(),
            ));
        }
        faces.push(cycle);
    }
    Ok(faces)
}

/// Rotate each face to start at its smallest vertex and sort the face list,
/// so equal hulls have byte-equal representations.
fn canonical_faces(mut faces: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for f in &mut faces {
        let k = f
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .map(|(i, _)| i)
            .unwrap();
        f.rotate_left(k);
    }
    faces.sort();
    faces
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tetrahedron() {
        let pts: Vec<[f64; 3]> = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices, vec![0, 1, 2, 3]);
        assert_eq!(h.faces.len(), 4);
        assert_eq!(h.edges.len(), 6);
        assert!(h.faces.iter().all(|f| f.len() == 3));
        assert_eq!(h.euler_characteristic(), 2);
        assert!(h.is_three_connected());
    }

    #[test]
    fn cube_merges_to_quads() {
        let mut pts = Vec::new();
        for &x in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &z in &[0.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.faces.len(), 6);
        assert_eq!(h.edges.len(), 12);
        assert!(h.faces.iter().all(|f| f.len() == 4));
    }

    #[test]
    fn interior_point_flagged() {
        let mut pts = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        pts.push([0.1, 0.0, 0.2]);
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.non_extreme, vec![(8, Extremality::Interior)]);
        assert_eq!(is_vertex_extreme(&pts, 8).unwrap(), Extremality::Interior);
        assert_eq!(is_vertex_extreme(&pts, 0).unwrap(), Extremality::Extreme);
    }

    #[test]
    fn facet_interior_and_duplicate_kinds() {
        let pts: Vec<[f64; 3]> = vec![
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 2.0, 0.0],
            [0.0, 0.0, 2.0],
            [0.5, 0.5, 0.0], // centroidish point of the z=0 face
        ];
        assert_eq!(is_vertex_extreme(&pts, 4).unwrap(), Extremality::InFacet);
        let mut pts2 = pts.clone();
        pts2[4] = [0.0, 0.0, 0.0];
        assert_eq!(is_vertex_extreme(&pts2, 4).unwrap(), Extremality::InVertex);
        assert!(matches!(
            convex_hull(&pts2),
            Err(HullError::DuplicatePoint(0, 4))
        ));
        let mid: Vec<[f64; 3]> = vec![
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 2.0, 0.0],
            [0.0, 0.0, 2.0],
            [1.0, 0.0, 0.0], // midpoint of an edge
        ];
        assert_eq!(is_vertex_extreme(&mid, 4).unwrap(), Extremality::InEdge);
    }

    #[test]
    fn all_coplanar_is_degenerate() {
        let pts: Vec<[f64; 3]> = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.3, 0.7, 0.0],
        ];
        assert!(matches!(convex_hull(&pts), Err(HullError::DegenerateInput)));
    }

    #[test]
    fn rational_hull_order_independent() {
        // Rational points on the two-sheeted hyperboloid via Pythagorean
        // quadruples (a, b, c, d) with a² + b² + c² = d²: the chart point
        // (a/c, b/c, ±d/c) satisfies u0² + u1² + 1 = x2² exactly.
        let mk = |a: i64, b: i64, c: i64, d: i64, sheet: i64| -> [BigRational; 3] {
            // (a/c)² + (b/c)² + 1 = (d/c)²
            assert_eq!(a * a + b * b + c * c, d * d);
            [rat(a, c), rat(b, c), rat(sheet * d, c)]
        };
        let pts = vec![
            mk(0, 0, 1, 1, 1),
            mk(2, 2, 1, 3, -1),
            mk(-2, 2, 1, 3, -1),
            mk(2, -2, 1, 3, -1),
            mk(-2, -2, 1, 3, -1),
            mk(1, 2, 2, 3, -1),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.euler_characteristic(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut idx: Vec<usize> = (0..pts.len()).collect();
            idx.shuffle(&mut rng);
            let shuffled: Vec<[BigRational; 3]> = idx.iter().map(|&i| pts[i].clone()).collect();
            let h2 = convex_hull(&shuffled).unwrap();
            // Map shuffled combinatorics back to original labels.
            let back: Vec<Vec<usize>> = h2
                .faces
                .iter()
                .map(|f| f.iter().map(|&v| idx[v]).collect())
                .collect();
            assert_eq!(canonical_faces(back), h.faces);
        }
    }

    #[test]
    fn rerun_on_hull_vertices_reproduces() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let n = rng.gen_range(6..20);
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|_| {
                    let u0: f64 = rng.gen_range(-2.0..2.0);
                    let u1: f64 = rng.gen_range(-2.0..2.0);
                    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    [u0, u1, s * (u0 * u0 + u1 * u1 + 1.0).sqrt()]
                })
                .collect();
            let h = match convex_hull(&pts) {
                Ok(h) => h,
                Err(_) => continue,
            };
            assert_eq!(h.euler_characteristic(), 2);
            let sub: Vec<[f64; 3]> = h.vertices.iter().map(|&v| pts[v]).collect();
            let h2 = convex_hull(&sub).unwrap();
            let relabel: Vec<Vec<usize>> = h2
                .faces
                .iter()
                .map(|f| f.iter().map(|&v| h.vertices[v]).collect())
                .collect();
            assert_eq!(canonical_faces(relabel), h.faces);
            assert!(h2.non_extreme.is_empty());
        }
    }

    #[test]
    fn hyperboloid_hulls_pass_euler_up_to_40() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [10usize, 20, 30, 40] {
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|_| {
                    let u0: f64 = rng.gen_range(-3.0..3.0);
                    let u1: f64 = rng.gen_range(-3.0..3.0);
                    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    [u0, u1, s * (u0 * u0 + u1 * u1 + 1.0).sqrt()]
                })
                .collect();
            if let Ok(h) = convex_hull(&pts) {
                assert_eq!(h.euler_characteristic(), 2);
                assert!(h.is_three_connected());
                for e in &h.edges {
                    assert_ne!(e.faces[0], e.faces[1]);
                }
            }
        }
    }
}
