//! Colored and weighted graphs: two-cycle covers, the directed-lift
//! alternating-cycle test, weight synthesis (cycle sums and the greedy
//! belt), normalization, an exact W1/W2 verifier, cycle peeling, and the
//! LP feasibility oracle.
//!
//! All weight arithmetic is exact and carried in units of π, so the apex
//! constraint −2π is the rational −2.

use crate::lp::{self, LpOutcome, LpProblem, Rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

pub type Edge = (usize, usize);

pub fn edge(u: usize, v: usize) -> Edge {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeColor {
    Red,
    Blue,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("instance too large: {0} vertices exceeds the brute-force bound {1}")]
    TooLarge(usize, usize),
    #[error("graph is not admissible; {0} edges lie on no alternating cycle")]
    NotAdmissible(usize),
    #[error("a 1-cycle forces the normalization; ω₀ cannot be honored")]
    ApexConflict,
    #[error("bad input: {0}")]
    BadInput(String),
}

/// Default exhaustive-search bound for cover search.
pub const COVER_SEARCH_BOUND: usize = 14;

/// A vertex-disjoint cover by two cycles; single vertices count as 1-cycles
/// and single edges as 2-cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCover {
    pub cycles: [Vec<usize>; 2],
}

impl CycleCover {
    pub fn side_of(&self, v: usize) -> Option<usize> {
        for (s, c) in self.cycles.iter().enumerate() {
            if c.contains(&v) {
                return Some(s);
            }
        }
        None
    }

    /// Vertices sitting alone in a 1-cycle.
    pub fn apexes(&self) -> BTreeSet<usize> {
        self.cycles
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| c[0])
            .collect()
    }

    /// The unordered vertex bipartition, for deduplication.
    pub fn partition_key(&self, n: usize) -> u64 {
        let mut mask = 0u64;
        for &v in &self.cycles[0] {
            mask |= 1 << v;
        }
        let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        mask.min(full & !mask)
    }
}

/// A graph with red/blue edge colors and an optional two-cycle cover.
#[derive(Debug, Clone)]
pub struct ColoredGraph {
    pub n: usize,
    pub colors: BTreeMap<Edge, EdgeColor>,
    pub cover: Option<CycleCover>,
}

impl ColoredGraph {
    pub fn new(n: usize, colored: Vec<(usize, usize, EdgeColor)>) -> Result<Self, GraphError> {
        let mut colors = BTreeMap::new();
        for (u, v, c) in colored {
            if u == v || u >= n || v >= n {
                return Err(GraphError::BadInput(format!("bad edge ({u}, {v})")));
            }
            if colors.insert(edge(u, v), c).is_some() {
                return Err(GraphError::BadInput(format!("repeated edge ({u}, {v})")));
            }
        }
        Ok(ColoredGraph {
            n,
            colors,
            cover: None,
        })
    }

    /// Colors derived from a cover: red within a cycle, blue across.
    pub fn from_cover(
        n: usize,
        edges: &BTreeSet<Edge>,
        cover: CycleCover,
    ) -> Result<Self, GraphError> {
        let mut g = ColoredGraph {
            n,
            colors: BTreeMap::new(),
            cover: None,
        };
        for &(u, v) in edges {
            let same = cover.side_of(u) == cover.side_of(v);
            g.colors.insert(
                edge(u, v),
                if same { EdgeColor::Red } else { EdgeColor::Blue },
            );
        }
        g.set_cover(cover)?;
        Ok(g)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.colors.keys().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.colors.contains_key(&edge(u, v))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.colors.keys().filter(|(a, b)| *a == v || *b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.colors
            .keys()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn set_cover(&mut self, cover: CycleCover) -> Result<(), GraphError> {
        self.validate_cover(&cover)?;
        self.cover = Some(cover);
        Ok(())
    }

    /// A valid cover partitions the vertices, its ≥3-cycles are cycles of
    /// the graph (2-cycles need their edge), and the coloring is the one it
    /// induces.
    pub fn validate_cover(&self, cover: &CycleCover) -> Result<(), GraphError> {
        let mut seen = vec![false; self.n];
        for c in &cover.cycles {
            if c.is_empty() {
                return Err(GraphError::InvalidCover("empty cycle".into()));
            }
            for &v in c {
                if v >= self.n {
                    return Err(GraphError::InvalidCover(format!("vertex {v} out of range")));
                }
                if seen[v] {
                    return Err(GraphError::InvalidCover(format!("vertex {v} repeated")));
                }
                seen[v] = true;
            }
            match c.len() {
                1 => {}
                2 => {
                    if !self.has_edge(c[0], c[1]) {
                        return Err(GraphError::InvalidCover(format!(
                            "2-cycle ({}, {}) without its edge",
                            c[0], c[1]
                        )));
                    }
                }
                k => {
                    for i in 0..k {
                        if !self.has_edge(c[i], c[(i + 1) % k]) {
                            return Err(GraphError::InvalidCover(format!(
                                "cover cycle misses edge ({}, {})",
                                c[i],
                                c[(i + 1) % k]
                            )));
                        }
                    }
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(GraphError::InvalidCover("cover misses vertices".into()));
        }
        for (&(u, v), &c) in &self.colors {
            let same = cover.side_of(u) == cover.side_of(v);
            let want = if same { EdgeColor::Red } else { EdgeColor::Blue };
            if c != want {
                return Err(GraphError::InvalidCover(format!(
                    "edge ({u}, {v}) colored {c:?} but cover says {want:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Hamiltonian cycle of the induced subgraph on `verts`, as a cyclic vertex
/// list; 1- and 2-element sets follow the degenerate conventions.
fn ham_cycle(verts: &[usize], has_edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let k = verts.len();
    match k {
        0 => None,
        1 => Some(vec![verts[0]]),
        2 => {
            if has_edge(verts[0], verts[1]) {
                Some(verts.to_vec())
            } else {
                None
            }
        }
        _ => {
            let adj: Vec<u32> = (0..k)
                .map(|i| {
                    let mut m = 0u32;
                    for j in 0..k {
                        if j != i && has_edge(verts[i], verts[j]) {
                            m |= 1 << j;
                        }
                    }
                    m
                })
                .collect();
            // DP over (visited mask, last), path rooted at 0.
            let full = (1u32 << k) - 1;
            let mut dp = vec![0u32; 1 << k];
            dp[1] = 1;
            for mask in 1..=full {
                let lasts = dp[mask as usize];
                if lasts == 0 || mask & 1 == 0 {
                    continue;
                }
                for last in 0..k {
                    if lasts & (1 << last) == 0 {
                        continue;
                    }
                    let mut cands = adj[last] & !mask;
                    while cands != 0 {
                        let nb = cands.trailing_zeros() as usize;
                        cands &= cands - 1;
                        dp[(mask | 1 << nb) as usize] |= 1 << nb;
                    }
                }
            }
            let finals = dp[full as usize] & adj[0];
            if finals == 0 {
                return None;
            }
            // Reconstruct backwards.
            let mut order = Vec::with_capacity(k);
            let mut mask = full;
            let mut last = finals.trailing_zeros() as usize;
            order.push(last);
            while mask != 1 {
                let prev_mask = mask & !(1 << last);
                let mut found = None;
                for prev in 0..k {
                    if prev_mask & (1 << prev) != 0
                        && dp[prev_mask as usize] & (1 << prev) != 0
                        && adj[prev] & (1 << last) != 0
                        && (prev != 0 || prev_mask == 1)
                    {
                        found = Some(prev);
                        break;
                    }
                }
                last = found?;
                order.push(last);
                mask = prev_mask;
            }
            order.reverse();
            Some(order.into_iter().map(|i| verts[i]).collect())
        }
    }
}

/// First two-cycle cover found by exhaustive bipartition search, honoring
/// given colors when provided.
pub fn find_two_cycle_cover(
    n: usize,
    edges: &BTreeSet<Edge>,
    colors: Option<&BTreeMap<Edge, EdgeColor>>,
    bound: usize,
) -> Result<Option<CycleCover>, GraphError> {
    let mut all = enumerate_two_cycle_covers(n, edges, colors, bound, true)?;
    Ok(all.pop())
}

/// All two-cycle covers up to swapping the sides, deduplicated by the
/// vertex bipartition (the induced coloring depends only on that).
pub fn enumerate_two_cycle_covers(
    n: usize,
    edges: &BTreeSet<Edge>,
    colors: Option<&BTreeMap<Edge, EdgeColor>>,
    bound: usize,
    first_only: bool,
) -> Result<Vec<CycleCover>, GraphError> {
    if n > bound || n >= 64 {
        return Err(GraphError::TooLarge(n, bound));
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let has_edge = |u: usize, v: usize| edges.contains(&edge(u, v));
    let mut found = Vec::new();
    let mut seen_masks = BTreeSet::new();
    // Vertex 0 always on side A: halves the enumeration.
    for mask in 0..(1u64 << (n - 1)) {
        let side_a: Vec<usize> = std::iter::once(0)
            .chain((1..n).filter(|&v| mask & (1 << (v - 1)) != 0))
            .collect();
        let side_b: Vec<usize> = (1..n).filter(|&v| mask & (1 << (v - 1)) == 0).collect();
        if side_b.is_empty() {
            continue;
        }
        if let Some(cols) = colors {
            let consistent = cols.iter().all(|(&(u, v), &c)| {
                let same = (side_a.contains(&u) && side_a.contains(&v))
                    || (side_b.contains(&u) && side_b.contains(&v));
                c == if same { EdgeColor::Red } else { EdgeColor::Blue }
            });
            if !consistent {
                continue;
            }
        }
        let Some(ca) = ham_cycle(&side_a, has_edge) else {
            continue;
        };
        let Some(cb) = ham_cycle(&side_b, has_edge) else {
            continue;
        };
        let cover = CycleCover { cycles: [ca, cb] };
        if seen_masks.insert(cover.partition_key(n)) {
            found.push(cover);
            if first_only {
                return Ok(found);
            }
        }
    }
    Ok(found)
}

/// The doubled digraph: vertex v lifts to v₋ (node 2v) and v₊ (node 2v+1);
/// a red edge uv contributes u₋→v₊ and v₋→u₊, a blue edge u₊→v₋ and v₊→u₋.
/// Directed cycles project exactly onto color-alternating closed walks.
#[derive(Debug, Clone)]
pub struct DirectedLift {
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
}

impl DirectedLift {
    pub fn from_colors(n: usize, colors: &BTreeMap<Edge, EdgeColor>) -> Self {
        let mut adj = vec![Vec::new(); 2 * n];
        for (&(u, v), &c) in colors {
            match c {
                EdgeColor::Red => {
                    adj[2 * u].push(2 * v + 1);
                    adj[2 * v].push(2 * u + 1);
                }
                EdgeColor::Blue => {
                    adj[2 * u + 1].push(2 * v);
                    adj[2 * v + 1].push(2 * u);
                }
            }
        }
        DirectedLift { n, adj }
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum()
    }
}

/// Strongly connected components (iterative Kosaraju); returns component
/// ids per node.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    let mut radj = vec![Vec::new(); n];
    for (v, outs) in adj.iter().enumerate() {
        for &w in outs {
            radj[w].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &v in order.iter().rev() {
        if comp[v] != usize::MAX {
            continue;
        }
        let mut stack = vec![v];
        comp[v] = c;
        while let Some(x) = stack.pop() {
            for &w in &radj[x] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

/// A closed walk whose edge colors alternate (bbr pattern at an apex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltCycle {
    pub vertices: Vec<usize>,
}

impl AltCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let k = self.vertices.len();
        (0..k)
            .map(|i| edge(self.vertices[i], self.vertices[(i + 1) % k]))
            .collect()
    }

    /// Visit counts signed by color: +n_e on red, −n_e on blue.
    pub fn signed_counts(&self, colors: &BTreeMap<Edge, EdgeColor>) -> BTreeMap<Edge, i64> {
        let mut counts: BTreeMap<Edge, i64> = BTreeMap::new();
        for e in self.edges() {
            let sign = match colors[&e] {
                EdgeColor::Red => 1,
                EdgeColor::Blue => -1,
            };
            *counts.entry(e).or_insert(0) += sign;
        }
        counts
    }

    /// Strict red/blue alternation along the walk.
    pub fn is_alternating(&self, colors: &BTreeMap<Edge, EdgeColor>) -> bool {
        let es = self.edges();
        let k = es.len();
        if k == 0 || k % 2 != 0 {
            return false;
        }
        (0..k).all(|i| {
            colors.get(&es[i]).is_some()
                && colors[&es[i]] != colors[&es[(i + 1) % k]]
        })
    }
}

#[derive(Debug, Clone)]
pub struct C2Report {
    pub ok: bool,
    /// One witness alternating cycle per edge (deduplicated).
    pub witnesses: Vec<AltCycle>,
    pub failing_edges: Vec<Edge>,
    /// Whether the dominance shortcut for a 1-cycle cover was used.
    pub apex_case: bool,
}

/// The alternating-cycle condition: with a 1-cycle in the cover it reduces
/// to the apex dominating every other vertex; otherwise every edge must lie
/// on an alternating cycle, decided on the directed lift via strongly
/// connected components.
pub fn check_c2(graph: &ColoredGraph) -> Result<C2Report, GraphError> {
    let cover = graph
        .cover
        .as_ref()
        .ok_or_else(|| GraphError::InvalidCover("cover required".into()))?;
    graph.validate_cover(cover)?;
    let apexes = cover.apexes();
    if apexes.len() > 1 {
        return Err(GraphError::InvalidCover(
            "two 1-cycles cannot cover a polyhedral graph".into(),
        ));
    }
    if let Some(&v0) = apexes.iter().next() {
        // Dominance: v0 adjacent to every other vertex; witnesses are the
        // blue-blue-red triangles through the apex.
        let mut failing = Vec::new();
        for v in 0..graph.n {
            if v != v0 && !graph.has_edge(v0, v) {
                for w in graph.neighbors(v) {
                    failing.push(edge(v, w));
                }
            }
        }
        failing.sort();
        failing.dedup();
        let ok = failing.is_empty();
        let witnesses = if ok {
            graph
                .colors
                .iter()
                .filter(|(_, &c)| c == EdgeColor::Red)
                .map(|(&(u, w), _)| AltCycle {
                    vertices: vec![v0, u, w],
                })
                .collect()
        } else {
            Vec::new()
        };
        return Ok(C2Report {
            ok,
            witnesses,
            failing_edges: failing,
            apex_case: true,
        });
    }

    let lift = DirectedLift::from_colors(graph.n, &graph.colors);
    let comp = strongly_connected_components(&lift.adj);
    let mut witnesses = Vec::new();
    let mut seen_counts: BTreeSet<Vec<(Edge, i64)>> = BTreeSet::new();
    let mut failing = Vec::new();
    for (&(u, v), &c) in &graph.colors {
        // The two lifted arcs of this edge.
        let arcs = match c {
            EdgeColor::Red => [(2 * u, 2 * v + 1), (2 * v, 2 * u + 1)],
            EdgeColor::Blue => [(2 * u + 1, 2 * v), (2 * v + 1, 2 * u)],
        };
        let mut cycle = None;
        for (from, to) in arcs {
            if comp[from] == comp[to] {
                if let Some(path) = bfs_path(&lift.adj, to, from, &comp) {
                    cycle = Some(path);
                    break;
                }
            }
        }
        match cycle {
            Some(nodes) => {
                let alt = AltCycle {
                    vertices: nodes.iter().map(|&x| x / 2).collect(),
                };
                debug_assert!(alt.is_alternating(&graph.colors));
                let key: Vec<(Edge, i64)> =
                    alt.signed_counts(&graph.colors).into_iter().collect();
                if seen_counts.insert(key) {
                    witnesses.push(alt);
                }
            }
            None => failing.push(edge(u, v)),
        }
    }
    Ok(C2Report {
        ok: failing.is_empty(),
        witnesses,
        failing_edges: failing,
        apex_case: false,
    })
}

/// Shortest directed path from..to within one strongly connected component,
/// returned as the node sequence [from, ..., to].
fn bfs_path(adj: &[Vec<usize>], from: usize, to: usize, comp: &[usize]) -> Option<Vec<usize>> {
    if from == to {
        return Some(vec![from]);
    }
    let mut prev = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    queue.push_back(from);
    prev[from] = from;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if comp[y] == comp[from] && prev[y] == usize::MAX {
                prev[y] = x;
                if y == to {
                    let mut path = vec![to];
                    let mut cur = to;
                    while cur != from {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(y);
            }
        }
    }
    None
}

/// A colored graph with exact rational weights in units of π. Zero weights
/// are permitted only on explicitly flagged edges.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    pub graph: ColoredGraph,
    pub weights: BTreeMap<Edge, Rat>,
    pub zero_flagged: BTreeSet<Edge>,
}

impl WeightedGraph {
    pub fn vertex_weight(&self, v: usize) -> Rat {
        self.weights
            .iter()
            .filter(|((a, b), _)| *a == v || *b == v)
            .map(|(_, w)| w.clone())
            .sum()
    }

    pub fn blue_sum(&self) -> Rat {
        self.weights
            .iter()
            .filter(|(e, _)| self.graph.colors.get(e) == Some(&EdgeColor::Blue))
            .map(|(_, w)| w.clone())
            .sum()
    }
}

/// Exact W1/W2 verification: strict signs by color (zero only on flagged
/// edges) and vertex sums 0, except −2π at a 1-cycle apex.
pub fn verify_w1_w2(wg: &WeightedGraph) -> Result<(), String> {
    let cover = wg
        .graph
        .cover
        .as_ref()
        .ok_or_else(|| "cover required".to_string())?;
    for (e, w) in &wg.weights {
        let color = wg
            .graph
            .colors
            .get(e)
            .ok_or_else(|| format!("weight on non-edge {e:?}"))?;
        let ok = match color {
            EdgeColor::Red => w.is_positive(),
            EdgeColor::Blue => w.is_negative(),
        };
        if !ok && !(w.is_zero() && wg.zero_flagged.contains(e)) {
            return Err(format!("W1 fails on {e:?}: weight {w}"));
        }
    }
    let apexes = cover.apexes();
    for v in 0..wg.graph.n {
        let sum = wg.vertex_weight(v);
        let target = if apexes.contains(&v) {
            lp::rat(-2, 1)
        } else {
            Rat::zero()
        };
        if sum != target {
            return Err(format!("W2 fails at vertex {v}: sum {sum}, want {target}"));
        }
    }
    Ok(())
}

/// Weight synthesis from witness alternating cycles: sum the signed visit
/// counts of one witness per edge; in the apex case rescale so the apex
/// sum is exactly −2π.
pub fn synthesize_by_cycles(graph: &ColoredGraph) -> Result<WeightedGraph, GraphError> {
    let report = check_c2(graph)?;
    if !report.ok {
        return Err(GraphError::NotAdmissible(report.failing_edges.len()));
    }
    let mut weights: BTreeMap<Edge, Rat> = BTreeMap::new();
    for cyc in &report.witnesses {
        for (e, c) in cyc.signed_counts(&graph.colors) {
            let entry = weights.entry(e).or_insert_with(Rat::zero);
            *entry += BigRational::from_integer(BigInt::from(c));
        }
    }
    let mut wg = WeightedGraph {
        graph: graph.clone(),
        weights,
        zero_flagged: BTreeSet::new(),
    };
    let apexes = graph.cover.as_ref().unwrap().apexes();
    if let Some(&v0) = apexes.iter().next() {
        let apex_sum = wg.vertex_weight(v0);
        if !apex_sum.is_negative() {
            return Err(GraphError::BadInput(format!(
                "apex sum {apex_sum} not negative"
            )));
        }
        let t = lp::rat(-2, 1) / apex_sum;
        for w in wg.weights.values_mut() {
            *w *= &t;
        }
    }
    Ok(wg)
}

/// Positive outerplanar weights on one cover component: the k-cycle plus
/// non-crossing diagonals, local vertex ids 0..k.
#[derive(Debug, Clone)]
pub struct PositivePart {
    pub k: usize,
    pub weights: BTreeMap<Edge, Rat>,
}

impl PositivePart {
    pub fn new(k: usize, weights: BTreeMap<Edge, Rat>) -> Result<Self, GraphError> {
        if k < 2 {
            return Err(GraphError::BadInput(
                "positive part needs at least a 2-cycle".into(),
            ));
        }
        let part = PositivePart { k, weights };
        // Cycle support present and positive.
        if k == 2 {
            if !part.weights.get(&(0, 1)).map(|w| w.is_positive()).unwrap_or(false) {
                return Err(GraphError::BadInput("2-cycle edge missing".into()));
            }
            if part.weights.len() != 1 {
                return Err(GraphError::BadInput("2-cycle supports one edge".into()));
            }
            return Ok(part);
        }
        for i in 0..k {
            let e = edge(i, (i + 1) % k);
            if !part.weights.get(&e).map(|w| w.is_positive()).unwrap_or(false) {
                return Err(GraphError::BadInput(format!("cycle edge {e:?} missing")));
            }
        }
        let mut diagonals = Vec::new();
        for (&(a, b), w) in &part.weights {
            if b >= k {
                return Err(GraphError::BadInput(format!("vertex {b} out of range")));
            }
            if !w.is_positive() {
                return Err(GraphError::BadInput(format!("non-positive weight on ({a},{b})")));
            }
            let cyclic = (b == a + 1) || (a == 0 && b == k - 1);
            if !cyclic {
                diagonals.push((a, b));
            }
        }
        for (i, &(a, b)) in diagonals.iter().enumerate() {
            for &(c, d) in &diagonals[i + 1..] {
                let crossing = (a < c && c < b && b < d) || (c < a && a < d && d < b);
                if crossing {
                    return Err(GraphError::BadInput(format!(
                        "diagonals ({a},{b}) and ({c},{d}) cross"
                    )));
                }
            }
        }
        Ok(part)
    }

    pub fn total(&self) -> Rat {
        self.weights.values().cloned().sum()
    }

    pub fn vertex_weight(&self, v: usize) -> Rat {
        self.weights
            .iter()
            .filter(|((a, b), _)| *a == v || *b == v)
            .map(|(_, w)| w.clone())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeltSign {
    Plus,
    Minus,
}

/// The greedy belt: positive parts on both cover components with equal
/// totals ω, a first blue edge 1⁺1⁻ of chosen weight s ∈ [−min(w₁₊, w₁₋), 0]
/// and a side σ to advance, then blue weights −min of the residual vertex
/// weights with indices advancing past exhausted vertices. Terminates with
/// all vertex weights zero; global ids are 0..p−1 on the plus side and
/// p..p+q−1 on the minus side.
pub fn greedy_belt(
    plus: &PositivePart,
    minus: &PositivePart,
    s: &Rat,
    sigma: BeltSign,
) -> Result<WeightedGraph, GraphError> {
    let (p, q) = (plus.k, minus.k);
    let omega = plus.total();
    if minus.total() != omega {
        return Err(GraphError::BadInput(
            "component sums differ between the two sides".into(),
        ));
    }
    if !omega.is_positive() || omega >= lp::rat(1, 1) {
        return Err(GraphError::BadInput(format!(
            "component sum ω = {omega} outside (0, π)"
        )));
    }
    let mut res_p: Vec<Rat> = (0..p).map(|i| plus.vertex_weight(i)).collect();
    let mut res_q: Vec<Rat> = (0..q).map(|j| minus.vertex_weight(j)).collect();
    if s.is_positive() {
        return Err(GraphError::BadInput("first-step weight must be ≤ 0".into()));
    }
    let bound = if res_p[0] < res_q[0] {
        res_p[0].clone()
    } else {
        res_q[0].clone()
    };
    if -s.clone() > bound {
        return Err(GraphError::BadInput(format!(
            "first-step weight {s} below −min(w₁₊, w₁₋) = −{bound}"
        )));
    }
    let mut blue: BTreeMap<Edge, Rat> = BTreeMap::new();
    let mut zero_flagged = BTreeSet::new();
    let global = |side: BeltSign, i: usize| match side {
        BeltSign::Plus => i,
        BeltSign::Minus => p + i,
    };
    let mut draw = |i: usize, j: usize, w: &Rat, blue: &mut BTreeMap<Edge, Rat>| {
        let e = edge(global(BeltSign::Plus, i), global(BeltSign::Minus, j));
        let entry = blue.entry(e).or_insert_with(Rat::zero);
        *entry += w.clone();
        if w.is_zero() {
            zero_flagged.insert(e);
        }
    };
    // First step.
    draw(0, 0, s, &mut blue);
    res_p[0] += s.clone();
    res_q[0] += s.clone();
    let (mut i, mut j) = (1usize, 1usize);
    match sigma {
        BeltSign::Plus => i = 2,
        BeltSign::Minus => j = 2,
    }
    let mut steps = 0usize;
    while i <= p || j <= q {
        steps += 1;
        if steps > p + q + 2 {
            return Err(GraphError::BadInput(
                "greedy walk failed to terminate".into(),
            ));
        }
        let ei = (i - 1) % p;
        let ej = (j - 1) % q;
        let w = if res_p[ei] < res_q[ej] {
            -res_p[ei].clone()
        } else {
            -res_q[ej].clone()
        };
        draw(ei, ej, &w, &mut blue);
        res_p[ei] += w.clone();
        res_q[ej] += w.clone();
        let (zi, zj) = (res_p[ei].is_zero(), res_q[ej].is_zero());
        if zi {
            i += 1;
        }
        if zj {
            j += 1;
        }
        if !zi && !zj {
            return Err(GraphError::BadInput(
                "greedy step left both residuals positive".into(),
            ));
        }
    }
    if res_p.iter().any(|r| !r.is_zero()) || res_q.iter().any(|r| !r.is_zero()) {
        return Err(GraphError::BadInput(
            "greedy walk ended with residual weight".into(),
        ));
    }
    // Assemble the global weighted graph.
    let mut colors = BTreeMap::new();
    let mut weights = BTreeMap::new();
    for (&(a, b), w) in &plus.weights {
        colors.insert(edge(a, b), EdgeColor::Red);
        weights.insert(edge(a, b), w.clone());
    }
    for (&(a, b), w) in &minus.weights {
        colors.insert(edge(p + a, p + b), EdgeColor::Red);
        weights.insert(edge(p + a, p + b), w.clone());
    }
    for (&e, w) in &blue {
        colors.insert(e, EdgeColor::Blue);
        weights.insert(e, w.clone());
    }
    let cover = CycleCover {
        cycles: [
            (0..p).collect::<Vec<_>>(),
            (0..q).map(|j| p + j).collect::<Vec<_>>(),
        ],
    };
    let mut graph = ColoredGraph {
        n: p + q,
        colors,
        cover: None,
    };
    graph.set_cover(cover)?;
    Ok(WeightedGraph {
        graph,
        weights,
        zero_flagged,
    })
}

/// Rescale a W-feasible graph so the blue sum is −2ω₀ (ω₀ ∈ (0, π)); with a
/// 1-cycle the scale is forced by the −2π apex constraint and ω₀ may not be
/// supplied.
pub fn normalize(wg: &WeightedGraph, omega0: Option<Rat>) -> Result<WeightedGraph, GraphError> {
    let cover = wg
        .graph
        .cover
        .as_ref()
        .ok_or_else(|| GraphError::InvalidCover("cover required".into()))?;
    let apexes = cover.apexes();
    let t = if let Some(&v0) = apexes.iter().next() {
        if omega0.is_some() {
            return Err(GraphError::ApexConflict);
        }
        let sum = wg.vertex_weight(v0);
        if !sum.is_negative() {
            return Err(GraphError::BadInput("apex sum not negative".into()));
        }
        lp::rat(-2, 1) / sum
    } else {
        let omega0 = omega0.unwrap_or_else(|| lp::rat(1, 2));
        if !omega0.is_positive() || omega0 >= lp::rat(1, 1) {
            return Err(GraphError::BadInput(format!("ω₀ = {omega0} outside (0, π)")));
        }
        let blue = wg.blue_sum();
        if !blue.is_negative() {
            return Err(GraphError::BadInput("blue sum not negative".into()));
        }
        (-lp::rat(2, 1) * omega0) / blue
    };
    let mut out = wg.clone();
    for w in out.weights.values_mut() {
        *w *= &t;
    }
    Ok(out)
}

/// A random point of the positive part: (1−t)·(weights on the q-cycle) +
/// t·(weights on the diagonals of a random triangulation), total exactly π.
pub fn sample_positive_part<R: Rng>(q: usize, t: &Rat, rng: &mut R) -> Result<PositivePart, GraphError> {
    if q < 3 {
        return Err(GraphError::BadInput("sampler needs q ≥ 3".into()));
    }
    if t.is_negative() || *t >= lp::rat(1, 1) {
        return Err(GraphError::BadInput(format!("t = {t} outside [0, 1)")));
    }
    if !t.is_zero() && q == 3 {
        return Err(GraphError::BadInput(
            "a triangle has no diagonals; t must be 0".into(),
        ));
    }
    let random_simplex = |rng: &mut R, k: usize| -> Vec<Rat> {
        let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..1000)).collect();
        let total: i64 = raw.iter().sum();
        raw.into_iter().map(|a| lp::rat(a, total)).collect()
    };
    let mut weights: BTreeMap<Edge, Rat> = BTreeMap::new();
    let cycle_w = random_simplex(rng, q);
    let one_minus_t = lp::rat(1, 1) - t;
    for (i, w) in cycle_w.into_iter().enumerate() {
        weights.insert(edge(i, (i + 1) % q), w * &one_minus_t);
    }
    if !t.is_zero() {
        // Random triangulation of the q-gon by recursive splitting.
        let mut diagonals = Vec::new();
        fn split<R: Rng>(a: usize, b: usize, rng: &mut R, out: &mut Vec<Edge>) {
            if b - a < 2 {
                return;
            }
            let m = rng.gen_range(a + 1..b);
            if m > a + 1 {
                out.push(edge(a, m));
            }
            if b > m + 1 {
                out.push(edge(m, b));
            }
            split(a, m, rng, out);
            split(m, b, rng, out);
        }
        split(0, q - 1, rng, &mut diagonals);
        debug_assert_eq!(diagonals.len(), q - 3);
        let diag_w = random_simplex(rng, diagonals.len());
        for (e, w) in diagonals.into_iter().zip(diag_w) {
            let entry = weights.entry(e).or_insert_with(Rat::zero);
            *entry += w * t;
        }
    }
    PositivePart::new(q, weights)
}

#[derive(Debug, Clone)]
pub struct WFeasibility {
    pub feasible: bool,
    /// Optimal strictness margin (positive iff feasible).
    pub margin: Rat,
    pub witness: Option<WeightedGraph>,
    /// Farkas row multipliers when the equality system itself is infeasible.
    pub farkas: Option<Vec<Rat>>,
}

/// Exact feasibility of the W-system: w > 0 on red, w < 0 on blue, vertex
/// sums 0 (−2π at a 1-cycle apex). Strictness is decided by maximizing a
/// single margin m, capped at 1: feasible iff the optimum is positive.
pub fn lp_feasible(graph: &ColoredGraph) -> Result<WFeasibility, GraphError> {
    let cover = graph
        .cover
        .as_ref()
        .ok_or_else(|| GraphError::InvalidCover("cover required".into()))?;
    graph.validate_cover(cover)?;
    let apexes = cover.apexes();
    let edges: Vec<Edge> = graph.edges().collect();
    let ne = edges.len();
    // Columns: w⁺_e, w⁻_e (e ∈ E), m, s_e (e ∈ E), s_cap.
    let ncols = 2 * ne + 1 + ne + 1;
    let col_wp = |e: usize| 2 * e;
    let col_wn = |e: usize| 2 * e + 1;
    let col_m = 2 * ne;
    let col_s = |e: usize| 2 * ne + 1 + e;
    let col_cap = ncols - 1;
    let mut a = Vec::new();
    let mut b = Vec::new();
    // Sign rows: red w − m − s = 0; blue w + m + s = 0.
    for (idx, e) in edges.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols];
        row[col_wp(idx)] = lp::rat(1, 1);
        row[col_wn(idx)] = lp::rat(-1, 1);
        match graph.colors[e] {
            EdgeColor::Red => {
                row[col_m] = lp::rat(-1, 1);
                row[col_s(idx)] = lp::rat(-1, 1);
            }
            EdgeColor::Blue => {
                row[col_m] = lp::rat(1, 1);
                row[col_s(idx)] = lp::rat(1, 1);
            }
        }
        a.push(row);
        b.push(Rat::zero());
    }
    // Cap m ≤ 1 to keep the objective bounded.
    let mut row = vec![Rat::zero(); ncols];
    row[col_m] = lp::rat(1, 1);
    row[col_cap] = lp::rat(1, 1);
    a.push(row);
    b.push(lp::rat(1, 1));
    // Vertex sums.
    for v in 0..graph.n {
        let mut row = vec![Rat::zero(); ncols];
        for (idx, &(x, y)) in edges.iter().enumerate() {
            if x == v || y == v {
                row[col_wp(idx)] = lp::rat(1, 1);
                row[col_wn(idx)] = lp::rat(-1, 1);
            }
        }
        a.push(row);
        b.push(if apexes.contains(&v) {
            lp::rat(-2, 1)
        } else {
            Rat::zero()
        });
    }
    let mut c = vec![Rat::zero(); ncols];
    c[col_m] = lp::rat(-1, 1);
    let outcome = lp::solve(&LpProblem { a, b, c });
    match outcome {
        LpOutcome::Optimal { x, objective } => {
            let margin = -objective;
            let feasible = margin.is_positive();
            let witness = if feasible {
                let mut weights = BTreeMap::new();
                for (idx, &e) in edges.iter().enumerate() {
                    weights.insert(e, &x[col_wp(idx)] - &x[col_wn(idx)]);
                }
                Some(WeightedGraph {
                    graph: graph.clone(),
                    weights,
                    zero_flagged: BTreeSet::new(),
                })
            } else {
                None
            };
            Ok(WFeasibility {
                feasible,
                margin,
                witness,
                farkas: None,
            })
        }
        LpOutcome::Infeasible { farkas } => Ok(WFeasibility {
            feasible: false,
            margin: Rat::zero(),
            witness: None,
            farkas: Some(farkas),
        }),
        LpOutcome::Unbounded => Err(GraphError::BadInput(
            "margin LP cannot be unbounded with the cap row".into(),
        )),
    }
}

/// Inclusion-minimal alternating cycles, via simple directed cycles of the
/// lift (each is rooted at its smallest node). Walk length is capped at
/// `max_len` edges and enumeration at `cap` cycles.
pub fn minimal_alternating_cycles(
    graph: &ColoredGraph,
    max_len: usize,
    cap: usize,
) -> Result<Vec<AltCycle>, GraphError> {
    let lift = DirectedLift::from_colors(graph.n, &graph.colors);
    let nn = 2 * graph.n;
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for root in 0..nn {
        // DFS over nodes ≥ root, collecting simple cycles through root.
        let mut stack = vec![(root, vec![root], 1u64 << root)];
        while let Some((v, path, visited)) = stack.pop() {
            for &w in &lift.adj[v] {
                if w == root && path.len() >= 2 {
                    cycles.push(path.clone());
                    if cycles.len() > cap {
                        return Err(GraphError::TooLarge(cycles.len(), cap));
                    }
                } else if w > root && visited & (1 << w) == 0 && path.len() < max_len {
                    let mut p2 = path.clone();
                    p2.push(w);
                    stack.push((w, p2, visited | (1 << w)));
                }
            }
        }
    }
    // Project, dedup by support, filter inclusion-minimal supports.
    let mut seen: BTreeSet<BTreeSet<Edge>> = BTreeSet::new();
    let mut alts: Vec<(BTreeSet<Edge>, AltCycle)> = Vec::new();
    for nodes in cycles {
        let alt = AltCycle {
            vertices: nodes.iter().map(|&x| x / 2).collect(),
        };
        if !alt.is_alternating(&graph.colors) {
            continue;
        }
        let support: BTreeSet<Edge> = alt.edges().into_iter().collect();
        if seen.insert(support.clone()) {
            alts.push((support, alt));
        }
    }
    let minimal: Vec<AltCycle> = alts
        .iter()
        .filter(|(s, _)| {
            !alts
                .iter()
                .any(|(other, _)| other.len() < s.len() && other.is_subset(s))
        })
        .map(|(_, a)| a.clone())
        .collect();
    Ok(minimal)
}

/// Cycle peeling: repeatedly subtract a multiple of an alternating cycle's
/// signed counts from a W-feasible weight vector until nothing is left;
/// each step kills at least one support edge.
pub fn cycle_peel(wg: &WeightedGraph) -> Result<Vec<(AltCycle, Rat)>, GraphError> {
    let mut weights = wg.weights.clone();
    let mut peels = Vec::new();
    for _ in 0..=wg.weights.len() {
        let support: BTreeMap<Edge, EdgeColor> = weights
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(&e, _)| (e, wg.graph.colors[&e]))
            .collect();
        if support.is_empty() {
            return Ok(peels);
        }
        let lift = DirectedLift::from_colors(wg.graph.n, &support);
        let comp = strongly_connected_components(&lift.adj);
        let mut found = None;
        'outer: for (&(u, v), &c) in &support {
            let arcs = match c {
                EdgeColor::Red => [(2 * u, 2 * v + 1), (2 * v, 2 * u + 1)],
                EdgeColor::Blue => [(2 * u + 1, 2 * v), (2 * v + 1, 2 * u)],
            };
            for (from, to) in arcs {
                if comp[from] == comp[to] {
                    if let Some(path) = bfs_path(&lift.adj, to, from, &comp) {
                        found = Some(AltCycle {
                            vertices: path.iter().map(|&x| x / 2).collect(),
                        });
                        break 'outer;
                    }
                }
            }
        }
        let Some(cycle) = found else {
            return Err(GraphError::BadInput(
                "support has no alternating cycle but is nonempty".into(),
            ));
        };
        let counts = cycle.signed_counts(&wg.graph.colors);
        let alpha = counts
            .iter()
            .map(|(e, &c)| {
                let w: &Rat = &weights[e];
                (w / BigRational::from_integer(BigInt::from(c))).abs()
            })
            .min()
            .unwrap();
        for (e, c) in &counts {
            let delta = &alpha * BigRational::from_integer(BigInt::from(*c));
            let w = weights.get_mut(e).unwrap();
            *w -= delta;
        }
        peels.push((cycle, alpha));
    }
    Err(GraphError::BadInput(
        "peeling exceeded the edge count".into(),
    ))
}

/// Random colored graph with a valid two-cycle cover by construction; not
/// necessarily planar or 3-connected.
pub fn random_covered_graph<R: Rng>(rng: &mut R, n: usize) -> ColoredGraph {
    assert!(n >= 4);
    let p = rng.gen_range(1..=(n / 2).max(1));
    let q = n - p;
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        ids.swap(i, j);
    }
    let side_a: Vec<usize> = ids[..p].to_vec();
    let side_b: Vec<usize> = ids[p..].to_vec();
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    for c in [&side_a, &side_b] {
        let k = c.len();
        if k == 2 {
            edges.insert(edge(c[0], c[1]));
        } else if k >= 3 {
            for i in 0..k {
                edges.insert(edge(c[i], c[(i + 1) % k]));
            }
            // A few random chords.
            for i in 0..k {
                for j in (i + 2)..k {
                    if rng.gen_bool(0.2) {
                        edges.insert(edge(c[i], c[j]));
                    }
                }
            }
        }
        let _ = q;
    }
    for &u in &side_a {
        for &v in &side_b {
            if rng.gen_bool(0.4) {
                edges.insert(edge(u, v));
            }
        }
    }
    let cover = CycleCover {
        cycles: [side_a, side_b],
    };
    ColoredGraph::from_cover(n, &edges, cover).expect("construction is valid by design")
}
