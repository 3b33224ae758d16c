//! Maximal independent sets in small graphs: exact counting, the classical
//! and refined upper bounds, named test graphs, perfect matchings, and the
//! perfect-matching scanner.
//!
//! Graphs have at most 64 vertices and store adjacency as `u64` rows.
//! Vertices that carry a loop upstream are kept in a separate `forbidden`
//! mask and are deleted before any counting.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::stream_rng;

pub const MAX_VERTICES: usize = 64;
/// Cap for the backtracking perfect-matching search.
pub const MATCHING_CAP: usize = 24;
/// Exhaustive scans enumerate every supergraph of a fixed matching.
pub const EXHAUSTIVE_SCAN_CAP: usize = 8;
pub const RANDOM_SCAN_CAP: usize = 20;
/// Attainer edge lists kept in a scan report; the full count is always kept.
pub const ATTAINER_LIMIT: usize = 64;

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

fn mask_below(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(v)
    })
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<u64>,
    forbidden: u64,
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    forbidden: Vec<usize>,
}

impl Serialize for SimpleGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphWire {
            n: self.n,
            edges: self.edges(),
            forbidden: bits(self.forbidden).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = GraphWire::deserialize(d)?;
        let mut g = SimpleGraph::from_edges(w.n, &w.edges).map_err(serde::de::Error::custom)?;
        for v in w.forbidden {
            g.forbid(v).map_err(serde::de::Error::custom)?;
        }
        Ok(g)
    }
}

impl SimpleGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::CapExceeded {
                what: "graph size",
                n,
                cap: MAX_VERTICES,
            });
        }
        Ok(SimpleGraph {
            n,
            adj: vec![0; n],
            forbidden: 0,
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = SimpleGraph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidArgument(format!(
                "edge {u}-{v} outside a graph on {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::InvalidArgument(format!(
                "self-loop at {u}; use forbid() for looped vertices"
            )));
        }
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
        Ok(())
    }

    /// Marks `v` as looped: it is dropped before enumeration.
    pub fn forbid(&mut self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
        }
        self.forbidden |= bit(v);
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn forbidden(&self) -> u64 {
        self.forbidden
    }

    /// Vertices that are not forbidden.
    pub fn active(&self) -> u64 {
        mask_below(self.n) & !self.forbidden
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| bits(self.adj[u] & !mask_below(u + 1)).map(move |v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn triangle_count(&self) -> usize {
        let mut t = 0;
        for (u, v) in self.edges() {
            t += (self.adj[u] & self.adj[v] & !mask_below(v + 1)).count_ones() as usize;
        }
        t
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges()
            .iter()
            .all(|&(u, v)| self.adj[u] & self.adj[v] == 0)
    }

    /// Subgraph induced by `keep`, relabeled in increasing vertex order.
    /// Forbidden marks carry over.
    pub fn induced(&self, keep: u64) -> SimpleGraph {
        let keep = keep & mask_below(self.n);
        let old: Vec<usize> = bits(keep).collect();
        let mut pos = [usize::MAX; MAX_VERTICES];
        for (i, &v) in old.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = SimpleGraph::new(old.len()).expect("induced subgraph is smaller");
        for (i, &v) in old.iter().enumerate() {
            for w in bits(self.adj[v] & keep) {
                g.adj[i] |= bit(pos[w]);
            }
            if self.forbidden & bit(v) != 0 {
                g.forbidden |= bit(i);
            }
        }
        g
    }

    /// The graph with forbidden vertices deleted.
    pub fn without_forbidden(&self) -> SimpleGraph {
        self.induced(self.active())
    }

    pub fn disjoint_union(&self, other: &SimpleGraph) -> Result<SimpleGraph> {
        let mut g = SimpleGraph::new(self.n + other.n)?;
        for (u, v) in self.edges() {
            g.add_edge(u, v)?;
        }
        for (u, v) in other.edges() {
            g.add_edge(u + self.n, v + self.n)?;
        }
        g.forbidden = self.forbidden | other.forbidden.checked_shl(self.n as u32).unwrap_or(0);
        Ok(g)
    }

    /// Connected components of the vertices in `within`, ordered by lowest vertex.
    pub fn components_of(&self, within: u64) -> Vec<u64> {
        let mut left = within;
        let mut out = Vec::new();
        while left != 0 {
            let mut comp = left & left.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v];
                }
                next &= within & !comp;
                comp |= next;
                frontier = next;
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }

    /// Text form: `n m`, then one `u v` line per edge (`u < v`, sorted).
    pub fn to_text(&self) -> String {
        let edges = self.edges();
        let mut s = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SimpleGraph> {
        let err = |line: usize, column: usize, message: String| Error::GraphSyntax {
            line,
            column,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, 1, "missing header line".into()))?;
        let [n, m] = parse_pair(header).map_err(|(c, msg)| err(1, c, msg))?;
        let mut g = SimpleGraph::new(n).map_err(|e| err(1, 1, e.to_string()))?;
        let mut prev: Option<(usize, usize)> = None;
        let mut seen = 0;
        for (i, line) in lines {
            let ln = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let [u, v] = parse_pair(line).map_err(|(c, msg)| err(ln, c, msg))?;
            if !(u < v && v < n) {
                return Err(err(ln, 1, format!("edge {u} {v} must satisfy u < v < {n}")));
            }
            if prev.is_some_and(|p| p >= (u, v)) {
                return Err(err(ln, 1, "edges must be sorted and unique".into()));
            }
            prev = Some((u, v));
            g.add_edge(u, v).map_err(|e| err(ln, 1, e.to_string()))?;
            seen += 1;
        }
        if seen != m {
            return Err(err(1, 1, format!("header announces {m} edges, found {seen}")));
        }
        Ok(g)
    }
}

fn parse_pair(line: &str) -> std::result::Result<[usize; 2], (usize, String)> {
    let mut out = [0usize; 2];
    let mut count = 0;
    let mut rest = line;
    let mut offset = 0;
    loop {
        let skipped = rest.len() - rest.trim_start().len();
        offset += skipped;
        rest = &rest[skipped..];
        if rest.is_empty() {
            break;
        }
        let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = &rest[..len];
        let col = offset + 1;
        if count == 2 {
            return Err((col, format!("unexpected token {tok:?}")));
        }
        out[count] = tok
            .parse()
            .map_err(|_| (col, format!("expected an integer, found {tok:?}")))?;
        count += 1;
        offset += len;
        rest = &rest[len..];
    }
    if count != 2 {
        return Err((offset + 1, "expected two integers".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisResult {
    pub count: u64,
    pub max_size: usize,
    pub min_size: usize,
}

/// Bron–Kerbosch style search for maximal independent sets, pivoting on the
/// vertex whose closed neighbourhood leaves the fewest branches.
fn mis_search(adj: &[u64], r: u64, p: u64, x: u64, visit: &mut dyn FnMut(u64)) {
    if p == 0 {
        if x == 0 {
            visit(r);
        }
        return;
    }
    let mut pivot_branches = u64::MAX;
    let mut best = u32::MAX;
    for u in bits(p | x) {
        let branches = p & (adj[u] | bit(u));
        let c = branches.count_ones();
        if c < best {
            best = c;
            pivot_branches = branches;
            if c <= 1 {
                break;
            }
        }
    }
    let (mut p, mut x) = (p, x);
    for v in bits(pivot_branches) {
        let closed = adj[v] | bit(v);
        mis_search(adj, r | bit(v), p & !closed, x & !closed, visit);
        p &= !bit(v);
        x |= bit(v);
    }
}

/// Number of maximal independent sets inside `within`, plus their extreme sizes.
fn count_within(adj: &[u64], within: u64) -> MisResult {
    let mut count = 0u64;
    let mut max_size = 0usize;
    let mut min_size = usize::MAX;
    mis_search(adj, 0, within, 0, &mut |r| {
        count += 1;
        let s = r.count_ones() as usize;
        max_size = max_size.max(s);
        min_size = min_size.min(s);
    });
    MisResult {
        count,
        max_size,
        min_size,
    }
}

/// Exact count of maximal independent sets of `g` after deleting forbidden
/// vertices. Components are counted separately and multiplied.
pub fn enumerate_mis(g: &SimpleGraph) -> MisResult {
    let mut total = MisResult {
        count: 1,
        max_size: 0,
        min_size: 0,
    };
    for comp in g.components_of(g.active()) {
        let r = count_within(&g.adj, comp);
        total.count = total.count.saturating_mul(r.count);
        total.max_size += r.max_size;
        total.min_size += r.min_size;
    }
    total
}

/// Count only, without splitting into components.
pub fn mis_count(g: &SimpleGraph) -> u64 {
    let mut c = 0u64;
    mis_search(&g.adj, 0, g.active(), 0, &mut |_| c += 1);
    c
}

/// Calls `visit` on every maximal independent set, as a vertex mask, in a
/// deterministic order.
pub fn for_each_mis(g: &SimpleGraph, mut visit: impl FnMut(u64)) {
    mis_search(&g.adj, 0, g.active(), 0, &mut visit);
}

pub fn all_mis(g: &SimpleGraph) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_mis(g, |m| out.push(m));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedGraph {
    Matching(usize),
    Complete(usize),
    Cycle(usize),
    Path(usize),
    Triangles(usize),
    /// Two triangles joined by a single edge.
    BridgeTriangles,
    CartesianProduct(Box<NamedGraph>, Box<NamedGraph>),
}

impl NamedGraph {
    pub fn build(&self) -> Result<SimpleGraph> {
        match self {
            NamedGraph::Matching(m) => matching(*m),
            NamedGraph::Complete(m) => complete(*m),
            NamedGraph::Cycle(m) => cycle(*m),
            NamedGraph::Path(m) => path(*m),
            NamedGraph::Triangles(t) => triangles(*t),
            NamedGraph::BridgeTriangles => Ok(bridge_triangles()),
            NamedGraph::CartesianProduct(a, b) => cartesian_product(&a.build()?, &b.build()?),
        }
    }
}

pub fn matching(m: usize) -> Result<SimpleGraph> {
    let edges: Vec<_> = (0..m).map(|i| (2 * i, 2 * i + 1)).collect();
    SimpleGraph::from_edges(2 * m, &edges)
}

pub fn complete(m: usize) -> Result<SimpleGraph> {
    let edges: Vec<_> = (0..m)
        .flat_map(|u| (u + 1..m).map(move |v| (u, v)))
        .collect();
    SimpleGraph::from_edges(m, &edges)
}

pub fn cycle(m: usize) -> Result<SimpleGraph> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("cycle needs >= 3 vertices, got {m}")));
    }
    let edges: Vec<_> = (0..m).map(|i| (i, (i + 1) % m)).collect();
    SimpleGraph::from_edges(m, &edges)
}

pub fn path(m: usize) -> Result<SimpleGraph> {
    let edges: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
    SimpleGraph::from_edges(m, &edges)
}

/// `t` disjoint triangles.
pub fn triangles(t: usize) -> Result<SimpleGraph> {
    let edges: Vec<_> = (0..t)
        .flat_map(|i| {
            let b = 3 * i;
            [(b, b + 1), (b, b + 2), (b + 1, b + 2)]
        })
        .collect();
    SimpleGraph::from_edges(3 * t, &edges)
}

/// Triangles `{0,1,2}` and `{3,4,5}` joined by the edge `2-3`.
pub fn bridge_triangles() -> SimpleGraph {
    SimpleGraph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)])
        .expect("fixed graph")
}

/// `(x, y) ~ (x', y')` iff one coordinate agrees and the other is an edge.
/// Vertex `(x, y)` gets label `x * |h| + y`.
pub fn cartesian_product(g: &SimpleGraph, h: &SimpleGraph) -> Result<SimpleGraph> {
    let (a, b) = (g.n_vertices(), h.n_vertices());
    let mut out = SimpleGraph::new(a * b)?;
    for x in 0..a {
        for (y, y2) in h.edges() {
            out.add_edge(x * b + y, x * b + y2)?;
        }
    }
    for (x, x2) in g.edges() {
        for y in 0..b {
            out.add_edge(x * b + y, x2 * b + y)?;
        }
    }
    Ok(out)
}

fn round_up(x: f64) -> f64 {
    x + x.abs() * 8.0 * f64::EPSILON
}

fn active_stats(g: &SimpleGraph) -> (SimpleGraph, usize) {
    let h = g.without_forbidden();
    let n = h.n_vertices();
    (h, n)
}

/// `3^{n/3}`.
pub fn bound_moon_moser(g: &SimpleGraph) -> f64 {
    let (_, n) = active_stats(g);
    round_up(3f64.powf(n as f64 / 3.0))
}

/// `2^{n/2}` for triangle-free graphs, `None` otherwise.
pub fn bound_hujter_tuza(g: &SimpleGraph) -> Option<f64> {
    let (h, n) = active_stats(g);
    h.is_triangle_free()
        .then(|| round_up(2f64.powf(n as f64 / 2.0)))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Bound for graphs with `Δ <= k δ`:
/// `Σ_{0 <= i <= n/b} C(n, i) · 3^{(k/(k+1)) n/3 + 2n/(3b)}` with `b = sqrt(δ)`.
pub fn bound_blst(g: &SimpleGraph, k: f64) -> Result<f64> {
    let (h, n) = active_stats(g);
    let (delta_min, delta_max) = (h.min_degree(), h.max_degree());
    if k < 1.0 {
        return Err(Error::Hypothesis(format!("k = {k} must be at least 1")));
    }
    if delta_min < 1 {
        return Err(Error::Hypothesis("minimum degree is 0".into()));
    }
    if delta_max as f64 > k * delta_min as f64 {
        return Err(Error::Hypothesis(format!(
            "max degree {delta_max} exceeds {k} * min degree {delta_min}"
        )));
    }
    let nf = n as f64;
    let b = (delta_min as f64).sqrt();
    let top = (nf / b).floor() as usize;
    let sum: f64 = (0..=top.min(n)).map(|i| binomial(n, i)).sum();
    let exponent = (k / (k + 1.0)) * nf / 3.0 + 2.0 * nf / (3.0 * b);
    Ok(round_up(sum * 3f64.powf(exponent)))
}

/// Bound for graphs that become triangle-free after deleting `t`:
/// `2^{n/2 - k/(100 D^2) + 2|T|}` where `n` and `k = e - n/2` are measured on
/// the graph with `t` removed, and `D >= Δ`.
pub fn bound_triangle_sparse(g: &SimpleGraph, t: u64, max_degree: usize) -> Result<f64> {
    let (h, _) = active_stats(g);
    if max_degree < 1 {
        return Err(Error::Hypothesis("D must be positive".into()));
    }
    if h.max_degree() > max_degree {
        return Err(Error::Hypothesis(format!(
            "max degree {} exceeds D = {max_degree}",
            h.max_degree()
        )));
    }
    let t = t & g.active();
    let rest = g.induced(g.active() & !t);
    if !rest.is_triangle_free() {
        return Err(Error::Hypothesis("graph minus T still has a triangle".into()));
    }
    let n = rest.n_vertices() as f64;
    let k = rest.edge_count() as f64 - n / 2.0;
    let d = max_degree as f64;
    let exponent = n / 2.0 - k / (100.0 * d * d) + 2.0 * t.count_ones() as f64;
    Ok(round_up(2f64.powf(exponent)))
}

/// Stability bound `3^{Δ/13} · 3^{n/3 - k/(13Δ)}` with `k = e - n`.
pub fn bound_stability(g: &SimpleGraph) -> Result<f64> {
    let (h, n) = active_stats(g);
    let delta = h.max_degree();
    if delta == 0 {
        return Err(Error::Hypothesis("graph has no edges".into()));
    }
    let k = h.edge_count() as f64 - n as f64;
    let d = delta as f64;
    let exponent = d / 13.0 + n as f64 / 3.0 - k / (13.0 * d);
    Ok(round_up(3f64.powf(exponent)))
}

/// Exact perfect-matching test on the active vertices (at most 24).
pub fn has_perfect_matching(g: &SimpleGraph) -> Result<bool> {
    let active = g.active();
    let n = active.count_ones() as usize;
    if n > MATCHING_CAP {
        return Err(Error::CapExceeded {
            what: "perfect matching search",
            n,
            cap: MATCHING_CAP,
        });
    }
    if n % 2 == 1 {
        return Ok(false);
    }
    let mut dead = HashSet::new();
    Ok(match_rest(g, active, &mut dead))
}

fn match_rest(g: &SimpleGraph, unmatched: u64, dead: &mut HashSet<u64>) -> bool {
    if unmatched == 0 {
        return true;
    }
    if dead.contains(&unmatched) {
        return false;
    }
    if bits(unmatched).any(|v| g.adj[v] & unmatched == 0) {
        dead.insert(unmatched);
        return false;
    }
    let v = unmatched.trailing_zeros() as usize;
    for w in bits(g.adj[v] & unmatched) {
        if match_rest(g, unmatched & !bit(v) & !bit(w), dead) {
            return true;
        }
    }
    dead.insert(unmatched);
    false
}

/// Brute-force isomorphism test for graphs of at most 10 vertices.
pub fn isomorphic_small(a: &SimpleGraph, b: &SimpleGraph) -> Result<bool> {
    let n = a.n_vertices();
    if n > 10 {
        return Err(Error::CapExceeded {
            what: "isomorphism test",
            n,
            cap: 10,
        });
    }
    if n != b.n_vertices() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let mut da: Vec<usize> = (0..n).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..n).map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(false);
    }
    let mut map = vec![usize::MAX; n];
    Ok(extend_iso(a, b, 0, &mut map, 0))
}

fn extend_iso(a: &SimpleGraph, b: &SimpleGraph, v: usize, map: &mut [usize], used: u64) -> bool {
    let n = a.n_vertices();
    if v == n {
        return true;
    }
    for w in 0..n {
        if used & bit(w) != 0 || a.degree(v) != b.degree(w) {
            continue;
        }
        let consistent = (0..v).all(|u| a.has_edge(u, v) == b.has_edge(map[u], w));
        if consistent {
            map[v] = w;
            if extend_iso(a, b, v + 1, map, used | bit(w)) {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub mode: ScanMode,
    pub seed: u64,
    pub budget: Option<u64>,
    pub graphs_checked: u64,
    pub max_mis: u64,
    /// `2^{n/2}`.
    pub bound: u64,
    pub attainer_count: u64,
    /// Edge lists of the first graphs (in scan order) reaching `bound`.
    pub attainers: Vec<Vec<(usize, usize)>>,
    pub counterexamples: Vec<Vec<(usize, usize)>>,
    /// Set when the budget stopped an exhaustive scan early.
    pub partial: bool,
}

#[derive(Debug, Clone, Default)]
struct ScanTally {
    checked: u64,
    max_mis: u64,
    attainer_count: u64,
    attainers: Vec<Vec<(usize, usize)>>,
    counterexamples: Vec<Vec<(usize, usize)>>,
}

impl ScanTally {
    fn record(&mut self, g: &SimpleGraph, mis: u64, bound: u64) {
        self.checked += 1;
        self.max_mis = self.max_mis.max(mis);
        if mis == bound {
            self.attainer_count += 1;
            if self.attainers.len() < ATTAINER_LIMIT {
                self.attainers.push(g.edges());
            }
        } else if mis > bound {
            self.counterexamples.push(g.edges());
        }
    }

    /// Order-preserving merge; `self` covers the earlier part of the scan.
    fn merge(mut self, other: ScanTally) -> ScanTally {
        self.checked += other.checked;
        self.max_mis = self.max_mis.max(other.max_mis);
        self.attainer_count += other.attainer_count;
        let room = ATTAINER_LIMIT - self.attainers.len();
        self.attainers
            .extend(other.attainers.into_iter().take(room));
        self.counterexamples.extend(other.counterexamples);
        self
    }
}

/// Pairs outside the fixed matching `{01, 23, ...}`, lexicographic.
fn free_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !(u % 2 == 0 && v == u + 1))
        .collect()
}

fn graph_from_pairs(n: usize, pairs: &[(usize, usize)], mask: u64) -> SimpleGraph {
    let mut g = matching(n / 2).expect("n <= 20");
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            g.adj[u] |= bit(v);
            g.adj[v] |= bit(u);
        }
    }
    g
}

/// Searches graphs containing a perfect matching for one with more than
/// `2^{n/2}` maximal independent sets.
///
/// Exhaustive mode visits every supergraph of the matching `{01, 23, ...}`;
/// any graph with a perfect matching is isomorphic to one of these. Random
/// mode draws `budget` such supergraphs, each with its own edge density;
/// sample `i` is generated from its own stream of `seed`, so results do not
/// depend on the worker count.
pub fn conjecture_scan(n: usize, mode: ScanMode, budget: Option<u64>, seed: u64) -> Result<ScanReport> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("n must be even and positive, got {n}")));
    }
    let cap = match mode {
        ScanMode::Exhaustive => EXHAUSTIVE_SCAN_CAP,
        ScanMode::Random => RANDOM_SCAN_CAP,
    };
    if n > cap {
        return Err(Error::CapExceeded {
            what: "perfect-matching scan",
            n,
            cap,
        });
    }
    let bound = 1u64 << (n / 2);
    let pairs = free_pairs(n);
    let (total, partial) = match mode {
        ScanMode::Exhaustive => {
            let all = 1u64 << pairs.len();
            match budget {
                Some(b) if b < all => (b, true),
                _ => (all, false),
            }
        }
        ScanMode::Random => (
            budget.ok_or_else(|| Error::InvalidArgument("random mode needs a budget".into()))?,
            false,
        ),
    };
    const CHUNK: u64 = 1 << 12;
    let chunks = total.div_ceil(CHUNK);
    let tallies: Vec<ScanTally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = ScanTally::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let g = match mode {
                    ScanMode::Exhaustive => graph_from_pairs(n, &pairs, i),
                    ScanMode::Random => {
                        let mut rng = stream_rng(seed, i);
                        let density: f64 = rng.gen();
                        let mut mask = 0u64;
                        for j in 0..pairs.len() {
                            if rng.gen_bool(density) {
                                mask |= bit(j);
                            }
                        }
                        graph_from_pairs(n, &pairs, mask)
                    }
                };
                tally.record(&g, mis_count(&g), bound);
            }
            tally
        })
        .collect();
    let tally = tallies
        .into_iter()
        .fold(ScanTally::default(), ScanTally::merge);
    Ok(ScanReport {
        n,
        mode,
        seed,
        budget,
        graphs_checked: tally.checked,
        max_mis: tally.max_mis,
        bound,
        attainer_count: tally.attainer_count,
        attainers: tally.attainers,
        counterexamples: tally.counterexamples,
        partial,
    })
}

/// Verdict on one user-supplied graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphCheck {
    pub n: usize,
    pub edges: usize,
    pub has_perfect_matching: bool,
    pub mis: u64,
    pub bound: f64,
    pub counterexample: bool,
}

pub fn check_graph(g: &SimpleGraph) -> Result<GraphCheck> {
    let h = g.without_forbidden();
    let pm = has_perfect_matching(&h)?;
    let mis = enumerate_mis(&h).count;
    let bound = 2f64.powf(h.n_vertices() as f64 / 2.0);
    Ok(GraphCheck {
        n: h.n_vertices(),
        edges: h.edge_count(),
        has_perfect_matching: pm,
        mis,
        bound,
        counterexample: pm && mis as f64 > bound,
    })
}
