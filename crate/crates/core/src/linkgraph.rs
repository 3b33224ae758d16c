//! The distinct link graph `L*_S[B]`.
//!
//! Vertices are the elements of `B`. `xy` is an edge when `{x, y, s}` is a
//! distinct Schur triple for some `s` in `S`, and `x` carries a loop when
//! `{x, s, s'}` is one for distinct `s, s'` in `S`. An edge is type 1 when
//! `x - y` lies in `(S ∪ -S) \ {0}` and type 2 otherwise.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::group::{AbelianGroup, Element};
use crate::mis::SimpleGraph;
use crate::schur::is_distinct_triple_set;
use crate::subset::GroupSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypedEdge {
    pub u: Element,
    pub v: Element,
    /// 1 when `u - v` is a nonzero element of `S ∪ -S`, else 2.
    #[serde(rename = "type")]
    pub edge_type: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    pub source: GroupSubset,
    /// Sorted vertex list (the elements of `B`).
    pub vertices: Vec<Element>,
    /// Edges with `u < v`, sorted.
    pub edges: Vec<TypedEdge>,
    pub loops: Vec<Element>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

pub fn build_link_graph(g: &AbelianGroup, s: &GroupSubset, b: &GroupSubset) -> LinkGraph {
    let vertices: Vec<Element> = b.iter().collect();
    let sym = s.union(&s.negated(g));
    let mut edges = Vec::new();
    let mut loops = Vec::new();
    for &x in &vertices {
        let mut looped = false;
        for t in s.iter() {
            for y in [g.sub(t, x), g.add(x, t), g.sub(x, t)] {
                if y > x && b.contains(y) && is_distinct_triple_set(g, x, y, t) {
                    let diff = g.sub(x, y);
                    let edge_type = if diff != Element::ZERO && sym.contains(diff) { 1 } else { 2 };
                    edges.push(TypedEdge { u: x, v: y, edge_type });
                }
            }
            if !looped {
                looped = [g.sub(x, t), g.add(x, t), g.sub(t, x)]
                    .into_iter()
                    .any(|t2| t2 != t && s.contains(t2) && is_distinct_triple_set(g, x, t, t2));
            }
        }
        if looped {
            loops.push(x);
        }
    }
    edges.sort_unstable();
    edges.dedup_by_key(|e| (e.u, e.v));
    let mut graph = LinkGraph {
        source: s.clone(),
        vertices,
        edges,
        loops,
        adjacency: Vec::new(),
    };
    graph.rebuild_adjacency();
    graph
}

impl LinkGraph {
    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let (i, j) = (self.position(e.u).unwrap(), self.position(e.v).unwrap());
            adj[i].push(j);
            adj[j].push(i);
        }
        self.adjacency = adj;
    }

    /// Re-derives the adjacency lists after deserialization.
    pub fn restore(mut self) -> Self {
        self.rebuild_adjacency();
        self
    }

    pub fn position(&self, x: Element) -> Option<usize> {
        self.vertices.binary_search(&x).ok()
    }

    pub fn has_loop(&self, x: Element) -> bool {
        self.loops.binary_search(&x).is_ok()
    }

    pub fn neighbors(&self, x: Element) -> Vec<Element> {
        self.position(x)
            .map(|i| self.adjacency[i].iter().map(|&j| self.vertices[j]).collect())
            .unwrap_or_default()
    }

    pub fn edge_type(&self, x: Element, y: Element) -> Option<u8> {
        let key = (x.min(y), x.max(y));
        self.edges
            .binary_search_by_key(&key, |e| (e.u, e.v))
            .ok()
            .map(|i| self.edges[i].edge_type)
    }

    /// Vertex positions grouped into connected components, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                for &w in &self.adjacency[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The graph as a [`SimpleGraph`] with vertex `i` standing for
    /// `vertices[i]`; looped vertices are marked forbidden.
    pub fn to_simple_graph(&self) -> Result<SimpleGraph> {
        let mut sg = SimpleGraph::new(self.vertices.len())?;
        for e in &self.edges {
            sg.add_edge(self.position(e.u).unwrap(), self.position(e.v).unwrap())?;
        }
        for &x in &self.loops {
            sg.forbid(self.position(x).unwrap())?;
        }
        Ok(sg)
    }
}

/// True when `b` is the non-identity coset of an index-2 subgroup that
/// contains `s`.
pub fn is_coset_setting(g: &AbelianGroup, s: &GroupSubset, b: &GroupSubset) -> bool {
    let n = g.order();
    if n % 2 == 1 || b.len() * 2 != n {
        return false;
    }
    let h = b.complement();
    s.is_subset(&h) && g.is_subgroup(&h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDegrees {
    pub vertex: Element,
    pub d1: usize,
    pub d2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeChecks {
    /// `|(S ∪ -S) \ {0}|`, which every `d1` must equal.
    pub expected_d1: usize,
    pub d1_exact: bool,
    pub d2_at_most_s: bool,
    pub no_loops: bool,
    /// `Δ <= 2δ + 1` when `0 ∈ S = -S`, otherwise `Δ <= 2δ`.
    pub spread: bool,
}

impl DegreeChecks {
    pub fn all_hold(&self) -> bool {
        self.d1_exact && self.d2_at_most_s && self.no_loops && self.spread
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub vertices: Vec<VertexDegrees>,
    pub max_degree: usize,
    pub min_degree: usize,
    /// Present only when `B` is the odd coset of an index-2 subgroup
    /// containing `S`.
    pub checks: Option<DegreeChecks>,
}

fn nonzero_symmetric_size(g: &AbelianGroup, s: &GroupSubset) -> usize {
    let mut sym = s.union(&s.negated(g));
    sym.remove(Element::ZERO);
    sym.len()
}

pub fn degree_profile(g: &AbelianGroup, l: &LinkGraph) -> DegreeProfile {
    let mut per = vec![(0usize, 0usize); l.vertices.len()];
    for e in &l.edges {
        for x in [e.u, e.v] {
            let d = &mut per[l.position(x).unwrap()];
            if e.edge_type == 1 {
                d.0 += 1;
            } else {
                d.1 += 1;
            }
        }
    }
    let totals = per.iter().map(|(a, b)| a + b);
    let max_degree = totals.clone().max().unwrap_or(0);
    let min_degree = totals.min().unwrap_or(0);
    let vertices: Vec<VertexDegrees> = l
        .vertices
        .iter()
        .zip(&per)
        .map(|(&vertex, &(d1, d2))| VertexDegrees { vertex, d1, d2 })
        .collect();

    let b = GroupSubset::from_elements(g.order(), l.vertices.iter().copied());
    let checks = if is_coset_setting(g, &l.source, &b) {
        let s = &l.source;
        let expected_d1 = nonzero_symmetric_size(g, s);
        let symmetric_with_zero = s.contains(Element::ZERO) && *s == s.negated(g);
        let slack = usize::from(symmetric_with_zero);
        Some(DegreeChecks {
            expected_d1,
            d1_exact: vertices.iter().all(|v| v.d1 == expected_d1),
            d2_at_most_s: vertices.iter().all(|v| v.d2 <= s.len()),
            no_loops: l.loops.is_empty(),
            spread: max_degree <= 2 * min_degree + slack,
        })
    } else {
        log::warn!("link graph is outside the index-2 coset setting; degree checks skipped");
        None
    };
    DegreeProfile {
        vertices,
        max_degree,
        min_degree,
        checks,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    pub e1: usize,
    pub e2: usize,
    pub total: usize,
    /// Twice the lower bound
    /// `(|(S∪-S)\{0}| + |S|)|A|/2 - |S|(|S∪-S| + 1)2^r`, kept integral.
    pub twice_lower_bound: i64,
    pub holds: bool,
}

pub fn edge_counts(g: &AbelianGroup, l: &LinkGraph) -> EdgeCounts {
    let e1 = l.edges.iter().filter(|e| e.edge_type == 1).count();
    let total = l.edges.len();
    let s = &l.source;
    let sym = s.union(&s.negated(g)).len() as i64;
    let d1 = nonzero_symmetric_size(g, s) as i64;
    let a = l.vertices.len() as i64;
    let s_len = s.len() as i64;
    let twice_lower_bound = (d1 + s_len) * a - 2 * s_len * (sym + 1) * (1i64 << g.r());
    EdgeCounts {
        e1,
        e2: total - e1,
        total,
        twice_lower_bound,
        holds: 2 * total as i64 >= twice_lower_bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    K1,
    K2,
    K3,
    K4,
    C4,
    /// The triangular prism `C3 □ K2`.
    Prism,
    Other(usize),
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::K1 => write!(f, "K1"),
            ComponentKind::K2 => write!(f, "K2"),
            ComponentKind::K3 => write!(f, "K3"),
            ComponentKind::K4 => write!(f, "K4"),
            ComponentKind::C4 => write!(f, "C4"),
            ComponentKind::Prism => write!(f, "C3xK2"),
            ComponentKind::Other(n) => write!(f, "other({n})"),
        }
    }
}

impl Serialize for ComponentKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for ComponentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "K1" => ComponentKind::K1,
            "K2" => ComponentKind::K2,
            "K3" => ComponentKind::K3,
            "K4" => ComponentKind::K4,
            "C4" => ComponentKind::C4,
            "C3xK2" => ComponentKind::Prism,
            _ => s
                .strip_prefix("other(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.parse().ok())
                .map(ComponentKind::Other)
                .ok_or_else(|| format!("unknown component kind {s:?}"))?,
        })
    }
}

impl<'de> Deserialize<'de> for ComponentKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Identifies a connected graph from its order, degree sequence and
/// triangle count. These separate the catalog members from each other and
/// from everything else of the same size.
pub fn classify_component(size: usize, degrees: &[usize], triangles: usize) -> ComponentKind {
    let regular = |d: usize| degrees.iter().all(|&x| x == d);
    match (size, triangles) {
        (1, 0) => ComponentKind::K1,
        (2, 0) => ComponentKind::K2,
        (3, 1) => ComponentKind::K3,
        (4, 4) if regular(3) => ComponentKind::K4,
        (4, 0) if regular(2) => ComponentKind::C4,
        (6, 2) if regular(3) => ComponentKind::Prism,
        _ => ComponentKind::Other(size),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComponentCensus(pub BTreeMap<ComponentKind, usize>);

impl ComponentCensus {
    pub fn count(&self, kind: ComponentKind) -> usize {
        self.0.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

pub fn component_census(l: &LinkGraph) -> ComponentCensus {
    let mut census = ComponentCensus::default();
    for comp in l.components() {
        let degrees: Vec<usize> = comp.iter().map(|&v| l.adjacency[v].len()).collect();
        let mut triangles = 0;
        for &a in &comp {
            for &b in l.adjacency[a].iter().filter(|&&b| b > a) {
                triangles += l.adjacency[b]
                    .iter()
                    .filter(|&&c| c > b && l.adjacency[a].contains(&c))
                    .count();
            }
        }
        let kind = classify_component(comp.len(), &degrees, triangles);
        *census.0.entry(kind).or_default() += 1;
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mis::enumerate_mis;

    fn set(g: &AbelianGroup, idx: &[usize]) -> GroupSubset {
        GroupSubset::from_indices(g.order(), idx).unwrap()
    }

    fn el(g: &AbelianGroup, c: &[u64]) -> Element {
        g.from_coords(c).unwrap()
    }

    #[test]
    fn z9_prism_component() {
        let g = AbelianGroup::new(&[9]).unwrap();
        let s = set(&g, &[3]);
        let b = set(&g, &[1, 2, 4, 5, 7, 8]);
        let l = build_link_graph(&g, &s, &b);
        assert_eq!(l.edges.len(), 9);
        assert!(l.loops.is_empty());
        for (x, y) in [(1, 4), (4, 7), (1, 7), (2, 5), (5, 8), (2, 8)] {
            assert_eq!(l.edge_type(Element(x), Element(y)), Some(1));
        }
        for (x, y) in [(1, 2), (4, 8), (5, 7)] {
            assert_eq!(l.edge_type(Element(x), Element(y)), Some(2));
        }
        let census = component_census(&l);
        assert_eq!(census.count(ComponentKind::Prism), 1);
        assert_eq!(census.total(), 1);
        assert_eq!(enumerate_mis(&l.to_simple_graph().unwrap()).count, 6);
    }

    #[test]
    fn z3_squared_loop_and_typed_edges() {
        let g = AbelianGroup::new(&[3, 3]).unwrap();
        let (s1, s2) = (el(&g, &[1, 0]), el(&g, &[0, 1]));
        let s = GroupSubset::from_elements(9, [s1, s2]);
        let (a, b, c) = (el(&g, &[1, 1]), el(&g, &[0, 2]), el(&g, &[2, 2]));
        let l = build_link_graph(&g, &s, &GroupSubset::from_elements(9, [a, b, c]));
        assert_eq!(l.loops, vec![a]);
        assert_eq!(l.edge_type(a, b), Some(2));
        assert_eq!(l.edge_type(b, c), Some(1));
    }

    #[test]
    fn empty_source_gives_empty_graph() {
        let g = AbelianGroup::new(&[7]).unwrap();
        let l = build_link_graph(&g, &GroupSubset::empty(7), &GroupSubset::full(7));
        assert!(l.edges.is_empty() && l.loops.is_empty());
        assert_eq!(component_census(&l).count(ComponentKind::K1), 7);
    }

    #[test]
    fn z6_zero_source() {
        let g = AbelianGroup::new(&[6]).unwrap();
        let l = build_link_graph(&g, &set(&g, &[0]), &set(&g, &[1, 3, 5]));
        assert_eq!(l.edges, vec![TypedEdge { u: Element(1), v: Element(5), edge_type: 2 }]);
        let p = degree_profile(&g, &l);
        assert!(p.vertices.iter().all(|v| v.d1 == 0));
        assert!(p.checks.unwrap().all_hold());
        let e = edge_counts(&g, &l);
        // 2e = 2 >= (0 + 1)·3 - 2·1·2·2 = -5.
        assert_eq!((e.total, e.twice_lower_bound, e.holds), (1, -5, true));
        let c = component_census(&l);
        assert_eq!((c.count(ComponentKind::K2), c.count(ComponentKind::K1)), (1, 1));
    }

    #[test]
    fn z8_order_two_sources() {
        let g = AbelianGroup::new(&[8]).unwrap();
        let a = set(&g, &[1, 3, 5, 7]);
        let l = build_link_graph(&g, &set(&g, &[2]), &a);
        let p = degree_profile(&g, &l);
        assert!(p.vertices.iter().all(|v| v.d1 == 2));
        let checks = p.checks.unwrap();
        assert_eq!(checks.expected_d1, 2);
        assert!(checks.all_hold());
        let e = edge_counts(&g, &l);
        assert_eq!(e.twice_lower_bound, 0);
        assert!(e.holds);

        let l = build_link_graph(&g, &set(&g, &[0, 4]), &a);
        let c = component_census(&l);
        assert_eq!(c.count(ComponentKind::K4), 1);
        assert_eq!(c.total(), 1);
    }

    #[test]
    fn z4_zero_and_involution() {
        let g = AbelianGroup::new(&[4]).unwrap();
        let l = build_link_graph(&g, &set(&g, &[0, 2]), &set(&g, &[1, 3]));
        let c = component_census(&l);
        assert_eq!(c.count(ComponentKind::K2), 1);
        let p = degree_profile(&g, &l);
        assert!(p.max_degree <= 2 * p.min_degree + 1);
        assert!(p.checks.unwrap().all_hold());
    }

    #[test]
    fn checks_skipped_outside_setting() {
        let g = AbelianGroup::new(&[8]).unwrap();
        let l = build_link_graph(&g, &set(&g, &[1]), &set(&g, &[1, 3, 5, 7]));
        assert!(degree_profile(&g, &l).checks.is_none());
    }

    #[test]
    fn serializes_typed_edges() {
        let g = AbelianGroup::new(&[6]).unwrap();
        let l = build_link_graph(&g, &set(&g, &[0]), &set(&g, &[1, 3, 5]));
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(
            json,
            r#"{"source":[0],"vertices":[1,3,5],"edges":[{"u":1,"v":5,"type":2}],"loops":[]}"#
        );
        let back: LinkGraph = serde_json::from_str::<LinkGraph>(&json).unwrap().restore();
        assert_eq!(back.neighbors(Element(1)), vec![Element(5)]);
        let c = serde_json::to_string(&component_census(&l)).unwrap();
        assert_eq!(c, r#"{"K1":1,"K2":1}"#);
        let back: ComponentCensus = serde_json::from_str(r#"{"C3xK2":2,"other(7)":1}"#).unwrap();
        assert_eq!(back.count(ComponentKind::Prism), 2);
        assert_eq!(back.count(ComponentKind::Other(7)), 1);
    }

    #[test]
    fn classifier_catalog() {
        assert_eq!(classify_component(4, &[3; 4], 4), ComponentKind::K4);
        assert_eq!(classify_component(4, &[2; 4], 0), ComponentKind::C4);
        assert_eq!(classify_component(4, &[1, 2, 2, 1], 0), ComponentKind::Other(4));
        assert_eq!(classify_component(6, &[3; 6], 0), ComponentKind::Other(6));
        assert_eq!(classify_component(3, &[1, 2, 1], 0), ComponentKind::Other(3));
    }
}
