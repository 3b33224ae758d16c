//! Schur triples, (distinct) sum-freeness, maximality, and exact
//! maximum-size search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, Element};
use crate::subset::GroupSubset;

/// Which triples a set must avoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Every `x + y = z`.
    Plain,
    /// Only `x + y = z` with `x, y, z` pairwise distinct.
    Distinct,
}

impl Variant {
    fn name(self) -> &'static str {
        match self {
            Variant::Plain => "sum-free",
            Variant::Distinct => "distinct sum-free",
        }
    }
}

pub fn is_schur_triple(g: &AbelianGroup, x: Element, y: Element, z: Element) -> bool {
    g.add(x, y) == z
}

pub fn is_distinct_schur_triple(g: &AbelianGroup, x: Element, y: Element, z: Element) -> bool {
    x != y && y != z && x != z && is_schur_triple(g, x, y, z)
}

/// True when `{a, b, c}` is a distinct Schur triple in some order.
pub fn is_distinct_triple_set(g: &AbelianGroup, a: Element, b: Element, c: Element) -> bool {
    a != b
        && b != c
        && a != c
        && (g.add(a, b) == c || g.add(a, c) == b || g.add(b, c) == a)
}

pub fn is_free(g: &AbelianGroup, s: &GroupSubset, variant: Variant) -> bool {
    find_triple(g, s, variant).is_none()
}

pub fn is_sumfree(g: &AbelianGroup, s: &GroupSubset) -> bool {
    is_free(g, s, Variant::Plain)
}

pub fn is_distinct_sumfree(g: &AbelianGroup, s: &GroupSubset) -> bool {
    is_free(g, s, Variant::Distinct)
}

/// Some `(x, y, x + y)` inside `s`, if one exists.
pub fn find_triple(
    g: &AbelianGroup,
    s: &GroupSubset,
    variant: Variant,
) -> Option<(Element, Element, Element)> {
    for x in s.iter() {
        for y in s.iter().filter(|&y| y >= x) {
            let z = g.add(x, y);
            if !s.contains(z) {
                continue;
            }
            match variant {
                Variant::Plain => return Some((x, y, z)),
                Variant::Distinct if x != y && z != x && z != y => return Some((x, y, z)),
                Variant::Distinct => {}
            }
        }
    }
    None
}

/// Whether `s + {x}` still avoids the triples of `variant`, given that `s` does.
pub fn can_extend(g: &AbelianGroup, s: &GroupSubset, x: Element, variant: Variant) -> bool {
    let has = |e: Element| e == x || s.contains(e);
    let members = s.iter().chain(std::iter::once(x));
    for y in members {
        // x + y = z
        let z = g.add(x, y);
        if has(z) {
            let ok = match variant {
                Variant::Plain => false,
                Variant::Distinct => y == x || z == x || z == y,
            };
            if !ok {
                return false;
            }
        }
        // y + z = x
        let z = g.sub(x, y);
        if has(z) {
            let ok = match variant {
                Variant::Plain => false,
                Variant::Distinct => y == z || y == x || z == x,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// True iff `s` is free and no outside element can be added.
pub fn is_maximal(g: &AbelianGroup, s: &GroupSubset, variant: Variant) -> Result<bool> {
    if !is_free(g, s, variant) {
        return Err(Error::NotFree(variant.name()));
    }
    Ok(g
        .elements()
        .filter(|&x| !s.contains(x))
        .all(|x| !can_extend(g, s, x, variant)))
}

pub fn is_maximal_sumfree(g: &AbelianGroup, s: &GroupSubset) -> Result<bool> {
    is_maximal(g, s, Variant::Plain)
}

pub fn is_maximal_distinct_sumfree(g: &AbelianGroup, s: &GroupSubset) -> Result<bool> {
    is_maximal(g, s, Variant::Distinct)
}

/// A triple of `variant` inside `a ∪ b` that uses at least one element of
/// each side, returned as `(x, y, x + y)`.
pub fn find_joint_triple(
    g: &AbelianGroup,
    a: &GroupSubset,
    b: &GroupSubset,
    variant: Variant,
) -> Option<(Element, Element, Element)> {
    let u = a.union(b);
    let only_a = a.difference(b);
    let only_b = b.difference(a);
    let ok = |x: Element, y: Element, z: Element| {
        let distinct = x != y && y != z && x != z;
        (variant == Variant::Plain || distinct)
            && [x, y, z].iter().any(|&e| only_b.contains(e))
    };
    // Every qualifying triple has a member of `a \ b`, either as a summand
    // or as the sum.
    for x in only_a.iter() {
        for y in u.iter() {
            let z = g.add(x, y);
            if u.contains(z) && ok(x, y, z) {
                return Some((x, y, z));
            }
            let w = g.sub(x, y);
            if u.contains(w) && ok(y, w, x) {
                return Some((y, w, x));
            }
        }
    }
    None
}

/// Largest cardinality for exact search over a candidate set.
pub const MAX_SEARCH_CANDIDATES: usize = 64;
/// Cap on the group order for [`mu_star_bruteforce`].
pub const MU_STAR_CAP: usize = 24;

/// Triples of one variant restricted to a candidate list, as bitmasks over
/// candidate positions.
struct TripleHypergraph {
    size: usize,
    /// For each vertex, the other members of every triple through it.
    rests: Vec<Vec<u64>>,
    /// Vertices that form a triple on their own (`0 + 0 = 0`).
    self_blocked: u64,
    degree: Vec<usize>,
}

impl TripleHypergraph {
    fn new(g: &AbelianGroup, candidates: &[Element], variant: Variant) -> Self {
        let size = candidates.len();
        debug_assert!(size <= MAX_SEARCH_CANDIDATES);
        let mut pos = vec![usize::MAX; g.order()];
        for (i, &c) in candidates.iter().enumerate() {
            pos[c.0] = i;
        }
        let mut edges = std::collections::BTreeSet::new();
        for (i, &x) in candidates.iter().enumerate() {
            for &y in &candidates[i..] {
                let z = g.add(x, y);
                let k = pos[z.0];
                if k == usize::MAX {
                    continue;
                }
                if variant == Variant::Distinct && (x == y || z == x || z == y) {
                    continue;
                }
                edges.insert((1u64 << i) | (1u64 << pos[y.0]) | (1u64 << k));
            }
        }
        let mut rests = vec![Vec::new(); size];
        let mut self_blocked = 0u64;
        let mut degree = vec![0; size];
        for &e in &edges {
            let mut m = e;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                let rest = e & !(1u64 << v);
                degree[v] += 1;
                if rest == 0 {
                    self_blocked |= 1u64 << v;
                } else {
                    rests[v].push(rest);
                }
            }
        }
        TripleHypergraph {
            size,
            rests,
            self_blocked,
            degree,
        }
    }

    fn all(&self) -> u64 {
        if self.size == 64 {
            u64::MAX
        } else {
            (1u64 << self.size) - 1
        }
    }

    /// Largest vertex set containing no hyperedge.
    fn max_independent(&self) -> u64 {
        // Most-constrained vertices are branched on first.
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree[v]), v));
        let mut best = (0u32, 0u64);
        self.branch(&order, 0, self.all() & !self.self_blocked, &mut best);
        best.1
    }

    fn branch(&self, order: &[usize], chosen: u64, avail: u64, best: &mut (u32, u64)) {
        if chosen.count_ones() + avail.count_ones() <= best.0 {
            return;
        }
        let Some(&v) = order.iter().find(|&&v| avail >> v & 1 == 1) else {
            *best = (chosen.count_ones(), chosen);
            return;
        };
        let bit = 1u64 << v;
        let with = chosen | bit;
        let mut next = avail & !bit;
        for &rest in &self.rests[v] {
            let need = rest & !with;
            if need.count_ones() == 1 {
                next &= !need;
            }
        }
        self.branch(order, with, next, best);
        self.branch(order, chosen, avail & !bit, best);
    }
}

/// A largest subset of `candidates` avoiding the triples of `variant`.
pub fn max_free_subset(
    g: &AbelianGroup,
    candidates: &GroupSubset,
    variant: Variant,
) -> Result<GroupSubset> {
    if candidates.len() > MAX_SEARCH_CANDIDATES {
        return Err(Error::CapExceeded {
            what: "exact maximum free subset search",
            n: candidates.len(),
            cap: MAX_SEARCH_CANDIDATES,
        });
    }
    let list: Vec<Element> = candidates.iter().collect();
    let best = TripleHypergraph::new(g, &list, variant).max_independent();
    Ok(GroupSubset::from_elements(
        g.order(),
        list.iter()
            .enumerate()
            .filter(|(i, _)| best >> i & 1 == 1)
            .map(|(_, &e)| e),
    ))
}

/// Maximum sum-free size by exhaustive search, independent of the
/// classification formula.
pub fn max_sumfree_bruteforce(g: &AbelianGroup) -> Result<usize> {
    Ok(max_free_subset(g, &GroupSubset::full(g.order()), Variant::Plain)?.len())
}

/// Maximum size of a distinct sum-free subset (exact, `n <= 24`).
pub fn mu_star_bruteforce(g: &AbelianGroup) -> Result<usize> {
    if g.order() > MU_STAR_CAP {
        return Err(Error::CapExceeded {
            what: "mu* search",
            n: g.order(),
            cap: MU_STAR_CAP,
        });
    }
    Ok(max_free_subset(g, &GroupSubset::full(g.order()), Variant::Distinct)?.len())
}
