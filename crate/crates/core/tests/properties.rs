use proptest::prelude::*;
use proptest::sample::select;

use sumfree::census::{census_variants, count_extensions};
use sumfree::construct::{construct, verify_family, ConstructionFamily, FamilyKind};
use sumfree::group::abelian_groups_of_order;
use sumfree::linkgraph::{build_link_graph, edge_counts, LinkGraph};
use sumfree::mis::{
    bound_blst, bound_hujter_tuza, bound_moon_moser, bound_stability, bound_triangle_sparse,
    enumerate_mis, SimpleGraph,
};
use sumfree::schur::{is_distinct_sumfree, is_maximal_sumfree, is_sumfree, max_free_subset};
use sumfree::{AbelianGroup, Element, GroupSubset, Variant};

fn specs(max: u64, even_only: bool) -> Vec<Vec<u64>> {
    (2..=max)
        .filter(|n| !even_only || n % 2 == 0)
        .flat_map(abelian_groups_of_order)
        .collect()
}

fn group(max: u64) -> impl Strategy<Value = AbelianGroup> {
    select(specs(max, false)).prop_map(|o| AbelianGroup::new(&o).unwrap())
}

fn even_group(max: u64) -> impl Strategy<Value = AbelianGroup> {
    select(specs(max, true)).prop_map(|o| AbelianGroup::new(&o).unwrap())
}

/// A group together with a subset drawn by a bit mask.
fn group_and_subset(max: u64) -> impl Strategy<Value = (AbelianGroup, GroupSubset)> {
    group(max).prop_flat_map(|g| {
        let n = g.order();
        (Just(g), any::<u64>()).prop_map(move |(g, m)| {
            let mask = if n == 64 { m } else { m & ((1 << n) - 1) };
            (g, GroupSubset::from_mask(n, mask))
        })
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (0..=max_n)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2)))
        .prop_map(|(n, bits)| {
            let mut g = SimpleGraph::new(n).unwrap();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
}

fn naive_mis(g: &SimpleGraph) -> u64 {
    let n = g.n_vertices();
    (0u64..1 << n)
        .filter(|&s| {
            (0..n).all(|v| {
                let inside = s >> v & 1 == 1;
                let hit = g.neighbors(v) & s != 0;
                if inside { !hit } else { hit }
            })
        })
        .count() as u64
}

/// Direct reading of the definition: some arrangement of the three pairwise
/// distinct elements adds up.
fn distinct_triple(g: &AbelianGroup, a: Element, b: Element, c: Element) -> bool {
    let perms = [(a, b, c), (a, c, b), (b, c, a)];
    a != b && b != c && a != c && perms.iter().any(|&(x, y, z)| g.add(x, y) == z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn group_axioms(g in group(48), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let n = g.order();
        let (a, b, c) = (Element(a % n), Element(b % n), Element(c % n));
        prop_assert_eq!(g.add(a, b), g.add(b, a));
        prop_assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)));
        prop_assert_eq!(g.add(a, Element::ZERO), a);
        prop_assert_eq!(g.add(a, g.neg(a)), Element::ZERO);
        prop_assert_eq!(g.sub(a, b), g.add(a, g.neg(b)));
        prop_assert_eq!(g.from_coords(&g.coords(a)).unwrap(), a);
        prop_assert_eq!(g.times(g.element_order(a), a), Element::ZERO);
    }

    #[test]
    fn link_graph_matches_definition((g, s) in group_and_subset(24), mask in any::<u64>()) {
        let n = g.order();
        let b = GroupSubset::from_mask(n, mask & ((1u64 << n) - 1));
        let l = build_link_graph(&g, &s, &b);
        let verts: Vec<Element> = b.iter().collect();
        for (i, &x) in verts.iter().enumerate() {
            for &y in &verts[i + 1..] {
                let adjacent = s.iter().any(|t| distinct_triple(&g, x, y, t));
                prop_assert_eq!(l.edge_type(x, y).is_some(), adjacent, "{:?} {:?}", x, y);
                if adjacent {
                    let d = g.sub(x, y);
                    let type1 = d != Element::ZERO && (s.contains(d) || s.contains(g.neg(d)));
                    prop_assert_eq!(l.edge_type(x, y), Some(if type1 { 1 } else { 2 }));
                }
            }
            let looped = s.iter().any(|t| s.iter().any(|u| distinct_triple(&g, x, t, u)));
            prop_assert_eq!(l.has_loop(x), looped);
        }
    }

    #[test]
    fn edge_bound_in_coset_setting(g in even_group(32), pick in any::<usize>(), mask in any::<u64>()) {
        let subs = g.index2_subgroups().unwrap();
        let h = &subs[pick % subs.len()];
        let inside: Vec<Element> = h.members.iter().collect();
        let s = GroupSubset::from_elements(
            g.order(),
            inside.iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, &x)| x),
        );
        prop_assume!(!s.is_empty());
        let l = build_link_graph(&g, &s, &h.members.complement());
        prop_assert!(edge_counts(&g, &l).holds);
    }

    #[test]
    fn mis_engine_and_bounds(g in graph(12)) {
        let count = enumerate_mis(&g).count;
        prop_assert_eq!(count, naive_mis(&g));
        let c = count as f64;
        prop_assert!(bound_moon_moser(&g) >= c);
        if let Some(b) = bound_hujter_tuza(&g) {
            prop_assert!(b >= c);
        }
        if let Ok(b) = bound_stability(&g) {
            prop_assert!(b >= c);
        }
        if g.min_degree() >= 1 {
            let k = (g.max_degree() as f64 / g.min_degree() as f64).max(1.0);
            prop_assert!(bound_blst(&g, k).unwrap() >= c);
        }
        // Every vertex on a triangle goes into T.
        let n = g.n_vertices();
        let mut t = 0u64;
        for u in 0..n {
            for v in u + 1..n {
                if g.has_edge(u, v) {
                    let common = g.neighbors(u) & g.neighbors(v);
                    if common != 0 {
                        t |= 1 << u | 1 << v | common;
                    }
                }
            }
        }
        if let Ok(b) = bound_triangle_sparse(&g, t, g.max_degree().max(1)) {
            prop_assert!(b >= c);
        }
    }

    #[test]
    fn max_free_subset_matches_filter((g, s) in group_and_subset(16)) {
        let n = g.order();
        let list: Vec<Element> = s.iter().collect();
        let best = (0u64..1 << list.len())
            .map(|m| GroupSubset::from_elements(n, list.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &x)| x)))
            .filter(|t| is_sumfree(&g, t))
            .map(|t| t.len())
            .max()
            .unwrap();
        let found = max_free_subset(&g, &s, Variant::Plain).unwrap();
        prop_assert!(found.is_subset(&s) && is_sumfree(&g, &found));
        prop_assert_eq!(found.len(), best);
    }

    #[test]
    fn extensions_never_exceed_mis(g in even_group(16), pick in any::<usize>(), mask in any::<u64>()) {
        let subs = g.index2_subgroups().unwrap();
        let h = &subs[pick % subs.len()];
        let s = GroupSubset::from_elements(
            g.order(),
            h.members.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x),
        );
        prop_assume!(!s.is_empty() && is_distinct_sumfree(&g, &s));
        let r = count_extensions(&g, &s, &h.members.complement(), true).unwrap();
        prop_assert!(r.maximal_extensions.unwrap() <= r.mis_count);
    }

    #[test]
    fn serde_round_trips(g in graph(10), (grp, s) in group_and_subset(20)) {
        let text = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(&serde_json::from_str::<SimpleGraph>(&text).unwrap(), &g);
        prop_assert_eq!(&SimpleGraph::from_text(&g.to_text()).unwrap(), &g);
        let text = serde_json::to_string(&s).unwrap();
        // The wire format drops the universe, so compare members.
        prop_assert_eq!(serde_json::from_str::<GroupSubset>(&text).unwrap().to_indices(), s.to_indices());
        let l = build_link_graph(&grp, &s, &s.complement());
        let back: LinkGraph = serde_json::from_str::<LinkGraph>(&serde_json::to_string(&l).unwrap()).unwrap().restore();
        prop_assert_eq!(back.edges.len(), l.edges.len());
        for v in l.vertices.iter().copied() {
            prop_assert_eq!(back.neighbors(v), l.neighbors(v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plain_counts_never_exceed_distinct(g in group(14)) {
        let r = census_variants(&g, &[Variant::Plain, Variant::Distinct], false, 4).unwrap();
        prop_assert!(r.f.unwrap() <= r.f_star.unwrap());
        for w in &r.max_witnesses {
            prop_assert!(is_maximal_sumfree(&g, w).unwrap());
        }
    }
}

#[test]
fn families_are_free_and_conflicting() {
    let cases: Vec<(Vec<u64>, FamilyKind)> = vec![
        (vec![5], FamilyKind::SymmetricOrbits),
        (vec![11], FamilyKind::SymmetricOrbits),
        (vec![5, 5], FamilyKind::SymmetricOrbits),
        (vec![17], FamilyKind::SymmetricOrbits),
        (vec![5, 5], FamilyKind::Z5Power),
    ];
    let even = specs(24, true).into_iter().map(|o| (o, FamilyKind::LinkExtensions));
    for (orders, kind) in cases.into_iter().chain(even) {
        let g = AbelianGroup::new(&orders).unwrap();
        let fam: ConstructionFamily = construct(&g, kind).unwrap();
        let report = verify_family(&g, &fam, 7);
        assert!(report.holds(), "{g} {kind:?}: {report:?}");
        let text = serde_json::to_string(&fam).unwrap();
        let round: ConstructionFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&round).unwrap(), text);
    }
}
