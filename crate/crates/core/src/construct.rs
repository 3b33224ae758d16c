//! Explicit families of pairwise conflicting (distinct) sum-free sets.
//!
//! Each family lower-bounds a count of maximal sets: its members are free,
//! and any two of them together contain a triple, so no maximal free set
//! contains two members.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, Element, GroupType, Subgroup, ZpHom};
use crate::linkgraph::build_link_graph;
use crate::mis::all_mis;
use crate::schur::{find_joint_triple, is_free, is_sumfree, Variant};
use crate::seed::stream_rng;
use crate::subset::GroupSubset;

/// Families larger than this are refused rather than materialized.
pub const EMISSION_CAP: usize = 1 << 20;
/// Up to this many sets every pair is checked; beyond it pairs are sampled.
pub const EXHAUSTIVE_PAIR_CAP: usize = 1 << 12;
pub const SAMPLED_PAIRS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `{0}` plus one element from each orbit `{x, -x}` of an extremal
    /// sum-free set in a type I group with `p >= 5`.
    SymmetricOrbits,
    /// Three-way choices along the orbits of `b -> -b - s` in `Z_5^k`.
    Z5Power,
    /// `S ∪ I` for the maximal independent sets `I` of a link graph on the
    /// odd coset of an index-2 subgroup.
    LinkExtensions,
}

impl FamilyKind {
    pub fn variant(self) -> Variant {
        match self {
            FamilyKind::Z5Power => Variant::Plain,
            FamilyKind::SymmetricOrbits | FamilyKind::LinkExtensions => Variant::Distinct,
        }
    }
}

/// The choices a family was built from, enough to rebuild it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<GroupSubset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<Element>,
    /// The fixed element `s` shared by every set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coset_representative: Option<Element>,
    /// The set whose structure the family is built on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<GroupSubset>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionFamily {
    pub group: String,
    pub kind: FamilyKind,
    pub parameters: FamilyParameters,
    pub expected_count: u128,
    pub sets: Vec<GroupSubset>,
}

fn check_emission(count: u128) -> Result<()> {
    if count > EMISSION_CAP as u128 {
        return Err(Error::FamilyTooLarge {
            count,
            cap: EMISSION_CAP,
        });
    }
    Ok(())
}

fn type_one_prime(g: &AbelianGroup) -> Result<u64> {
    match g.classify() {
        GroupType::TypeI(p) => Ok(p),
        other => Err(Error::WrongType(format!("{g} is {other}, expected type I"))),
    }
}

/// `B = ∪_{k=0}^{(p-2)/3} ((3k+1)g + H)` for a type I(p) group, `H` of index
/// `p` and `g ∉ H`. When `p = 2` this is the coset `g + H`.
pub fn extremal_sumfree_type_one(g: &AbelianGroup, h: &Subgroup, gen: Element) -> Result<GroupSubset> {
    let p = type_one_prime(g)?;
    if h.index as u64 != p || !g.is_subgroup(&h.members) {
        return Err(Error::InvalidArgument(format!(
            "expected a subgroup of index {p}, got index {}",
            h.index
        )));
    }
    if gen.0 >= g.order() {
        return Err(Error::ElementOutOfRange {
            index: gen.0,
            n: g.order(),
        });
    }
    if h.members.contains(gen) {
        return Err(Error::InvalidArgument(format!("generator {gen} lies in H")));
    }
    let mut b = GroupSubset::empty(g.order());
    for k in 0..=(p - 2) / 3 {
        let shift = g.times(3 * k + 1, gen);
        for x in h.members.iter() {
            b.insert(g.add(shift, x));
        }
    }
    Ok(b)
}

/// The first index-`p` subgroup of a type I(p) group, its homomorphism, and
/// the smallest `g` with `ψ(g) = 1`.
pub fn default_type_one_data(g: &AbelianGroup) -> Result<(Subgroup, ZpHom, Element)> {
    let p = type_one_prime(g)?;
    let first = g
        .subgroups_of_prime_index(p)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal(format!("{g} has no subgroup of index {p}")))?;
    let gen = g
        .elements()
        .find(|&x| first.hom.apply(g, x) == 1)
        .ok_or_else(|| Error::Internal("surjection misses 1".into()))?;
    Ok((first.subgroup, first.hom, gen))
}

/// Looks for a surjection `ψ: G -> Z_p`, `p = 3k + 2`, with
/// `A ⊆ ψ^{-1}({k+1, ..., 2k+1})`.
pub fn gr_structure_check(g: &AbelianGroup, a: &GroupSubset) -> Result<Option<ZpHom>> {
    let p = type_one_prime(g)?;
    let k = (p - 2) / 3;
    Ok(g.homs_to_zp(p).into_iter().find(|hom| {
        a.iter().all(|x| {
            let v = hom.apply(g, x);
            (k + 1..=2 * k + 1).contains(&v)
        })
    }))
}

/// Orbits `{x, -x}` of `b` with their smaller element first, sorted.
fn negation_orbits(g: &AbelianGroup, b: &GroupSubset) -> Result<Vec<(Element, Element)>> {
    let mut orbits = Vec::new();
    for x in b.iter() {
        let y = g.neg(x);
        if !b.contains(y) {
            return Err(Error::Internal(format!("{x} in B but {y} is not")));
        }
        if x == y {
            return Err(Error::Internal(format!("negation fixes {x}")));
        }
        if x < y {
            orbits.push((x, y));
        }
    }
    Ok(orbits)
}

/// All `2^{μ/2}` sets `{0} ∪ {one element of each orbit {x, -x} of B}`.
pub fn construct_symmetric_orbits(g: &AbelianGroup) -> Result<ConstructionFamily> {
    let p = type_one_prime(g)?;
    if p < 5 {
        return Err(Error::WrongType(format!(
            "{g} is TypeI({p}); the orbit construction needs p >= 5"
        )));
    }
    let (h, _, gen) = default_type_one_data(g)?;
    let b = extremal_sumfree_type_one(g, &h, gen)?;
    let orbits = negation_orbits(g, &b)?;
    let expected = 1u128 << orbits.len().min(127);
    check_emission(expected)?;
    let n = g.order();
    let sets = (0..expected as u64)
        .into_par_iter()
        .map(|mask| {
            let mut s = GroupSubset::from_elements(n, [Element::ZERO]);
            for (i, &(lo, hi)) in orbits.iter().enumerate() {
                s.insert(if mask >> i & 1 == 0 { lo } else { hi });
            }
            s
        })
        .collect();
    Ok(ConstructionFamily {
        group: g.spec_string(),
        kind: FamilyKind::SymmetricOrbits,
        parameters: FamilyParameters {
            subgroup: Some(h.members),
            generator: Some(gen),
            base: Some(b),
            ..Default::default()
        },
        expected_count: expected,
        sets,
    })
}

/// The `3^{(5^{k-1}-1)/2}` sum-free sets in `Z_5^k` built from the
/// involution `b -> -b - s` on the slice with first coordinate 2.
pub fn construct_z5k(k: usize) -> Result<ConstructionFamily> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let g = AbelianGroup::new(&vec![5; k])?;
    let n = g.order();
    let s = Element(1);
    let slice = GroupSubset::from_elements(n, g.elements().filter(|&x| x.0 % 5 == 2));
    let phi = |b: Element| g.sub(g.neg(b), s);
    let reps: Vec<Element> = slice.iter().filter(|&b| b < phi(b)).collect();
    let expected = 3u128.checked_pow(reps.len() as u32).unwrap_or(u128::MAX);
    check_emission(expected)?;
    let sets = (0..expected as u64)
        .into_par_iter()
        .map(|code| {
            let mut set = GroupSubset::from_elements(n, [s]);
            let mut rest = code;
            for &b in &reps {
                let pair = match rest % 3 {
                    0 => [b, g.neg(b)],
                    1 => [b, phi(b)],
                    _ => [g.add(b, s), phi(b)],
                };
                rest /= 3;
                for x in pair {
                    set.insert(x);
                }
            }
            set
        })
        .collect();
    Ok(ConstructionFamily {
        group: g.spec_string(),
        kind: FamilyKind::Z5Power,
        parameters: FamilyParameters {
            shift: Some(s),
            base: Some(slice),
            ..Default::default()
        },
        expected_count: expected,
        sets,
    })
}

/// Source set and coset used by the link-graph family: the first index-2
/// subgroup `H`, its complement `A`, and `S = {0, s}` with `s` the smallest
/// order-2 element of `H`, or `S = {0}` when `H` has none.
pub fn link_family_setup(g: &AbelianGroup) -> Result<(Subgroup, GroupSubset, Option<Element>)> {
    let h = g
        .index2_subgroups()?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal(format!("{g} has even order but no index-2 subgroup")))?;
    let a = h.members.complement();
    let s = h
        .members
        .iter()
        .find(|&x| x != Element::ZERO && g.double(x) == Element::ZERO);
    Ok((h, a, s))
}

/// All sets `S ∪ I` with `I` a maximal independent set of the distinct link
/// graph of `S` on the odd coset `A`; `2^{n/4}` of them, or `2^{(n-2)/4}`
/// when the 2-part of `G` is `Z_2`.
pub fn construct_link_extensions(g: &AbelianGroup) -> Result<ConstructionFamily> {
    let n = g.order();
    let (h, a, s) = link_family_setup(g)?;
    let mut source = GroupSubset::from_elements(n, [Element::ZERO]);
    if let Some(s) = s {
        source.insert(s);
    }
    let big_two_part = g.r1() >= 1 || g.r2() >= 2;
    let expected_exp = if big_two_part { n / 4 } else { (n - 2) / 4 };
    let expected = 1u128 << expected_exp.min(127);
    check_emission(expected)?;
    let link = build_link_graph(g, &source, &a);
    let coset_representative = a.iter().next();
    let graph = link.to_simple_graph()?;
    let sets = all_mis(&graph)
        .into_iter()
        .map(|mask| {
            let mut set = source.clone();
            for (i, &x) in link.vertices.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    set.insert(x);
                }
            }
            set
        })
        .collect();
    Ok(ConstructionFamily {
        group: g.spec_string(),
        kind: FamilyKind::LinkExtensions,
        parameters: FamilyParameters {
            coset_representative,
            subgroup: Some(h.members),
            shift: s,
            base: Some(source),
            ..Default::default()
        },
        expected_count: expected,
        sets,
    })
}

pub fn construct(g: &AbelianGroup, kind: FamilyKind) -> Result<ConstructionFamily> {
    match kind {
        FamilyKind::SymmetricOrbits => construct_symmetric_orbits(g),
        FamilyKind::LinkExtensions => construct_link_extensions(g),
        FamilyKind::Z5Power => {
            let orders = g.factor_orders();
            if orders.iter().any(|&m| m != 5) {
                return Err(Error::WrongType(format!("{g} is not a power of Z5")));
            }
            construct_z5k(orders.len())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub sets: usize,
    pub expected_count: u128,
    pub all_free: bool,
    pub pairs_checked: u64,
    pub sampled: bool,
    /// Index pairs whose union has no joint triple.
    pub non_conflicting: Vec<(usize, usize)>,
}

impl FamilyReport {
    pub fn holds(&self) -> bool {
        self.sets as u128 == self.expected_count && self.all_free && self.non_conflicting.is_empty()
    }
}

/// Checks freeness of every set and the joint-triple property for every pair
/// (or for a seeded sample of pairs in large families).
pub fn verify_family(g: &AbelianGroup, family: &ConstructionFamily, seed: u64) -> FamilyReport {
    let variant = family.kind.variant();
    let sets = &family.sets;
    let m = sets.len();
    let all_free = sets.par_iter().all(|s| is_free(g, s, variant));
    let conflict = |i: usize, j: usize| find_joint_triple(g, &sets[i], &sets[j], variant).is_some();
    let (pairs_checked, sampled, mut non_conflicting) = if m <= EXHAUSTIVE_PAIR_CAP {
        let bad: Vec<(usize, usize)> = (0..m)
            .into_par_iter()
            .flat_map_iter(|i| (i + 1..m).filter(move |&j| !conflict(i, j)).map(move |j| (i, j)))
            .collect();
        ((m * m.saturating_sub(1) / 2) as u64, false, bad)
    } else {
        let bad: Vec<(usize, usize)> = (0..SAMPLED_PAIRS)
            .into_par_iter()
            .filter_map(|t| {
                let mut rng = stream_rng(seed, t);
                let i = rng.gen_range(0..m);
                let mut j = rng.gen_range(0..m - 1);
                if j >= i {
                    j += 1;
                }
                let (i, j) = (i.min(j), i.max(j));
                (!conflict(i, j)).then_some((i, j))
            })
            .collect();
        (SAMPLED_PAIRS, true, bad)
    };
    non_conflicting.sort_unstable();
    non_conflicting.dedup();
    FamilyReport {
        sets: m,
        expected_count: family.expected_count,
        all_free,
        pairs_checked,
        sampled,
        non_conflicting,
    }
}

/// Sanity check used by tests and the CLI: the extremal set has size μ,
/// is sum-free and symmetric.
pub fn check_extremal(g: &AbelianGroup, b: &GroupSubset) -> Result<bool> {
    Ok(b.len() == g.mu()? && is_sumfree(g, b) && *b == b.negated(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(s: &GroupSubset) -> Vec<usize> {
        s.to_indices()
    }

    #[test]
    fn extremal_examples() {
        let z5 = AbelianGroup::new(&[5]).unwrap();
        let (h, _, gen) = default_type_one_data(&z5).unwrap();
        assert_eq!((idx(&h.members), gen), (vec![0], Element(1)));
        let b = extremal_sumfree_type_one(&z5, &h, gen).unwrap();
        assert_eq!(idx(&b), vec![1, 4]);
        assert!(check_extremal(&z5, &b).unwrap());

        let z10 = AbelianGroup::new(&[10]).unwrap();
        let (h, _, gen) = default_type_one_data(&z10).unwrap();
        let b = extremal_sumfree_type_one(&z10, &h, gen).unwrap();
        assert_eq!(idx(&b), vec![1, 3, 5, 7, 9]);
        assert!(check_extremal(&z10, &b).unwrap());

        let z55 = AbelianGroup::new(&[5, 5]).unwrap();
        let h = Subgroup::from_members(
            &z55,
            GroupSubset::from_elements(25, (0..5).map(|b| z55.from_coords(&[0, b]).unwrap())),
        )
        .unwrap();
        let b = extremal_sumfree_type_one(&z55, &h, z55.from_coords(&[1, 0]).unwrap()).unwrap();
        assert_eq!(b.len(), 10);
        assert!(b.iter().all(|x| [1, 4].contains(&z55.coords(x)[0])));
        assert!(check_extremal(&z55, &b).unwrap());
    }

    #[test]
    fn extremal_rejects_bad_input() {
        let z5 = AbelianGroup::new(&[5]).unwrap();
        let (h, _, _) = default_type_one_data(&z5).unwrap();
        assert!(extremal_sumfree_type_one(&z5, &h, Element(0)).is_err());
        let z9 = AbelianGroup::new(&[9]).unwrap();
        let trivial = Subgroup::from_members(&z9, GroupSubset::from_indices(9, &[0]).unwrap()).unwrap();
        assert!(matches!(
            extremal_sumfree_type_one(&z9, &trivial, Element(1)),
            Err(Error::WrongType(_))
        ));
        let z10 = AbelianGroup::new(&[10]).unwrap();
        let wrong_index =
            Subgroup::from_members(&z10, GroupSubset::from_indices(10, &[0, 5]).unwrap()).unwrap();
        assert!(extremal_sumfree_type_one(&z10, &wrong_index, Element(1)).is_err());
    }

    #[test]
    fn structure_check_examples() {
        let z5 = AbelianGroup::new(&[5]).unwrap();
        let a = GroupSubset::from_indices(5, &[2, 3]).unwrap();
        let hom = gr_structure_check(&z5, &a).unwrap().unwrap();
        assert_eq!(hom.images, vec![1]);
        let z6 = AbelianGroup::new(&[6]).unwrap();
        let hom = gr_structure_check(&z6, &GroupSubset::from_indices(6, &[1, 3, 5]).unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(hom.p, 2);
        assert!(gr_structure_check(&AbelianGroup::new(&[9]).unwrap(), &GroupSubset::empty(9)).is_err());
    }

    #[test]
    fn symmetric_orbits_examples() {
        let z5 = AbelianGroup::new(&[5]).unwrap();
        let fam = construct_symmetric_orbits(&z5).unwrap();
        let sets: Vec<_> = fam.sets.iter().map(idx).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![0, 4]]);
        assert!(verify_family(&z5, &fam, 0).holds());

        let z11 = AbelianGroup::new(&[11]).unwrap();
        let fam = construct_symmetric_orbits(&z11).unwrap();
        assert_eq!((fam.sets.len(), fam.expected_count), (4, 4));
        assert!(verify_family(&z11, &fam, 0).holds());

        let z55 = AbelianGroup::new(&[5, 5]).unwrap();
        let fam = construct_symmetric_orbits(&z55).unwrap();
        assert_eq!(fam.sets.len(), 32);
        let report = verify_family(&z55, &fam, 0);
        assert!(report.holds());
        assert_eq!(report.pairs_checked, 32 * 31 / 2);

        assert!(construct_symmetric_orbits(&AbelianGroup::new(&[4]).unwrap()).is_err());
    }

    #[test]
    fn z5_power_examples() {
        let fam = construct_z5k(1).unwrap();
        assert_eq!(fam.sets.iter().map(idx).collect::<Vec<_>>(), vec![vec![1]]);
        let fam = construct_z5k(2).unwrap();
        assert_eq!(fam.sets.len(), 9);
        let g = AbelianGroup::new(&[5, 5]).unwrap();
        assert!(fam.sets.iter().all(|s| is_sumfree(&g, s)));
        assert!(verify_family(&g, &fam, 0).holds());
        assert!(matches!(construct_z5k(4), Err(Error::FamilyTooLarge { .. })));
    }

    #[test]
    fn link_extension_examples() {
        let z6 = AbelianGroup::new(&[6]).unwrap();
        let fam = construct_link_extensions(&z6).unwrap();
        let mut sets: Vec<_> = fam.sets.iter().map(idx).collect();
        sets.sort();
        assert_eq!(sets, vec![vec![0, 1, 3], vec![0, 3, 5]]);
        assert!(verify_family(&z6, &fam, 0).holds());

        for spec in [&[4u64][..], &[2, 2]] {
            let g = AbelianGroup::new(spec).unwrap();
            let fam = construct_link_extensions(&g).unwrap();
            assert_eq!(fam.sets.len(), 2, "{g}");
            assert!(verify_family(&g, &fam, 0).holds());
        }
        assert!(construct_link_extensions(&AbelianGroup::new(&[7]).unwrap()).is_err());
    }

    #[test]
    fn family_serializes_parameters() {
        let fam = construct_symmetric_orbits(&AbelianGroup::new(&[5]).unwrap()).unwrap();
        let json = serde_json::to_value(&fam).unwrap();
        assert_eq!(json["kind"], "symmetric-orbits");
        assert_eq!(json["parameters"]["subgroup"], serde_json::json!([0]));
        assert_eq!(json["parameters"]["generator"], 1);
        assert_eq!(json["sets"], serde_json::json!([[0, 1], [0, 4]]));
    }
}
