//! Exhaustive counts of (maximal) (distinct) sum-free sets, link-graph
//! extension counts, finite checks on sets generated from index-2 cosets,
//! and the random-subset experiment.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, Element};
use crate::linkgraph::build_link_graph;
use crate::mis::{for_each_mis, mis_count};
use crate::schur::{is_distinct_sumfree, is_free, is_maximal, max_free_subset, Variant};
use crate::seed::{derive, stream_rng};
use crate::subset::GroupSubset;

/// Largest group for a census that also counts non-maximal sets.
pub const FULL_CENSUS_CAP: usize = 26;
/// Largest group for a maximal-only census.
pub const MAXIMAL_CENSUS_CAP: usize = 32;
/// Largest candidate set for a restricted census.
pub const WITHIN_CANDIDATE_CAP: usize = 40;
pub const CLAIMS_CAP: usize = 24;
/// Largest random sample handed to the exact solver.
pub const GNP_SAMPLE_CAP: usize = 40;
pub const DEFAULT_WITNESSES: usize = 16;
/// Branch points above this depth run in parallel.
const PARALLEL_DEPTH: u32 = 10;

pub const CSV_HEADER: &str = "group,f,f_star,f_max,f_star_max,seconds";

#[inline]
fn bit(i: usize) -> u64 {
    1u64 << i
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

fn mask_of(s: &GroupSubset) -> u64 {
    s.iter().fold(0, |m, x| m | bit(x.0))
}

fn subset_of(n: usize, mask: u64) -> GroupSubset {
    GroupSubset::from_mask(n, mask)
}

/// Triple structure of a group of order at most 64, arranged for
/// incremental "which elements are now blocked" updates.
struct Blockers {
    n: usize,
    /// Elements that are a triple on their own.
    always: u64,
    /// `pair[x * n + y]`: elements `z` completing a triple with exactly `{x, y}`
    /// (`x == y` for two-element triples).
    pair: Vec<u64>,
    /// For each `z`, the sets `T \ {z}` over triples `T` through `z`.
    rests: Vec<Vec<u64>>,
}

impl Blockers {
    fn new(g: &AbelianGroup, variant: Variant) -> Self {
        let n = g.order();
        debug_assert!(n <= 64);
        let mut triples = HashSet::new();
        for a in 0..n {
            for b in a..n {
                let c = g.add(Element(a), Element(b)).0;
                if variant == Variant::Distinct && (a == b || c == a || c == b) {
                    continue;
                }
                triples.insert(bit(a) | bit(b) | bit(c));
            }
        }
        let mut triples: Vec<u64> = triples.into_iter().collect();
        triples.sort_unstable();
        let mut always = 0;
        let mut pair = vec![0u64; n * n];
        let mut rests = vec![Vec::new(); n];
        for t in triples {
            let mut m = t;
            while m != 0 {
                let z = m.trailing_zeros() as usize;
                m &= m - 1;
                let rest = t & !bit(z);
                match rest.count_ones() {
                    0 => always |= bit(z),
                    1 => {
                        let x = rest.trailing_zeros() as usize;
                        pair[x * n + x] |= bit(z);
                    }
                    _ => {
                        let x = rest.trailing_zeros() as usize;
                        let y = 63 - rest.leading_zeros() as usize;
                        pair[x * n + y] |= bit(z);
                        pair[y * n + x] |= bit(z);
                    }
                }
                rests[z].push(rest);
            }
        }
        Blockers {
            n,
            always,
            pair,
            rests,
        }
    }

    /// Elements whose addition to `chosen` would create a triple.
    fn blocked_by(&self, chosen: u64) -> u64 {
        let mut blocked = self.always;
        let mut m = chosen;
        while m != 0 {
            let x = m.trailing_zeros() as usize;
            m &= m - 1;
            blocked |= self.add_effect(x, chosen);
        }
        blocked
    }

    /// New blocked elements when `x` joins `chosen` (which may contain `x`).
    #[inline]
    fn add_effect(&self, x: usize, chosen: u64) -> u64 {
        let row = &self.pair[x * self.n..(x + 1) * self.n];
        let mut blocked = row[x];
        let mut m = chosen & !bit(x);
        while m != 0 {
            let y = m.trailing_zeros() as usize;
            m &= m - 1;
            blocked |= row[y];
        }
        blocked
    }

    /// Whether `z` could still be blocked once some of `reachable` is added.
    #[inline]
    fn blockable(&self, z: usize, reachable: u64) -> bool {
        self.rests[z].iter().any(|&r| r & !reachable == 0)
    }

    fn is_free(&self, set: u64) -> bool {
        let mut m = set;
        while m != 0 {
            let z = m.trailing_zeros() as usize;
            m &= m - 1;
            if self.always & bit(z) != 0 || self.rests[z].iter().any(|&r| r & !set == 0) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    free: u64,
    maximal: u64,
    witnesses: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally, limit: usize) -> Tally {
        self.free += other.free;
        self.maximal += other.maximal;
        let room = limit.saturating_sub(self.witnesses.len());
        self.witnesses.extend(other.witnesses.into_iter().take(room));
        self
    }
}

struct Search<'a> {
    blockers: &'a Blockers,
    universe: u64,
    /// Candidates in decision order.
    order: Vec<usize>,
    /// `suffix[i]`: mask of `order[i..]`.
    suffix: Vec<u64>,
    maximal_only: bool,
    witness_limit: usize,
}

impl Search<'_> {
    fn new(blockers: &Blockers, candidates: u64, maximal_only: bool, witness_limit: usize) -> Search<'_> {
        let order: Vec<usize> = (0..blockers.n).filter(|&i| candidates & bit(i) != 0).collect();
        let mut suffix = vec![0u64; order.len() + 1];
        for i in (0..order.len()).rev() {
            suffix[i] = suffix[i + 1] | bit(order[i]);
        }
        Search {
            blockers,
            universe: low_mask(blockers.n),
            order,
            suffix,
            maximal_only,
            witness_limit,
        }
    }

    fn leaf(&self, chosen: u64, blocked: u64) -> Tally {
        let maximal = self.universe & !chosen & !blocked == 0;
        Tally {
            free: 1,
            maximal: maximal as u64,
            witnesses: if maximal && self.witness_limit > 0 {
                vec![chosen]
            } else {
                Vec::new()
            },
        }
    }

    /// `pending`: elements outside `chosen` that are not yet blocked and
    /// cannot be chosen any more; a maximal completion must block them all.
    fn run(&self, i: usize, chosen: u64, blocked: u64, pending: u64, depth: u32) -> Tally {
        let pending = pending & !blocked;
        let open = self.suffix[i] & !blocked;
        if self.maximal_only && pending != 0 {
            let reachable = chosen | open;
            let mut m = pending;
            while m != 0 {
                let z = m.trailing_zeros() as usize;
                m &= m - 1;
                if !self.blockers.blockable(z, reachable) {
                    return Tally::default();
                }
            }
        }
        if open == 0 {
            return self.leaf(chosen, blocked);
        }
        let j = self.first_open(i, open);
        let x = self.order[j];
        let with = chosen | bit(x);
        let with_blocked = blocked | self.blockers.add_effect(x, with);
        let include = || self.run(j + 1, with, with_blocked, pending, depth + 1);
        let exclude = || self.run(j + 1, chosen, blocked, pending | bit(x), depth + 1);
        if depth < PARALLEL_DEPTH {
            let (a, b) = rayon::join(include, exclude);
            a.merge(b, self.witness_limit)
        } else {
            include().merge(exclude(), self.witness_limit)
        }
    }

    fn first_open(&self, from: usize, open: u64) -> usize {
        (from..self.order.len())
            .find(|&k| open & bit(self.order[k]) != 0)
            .expect("open candidate exists")
    }
}

/// Counts free sets `M` with `required ⊆ M ⊆ required ∪ candidates`, and how
/// many of them are maximal free in the whole group.
fn count_sets(
    blockers: &Blockers,
    required: u64,
    candidates: u64,
    maximal_only: bool,
    witness_limit: usize,
) -> Tally {
    if !blockers.is_free(required) {
        return Tally::default();
    }
    let candidates = candidates & !required;
    let blocked = blockers.blocked_by(required);
    let search = Search::new(blockers, candidates, maximal_only, witness_limit);
    let outside = low_mask(blockers.n) & !required & !candidates;
    search.run(0, required, blocked, outside, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub group: String,
    pub n: usize,
    pub maximal_only: bool,
    /// Sum-free sets, including the empty set.
    pub f: Option<u64>,
    /// Distinct sum-free sets, including the empty set.
    pub f_star: Option<u64>,
    pub f_max: Option<u64>,
    pub f_star_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub max_witnesses: Vec<GroupSubset>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub star_max_witnesses: Vec<GroupSubset>,
    pub seconds: f64,
}

impl CensusReport {
    /// The group spec is quoted when it has more than one factor.
    pub fn csv_row(&self) -> String {
        let cell = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let group = if self.group.contains(',') {
            format!("\"{}\"", self.group)
        } else {
            self.group.clone()
        };
        format!(
            "{},{},{},{},{},{:.6}",
            group,
            cell(self.f),
            cell(self.f_star),
            cell(self.f_max),
            cell(self.f_star_max),
            self.seconds
        )
    }
}

fn census_cap(n: usize, maximal_only: bool) -> Result<()> {
    let cap = if maximal_only {
        MAXIMAL_CENSUS_CAP
    } else {
        FULL_CENSUS_CAP
    };
    if n > cap {
        return Err(Error::CapExceeded {
            what: if maximal_only {
                "maximal census"
            } else {
                "full census"
            },
            n,
            cap,
        });
    }
    Ok(())
}

/// Exhaustive census of one or both variants. Non-maximal counts are only
/// produced when `maximal_only` is false.
pub fn census_variants(
    g: &AbelianGroup,
    variants: &[Variant],
    maximal_only: bool,
    witness_limit: usize,
) -> Result<CensusReport> {
    let n = g.order();
    census_cap(n, maximal_only)?;
    let start = Instant::now();
    let mut report = CensusReport {
        group: g.spec_string(),
        n,
        maximal_only,
        f: None,
        f_star: None,
        f_max: None,
        f_star_max: None,
        max_witnesses: Vec::new(),
        star_max_witnesses: Vec::new(),
        seconds: 0.0,
    };
    for &variant in variants {
        let blockers = Blockers::new(g, variant);
        let tally = count_sets(&blockers, 0, low_mask(n), maximal_only, witness_limit);
        let all = (!maximal_only).then_some(tally.free);
        let witnesses = tally.witnesses.iter().map(|&m| subset_of(n, m)).collect();
        match variant {
            Variant::Plain => {
                report.f = all;
                report.f_max = Some(tally.maximal);
                report.max_witnesses = witnesses;
            }
            Variant::Distinct => {
                report.f_star = all;
                report.f_star_max = Some(tally.maximal);
                report.star_max_witnesses = witnesses;
            }
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

pub fn census(g: &AbelianGroup, distinct: bool, maximal_only: bool) -> Result<CensusReport> {
    let variant = if distinct {
        Variant::Distinct
    } else {
        Variant::Plain
    };
    census_variants(g, &[variant], maximal_only, DEFAULT_WITNESSES)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedCount {
    /// Free sets between `S` and `S ∪ A`.
    pub free: u64,
    /// Those that are maximal free in the whole group.
    pub maximal: u64,
}

/// Census of free sets `M` with `S ⊆ M ⊆ S ∪ A`.
pub fn census_within(
    g: &AbelianGroup,
    s: &GroupSubset,
    a: &GroupSubset,
    variant: Variant,
) -> Result<RestrictedCount> {
    let n = g.order();
    if n > 64 || a.len() > WITHIN_CANDIDATE_CAP {
        return Err(Error::CapExceeded {
            what: "restricted census candidates",
            n: a.len().max(n.min(65)),
            cap: WITHIN_CANDIDATE_CAP,
        });
    }
    let blockers = Blockers::new(g, variant);
    let tally = count_sets(&blockers, mask_of(s), mask_of(a), false, 0);
    Ok(RestrictedCount {
        free: tally.free,
        maximal: tally.maximal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionCount {
    /// Maximal independent sets of the distinct link graph of `S` on `A`.
    pub mis_count: u64,
    /// How many of them give a maximal distinct sum-free `S ∪ I`.
    pub maximal_extensions: Option<u64>,
}

/// Maximal independent sets `I` of `L*_S[A]`; with `check_maximality`, also
/// the number of `I` for which `S ∪ I` is maximal distinct sum-free in `G`.
pub fn count_extensions(
    g: &AbelianGroup,
    s: &GroupSubset,
    a: &GroupSubset,
    check_maximality: bool,
) -> Result<ExtensionCount> {
    if !is_distinct_sumfree(g, s) {
        return Err(Error::NotFree("distinct sum-free"));
    }
    if !s.is_disjoint(a) {
        return Err(Error::InvalidArgument("S and A must be disjoint".into()));
    }
    let link = build_link_graph(g, s, a);
    let graph = link.to_simple_graph()?;
    if !check_maximality {
        return Ok(ExtensionCount {
            mis_count: mis_count(&graph),
            maximal_extensions: None,
        });
    }
    let (mut total, mut good) = (0u64, 0u64);
    for_each_mis(&graph, |mask| {
        total += 1;
        let mut set = s.clone();
        for (i, &x) in link.vertices.iter().enumerate() {
            if mask >> i & 1 == 1 {
                set.insert(x);
            }
        }
        if is_free(g, &set, Variant::Distinct)
            && is_maximal(g, &set, Variant::Distinct).unwrap_or(false)
        {
            good += 1;
        }
    });
    Ok(ExtensionCount {
        mis_count: total,
        maximal_extensions: Some(good),
    })
}

/// A coset-based generator `(A, S)`: `A` is the complement of an index-2
/// subgroup `H`, and `S` is `{0}` or `{0, s}` with `s ∈ H` of order 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    /// Position of `H` in the index-2 subgroup list.
    pub subgroup: usize,
    pub coset: GroupSubset,
    pub source: GroupSubset,
}

/// Every `(A, {0})` and `(A, {0, s})` pair of an even group.
pub fn coset_generators(g: &AbelianGroup) -> Result<Vec<Generator>> {
    let n = g.order();
    let mut out = Vec::new();
    for (j, h) in g.index2_subgroups()?.into_iter().enumerate() {
        let coset = h.members.complement();
        out.push(Generator {
            subgroup: j,
            coset: coset.clone(),
            source: GroupSubset::from_elements(n, [Element::ZERO]),
        });
        for s in h.members.iter() {
            if s != Element::ZERO && g.double(s) == Element::ZERO {
                out.push(Generator {
                    subgroup: j,
                    coset: coset.clone(),
                    source: GroupSubset::from_elements(n, [Element::ZERO, s]),
                });
            }
        }
    }
    Ok(out)
}

/// The maximal distinct sum-free sets `S ∪ I` generated by `(A, S)`, as masks.
pub fn generated_sets(g: &AbelianGroup, generator: &Generator) -> Result<Vec<u64>> {
    let link = build_link_graph(g, &generator.source, &generator.coset);
    let graph = link.to_simple_graph()?;
    let blockers = Blockers::new(g, Variant::Distinct);
    let base = mask_of(&generator.source);
    let universe = low_mask(g.order());
    let mut out = Vec::new();
    for_each_mis(&graph, |mask| {
        let mut set = base;
        for (i, &x) in link.vertices.iter().enumerate() {
            if mask >> i & 1 == 1 {
                set |= bit(x.0);
            }
        }
        if blockers.is_free(set) && universe & !set & !blockers.blocked_by(set) == 0 {
            out.push(set);
        }
    });
    out.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// `(A, {0})` against `(A', {0})` with `A != A'`: at most one common set.
    ZeroZero,
    /// `(A, {0})` against `(A', {0, s})`: no common set.
    ZeroInvolution,
    /// `(A, {0, s})` against `(A', {0, s'})`: at most `3^{n/12}` common sets.
    InvolutionInvolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub kind: PairKind,
    pub first: Generator,
    pub second: Generator,
    pub common: usize,
    pub limit: u64,
    /// One set generated by both.
    pub example: GroupSubset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairKindSummary {
    pub kind: PairKind,
    pub pairs: usize,
    pub limit: u64,
    pub max_common: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimsReport {
    pub group: String,
    pub n: usize,
    pub generators: usize,
    pub summaries: Vec<PairKindSummary>,
    pub violations: Vec<PairViolation>,
}

impl ClaimsReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks how many maximal distinct sum-free sets two coset generators can
/// share: at most one for two zero sources on different cosets, none for a
/// zero source against an involution source, and at most `3^{n/12}` for two
/// involution sources.
pub fn verify_claims(g: &AbelianGroup) -> Result<ClaimsReport> {
    let n = g.order();
    if n % 2 == 1 {
        return Err(Error::NoIndexTwoSubgroup(n));
    }
    if n > CLAIMS_CAP {
        return Err(Error::CapExceeded {
            what: "coset generator claims",
            n,
            cap: CLAIMS_CAP,
        });
    }
    let generators = coset_generators(g)?;
    let families: Vec<Vec<u64>> = generators
        .par_iter()
        .map(|gen| generated_sets(g, gen))
        .collect::<Result<_>>()?;
    let involution_limit = 3f64.powf(n as f64 / 12.0).floor() as u64;
    let limit_of = |kind| match kind {
        PairKind::ZeroZero => 1,
        PairKind::ZeroInvolution => 0,
        PairKind::InvolutionInvolution => involution_limit,
    };
    let mut summaries: Vec<PairKindSummary> = [
        PairKind::ZeroZero,
        PairKind::ZeroInvolution,
        PairKind::InvolutionInvolution,
    ]
    .into_iter()
    .map(|kind| PairKindSummary {
        kind,
        pairs: 0,
        limit: limit_of(kind),
        max_common: 0,
    })
    .collect();
    let mut violations = Vec::new();
    let m = generators.len();
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (&generators[i], &generators[j]);
            let kind = match (a.source.len(), b.source.len()) {
                (1, 1) => PairKind::ZeroZero,
                (2, 2) => PairKind::InvolutionInvolution,
                _ => PairKind::ZeroInvolution,
            };
            let common: Vec<u64> = families[i]
                .iter()
                .filter(|m| families[j].binary_search(m).is_ok())
                .copied()
                .collect();
            let summary = summaries.iter_mut().find(|s| s.kind == kind).unwrap();
            summary.pairs += 1;
            summary.max_common = summary.max_common.max(common.len());
            if common.len() as u64 > summary.limit {
                violations.push(PairViolation {
                    kind,
                    first: a.clone(),
                    second: b.clone(),
                    common: common.len(),
                    limit: summary.limit,
                    example: subset_of(n, common[0]),
                });
            }
        }
    }
    Ok(ClaimsReport {
        group: g.spec_string(),
        n,
        generators: m,
        summaries,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnpSample {
    pub trial: u64,
    pub p: f64,
    /// Seed of this trial's generator, derived from the run seed.
    pub seed: u64,
    pub subset: GroupSubset,
    pub largest_sumfree_size: usize,
    /// `largest_sumfree_size / (μ(G) p)`, or 0 when `p = 0`.
    pub ratio: f64,
}

/// Keeps each element independently with probability `p` and solves for the
/// largest sum-free subset of the sample exactly.
pub fn gnp_experiment(g: &AbelianGroup, p: f64, trials: u64, seed: u64) -> Result<Vec<GnpSample>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} is not a probability")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mu = g.mu()?;
    let n = g.order();
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let subset = GroupSubset::from_elements(n, g.elements().filter(|_| rng.gen_bool(p)));
            if subset.len() > GNP_SAMPLE_CAP {
                return Err(Error::CapExceeded {
                    what: "random sample for the exact solver",
                    n: subset.len(),
                    cap: GNP_SAMPLE_CAP,
                });
            }
            let largest = max_free_subset(g, &subset, Variant::Plain)?.len();
            let ratio = if p == 0.0 {
                0.0
            } else {
                largest as f64 / (mu as f64 * p)
            };
            Ok(GnpSample {
                trial,
                p,
                seed: derive(seed, trial),
                subset,
                largest_sumfree_size: largest,
                ratio,
            })
        })
        .collect()
}
