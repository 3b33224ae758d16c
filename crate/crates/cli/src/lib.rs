//! Argument parsing, dispatch and report rendering for the `sumfree` binary.
//!
//! Every command produces a [`Report`]: the echoed [`RunConfig`] plus the
//! command's result, rendered as JSON, CSV (where tabular) or plain text.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use sumfree::census::{self, CensusReport, ClaimsReport, ExtensionCount, GnpSample, CSV_HEADER};
use sumfree::construct::{self, ConstructionFamily, FamilyKind, FamilyReport};
use sumfree::linkgraph::{self, ComponentCensus, DegreeProfile, EdgeCounts, LinkGraph};
use sumfree::mis::{self, GraphCheck, MisResult, ScanMode, ScanReport, SimpleGraph};
use sumfree::seed::DEFAULT_SEED;
use sumfree::{AbelianGroup, GroupSubset, GroupType, Subgroup, Variant};

#[derive(Debug, Parser)]
#[command(name = "sumfree", version, about = "Exact experiments on sum-free sets in finite abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; `classify` and `mu` default to text, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Size of the rayon worker pool (default: one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Sample budget for random scans; caps exhaustive scans.
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    /// Refuse groups (or scan sizes) larger than this.
    #[arg(long, global = true)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    SymmetricOrbits,
    Z5Power,
    LinkExtensions,
}

impl From<Family> for FamilyKind {
    fn from(f: Family) -> Self {
        match f {
            Family::SymmetricOrbits => FamilyKind::SymmetricOrbits,
            Family::Z5Power => FamilyKind::Z5Power,
            Family::LinkExtensions => FamilyKind::LinkExtensions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Type of the group and μ(G).
    Classify { group: String },
    /// μ(G) from the classification formula.
    Mu { group: String },
    /// All subgroups, and the index-2 subgroups with their 2-ranks.
    Subgroups { group: String },
    /// Exhaustive count of (maximal) sum-free or distinct sum-free sets.
    Census {
        group: String,
        /// Count distinct sum-free sets instead of sum-free sets.
        #[arg(long, conflicts_with = "both")]
        distinct: bool,
        /// Count both variants.
        #[arg(long)]
        both: bool,
        /// Only count maximal sets.
        #[arg(long)]
        maximal: bool,
        /// Number of maximal sets to list as witnesses.
        #[arg(long, default_value_t = 0)]
        witnesses: usize,
    },
    /// Distinct link graph of S on B (comma-separated element indices).
    Linkgraph {
        group: String,
        #[arg(value_name = "S")]
        s: String,
        #[arg(value_name = "B")]
        b: String,
        /// Also count how many maximal independent sets extend S to a
        /// maximal distinct sum-free set.
        #[arg(long)]
        extensions: bool,
    },
    /// Emit and verify an explicit family of pairwise conflicting sets.
    Construct {
        group: String,
        #[arg(value_enum)]
        family: Family,
    },
    /// Look for graphs with a perfect matching and more than 2^{n/2} maximal
    /// independent sets.
    ConjectureMis {
        #[arg(long, required_unless_present = "graph")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        /// Check one graph in the `n m` / `u v` text format instead of scanning.
        #[arg(long, conflicts_with = "n")]
        graph: Option<PathBuf>,
    },
    /// Largest sum-free subset of random subsets that keep each element with
    /// probability p.
    Gnp {
        group: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Overlap counts between the maximal sets generated from different
    /// index-2 cosets.
    VerifyClaims { group: String },
}

impl Command {
    fn group(&self) -> Option<&str> {
        match self {
            Command::Classify { group }
            | Command::Mu { group }
            | Command::Subgroups { group }
            | Command::Census { group, .. }
            | Command::Linkgraph { group, .. }
            | Command::Construct { group, .. }
            | Command::Gnp { group, .. }
            | Command::VerifyClaims { group } => Some(group),
            Command::ConjectureMis { .. } => None,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Classify { .. } | Command::Mu { .. } => Format::Text,
            _ => Format::Json,
        }
    }
}

/// Everything that determines a run, echoed into its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub budget: Option<u64>,
    pub max_n: Option<usize>,
}

impl From<&Cli> for RunConfig {
    fn from(cli: &Cli) -> Self {
        RunConfig {
            command: cli.command.clone(),
            seed: cli.seed,
            format: cli.format.unwrap_or_else(|| cli.command.default_format()),
            out: cli.out.clone(),
            workers: cli.workers,
            budget: cli.budget,
            max_n: cli.max_n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub config: RunConfig,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub group: String,
    pub order: usize,
    pub group_type: GroupType,
    pub mu: usize,
    pub r1: u32,
    pub r2: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuResult {
    pub group: String,
    pub mu: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupsResult {
    pub group: String,
    pub subgroups: Vec<GroupSubset>,
    pub index2: Vec<Subgroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkGraphResult {
    pub graph: LinkGraph,
    pub coset_setting: bool,
    pub degrees: DegreeProfile,
    pub edge_counts: EdgeCounts,
    pub components: ComponentCensus,
    /// Missing when the graph has more than 64 vertices.
    pub mis: Option<MisResult>,
    pub extensions: Option<ExtensionCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructResult {
    pub family: ConstructionFamily,
    pub verification: FamilyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConjectureResult {
    Scan(ScanReport),
    Graph(GraphCheck),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnpResult {
    pub group: String,
    pub mu: usize,
    pub p: f64,
    pub trials: u64,
    pub mean_ratio: f64,
    pub samples: Vec<GnpSample>,
}

/// A rendered report and whether it records a violated invariant.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub violation: bool,
}

/// Parses a comma-separated list of element indices. Errors name the
/// 1-based column of the offending entry.
pub fn parse_indices(list: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut column = 1;
    for part in list.split(',') {
        let trimmed = part.trim();
        if !trimmed.is_empty() || list.contains(',') {
            let lead = part.len() - part.trim_start().len();
            let value = trimmed.parse().map_err(|_| {
                anyhow::anyhow!("column {}: expected an element index, found {trimmed:?}", column + lead)
            })?;
            out.push(value);
        }
        column += part.len() + 1;
    }
    Ok(out)
}

fn subset(g: &AbelianGroup, list: &str) -> anyhow::Result<GroupSubset> {
    Ok(GroupSubset::from_indices(g.order(), &parse_indices(list)?)?)
}

fn render<T: Serialize>(
    config: &RunConfig,
    result: T,
    text: impl FnOnce(&T) -> String,
    csv: Option<&dyn Fn(&T) -> String>,
) -> anyhow::Result<String> {
    match config.format {
        Format::Json => {
            let report = Report {
                config: config.clone(),
                result,
            };
            Ok(serde_json::to_string_pretty(&report)? + "\n")
        }
        Format::Text => Ok(text(&result)),
        Format::Csv => match csv {
            Some(f) => Ok(f(&result)),
            None => anyhow::bail!("csv output is only available for census and gnp"),
        },
    }
}

fn load_group(spec: &str, max_n: Option<usize>) -> anyhow::Result<AbelianGroup> {
    let g = AbelianGroup::parse(spec)?;
    if let Some(cap) = max_n {
        anyhow::ensure!(g.order() <= cap, "group order {} exceeds --max-n {cap}", g.order());
    }
    Ok(g)
}

/// Runs one command. Errors are usage or cap errors; a violated invariant
/// is reported through [`Outcome::violation`].
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let config = RunConfig::from(cli);
    let group = cli
        .command
        .group()
        .map(|spec| load_group(spec, cli.max_n))
        .transpose()?;
    let g = || group.as_ref().expect("command takes a group");
    let mut violation = false;
    let body = match &cli.command {
        Command::Classify { .. } => {
            let g = g();
            let result = ClassifyResult {
                group: g.to_string(),
                order: g.order(),
                group_type: g.classify(),
                mu: g.mu()?,
                r1: g.r1(),
                r2: g.r2(),
            };
            render(&config, result, |r| format!("{}, mu={}\n", r.group_type, r.mu), None)?
        }
        Command::Mu { .. } => {
            let g = g();
            let result = MuResult {
                group: g.to_string(),
                mu: g.mu()?,
            };
            render(&config, result, |r| format!("mu={}\n", r.mu), None)?
        }
        Command::Subgroups { .. } => {
            let g = g();
            let index2 = if g.order() % 2 == 0 {
                g.index2_subgroups()?
            } else {
                Vec::new()
            };
            let result = SubgroupsResult {
                group: g.to_string(),
                subgroups: g.all_subgroups()?,
                index2,
            };
            render(&config, result, subgroups_text, None)?
        }
        Command::Census {
            distinct,
            both,
            maximal,
            witnesses,
            ..
        } => {
            let variants: &[Variant] = match (*distinct, *both) {
                (_, true) => &[Variant::Plain, Variant::Distinct],
                (true, false) => &[Variant::Distinct],
                (false, false) => &[Variant::Plain],
            };
            let result = census::census_variants(g(), variants, *maximal, *witnesses)?;
            let csv = |r: &CensusReport| format!("{CSV_HEADER}\n{}\n", r.csv_row());
            render(&config, result, census_text, Some(&csv))?
        }
        Command::Linkgraph { s, b, extensions, .. } => {
            let g = g();
            let (s, b) = (subset(g, s)?, subset(g, b)?);
            let graph = linkgraph::build_link_graph(g, &s, &b);
            let extensions = if *extensions {
                Some(census::count_extensions(g, &s, &b, true)?)
            } else {
                None
            };
            let result = LinkGraphResult {
                coset_setting: linkgraph::is_coset_setting(g, &s, &b),
                degrees: linkgraph::degree_profile(g, &graph),
                edge_counts: linkgraph::edge_counts(g, &graph),
                components: linkgraph::component_census(&graph),
                mis: graph.to_simple_graph().ok().map(|h| mis::enumerate_mis(&h)),
                extensions,
                graph,
            };
            violation = result.coset_setting
                && !(result.edge_counts.holds
                    && result.degrees.checks.as_ref().is_some_and(|c| c.all_hold()));
            render(&config, result, linkgraph_text, None)?
        }
        Command::Construct { family, .. } => {
            let g = g();
            let family = construct::construct(g, (*family).into())?;
            let verification = construct::verify_family(g, &family, cli.seed);
            violation = !verification.holds();
            let result = ConstructResult {
                family,
                verification,
            };
            render(&config, result, construct_text, None)?
        }
        Command::ConjectureMis { n, mode, graph } => {
            let result = match (graph, n) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)?;
                    let check = mis::check_graph(&SimpleGraph::from_text(&text)?)?;
                    violation = check.counterexample;
                    ConjectureResult::Graph(check)
                }
                (None, Some(n)) => {
                    if let Some(cap) = cli.max_n {
                        anyhow::ensure!(*n <= cap, "n = {n} exceeds --max-n {cap}");
                    }
                    let mode = match mode {
                        Mode::Exhaustive => ScanMode::Exhaustive,
                        Mode::Random => ScanMode::Random,
                    };
                    let scan = mis::conjecture_scan(*n, mode, cli.budget, cli.seed)?;
                    violation = !scan.counterexamples.is_empty();
                    ConjectureResult::Scan(scan)
                }
                (None, None) => anyhow::bail!("either --n or --graph is required"),
            };
            render(&config, result, conjecture_text, None)?
        }
        Command::Gnp { p, trials, .. } => {
            let g = g();
            let samples = census::gnp_experiment(g, *p, *trials, cli.seed)?;
            let mean_ratio = samples.iter().map(|s| s.ratio).sum::<f64>() / samples.len() as f64;
            let result = GnpResult {
                group: g.to_string(),
                mu: g.mu()?,
                p: *p,
                trials: *trials,
                mean_ratio,
                samples,
            };
            render(&config, result, gnp_text, Some(&gnp_csv))?
        }
        Command::VerifyClaims { .. } => {
            let result = census::verify_claims(g())?;
            violation = !result.holds();
            render(&config, result, claims_text, None)?
        }
    };
    Ok(Outcome { body, violation })
}

fn subgroups_text(r: &SubgroupsResult) -> String {
    let mut out = format!("{}: {} subgroups\n", r.group, r.subgroups.len());
    for h in &r.subgroups {
        let _ = writeln!(out, "  order {:>3}: {h:?}", h.len());
    }
    if !r.index2.is_empty() {
        let _ = writeln!(out, "index 2:");
        for h in &r.index2 {
            let _ = writeln!(out, "  2-rank {}: {:?}", h.rank2, h.members);
        }
    }
    out
}

fn census_text(r: &CensusReport) -> String {
    let cell = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
    let mut out = format!(
        "{} (n={}): f={} f*={} f_max={} f*_max={} in {:.3}s\n",
        r.group,
        r.n,
        cell(r.f),
        cell(r.f_star),
        cell(r.f_max),
        cell(r.f_star_max),
        r.seconds
    );
    for w in r.max_witnesses.iter().chain(&r.star_max_witnesses) {
        let _ = writeln!(out, "  {w:?}");
    }
    out
}

fn linkgraph_text(r: &LinkGraphResult) -> String {
    let l = &r.graph;
    let mut out = format!(
        "{} vertices, {} edges ({} type 1), loops at {:?}\n",
        l.vertices.len(),
        l.edges.len(),
        r.edge_counts.e1,
        l.loops.iter().map(|x| x.0).collect::<Vec<_>>()
    );
    for e in &l.edges {
        let _ = writeln!(out, "  {} {} type {}", e.u.0, e.v.0, e.edge_type);
    }
    let comps: Vec<String> = r.components.0.iter().map(|(k, c)| format!("{k} x{c}")).collect();
    let _ = writeln!(out, "components: {}", comps.join(", "));
    if let Some(m) = &r.mis {
        let _ = writeln!(out, "maximal independent sets: {}", m.count);
    }
    if let Some(e) = &r.extensions {
        let _ = writeln!(
            out,
            "maximal extensions: {}",
            e.maximal_extensions.map_or("-".into(), |x| x.to_string())
        );
    }
    if let Some(c) = &r.degrees.checks {
        let _ = writeln!(out, "coset degree checks hold: {}, edge bound holds: {}", c.all_hold(), r.edge_counts.holds);
    }
    out
}

fn construct_text(r: &ConstructResult) -> String {
    let v = &r.verification;
    let mut out = format!(
        "{} {:?}: {} sets (expected {}), all free: {}, {} pairs checked{}, non-conflicting pairs: {}\n",
        r.family.group,
        r.family.kind,
        v.sets,
        v.expected_count,
        v.all_free,
        v.pairs_checked,
        if v.sampled { " (sampled)" } else { "" },
        v.non_conflicting.len()
    );
    for s in r.family.sets.iter().take(32) {
        let _ = writeln!(out, "  {s:?}");
    }
    if r.family.sets.len() > 32 {
        let _ = writeln!(out, "  ... {} more", r.family.sets.len() - 32);
    }
    out
}

fn conjecture_text(r: &ConjectureResult) -> String {
    match r {
        ConjectureResult::Scan(s) => format!(
            "n={} {:?}: {} graphs, max mis {} (bound {}), {} attainers, {} counterexamples{}\n",
            s.n,
            s.mode,
            s.graphs_checked,
            s.max_mis,
            s.bound,
            s.attainer_count,
            s.counterexamples.len(),
            if s.partial { ", stopped by budget" } else { "" }
        ),
        ConjectureResult::Graph(c) => format!(
            "n={} e={}: perfect matching {}, mis {} (bound {}), counterexample {}\n",
            c.n, c.edges, c.has_perfect_matching, c.mis, c.bound, c.counterexample
        ),
    }
}

fn gnp_text(r: &GnpResult) -> String {
    format!(
        "{} p={} over {} trials: mean ratio {:.4} (mu={})\n",
        r.group, r.p, r.trials, r.mean_ratio, r.mu
    )
}

fn gnp_csv(r: &GnpResult) -> String {
    let mut out = String::from("trial,p,seed,sample_size,largest_sumfree_size,ratio\n");
    for s in &r.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.trial,
            s.p,
            s.seed,
            s.subset.len(),
            s.largest_sumfree_size,
            s.ratio
        );
    }
    out
}

fn claims_text(r: &ClaimsReport) -> String {
    let mut out = format!("{} (n={}): {} generators\n", r.group, r.n, r.generators);
    for s in &r.summaries {
        let _ = writeln!(
            out,
            "  {:?}: {} pairs, max common {} (limit {})",
            s.kind, s.pairs, s.max_common, s.limit
        );
    }
    for v in &r.violations {
        let _ = writeln!(
            out,
            "  violation {:?}: S={:?} and S'={:?} share {} sets, e.g. {:?}",
            v.kind, v.first.source, v.second.source, v.common, v.example
        );
    }
    out
}
