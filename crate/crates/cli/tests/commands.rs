use std::process::{Command, Output};

use sumfree::census::{CensusReport, ClaimsReport};
use sumfree::mis::{bridge_triangles, isomorphic_small, matching, SimpleGraph};
use sumfree::schur::{is_distinct_sumfree, is_maximal_distinct_sumfree};
use sumfree::{AbelianGroup, GroupSubset};
use sumfree_cli::{
    ClassifyResult, ConjectureResult, ConstructResult, GnpResult, LinkGraphResult, Report,
};

fn sumfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumfree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classify_prints_type_and_mu() {
    let o = sumfree(&["classify", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "TypeI(2), mu=5\n");

    let o = sumfree(&["classify", "3,3", "--format", "json"]);
    let r: Report<ClassifyResult> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.result.mu, 3);
    assert_eq!(r.config.seed, sumfree::seed::DEFAULT_SEED);
}

#[test]
fn census_json_round_trips_and_matches_filter() {
    let o = sumfree(&["census", "6", "--distinct", "--maximal"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report<CensusReport> = serde_json::from_str(&stdout(&o)).unwrap();
    let g = AbelianGroup::new(&[6]).unwrap();
    let naive = (0u64..1 << 6)
        .map(|m| GroupSubset::from_mask(6, m))
        .filter(|s| is_distinct_sumfree(&g, s) && is_maximal_distinct_sumfree(&g, s).unwrap())
        .count() as u64;
    assert_eq!(r.result.f_star_max, Some(naive));
    assert_eq!(r.result.f_max, None);
    let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(again, stdout(&o));
}

#[test]
fn census_csv_has_the_documented_columns() {
    let o = sumfree(&["census", "2,2,2", "--both", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("group,f,f_star,f_max,f_star_max,seconds"));
    let row = lines.next().unwrap();
    let rest = row.strip_prefix("\"2,2,2\",").expect("quoted group spec");
    let cells: Vec<&str> = rest.split(',').collect();
    assert_eq!(cells.len(), 5);
    // Maximal counts agree for the elementary abelian 2-group of order 8.
    assert_eq!(cells[2], cells[3]);
}

#[test]
fn conjecture_scan_reports_the_two_extremal_graphs() {
    let o = sumfree(&["conjecture-mis", "--n", "6", "--mode", "exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report<ConjectureResult> = serde_json::from_str(&stdout(&o)).unwrap();
    let ConjectureResult::Scan(scan) = r.result else {
        panic!("expected a scan report");
    };
    assert_eq!(scan.max_mis, 8);
    assert!(scan.counterexamples.is_empty());
    let attainers: Vec<SimpleGraph> = scan
        .attainers
        .iter()
        .map(|e| SimpleGraph::from_edges(6, e).unwrap())
        .collect();
    for target in [matching(3).unwrap(), bridge_triangles()] {
        assert!(attainers.iter().any(|a| isomorphic_small(a, &target).unwrap()));
    }
}

#[test]
fn conjecture_checks_a_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, bridge_triangles().to_text()).unwrap();
    let o = sumfree(&["conjecture-mis", "--graph", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report<ConjectureResult> = serde_json::from_str(&stdout(&o)).unwrap();
    let ConjectureResult::Graph(check) = r.result else {
        panic!("expected a graph check");
    };
    assert!(check.has_perfect_matching);
    assert_eq!(check.mis, 8);

    std::fs::write(&path, "3 1\n0 q\n").unwrap();
    let o = sumfree(&["conjecture-mis", "--graph", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn linkgraph_reproduces_the_prism() {
    let o = sumfree(&["linkgraph", "9", "3", "1,2,4,5,7,8"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report<LinkGraphResult> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.result.graph.edges.len(), 9);
    assert_eq!(r.result.mis.unwrap().count, 6);
    assert_eq!(r.result.components.total(), 1);

    let o = sumfree(&["linkgraph", "8", "0,4", "1,3,5,7", "--extensions"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report<LinkGraphResult> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.result.coset_setting);
    assert!(r.result.extensions.unwrap().maximal_extensions.unwrap() <= r.result.mis.unwrap().count);

    let o = sumfree(&["linkgraph", "8", "0, 9", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sumfree(&["linkgraph", "8", "0,,1", "1"]);
    assert!(stderr(&o).contains("column 3"), "{}", stderr(&o));
}

#[test]
fn construct_reports_a_verified_family() {
    let o = sumfree(&["construct", "5,5", "z5-power"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report<ConstructResult> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.result.family.sets.len(), 9);
    assert!(r.result.verification.holds());

    let o = sumfree(&["construct", "6", "z5-power"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gnp_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for workers in ["1", "4", "1"] {
        let path = dir.path().join(format!("gnp{}.json", bodies.len()));
        let args = [
            "gnp", "5,5", "--p", "0.5", "--trials", "40", "--seed", "42", "--workers", workers,
            "--out", path.to_str().unwrap(),
        ];
        let o = sumfree(&args);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        let body = std::fs::read_to_string(&path).unwrap();
        let r: Report<GnpResult> = serde_json::from_str(&body).unwrap();
        bodies.push(serde_json::to_string(&r.result).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[1], bodies[2]);

    let o = sumfree(&["gnp", "3,3", "--p", "1", "--trials", "2"]);
    let r: Report<GnpResult> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.result.samples.iter().all(|s| s.ratio == 1.0));
}

#[test]
fn claim_violations_exit_with_one() {
    let o = sumfree(&["verify-claims", "2,4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report<ClaimsReport> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.result.holds());

    // The four-element Klein group is below the size the overlap argument needs.
    let o = sumfree(&["verify-claims", "2,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["classify", "1,2"][..],
        &["classify", "4,,2"],
        &["census", "40"],
        &["census", "12", "--max-n", "10"],
        &["verify-claims", "9"],
        &["mu"],
        &["subgroups", "6", "--format", "csv"],
    ] {
        let o = sumfree(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}
