use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use reachlabel::bitio::read_label_file;
use reachlabel::oracle::{corrupt_probed_bit, generate, GenSpec, GraphKind};
use reachlabel::{encode, BicliqueProfile, EncodeOptions, LabelSet, SchemeId};
use tempfile::TempDir;

fn rlbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlbl"))
        .args(args)
        .output()
        .expect("spawn rlbl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn chain(dir: &TempDir) -> std::path::PathBuf {
    let p = dir.path().join("chain.txt");
    fs::write(&p, "3 2\n0 1\n1 2\n").unwrap();
    p
}

#[test]
fn warmup_chain_labels_have_equal_length() {
    let dir = TempDir::new().unwrap();
    let input = chain(&dir);
    let out = dir.path().join("chain.rlbl");
    let o = rlbl(&["encode", "--scheme", "warmup", "--input", path_str(&input), "--output", path_str(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f = read_label_file(&mut fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(f.labels.len(), 3);
    assert!(f.labels.iter().all(|l| l.len() == f.labels[0].len()));
}

#[test]
fn query_chain_third() {
    let dir = TempDir::new().unwrap();
    let input = chain(&dir);
    let out = dir.path().join("chain.rlbl");
    let o = rlbl(&["encode", "--scheme", "third", "--input", path_str(&input), "--output", path_str(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for (u, v, want) in [("0", "2", "true"), ("2", "0", "false"), ("1", "1", "true")] {
        let o = rlbl(&["query", path_str(&out), u, v]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), want, "query {u} {v}");
    }
    let o = rlbl(&["query", path_str(&out), "0", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_edge_file_encodes() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("empty.txt");
    fs::write(&input, "4 0\n").unwrap();
    let out = dir.path().join("empty.rlbl");
    for scheme in ["warmup", "third", "average"] {
        let o = rlbl(&["encode", "--scheme", scheme, "--input", path_str(&input), "--output", path_str(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let ls = LabelSet::read_from(&mut fs::File::open(&out).unwrap()).unwrap();
        assert_eq!(ls.n(), 4);
        assert!(!ls.query(0, 1).unwrap());
    }
}

#[test]
fn malformed_input_names_line() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.txt");
    fs::write(&input, "3 2\n0 1\n1 7\n").unwrap();
    let out = dir.path().join("bad.rlbl");
    let o = rlbl(&["encode", "--input", path_str(&input), "--output", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn duplicate_edges_warn() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("dup.txt");
    fs::write(&input, "2 2\n0 1\n0 1\n").unwrap();
    let out = dir.path().join("dup.rlbl");
    let o = rlbl(&["encode", "--input", path_str(&input), "--output", path_str(&out)]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("duplicate edge"), "{}", stderr(&o));
}

#[test]
fn usage_error_exits_two() {
    assert_eq!(rlbl(&["encode", "--scheme", "half"]).status.code(), Some(2));
    assert_eq!(rlbl(&["verify", "--p", "1.5"]).status.code(), Some(2));
}

#[test]
fn verify_generated_instances() {
    let o = rlbl(&["verify", "--trials", "100", "--n", "100", "--n-min", "1", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("instances=100"));
    assert!(s.contains("encodings=300"));
    assert!(s.contains("mismatches=0"));
}

#[test]
fn verify_zero_trials() {
    let o = rlbl(&["verify", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0 instances"));
}

#[test]
fn verify_csv_sorted_by_seed() {
    let o = rlbl(&["verify", "--trials", "5", "--n", "20", "--seed", "3", "--scheme", "third", "--csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let seeds: Vec<u64> = s
        .lines()
        .skip(1)
        .take(5)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(seeds, [3, 4, 5, 6, 7]);
}

#[test]
fn corrupted_fixture_fails_verification() {
    let dir = TempDir::new().unwrap();
    let g = generate(&GenSpec::new(GraphKind::Dag, 30, 0.3, 11));
    let graph = dir.path().join("g.txt");
    let mut text = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        text += &format!("{u} {v}\n");
    }
    fs::write(&graph, text).unwrap();
    let ls = encode(&g, &EncodeOptions::new(SchemeId::Third, BicliqueProfile::Force)).unwrap();
    let (bad, _) = corrupt_probed_bit(&ls, 2).unwrap();
    let good_path = dir.path().join("good.rlbl");
    let bad_path = dir.path().join("bad.rlbl");
    ls.write_to(&mut fs::File::create(&good_path).unwrap()).unwrap();
    bad.write_to(&mut fs::File::create(&bad_path).unwrap()).unwrap();

    let o = rlbl(&["verify", "--input", path_str(&graph), "--labels", path_str(&good_path)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = rlbl(&["verify", "--input", path_str(&graph), "--labels", path_str(&bad_path)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("first_failure="));
}

#[test]
fn stats_warmup_exact_size() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.txt");
    let o = rlbl(&["generate", "--kind", "dag", "--n", "1000", "--p", "0.01", "--output", path_str(&graph)]);
    assert!(o.status.success());
    let o = rlbl(&["stats", "--input", path_str(&graph), "--scheme", "warmup"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let field = |section: &str| -> usize {
        s.lines()
            .find(|l| l.split(',').nth(3) == Some(section))
            .and_then(|l| l.split(',').nth(4))
            .unwrap()
            .parse()
            .unwrap()
    };
    // header, then scc id and index (10 bits each), then 500 table bits
    assert_eq!(field("total"), field("header") + 10 + 10 + 500);
}

#[test]
fn stats_compares_schemes() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.txt");
    rlbl(&["generate", "--kind", "poset", "--n", "200", "--p", "0.5", "--output", path_str(&graph)]);
    let o = rlbl(&["stats", "--input", path_str(&graph), "--scheme", "warmup,third", "--biclique-profile", "force"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains(",warmup,200,total,"));
    assert!(s.contains(",third,200,total,"));
}

#[test]
fn bench_reports_latency() {
    let o = rlbl(&["bench", "--sizes", "50,100", "--queries", "500", "--p", "0.2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.starts_with("scheme,n,encode_ms,query_ns,max_bits,mean_bits\n"));
    assert_eq!(s.lines().filter(|l| l.starts_with("third,")).count(), 2);
    assert!(s.contains("query_latency_flat="));
}

#[test]
fn generate_is_deterministic() {
    let a = rlbl(&["generate", "--n", "30", "--seed", "4"]);
    let b = rlbl(&["generate", "--n", "30", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap_is_honored() {
    let o = Command::new(env!("CARGO_BIN_EXE_rlbl"))
        .args(["verify", "--trials", "3", "--n", "20"])
        .env("RLBL_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_rlbl"))
        .args(["verify", "--trials", "0"])
        .env("RLBL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
