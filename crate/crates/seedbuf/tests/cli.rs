use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn seedbuf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seedbuf")).args(args).output().expect("spawn seedbuf")
}

fn ok(args: &[&str]) -> String {
    let out = seedbuf(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Trace {
    rows: Vec<[u64; 5]>,
    footer: Vec<(String, String)>,
}

impl Trace {
    fn parse(text: &str) -> Trace {
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("stage,natural_count,seeded_count,cumulative_active,buffer_credit"));
        let mut rows = Vec::new();
        let mut footer = Vec::new();
        for line in lines {
            if let Some(kv) = line.strip_prefix("# ") {
                let (k, v) = kv.split_once('=').unwrap();
                footer.push((k.to_owned(), v.to_owned()));
            } else {
                let v: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
                rows.push(v.try_into().unwrap());
            }
        }
        Trace { rows, footer }
    }

    fn get(&self, key: &str) -> &str {
        &self.footer.iter().find(|(k, _)| k == key).unwrap().1
    }
}

fn ba_file(dir: &TempDir, n: &str, seed: &str) -> PathBuf {
    let path = dir.path().join(format!("ba{n}_{seed}.txt"));
    ok(&["generate", "ba", "--n", n, "--m", "2", "--power", "0.5", "--seed", seed, "--out", p(&path)]);
    path
}

#[test]
fn generate_ba_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ba.txt");
    ok(&["generate", "ba", "--n", "10000", "--m", "2", "--seed", "7", "--out", p(&path)]);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 19_997);
    let meta = fs::read_to_string(dir.path().join("ba.txt.meta")).unwrap();
    for line in ["model=ba", "n=10000", "m=2", "seed=7", "nodes=10000", "edges=19997"] {
        assert!(meta.lines().any(|l| l == line), "missing {line} in\n{meta}");
    }
}

#[test]
fn generate_ws_ring_lattice() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ws.txt");
    ok(&["generate", "ws", "--n", "10", "--nei", "2", "--p", "0", "--out", p(&path)]);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 20);
    let mut degree = [0; 10];
    for line in text.lines() {
        for tok in line.split_whitespace() {
            degree[tok.parse::<usize>().unwrap()] += 1;
        }
    }
    assert!(degree.iter().all(|&d| d == 4));
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for out in [&a, &b] {
        ok(&["generate", "ws", "--n", "500", "--nei", "3", "--p", "0.2", "--seed", "11", "--out", p(out)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = dir.path().join("c.txt");
    ok(&["generate", "ws", "--n", "500", "--nei", "3", "--p", "0.2", "--seed", "12", "--out", p(&c)]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn sequential_trace_without_contagion() {
    let dir = TempDir::new().unwrap();
    let net = ba_file(&dir, "50", "1");
    let text = ok(&["simulate", "--network", p(&net), "--strategy", "D", "--mode", "OPS_Sq", "--pp", "0", "--budget", "3"]);
    let t = Trace::parse(&text);
    assert_eq!(t.rows.len(), 3);
    assert!(t.rows.iter().all(|r| r[1] == 0 && r[2] == 1));
    assert_eq!(t.get("coverage_total"), "0.06");
    assert_eq!(t.get("coverage_natural"), "0");
}

#[test]
fn single_stage_trace_seeds_up_front() {
    let dir = TempDir::new().unwrap();
    let net = ba_file(&dir, "400", "2");
    let text = ok(&["simulate", "--network", p(&net), "--strategy", "PR", "--mode", "SS", "--pp", "0.15", "--sp", "0.05", "--seed", "3"]);
    let t = Trace::parse(&text);
    assert_eq!(t.rows[0][2], 20);
    assert!(t.rows[1..].iter().all(|r| r[2] == 0));
}

#[test]
fn trace_cumulative_matches_coverage() {
    let dir = TempDir::new().unwrap();
    let net = ba_file(&dir, "300", "3");
    for mode in ["SS", "OPS_Sq", "OPS_RSq", "OPS_BSq"] {
        for seed in ["1", "2", "3"] {
            let out = dir.path().join("trace.csv");
            ok(&["simulate", "--network", p(&net), "--strategy", "D2", "--mode", mode, "--pp", "0.1", "--sp", "0.03", "--seed", seed, "--out", p(&out)]);
            let t = Trace::parse(&fs::read_to_string(&out).unwrap());
            let cum: Vec<u64> = t.rows.iter().map(|r| r[3]).collect();
            assert!(cum.windows(2).all(|w| w[0] <= w[1]));
            let coverage: f64 = t.get("coverage_total").parse().unwrap();
            assert_eq!(*cum.last().unwrap() as f64 / 300.0, coverage);
            let duration: usize = t.get("duration").parse().unwrap();
            assert_eq!(t.rows.len(), duration + 1);
        }
    }
}

#[test]
fn buffered_credit_column() {
    let dir = TempDir::new().unwrap();
    let mut injections = 0;
    for seed in 0..25 {
        let net = ba_file(&dir, "200", &seed.to_string());
        let text = ok(&["simulate", "--network", p(&net), "--strategy", "D", "--mode", "OPS_BSq", "--pp", "0.2", "--sp", "0.05", "--seed", &seed.to_string()]);
        let t = Trace::parse(&text);
        let budget = 10;
        let mut seeded = 0;
        let mut prev = 0;
        for r in &t.rows {
            let [_, natural, seed_count, _, credit] = *r;
            seeded += seed_count;
            if seed_count > 0 {
                assert_eq!(natural, 0);
                assert_eq!(credit, 0);
                injections += 1;
            } else if natural > 0 {
                assert_eq!(credit, (prev + 1).min(budget - seeded), "{text}");
            }
            prev = credit;
        }
        assert_eq!(seeded, budget);
    }
    assert!(injections > 25);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let net = ba_file(&dir, "300", "4");
    let args = ["simulate", "--network", p(&net), "--strategy", "R", "--mode", "OPS_RSq", "--pp", "0.1", "--sp", "0.05", "--seed", "9"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn rank_lists_every_node_with_file_labels() {
    let dir = TempDir::new().unwrap();
    let net = dir.path().join("star.csv");
    fs::write(&net, "# one-based star\n1,2\n1,3\n1,4\n4,5\n").unwrap();
    let text = ok(&["rank", "--network", p(&net), "--delimiter", ",", "--index-base", "1", "--strategy", "D"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "node_id,strategy,score,rank");
    assert_eq!(lines[1], "1,D,3.0,1");
    assert_eq!(lines[2], "4,D,2.0,2");
    assert_eq!(lines.len(), 6);
    let random = ok(&["rank", "--network", p(&net), "--delimiter", ",", "--strategy", "R", "--seed", "4"]);
    assert!(random.lines().skip(1).all(|l| l.contains(",R,,")));
}

const CONFIG: &str = r#"{
    "networks": [
        {"name": "ws", "source": "ws", "n": 200, "nei": 2, "rewire_p": 0.1, "seed": 1},
        {"name": "file", "source": "file", "path": "net.txt"}
    ],
    "strategies": ["D", "CC", "R"],
    "modes": ["OPS_Sq", "OPS_BSq"],
    "pp_values": [0.05, 0.15],
    "sp_values": [0.05],
    "replications": 4,
    "master_seed": 5
}"#;

fn grid_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    ok(&["generate", "ba", "--n", "150", "--m", "2", "--seed", "3", "--out", p(&dir.path().join("net.txt"))]);
    fs::write(dir.path().join("grid.json"), CONFIG).unwrap();
    dir
}

#[test]
fn grid_cardinality_and_worker_independence() {
    let dir = grid_dir();
    let cfg = dir.path().join("grid.json");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(&["grid", "--config", p(&cfg), "--out", p(&a), "--threads", "1"]);
    ok(&["grid", "--config", p(&cfg), "--out", p(&b), "--threads", "3"]);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2 * 2 * 4);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn report_series_cover_every_record() {
    let dir = grid_dir();
    let records = dir.path().join("records.csv");
    ok(&["grid", "--config", p(&dir.path().join("grid.json")), "--out", p(&records)]);
    let scatter = dir.path().join("scatter.csv");
    let durations = dir.path().join("durations.csv");
    let summary = ok(&["report", "--records", p(&records), "--group-by", "network,mode", "--scatter", p(&scatter), "--durations", p(&durations)]);
    assert_eq!(summary.lines().count(), 1 + 2 * 2);
    let n = fs::read_to_string(&records).unwrap().lines().count();
    let s = fs::read_to_string(&scatter).unwrap();
    assert!(s.starts_with("coverage_ref,duration_ref,mode\n"));
    assert_eq!(s.lines().count(), n);
    let d = fs::read_to_string(&durations).unwrap();
    assert!(d.starts_with("mode,duration_ss,duration_seq,duration_ref\n"));
    assert_eq!(d.lines().count(), n);
}

const FIXTURE: &str = "\
network,strategy,mode,pp,sp,replication,node_count,budget,coverage_ss,coverage_seq,natural_ss,natural_seq,duration_ss,duration_seq,coverage_ref,duration_ref,seeds_saved
n1,D,OPS_Sq,0.1,0.05,0,100,5,0.25,0.5,0.2,0.45,4,8,1.0,1.0,0.5
n1,D,OPS_Sq,0.1,0.05,1,100,5,0.5,0.625,0.45,0.575,5,5,0.25,0.0,0.25
n1,D,OPS_BSq,0.1,0.05,0,100,5,0.5,0.5,0.45,0.45,0,3,0.0,,0.0
";

fn column(csv: &str, row: usize, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let line = lines.nth(row).unwrap();
    let i = header.iter().position(|h| *h == name).unwrap();
    line.split(',').nth(i).unwrap().to_owned()
}

#[test]
fn report_fixture_aggregates() {
    let dir = TempDir::new().unwrap();
    let records = dir.path().join("fixture.csv");
    fs::write(&records, FIXTURE).unwrap();
    let out = ok(&["report", "--records", p(&records), "--group-by", "mode"]);
    assert_eq!(out.lines().count(), 3);
    let f = |row, name| column(&out, row, name);
    assert_eq!(f(0, "mode"), "OPS_Sq");
    assert_eq!(f(0, "network"), "");
    assert_eq!(f(0, "records"), "2");
    assert_eq!(f(0, "mean_coverage_ss"), "0.375");
    assert_eq!(f(0, "mean_coverage_seq"), "0.5625");
    assert_eq!(f(0, "mean_duration_ss"), "4.5");
    assert_eq!(f(0, "mean_duration_seq"), "6.5");
    assert_eq!(f(0, "mean_coverage_ref"), "0.625");
    assert_eq!(f(0, "median_coverage_ref"), "0.625");
    assert_eq!(f(0, "mean_duration_ref"), "0.5");
    assert_eq!(f(0, "win_fraction"), "1.0");
    assert_eq!(f(0, "mean_seeds_saved"), "0.375");
    assert_eq!(f(0, "wilcoxon_p"), "");
    assert_eq!(f(1, "mode"), "OPS_BSq");
    assert_eq!(f(1, "duration_undefined"), "1");
    assert_eq!(f(1, "mean_duration_ref"), "");
    assert_eq!(f(1, "win_fraction"), "0.0");

    let natural = ok(&["report", "--records", p(&records), "--basis", "natural"]);
    assert_eq!(natural.lines().count(), 2);
    assert_eq!(column(&natural, 0, "records"), "3");
}

#[test]
fn report_schema_mismatch_names_row() {
    let dir = TempDir::new().unwrap();
    let records = dir.path().join("bad.csv");
    fs::write(&records, FIXTURE.replace("n1,D,OPS_BSq,0.1", "n1,D,OPS_BSq,oops")).unwrap();
    let out = seedbuf(&["report", "--records", p(&records)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 3"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    let out = seedbuf(&["rank", "--network", p(&missing), "--strategy", "D"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(seedbuf(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(seedbuf(&["generate", "ba", "--n", "3", "--m", "5", "--out", p(&dir.path().join("x"))]).status.code(), Some(1));
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"networks\": []}").unwrap();
    assert_eq!(seedbuf(&["grid", "--config", p(&cfg), "--out", p(&dir.path().join("o.csv"))]).status.code(), Some(1));
    let unwritable = dir.path().join("no/such/dir/out.txt");
    let out = seedbuf(&["generate", "ws", "--n", "10", "--nei", "2", "--p", "0", "--out", p(&unwritable)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(seedbuf(&["--help"]).status.code(), Some(0));
}
