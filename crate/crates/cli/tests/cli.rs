use std::path::PathBuf;
use std::process::{Command, Output};

use camspmv::sparse::read_matrix_market;

fn fixture(name: &str) -> String {
    format!("{}/data/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn camspmv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_camspmv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = camspmv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Parses the first CSV table in `text`, skipping `#` lines, into header + records.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .take_while(|l| !l.is_empty())
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column<'a>(t: &'a (Vec<String>, Vec<Vec<String>>), name: &str) -> Vec<&'a str> {
    let i = t.0.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    t.1.iter().map(|r| r[i].as_str()).collect()
}

fn floats(t: &(Vec<String>, Vec<Vec<String>>), name: &str) -> Vec<f64> {
    column(t, name).iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn info_on_identity() {
    let t = table(&ok(&["info", &fixture("identity_3.mtx")]));
    assert_eq!(column(&t, "nnz"), ["3"]);
    assert_eq!(column(&t, "max_nzr"), ["1"]);
    assert_eq!(column(&t, "required_w"), ["2"]);
}

#[test]
fn info_on_generated_matches_generator() {
    let spec = "200x150:0.04:11";
    let m = spec.parse::<camspmv_cli::experiment::GenSpec>().unwrap().generate();
    let t = table(&ok(&["info", "--gen", spec]));
    assert_eq!(column(&t, "nnz"), [m.nnz().to_string()]);
    assert_eq!(column(&t, "n_cols"), ["150"]);
}

#[test]
fn malformed_banner_exits_with_parse_status() {
    let out = camspmv(&["info", &fixture("bad_banner.mtx")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn missing_file_fails() {
    let out = camspmv(&["run", "--matrix", "/nonexistent/x.mtx"]);
    assert!(!out.status.success());
}

#[test]
fn vector_length_mismatch_exits_with_dimension_status() {
    let out = camspmv(&[
        "run",
        "--matrix",
        &fixture("identity_3.mtx"),
        "--vector",
        &fixture("worked_vector.mtx"),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn worked_example_product() {
    let dir = tempfile::tempdir().unwrap();
    let result: PathBuf = dir.path().join("c.mtx");
    let text = ok(&[
        "run",
        "--matrix",
        &fixture("worked_row.mtx"),
        "--vector",
        &fixture("worked_vector.mtx"),
        "--result-out",
        result.to_str().unwrap(),
    ]);
    let t = table(&text);
    assert_eq!(column(&t, "oracle_match"), ["true"]);
    assert_eq!(column(&t, "result_nnz"), ["1"]);
    assert_eq!(column(&t, "flops"), ["8"]);
    let c = read_matrix_market(&result).unwrap();
    assert_eq!(c.get(0, 0), 8624.0);
}

#[test]
fn result_out_needs_single_run() {
    let out = camspmv(&[
        "run",
        "--gen",
        "10x10:0.3:1",
        "--repetitions",
        "2",
        "--result-out",
        "/tmp/never-written.mtx",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn throughput_bounded_by_peak() {
    let t = table(&ok(&[
        "run", "--gen", "300x300:0.1:4", "--gen", "64x2000:0.05:5:int", "--repetitions", "5",
        "--k", "15", "--h", "512",
    ]));
    for g in floats(&t, "gflops") {
        assert!(g > 0.0 && g <= 60.0, "{g}");
    }
    for u in floats(&t, "utilization") {
        assert!(u <= 1.0);
    }
}

#[test]
fn same_seed_gives_identical_output() {
    let args = ["run", "--gen", "120x120:0.08:2", "--seed", "9", "--repetitions", "4"];
    assert_eq!(ok(&args), ok(&args));
    let json = ["bench", "--seed", "3", "--format", "json"];
    assert_eq!(ok(&json), ok(&json));
}

#[test]
fn json_report_shape() {
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["run", "--gen", "20x20:0.2:1", "--format", "json"])).unwrap();
    assert_eq!(v["config"]["k"], "15");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["oracle_match"], true);
}

#[test]
fn dse_default_range_contains_reference_point() {
    let t = table(&ok(&["dse"]));
    assert_eq!(t.1.len(), 100);
    let bw = floats(&t, "bandwidth_gb_s");
    let i = bw.iter().position(|&b| b == 250.0).unwrap();
    assert_eq!(column(&t, "k")[i], "15");
    assert_eq!(floats(&t, "peak_gflops")[i], 60.0);
    let ks: Vec<usize> = column(&t, "k").iter().map(|k| k.parse().unwrap()).collect();
    // Below one element per cycle (16 GB/s at 2 GHz) no module can be fed.
    for ((r, k), b) in floats(&t, "cmos_to_resistive_ratio").iter().zip(&ks).zip(&bw) {
        assert_eq!(*k == 0, *b < 16.0);
        if *k > 0 {
            assert!(*r >= 25.0, "{r} at {b} GB/s");
        }
    }
    assert!(ks.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn dse_single_bandwidth_and_empty_range() {
    let t = table(&ok(&["dse", "--bandwidths", "250"]));
    assert_eq!(t.1.len(), 1);
    assert!(!camspmv(&["dse", "--range", "100:10:5"]).status.success());
}

#[test]
fn bench_on_corpus() {
    let text = ok(&["bench", "--repetitions", "3"]);
    let t = table(&text);
    assert_eq!(t.1.len(), 27);
    assert!(column(&t, "oracle_match").iter().all(|&m| m == "true"));
    let g = floats(&t, "gflops");
    let (lo, hi) = g.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi > 2.0 * lo, "GFLOP/s spread {lo}..{hi}");
    for w in floats(&t, "w_total") {
        assert!(w <= 0.3, "{w} W");
    }
    assert!(text.contains("# summary\nstatistic,gflops,"));
    assert!(text.contains("literature"));
}

#[test]
fn empty_matrix_gives_zero_flops() {
    let t = table(&ok(&["run", "--matrix", &fixture("empty_5.mtx")]));
    assert_eq!(column(&t, "flops"), ["0"]);
    assert_eq!(column(&t, "result_nnz"), ["0"]);
    assert_eq!(floats(&t, "w_total"), [0.0]);
}

#[test]
fn energy_config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e.cfg");
    std::fs::write(&cfg, "# doubled multiply energy\ne_mul = 6e-12\nk=4\n").unwrap();
    let text = ok(&["defaults", "--energy-config", cfg.to_str().unwrap(), "--h", "64"]);
    assert!(text.contains("e_mul=6e-12"));
    assert!(text.contains("k=4\n"));
    assert!(text.contains("h=64\n"));
    std::fs::write(&cfg, "bogus=1\n").unwrap();
    assert_eq!(
        camspmv(&["defaults", "--energy-config", cfg.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn gen_round_trips_through_info() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.mtx");
    ok(&["gen", "50x40:0.1:6", "--out", p.to_str().unwrap()]);
    let a = table(&ok(&["info", p.to_str().unwrap()]));
    let b = table(&ok(&["info", "--gen", "50x40:0.1:6"]));
    assert_eq!(column(&a, "nnz"), column(&b, "nnz"));
}
