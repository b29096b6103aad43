use std::path::Path;
use std::process::{Command, Output};

use qplexkit::io;
use qplexkit::linalg::max_abs_diff;
use qplexkit::operator::{random_density, random_povm};

fn qplexkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplexkit")).args(args).output().expect("binary runs")
}

fn qplexkit_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplexkit")).args(args).env(key, value).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const MIXED: &str = r#"{"d":2,"re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]}"#;

#[test]
fn maximally_mixed_qubit_is_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "mixed.json", MIXED);
    let o = qplexkit(&["rep", "to-prob", "--state", &s]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.25,0.25,0.25,0.25\n");
}

#[test]
fn usage_errors_exit_2() {
    let o = qplexkit(&["rep", "to-prob", "--state", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cannot read") && err.contains("usage:"), "{err}");
    assert_eq!(qplexkit(&["rep", "to-prob", "--bogus"]).status.code(), Some(2));
    assert_eq!(qplexkit(&["sic", "find", "--d", "1"]).status.code(), Some(2));
    assert_eq!(qplexkit(&["qplex", "check"]).status.code(), Some(2));
    assert_eq!(qplexkit_env(&["rep", "to-prob", "--state", "x"], "QPLEXKIT_THREADS", "0").status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "mixed.json", MIXED);
    let bad_out = dir.path().join("missing-dir").join("p.csv");
    let o = qplexkit(&["rep", "to-prob", "--state", &s, "--out", bad_out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn findings_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", "0.9,0.1,0,0\n");
    assert_eq!(qplexkit(&["rep", "to-state", "--prob", &p]).status.code(), Some(1));
    // two vertices of the simplex have dot product 0 < 1/6
    let pts = write(dir.path(), "pts.csv", "1,0,0,0\n0,1,0,0\n0.25,0.25,0.25,0.25\n");
    let o = qplexkit(&["qplex", "check", "--points", &pts]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["violation_count"].as_u64().unwrap() >= 1);
    let same = write(dir.path(), "a.json", r#"{"d":2,"re":[1,0],"im":[0,0]}"#);
    let mixed = write(dir.path(), "m.json", MIXED);
    // a pure state and the maximally mixed state are fine; a broken SIC file is a finding for verify
    assert_eq!(qplexkit(&["overlap", "check", "--state-a", &same, "--state-b", &mixed]).status.code(), Some(0));
    let not_sic = write(dir.path(), "f.json", r#"{"d":2,"fiducial":{"re":[1,0],"im":[0,0]}}"#);
    assert_eq!(qplexkit(&["sic", "verify", &not_sic]).status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "mixed.json", MIXED);
    // one basis cannot span the qubit Hermitian space
    let o = qplexkit(&["gleason", "fit", "--state", &s, "--bases", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_is_reproducible() {
    let cases: [&[&str]; 3] = [
        &["qplex", "check", "--d", "3", "--samples", "300", "--seed", "5"],
        &["gleason", "hemisphere", "--pole", "0.6,0,-0.8", "--bases", "100", "--seed", "2"],
        &["report", "acceptance", "--only", "1,3,10", "--format", "csv"],
    ];
    for args in cases {
        let first = qplexkit(args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        let again = qplexkit(args);
        let mut seq = args.to_vec();
        seq.push("--sequential");
        let sequential = qplexkit(&seq);
        let one_thread = qplexkit_env(args, "QPLEXKIT_THREADS", "1");
        assert_eq!(first.stdout, again.stdout);
        assert_eq!(first.stdout, sequential.stdout);
        assert_eq!(first.stdout, one_thread.stdout);
    }
}

#[test]
fn seeds_are_printed() {
    let o = qplexkit(&["qplex", "check", "--d", "2", "--samples", "50", "--seed", "17"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 17);
    let o = qplexkit(&["report", "acceptance", "--only", "10", "--format", "csv", "--seed", "4"]);
    assert!(stdout(&o).starts_with("# seed=4\n"));
}

#[test]
fn sic_find_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("fid.json");
    let f = f.to_str().unwrap();
    let o = qplexkit(&["sic", "find", "--d", "3", "--restarts", "4", "--seed", "0", "--out", f, "--effects"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["seed"], 0);
    assert!(report["report"]["achieved_equiangularity_deviation"].as_f64().unwrap() < 1e-12);

    let text = std::fs::read_to_string(f).unwrap();
    let sic = io::read_sic(&text).unwrap();
    assert_eq!(io::write_sic(&sic, true).unwrap(), text);

    let v = qplexkit(&["sic", "verify", f]);
    assert_eq!(v.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(v["equiangular"], true);
}

#[test]
fn state_probability_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for d in 2..=4 {
        let rho = random_density(d, 40 + d as u64);
        let s = write(dir.path(), "rho.json", &io::write_density(&rho));
        let p = dir.path().join("p.csv");
        let p = p.to_str().unwrap();
        assert_eq!(qplexkit(&["rep", "to-prob", "--state", &s, "--out", p]).status.code(), Some(0));
        let back = qplexkit(&["rep", "to-state", "--prob", p]);
        assert_eq!(back.status.code(), Some(0));
        let back = io::read_density(&stdout(&back)).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-10);
        // written CSV parses back to the same vector
        let text = std::fs::read_to_string(p).unwrap();
        assert_eq!(io::write_prob_vector(&io::read_prob_vector(&text).unwrap()), text);
    }
}

#[test]
fn urgleichung_matches_mu() {
    let dir = tempfile::tempdir().unwrap();
    let rho = random_density(3, 9);
    let povm = random_povm(3, 5, 10);
    let s = write(dir.path(), "rho.json", &io::write_density(&rho));
    let m = write(dir.path(), "povm.json", &io::write_povm(&povm));
    let p = dir.path().join("p.csv").to_str().unwrap().to_string();
    let c = dir.path().join("c.csv").to_str().unwrap().to_string();
    assert_eq!(qplexkit(&["rep", "to-prob", "--state", &s, "--out", &p]).status.code(), Some(0));
    assert_eq!(qplexkit(&["rep", "cond", "--povm", &m, "--out", &c]).status.code(), Some(0));
    let text = std::fs::read_to_string(&c).unwrap();
    assert_eq!(io::write_cond_matrix(&io::read_cond_matrix(&text).unwrap()), text);

    let q = qplexkit(&["born", "urgleichung", "--prob", &p, "--cond", &c]);
    let mu = qplexkit(&["born", "mu", "--prob", &p, "--povm", &m]);
    assert_eq!(q.status.code(), Some(0));
    assert_eq!(mu.status.code(), Some(0));
    let q = io::read_prob_vector(&stdout(&q)).unwrap();
    let mu = io::read_prob_vector(&stdout(&mu)).unwrap();
    for ((a, b), e) in q.values().iter().zip(mu.values()).zip(povm.matrices()) {
        let born = qplexkit::linalg::trace_product(rho.matrix(), e).re;
        assert!((a - born).abs() < 1e-10 && (b - born).abs() < 1e-10);
    }
}

#[test]
fn full_acceptance_report_passes() {
    let o = qplexkit(&["report", "acceptance", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 10);
}
