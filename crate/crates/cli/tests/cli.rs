use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_epskit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn epskit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SKEWED: &str = "#epskit-v1\na\t0.3\nb\t0.3\nc\t0.3\nd\t0.1\n";
const BINARY: &str = "#epskit-v1\na\t9/10\nb\t1/10\n";

#[test]
fn tables_two_reproduces() {
    let o = run(&["tables", "--which", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| l.ends_with("PASS") || l.ends_with("FAIL"))
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let pick = |r: &Vec<&str>| (r[r.len() - 5].to_string(), r[r.len() - 3].to_string());
    assert_eq!(pick(&rows[0]), ("1.000".into(), "1.000".into()));
    assert_eq!(pick(&rows[1]), ("1.300".into(), "4.000".into()));
    assert_eq!(pick(&rows[2]), ("0.469".into(), "4.000".into()));
    assert_eq!(pick(&rows[3]), ("1.000".into(), "1.000".into()));
    assert!(rows.iter().all(|r| *r.last().unwrap() == "PASS"));
}

#[test]
fn tables_one_reproduces() {
    let o = run(&["tables", "--which", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("4.807"));
    assert_eq!(text.matches("PASS").count(), 3);
}

#[test]
fn analyze_skewed_source() {
    let p = write("skewed.tsv", SKEWED);
    let o = run(&["analyze", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("H(U) [bits]"));
    assert!(text.lines().any(|l| l.starts_with("H(U)") && l.ends_with(": 1.8955")));
    assert!(text.lines().any(|l| l.starts_with("H(X), H(R) >= log|U|") && l.ends_with(": 2.0000")));

    let o = run(&["analyze", "--base", "e", "--precision", "3", s(&p)]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("H(U) [nats]") && l.ends_with(": 1.314")), "{text}");
}

#[test]
fn verify_perturbed_otp_fails() {
    let good = write(
        "otp.tsv",
        "#epskit-v1\n0\t0\t0\t1/4\n0\t1\t1\t1/4\n1\t0\t1\t1/4\n1\t1\t0\t1/4\n",
    );
    let o = run(&["verify", s(&good)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("RESULT\tPASS\n"));

    let bad = write(
        "otp-perturbed.tsv",
        "#epskit-v1\n0\t0\t0\t3/8\n0\t1\t1\t1/8\n1\t0\t1\t1/4\n1\t1\t0\t1/4\n",
    );
    let o = run(&["verify", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("violated: secrecy I(U;X)=0"), "{}", stderr(&o));
    assert!(stdout(&o).contains("CHECK\tsecrecy I(U;X)=0\tP(U,X)\tP(U)P(X)\tFAIL"));
    assert!(stdout(&o).contains("WITNESS\tsecrecy"));
}

#[test]
fn parse_errors_exit_two() {
    let p = write("broken.tsv", "#epskit-v1\na\t1/2\nb\tnope\n");
    let o = run(&["analyze", s(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    assert_eq!(run(&["analyze", "--bogus", s(&p)]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(run(&["tables", "--which", "3"]).status.code(), Some(2));
}

#[test]
fn build_then_verify() {
    let src = write("binary.tsv", BINARY);
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    for scheme in ["otp", "partition", "cep-huffman", "cep-shannon"] {
        let out = dir.join(format!("{scheme}.cipher"));
        let o = run(&["build", "--scheme", scheme, "--out", s(&out), s(&src)]);
        assert_eq!(o.status.code(), Some(0), "{scheme}: {}", stderr(&o));
        assert!(stdout(&o).contains("EPS"));
        let v = run(&["verify", s(&out)]);
        assert_eq!(v.status.code(), Some(0), "{scheme}: {}", stdout(&v));
    }
    let o = run(&["build", "--scheme", "cep-shannon", s(&src)]);
    let text = stdout(&o);
    assert!(text.starts_with("#epskit-v1\n"));
    assert!(text.contains("# I(R;UX) consumption [bits]: 1.3000"));

    let o = run(&["build", "--scheme", "partition", "--theta", "1", s(&src)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let a = run(&["simulate", "--rounds", "20", "--seed", "11"]);
    let b = run(&["simulate", "--rounds", "20", "--seed", "11"]);
    let c = run(&["simulate", "--rounds", "20", "--seed", "12"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("round\tu\tkey\tx\tbits_used\tbits_returned\tpool\n"));
    assert!(text.contains("# decoding errors: 0"));
    assert!(text.contains("# expected bits per round: 3/2"));
}

#[test]
fn sweep_and_frontier_tables() {
    let bin = write("binary2.tsv", BINARY);
    let o = run(&["sweep", "--thetas", "10,20", s(&bin)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "theta,consumption,divergence,h_x\n10,0.4690,0.0000,3.3219\n20,0.4690,0.0000,4.3219\n"
    );
    let sk = write("skewed2.tsv", SKEWED);
    let o = run(&["frontier", s(&sk)]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,consumption,h_x,witness");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("0.0000,2.0000,2.0000,"));
    let again = run(&["frontier", s(&sk)]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn recycle_reports_plan() {
    let target = write("target.tsv", "#epskit-v1\n0\t1/2\n1\t1/2\n");
    let residual = write("residual.tsv", "#epskit-v1\na\t1/4\nb\t3/4\n");
    let o = run(&["recycle", "--target", s(&target), "--residual", s(&residual)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("[CONTEXT residual]"));
    assert!(text.contains("# gain <= residual: yes"));

    let otp = write(
        "otp2.tsv",
        "#epskit-v1\n0\t0\t0\t1/8\n0\t1\t1\t1/8\n0\t2\t2\t1/8\n0\t3\t3\t1/8\n1\t0\t1\t1/8\n1\t1\t2\t1/8\n1\t2\t3\t1/8\n1\t3\t0\t1/8\n",
    );
    let o = run(&["recycle", "--target", s(&target), "--format", "json", s(&otp)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["target_matches"], true);
}

#[test]
fn json_outputs_parse() {
    let p = write("skewed3.tsv", SKEWED);
    for args in [
        vec!["analyze", "--format", "json", s(&p)],
        vec!["tables", "--which", "1", "--format", "json"],
        vec!["build", "--scheme", "otp", "--format", "json", s(&p)],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v.is_object());
    }
}
