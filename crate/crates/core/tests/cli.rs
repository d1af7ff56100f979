use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SCHEMA: &str = include_str!("../schema/report.schema.json");

fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_quadric-cremona"))
        .args(args)
        .env_remove("QUADRIC_CREMONA_SEED")
        .env_remove("QUADRIC_CREMONA_PRIME_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON value per line"))
        .collect()
}

fn validate_report(text: &str) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let instance: Value = serde_json::from_str(text).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

#[test]
fn verify_default_run() {
    let o = run(["verify", "identities"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let reports = json_lines(&o);
    assert!(reports.len() >= 6);
    let names: Vec<&str> = reports.iter().map(|r| r["identity"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(reports.iter().all(|r| r["holds"] == Value::Bool(true)));
    let inverse = reports.iter().find(|r| r["identity"] == "inverse").unwrap();
    assert_eq!(inverse["computed_exponent"], 56);
    assert_eq!(inverse["paper_exponent"], 42);
}

#[test]
fn verify_generalized_m2() {
    let o = run(["verify", "identities", "--m", "2", "--mode", "modular", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let reports = json_lines(&o);
    let get = |name: &str| {
        reports
            .iter()
            .find(|r| r["identity"] == name)
            .unwrap_or_else(|| panic!("missing {name}"))["computed_exponent"]
            .clone()
    };
    assert_eq!(get("j_identity_generalized_m2"), 25);
    assert_eq!(get("i_identity_generalized_m2"), 16);
}

#[test]
fn verify_output_is_deterministic() {
    let a = run(["verify", "identities", "--seed", "11", "--trials", "3"]);
    let b = run(["verify", "identities", "--seed", "11", "--trials", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_phi_is_a_usage_error() {
    let o = run(["verify", "identities", "--m", "2", "--phi", "1,zz,3"]);
    assert_eq!(o.status.code(), Some(64));
    let o = run(["verify", "identities", "--m", "2", "--phi", "1,2"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(run(["verify", "identities", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(["--prime-bits", "20", "verify", "identities"]).status.code(), Some(64));
    assert_eq!(run(["--help"]).status.code(), Some(0));
}

#[test]
fn help_documents_conventions() {
    let text = stdout(&run(["--help"]));
    assert!(text.contains("binomially normalized"));
    assert!(text.contains("4 x1 T0^3 T1"));
    assert!(text.contains("applies the right-hand map first"));
}

#[test]
fn mult_examples() {
    let point = |form: &str, p: &str| stdout(&run(["mult", "point", "--form", form, "--point", p]));
    assert_eq!(point("f4", "0,0,0,0,1").trim(), "8");
    assert_eq!(point("f4", "1,0,0,0,1").trim(), "0");
    assert_eq!(point("J", "0,0,0,0,1").trim(), "2");
    assert_eq!(point("f4", "q").trim(), "8");
    assert_eq!(point("J", "q").trim(), "2");
    let curve = |form: &str, c: &str| stdout(&run(["mult", "curve", "--form", form, "--curve", c]));
    assert_eq!(curve("f1", "B").trim(), "4");
    assert_eq!(curve("f3", "C").trim(), "4");
    assert_eq!(curve("J", "T").trim(), "2");
}

#[test]
fn mult_parse_errors() {
    let o = run(["mult", "point", "--form", "f4", "--point", "0,0,1"]);
    assert_eq!(o.status.code(), Some(65));
    let o = run(["mult", "point", "--form", "f4", "--point", "a,b,c,d,e"]);
    assert_eq!(o.status.code(), Some(65));
    let o = run(["mult", "curve", "--form", "f1", "--curve", "/nonexistent/curve.txt"]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn mult_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let form = dir.path().join("x0x4.poly");
    std::fs::write(&form, "vars x0 x1 x2 x3 x4\n1/1 1 0 0 0 1\n").unwrap();
    let curve = dir.path().join("t.curve");
    std::fs::write(
        &curve,
        "vars u\n1/1 0\n---\nvars u\n1/1 1\n---\nvars u\n1/1 2\n---\nvars u\n1/1 3\n---\nvars u\n1/1 4\n",
    )
    .unwrap();
    let f = form.to_str().unwrap();
    let o = run(["mult", "point", "--form", f, "--point", "0,0,0,0,1"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = run(["mult", "curve", "--form", "J", "--curve", curve.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "2");

    let bad = dir.path().join("bad.poly");
    std::fs::write(&bad, "vars x0\nnot a term\n").unwrap();
    let o = run(["mult", "point", "--form", bad.to_str().unwrap(), "--point", "1,0,0,0,0"]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn report_json_matches_schema() {
    let o = run(["report", "--t", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    validate_report(&text);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], "Fano inequalities violated at d = 13");
    assert_eq!(v["point_threshold"], "26/3");
}

#[test]
fn report_to_file_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(["report", "--t", "7/3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    validate_report(&std::fs::read_to_string(Path::new(&out)).unwrap());

    let text = stdout(&run(["report", "--format", "text"]));
    assert!(text.contains("verdict: Fano inequalities violated at d = 13"));
}

#[test]
fn report_rejects_degenerate_member() {
    assert_eq!(run(["report", "--t", "0"]).status.code(), Some(64));
}

#[test]
fn seed_from_environment() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_quadric-cremona"))
        .args(["report"])
        .env("QUADRIC_CREMONA_SEED", "5")
        .output()
        .unwrap();
    let with_flag = run(["report", "--seed", "5"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
    let v: Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(v["seed"], 5);
}

#[test]
fn generalized_subcommand_writes_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let coords = dir.path().join("g.poly");
    let o = run([
        "generalized",
        "--m",
        "1",
        "--phi",
        "1,0",
        "--coords",
        coords.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let reports = json_lines(&o);
    let j = reports.iter().find(|r| r["identity"] == "j_identity").unwrap();
    assert_eq!(j["computed_exponent"], 13);
    let text = std::fs::read_to_string(&coords).unwrap();
    assert_eq!(text.matches("---").count(), 4);
}
