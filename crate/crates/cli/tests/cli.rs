use std::path::PathBuf;
use std::process::{Command, Output};

use dirac_cad::linalg::rational::{parse_rational, ratio, Rational};
use dirac_cad::linalg::Matrix;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-cad"))
}

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirac-cad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn matrix(v: &Value) -> Matrix {
    let rows: Vec<Vec<Rational>> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| parse_rational(x.as_str().unwrap()).unwrap()).collect())
        .collect();
    Matrix::from_rows(rows[0].len(), &rows)
}

const TWO_INDUCTORS: &str = r#"{"nodes": ["a", "b"], "branches": [
    {"name": "L1", "from": "a", "to": "b", "L": "1"},
    {"name": "L2", "from": "b", "to": "a", "L": "2"}]}"#;

const NEGATIVE_C: &str = r#"{"nodes": ["a", "b"], "branches": [
    {"name": "L", "from": "a", "to": "b", "L": "1"},
    {"name": "C", "from": "a", "to": "b", "C": "1"},
    {"name": "Cn", "from": "a", "to": "b", "C": "-1"}]}"#;

const SHORTED: &str = r#"{"nodes": ["a", "b"], "branches": [
    {"name": "L", "from": "a", "to": "b", "L": "1"},
    {"name": "C", "from": "b", "to": "a", "C": "2"},
    {"name": "W1", "from": "a", "to": "b"},
    {"name": "W2", "from": "b", "to": "a"}]}"#;

#[test]
fn analyze_four_branch_fixture() {
    let f = fixture("figure1.json");
    let out = run(&["analyze", "--input", &f]);
    let r = json(&out);
    assert_eq!(r["chain_dims"], serde_json::json!([12, 6, 5, 4]));
    assert_eq!(r["stop_index"], 3);
    assert_eq!(r["fiber_dim"], 0);
    assert_eq!(r["leaf_symplectic"], true);
    assert_eq!(r["classification"]["all_second_class"], true);
    assert_eq!(r["classification"]["two_s"], 14);
    assert_eq!(r["classification"]["s_prime"], 6);
    // q_C1/C1 = q_C3/C3 with C1 = 2, C3 = 1/3
    let m2 = &r["chain"][2]["new_equations"];
    assert_eq!(m2.as_array().unwrap().len(), 1);
    assert_eq!(m2[0]["text"], "-1/6 q_C1 + q_C3 = 0");
    assert_eq!(r["delta_chain"].as_array().unwrap().len(), 3);
    assert_eq!(r["loop_classes"]["summary"]["purely_capacitive_count"], 1);
    // byte-identical output, also through --output
    let again = run(&["analyze", "--input", &f]);
    assert_eq!(out.stdout, again.stdout);
    let path = std::env::temp_dir().join(format!("dirac-cad-analyze-{}.json", std::process::id()));
    let wrote = run(&["analyze", "--input", &f, "--output", path.to_str().unwrap()]);
    assert!(wrote.status.success() && wrote.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn analyze_stop_indices() {
    let two = scratch("two.json", TWO_INDUCTORS);
    assert_eq!(json(&run(&["analyze", "--input", two.to_str().unwrap()]))["stop_index"], 1);
    let neg = scratch("neg.json", NEGATIVE_C);
    let neg = neg.to_str().unwrap();
    let r = json(&run(&["analyze", "--input", neg, "--mode", "general"]));
    assert_eq!(r["stop_index"], 5);
    let physical = run(&["analyze", "--input", neg]);
    assert_eq!(physical.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&physical.stderr).contains("general mode"));
}

#[test]
fn bracket_reproduces_the_first_row_of_a() {
    let f = fixture("figure1.json");
    let out = run(&["bracket", "--input", &f, "--preset", "paper-fig1"]);
    let r = json(&out);
    let sigma = matrix(&r["sigma"]);
    let inv = matrix(&r["sigma_inverse"]);
    assert_eq!(sigma.mul(&inv), Matrix::identity(14));
    let t = matrix(&r["dirac_bracket"]);
    let coords: Vec<&str> = r["coordinates"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(&coords[..9], ["q_L", "q_C1", "q_C2", "q_C3", "v_L", "v_C1", "v_C2", "v_C3", "p_L"]);
    // L = 3/2, C1 = 2, C3 = 1/3: (1/L, C1/((C1+C3)L), 1/L, C3/((C1+C3)L), 1)
    let expected = [ratio(2, 3), ratio(4, 7), ratio(2, 3), ratio(2, 21), ratio(1, 1)];
    assert_eq!(&t.row(0)[4..9], &expected);
    assert_eq!(run(&["bracket", "--input", &f, "--preset", "paper-fig1"]).stdout, out.stdout);
    // the ordering changes Σ but not the Dirac bracket
    let g = json(&run(&["bracket", "--input", &f]));
    assert_eq!(matrix(&g["dirac_bracket"]), t);
}

#[test]
fn bracket_reports_first_class_directions() {
    let wires = scratch(
        "wires.json",
        r#"{"nodes": ["a", "b"], "branches": [
            {"name": "w1", "from": "a", "to": "b"},
            {"name": "w2", "from": "b", "to": "a"}]}"#,
    );
    let out = run(&["bracket", "--input", wires.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("first class directions") && err.contains("nu[w1] + nu[w2]"), "{err}");
}

fn csv(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn simulate_unit_oscillator() {
    let f = fixture("figure1_unit.json");
    let (header, rows) = csv(&run(&["simulate", "--input", &f, "--dt", "1/1000", "--steps", "20000"]));
    assert_eq!(&header[..4], ["t", "q_L", "p_L", "energy"]);
    assert_eq!(rows.len(), 20001);
    let up: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[0][1] < 0.0 && w[1][1] >= 0.0)
        .map(|w| w[0][0] + 1e-3 * (-w[0][1]) / (w[1][1] - w[0][1]))
        .collect();
    let period = (up[up.len() - 1] - up[0]) / (up.len() - 1) as f64;
    let omega2 = (2.0 * std::f64::consts::PI / period).powi(2);
    assert!((omega2 - 1.5).abs() < 1e-6, "{omega2}");
    assert!(rows.iter().all(|r| r[3].abs() < 1e-9));
}

#[test]
fn simulate_zero_state_is_an_equilibrium() {
    let f = fixture("figure1.json");
    let zeros = ["0"; 12].join(",");
    for target in ["reduced", "full"] {
        let (_, rows) = csv(&run(&["simulate", "--input", &f, "--x0", &zeros, "--target", target, "--steps", "50"]));
        assert!(rows.iter().all(|r| r[1..].iter().all(|x| *x == 0.0)));
    }
}

#[test]
fn simulate_gauge_drift_stays_on_the_empty_loop() {
    let p = scratch("shorted.json", SHORTED);
    let p = p.to_str().unwrap();
    let base = ["simulate", "--input", p, "--target", "full", "--dt", "0.01", "--steps", "200"];
    let (header, free) = csv(&run(&base));
    let mut pushed_args = base.to_vec();
    pushed_args.extend(["--lambda", "1"]);
    let (_, pushed) = csv(&run(&pushed_args));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let loop_cols = [col("q_W1"), col("q_W2"), col("v_W1"), col("v_W2")];
    let mut moved = 0.0f64;
    for (a, b) in free.iter().zip(&pushed) {
        for j in 1..col("energy") {
            let d = b[j] - a[j];
            if !loop_cols.contains(&j) {
                assert!(d.abs() < 1e-12, "{} moved by {d}", header[j]);
            }
        }
        // the empty loop carries the same charge and current in both wires
        assert!((b[col("q_W1")] - a[col("q_W1")] - (b[col("q_W2")] - a[col("q_W2")])).abs() < 1e-12);
        assert!((b[col("v_W1")] - a[col("v_W1")] - (b[col("v_W2")] - a[col("v_W2")])).abs() < 1e-12);
        moved = moved.max((b[col("v_W1")] - a[col("v_W1")]).abs());
    }
    assert!(moved > 0.5);
    let reduced = run(&["simulate", "--input", p]);
    assert_eq!(reduced.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&reduced.stderr).contains("empty loops"));
}

#[test]
fn simulate_json_summary_and_validation() {
    let f = fixture("figure1.json");
    let r = json(&run(&["simulate", "--input", &f, "--target", "full", "--format", "json", "--steps", "100"]));
    assert_eq!(r["steps"], 100);
    assert!(r["report"]["max_leaf_residual"].as_f64().unwrap() < 1e-9);
    assert!(r["report"]["max_constraint_residual"].as_f64().unwrap() < 1e-9);
    let mut off = ["0"; 12];
    off[8] = "1";
    let bad = run(&["simulate", "--input", &f, "--x0", &off.join(",")]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(run(&["simulate", "--input", &f, "--dt", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--input", &f, "--dt", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--input", &f, "--x0", "1,x"]).status.code(), Some(1));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["analyze"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--input", "x", "--mode", "weird"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--input", "/nonexistent/netlist.json"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--input", &fixture("figure1.json"), "--format", "csv"]).status.code(), Some(1));
    let broken = scratch("broken.json", "{\"nodes\": [\"a\"],\n \"branches\": [");
    let out = run(&["analyze", "--input", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn selftest_filters_and_named_failures() {
    let out = run(&["selftest", "--filter", "negative-capacitance"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("PASS  6 negative-capacitance"), "{text}");
    assert_eq!(text.lines().count(), 2);
    assert_eq!(run(&["selftest", "--filter", "no-such-check"]).status.code(), Some(1));
    let text = std::fs::read_to_string(fixture("figure1.json")).unwrap().replace("\"C3\"", "\"C4\"");
    let dir = scratch("figure1.json", &text);
    let out = run(&["selftest", "--filter", "figure1-chain", "--fixtures", dir.parent().unwrap().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL  1 figure1-chain"));
}
