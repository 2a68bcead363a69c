use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn skt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skt"))
        .args(args)
        .env_remove("SKT_TOL")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json stdout")
}

#[test]
fn parse_dumps_structure() {
    let o = skt(&["parse", "(0,0,21)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("dimension: 3"));
    let v = json(&skt(&["parse", "(0,0,21)", "--json"]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["algebra"]["dim"], 3);
    assert_eq!(v["algebra"]["structure"].as_array().unwrap().len(), 1);
}

#[test]
fn parse_errors_are_usage_errors() {
    assert_eq!(code(&skt(&["parse", "(0,0,2"])), 2);
    assert_eq!(code(&skt(&["parse", "r3p"])), 2, "unbound lambda");
    assert_eq!(code(&skt(&["parse", "r3p", "--params", "lambda=0.5"])), 0);
}

#[test]
fn check_catalog_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h3.json");
    let dump = skt(&["parse", "h3", "--json"]);
    std::fs::write(&path, &dump.stdout).unwrap();
    let o = skt(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("two-step solvable: yes"));
}

#[test]
fn check_broken_jacobi_exits_1() {
    let o = skt(&[
        "check",
        r#"{"dim":3,"structure":[{"i":1,"j":2,"k":3,"c":1},{"i":1,"j":3,"k":1,"c":1}]}"#,
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("Jacobi residual: 1.000e0 (FAIL)"));
}

#[test]
fn check_truncated_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, "{\"dim\":3,\"structure\":[").unwrap();
    let o = skt(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 1 column"), "{}", stderr(&o));
}

#[test]
fn check_reports_skt_verdict_with_structure() {
    let aff = skt(&["shear", &data("aff.json")]);
    let o = skt(&["check", &stdout(&aff)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: kahler"));
    let nu = json(&skt(&["shear", &data("nu_nonzero.json"), "--json"]));
    let o = skt(&["check", &nu["algebra"].to_string()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("verdict: hermitian_not_skt"));
}

#[test]
fn shear_examples() {
    let o = skt(&["shear", &data("aff.json"), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["algebra"]["dim"], 2);
    assert_eq!(v["skt"]["verdict"], "kahler");

    let o = skt(&["shear", &data("almost_abelian_skt.json"), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["algebra"]["dim"], 6);
    assert_eq!(v["skt"]["verdict"], "skt_strict");

    let o = skt(&["shear", &data("nu_nonzero.json")]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("failed: SKT four-form ν"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn shear_input_errors_exit_2() {
    let bad_pair = r#"{"n":1,"a_basis":[[1,0]],"omega":[{"i":2,"j":1,"value":[1,0]}]}"#;
    assert_eq!(code(&skt(&["shear", bad_pair])), 2);
    let outside = r#"{"n":1,"a_basis":[[1,0]],"omega":[{"i":1,"j":2,"value":[0,1]}]}"#;
    assert_eq!(code(&skt(&["shear", outside])), 2);
}

#[test]
fn admissible_exit_codes() {
    let o = skt(&["admissible", "[[1,0,0],[0,1,0],[0,0,1]]"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("inadmissible: eigenvalue real parts"));
    let o = skt(&["admissible", "[[-0.5,-1,0],[1,-0.5,0],[0,0,1]]", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["decision"]["case"], "i");
    assert_eq!(code(&skt(&["admissible", "[[1,0],[0]]"])), 2);
}

#[test]
fn family_from_params_and_seed() {
    let o = skt(&[
        "family",
        "totally_real",
        "--params",
        "n=3",
        "m=1",
        "r=1",
        "lambda=[2]",
        "mu=[[1,0,0,0]]",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: skt_strict"));
    for name in [
        "almost_abelian",
        "codim2",
        "totally_real",
        "two_dim_complex",
        "six_dim3_comm",
    ] {
        let o = skt(&["family", name, "--seed", "5", "--json"]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        assert_eq!(json(&o)["family"], name);
    }
}

#[test]
fn family_failures() {
    let o = skt(&[
        "family",
        "totally_real",
        "--params",
        "n=3",
        "m=1",
        "r=1",
        "lambda=[0]",
        "mu=[[1,0,0,0]]",
    ]);
    assert_eq!(code(&o), 2);
    let nu = "nu={\"forms\":[[[0,1,0,0],[-1,0,0,0],[0,0,0,1],[0,0,-1,0]]]}";
    let o = skt(&["family", "totally_real", "--params", "n=3", "m=1", "r=0", nu]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("nu_j ^ nu_j"));
    assert_eq!(code(&skt(&["family", "bogus"])), 2);
    assert_eq!(code(&skt(&["family", "codim2", "--seed", "1", "--params", "n=40"])), 2);
}

#[test]
fn scan6d_summary_and_determinism() {
    let a = skt(&["scan6d", "--samples", "100", "--seed", "7", "--json"]);
    let b = skt(&["scan6d", "--samples", "100", "--seed", "7", "--json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 101);
    let summary: Value = serde_json::from_str(lines[100]).unwrap();
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["failures"], 0);
    assert!(summary["distinct_fingerprints"].as_u64().unwrap() >= 4);
    let rec: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(rec["schema_version"], 1);
    assert!(rec["report"]["verdict"].is_string());
}

#[test]
fn fingerprint_target_comparison() {
    let o = skt(&["fingerprint", "(0,0,0,0,12,14+23)", "--target", "(0,0,0,0,12,14+23)"]);
    assert_eq!(code(&o), 0);
    let o = skt(&["fingerprint", "h3 + R^3", "--target", "aff + R^4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("matches aff + R^4: no"));
    assert_eq!(code(&skt(&["fingerprint", "nonsense"])), 2);
}

#[test]
fn tolerance_flags_and_env() {
    assert_eq!(code(&skt(&["--tol", "-1", "parse", "(0,0,21)"])), 2);
    assert_eq!(code(&skt(&["frobnicate"])), 2);
    let loose = Command::new(env!("CARGO_BIN_EXE_skt"))
        .args([
            "check",
            r#"{"dim":3,"structure":[{"i":1,"j":2,"k":3,"c":1},{"i":1,"j":3,"k":1,"c":1e-6}]}"#,
        ])
        .env("SKT_TOL", "1e-3")
        .output()
        .unwrap();
    assert_eq!(code(&loose), 0);
    assert_eq!(
        code(&skt(&[
            "check",
            r#"{"dim":3,"structure":[{"i":1,"j":2,"k":3,"c":1},{"i":1,"j":3,"k":1,"c":1e-6}]}"#
        ])),
        1
    );
}

#[test]
fn json_errors_carry_schema_and_exit_code() {
    let o = skt(&["--json", "check", "{"]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "check");
    assert_eq!(v["exit_code"], 2);
}
