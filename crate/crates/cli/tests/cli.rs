use std::process::{Command, Output};

fn bqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bqs"))
        .args(args)
        .env_remove("BQS_THREADS")
        .output()
        .expect("spawn bqs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn moments_pass() {
    let o = bqs(&["moments", "--N", "2", "--alpha", "0.0", "--max-degree", "4", "--samples", "100000", "--seed", "42"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // header plus 15 indices with |k| <= 4
    assert_eq!(stdout(&o).lines().count(), 16);
}

#[test]
fn moments_rejects_alpha() {
    let o = bqs(&["moments", "--alpha", "-1.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha must be > -1"));
}

#[test]
fn moments_degree_zero() {
    let o = bqs(&["moments", "--max-degree", "0", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["k"], serde_json::json!([0, 0]));
    assert_eq!(rows[0]["estimate"], 1.0);
    assert_eq!(rows[0]["standard_error"], 0.0);
}

#[test]
fn intertwine_pass() {
    let o = bqs(&["intertwine", "--N", "2", "--alpha", "0.0", "--n", "2,2", "--max-degree", "12", "--tol", "1e-12"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("max residual"));
}

#[test]
fn intertwine_trivial_and_invalid() {
    let o = bqs(&["intertwine", "--n", "1,1"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("trivial case"));
    assert_eq!(code(&bqs(&["intertwine", "--n", "2,0"])), 2);
    assert_eq!(code(&bqs(&["intertwine", "--n", "2,2,2"])), 2);
    assert_eq!(code(&bqs(&["intertwine", "--n", "2,2", "--j", "2,0"])), 2);
    assert_eq!(code(&bqs(&["intertwine", "--n", "2,2", "--tol", "0"])), 2);
}

#[test]
fn intertwine_tolerance_failure_exits_one() {
    let o = bqs(&["intertwine", "--n", "2,3", "--alpha", "1.5", "--tol", "1e-300"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("FAIL"));
}

#[test]
fn asymptotics_geometric() {
    let o = bqs(&["asymptotics", "--N", "2", "--alpha", "0.0", "--n", "2,2", "--j", "0,0", "--diagonal-max", "60"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("d,k,j,log_c,log_I1,log_I2,log_a,ratio_term,log_lb_a,log_ub_a,log_prefactor,ratio_lower,ratio_upper"));
    assert_eq!(out.lines().count(), 61);
}

#[test]
fn asymptotics_unit_branch() {
    let o = bqs(&["asymptotics", "--N", "2", "--n", "1,2", "--j", "0,0", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    let stirling = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "stirling").unwrap();
    assert!(stirling["detail"].as_str().unwrap().contains("successive ratio"));
}

#[test]
fn asymptotics_needs_two_dimensions() {
    let o = bqs(&["asymptotics", "--N", "1", "--n", "2"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("asymptotics requires N >= 2"));
}

#[test]
fn asymptotics_reports_inequality_counterexample() {
    // m = 0 and j_m = 1 > j_2 = 0, so the comparison already fails at k = 0
    let o = bqs(&["asymptotics", "--n", "2,2", "--j", "1,0", "--max-degree", "4", "--diagonal-max", "12"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("FAIL factorial_inequality"));
}

#[test]
fn decompose_classes() {
    let o = bqs(&["decompose", "--N", "2", "--n", "2,2", "--max-degree", "10", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    let total: u64 = v["rows"].as_array().unwrap().iter().map(|r| r["dimension"].as_u64().unwrap()).sum();
    assert_eq!(total, 66);

    let o = bqs(&["decompose", "--N", "3", "--n", "3,1,2", "--max-degree", "8", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    let total: u64 = v["rows"].as_array().unwrap().iter().map(|r| r["dimension"].as_u64().unwrap()).sum();
    assert_eq!(total, 165);
}

#[test]
fn json_echoes_config() {
    let o = bqs(&["decompose", "--N", "2", "--n", "2,3", "--max-degree", "5", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["command"], "decompose");
    assert_eq!(v["config"]["N"], 2);
    assert_eq!(v["config"]["n"], serde_json::json!([2, 3]));
    assert_eq!(v["config"]["max_degree"], 5);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["pass"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["moments", "--N", "3", "--alpha", "1.5", "--max-degree", "3", "--samples", "20000", "--seed", "9", "--format", "json"];
    let a = bqs(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_bqs"))
        .args(args)
        .env("BQS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let a = bqs(&["asymptotics", "--n", "2,3", "--alpha", "0.5", "--diagonal-max", "20"]);
    let b = bqs(&["asymptotics", "--n", "2,3", "--alpha", "0.5", "--diagonal-max", "20"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_and_bad_threads() {
    let path = std::env::temp_dir().join(format!("bqs-cli-test-{}.csv", std::process::id()));
    let o = bqs(&["decompose", "--n", "2,2", "--max-degree", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(written.starts_with("j,dimension\n"));

    let o = Command::new(env!("CARGO_BIN_EXE_bqs"))
        .args(["decompose", "--n", "2,2"])
        .env("BQS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
