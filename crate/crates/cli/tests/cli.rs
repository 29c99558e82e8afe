use std::path::PathBuf;
use std::process::{Command, Output};

const TOY: &str = r#"
[nc]
theta = { kind = "inverse_sqrt", a = 1.0, b = 1.0 }

[oscillator]
m1 = 1.0
m2 = 4.0
w1 = 1.0
w2 = 1.0

[sweep]
t_start = 0.0
t_end = 10.0
t_step = 1.0
"#;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncsep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsep")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn toy_reports_disagreement_with_closed_form() {
    let o = run(&["toy"]);
    assert_eq!(o.status.code(), Some(4));
    let text = stdout(&o);
    assert!(text.starts_with("t,lambda1,lambda2,delta1,delta2,delta12,tau_v,ps,ps_closed_form,rsup_ok,verdict\n"));
    assert_eq!(text.lines().count(), 802);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("pipeline transitions: [220.311, 284.63"), "{err}");
    assert!(err.contains("closed form transitions: [213.00"), "{err}");
}

#[test]
fn toy_json_carries_report() {
    let o = run(&["toy", "--format", "json"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 801);
    assert_eq!(v["report"]["agree"], false);
    assert_eq!(v["report"]["pipeline_runs"].as_array().unwrap().len(), 3);

    // No transitions before t = 20, so nothing to disagree about.
    assert_eq!(run(&["toy", "--t-end", "20"]).status.code(), Some(0));
    assert!(v["records"][0]["ps_closed_form"].as_f64().unwrap() > 1e6);
}

#[test]
fn sweep_is_deterministic() {
    let cfg = write_config("toy.toml", TOY);
    let a = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    let b = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 12);
    // Matching the built-in toy model attaches the closed form.
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first.len(), 11);
    assert!(!first[8].is_empty());
    assert_eq!(first[0], "0.0000000000000000e0");
}

#[test]
fn sweep_writes_json_file_with_overrides() {
    let cfg = write_config("toy-json.toml", TOY);
    let out = scratch("sweep.json");
    let o = run(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap(),
        "--t-end", "2", "--t-step", "0.5", "--state", "1,0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), 5);
    assert_eq!(recs[0]["non_gaussian"], true);
    assert!(recs[0]["ps_closed_form"].is_null());
}

#[test]
fn json_config_is_accepted() {
    let cfg = write_config(
        "iso.json",
        r#"{"oscillator":{"m1":1,"m2":1,"w1":1,"w2":1},"sweep":{"t_end":3,"t_step":1}}"#,
    );
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().skip(1) {
        assert!(line.ends_with(",separable"), "{line}");
        assert!(line.contains(",6.2500000000000000e-2,"), "{line}");
    }
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(run(&["sweep"]).status.code(), Some(2));
    let missing = scratch("absent.toml");
    assert_eq!(run(&["sweep", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write_config("bad.toml", "[oscillator]\nm1 = 1.0\n");
    assert_eq!(run(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let cfg = write_config("toy-step.toml", TOY);
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap(), "--t-step", "0"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap(), "--state", "x"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_keeps_partial_output() {
    let text = TOY.replace(
        "theta = { kind = \"inverse_sqrt\", a = 1.0, b = 1.0 }",
        "theta = { kind = \"table\", points = [[0.0, 0.5], [4.0, 0.5]] }",
    );
    let cfg = write_config("short-table.toml", &text);
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn check_eigen_and_phases() {
    let cfg = write_config("toy-check.toml", TOY);
    let c = cfg.to_str().unwrap();

    let o = run(&["check", "--config", c]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",true")));

    let o = run(&["eigen", "--config", c, "--t", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["lambda1"].as_f64().unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    assert!(v["residuals"]["diagonalization"].as_f64().unwrap() < 1e-10);

    let o = run(&["phases", "--config", c, "--t-end", "2", "--t-step", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("t,re_beta1,im_beta1,re_beta2,im_beta2,omega1,omega2,constraint_residual\n"));
    assert_eq!(text.lines().count(), 22);
    assert!(String::from_utf8_lossy(&o.stderr).contains("phi_geometric"));
}
