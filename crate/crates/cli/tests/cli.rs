use std::path::Path;
use std::process::{Command, Output};

fn kinkstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinkstab")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn header(text: &str) -> &str {
    text.lines().next().unwrap()
}

#[test]
fn profile_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = kinkstab(&["profile", "--n", "40", "-o", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = read(&a);
    assert_eq!(text, read(&b));
    assert_eq!(header(&text), "x,phi,phi_prime,one_minus_phi_sq");
    assert_eq!(text.lines().count(), 42);
    assert!(!text.contains('\r'));
    let mid: Vec<f64> = text.lines().nth(21).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(mid[0], 0.0);
    assert_eq!(mid[1], std::f64::consts::FRAC_1_SQRT_2);

    let side: serde_json::Value = serde_json::from_str(&read(&dir.path().join("a.csv.json"))).unwrap();
    assert_eq!(side["command"], "profile");
    assert_eq!(side["flags"]["n"], 40);
    assert_eq!(side["flags"]["p"], 2.0);
    assert!(side["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": 20, "x-min": -5, "x_max": 5, "p": 2, "q": 5}"#).unwrap();
    let out_path = dir.path().join("p.csv");
    let out = kinkstab(&["profile", "--config", cfg.to_str().unwrap(), "--n", "32", "-o", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&out_path);
    assert_eq!(text.lines().count(), 34);
    assert!(text.lines().nth(1).unwrap().starts_with("-5.0000000000000000e0,"));
    let side: serde_json::Value = serde_json::from_str(&read(&dir.path().join("p.csv.json"))).unwrap();
    assert_eq!(side["flags"]["q"], 5.0);
    assert_eq!(side["flags"]["n"], 32);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"colour": "blue"}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["profile", "--p", "5", "--q", "2"],
        vec!["profile", "--n", "4"],
        vec!["profile", "--config", cfg.to_str().unwrap()],
        vec!["evolve", "--shape", "square"],
        vec!["evolve", "--dt", "0.5", "--t-final", "1"],
        vec!["spectrum", "--r", "-40"],
        vec!["criterion-scan", "--r-step", "-1"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = kinkstab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    std::fs::write(&cfg, "not json").unwrap();
    assert_eq!(kinkstab(&["profile", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn spectrum_writes_eigenfunctions() {
    let dir = tempfile::tempdir().unwrap();
    let ef = dir.path().join("ef.csv");
    let out = kinkstab(&["spectrum", "--r", "0.2", "--n", "2000", "--eigenfunctions", ef.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header(&stdout), "k,lambda,bisection_lambda,residual,sign_changes");
    assert_eq!(stdout.lines().count(), 4);
    let text = read(&ef);
    assert_eq!(header(&text), "z,x,v1,v2,v3");
    assert_eq!(text.lines().count(), 2002);
    assert!(text.lines().last().unwrap().starts_with("0.0000000000000000e0,inf,"));
}

#[test]
fn scan_and_constrained_schemas() {
    let out = kinkstab(&[
        "criterion-scan",
        "--r-min",
        "-1",
        "--r-max",
        "1",
        "--r-step",
        "1",
        "--n",
        "2000",
        "--threads",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header(&text), "R,z_R,lambda1,lambda2,lambda3,F0,product");
    let rs: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(rs, vec![-1.0, 0.0, 1.0]);

    let out = Command::new(env!("CARGO_BIN_EXE_kinkstab"))
        .args(["constrained-eigenvalue", "--r", "1", "--n", "2000"])
        .env("KINKSTAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header(&text), "R,lambda0,kind,F_at_lambda0,lambda1,lambda2,F0");
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(2), Some("root"));
}

#[test]
fn block_spectrum_is_imaginary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bs.csv");
    let out = kinkstab(&["block-spectrum", "--n", "200", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&path);
    assert_eq!(header(&text), "re,im");
    assert_eq!(text.lines().count(), 1 + 2 * 201);
    assert!(text.lines().skip(1).all(|l| l.starts_with("0.0000000000000000e0,")));
    let side: serde_json::Value = serde_json::from_str(&read(&dir.path().join("bs.csv.json"))).unwrap();
    assert_eq!(side["results"]["unstable"], false);
}

#[test]
fn evolve_and_decompose() {
    let out = kinkstab(&[
        "evolve",
        "--t-final",
        "1",
        "--dt",
        "0.01",
        "--x-min",
        "-20",
        "--x-max",
        "20",
        "--n",
        "1024",
        "--log-every",
        "0.25",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header(&text), "t,energy,rho_modulated,alpha,beta,eta_sup");
    assert_eq!(text.lines().count(), 6);

    let out = kinkstab(&["decompose-check", "--count", "2", "--seed", "5", "--n", "4000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header(&text), "seed,lhs,rhs_split,rhs_global,rel_mismatch_split,rel_mismatch_global");
    assert!(text.lines().nth(1).unwrap().starts_with("5,"));
}

#[test]
fn selftest_passes() {
    let out = kinkstab(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
