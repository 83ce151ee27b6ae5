use std::path::Path;
use std::process::{Command, Output};

fn spec(name: &str) -> &'static str {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name);
    Box::leak(p.to_str().unwrap().to_string().into_boxed_str())
}

fn ssd(args: &[&str]) -> Output {
    ssd_env(args, &[])
}

fn ssd_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ssd"));
    c.args(args).env_remove("SSD_TOL").env_remove("SSD_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("run ssd")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    read(p).lines().skip(2).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn map_gaussian_forward_inverse_and_iterate() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = dir.path().join("fwd");
    let o = ssd(&["map", spec("gaussian.json"), "--b", "2", "--out", s(&fwd)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t: serde_json::Value = serde_json::from_str(&read(&fwd.join("triplet.json"))).unwrap();
    assert!((t["gauss"][0][0].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-15);

    let inv = dir.path().join("inv");
    let o = ssd(&["map", s(&fwd.join("triplet.json")), "--b", "2", "--inverse", "--out", s(&inv)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t: serde_json::Value = serde_json::from_str(&read(&inv.join("triplet.json"))).unwrap();
    assert!((t["gauss"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-15);

    let it = dir.path().join("m1");
    let o = ssd(&["map", spec("gaussian.json"), "--b", "2", "--m", "1", "--out", s(&it)]);
    assert_eq!(code(&o), 0);
    let row = csv_rows(&it.join("cumulant.csv")).into_iter().find(|r| r[0] == "1.0").unwrap();
    assert!((row[1].parse::<f64>().unwrap() + 8.0 / 9.0).abs() <= 1e-10);
}

#[test]
fn outputs_name_their_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(code(&ssd(&["map", spec("lattice.json"), "--b", "2", "--out", s(&out)])), 0);
    let csv = read(&out.join("cumulant.csv"));
    let hash = csv.lines().next().unwrap().strip_prefix("# manifest=").unwrap().to_string();
    let t: serde_json::Value = serde_json::from_str(&read(&out.join("triplet.json"))).unwrap();
    assert_eq!(t["manifest"], hash.as_str());
    let m: serde_json::Value = serde_json::from_str(&read(&out.join(format!("manifest-{hash}.json")))).unwrap();
    assert_eq!(m["command"], "map");
    assert_eq!(m["args"][0], "map");
    assert_eq!(m["args"][3], "2");
    assert_eq!(m["spec_hashes"]["spec"].as_str().unwrap().len(), 64);
    assert!(m["wall_time_s"].as_f64().is_some());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let args = [
        "simulate", spec("poisson_unit.json"), "--b", "2", "--c", "2", "--steps", "20", "--paths", "3000",
        "--init", "limit", "--seed", "9", "--out", s(&out),
    ];
    assert_eq!(code(&ssd(&args)), 0);
    let first = (read(&out.join("paths.csv")), read(&out.join("report.json")));
    assert_eq!(code(&ssd_env(&args, &[("SSD_THREADS", "3")])), 0);
    let second = (read(&out.join("paths.csv")), read(&out.join("report.json")));
    assert_eq!(first, second);

    let a = ssd(&["verify", "--suite", "iterate", "--seed", "7"]);
    let b = ssd(&["verify", "--suite", "iterate", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"gauss\": [[1.0]], ").unwrap();
    let out = dir.path().join("o");
    for args in [
        vec!["map", s(&bad), "--b", "2", "--out", s(&out)],
        vec!["map", "/no/such/spec.json", "--b", "2", "--out", s(&out)],
        vec!["map", spec("gaussian.json"), "--out", s(&out)],
        vec!["map", spec("gaussian.json"), "--b", "0.5", "--out", s(&out)],
        vec!["map", spec("gaussian.json"), "--b", "2", "--grid", "1:0", "--out", s(&out)],
        vec!["check", spec("gaussian.json"), "--b", "2", "--level", "9"],
        vec!["simulate", spec("gaussian.json"), "--b", "2", "--c", "1", "--init", "sideways", "--out", s(&out)],
        vec!["verify", "--suite", "nothing"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&ssd(&args)), 2, "{args:?}");
    }
    std::fs::write(&bad, r#"{"gauss": [[-1.0]]}"#).unwrap();
    assert_eq!(code(&ssd(&["check", s(&bad), "--b", "2"])), 2);
}

#[test]
fn domain_violations_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let heavy = spec("heavy_tail.json");
    assert_eq!(code(&ssd(&["map", heavy, "--b", "2", "--out", s(&out)])), 3);
    assert_eq!(code(&ssd(&["map", spec("log_boundary.json"), "--b", "2", "--m", "1", "--out", s(&out)])), 3);
    let o = ssd(&["map", spec("poisson_unit.json"), "--b", "2", "--inverse", "--out", s(&out)]);
    assert_eq!(code(&o), 3);
    let inv: serde_json::Value = serde_json::from_str(&read(&out.join("inverse.json"))).unwrap();
    assert_eq!(inv["validity"]["witness"]["radius"], 0.5);
    let sim = ["simulate", heavy, "--b", "2", "--c", "1", "--paths", "100", "--out", s(&out)];
    assert_eq!(code(&ssd(&[&sim[..], &["--init", "limit"]].concat())), 3);
    assert_eq!(code(&ssd(&[&sim[..], &["--semistationary"]].concat())), 3);
    // jumps of this law overflow f64 with positive probability
    let o = ssd(&sim);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("floating-point range"));
}

#[test]
fn tolerance_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let g = spec("gaussian.json");
    assert_eq!(code(&ssd(&["map", g, "--b", "2", "--tol", "1e-30", "--out", s(&out)])), 4);
    assert_eq!(code(&ssd_env(&["map", g, "--b", "2", "--out", s(&out)], &[("SSD_TOL", "1e-30")])), 4);
    assert_eq!(code(&ssd_env(&["map", g, "--b", "2", "--out", s(&out)], &[("SSD_TOL", "1e-8")])), 0);
}

#[test]
fn boundary_spec_accepted_at_first_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let args = ["map", spec("log_boundary.json"), "--b", "2", "--grid", "-1:1:3", "--tol", "1e-2", "--out", s(&out)];
    assert_eq!(code(&ssd(&args)), 0);
}

#[test]
fn check_exit_reflects_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let ss = spec("semistable.json");
    let o = ssd(&["check", ss, "--b", "2", "--level", "0", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let cert: serde_json::Value = serde_json::from_str(&read(&out.join("certificate.json"))).unwrap();
    assert_eq!(cert["certificate"]["verdict"], "member");
    assert_eq!(cert["semi_stable"]["semi_stable"], true);
    assert_eq!(code(&ssd(&["check", ss, "--b", "2", "--level", "4"])), 0);

    let o = ssd(&["check", spec("poisson_unit.json"), "--b", "2"]);
    assert_eq!(code(&o), 1);
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["certificate"]["verdict"], "non_member");
    assert!(cert["certificate"]["residual"].as_f64().unwrap() > 1e-3);

    for level in ["0", "1", "5"] {
        assert_eq!(code(&ssd(&["check", spec("gaussian.json"), "--b", "2", "--level", level])), 0);
    }
}

#[test]
fn simulate_reports_and_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = ssd(&[
        "simulate", spec("gaussian.json"), "--b", "2", "--c", "1", "--steps", "60", "--paths", "100000", "--seed",
        "5", "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&read(&out.join("report.json"))).unwrap();
    assert!(r["langevin"]["max_relative_residual"].as_f64().unwrap() <= 1e-10);
    let lim = &r["limit"];
    assert_eq!(lim["passed"], true);
    assert!(lim["runs"][0]["terminal"]["max_deviation"].as_f64().unwrap() < lim["radius"].as_f64().unwrap());
    assert_eq!(lim["runs"][1]["init"], "limit");
    assert_eq!(lim["runs"][1]["stationarity"].as_array().unwrap().len(), 5);
    assert_eq!(csv_rows(&out.join("paths.csv")).len(), 10 * 61);
}

#[test]
fn zero_steps_keep_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = ssd(&[
        "simulate", spec("gaussian.json"), "--b", "2", "--c", "1", "--steps", "0", "--paths", "50", "--init",
        "const:2.5", "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("paths.csv"));
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[3] == "2.5" && r[4].is_empty()));
}

#[test]
fn semistationary_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = ssd(&[
        "simulate", spec("poisson_unit.json"), "--b", "2", "--c", "2", "--paths", "20000", "--init", "limit",
        "--semistationary", "--grid", "-3:3:13", "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&read(&out.join("report.json"))).unwrap();
    assert_eq!(r["semistationary"]["passed"], true);
    assert_eq!(r["semistationary"]["negative_control_detected"], true);
}

#[test]
fn verify_suites() {
    for suite in ["core", "iterate"] {
        let o = ssd(&["verify", "--suite", suite]);
        assert_eq!(code(&o), 0, "{suite}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["passed"], true);
        assert_eq!(v["seed"], 42);
    }
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = ssd(&["verify", "--suite", "ou", "--paths", "20000", "--seed", "3", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    let groups: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["group"].as_str().unwrap()).collect();
    for g in ["langevin", "limit", "divergence", "semistationarity"] {
        assert!(groups.contains(&g), "{g}");
    }
}

#[test]
fn bundled_specs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "json") {
            let (sp, _) = ssd::spec::Spec::read(&p).unwrap();
            sp.triplet().unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        }
    }
    let schema: serde_json::Value = serde_json::from_str(&read(&dir.join("schema/spec-v1.schema.json"))).unwrap();
    assert_eq!(schema["$defs"]["triplet"]["properties"]["schema"]["const"], 1);
}
