use std::path::Path;
use std::process::{Command, Output};

fn nes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nes")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    let line = err.lines().last().expect("error line on stderr");
    serde_json::from_str(line).expect("stderr ends in JSON")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(Result::unwrap).collect();
    (header, rows)
}

#[test]
fn figure2_csv_contains_anchor_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let o = nes(&["figure2", "--points", "200", "--sigma-max", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["panel", "sigma", "rho", "lambda"]);
    let anchor = rows.iter().any(|r| {
        let v: Vec<f64> = (1..4).map(|i| r[i].parse().unwrap()).collect();
        &r[0] == "left" && (v[0] - 1.0 / 3.0).abs() < 1e-11 && (v[1] - 0.6).abs() < 1e-11 && (v[2] - 0.8).abs() < 1e-11
    });
    assert!(anchor);
    assert!(rows.iter().all(|r| r.len() == 4));
}

#[test]
fn figure3_round_trips_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("fig3.csv");
    let json_path = dir.path().join("fig3.json");
    let base = ["figure3", "--mass-gev", "190", "--mass-gev", "1.2e19", "--points", "41"];
    assert!(nes(&[&base[..], &["--out", csv_path.to_str().unwrap()]].concat()).status.success());
    let o = nes(&[&base[..], &["--format", "json", "--out", json_path.to_str().unwrap()]].concat());
    assert!(o.status.success());

    let (header, rows) = read_csv(&csv_path);
    assert_eq!(header, ["mass_gev", "energy_ratio", "q", "clamped"]);
    assert_eq!(rows.len(), 82);
    let json: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(&json_path).unwrap()).unwrap();
    assert_eq!(json.len(), rows.len());
    for (r, j) in rows.iter().zip(&json) {
        let obj = j.as_object().unwrap();
        assert_eq!(obj.keys().collect::<Vec<_>>(), header.iter().collect::<Vec<_>>());
        let q_csv: f64 = r[2].parse().unwrap();
        let q_json = j["q"].as_f64().unwrap();
        assert!((q_csv - q_json).abs() <= 1e-11 * q_json);
        assert_eq!(r[3].parse::<bool>().unwrap(), j["clamped"].as_bool().unwrap());
    }
}

#[test]
fn dzero_json_example() {
    let o = nes(&["dzero", "--mass-gev", "128", "--mode", "paper", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mode"], "paper");
    assert!((v["kstar"].as_f64().unwrap() - 9.375e16).abs() < 1.0);
    // 5.596e31 corresponds to k* rounded to 9.4e16
    assert!((v["re"].as_f64().unwrap() - 5.596e31).abs() / 5.596e31 < 0.01);
    assert!((v["im"].as_f64().unwrap() - 0.48).abs() < 1e-3);
}

#[test]
fn json_numbers_are_lossless() {
    let o = nes(&["dzero", "--kstar", "2", "--mode", "plemelj", "--format", "json"]);
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["mode"], "plemelj");
    let token = text.split("\"re\":").nth(1).unwrap().split(',').next().unwrap();
    let re: f64 = token.parse().unwrap();
    assert_eq!(format!("{re:.16e}"), token);
    // library and binary may differ in the last place across build profiles
    let lib = nes_core::loop_regularization::dzero_quadrature(2.0, 1e-12).unwrap();
    assert!((re - lib.d0.re).abs() <= 4.0 * f64::EPSILON * re.abs());
    assert!(text.contains("\"segment1_re\":3.228733950132"));
}

#[test]
fn mass_correction_example() {
    let o = nes(&["mass-correction", "--mass-gev", "128", "--coupling", "1.0", "--mode", "paper", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let theta = v["theta_js"].as_f64().unwrap();
    assert!((theta - 2.94e-3).abs() < 1e-5);
    assert_eq!(v["mu_star"].as_f64().unwrap(), (1.0 + theta).sqrt());
}

#[test]
fn plemelj_lifetime_is_null() {
    let o = nes(&["mass-correction", "--mass-gev", "128", "--coupling", "1.0", "--mode", "plemelj", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["tau_l_s"].is_null());
    assert_eq!(v["mode"], "plemelj");
}

#[test]
fn theta_table_defaults() {
    let o = nes(&["theta-table"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mass_gev,kstar,theta_js,theta_inv_per_js"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["blur-estimate", "--samples", "20000", "--seed", "9", "--format", "json"][..],
        &["blur-estimate", "--samples", "20000", "--seed", "9", "--streams", "3"][..],
        &["figure3", "--points", "30"][..],
        &["verify", "--filter", "blurred"][..],
    ] {
        assert_eq!(nes(args).stdout, nes(args).stdout, "{args:?}");
    }
    let a = nes(&["blur-estimate", "--samples", "20000", "--seed", "9"]);
    let b = nes(&["blur-estimate", "--samples", "20000", "--seed", "10"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn exit_codes_follow_error_class() {
    // validation
    for args in [
        &["dzero", "--kstar", "0.5"][..],
        &["figure2", "--points", "1"][..],
        &["blur-estimate", "--dim", "5"][..],
        &["blur-estimate", "--rho", "1.0"][..],
        &["mass-correction", "--mass-gev", "-1", "--coupling", "1"][..],
        &["blur-estimate", "--samples", "3"][..],
    ] {
        let o = nes(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e = error_json(&o);
        assert!(e["error"]["kind"].is_string() && e["error"]["message"].is_string());
    }
    // numeric
    for (args, kind) in [
        (&["dzero", "--kstar", "2", "--mode", "plemelj", "--tolerance", "1e-30"][..], "quadrature"),
        (&["mass-correction", "--mass-gev", "128", "--coupling", "1000"][..], "weak_coupling"),
    ] {
        let o = nes(args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert_eq!(error_json(&o)["error"]["kind"], kind);
    }
}

#[test]
fn usage_and_io_errors_exit_two() {
    for args in [&["bogus"][..], &["figure2", "--points", "abc"][..], &["dzero"][..], &["dzero", "--mode", "x", "--kstar", "2"][..]] {
        let o = nes(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(error_json(&o)["error"]["kind"], "usage");
    }
    let o = nes(&["figure2", "--out", "/nonexistent-dir/fig.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "io");
    assert!(nes(&["--help"]).status.success());
}

#[test]
fn verify_default_passes() {
    let o = nes(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("pass")));
}

#[test]
fn verify_injected_fault_fails() {
    let o = nes(&["verify", "--rho", "1.0", "--filter", "kinematics", "--format", "json"]);
    assert_ne!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rows.iter().all(|r| r["group"] == "kinematics"));
    let bad = rows.iter().find(|r| r["property"] == "injected_rho").unwrap();
    assert_eq!(bad["status"], "error");
    assert!(bad["detail"].as_str().unwrap().starts_with("domain"));
}
