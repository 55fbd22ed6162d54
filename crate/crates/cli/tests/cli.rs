use std::path::Path;
use std::process::{Command, Output};

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polariton-lab"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("POLARITON_LAB_THREADS")
        .output()
        .expect("spawn polariton-lab")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const EIT: &str = r#"{"units": "dimensionless", "params": {"g": 1, "omega_R": 1, "omega_L": 0, "delta": 5, "c": 1, "gamma_e": 0}}"#;

#[test]
fn dispersion_writes_bands_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "eit.json", EIT);
    let o = lab(tmp.path(), &["dispersion", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bands = std::fs::read_to_string(tmp.path().join("bands.csv")).unwrap();
    let header = bands.lines().next().unwrap();
    assert_eq!(
        header,
        "k,branch_index,re_eigenvalue,im_eigenvalue,|amp_E_R|^2,|amp_E_L|^2,|amp_S|^2,|amp_P_R|^2,|amp_P_L|^2"
    );
    assert_eq!(bands.lines().count(), 1 + 201 * 3);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("bands.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "dispersion");
    assert_eq!(manifest["seed"], 0);
    assert_eq!(manifest["config"]["config"]["params"]["delta"], 5.0);
    let outputs: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(outputs, ["bands.csv", "bands.summary.json"]);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("bands.summary.json")).unwrap()).unwrap();
    let v = summary["summary"]["v_group"].as_f64().unwrap();
    assert!((v - 0.5).abs() < 1e-8);
}

#[test]
fn negative_momentum_flags_parse() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "eit.json", EIT);
    let o = lab(
        tmp.path(),
        &["dispersion", "--config", &cfg, "--scheme", "stationary", "--kmin", "-2", "--kmax", "2", "--points", "21", "--out", "st.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = std::fs::read_to_string(tmp.path().join("st.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 21 * 5);
}

#[test]
fn missing_config_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lab(tmp.path(), &["dispersion", "--config", "does-not-exist.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does-not-exist.json"));
}

#[test]
fn misspelled_config_key_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "typo.json", &EIT.replace("gamma_e", "gamma_E"));
    let o = lab(tmp.path(), &["dispersion", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma_E"));
}

#[test]
fn bad_parameters_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", &EIT.replace("\"g\": 1", "\"g\": -1"));
    let o = lab(tmp.path(), &["dispersion", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`g`"));
}

#[test]
fn unknown_flag_prints_usage_and_exits_64() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lab(tmp.path(), &["dispersion", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(lab(tmp.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn hilbert_cap_exits_3_with_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(
        tmp.path(),
        "big.json",
        r#"{"n_sites": 30, "n_bosons": 10, "interaction": {"type": "Contact", "u": 1}, "hilbert_cap": 1000}"#,
    );
    let o = lab(tmp.path(), &["manybody", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(3));
    // C(39, 10)
    assert!(stderr(&o).contains("635745396"), "{}", stderr(&o));
}

#[test]
fn manybody_embeds_spec_and_fits_k() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(
        tmp.path(),
        "ring.json",
        r#"{"n_sites": 12, "n_bosons": 3, "boundary": "periodic", "interaction": {"type": "HardCore"}}"#,
    );
    let o = lab(tmp.path(), &["--seed", "9", "manybody", "--spec", &spec, "--observables", "g2,energy,K"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(r["spec"]["n_sites"], 12);
    assert_eq!(r["spec"]["interaction"]["type"], "HardCore");
    assert_eq!(r["seed"], 9);
    assert_eq!(r["g2"]["values"][0], 0.0);
    let k = r["luttinger"]["fit"]["k"].as_f64().unwrap();
    assert!((k - 1.0).abs() < 0.05, "{k}");
}

#[test]
fn bethe_table_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lab(tmp.path(), &["bethe", "--gamma-grid", "0.1:100:log:4", "--out", "e.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("e.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,lambda,e,error_estimate");
    assert_eq!(lines.len(), 5);
    let e_last: f64 = lines[4].split(',').nth(2).unwrap().parse().unwrap();
    assert!(e_last < std::f64::consts::PI.powi(2) / 3.0);
}

#[test]
fn phasematch_emits_both_tilts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lab(tmp.path(), &["phasematch", "--lambda-probe", "780e-9", "--lambda-control", "480e-9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("beams.json")).unwrap()).unwrap();
    let sols = r["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    assert!(sols[0]["beams"]["k2_l"][1].as_f64().unwrap() > 0.0);
    assert_eq!(r["collinear"]["feasible"], false);

    let o = lab(tmp.path(), &["phasematch", "--lambda-probe", "480e-9", "--lambda-control", "780e-9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_rows_header_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "eit.json", EIT);
    let o = lab(
        tmp.path(),
        &["sweep", "--config", &cfg, "--target", "dispersion", "--axis", "params.omega_R=0.5:4:lin:8"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "omega_R,v_group,m_eff,gap_upper,gap_lower,photonic_fraction");
    assert_eq!(lines.len(), 9);
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.5);
    assert!((first[1] - 0.2).abs() < 1e-8);

    let o = lab(
        tmp.path(),
        &["sweep", "--config", &cfg, "--target", "dispersion", "--axis", "params.omega_R=0.5:4:lin:0", "--out", "empty.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("empty.csv")).unwrap();
    assert_eq!(text, "omega_R,v_group,m_eff,gap_upper,gap_lower,photonic_fraction\n");

    let o = lab(tmp.path(), &["sweep", "--config", &cfg, "--target", "dispersion", "--axis", "units=1:2:lin:2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not numeric"));
}

#[test]
fn product_axes_are_row_major() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "st.json", &EIT.replace("\"omega_L\": 0", "\"omega_L\": 0.5"));
    let o = lab(
        tmp.path(),
        &[
            "sweep", "--config", &cfg, "--target", "dispersion",
            "--axis", "params.omega_R=1:2:lin:2", "--axis", "params.delta=2:4:lin:3",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let keys: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',').map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(keys, [(1.0, 2.0), (1.0, 3.0), (1.0, 4.0), (2.0, 2.0), (2.0, 3.0), (2.0, 4.0)]);
}

#[test]
fn protocol_trace_and_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "run.json",
        r#"{"params": {"g": 1, "omega_R": 2, "omega_L": 0, "delta": 1, "c": 1},
            "grid": {"length": 200, "n_points": 256}, "pulse": {"center": -30, "width": 6}}"#,
    );
    let sched = write(
        tmp.path(),
        "schedule.json",
        r#"[{"duration": 5, "omega_R": {"shape": "constant", "from": 2}, "omega_L": {"shape": "constant", "from": 0}},
            {"duration": 10, "omega_R": {"shape": "smoothstep", "from": 2, "to": 1.4142135623730951},
             "omega_L": {"shape": "smoothstep", "from": 0, "to": 1.4142135623730951}, "flag": "adiabatic"}]"#,
    );
    let o = lab(tmp.path(), &["protocol", "--config", &cfg, "--schedule", &sched, "--out", "p.json", "--trace", "p.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = std::fs::read_to_string(tmp.path().join("p.csv")).unwrap();
    assert!(trace.starts_with("t,norm,photonic_fraction,centroid,omega_R,omega_L\n"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("p.json")).unwrap()).unwrap();
    assert!(report["report"]["max_norm_deviation"].as_f64().unwrap() < 1e-9);

    let again = tmp.path().join("again");
    let manifest = tmp.path().join("p.json.manifest.json");
    let o = lab(&again, &["replay", "--manifest", &manifest.to_string_lossy()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["p.json", "p.csv"] {
        assert_eq!(
            std::fs::read(tmp.path().join(f)).unwrap(),
            std::fs::read(again.join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn protocol_without_grid_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "eit.json", EIT);
    let sched = write(
        tmp.path(),
        "s.json",
        r#"[{"duration": 1, "omega_R": {"shape": "constant", "from": 1}, "omega_L": {"shape": "constant", "from": 0}}]"#,
    );
    let o = lab(tmp.path(), &["protocol", "--config", &cfg, "--schedule", &sched]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid"));
}
