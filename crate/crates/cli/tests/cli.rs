use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_peakon-spectra"));
    c.env_remove("PEAKON_SPECTRA_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn kernel_check_reports_hilbert_schmidt_values() {
    let out = run(&["kernel-check", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((r["k1"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!((r["k2"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(r["pass"], Value::Bool(true));
    assert_eq!(r["config"]["tolerances"]["kernel"].as_f64(), Some(1e-6));
}

#[test]
fn alpha_beta_rate_is_four_minus_b() {
    let out = run(&["alpha-beta", "--b", "2", "--T", "5", "--n", "256"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let rate = r["runs"][0]["fitted_rate"].as_f64().unwrap();
    assert!((rate - 2.0).abs() < 0.02, "{rate}");
    assert_eq!(r["pass"], Value::Bool(true));
}

#[test]
fn spectrum_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.csv");
    let out = run(&[
        "spectrum",
        "--b",
        "3,5",
        "--n",
        "128",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = read(&path);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b,n,re,im,outside_band"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 128);
    // 17 significant digits: one leading digit and sixteen decimals
    let re = rows[0][2].trim_start_matches('-');
    let mantissa = re.split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "{re}");
    assert!(rows.iter().any(|r| r[0].starts_with("3.")));
    assert!(rows.iter().any(|r| r[0].starts_with("5.")));

    // the band report goes to stdout when the table goes to a file
    let r = json(&out);
    assert_eq!(r["command"], "spectrum");
    assert_eq!(r["spectra"].as_array().unwrap().len(), 2);
    assert_eq!(r["config"]["grid"]["n"], 128);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for (args, file) in [
        (
            &["eigfun-check", "--samples", "20", "--seed", "11"][..],
            "e.json",
        ),
        (
            &["band-map", "--b", "0,3", "--n", "64", "--csv"][..],
            "b.csv",
        ),
        (
            &["evolve-nonlinear", "--n", "256", "--T", "0.5"][..],
            "n.json",
        ),
    ] {
        let mut texts = Vec::new();
        for _ in 0..2 {
            // same path both times: the path is part of the echoed config
            let path = dir.path().join(file);
            let mut full = args.to_vec();
            full.extend(["--out", path.to_str().unwrap()]);
            assert_eq!(run(&full).status.code(), Some(0), "{args:?}");
            texts.push(read(&path));
        }
        assert_eq!(texts[0], texts[1], "{args:?}");
    }
}

#[test]
fn seed_changes_sampled_points() {
    let worst = |seed: &str| {
        let r = json(&run(&["eigfun-check", "--samples", "5", "--seed", seed]));
        r["ode_residuals"][0]["worst"].clone()
    };
    assert_ne!(worst("1"), worst("2"));
}

#[test]
fn validation_errors_exit_one_with_record() {
    for args in [
        &["spectrum", "--n", "63"][..],
        &["spectrum", "--n", "32"],
        &["spectrum", "--L", "4"],
        &["alpha-beta", "--T", "0"],
        &["alpha-beta", "--dt", "-1"],
        &["evolve-linear", "--b", "6"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let r = json(&out);
        assert_eq!(r["error"]["kind"], "validation", "{args:?}");
        assert_eq!(r["error"]["exit_code"], 1);
    }
}

#[test]
fn unparsable_arguments_exit_one() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--n", "many"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_two() {
    let out = run(&["evolve-nonlinear", "--n", "256", "--dt", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["error"]["kind"], "numerical");
    assert!(r["error"]["message"].as_str().unwrap().contains("CFL"));
    // the resolved config is echoed even on failure
    assert_eq!(r["config"]["grid"]["n"], 256);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "b = [2, 3]\nseed = 3\n\n[grid]\nL = 20\nn = 128\n\n[time]\nT = 2\n\n[tolerances]\nrate = 0.05\n\n[experiment]\nalpha0 = 0.5\n",
    )
    .unwrap();
    let out = run(&[
        "alpha-beta",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "256",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let c = &json(&out)["config"];
    assert_eq!(c["grid"]["n"], 256);
    assert_eq!(c["grid"]["L"], 20.0);
    assert_eq!(c["time"]["T"], 2.0);
    assert_eq!(c["b"], serde_json::json!([2.0, 3.0]));
    assert_eq!(c["tolerances"]["rate"], 0.05);
    assert_eq!(c["experiment"]["alpha0"], 0.5);
    assert_eq!(c["seed"], 3);
}

#[test]
fn unknown_config_keys_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[grid]\nL = 20\npoints = 128\n").unwrap();
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("points"));
}

#[test]
fn thread_override() {
    let ok = bin()
        .env("PEAKON_SPECTRA_THREADS", "1")
        .args(["peakon-residual", "--b", "3", "--n", "256"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = bin()
        .env("PEAKON_SPECTRA_THREADS", "zero")
        .args(["kernel-check"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sequential_and_parallel_agree() {
    let go = |exec: &str| {
        let mut r = json(&run(&[
            "band-map", "--b", "0,2,5", "--n", "64", "--exec", exec,
        ]));
        r["config"]["exec"] = Value::Null;
        r
    };
    assert_eq!(go("sequential"), go("parallel"));
}

#[test]
fn remaining_commands_run() {
    for args in [
        &["identities", "--b", "3", "--n", "1024"][..],
        &[
            "evolve-linear",
            "--n",
            "256",
            "--T",
            "1",
            "--fit-start",
            "0.2",
        ],
        &["perturb", "--n", "256", "--T", "0.5"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let r = json(&out);
        assert_eq!(r["command"], args[0]);
    }
}
