use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn strip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strip")).args(args).output().expect("binary runs")
}

fn coarse_config(dir: &Path, schedule: &str) -> String {
    let text = format!(
        "seed = 1\nworkers = 2\noutput_dir = {out:?}\n\n[problem]\nN = 2\np = 3.0\nL = 1.0\n\n[schedule]\n{schedule}\n\n\
         [sweep]\ntrivial_s_tol = 1e-4\ntrivial_c_tol = 1e-4\nl_tol = 0.01\nprofile_h = 0.01\norder_tol = 1e-6\n\n\
         [sweep.solver]\ntol = 1e-8\nmax_iter = 2000\ncg_tol = 1e-10\ncg_max_iter = 200\nstall_window = 400\nrearrange = false\n\n\
         [sweep.grid]\nh = 0.04\nm = 24\nr_max_factor = 20.0\nr_max_cap = 40.0\n\n\
         [eigen]\ncount = 3\nh = 0.01\nr_max = 25.0\n\n[pitchfork]\nratios = [1.01, 1.02, 1.05]\n\n[critical]\nN = 5\neps = 0.01\nL = 0.1\n",
        out = dir.join("out").display().to_string()
    );
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eigen_reports_principal_eigenvalue_and_critical_length() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = coarse_config(dir.path(), "values = [1.0]");
    let out = strip(&["--config", &cfg, "eigen"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let e = json(&dir.path().join("out/eigen.json"));
    assert!((e["lambda1"].as_f64().unwrap() - 3.0).abs() < 1e-3);
    assert!((e["L_star"].as_f64().unwrap() - 1.8138).abs() < 1e-3);
    let manifest = json(&dir.path().join("out/manifest.json"));
    assert_eq!(manifest["config_hash"], e["config_hash"]);
    let files: Vec<&str> = manifest["artifacts"].as_array().unwrap().iter().map(|a| a["file"].as_str().unwrap()).collect();
    assert!(files.contains(&"eigen.json") && files.contains(&"principal_eigenfunction.csv"));
    for a in manifest["artifacts"].as_array().unwrap() {
        assert_eq!(a["config_hash"], manifest["config_hash"]);
    }
}

#[test]
fn empty_schedule_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = coarse_config(dir.path(), "values = []");
    let out = strip(&["--config", &cfg, "sweep"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad config") && err.contains("schedule"), "{err}");
}

#[test]
fn schema_violations_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = coarse_config(dir.path(), "values = [1.0]");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("cg_tol = 1e-10", "cg_tol = \"small\"");
    std::fs::write(&cfg, text).unwrap();
    let out = strip(&["--config", &cfg, "eigen"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sweep.solver.cg_tol"), "{err}");

    let out = strip(&["--config", &cfg.replace("run.toml", "missing.toml"), "eigen"]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = coarse_config(dir.path(), "values = [1.0]");
    let out = strip(&["--config", &cfg, "--workers", "0", "eigen"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("workers"));
}

#[test]
fn template_is_a_loadable_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = strip(&["template"]);
    assert!(out.status.success());
    let path = dir.path().join("template.toml");
    std::fs::write(&path, &out.stdout).unwrap();
    let outdir = dir.path().join("gs");
    let run = strip(&["--config", path.to_str().unwrap(), "--out", outdir.to_str().unwrap(), "ground-state"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let g = json(&outdir.join("ground_state.json"));
    assert!((g["amplitude"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-6);
    assert!((g["gamma0"].as_f64().unwrap() - (16.0f64 / 3.0).sqrt()).abs() < 1e-5);
    let csv = std::fs::read_to_string(outdir.join("ground_state.csv")).unwrap();
    assert!(csv.starts_with("r,w\n") && !csv.contains('\r'));
}

#[test]
fn sweep_csv_is_byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = coarse_config(dir.path(), "values = [1.5, 2.5]");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ra = strip(&["--config", &cfg, "--out", a.to_str().unwrap(), "--workers", "1", "sweep"]);
    let rb = strip(&["--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "3", "sweep"]);
    assert!(ra.status.success() && rb.status.success(), "{}", String::from_utf8_lossy(&ra.stderr));
    let ca = std::fs::read(a.join("diagram.csv")).unwrap();
    let cb = std::fs::read(b.join("diagram.csv")).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("L,c,cstar,delta,s,classification\n"));
    assert!(text.contains(",trivial\n") && text.contains(",nontrivial\n"));
    assert_eq!(json(&a.join("manifest.json"))["config_hash"], json(&b.join("manifest.json"))["config_hash"]);
}

#[test]
fn critical_constants_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = coarse_config(dir.path(), "values = [1.0]");
    let out = strip(&["--config", &cfg, "critical-constants"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let c = json(&dir.path().join("out/constants.json"));
    let n3 = &c["constants"][0];
    assert_eq!(n3["N"], 3);
    assert!((n3["s"].as_f64().unwrap() - 5.4779).abs() < 1e-4);
    assert!(c["test_function"]["quotient"].as_f64().is_some());
    assert!(c["log_mass_fit"]["slope"].as_f64().is_some());
}

#[test]
fn validate_prints_one_line_per_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = coarse_config(dir.path(), "values = [1.0]");
    let out = strip(&["--config", &cfg, "validate", "--criteria", "1,2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("criterion  1 [PASS]") && lines[1].starts_with("criterion  2 [PASS]"), "{stdout}");
    assert_eq!(json(&dir.path().join("out/validation.json"))["all_passed"], true);
}

#[test]
fn partial_config_fills_defaults_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let cfg_s = cfg.display().to_string();
    std::fs::write(&cfg, "[problem]\np = 2.0\n\n[schedule]\nmin = 0.5\nmax = 1.0\ncount = 2\n").unwrap();
    let out = dir.path().join("gs").display().to_string();
    let o = strip(&["--config", &cfg_s, "--out", &out, "ground-state"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let record = json(&dir.path().join("gs/ground_state.json"));
    assert!((record["amplitude"].as_f64().unwrap() - 1.5).abs() < 1e-6);

    std::fs::write(&cfg, "[sweep.solver]\ntoll = 1e-8\n").unwrap();
    let o = strip(&["--config", &cfg_s, "ground-state"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("toll"));
}
