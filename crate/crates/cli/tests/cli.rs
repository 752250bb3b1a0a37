use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracdrift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracdrift")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn beta_curve_is_deterministic_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[sweep]\nkappa_min = 1e-2\nkappa_max = 1e2\ncount = 41\n");
    let mut files = Vec::new();
    let out = dir.path().join("out");
    for _ in 0..2 {
        let o = fracdrift(&["beta-curve", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(fs::read(out.join("beta_curve.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert!(text.starts_with("# fracdrift "));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip_while(|l| *l != "kappa,beta,residual")
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 41);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    assert!(rows.iter().all(|r| r[1] < 0.5));
}

#[test]
fn empty_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[sweep]\nkappa_min = 1.0\nkappa_max = 1.0\n");
    let o = fracdrift(&["beta-curve", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_key_is_rejected_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nd = 3\nbogus = 1\n");
    let o = fracdrift(&["weights", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(fracdrift(&[]).status.code(), Some(2));
    assert_eq!(fracdrift(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn weights_report_has_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracdrift(&["weights", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("weights.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    for key in ["name", "measured", "bound", "tolerance", "params"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["grid", "dt", "eps", "seed"] {
        assert!(v["provenance"].get(key).is_some(), "{key}");
    }
    assert_eq!(v["run"]["config"]["model"]["d"], 3);
    assert_eq!(v["run"]["hash"].as_str().unwrap().len(), 64);
}

#[test]
fn lyapunov_reports_without_failing_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // a tolerance no quadrature meets: the report fails, the subcommand does not
    let cfg = write_config(dir.path(), "[checks.tolerances]\nlyapunov = 1e-300\n");
    let o = fracdrift(&["lyapunov", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL"));
}

#[test]
fn verify_all_propagates_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[checks]\nwhich = [\"lyapunov\", \"weights\"]\n[checks.tolerances]\nlyapunov = 1e-300\n");
    let o = fracdrift(&["verify-all", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dir.path().join("summary.json").exists());

    let cfg = write_config(dir.path(), "[checks]\nwhich = [\"lyapunov\", \"weights\"]\n");
    let o = fracdrift(&["verify-all", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn sde_profile_is_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[mc]\nn_particles = 4000\nt_end = 0.5\n");
    let mut profiles = Vec::new();
    for (run, threads) in [("a", "1"), ("b", "3")] {
        let out = dir.path().join(run);
        let o = fracdrift(&["sde", "--config", &cfg, "--seed", "42", "--threads", threads, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(out.join("profile.csv")).unwrap();
        assert!(text.contains("seed = 42"));
        profiles.push(fracdrift::io::parse_profile_csv(&text).unwrap());
    }
    assert_eq!(profiles[0], profiles[1]);
    assert_eq!(profiles[0].len(), 8);
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[output]\ndirectory = \"/nonexistent/never\"\n");
    let out = dir.path().join("here");
    let o = fracdrift(&["weights", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("weights.json").exists());
}

#[test]
fn config_fuzz_seeds() {
    use fracdrift_cli::config::{Overrides, RunConfig};
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/config_toml");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let parsed = RunConfig::from_toml(&text);
        if path.ends_with("unknown_key.toml") {
            assert!(parsed.is_err());
        } else {
            let resolved = parsed.unwrap().resolve(&Overrides::default()).unwrap();
            assert_eq!(RunConfig::from_toml(&resolved.to_toml()).unwrap(), resolved, "{}", path.display());
        }
        seen += 1;
    }
    assert_eq!(seen, 4);
}
