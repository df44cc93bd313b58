use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn wtail() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wtail"));
    c.env_remove("EVT_SEED");
    c
}

fn nidd() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/nidd.txt")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let dir = tmp.path().join(name);
        let out = wtail()
            .args(["simulate", "--dist", "weibull:0.25,0.25", "--n", "500", "--replicates", "10", "--seed", "7"])
            .args(extra)
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        dir_bytes(&dir)
    };
    let a = run("a", &[]);
    let b = run("b", &[]);
    let c = run("c", &["--serial"]);
    assert_eq!(a.len(), 3, "two curve files and a manifest");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let names: Vec<_> = a.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["curves_weibull-0.25-0.25_2.csv", "curves_weibull-0.25-0.25_4.csv", "manifest.json"]);
    let manifest = wtail::io::parse_manifest_json(std::str::from_utf8(&a[2].1).unwrap()).unwrap();
    assert_eq!(manifest.plan.seed, 7);
    assert_eq!(manifest.plan.k_grid, (2..=360).collect::<Vec<_>>());
    let rows = wtail::io::read_curves_csv(&a[0].1[..]).unwrap();
    assert_eq!(rows.len(), 359);
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, env: Option<&str>, seed: Option<&str>| {
        let dir = tmp.path().join(name);
        let mut c = wtail();
        c.args(["boxplot", "--dist", "absnormal", "--n", "200", "--replicates", "4", "--taus", "2"]);
        if let Some(v) = env {
            c.env("EVT_SEED", v);
        }
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        let out = c.arg("--out").arg(&dir).output().unwrap();
        let report = json_stdout(&out);
        (report["seed"].as_u64().unwrap(), dir_bytes(&dir))
    };
    let (s1, a) = run("env", Some("11"), None);
    let (s2, b) = run("flag", None, Some("11"));
    let (s3, c) = run("other", None, Some("12"));
    assert_eq!((s1, s2, s3), (11, 11, 12));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn nonpositive_value_exits_with_domain_code() {
    let tmp = tempfile::tempdir().unwrap();
    let file = write(tmp.path(), "zero.txt", "1.5\n0.0\n3\n");
    let out = wtail().arg("estimate").arg(&file).args(["--p", "0.01"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NonPositiveValue"));

    let out = wtail().arg("--json-errors").arg("estimate").arg(&file).args(["--p", "0.01"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "NonPositiveValue");
    assert_eq!(err["error"]["exit_code"], 2);
}

#[test]
fn missing_file_exits_with_io_code() {
    let out = wtail()
        .args(["--json-errors", "estimate", "/nonexistent/data.txt", "--p", "0.01"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "IoError");
    assert!(err["error"]["message"].as_str().unwrap().contains("/nonexistent/data.txt"));
}

#[test]
fn usage_errors_exit_2() {
    let out = wtail().args(["--json-errors", "estimate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "UsageError");
    let out = wtail().args(["simulate", "--dist", "gamma:-1,1", "--out", "/tmp/x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn three_point_file_returns_anchor() {
    let tmp = tempfile::tempdir().unwrap();
    let e = std::f64::consts::E;
    let file = write(tmp.path(), "three.txt", &format!("# three points\n1\n{e}\n\n{}\n", e * e));
    let out = wtail()
        .arg("estimate")
        .arg(&file)
        .args(["--k", "2", "--p", &(2.0f64 / 3.0).to_string(), "--estimator", "classic"])
        .output()
        .unwrap();
    let report = json_stdout(&out);
    assert_eq!(report["tau"].as_f64().unwrap(), 1.0);
    assert_eq!(report["estimates"][0]["value"].as_f64().unwrap(), e);
    assert_eq!(report["config"]["command"]["command"], "estimate");
    assert!(report["warnings"][0].as_str().unwrap().contains("inside the sample range"));
}

#[test]
fn constant_spacings_have_no_bias_term() {
    // log X_{n-j+1} − log X_{n-j} = 0.7 / (j log(n/j)) makes every log-spacing 0.7.
    let n = 120usize;
    let mut log_x = vec![0.0; n];
    log_x[n - 1] = 5.0;
    for j in 1..n {
        log_x[n - 1 - j] = log_x[n - j] - 0.7 / (j as f64 * (n as f64 / j as f64).ln());
    }
    let text: String = log_x.iter().map(|l| format!("{}\n", l.exp())).collect();
    let tmp = tempfile::tempdir().unwrap();
    let file = write(tmp.path(), "flat.txt", &text);
    let curve = tmp.path().join("curve.csv");
    let out = wtail()
        .arg("select-k")
        .arg(&file)
        .args(["--p", "1e-4", "--terms", "--curve"])
        .arg(&curve)
        .output()
        .unwrap();
    let report = json_stdout(&out);
    let terms = report["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 108 - 3 + 1);
    for t in terms {
        assert!(t["bias_sq"].as_f64().unwrap() < 1e-26, "{t}");
    }
    let fit = &report["fit"];
    assert!((fit["theta_tilde"].as_f64().unwrap() - 0.7).abs() < 1e-12);
    let rows = wtail::io::read_amse_csv(fs::File::open(&curve).unwrap()).unwrap();
    assert_eq!(rows.len(), terms.len());
    for ((k, amse), t) in rows.iter().zip(terms) {
        assert_eq!(t["k"].as_u64().unwrap() as usize, *k);
        let variance = t["variance"].as_f64().unwrap();
        assert!((amse - variance).abs() <= 1e-15 * variance);
    }
}

#[test]
fn nidd_return_levels() {
    let out = wtail()
        .arg("return-level")
        .arg(nidd())
        .args(["--years", "35", "--count", "154", "--N", "50", "--N", "100", "--threshold", "65"])
        .output()
        .unwrap();
    let report = json_stdout(&out);
    let levels = report["levels"].as_array().unwrap();
    let l50 = levels[0]["level"].as_f64().unwrap();
    let l100 = levels[1]["level"].as_f64().unwrap();
    assert!((l50 / 321.5 - 1.0).abs() < 0.05, "{l50}");
    assert!((l100 / 359.0 - 1.0).abs() < 0.05, "{l100}");
    let theta = levels[0]["estimates"][0]["theta"].as_f64().unwrap();
    assert!((0.86..=0.96).contains(&theta));
    assert_eq!(report["threshold"], 65.0);
}

#[test]
fn nidd_reduced_estimate_reports_both_coefficients() {
    let out = wtail()
        .arg("estimate")
        .arg(nidd())
        .args(["--auto-k", "--estimator", "both", "--p", &(35.0f64 / (154.0 * 50.0)).to_string()])
        .output()
        .unwrap();
    let report = json_stdout(&out);
    let est = report["estimates"].as_array().unwrap();
    assert_eq!(est.len(), 2);
    assert_eq!(est[0]["kind"], "classic");
    assert_eq!(est[1]["kind"], "reduced");
    assert_eq!(est[1]["rho_used"], -1.0);
    assert!(report["fit"]["theta_hat"].is_f64());
    assert_eq!(report["selection"]["k_min"], 4);
    assert_eq!(report["selection"]["k_max"], 138);
}

#[test]
fn limits_report() {
    let out = wtail().args(["limits", "--tau", "2", "--rho", "-1"]).output().unwrap();
    let report = json_stdout(&out);
    let l = &report["limits"];
    assert!((l["sigma2_tau"].as_f64().unwrap() - (0.5 - 2f64.ln()).powi(2)).abs() < 1e-15);
    assert!((l["sigma2_tilde_tau"].as_f64().unwrap() - 2f64.ln().powi(2)).abs() < 1e-15);
    assert_eq!(l["mu_tau"].as_f64().unwrap(), 0.0);
}
