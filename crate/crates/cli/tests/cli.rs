use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn skinbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skinbench")).args(args).output().expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let m = manifest(dir);
    m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            let name = f["file"].as_str().unwrap().to_string();
            let bytes = fs::read(dir.join(&name)).unwrap();
            (name, bytes)
        })
        .collect()
}

fn replay_matches(args: &[&str]) {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let mut full = args.to_vec();
    full.extend(["--out", a.to_str().unwrap()]);
    let o = skinbench(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = skinbench(&["--replay", a.join("manifest.json").to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let first = outputs(&a);
    assert!(!first.is_empty());
    assert_eq!(first, outputs(&b));
    assert_eq!(manifest(&a)["config"], manifest(&b)["config"]);
}

#[test]
fn replay_reproduces_spectrum() {
    replay_matches(&["spectrum", "--L", "10", "--digits", "30"]);
}

#[test]
fn replay_reproduces_cloud_and_disorder() {
    replay_matches(&["cloud", "--L", "6", "--digits", "25", "--samples", "3", "--sample-seed", "9"]);
    replay_matches(&["disorder", "--L", "4,6", "--W", "0.5,4", "--samples", "2", "--digits", "25", "--seed", "3"]);
}

#[test]
fn replay_reproduces_evolution() {
    replay_matches(&["evolve", "--L", "6", "--digits", "25", "--tmax", "1", "--dt", "0.1", "--window", "0.5"]);
}

#[test]
fn evolution_file_is_named_from_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |out: &str, l: &str| {
        let dir = tmp.path().join(out);
        let o = skinbench(&["evolve", "--L", l, "--digits", "20", "--tmax", "0.5", "--dt", "0.1", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        manifest(&dir)["outputs"][0]["file"].as_str().unwrap().to_string()
    };
    let a = run("a", "4");
    assert!(a.starts_with("evolve-") && a.ends_with(".csv"));
    assert_eq!(a, run("b", "4"));
    assert_ne!(a, run("c", "6"));
    let csv = fs::read_to_string(tmp.path().join("a").join(&a)).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,n_1,n_2,n_3,n_4,I_total,S,log_norm");
    assert_eq!(csv.lines().count(), 1 + 6);
}

#[test]
fn manifest_records_every_default() {
    let tmp = tempfile::tempdir().unwrap();
    let o = skinbench(&["norms", "--out", tmp.path().to_str().unwrap(), "--tmax", "0.2", "--L", "4", "--digits", "20"]);
    assert_eq!(code(&o), 0);
    let m = manifest(tmp.path());
    let cfg = m["config"].as_object().unwrap();
    for key in ["model", "L", "J", "gamma", "bc", "digits", "double_emulation", "dt", "tmax"] {
        assert!(cfg.contains_key(key), "missing {key}");
    }
    assert_eq!(m["precision_digits"], 20);
    assert_eq!(m["status"], "ok");
    let out = &m["outputs"][0];
    let bytes = fs::read(tmp.path().join(out["file"].as_str().unwrap())).unwrap();
    assert_eq!(out["bytes"].as_u64().unwrap() as usize, bytes.len());
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    fs::write(&cfg, r#"{"L": 8, "gamma": 0.5, "digits": 30}"#).unwrap();
    let out = tmp.path().join("o");
    let o = skinbench(&["cond", "--config", cfg.to_str().unwrap(), "--L", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["config"]["L"], 6);
    assert_eq!(m["config"]["gamma"], 0.5);
    assert_eq!(m["config"]["digits"], 30);
    let exact = m["metrics"]["log10_cond_exact"].as_f64().unwrap();
    assert!((exact - 2.5 * 3f64.log10()).abs() < 1e-12, "{exact}");
    let lc = m["metrics"]["log10_cond"].as_f64().unwrap();
    assert!((lc - exact).abs() < 0.1, "{lc}");
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&skinbench(&[])), 2);
    assert_eq!(code(&skinbench(&["spectrum", "--bogus", "--out", out])), 2);
    assert_eq!(code(&skinbench(&["spectrum", "--delta", "0.3", "--out", out])), 2);
    assert_eq!(code(&skinbench(&["spectrum", "--W", "1", "--out", out])), 2);
    assert_eq!(code(&skinbench(&["evolve", "--L", "5", "--out", out])), 2);
    assert_eq!(code(&skinbench(&["spectrum", "--digits", "0", "--out", out])), 2);
    let cfg = tmp.path().join("c.json");
    fs::write(&cfg, r#"{"L": 8, "typo": 1}"#).unwrap();
    assert_eq!(code(&skinbench(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out])), 2);
    fs::write(&cfg, r#"{"command": "norms", "L": 8}"#).unwrap();
    assert_eq!(code(&skinbench(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_skinbench"))
        .args(["spectrum", "--L", "4", "--out", out])
        .env("SKINBENCH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(!tmp.path().join("manifest.json").exists());
}

#[test]
fn numerical_failure_exits_3_with_context() {
    let tmp = tempfile::tempdir().unwrap();
    let o = skinbench(&["audit", "--probes", "4,6", "--digits", "20", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let m = manifest(tmp.path());
    assert_eq!(m["status"], "numerical_failure");
    assert_eq!(m["error"]["kind"], "FitFailure");
    assert!(m["error"]["message"].as_str().unwrap().contains("3 probe"));
    assert!(m["outputs"].as_array().unwrap().is_empty());
}

#[test]
fn thread_cap_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str, threads: &str| {
        let out = tmp.path().join(dir);
        let o = Command::new(env!("CARGO_BIN_EXE_skinbench"))
            .args(["pseudo", "--L", "6", "--nx", "5", "--ny", "4", "--digits", "25", "--out", out.to_str().unwrap()])
            .env("SKINBENCH_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        outputs(&out)
    };
    assert_eq!(run("a", "1"), run("b", "3"));
}

#[test]
fn subcommand_outputs_have_expected_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str, &str)] = &[
        (&["spectrum", "--L", "4", "--digits", "20"], "spectrum.csv", "index,re,im,residual"),
        (&["wavefunctions", "--L", "4", "--digits", "20"], "wavefunctions.csv", "mode,energy_re,energy_im,site,re,im,abs"),
        (&["pseudo", "--L", "4", "--nx", "3", "--ny", "3", "--digits", "20"], "pseudo.csv", "re,im,log10_smin"),
        (&["cloud", "--L", "4", "--samples", "2", "--digits", "20"], "cloud.csv", "sample,re,im"),
        (&["cond", "--L", "4", "--digits", "20"], "cond.csv", "L,log10_cond,log10_cond_exact"),
        (&["norms", "--L", "4", "--tmax", "0.2", "--digits", "20"], "norms.csv", "t,log_norm,log10_norm"),
        (&["qrlab", "--L", "4", "--iters", "5", "--digits", "16"], "qrlab.csv", "call,min_denominator"),
        (&["manybody", "--L", "4", "--digits", "20"], "manybody_spectrum.csv", "index,re,im,residual"),
        (&["disorder", "--L", "4", "--W", "1", "--samples", "2", "--digits", "20"], "disorder_cells.csv", "W,L,mean_log10_cond,stderr"),
        (&["audit", "--probes", "4,5,6", "--target", "10", "--digits", "20"], "audit.csv", "L,log10_cond,fit"),
    ];
    for (k, (args, file, header)) in cases.iter().enumerate() {
        let out = tmp.path().join(k.to_string());
        let mut full = args.to_vec();
        full.extend(["--out", out.to_str().unwrap()]);
        let o = skinbench(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(out.join(file)).unwrap();
        assert_eq!(csv.lines().next().unwrap(), *header, "{args:?}");
    }
}

#[test]
fn manybody_reports_sector() {
    let tmp = tempfile::tempdir().unwrap();
    let o = skinbench(&["manybody", "--L", "6", "--N", "3", "--digits", "30", "--tmax", "0.2", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(tmp.path());
    assert_eq!(m["metrics"]["dim"], 20);
    assert_eq!(m["metrics"]["span_enumerated"], 9);
    assert_eq!(m["metrics"]["span_closed_form"], 9);
    assert!(m["metrics"]["max_abs_imag"].as_f64().unwrap() < 1e-20);
    assert!(tmp.path().join("manybody_norms.csv").exists());
}
