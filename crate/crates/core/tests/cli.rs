use std::process::Command;

fn corrloss() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corrloss"))
}

#[test]
fn simulate_writes_report_and_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = corrloss()
        .args(["simulate", "--distance", "3", "--p-loss", "0.01", "--decoder", "fast,independent", "--shots", "300", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("d=3")).count(), 2, "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["points"].as_array().unwrap().len(), 1);
    let csv = std::fs::read_to_string(dir.path().join("points.csv")).unwrap();
    assert!(csv.starts_with("d,rounds,p_l,p_c,p_d,decoder,"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn sequential_flag_gives_identical_output() {
    let args = ["simulate", "--distance", "3", "--p-loss", "0.02", "--p-corr", "0.5", "--shots", "200", "--seed", "4"];
    let a = corrloss().args(args).output().unwrap();
    let b = corrloss().args(args).arg("--sequential").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_reads_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, "distances = [3]\ndecoders = [\"fast\"]\nshots = 100\n[grid]\np_loss = [0.01, 0.02]\np_corr = [1.0]\np_depol = [0.0]\n").unwrap();
    let out = corrloss().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("report.json").exists() && dir.path().join("points.csv").exists());
}

#[test]
fn bad_input_exits_nonzero() {
    let even = corrloss().args(["simulate", "--distance", "4", "--p-loss", "0.01"]).output().unwrap();
    assert!(!even.status.success());
    assert!(String::from_utf8_lossy(&even.stderr).contains("error"));
    let p = corrloss().args(["simulate", "--distance", "3", "--p-loss", "1.5"]).output().unwrap();
    assert!(!p.status.success());
    let decoder = corrloss().args(["simulate", "--distance", "3", "--p-loss", "0.01", "--decoder", "nope"]).output().unwrap();
    assert!(!decoder.status.success());
}
