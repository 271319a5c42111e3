use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_todashock"))
}

#[test]
fn critical_values_prints_four_rays() {
    let out = bin()
        .args(["critical-values", "--a", "1", "--b", "-4"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["xi_cr", "xi_cr_prime", "xi_cr1_prime", "xi_cr1"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert!(text.contains("2.387"), "xi_cr value missing:\n{text}");
}

#[test]
fn critical_values_rejects_non_shock_background() {
    let out = bin()
        .args(["critical-values", "--a", "1", "--b", "0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("shock condition"), "{err}");
}

#[test]
fn scattering_reports_edges_and_eigenvalues() {
    let dir = std::env::temp_dir().join("todashock_cli_scattering");
    std::fs::create_dir_all(&dir).unwrap();
    let chi_csv = dir.join("chi.csv");
    let out = bin()
        .args(["scattering", "--a", "1", "--b", "-4", "--grid", "40"])
        .arg("--chi-csv")
        .arg(&chi_csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("eigenvalues: none"), "{text}");
    assert!(text.contains("false"), "resonance flags expected:\n{text}");
    let csv = std::fs::read_to_string(&chi_csv).unwrap();
    assert!(csv.starts_with("z,im_chi\n"));
    assert!(csv.lines().count() > 30);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scattering_accepts_window_file() {
    let dir = std::env::temp_dir().join("todashock_cli_window");
    std::fs::create_dir_all(&dir).unwrap();
    let wfile = dir.join("window.txt");
    std::fs::write(&wfile, "# site a b\n0 0.5 2.0\n").unwrap();
    let out = bin()
        .args(["scattering", "--a", "1", "--b", "-4"])
        .arg("--window")
        .arg(&wfile)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("z = 0."), "expected one eigenvalue:\n{text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gfunction_prints_edge_and_band_period() {
    let out = bin()
        .args(["gfunction", "--a", "1", "--b", "-4", "--xi", "0.8"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("y        = -0.124098"), "{text}");
    assert!(text.contains("B        = 2.0728874"), "{text}");
}

#[test]
fn asymptote_emits_csv_rows() {
    let out = bin()
        .args(["asymptote", "--a", "1", "--b", "-4", "--t", "200", "--n-range", "160:163"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("n,t,xi,lambda_nt,b_hat,a2sum_hat\n"));
    assert_eq!(text.lines().count(), 5, "{text}");
}

#[test]
fn simulate_writes_snapshots_and_manifest() {
    let dir = std::env::temp_dir().join("todashock_cli_simulate");
    std::fs::remove_dir_all(&dir).ok();
    let out = bin()
        .args(["simulate", "--a", "1", "--b", "-4", "--t", "2", "--dt", "0.01", "--pad", "20"])
        .args(["--snapshot-every", "1"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("snapshot_t1.000.csv").exists());
    assert!(dir.join("snapshot_t2.000.csv").exists());
    let manifest = std::fs::read_to_string(dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("front_n ="));
    let snap = std::fs::read_to_string(dir.join("snapshot_t2.000.csv")).unwrap();
    assert!(snap.starts_with("n,a,b\n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn compare_runs_from_config_and_writes_outputs() {
    let dir = std::env::temp_dir().join("todashock_cli_compare");
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.txt");
    // desk-size run: too short for the decay checks to be meaningful, so the
    // exit code is not asserted, only the contract of the outputs
    std::fs::write(&cfg, "a = 1\nb = -4\nt_list = 4, 8, 16\ndt = 0.01\npad = 30\n").unwrap();
    let out = bin()
        .arg("compare")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("results"))
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS") || text.contains("FAIL"), "{text}");
    for name in ["compare.csv", "summary.csv", "decay.svg", "manifest.txt"] {
        assert!(dir.join("results").join(name).exists(), "missing {name}");
    }
    let manifest = std::fs::read_to_string(dir.join("results/manifest.txt")).unwrap();
    assert!(manifest.contains("xi_cr = 2.387"), "{manifest}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn compare_rejects_bad_config() {
    let dir = std::env::temp_dir().join("todashock_cli_badcfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.txt");
    std::fs::write(&cfg, "a = 1\nb = -4\nbogus_key = 7\n").unwrap();
    let out = bin().arg("compare").arg("--config").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    std::fs::remove_dir_all(&dir).ok();
}
