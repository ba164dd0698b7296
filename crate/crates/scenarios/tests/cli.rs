use std::fs;
use std::process::Command;

fn hgpol() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hgpol"));
    c.env_remove("HGPOL_OUT_DIR");
    c
}

const DEFAULT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.toml");

#[test]
fn validate_accepts_default_and_rejects_bad_config() {
    let ok = hgpol()
        .args(["validate", "--config", DEFAULT])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("ok"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        fs::read_to_string(DEFAULT)
            .unwrap()
            .replace("gamma_xy = 0.1", "gamma_xy = 0.9"),
    )
    .unwrap();
    let out = hgpol()
        .args(["validate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma_xy"));
}

#[test]
fn run_writes_csv_manifest_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgpol()
        .args([
            "run",
            "--config",
            DEFAULT,
            "--format",
            "csv+svg",
            "--threads",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("default.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert!(csv.starts_with("figure,path_kind,z_m,zenith_rad,m,n,sigma0xx_m,rho_x_m,rho_y_m,P,I_norm,inv_rho2_m2,status,config_hash\n"));
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("default.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["rows"], 200);
    assert_eq!(manifest["scenarios"][0]["resolved"]["wavelength_m"], 800e-9);
    assert!(manifest["software"]
        .as_str()
        .unwrap()
        .contains(env!("CARGO_PKG_VERSION")));
    let svg = fs::read_to_string(dir.path().join("default.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn figure_uses_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgpol()
        .args(["figure", "fig3"])
        .env("HGPOL_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 45);

    let out = hgpol()
        .args(["figure", "table1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(dir.path().join("table1.csv"))
            .unwrap()
            .lines()
            .count(),
        8
    );
}

#[test]
fn numeric_failures_give_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(DEFAULT)
        .unwrap()
        .replace("ground_altitude_m = 0.0", "ground_altitude_m = 3000.0");
    let cfg = dir.path().join("high.toml");
    fs::write(&cfg, text).unwrap();
    let out = hgpol()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let csv = fs::read_to_string(dir.path().join("default.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert!(csv.contains(",error: "));
}

#[test]
fn unknown_figure_is_a_usage_error() {
    let out = hgpol().args(["figure", "fig9"]).output().unwrap();
    assert!(!out.status.success());
}
