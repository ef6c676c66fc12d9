use std::path::Path;
use std::process::{Command, Output};

fn trustevo(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trustevo"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn point_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustevo(
        &["point", "--T", "1.2", "--S", "-0.3", "--epsilon", "0.1"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("(PD)"));
    assert!(stdout.contains("delta."));

    let csv = read(&dir.path().join("point.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("T,S,class,epsilon,mu_e,theta,p,rounds,beta,pop_size,"));
    assert!(lines[1].starts_with("1.2,-0.3,PD,0.1,0,3,0.25,50,0.1,100,"));

    let manifest: toml::Value = toml::from_str(&read(&dir.path().join("manifest.toml"))).unwrap();
    assert_eq!(manifest["command"].as_str(), Some("point"));
    assert_eq!(
        manifest["params"]["interaction"]["epsilon"].as_float(),
        Some(0.1)
    );
    assert_eq!(manifest["settings"]["T"].as_str(), Some("1.2"));
}

#[test]
fn two_by_two_grid_has_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustevo(
        &[
            "sweep-grid",
            "--grid-res",
            "2",
            "--pools",
            "AllC,AllD;AllC,AllD,TFT",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(&dir.path().join("grid.csv"));
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    assert!(dir
        .path()
        .join("grid_delta.AllC+AllD+TFT-AllC+AllD.svg")
        .exists());
    assert!(dir.path().join("grid_AllC+AllD+TFT.sigma.TFT.svg").exists());
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "T = 0.5\nS = -0.5\nepsilon = 0.3\npools = \"AllC,AllD\"\n",
    )
    .unwrap();
    let out = trustevo(
        &[
            "point",
            "--config",
            cfg.to_str().unwrap(),
            "--epsilon",
            "0.05",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(&dir.path().join("point.csv"));
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("0.5,-0.5,SH,0.05,"), "{row}");
    assert!(csv.lines().next().unwrap().contains("AllC+AllD.sigma.AllD"));
}

#[test]
fn epsilon_sweep_has_requested_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustevo(&["sweep-epsilon", "--steps", "6"], dir.path());
    assert!(out.status.success());
    let csv = read(&dir.path().join("epsilon.csv"));
    let eps: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(eps, ["0", "0.1", "0.2", "0.3", "0.4", "0.5"]);
    assert!(dir
        .path()
        .join("epsilon_sigma_AllC+AllD+TFT+TUC+TUD.svg")
        .exists());
}

#[test]
fn error_sweep_records_error_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustevo(&["sweep-error", "--steps", "3", "--S", "0.5"], dir.path());
    assert!(out.status.success());
    let csv = read(&dir.path().join("error.csv"));
    let mus: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap())
        .collect();
    assert_eq!(mus, ["0", "0.05", "0.1"]);
}

#[test]
fn figure_preset_writes_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustevo(&["figures", "fig5", "--steps", "3"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["PD", "SD", "SH"] {
        let csv = read(&dir.path().join("fig5").join(format!("{name}.csv")));
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().contains(",0.25,"));
    }
    let manifest = read(&dir.path().join("fig5").join("manifest.toml"));
    assert!(manifest.contains("mu_e_range"));
}

#[test]
fn long_interaction_variant_uses_hundred_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustevo(&["figures", "fig6", "--steps", "2"], dir.path());
    assert!(out.status.success());
    let long = read(&dir.path().join("fig6").join("r100_PD.csv"));
    assert!(long.lines().nth(1).unwrap().contains(",3,0.25,100,"));
    let trustful = read(&dir.path().join("fig6").join("p0.04_SH.csv"));
    assert!(trustful.lines().nth(1).unwrap().contains(",3,0.04,50,"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = trustevo(&["selftest", "--samples", "20000"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("PASS closed form vs exact"), "{stdout}");
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["point", "--T", "3"],
        vec!["point", "--pools", "AllC"],
        vec!["point", "--pools", "AllC,Bogus"],
        vec!["sweep-grid", "--grid-res", "1"],
        vec!["point", "--mu-e", "0.7"],
    ] {
        let out = trustevo(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error:"),
            "{args:?}"
        );
    }
}
