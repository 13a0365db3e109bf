use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

fn motslab(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_motslab"))
        .args(args)
        .current_dir(dir)
        .env_remove("MOTSLAB_OUT")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let i = rd.headers().unwrap().iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rd.records().map(|r| r.unwrap()[i].to_string()).collect()
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(motslab(d, &["audit", "--theorem", "index", "--genus", "0", "--boundary", "3", "--index", "1"]).0, 0);
    assert_eq!(motslab(d, &["audit", "--theorem", "index", "--genus", "0", "--boundary", "10", "--index", "1"]).0, 1);
    assert_eq!(motslab(d, &["audit", "--theorem", "index", "--genus", "0", "--boundary", "3", "--index", "2"]).0, 2);
    let horizon = ["--data", "schwarzschild-iso:m=1", "--surface", "sphere:r=0.5", "--grid", "16x32"];
    let mut args = vec!["audit", "--theorem", "g-quantity"];
    args.extend(horizon);
    assert_eq!(motslab(d, &args).0, 3);
    assert_eq!(motslab(d, &["audit", "--theorem", "no-such-theorem"]).0, 64);
    assert_eq!(motslab(d, &["surface", "--grid", "abc"]).0, 64);
    assert_eq!(motslab(d, &["surface", "--data", "nowhere"]).0, 64);
    assert_eq!(motslab(d, &["frobnicate"]).0, 64);

    std::fs::write(d.join("bad.cfg"), "no_such_key = 1\n").unwrap();
    assert_eq!(motslab(d, &["catalog", "--config", "bad.cfg"]).0, 64);
}

#[test]
fn eigen_on_horizon() {
    let tmp = TempDir::new().unwrap();
    let (code, _) = motslab(
        tmp.path(),
        &["eigen", "--data", "schwarzschild-iso:m=1", "--surface", "sphere:r=0.5", "--grid", "24x48", "--operator", "Ls", "-o", "out"],
    );
    assert_eq!(code, 0);
    let l: f64 = column(&tmp.path().join("out/eigen.csv"), "lambda1")[0].parse().unwrap();
    assert!((l - 0.25).abs() < 2.5e-3, "{l}");
    assert_eq!(read_csv(&tmp.path().join("out/eigenfunction.csv")).len(), 24 * 48);
}

#[test]
fn config_file_and_overrides() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    std::fs::write(
        d.join("run.cfg"),
        "# horizon\ndata = schwarzschild-iso:m=1\nsurface = sphere:r=0.5\ngrid = 12x24\noutput_dir = from-file\n",
    )
    .unwrap();
    assert_eq!(motslab(d, &["surface", "--config", "run.cfg"]).0, 0);
    assert!(d.join("from-file/surface.csv").exists());
    assert_eq!(motslab(d, &["surface", "--config", "run.cfg", "--surface", "sphere:r=2", "-o", "flag"]).0, 0);
    let a = std::fs::read_to_string(d.join("from-file/surface.csv")).unwrap();
    let b = std::fs::read_to_string(d.join("flag/surface.csv")).unwrap();
    assert_ne!(a, b);
    assert!(b.contains("12x24"));
}

#[test]
fn output_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_motslab"))
        .arg("catalog")
        .current_dir(tmp.path())
        .env("MOTSLAB_OUT", tmp.path().join("env-out"))
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(tmp.path().join("env-out/catalog.csv").exists());

    assert_eq!(motslab(tmp.path(), &["catalog"]).0, 0);
    assert!(tmp.path().join("motslab-out/catalog.csv").exists());
}

#[test]
fn sweep_rows_are_in_step_order() {
    let tmp = TempDir::new().unwrap();
    let (code, stdout) = motslab(
        tmp.path(),
        &[
            "sweep", "--command", "surface", "--param", "surface.r", "--from", "0.5", "--to", "2", "--steps", "4",
            "--grid", "8x16", "--workers", "3", "-o", "s",
        ],
    );
    assert_eq!(code, 0);
    let path = tmp.path().join("s/sweep_surface.csv");
    let mut rd = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..3], ["step", "surface.r", "exit_code"]);
    assert_eq!(column(&path, "step"), ["0", "1", "2", "3"]);
    let r: Vec<f64> = column(&path, "surface.r").iter().map(|s| s.parse().unwrap()).collect();
    for (i, want) in [0.5, 1.0, 1.5, 2.0].iter().enumerate() {
        assert!((r[i] - want).abs() < 1e-12);
    }
    for i in 0..4 {
        assert!(tmp.path().join(format!("s/sweep_surface/step_{i:04}/surface.csv")).exists());
    }
    assert!(stdout.starts_with("step,surface.r,exit_code"));
}
