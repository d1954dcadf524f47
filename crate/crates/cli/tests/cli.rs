use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qtomo::grid::UniformGrid;
use qtomo::numkernel::C64;
use qtomo::radon::ImageGrid;
use qtomo::states::{density_from_json, density_to_json, random_density, trace_distance, DensityMatrix};
use qtomo::weyl::{number_state, read_tomogram_csv};
use tempfile::TempDir;

fn qtomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtomo")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_state(dir: &Path, name: &str, rho: &DensityMatrix) -> String {
    let path = dir.join(name);
    fs::write(&path, density_to_json(rho).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn verify_spin_module() {
    let out = qtomo(&["verify", "--module", "spin_tomography"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = stdout(&out);
    assert!(table.starts_with("module"));
    assert!(table.lines().skip(1).all(|l| l.starts_with("spin_tomography") && l.ends_with("PASS")));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&qtomo(&[])), 64);
    assert_eq!(code(&qtomo(&["frobnicate"])), 64);
    assert_eq!(code(&qtomo(&["verify", "--module", "nope"])), 64);
    assert_eq!(code(&qtomo(&["verify", "--bogus-flag"])), 64);
    assert_eq!(code(&qtomo(&["spin-tomogram", "--axis", "0,0,1"])), 64);
    assert_eq!(code(&qtomo(&["--help"])), 0);
    assert_eq!(code(&qtomo(&["--version"])), 0);
}

#[test]
fn group_reconstruct_round_trip() {
    let dir = TempDir::new().unwrap();
    let rho = random_density(2, 17).unwrap();
    let state = write_state(dir.path(), "rho.json", &rho);
    let chi = path(&dir, "chi.csv");
    assert_eq!(code(&qtomo(&["group-character", "--group", "pauli", "--state", &state, "--out", &chi])), 0);
    assert!(fs::read_to_string(&chi).unwrap().starts_with("g,re,im\n"));

    let out = qtomo(&["group-reconstruct", "--group", "pauli", "--chi", &chi]);
    assert_eq!(code(&out), 0);
    let back = density_from_json(&stdout(&out)).unwrap();
    assert!(trace_distance(&rho, &back).unwrap() < 1e-10);

    let rho3 = random_density(3, 4).unwrap();
    let state3 = write_state(dir.path(), "rho3.json", &rho3);
    let chi3 = path(&dir, "chi3.csv");
    assert_eq!(code(&qtomo(&["group-character", "--group", "heisenberg:3", "--state", &state3, "--out", &chi3])), 0);
    let out = qtomo(&["group-reconstruct", "--group", "heisenberg:3", "--chi", &chi3]);
    assert!(trace_distance(&rho3, &density_from_json(&stdout(&out)).unwrap()).unwrap() < 1e-10);
}

#[test]
fn group_reconstruct_rejects_mismatched_file() {
    let dir = TempDir::new().unwrap();
    let state = write_state(dir.path(), "rho.json", &random_density(2, 1).unwrap());
    let chi = path(&dir, "chi.csv");
    assert_eq!(code(&qtomo(&["group-character", "--group", "pauli", "--state", &state, "--out", &chi])), 0);
    assert_eq!(code(&qtomo(&["group-reconstruct", "--group", "cyclic:5", "--chi", &chi])), 1);
    assert_eq!(code(&qtomo(&["group-reconstruct", "--group", "octonion", "--chi", &chi])), 1);
    assert_eq!(code(&qtomo(&["group-reconstruct", "--group", "pauli", "--chi", &path(&dir, "missing.csv")])), 1);
}

#[test]
fn wh_tomogram_of_vacuum_is_normalized() {
    let dir = TempDir::new().unwrap();
    let state = write_state(dir.path(), "vac.json", &number_state(0, 2).unwrap());
    let out = qtomo(&[
        "wh-tomogram",
        "--state",
        &state,
        "--mu",
        "1",
        "--nu",
        "0",
        "--xmin",
        "-6",
        "--xmax",
        "6",
        "--nx",
        "241",
        "--cutoff",
        "32",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (grid, values) = read_tomogram_csv(&stdout(&out)).unwrap();
    assert!((grid.trapezoid(&values) - 1.0).abs() < 1e-6);
}

#[test]
fn wh_tomogram_tolerance_failures_exit_2() {
    let dir = TempDir::new().unwrap();
    // All the weight on the top level trips the tail-mass guard.
    let state = write_state(dir.path(), "top.json", &number_state(7, 8).unwrap());
    let out = qtomo(&[
        "wh-tomogram",
        "--state",
        &state,
        "--mu",
        "1",
        "--nu",
        "0",
        "--xmin",
        "-6",
        "--xmax",
        "6",
        "--nx",
        "61",
    ]);
    assert_eq!(code(&out), 2);
    // A grid that misses most of the mass.
    let vac = write_state(dir.path(), "vac.json", &number_state(0, 16).unwrap());
    let out =
        qtomo(&["wh-tomogram", "--state", &vac, "--mu", "1", "--nu", "0", "--xmin", "2", "--xmax", "6", "--nx", "41"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_state_file_exits_1() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    fs::write(&bad, r#"{"dim": 2, "re": [1.5, 0, 0, -0.5], "im": [0, 0, 0, 0]}"#).unwrap();
    assert_eq!(code(&qtomo(&["spin-tomogram", "--state", &bad, "--axis", "0,0,1"])), 1);
    fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&qtomo(&["spin-tomogram", "--state", &bad, "--axis", "0,0,1"])), 1);
}

#[test]
fn tol_flag_loosens_state_validation() {
    let dir = TempDir::new().unwrap();
    let slightly_off = path(&dir, "off.json");
    fs::write(&slightly_off, r#"{"dim": 2, "re": [0.5, 0, 0, 0.5000001], "im": [0, 0, 0, 0]}"#).unwrap();
    assert_eq!(code(&qtomo(&["spin-tomogram", "--state", &slightly_off, "--axis", "0,0,1"])), 1);
    assert_eq!(code(&qtomo(&["--tol", "1e-6", "spin-tomogram", "--state", &slightly_off, "--axis", "0,0,1"])), 0);
}

#[test]
fn spin_tomogram_json() {
    let dir = TempDir::new().unwrap();
    let up = write_state(dir.path(), "up.json", &DensityMatrix::basis_state(2, 0).unwrap());
    let out = qtomo(&["spin-tomogram", "--state", &up, "--axis", "0,0,-2"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["axis"], serde_json::json!([0.0, 0.0, -2.0]));
    let atoms = v["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    assert!((atoms[0]["X"].as_f64().unwrap() + 1.0).abs() < 1e-15);
    assert!((atoms[0]["w"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(code(&qtomo(&["spin-tomogram", "--state", &up, "--axis", "0,0,0"])), 1);
}

#[test]
fn wh_reconstruct_pipeline() {
    let dir = TempDir::new().unwrap();
    let vac = number_state(0, 16).unwrap();
    let state = write_state(dir.path(), "vac.json", &vac);
    let chi = path(&dir, "chi.csv");
    let made = qtomo(&["wh-characteristic", "--state", &state, "--box", "6", "--grid", "64", "--out", &chi]);
    assert_eq!(code(&made), 0);

    let out = qtomo(&["wh-reconstruct", "--chi", &chi, "--box", "6", "--grid", "64", "--cutoff", "16", "--psd-clip"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let back = density_from_json(&stdout(&out)).unwrap();
    assert!(trace_distance(&vac, &back).unwrap() < 0.05);

    // Flags that disagree with the file are a validation error.
    assert_eq!(code(&qtomo(&["wh-reconstruct", "--chi", &chi, "--box", "5", "--grid", "64", "--cutoff", "16"])), 1);

    // Without clipping, quadrature error can leave a slightly negative eigenvalue.
    let raw = qtomo(&["wh-reconstruct", "--chi", &chi, "--box", "6", "--grid", "64", "--cutoff", "16"]);
    match code(&raw) {
        0 => assert!(density_from_json(&stdout(&raw)).is_ok()),
        2 => assert!(String::from_utf8_lossy(&raw.stderr).contains("--psd-clip")),
        c => panic!("unexpected exit {c}"),
    }
}

#[test]
fn radon_and_iradon_files() {
    let dir = TempDir::new().unwrap();
    let g = UniformGrid::span(-5.0, 5.0, 64).unwrap();
    let img = ImageGrid::from_fn(g, g, |q, p| (-(q * q + p * p)).exp()).unwrap();
    let (csv, meta) = (path(&dir, "img.csv"), path(&dir, "img.json"));
    fs::write(&csv, img.to_csv()).unwrap();
    fs::write(&meta, img.metadata_json().unwrap()).unwrap();

    let sino = path(&dir, "sino.csv");
    let out = qtomo(&["radon", "--image", &csv, "--meta", &meta, "--angles", "90", "--nx", "129", "--out", &sino]);
    assert_eq!(code(&out), 0);
    assert!(fs::read_to_string(&sino).unwrap().starts_with("theta,"));

    let (back, pgm) = (path(&dir, "back.csv"), path(&dir, "back.pgm"));
    let out = qtomo(&["iradon", "--sinogram", &sino, "--half-width", "5", "--n", "64", "--out", &back, "--pgm", &pgm]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rec =
        ImageGrid::from_csv(&fs::read_to_string(&back).unwrap(), &fs::read_to_string(path(&dir, "back.json")).unwrap())
            .unwrap();
    let worst = rec.values().iter().zip(img.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 0.02, "{worst}");
    assert!(fs::read(&pgm).unwrap().starts_with(b"P5\n64 64\n255\n"));
}

#[test]
fn wigner_outputs() {
    let dir = TempDir::new().unwrap();
    let state = write_state(dir.path(), "one.json", &number_state(1, 8).unwrap());
    let out = qtomo(&["wigner", "--state", &state, "--grid", "-6,6,61"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("q,p,w\n"));
    assert_eq!(text.lines().count(), 1 + 61 * 61);

    let raw = path(&dir, "w.csv");
    assert_eq!(code(&qtomo(&["wigner", "--state", &state, "--grid", "-6,6,61", "--raw", "--out", &raw])), 0);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(path(&dir, "w.json")).unwrap()).unwrap();
    assert_eq!(meta["n"], 61);
    assert_eq!(code(&qtomo(&["wigner", "--state", &state, "--grid", "-6,6,61", "--raw"])), 64);
    assert_eq!(code(&qtomo(&["wigner", "--state", &state, "--grid", "-1,1,21"])), 2);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let h = 1.0 / 2f64.sqrt();
    let mut psi = vec![C64::new(0.0, 0.0); 8];
    psi[0] = C64::new(h, 0.0);
    psi[2] = C64::new(0.0, h);
    let state = write_state(dir.path(), "s.json", &DensityMatrix::pure(&psi).unwrap());
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            qtomo(&[
                "wh-tomogram",
                "--state",
                &state,
                "--mu",
                "0.3",
                "--nu",
                "-1.1",
                "--xmin",
                "-7",
                "--xmax",
                "7",
                "--nx",
                "101",
                "--cutoff",
                "24",
            ])
            .stdout
        })
        .collect();
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);

    let verify: Vec<Vec<u8>> = (0..2).map(|_| qtomo(&["--seed", "9", "verify", "--module", "states"]).stdout).collect();
    assert_eq!(verify[0], verify[1]);
}

#[test]
fn emitted_density_json_revalidates() {
    let dir = TempDir::new().unwrap();
    for seed in 0..5 {
        let rho = random_density(2, seed).unwrap();
        let state = write_state(dir.path(), "r.json", &rho);
        let chi = path(&dir, "c.csv");
        assert_eq!(code(&qtomo(&["group-character", "--group", "dihedral:4", "--state", &state, "--out", &chi])), 0);
        let out = path(&dir, "back.json");
        assert_eq!(code(&qtomo(&["group-reconstruct", "--group", "dihedral:4", "--chi", &chi, "--out", &out])), 0);
        assert!(density_from_json(&fs::read_to_string(&out).unwrap()).is_ok());
    }
}
