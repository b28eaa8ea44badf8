use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landau-torus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out-dir", dir.to_str().unwrap()]);
    run(&all)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn listed_outputs(dir: &Path) -> BTreeSet<String> {
    json(&dir.join("manifest.json"))["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

fn files_on_disk(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

#[test]
fn basis_writes_grids_and_duality() {
    let tmp = TempDir::new().unwrap();
    let out = run_in(tmp.path(), &["basis", "--N", "1", "--nu", "0", "--grid", "128"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for stem in ["psi_re_nu0", "psi_im_nu0", "density_nu0"] {
        let csv = fs::read_to_string(tmp.path().join(format!("{stem}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 128);
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 128);
    }
    let report = json(&tmp.path().join("basis_report.json"));
    assert!(report["duality_max_relative"].as_f64().unwrap() < 1e-12);
    assert!(report["boundary_max_relative_fourier"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["double_shift_sign"].as_i64(), Some(-1));
}

#[test]
fn basis_rejects_out_of_range_nu() {
    let tmp = TempDir::new().unwrap();
    let out = run_in(tmp.path(), &["basis", "--N", "3", "--nu", "5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nu = 5"));
}

#[test]
fn unquantized_torus_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = run_in(tmp.path(), &["basis", "--L1", "1", "--L2", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0.318"));
}

#[test]
fn density_default_fluxes() {
    let tmp = TempDir::new().unwrap();
    let out = run_in(tmp.path(), &["density"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for n in [1, 3, 6, 10] {
        assert!(tmp.path().join(format!("deviation_N{n}_level0.csv")).exists());
    }
    assert!(tmp.path().join("decay_level0.csv").exists());
    let manifest = json(&tmp.path().join("manifest.json"));
    assert_eq!(manifest["passed"], Value::Bool(true));
}

#[test]
fn density_first_excited_level() {
    let tmp = TempDir::new().unwrap();
    let out = run_in(tmp.path(), &["density", "--level", "1", "--N", "1,3,6", "--grid", "48"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("deviation_N6_level1.csv").exists());
    assert!(tmp.path().join("decay_level1.csv").exists());
}

#[test]
fn translate_lattice_and_half_lattice() {
    let tmp = TempDir::new().unwrap();
    let lattice = tmp.path().join("lattice");
    let out = run_in(&lattice, &["translate", "--N", "3", "--a", "lattice:1,0"]);
    assert_eq!(code(&out), 0);
    let report = json(&lattice.join("translate_report.json"));
    assert_eq!(report["lattice"], Value::Bool(true));
    assert!(report["unitarity_defect"].as_f64().unwrap() < 1e-10);
    assert!(report["projection_defect"].as_f64().unwrap() < 1e-10);

    let half = tmp.path().join("half");
    let out = run_in(&half, &["translate", "--N", "3", "--a", "half:1,0"]);
    assert_eq!(code(&out), 0);
    let report = json(&half.join("translate_report.json"));
    assert_eq!(report["lattice"], Value::Bool(false));
    assert!(report["projection_defect"].as_f64().unwrap() > 1e-4);

    let zero = tmp.path().join("zero");
    let out = run_in(&zero, &["translate", "--N", "2", "--a", "0,0"]);
    assert_eq!(code(&out), 0);
    let report = json(&zero.join("translate_report.json"));
    assert!(report["unitarity_defect"].as_f64().unwrap() < 1e-10);
}

#[test]
fn cocycle_flux_cases() {
    let tmp = TempDir::new().unwrap();
    let cases = [("2pi_n", vec!["--N", "3"], true), ("3pi", vec!["--N", "3", "--flux", "3pi"], false), ("zero", vec!["--N", "1", "--flux", "0"], true)];
    for (name, extra, integral) in cases {
        let dir = tmp.path().join(name);
        let mut args = vec!["cocycle", "--triangles"];
        args.extend(extra);
        let out = run_in(&dir, &args);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let report = json(&dir.join("cocycle_report.json"));
        assert_eq!(report["theorem_holds"], Value::Bool(true), "{name}");
        assert_eq!(report["weil_integral"], Value::Bool(integral), "{name}");
        assert!(dir.join("triangles.csv").exists());
    }
}

#[test]
fn cocycle_reads_a_saved_mesh() {
    let tmp = TempDir::new().unwrap();
    let first = tmp.path().join("first");
    assert_eq!(code(&run_in(&first, &["cocycle", "--N", "2", "--mesh-n", "5"])), 0);
    let mesh = first.join("mesh.json");
    let second = tmp.path().join("second");
    let out = run_in(&second, &["cocycle", "--mesh", mesh.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let a = json(&first.join("cocycle_report.json"));
    let b = json(&second.join("cocycle_report.json"));
    assert_eq!(a["sum_c"], b["sum_c"]);
}

#[test]
fn verify_passes_and_detects_a_fault() {
    let tmp = TempDir::new().unwrap();
    let ok = tmp.path().join("ok");
    let out = run_in(&ok, &["verify", "--n-max", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&ok.join("manifest.json"))["passed"], Value::Bool(true));

    let bad = tmp.path().join("bad");
    let out = run_in(&bad, &["verify", "--n-max", "3", "--inject-fault", "boundary-sign"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&bad.join("manifest.json"))["passed"], Value::Bool(false));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let args = ["density", "--N", "1,3,6", "--grid", "32", "--seed", "7"];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&run_in(&a, &args)), 0);
    assert_eq!(code(&run_in(&b, &args)), 0);
    for name in files_on_disk(&a) {
        if name == "manifest.json" {
            continue;
        }
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn manifest_lists_exactly_the_written_files() {
    let tmp = TempDir::new().unwrap();
    let runs: [&[&str]; 5] = [
        &["basis", "--N", "2", "--grid", "16"],
        &["density", "--N", "1,3", "--grid", "16", "--format", "matrix"],
        &["translate", "--N", "2", "--a", "lattice:0,1"],
        &["cocycle", "--N", "2", "--triangles"],
        &["verify", "--n-max", "2"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        let out = run_in(&dir, args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(listed_outputs(&dir), files_on_disk(&dir), "{args:?}");
    }
}

#[test]
fn show_tolerances_prints_the_table() {
    let out = run(&["--show-tolerances"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["gram", "duality", "boundary", "commutator"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("run.conf");
    fs::write(&config, "# settings\nN = 2\nnu = 1\ngrid = 16\n").unwrap();
    let dir = tmp.path().join("out");
    let out = run_in(&dir, &["basis", "--config", config.to_str().unwrap(), "--N", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.join("basis_report.json"));
    assert_eq!(report["flux"].as_u64(), Some(3));
    assert_eq!(report["nu"].as_u64(), Some(1));
    assert_eq!(report["grid"].as_u64(), Some(16));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&run(&["basis", "--bogus"])), 2);
    assert_eq!(code(&run(&["translate", "--a", "not-a-number"])), 2);
}
