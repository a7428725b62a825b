use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dqc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqc"))
        .current_dir(dir)
        .env_remove("DQC_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        ("id2.circ", "# nothing happens\n"),
        ("xflip.circ", "rot X 1.5707963267948966\n"),
        ("mix.circ", "rot XZI 0.3\ncrot 1 0 IYX 0.7\nrot ZZZ -0.45\nphase 0.2\n"),
        ("bad.circ", "rot XZ 0.3\ncrot 1 0 IY 0.7\nfrob ZZ 1\n"),
        ("badletter.circ", "rot XQ 0.3\n"),
        ("z.ham", "1.0 Z\n"),
        ("xz.ham", "1 X\n1 Z\n"),
        ("bad.ham", "1.0 Z\nabc ZI\n"),
    ];
    for (name, body) in files {
        fs::write(dir.path().join(name), body).unwrap();
    }
    dir
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() <= tol
}

#[test]
fn trace_pair_on_identity() {
    let dir = workspace();
    let v = json(&dqc(dir.path(), &["trace-pair", "--circuit", "id2.circ", "--qubits", "2", "--a", "ZI", "--b", "ZI"]));
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["seed"], 0);
    assert!(close(&v["estimate_re"], 1.0, 1e-12));
    assert!(close(&v["dense_oracle"]["re"], 1.0, 1e-12));
    assert!(v["stderr"].is_number() && v["shots"].as_u64().unwrap() > 0);
}

#[test]
fn estimates_sit_near_their_oracles() {
    let dir = workspace();
    let runs: [&[&str]; 3] = [
        &["trace-pair", "--circuit", "mix.circ", "--a", "XYZ", "--b", "ZIZ"],
        &["pauli-coeff", "--circuit", "mix.circ", "--b", "ZZZ"],
        &["matrix-element", "--circuit", "mix.circ", "--a", "010", "--b", "110"],
    ];
    for args in runs {
        let v = json(&dqc(dir.path(), args));
        let eps = v["epsilon"].as_f64().unwrap();
        for part in ["re", "im"] {
            let est = v[format!("estimate_{part}")].as_f64().unwrap();
            let want = v["dense_oracle"][part].as_f64().unwrap();
            assert!((est - want).abs() <= 2.0 * eps, "{args:?} {part}: {est} vs {want}");
        }
    }
}

#[test]
fn small_examples_are_exact_in_expectation() {
    let dir = workspace();
    let v = json(&dqc(dir.path(), &["matrix-element", "--circuit", "xflip.circ", "--a", "0", "--b", "1"]));
    assert!(close(&v["dense_oracle"]["im"], -1.0, 1e-12));
    assert!(close(&v["estimate_im"], -1.0, 0.1));
    let v = json(&dqc(dir.path(), &["pauli-coeff", "--circuit", "xflip.circ", "--b", "X"]));
    assert!(close(&v["dense_oracle"]["im"], -1.0, 1e-12));
    let v = json(&dqc(dir.path(), &["pseudo-pure", "--circuit", "id2.circ", "--qubits", "2"]));
    assert!(close(&v["dense_oracle"]["re"], 1.0, 1e-12));
    assert!(close(&v["scale"], 0.5, 1e-15));
    assert!(close(&v["estimate_re"], 1.0, 0.2));
}

#[test]
fn spectrum_of_sigma_z() {
    let dir = workspace();
    let out = dqc(dir.path(), &["spectrum", "--hamiltonian", "z.ham", "--dt", "0.2", "--npoints", "256", "--out", "s.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("frequency,intensity,stderr"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 256);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let res = side["resolution"].as_f64().unwrap();
    let mut peaks: Vec<f64> = side["peaks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["frequency"].as_f64().unwrap())
        .collect();
    peaks.sort_by(f64::total_cmp);
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    assert!((peaks[0] + 1.0).abs() <= res && (peaks[1] - 1.0).abs() <= res);
    assert_eq!(side["oracle_eigenvalues"], serde_json::json!([-1.0, 1.0]));
    let top = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert!((top[0].abs() - 1.0).abs() <= res);
}

#[test]
fn unitary_spectrum_reports_eigenphases() {
    let dir = workspace();
    fs::write(dir.path().join("w.circ"), "rot ZI 0.5\nrot IZ 0.25\n").unwrap();
    let out = dqc(dir.path(), &["unitary-spectrum", "--circuit", "w.circ", "--npoints", "128", "--out", "u.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("u.json")).unwrap()).unwrap();
    let phases: Vec<f64> = side["oracle_eigenphases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (p, want) in phases.iter().zip([-0.75, -0.25, 0.25, 0.75]) {
        assert!((p - want).abs() < 1e-10, "{phases:?}");
    }
    let res = side["resolution"].as_f64().unwrap();
    for p in side["peaks"].as_array().unwrap() {
        let f = p["frequency"].as_f64().unwrap();
        assert!(phases.iter().any(|q| (q - f).abs() <= res), "{f}");
    }
}

#[test]
fn nyquist_guard_and_force() {
    let dir = workspace();
    let out = dqc(dir.path(), &["spectrum", "--hamiltonian", "z.ham", "--dt", "4", "--npoints", "16"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
    let out = dqc(dir.path(), &["spectrum", "--hamiltonian", "z.ham", "--dt", "4", "--npoints", "16", "--force"]);
    assert!(out.status.success());
}

#[test]
fn parse_errors_exit_two_with_location() {
    let dir = workspace();
    let out = dqc(dir.path(), &["simulate", "--circuit", "bad.circ"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.circ:3:1") && err.contains("frob"), "{err}");
    let out = dqc(dir.path(), &["simulate", "--circuit", "badletter.circ"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("badletter.circ:1:6"));
    let out = dqc(dir.path(), &["trotter-check", "--hamiltonian", "bad.ham", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.ham:2:1"));
    let out = dqc(dir.path(), &["simulate", "--circuit", "missing.circ"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dqc(dir.path(), &["trace-pair", "--circuit", "mix.circ", "--a", "XY", "--b", "ZZZ"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dqc(dir.path(), &["simulate", "--circuit", "mix.circ", "--meter", "psychic"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dqc(dir.path(), &["simulate", "--circuit", "mix.circ", "--dense-limit", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_for_a_seed() {
    let dir = workspace();
    let runs: [&[&str]; 4] = [
        &["pauli-coeff", "--circuit", "mix.circ", "--b", "XYZ", "--seed", "7"],
        &["simulate", "--circuit", "mix.circ", "--observables", "ZII,XYZ", "--meter", "gaussian", "--noise-variance", "2", "--seed", "7"],
        &["spectrum", "--hamiltonian", "xz.ham", "--dt", "0.5", "--npoints", "32", "--trotter-steps", "3", "--seed", "7"],
        &["separation", "--n", "2..3", "--r", "1", "--ancillas", "0,1", "--trials", "10", "--seed", "7"],
    ];
    for args in runs {
        let a = dqc(dir.path(), args);
        let b = dqc(dir.path(), args);
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let mut other: Vec<&str> = args.to_vec();
        *other.last_mut().unwrap() = "8";
        assert_ne!(dqc(dir.path(), &other).stdout, a.stdout, "{args:?}");
    }
}

#[test]
fn environment_mirrors_flags() {
    let dir = workspace();
    let args = ["pauli-coeff", "--circuit", "mix.circ", "--b", "XYZ"];
    let flag = dqc(dir.path(), &[&args[..], &["--seed", "5", "--epsilon", "0.1"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_dqc"))
        .current_dir(dir.path())
        .env("DQC_SEED", "5")
        .env("DQC_EPSILON", "0.1")
        .args(args)
        .output()
        .unwrap();
    assert!(flag.status.success());
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(json(&env)["seed"], 5);
}

#[test]
fn shots_override_epsilon() {
    let dir = workspace();
    let v = json(&dqc(dir.path(), &["simulate", "--circuit", "mix.circ", "--shots", "3700"]));
    assert_eq!(v["readings"][0]["shots"], 3700);
    assert!(close(&v["epsilon"], (4.0f64 / 100.0).sqrt(), 1e-9));
    let out = dqc(dir.path(), &["simulate", "--circuit", "mix.circ", "--shots", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn separation_table() {
    let dir = workspace();
    let out = dqc(dir.path(), &["separation", "--n", "2..3", "--r", "0..1", "--ancillas", "0", "--trials", "20"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,r,m,bound,observed_max,violations,trials,method"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let bound: f64 = row[3].parse().unwrap();
        let observed: f64 = row[4].parse().unwrap();
        assert!(observed <= bound + 1e-9);
        assert_eq!(row[5], "0");
        assert_eq!(row[7], "exact");
    }
    assert_eq!(rows[0][..4], ["2", "0", "2", "0"]);
    assert_eq!(rows[1][..4], ["2", "1", "2", "1"]);
}

#[test]
fn trotter_check_first_order() {
    let dir = workspace();
    let v = json(&dqc(dir.path(), &["trotter-check", "--hamiltonian", "xz.ham", "--t", "1", "--steps", "8,16,32,64"]));
    assert_eq!(v["method"], "exact");
    assert!(close(&v["slope"], -1.0, 0.1), "{}", v["slope"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let errors: Vec<f64> = rows.iter().map(|r| r["f_error"].as_f64().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn simulate_reads_observables_and_dumps_state() {
    let dir = workspace();
    let v = json(&dqc(
        dir.path(),
        &["simulate", "--circuit", "mix.circ", "--init", "dqcp", "--observables", "ZII,IXY,III", "--dump-state", "rho.csv"],
    ));
    let readings = v["readings"].as_array().unwrap();
    assert_eq!(readings.len(), 3);
    let eps = v["epsilon"].as_f64().unwrap();
    for r in readings {
        let est = r["estimate"].as_f64().unwrap();
        let want = r["dense_oracle"].as_f64().unwrap();
        assert!((est - want).abs() <= eps, "{r}");
    }
    assert_eq!(readings[2]["dense_oracle"], 1.0);
    let rho = fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    assert_eq!(rho.lines().count(), 8);
    let out = dqc(dir.path(), &["simulate", "--circuit", "mix.circ", "--init", "thermal"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = workspace();
    let path: PathBuf = dir.path().join("r.json");
    let out = dqc(dir.path(), &["pseudo-pure", "--circuit", "xflip.circ", "--out", "r.json"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert!(close(&v["dense_oracle"]["re"], -1.0, 1e-12));
}
