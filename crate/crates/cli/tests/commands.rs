use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cnls_core::io::{Manifest, ProfileFile};
use tempfile::TempDir;

const REFERENCE: &str = "\
problem.N = 2
problem.p = 2.5
problem.m = 1
problem.coupling = 1
grid.n_r = 2048
grid.points = 128
grid.half_extent = 16
evolution.t_end = 2
";

fn cnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnls")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &str, config: &Path) -> Output {
    cnls(&[cmd, "--config", config.to_str().unwrap()])
}

fn manifest(dir: &Path, name: &str) -> Manifest {
    Manifest::read(&dir.join("out").join(name)).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn ground_state_run_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "ref.cfg", REFERENCE);
    let first = run("ground", &cfg);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let m = manifest(dir.path(), "ground.manifest");
    assert_eq!(m.get("status"), Some("ok"));
    assert!(m.get("level").unwrap().parse::<f64>().unwrap() > 0.0);
    assert_eq!(m.get("config.problem.p"), Some("2.5"));

    let profile_path = dir.path().join("out/ground_state.txt");
    let bytes = fs::read(&profile_path).unwrap();
    let loaded = ProfileFile::read(&profile_path).unwrap();
    assert_eq!(loaded.render().as_bytes(), &bytes[..]);
    assert!(loaded.config.contains(&("problem.coupling".to_string(), "1".to_string())));

    assert_eq!(run("ground", &cfg).status.code(), Some(0));
    assert_eq!(fs::read(&profile_path).unwrap(), bytes);
}

#[test]
fn mass_critical_exponent_is_a_computational_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", &REFERENCE.replace("problem.p = 2.5", "problem.p = 2"));
    let out = run("ground", &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error = ExponentOutOfRange"));
    let m = manifest(dir.path(), "ground.manifest");
    assert_eq!(m.get("status"), Some("error"));
    assert_eq!(m.get("error"), Some("ExponentOutOfRange"));
}

#[test]
fn config_errors_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let typo = write_config(dir.path(), "typo.cfg", &format!("{REFERENCE}evolution.dtt = 1e-3\n"));
    let out = run("ground", &typo);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("evolution.dtt"));
    let garbage = write_config(dir.path(), "garbage.cfg", &format!("{REFERENCE}grid.points = many\n"));
    assert_eq!(run("evolve", &garbage).status.code(), Some(3));
    assert_eq!(run("ground", &dir.path().join("absent.cfg")).status.code(), Some(3));
    assert_eq!(cnls(&["ground"]).status.code(), Some(3));
    assert_eq!(cnls(&["ground", "--config", "x", "--jobs", "0"]).status.code(), Some(3));
}

#[test]
fn missing_ground_state_is_a_dependency_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "ref.cfg", REFERENCE);
    for cmd in ["classify", "instability", "evolve"] {
        let out = run(cmd, &cfg);
        assert_eq!(out.status.code(), Some(2), "{cmd}: {}", stderr(&out));
        assert!(stderr(&out).contains("MissingDependency"));
    }
}

#[test]
fn classify_and_instability_from_a_persisted_ground_state() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "ref.cfg", REFERENCE);
    assert_eq!(run("ground", &cfg).status.code(), Some(0));
    let hash = manifest(dir.path(), "ground.manifest").get("profile.sha256").unwrap().to_string();

    let small = write_config(dir.path(), "small.cfg", &format!("{REFERENCE}experiment.amplitude = 0.1\n"));
    let out = run("classify", &small);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = manifest(dir.path(), "classify.manifest");
    assert_eq!(m.get("verdict"), Some("A_plus"));
    assert_eq!(m.get("ground_state.sha256"), Some(hash.as_str()));

    let unstable = write_config(dir.path(), "unstable.cfg", &format!("{REFERENCE}experiment.lambdas = 1.05\n"));
    let out = run("instability", &unstable);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = manifest(dir.path(), "instability.manifest");
    assert_eq!(m.get("verdict"), Some("A_minus"));
    assert_eq!(m.get("outcome"), Some("blowup_detected"));
    assert_eq!(m.get("lambda.1.verdict"), Some("A_minus"));
    assert_eq!(m.get("ground_state.sha256"), Some(hash.as_str()));
    let trace = fs::read_to_string(m.get("lambda.1.trace.path").unwrap()).unwrap();
    assert_eq!(trace.lines().next(), Some("t,M_1,E,G_1,Q,K_virial,flag"));

    let other = write_config(dir.path(), "other.cfg", &REFERENCE.replace("problem.coupling = 1", "problem.coupling = 2"));
    assert_eq!(run("classify", &other).status.code(), Some(1));
}

#[test]
fn evolve_writes_a_trace_with_seventeen_digits() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "{}experiment.initial = gaussian\nexperiment.amplitude = 0.2\nevolution.t_end = 0.05\n",
        REFERENCE.replace("evolution.t_end = 2\n", "").replace("problem.m = 1\nproblem.coupling = 1", "problem.coupling = 1, 0.5; 0.5, 1")
    );
    let cfg = write_config(dir.path(), "evolve.cfg", &text);
    let out = run("evolve", &cfg);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = manifest(dir.path(), "evolve.manifest");
    assert_eq!(m.get("outcome"), Some("completed"));
    let csv = fs::read_to_string(dir.path().join("out/trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,M_1,M_2,E,G_1,G_2,Q,K_virial,flag"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields.len(), 9);
    assert_eq!(fields[1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
}

#[test]
fn sweep_produces_one_row_per_coupling() {
    let dir = TempDir::new().unwrap();
    let text = "problem.N = 2\nproblem.p = 2.5\nproblem.coupling = 1, 1; 1, 1\ngrid.n_r = 1024\nexperiment.mus = 0.1, 1, 10\n";
    let cfg = write_config(dir.path(), "sweep.cfg", text);
    let out = cnls(&["sweep-mu", "--config", cfg.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = fs::read_to_string(dir.path().join("out/sweep_mu.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    let m = manifest(dir.path(), "sweep-mu.manifest");
    assert_eq!(m.get("mu.3.selected"), Some("vector"));
    assert!(m.get("mu.3.min_mass_fraction").unwrap().parse::<f64>().unwrap() > 1e-2);
}

#[test]
fn check_passes_deterministically() {
    let first = cnls(&["check"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let stdout = String::from_utf8(first.stdout.clone()).unwrap();
    let count: usize = stdout.lines().find_map(|l| l.strip_prefix("suites = ")).unwrap().parse().unwrap();
    assert!(count >= 8);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), count);
    assert_eq!(cnls(&["check"]).stdout, first.stdout);
}

#[test]
fn out_flag_redirects_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "ref.cfg", REFERENCE);
    let target = dir.path().join("elsewhere");
    let out = cnls(&["ground", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("ground_state.txt").is_file());
    let m = Manifest::read(&target.join("ground.manifest")).unwrap();
    assert_eq!(m.get("config.output.dir"), Some(target.to_str().unwrap()));
}
