use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use cnls_core::checks::run_all;
use cnls_core::evolution::{evolve, transplant_dilated, EvolutionTrace, Verdict};
use cnls_core::ground_state::{mu_sweep, solve_ground_state, SeedKind};
use cnls_core::io::{fmt_f64, sha256_file, write_trace, Manifest, ProfileFile};
use cnls_core::potential_well::{classify, dichotomy_experiment, instability_experiment, Classification};
use cnls_core::{AlphaBeta, CartesianGrid, Error, FieldVector, RadialGrid, SystemParams};

use crate::config::{ConfigError, InitialData, RunConfig};

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    MissingDependency(PathBuf),
    Compute(Error),
    SuitesFailed(Vec<&'static str>),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Compute(_) | Failure::SuitesFailed(_) => 1,
            Failure::MissingDependency(_) => 2,
            Failure::Config(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.into())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn pair_label(ab: &AlphaBeta) -> String {
    format!("{},{}", ab.alpha, ab.beta)
}

fn base_manifest(command: &str, cfg: &RunConfig) -> Manifest {
    let mut m = Manifest::new();
    m.set("command", command).set("problem.N", cfg.dim).set_f64("problem.p", cfg.exponent);
    m.set("problem.m", cfg.components());
    m.set(
        "problem.coupling",
        cfg.coupling
            .iter()
            .map(|r| r.iter().map(|&a| fmt_f64(a)).collect::<Vec<_>>().join(", "))
            .collect::<Vec<_>>()
            .join("; "),
    );
    m
}

fn finish(mut manifest: Manifest, cfg: &RunConfig, path: &Path) -> Result<(), Failure> {
    manifest.embed_config(&cfg.entries);
    manifest.write(path)?;
    println!("manifest = {}", path.display());
    Ok(())
}

/// Records a failed run next to its outputs.
pub fn write_failure(command: &str, cfg: &RunConfig, err: &Failure) {
    let mut m = base_manifest(command, cfg);
    m.set("status", "error");
    match err {
        Failure::Compute(e) => m.set("error", e.kind()).set("message", e),
        Failure::MissingDependency(p) => m.set("error", "MissingDependency").set("message", p.display()),
        Failure::Config(e) => m.set("error", "ConfigError").set("message", e),
        Failure::SuitesFailed(names) => m.set("error", "SuitesFailed").set("message", names.join(", ")),
    };
    m.embed_config(&cfg.entries);
    if fs::create_dir_all(&cfg.out_dir).is_ok() {
        let _ = m.write(&cfg.out_dir.join(format!("{command}.manifest")));
    }
}

fn box_grid(cfg: &RunConfig) -> Result<Arc<CartesianGrid>, Failure> {
    Ok(Arc::new(CartesianGrid::new(cfg.dim, cfg.box_points, cfg.box_half_extent)?))
}

fn set_grid(m: &mut Manifest, grid: &CartesianGrid) {
    m.set("grid.points", grid.points_per_axis()).set_f64("grid.half_extent", grid.half_extent());
}

struct GroundFile {
    file: ProfileFile,
    path: PathBuf,
    hash: String,
}

fn load_ground(cfg: &RunConfig, params: &SystemParams) -> Result<GroundFile, Failure> {
    let path = cfg.ground_state.clone();
    if !path.is_file() {
        return Err(Failure::MissingDependency(path));
    }
    let file = ProfileFile::read(&path)?;
    if file.params != *params {
        return Err(Error::InvalidParameter(format!(
            "{} was computed for different problem parameters",
            path.display()
        ))
        .into());
    }
    let hash = sha256_file(&path)?;
    Ok(GroundFile { file, path, hash })
}

fn set_provenance(m: &mut Manifest, ground: &GroundFile) {
    m.set("ground_state.path", ground.path.display()).set("ground_state.sha256", &ground.hash);
    m.set_f64("m_ref", ground.file.level);
}

fn set_classification(m: &mut Manifest, c: &Classification) {
    m.set("verdict", c.verdict.name()).set_f64("S", c.action).set_f64("m_ref", c.m_ref);
    for (ab, k) in &c.constraints {
        m.set_f64(format!("K.{}", pair_label(ab)), *k);
    }
}

fn set_trace(m: &mut Manifest, trace: &EvolutionTrace, path: &Path, prefix: &str) -> Result<(), Failure> {
    m.set(format!("{prefix}outcome"), trace.verdict.name());
    if let Some(t) = trace.verdict.time() {
        m.set_f64(format!("{prefix}outcome_time"), t);
    }
    m.set(format!("{prefix}rows"), trace.rows.len());
    m.set_f64(format!("{prefix}max_mass_drift"), trace.max_mass_drift());
    m.set_f64(format!("{prefix}max_energy_drift"), trace.max_energy_drift());
    m.set_f64(format!("{prefix}max_gradient"), trace.max_gradient());
    m.set(format!("{prefix}all_localized"), trace.all_localized());
    m.set(format!("{prefix}trace.path"), path.display());
    m.set(format!("{prefix}trace.sha256"), sha256_file(path)?);
    Ok(())
}

/// Initial data from the config; also returns the ground state when used.
fn initial_state(
    cfg: &RunConfig,
    params: &SystemParams,
    grid: Arc<CartesianGrid>,
) -> Result<(FieldVector, Option<GroundFile>), Failure> {
    match cfg.initial {
        InitialData::Ground => {
            let ground = load_ground(cfg, params)?;
            let u = transplant_dilated(&ground.file.profile, grid, cfg.dilation)?.scaled(cfg.amplitude);
            Ok((u, Some(ground)))
        }
        InitialData::Gaussian => {
            if !(cfg.width > 0.0) {
                return Err(Error::InvalidParameter(format!("width must be positive, got {}", cfg.width)).into());
            }
            let (a, w) = (cfg.amplitude, cfg.width);
            let u = FieldVector::sample(grid.into(), cfg.components(), |_, x| {
                Complex64::new(a * (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * w * w)).exp(), 0.0)
            });
            Ok((u, None))
        }
    }
}

pub fn ground(cfg: &RunConfig) -> Result<(), Failure> {
    let params = cfg.params()?;
    let grid = Arc::new(RadialGrid::new(cfg.dim, cfg.radial_points, cfg.radial_extent)?);
    let res = solve_ground_state(&params, &cfg.solver(grid.clone())?)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("ground_state.txt");
    let file = ProfileFile {
        params: params.clone(),
        grid: grid.clone(),
        profile: res.profile.clone(),
        level: res.level,
        residual: res.residual,
        config: cfg.entries.clone(),
    };
    file.write(&path)?;

    println!("level = {}", fmt_f64(res.level));
    println!("residual = {}", fmt_f64(res.residual));
    let mut m = base_manifest("ground", cfg);
    m.set("status", "ok").set("grid.n_r", grid.len()).set_f64("grid.R", grid.radius());
    m.set_f64("level", res.level).set_f64("omega", res.omega).set_f64("residual", res.residual);
    m.set_f64("truncation_residual", res.truncation_residual).set("iterations", res.iterations);
    for (ab, d) in &res.pohozaev_defects {
        let key = format!("pohozaev.{}", pair_label(ab));
        println!("{key} = {}", fmt_f64(*d));
        m.set_f64(key, *d);
    }
    for (j, mass) in res.component_masses.iter().enumerate() {
        m.set_f64(format!("mass.{}", j + 1), *mass);
    }
    m.set("profile.path", path.display()).set("profile.sha256", sha256_file(&path)?);
    finish(m, cfg, &cfg.out_dir.join("ground.manifest"))
}

pub fn evolve_cmd(cfg: &RunConfig) -> Result<(), Failure> {
    let params = cfg.params()?;
    params.require_dynamics()?;
    let grid = box_grid(cfg)?;
    let (u0, ground) = initial_state(cfg, &params, grid.clone())?;
    let trace = evolve(&u0, &params, &cfg.evolution)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let trace_path = cfg.out_dir.join("trace.csv");
    write_trace(&trace_path, &trace, params.components())?;

    println!("outcome = {}", trace.verdict.name());
    let mut m = base_manifest("evolve", cfg);
    m.set("status", "ok");
    set_grid(&mut m, &grid);
    m.set_f64("dt", cfg.evolution.dt).set_f64("t_end", cfg.evolution.t_end);
    if let Some(g) = &ground {
        set_provenance(&mut m, g);
    }
    set_trace(&mut m, &trace, &trace_path, "")?;
    finish(m, cfg, &cfg.out_dir.join("evolve.manifest"))
}

pub fn classify_cmd(cfg: &RunConfig) -> Result<(), Failure> {
    let params = cfg.params()?;
    let grid = box_grid(cfg)?;
    let ground = load_ground(cfg, &params)?;
    let (u0, _) = initial_state(cfg, &params, grid.clone())?;
    let pairs = cfg.pairs();
    let m_ref = ground.file.level;
    fs::create_dir_all(&cfg.out_dir)?;

    let mut m = base_manifest("classify", cfg);
    m.set("status", "ok");
    set_grid(&mut m, &grid);
    set_provenance(&mut m, &ground);
    if cfg.dynamics {
        params.require_dynamics()?;
        let report = dichotomy_experiment(&u0, &params, &cfg.evolution, m_ref, &pairs)?;
        let trace_path = cfg.out_dir.join("trace.csv");
        write_trace(&trace_path, &report.trace, params.components())?;
        set_classification(&mut m, &report.initial);
        set_trace(&mut m, &report.trace, &trace_path, "")?;
        m.set("flips", report.flips.len());
        m.set_f64("gradient_bound", report.gradient_bound);
        m.set_f64("delta", report.delta).set_f64("max_virial", report.max_virial);
        let verdict = if report.consistent { "PASS" } else { "FAIL" };
        m.set("consistency", verdict);
        println!("verdict = {}", report.initial.verdict.name());
        println!("outcome = {}", report.trace.verdict.name());
        println!("consistency = {verdict}");
    } else {
        let c = classify(&u0, &params, m_ref, &pairs)?;
        set_classification(&mut m, &c);
        println!("verdict = {}", c.verdict.name());
    }
    finish(m, cfg, &cfg.out_dir.join("classify.manifest"))
}

pub fn instability_cmd(cfg: &RunConfig) -> Result<(), Failure> {
    let params = cfg.params()?;
    params.require_dynamics()?;
    let grid = box_grid(cfg)?;
    let ground = load_ground(cfg, &params)?;
    let pairs = cfg.pairs();
    let rows = instability_experiment(
        &ground.file.profile,
        &params,
        ground.file.level,
        &cfg.lambdas,
        grid.clone(),
        &cfg.evolution,
        &pairs,
    )?;
    fs::create_dir_all(&cfg.out_dir)?;

    let mut m = base_manifest("instability", cfg);
    m.set("status", "ok");
    set_grid(&mut m, &grid);
    set_provenance(&mut m, &ground);
    for (i, row) in rows.iter().enumerate() {
        let prefix = format!("lambda.{}.", i + 1);
        let path = cfg.out_dir.join(format!("instability_{}.csv", i + 1));
        write_trace(&path, &row.trace, params.components())?;
        m.set_f64(format!("{prefix}value"), row.lambda).set_f64(format!("{prefix}distance"), row.distance);
        m.set(format!("{prefix}verdict"), row.classification.verdict.name());
        m.set_f64(format!("{prefix}S"), row.classification.action);
        set_trace(&mut m, &row.trace, &path, &prefix)?;
        println!(
            "lambda = {}  distance = {}  verdict = {}  outcome = {}",
            row.lambda,
            fmt_f64(row.distance),
            row.classification.verdict.name(),
            row.trace.verdict.name()
        );
    }
    let uniform = |f: &dyn Fn(&cnls_core::potential_well::InstabilityRow) -> &'static str| {
        let first = rows.first().map(f).unwrap_or("none");
        if rows.iter().all(|r| f(r) == first) {
            first
        } else {
            "mixed"
        }
    };
    let verdict = uniform(&|r| r.classification.verdict.name());
    let outcome = uniform(&|r| r.trace.verdict.name());
    let mut by_lambda: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda, r.distance)).collect();
    by_lambda.sort_by(|a, b| b.0.total_cmp(&a.0));
    let monotone = by_lambda.windows(2).all(|w| w[1].1 < w[0].1);
    let consistent = verdict == "A_minus" && outcome == Verdict::BlowupDetected(0.0).name() && monotone;
    m.set("verdict", verdict).set("outcome", outcome).set("distance_monotone", monotone);
    m.set("consistency", if consistent { "PASS" } else { "FAIL" });
    println!("verdict = {verdict}");
    println!("outcome = {outcome}");
    finish(m, cfg, &cfg.out_dir.join("instability.manifest"))
}

pub fn sweep_mu_cmd(cfg: &RunConfig) -> Result<(), Failure> {
    let params = cfg.params()?;
    let diagonal = cfg.mu_diagonal.clone().unwrap_or_else(|| (0..cfg.components()).map(|j| params.a(j, j)).collect());
    let grid = Arc::new(RadialGrid::new(cfg.dim, cfg.radial_points, cfg.radial_extent)?);
    let template = cfg.solver(grid.clone())?;
    let points = mu_sweep(cfg.dim, cfg.exponent, &diagonal, &cfg.mus, &template)?;
    fs::create_dir_all(&cfg.out_dir)?;

    let mut csv = String::from("mu,selected,min_mass_fraction,level,vector_level,best_semitrivial_level\n");
    let mut m = base_manifest("sweep-mu", cfg);
    m.set("status", "ok").set("grid.n_r", grid.len()).set_f64("grid.R", grid.radius());
    m.set("mu_diagonal", diagonal.iter().map(|&d| fmt_f64(d)).collect::<Vec<_>>().join(", "));
    println!("{:>12} {:>14} {:>20} {:>20}", "mu", "selected", "min_mass_fraction", "level");
    let level = |r: Option<&cnls_core::ground_state::GroundStateResult>| r.map_or("nan".to_string(), |r| fmt_f64(r.level));
    for (i, pt) in points.iter().enumerate() {
        let prefix = format!("mu.{}.", i + 1);
        let kind = match pt.selected_kind() {
            Some(SeedKind::Vector) => "vector".to_string(),
            Some(SeedKind::Semitrivial(j)) => format!("semitrivial:{}", j + 1),
            None => "none".to_string(),
        };
        let sel = pt.selected_result();
        let frac = sel.map_or(f64::NAN, |r| r.min_mass_fraction());
        csv.push_str(&format!(
            "{},{kind},{},{},{},{}\n",
            fmt_f64(pt.mu),
            fmt_f64(frac),
            level(sel),
            level(pt.vector()),
            level(pt.best_semitrivial())
        ));
        m.set_f64(format!("{prefix}value"), pt.mu).set(format!("{prefix}selected"), &kind);
        m.set_f64(format!("{prefix}min_mass_fraction"), frac);
        m.set(format!("{prefix}level"), level(sel));
        m.set(format!("{prefix}vector_level"), level(pt.vector()));
        m.set(format!("{prefix}best_semitrivial_level"), level(pt.best_semitrivial()));
        for (kind, cand) in &pt.candidates {
            if let Err(e) = cand {
                m.set(format!("{prefix}candidate_error.{kind:?}"), e.kind());
            }
        }
        println!("{:>12} {:>14} {:>20.6e} {:>20}", pt.mu, kind, frac, level(sel));
    }
    let table = cfg.out_dir.join("sweep_mu.csv");
    fs::write(&table, csv)?;
    m.set("table.path", table.display()).set("table.sha256", sha256_file(&table)?);
    finish(m, cfg, &cfg.out_dir.join("sweep-mu.manifest"))
}

/// Runs every property suite; fails when any suite fails.
pub fn check(seed: u64) -> Result<(), Failure> {
    let outcomes = run_all(seed);
    for s in &outcomes {
        println!(
            "{} {:<20} cases = {:<4} worst = {:.3e} tolerance = {:.0e}",
            if s.passed { "PASS" } else { "FAIL" },
            s.name,
            s.cases,
            s.worst,
            s.tolerance
        );
    }
    println!("suites = {}", outcomes.len());
    let failed: Vec<&'static str> = outcomes.iter().filter(|s| !s.passed).map(|s| s.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::SuitesFailed(failed))
    }
}
