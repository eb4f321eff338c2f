//! Run configuration: flat `section.key = value` text.
//!
//! ```text
//! problem.N = 2
//! problem.p = 2.5
//! problem.coupling = 1, 0.5; 0.5, 1
//! grid.n_r = 4096
//! evolution.t_end = 5
//! experiment.lambdas = 1.2, 1.1, 1.05, 1.01
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cnls_core::evolution::{EvolutionConfig, DEFAULT_DT, DEFAULT_ENERGY_DRIFT, DEFAULT_GAMMA_BLOW};
use cnls_core::ground_state::{
    semitrivial_seeds, vector_seeds, GroundStateConfig, DEFAULT_MAX_ITERATIONS, DEFAULT_TAU, DEFAULT_TOLERANCE,
};
use cnls_core::io::{parse_coupling, parse_key_values};
use cnls_core::{AlphaBeta, RadialGrid, SystemParams};

const KNOWN_KEYS: &[&str] = &[
    "problem.N",
    "problem.p",
    "problem.m",
    "problem.coupling",
    "grid.points",
    "grid.half_extent",
    "grid.n_r",
    "grid.R",
    "solver.tau",
    "solver.tolerance",
    "solver.max_iterations",
    "solver.seed",
    "evolution.dt",
    "evolution.t_end",
    "evolution.stride",
    "evolution.gamma_blow",
    "evolution.energy_drift_max",
    "experiment.ground_state",
    "experiment.initial",
    "experiment.amplitude",
    "experiment.dilation",
    "experiment.width",
    "experiment.lambdas",
    "experiment.mus",
    "experiment.mu_diagonal",
    "experiment.pairs",
    "experiment.dynamics",
    "output.dir",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Unreadable(String),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Unreadable(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedChoice {
    Vector,
    Semitrivial(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `A λ^{N/2} Ψ(λ x)` from the persisted ground state.
    Ground,
    /// `A e^{-|x|^2 / (2 w^2)}` in every component.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Entries exactly as written in the file, plus command-line overrides.
    pub entries: Vec<(String, String)>,
    pub dim: usize,
    pub exponent: f64,
    pub coupling: Vec<Vec<f64>>,
    pub box_points: usize,
    pub box_half_extent: f64,
    pub radial_points: usize,
    pub radial_extent: f64,
    pub tau: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed_choice: SeedChoice,
    pub evolution: EvolutionConfig,
    pub ground_state: PathBuf,
    pub initial: InitialData,
    pub amplitude: f64,
    pub dilation: f64,
    pub width: f64,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub mu_diagonal: Option<Vec<f64>>,
    pub pairs: Option<Vec<AlphaBeta>>,
    pub dynamics: bool,
    pub out_dir: PathBuf,
    pub seed: u64,
}

struct Entries<'a> {
    kv: &'a [(String, String)],
}

impl Entries<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| ConfigError::Invalid(format!("{key}: cannot parse {v:?}"))))
            .transpose()
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.parse(key)?.ok_or_else(|| ConfigError::Invalid(format!("missing required key {key}")))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ConfigError::Invalid(format!("{key}: expected a comma-separated list, got {v:?}")))
            })
            .transpose()
    }
}

impl RunConfig {
    pub fn load(path: &Path, out_override: Option<&Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base, out_override)
    }

    pub fn parse(text: &str, base: &Path, out_override: Option<&Path>) -> Result<Self, ConfigError> {
        let mut kv = parse_key_values(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some((key, _)) = kv.iter().find(|(k, _)| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(ConfigError::Invalid(format!("unknown key {key}")));
        }
        let out_dir = match out_override {
            Some(dir) => {
                let shown = dir.display().to_string();
                match kv.iter_mut().find(|(k, _)| k == "output.dir") {
                    Some(e) => e.1 = shown,
                    None => kv.push(("output.dir".into(), shown)),
                }
                dir.to_path_buf()
            }
            None => base.join(kv.iter().find(|(k, _)| k == "output.dir").map_or("out", |(_, v)| v.as_str())),
        };
        let e = Entries { kv: &kv };

        let dim: usize = e.require("problem.N")?;
        let exponent: f64 = e.require("problem.p")?;
        let coupling = parse_coupling(
            e.raw("problem.coupling").ok_or_else(|| ConfigError::Invalid("missing required key problem.coupling".into()))?,
        )
        .map_err(|_| ConfigError::Invalid("problem.coupling: expected rows like `1, 0.5; 0.5, 1`".into()))?;
        if let Some(m) = e.parse::<usize>("problem.m")? {
            if m != coupling.len() {
                return Err(ConfigError::Invalid(format!(
                    "problem.m = {m} but the coupling matrix has {} rows",
                    coupling.len()
                )));
            }
        }

        let seed_choice = match e.raw("solver.seed").unwrap_or("vector") {
            "vector" => SeedChoice::Vector,
            other => match other.strip_prefix("semitrivial:").map(|j| j.trim().parse::<usize>()) {
                Some(Ok(j)) if j >= 1 => SeedChoice::Semitrivial(j - 1),
                _ => {
                    return Err(ConfigError::Invalid(format!(
                        "solver.seed must be `vector` or `semitrivial:<j>` with j >= 1, got {other:?}"
                    )))
                }
            },
        };
        let initial = match e.raw("experiment.initial").unwrap_or("ground") {
            "ground" => InitialData::Ground,
            "gaussian" => InitialData::Gaussian,
            other => {
                return Err(ConfigError::Invalid(format!(
                    "experiment.initial must be `ground` or `gaussian`, got {other:?}"
                )))
            }
        };
        let pairs = e
            .raw("experiment.pairs")
            .map(|v| {
                parse_coupling(v)
                    .ok()
                    .filter(|rows| rows.iter().all(|r| r.len() == 2))
                    .map(|rows| rows.iter().map(|r| AlphaBeta::new(r[0], r[1])).collect::<Vec<_>>())
                    .ok_or_else(|| ConfigError::Invalid(format!("experiment.pairs: expected `a, b; a, b`, got {v:?}")))
            })
            .transpose()?;
        let dynamics = match e.raw("experiment.dynamics").unwrap_or("false") {
            "true" => true,
            "false" => false,
            other => return Err(ConfigError::Invalid(format!("experiment.dynamics must be true or false, got {other:?}"))),
        };
        let ground_state = match e.raw("experiment.ground_state") {
            Some(p) => base.join(p),
            None => out_dir.join("ground_state.txt"),
        };

        let mut evolution = EvolutionConfig::new(
            e.or("evolution.dt", DEFAULT_DT)?,
            e.or("evolution.t_end", 5.0)?,
            e.or("evolution.stride", 10)?,
        );
        evolution.gamma_blow = e.or("evolution.gamma_blow", DEFAULT_GAMMA_BLOW)?;
        evolution.energy_drift_max = e.or("evolution.energy_drift_max", DEFAULT_ENERGY_DRIFT)?;

        let cfg = RunConfig {
            dim,
            exponent,
            coupling,
            box_points: e.or("grid.points", 256)?,
            box_half_extent: e.or("grid.half_extent", 16.0)?,
            radial_points: e.or("grid.n_r", 4096)?,
            radial_extent: e.or("grid.R", 16.0)?,
            tau: e.or("solver.tau", DEFAULT_TAU)?,
            tolerance: e.or("solver.tolerance", DEFAULT_TOLERANCE)?,
            max_iterations: e.or("solver.max_iterations", DEFAULT_MAX_ITERATIONS)?,
            seed_choice,
            evolution,
            ground_state,
            initial,
            amplitude: e.or("experiment.amplitude", 1.0)?,
            dilation: e.or("experiment.dilation", 1.0)?,
            width: e.or("experiment.width", 1.0)?,
            lambdas: e.list("experiment.lambdas")?.unwrap_or_else(|| vec![1.2, 1.1, 1.05, 1.01]),
            mus: e.list("experiment.mus")?.unwrap_or_else(|| vec![0.1, 1.0, 10.0]),
            mu_diagonal: e.list("experiment.mu_diagonal")?,
            pairs,
            dynamics,
            out_dir,
            seed: e.or("seed", 0)?,
            entries: Vec::new(),
        };
        Ok(RunConfig { entries: kv, ..cfg })
    }

    pub fn params(&self) -> cnls_core::Result<SystemParams> {
        SystemParams::new(self.dim, self.exponent, self.coupling.clone())
    }

    pub fn components(&self) -> usize {
        self.coupling.len()
    }

    pub fn pairs(&self) -> Vec<AlphaBeta> {
        self.pairs.clone().unwrap_or_else(|| AlphaBeta::default_test_set(self.dim))
    }

    pub fn solver(&self, grid: std::sync::Arc<RadialGrid>) -> cnls_core::Result<GroundStateConfig> {
        let m = self.components();
        let seeds = match self.seed_choice {
            SeedChoice::Vector => vector_seeds(&grid, m),
            SeedChoice::Semitrivial(j) if j < m => semitrivial_seeds(&grid, m, j),
            SeedChoice::Semitrivial(j) => {
                return Err(cnls_core::Error::InvalidParameter(format!(
                    "semitrivial seed component {} exceeds m = {m}",
                    j + 1
                )))
            }
        };
        let mut cfg = GroundStateConfig::new(grid, seeds);
        cfg.tau = self.tau;
        cfg.tolerance = self.tolerance;
        cfg.max_iterations = self.max_iterations;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "problem.N = 2\nproblem.p = 2.5\nproblem.coupling = 1\n";

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::parse(text, Path::new("/runs"), None)
    }

    #[test]
    fn defaults_and_paths() {
        let cfg = parse(BASE).unwrap();
        assert_eq!(cfg.components(), 1);
        assert_eq!(cfg.out_dir, Path::new("/runs/out"));
        assert_eq!(cfg.ground_state, Path::new("/runs/out/ground_state.txt"));
        assert_eq!(cfg.lambdas, vec![1.2, 1.1, 1.05, 1.01]);
        assert_eq!(cfg.pairs().len(), 4);
        assert_eq!(cfg.evolution.dt, 1e-3);
        assert!(cfg.params().is_ok());
    }

    #[test]
    fn overrides_and_lists() {
        let text = format!(
            "{BASE}experiment.lambdas = 1.05\nexperiment.pairs = 1, 0; 0, 1\nsolver.seed = semitrivial:1\noutput.dir = res\n"
        );
        let cfg = RunConfig::parse(&text, Path::new("/runs"), Some(Path::new("/elsewhere"))).unwrap();
        assert_eq!(cfg.out_dir, Path::new("/elsewhere"));
        assert_eq!(cfg.lambdas, vec![1.05]);
        assert_eq!(cfg.pairs(), vec![AlphaBeta::new(1.0, 0.0), AlphaBeta::new(0.0, 1.0)]);
        assert_eq!(cfg.seed_choice, SeedChoice::Semitrivial(0));
        assert!(cfg.entries.contains(&("output.dir".to_string(), "/elsewhere".to_string())));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(parse(&format!("{BASE}problem.q = 1\n")), Err(ConfigError::Invalid(_))));
        assert!(parse(&format!("{BASE}evolution.dt = fast\n")).is_err());
        assert!(parse(&format!("{BASE}problem.m = 2\n")).is_err());
        assert!(parse("problem.p = 2.5\nproblem.coupling = 1\n").is_err());
        assert!(parse(&format!("{BASE}solver.seed = semitrivial:0\n")).is_err());
        assert!(parse(&format!("{BASE}experiment.pairs = 1, 0, 1\n")).is_err());
        assert!(parse(&format!("{BASE}problem.N = 3\n")).is_err());
    }

    #[test]
    fn invalid_physics_parses_but_fails_validation() {
        let cfg = parse("problem.N = 2\nproblem.p = 2\nproblem.coupling = 1\n").unwrap();
        assert_eq!(cfg.params().unwrap_err().kind(), "ExponentOutOfRange");
    }
}
