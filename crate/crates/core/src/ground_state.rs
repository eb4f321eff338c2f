//! Ground states of the stationary system
//!
//! ```text
//! Δψ_j - ψ_j + Σ_k a_jk |ψ_k|^p |ψ_j|^{p-2} ψ_j = 0
//! ```
//!
//! on a radial grid, by a semi-implicit gradient flow projected onto the
//! Nehari manifold after every step.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::FieldVector;
use crate::functionals::{AlphaBeta, FunctionalReport, Functionals};
use crate::grid::RadialGrid;
use crate::params::SystemParams;
use crate::scaling::{rescale, ScalingLaw};

pub const DEFAULT_TAU: f64 = 10.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 20_000;
const STAGNATION_WINDOW: usize = 2_000;

#[derive(Debug, Clone)]
pub struct GroundStateConfig {
    pub grid: Arc<RadialGrid>,
    /// One nonnegative profile per component, sampled on `grid`.
    pub seeds: Vec<Vec<f64>>,
    /// Pseudo-time step of the flow.
    pub tau: f64,
    /// Sup-norm residual at which the flow stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl GroundStateConfig {
    pub fn new(grid: Arc<RadialGrid>, seeds: Vec<Vec<f64>>) -> Self {
        GroundStateConfig {
            grid,
            seeds,
            tau: DEFAULT_TAU,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    /// Same solver settings with different seeds.
    pub fn with_seeds(&self, seeds: Vec<Vec<f64>>) -> Self {
        GroundStateConfig { seeds, ..self.clone() }
    }

    fn validate(&self, params: &SystemParams) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.grid.dim() != params.dim() {
            return Err(Error::GridMismatch);
        }
        if self.seeds.len() != params.components() {
            return Err(Error::InvalidParameter(format!(
                "{} seeds for {} components",
                self.seeds.len(),
                params.components()
            )));
        }
        for s in &self.seeds {
            if s.len() != self.grid.len() {
                return Err(Error::GridMismatch);
            }
            if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidParameter("seeds must be finite and nonnegative".into()));
            }
        }
        if self.seeds.iter().flatten().all(|&v| v == 0.0) {
            return Err(Error::ZeroField);
        }
        Ok(())
    }
}

/// Gaussian seeds `e^{-r^2 / (2 w_j^2)}` with widths `w_j = 1 + 0.1 j`.
pub fn vector_seeds(grid: &RadialGrid, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|j| {
            let w = 1.0 + 0.1 * j as f64;
            gaussian_profile(grid, w)
        })
        .collect()
}

/// A unit-width Gaussian in component `j`, zero elsewhere.
pub fn semitrivial_seeds(grid: &RadialGrid, m: usize, j: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|k| if k == j { gaussian_profile(grid, 1.0) } else { vec![0.0; grid.len()] })
        .collect()
}

fn gaussian_profile(grid: &RadialGrid, width: f64) -> Vec<f64> {
    let n = grid.len();
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(i, r)| if i + 1 == n { 0.0 } else { (-r * r / (2.0 * width * width)).exp() })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// Real nonnegative profiles on the radial grid.
    pub profile: FieldVector,
    /// Multiplier `ω` in `Δψ - ωψ + N(ψ) = 0` read off the converged flow.
    pub omega: f64,
    /// Sup-norm residual of the discrete equations.
    pub residual: f64,
    /// Sup-norm residual of the profile under a fourth-order stencil,
    /// dominated by the truncation error of the solver.
    pub truncation_residual: f64,
    /// `m = S(Ψ)`.
    pub level: f64,
    pub pohozaev_defects: Vec<(AlphaBeta, f64)>,
    pub component_masses: Vec<f64>,
    pub iterations: usize,
    /// Discrete action after every projected step.
    pub action_history: Vec<f64>,
    pub report: FunctionalReport,
}

impl GroundStateResult {
    pub fn max_pohozaev_defect(&self) -> f64 {
        self.pohozaev_defects.iter().map(|d| d.1).fold(0.0, f64::max)
    }

    pub fn total_mass(&self) -> f64 {
        self.component_masses.iter().sum()
    }

    /// Smallest component mass as a fraction of the total.
    pub fn min_mass_fraction(&self) -> f64 {
        let total = self.total_mass();
        if total == 0.0 {
            return 0.0;
        }
        self.component_masses.iter().copied().fold(f64::INFINITY, f64::min) / total
    }
}

/// Moments of the finite-volume discretization, whose critical points are
/// exactly the solutions of the discrete equations.
struct Discrete<'a> {
    grid: &'a RadialGrid,
    params: &'a SystemParams,
}

struct DiscreteMoments {
    quadratic: f64,
    gradient: f64,
    mass: f64,
    interaction: f64,
}

impl Discrete<'_> {
    fn moments(&self, phi: &[Vec<f64>]) -> DiscreteMoments {
        let v = self.grid.cell_volumes();
        let p = self.params.exponent();
        let m = phi.len();
        let mut gradient = 0.0;
        let mut mass = 0.0;
        for c in phi {
            gradient += self.grid.face_gradient_norm_sq(c);
            mass += c.iter().zip(v).map(|(x, w)| w * x * x).sum::<f64>();
        }
        let powers: Vec<Vec<f64>> = phi.iter().map(|c| c.iter().map(|x| x.abs().powf(p)).collect()).collect();
        let mut interaction = 0.0;
        for j in 0..m {
            for k in 0..m {
                let pjk: f64 = (0..v.len()).map(|i| v[i] * powers[j][i] * powers[k][i]).sum();
                interaction += self.params.a(j, k) * pjk;
            }
        }
        DiscreteMoments { quadratic: gradient + mass, gradient, mass, interaction }
    }

    fn nonlinearity(&self, phi: &[Vec<f64>]) -> Vec<Vec<f64>> {
        nonlinear_terms(self.params, phi)
    }

    /// `max_{j,i} |(L φ_j)_i - φ_j,i + N_j,i|` over the interior nodes.
    fn residual(&self, phi: &[Vec<f64>]) -> f64 {
        let n = self.grid.len();
        let nl = self.nonlinearity(phi);
        let mut lap = vec![0.0; n];
        let mut worst: f64 = 0.0;
        for (c, nc) in phi.iter().zip(&nl) {
            self.grid.laplacian_real(c, &mut lap);
            for i in 0..n - 1 {
                worst = worst.max((lap[i] - c[i] + nc[i]).abs());
            }
        }
        worst
    }

    /// Solves `(1 + τ) x - τ L x = b` with `x` vanishing at the outer node.
    fn implicit_solve(&self, tau: f64, b: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let v = self.grid.cell_volumes();
        let f = self.grid.fluxes();
        let size = n - 1;
        let mut diag = vec![0.0; size];
        let mut upper = vec![0.0; size];
        let mut rhs = vec![0.0; size];
        for i in 0..size {
            let left = if i > 0 { f[i - 1] } else { 0.0 };
            diag[i] = v[i] * (1.0 + tau) + tau * (f[i] + left);
            upper[i] = -tau * f[i];
            rhs[i] = v[i] * b[i];
        }
        // Thomas algorithm on the symmetric system.
        for i in 1..size {
            let w = upper[i - 1] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut x = vec![0.0; n];
        x[size - 1] = rhs[size - 1] / diag[size - 1];
        for i in (0..size - 1).rev() {
            x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
        }
        x
    }
}

/// `N_j = Σ_k a_jk |φ_k|^p |φ_j|^{p-2} φ_j`, zero wherever `φ_j` vanishes.
pub fn nonlinear_terms(params: &SystemParams, phi: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = params.exponent();
    let m = phi.len();
    let powers: Vec<Vec<f64>> = phi.iter().map(|c| c.iter().map(|x| x.abs().powf(p)).collect()).collect();
    (0..m)
        .map(|j| {
            phi[j]
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if x == 0.0 {
                        return 0.0;
                    }
                    let coupling: f64 = (0..m).map(|k| params.a(j, k) * powers[k][i]).sum();
                    coupling * x * x.abs().powf(p - 2.0)
                })
                .collect()
        })
        .collect()
}

/// Semi-implicit flow `∂_τ φ = Δφ - φ + N(φ)` with a Nehari projection
/// `φ ← t_0 φ` after every step, followed by the `ω`-normalization.
pub fn solve_ground_state(params: &SystemParams, cfg: &GroundStateConfig) -> Result<GroundStateResult> {
    cfg.validate(params)?;
    let grid = cfg.grid.as_ref();
    let disc = Discrete { grid, params };
    let p = params.exponent();
    let n = grid.len();

    let mut phi: Vec<Vec<f64>> = cfg.seeds.clone();
    for c in &mut phi {
        c[n - 1] = 0.0;
    }
    project(&disc, &mut phi)?;

    let mut history = Vec::new();
    let mut residual = disc.residual(&phi);
    let mut best = residual;
    let mut best_at = 0;
    let mut iterations = 0;
    while residual > cfg.tolerance {
        if iterations >= cfg.max_iterations || iterations - best_at > STAGNATION_WINDOW {
            return Err(Error::NoConvergence { iterations, residual });
        }
        let nl = disc.nonlinearity(&phi);
        phi = phi
            .iter()
            .zip(&nl)
            .map(|(c, nc)| {
                let b: Vec<f64> = c.iter().zip(nc).map(|(x, y)| x + cfg.tau * y).collect();
                disc.implicit_solve(cfg.tau, &b)
            })
            .collect();
        let mom = project(&disc, &mut phi)?;
        history.push(0.5 * mom.quadratic - mom.interaction / (2.0 * p));
        residual = disc.residual(&phi);
        if !residual.is_finite() {
            return Err(Error::PoisonedState);
        }
        iterations += 1;
        if residual < 0.99 * best {
            best = residual;
            best_at = iterations;
        }
    }

    let mom = disc.moments(&phi);
    let omega = (mom.interaction - mom.gradient) / mom.mass;
    if !(omega > 0.0) {
        return Err(Error::NegativeOmega(omega));
    }
    let mut profile = FieldVector::from_real_profiles(cfg.grid.clone(), &phi)?;
    if (omega - 1.0).abs() > cfg.tolerance {
        profile = omega_normalize(&profile, params, omega)?;
        residual = disc.residual(&profile.real_profiles());
    }
    finish(params, profile, omega, residual, iterations, history)
}

/// Amplitude projection onto `K_{1,0} = 0` for the discrete moments.
fn project(disc: &Discrete<'_>, phi: &mut [Vec<f64>]) -> Result<DiscreteMoments> {
    let mom = disc.moments(phi);
    if !(mom.interaction > 1e-300 && mom.quadratic > 1e-300) || !mom.interaction.is_finite() {
        return Err(Error::CollapseToZero);
    }
    let t = (mom.quadratic / mom.interaction).powf(1.0 / (2.0 * disc.params.exponent() - 2.0));
    if !t.is_finite() {
        return Err(Error::CollapseToZero);
    }
    for c in phi.iter_mut() {
        c.iter_mut().for_each(|x| *x *= t);
    }
    Ok(disc.moments(phi))
}

fn finish(
    params: &SystemParams,
    profile: FieldVector,
    omega: f64,
    residual: f64,
    iterations: usize,
    action_history: Vec<f64>,
) -> Result<GroundStateResult> {
    let pairs = AlphaBeta::default_test_set(params.dim());
    let report = FunctionalReport::compute(&profile, params, &pairs)?;
    let pohozaev_defects = pohozaev_defects_of(&report, params, &pairs)?;
    let truncation_residual = truncation_residual(&profile, params)?;
    Ok(GroundStateResult {
        omega,
        residual,
        truncation_residual,
        level: report.action,
        pohozaev_defects,
        component_masses: report.moments.masses.clone(),
        iterations,
        action_history,
        report,
        profile,
    })
}

/// Maps a solution of `Δφ - ωφ + N(φ) = 0` to a solution with `ω = 1`:
/// `ψ(x) = ω^{-1/(2p-2)} φ(x / √ω)`.
pub fn omega_normalize(profile: &FieldVector, params: &SystemParams, omega: f64) -> Result<FieldVector> {
    if !(omega > 0.0) {
        return Err(Error::NegativeOmega(omega));
    }
    let s = omega.sqrt().recip();
    let dilated = rescale(profile, ScalingLaw::MassPreserving { lambda: s })?;
    let amp = omega.powf(-1.0 / (2.0 * params.exponent() - 2.0)) / s.powf(params.dim() as f64 / 2.0);
    Ok(dilated.scaled(amp))
}

/// Relative defects `|K_{α,β}(Ψ)| / Σ |terms|` for each pair.
pub fn verify_pohozaev(profile: &FieldVector, params: &SystemParams, pairs: &[AlphaBeta]) -> Result<Vec<(AlphaBeta, f64)>> {
    let report = FunctionalReport::compute(profile, params, pairs)?;
    pohozaev_defects_of(&report, params, pairs)
}

fn pohozaev_defects_of(report: &FunctionalReport, params: &SystemParams, pairs: &[AlphaBeta]) -> Result<Vec<(AlphaBeta, f64)>> {
    let f = report.functionals(params);
    pairs
        .iter()
        .map(|&ab| {
            ab.check(params.dim())?;
            let terms = f.constraint_terms(ab);
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            let k = terms[0] + terms[1] - terms[2];
            Ok((ab, if scale > 0.0 { k.abs() / scale } else { 0.0 }))
        })
        .collect()
}

/// Sup-norm residual of the profile equations with fourth-order
/// differences, over the nodes inside `0.9 R`.
pub fn truncation_residual(profile: &FieldVector, params: &SystemParams) -> Result<f64> {
    let grid = profile.grid().as_radial()?;
    let phi = profile.real_profiles();
    let nl = nonlinear_terms(params, &phi);
    let n = grid.len();
    let h = grid.spacing();
    let dim = grid.dim() as f64;
    let limit = 0.9 * grid.radius();
    let mut worst: f64 = 0.0;
    for (c, nc) in phi.iter().zip(&nl) {
        let at = |i: isize| -> f64 {
            let k = i.unsigned_abs();
            if k < n {
                c[k]
            } else {
                0.0
            }
        };
        let d1 = grid.derivative(c);
        for (i, &r) in grid.nodes().iter().enumerate() {
            if r > limit {
                break;
            }
            let ii = i as isize;
            let d2 = (-at(ii + 2) + 16.0 * at(ii + 1) - 30.0 * at(ii) + 16.0 * at(ii - 1) - at(ii - 2)) / (12.0 * h * h);
            let lap = if i == 0 { dim * d2 } else { d2 + (dim - 1.0) / r * d1[i] };
            worst = worst.max((lap - c[i] + nc[i]).abs());
        }
    }
    Ok(worst)
}

/// Which basin a sweep candidate was started from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedKind {
    Vector,
    /// Nonzero only in this component.
    Semitrivial(usize),
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub mu: f64,
    pub candidates: Vec<(SeedKind, Result<GroundStateResult>)>,
    /// Index into `candidates` of the converged state with the lowest action.
    pub selected: Option<usize>,
}

impl SweepPoint {
    pub fn selected_result(&self) -> Option<&GroundStateResult> {
        self.selected.and_then(|i| self.candidates[i].1.as_ref().ok())
    }

    pub fn selected_kind(&self) -> Option<SeedKind> {
        self.selected.map(|i| self.candidates[i].0)
    }

    fn best_of<F: Fn(SeedKind) -> bool>(&self, keep: F) -> Option<&GroundStateResult> {
        self.candidates
            .iter()
            .filter(|(k, _)| keep(*k))
            .filter_map(|(_, r)| r.as_ref().ok())
            .min_by(|a, b| a.level.total_cmp(&b.level))
    }

    pub fn best_semitrivial(&self) -> Option<&GroundStateResult> {
        self.best_of(|k| matches!(k, SeedKind::Semitrivial(_)))
    }

    pub fn vector(&self) -> Option<&GroundStateResult> {
        self.best_of(|k| k == SeedKind::Vector)
    }
}

/// Couplings `a_jj = μ_j`, `a_jk = μ` for `j ≠ k`; for each `μ` solves from
/// the vector seed and from every semitrivial seed and keeps the converged
/// candidate of lowest action.
pub fn mu_sweep(dim: usize, p: f64, diagonal: &[f64], mus: &[f64], template: &GroundStateConfig) -> Result<Vec<SweepPoint>> {
    let m = diagonal.len();
    if m < 2 {
        return Err(Error::InvalidParameter("the sweep needs at least two components".into()));
    }
    let systems: Vec<SystemParams> = mus
        .iter()
        .map(|&mu| {
            let rows = (0..m)
                .map(|j| (0..m).map(|k| if j == k { diagonal[j] } else { mu }).collect())
                .collect();
            SystemParams::new(dim, p, rows)
        })
        .collect::<Result<_>>()?;
    let grid = template.grid.as_ref();
    let mut kinds = vec![SeedKind::Vector];
    kinds.extend((0..m).map(SeedKind::Semitrivial));
    let jobs: Vec<(usize, SeedKind)> = (0..mus.len()).flat_map(|i| kinds.iter().map(move |&k| (i, k))).collect();
    let outcomes = exec::map_collect(&jobs, |&(i, kind)| {
        let seeds = match kind {
            SeedKind::Vector => vector_seeds(grid, m),
            SeedKind::Semitrivial(j) => semitrivial_seeds(grid, m, j),
        };
        solve_ground_state(&systems[i], &template.with_seeds(seeds))
    });
    let mut outcomes = outcomes.into_iter();
    Ok(mus
        .iter()
        .map(|&mu| {
            let candidates: Vec<(SeedKind, Result<GroundStateResult>)> =
                kinds.iter().map(|&k| (k, outcomes.next().expect("one outcome per job"))).collect();
            let selected = candidates
                .iter()
                .enumerate()
                .filter_map(|(i, (_, r))| r.as_ref().ok().map(|g| (i, g.level)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i);
            SweepPoint { mu, candidates, selected }
        })
        .collect())
}

/// Profile values as complex samples, for callers that build fields by hand.
pub fn complex_profiles(profiles: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    profiles.iter().map(|c| c.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect()
}

/// Action from a report, as a convenience for sweep tables.
pub fn level_of(report: &FunctionalReport, params: &SystemParams) -> f64 {
    Functionals::new(params, &report.moments).action()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shooting::shooting_oracle;

    fn scalar() -> SystemParams {
        SystemParams::new(2, 2.5, vec![vec![1.0]]).unwrap()
    }

    fn grid(n: usize) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::new(2, n, 16.0).unwrap())
    }

    fn solve(n: usize) -> GroundStateResult {
        let g = grid(n);
        let cfg = GroundStateConfig::new(g.clone(), vector_seeds(&g, 1));
        solve_ground_state(&scalar(), &cfg).unwrap()
    }

    #[test]
    fn scalar_ground_state_matches_shooting() {
        let res = solve(8192);
        assert!(res.residual <= DEFAULT_TOLERANCE);
        assert!(res.level > 0.0);
        let shot = shooting_oracle(&scalar(), res.profile.grid().as_radial().unwrap()).unwrap();
        let flow = &res.profile.real_profiles()[0];
        let peak = shot.values.iter().copied().fold(0.0, f64::max);
        let err = flow.iter().zip(&shot.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err / peak < 1e-4, "sup error {}", err / peak);
        assert!(res.max_pohozaev_defect() < 1e-5, "{:?}", res.pohozaev_defects);
        assert!((res.omega - 1.0).abs() < 1e-9);
    }

    #[test]
    fn action_descends() {
        let res = solve(1024);
        for w in res.action_history.windows(2).skip(10) {
            assert!(w[1] <= w[0] + 1e-10, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn truncation_residual_is_second_order() {
        let coarse = solve(1024).truncation_residual;
        let fine = solve(2047).truncation_residual;
        assert!(coarse / fine >= 3.0, "{coarse} / {fine}");
    }

    #[test]
    fn omega_normalization_inverts_dilation() {
        let g = grid(2048);
        let params = scalar();
        let shot = shooting_oracle(&params, &g).unwrap();
        let psi = FieldVector::from_real_profiles(g.clone(), &[shot.values.clone()]).unwrap();
        let omega: f64 = 1.3;
        // φ(x) = ω^{1/(2p-2)} ψ(√ω x) solves the ω-equation.
        let phi = rescale(&psi, ScalingLaw::MassPreserving { lambda: omega.sqrt() })
            .unwrap()
            .scaled(omega.powf(1.0 / 3.0) / omega.sqrt());
        let back = omega_normalize(&phi, &params, omega).unwrap();
        let err = back.component(0).iter().zip(&shot.values).map(|(a, b)| (a.re - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        assert!(matches!(omega_normalize(&phi, &params, -1.0), Err(Error::NegativeOmega(_))));
    }

    #[test]
    fn perturbed_profile_has_large_defect() {
        let res = solve(1024);
        let g = res.profile.grid().as_radial().unwrap().clone();
        let bumped: Vec<f64> = res.profile.real_profiles()[0]
            .iter()
            .zip(g.nodes())
            .map(|(v, r)| v + 0.1 * (-(r - 1.0) * (r - 1.0) * 4.0).exp())
            .collect();
        let u = FieldVector::from_real_profiles(g, &[bumped]).unwrap();
        let defects = verify_pohozaev(&u, &scalar(), &AlphaBeta::default_test_set(2)).unwrap();
        assert!(defects.iter().any(|d| d.1 > 1e-2), "{defects:?}");
    }

    #[test]
    fn decoupled_semitrivial_stays_semitrivial() {
        let params = SystemParams::new(2, 2.5, vec![vec![1.0, 1e-6], vec![1e-6, 1.0]]).unwrap();
        let g = grid(1024);
        let cfg = GroundStateConfig::new(g.clone(), semitrivial_seeds(&g, 2, 0));
        let res = solve_ground_state(&params, &cfg).unwrap();
        assert!(res.component_masses[1] <= 1e-10);
    }

    #[test]
    fn symmetric_seeds_give_equal_masses() {
        let params = SystemParams::new(2, 2.5, vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let g = grid(1024);
        let seed = vector_seeds(&g, 1).remove(0);
        let cfg = GroundStateConfig::new(g.clone(), vec![seed.clone(), seed]);
        let res = solve_ground_state(&params, &cfg).unwrap();
        let [a, b] = [res.component_masses[0], res.component_masses[1]];
        assert!((a / b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_configs() {
        let g = grid(256);
        let mut cfg = GroundStateConfig::new(g.clone(), vector_seeds(&g, 1));
        cfg.tau = 0.0;
        assert!(matches!(solve_ground_state(&scalar(), &cfg), Err(Error::InvalidParameter(_))));
        let cfg = GroundStateConfig::new(g.clone(), vec![vec![0.0; g.len()]]);
        assert!(matches!(solve_ground_state(&scalar(), &cfg), Err(Error::ZeroField)));
        let mut cfg = GroundStateConfig::new(g.clone(), vector_seeds(&g, 1));
        cfg.max_iterations = 2;
        assert!(matches!(solve_ground_state(&scalar(), &cfg), Err(Error::NoConvergence { .. })));
    }
}
