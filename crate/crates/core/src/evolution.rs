//! Strang split-step integration of
//!
//! ```text
//! i ∂_t u_j + Δu_j + Σ_k a_jk |u_k|^p |u_j|^{p-2} u_j = 0
//! ```
//!
//! on a periodic box, with conservation, variance and virial diagnostics.

use std::ops::ControlFlow;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{FieldVector, Grid};
use crate::functionals::{AlphaBeta, Functionals, Moments};
use crate::grid::CartesianGrid;
use crate::interp::RadialInterpolant;
use crate::params::SystemParams;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_GAMMA_BLOW: f64 = 1e2;
pub const DEFAULT_ENERGY_DRIFT: f64 = 1e-3;
/// Tail mass beyond half the box above which variance data are flagged.
pub const LOCALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between trace rows.
    pub stride: usize,
    /// Blow-up is declared when `Σ ||∇u_j||^2` exceeds this factor times its
    /// initial value.
    pub gamma_blow: f64,
    /// Relative energy drift treated as loss of resolution.
    pub energy_drift_max: f64,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_end: f64, stride: usize) -> Self {
        EvolutionConfig { dt, t_end, stride, gamma_blow: DEFAULT_GAMMA_BLOW, energy_drift_max: DEFAULT_ENERGY_DRIFT }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        if !(self.gamma_blow > 1.0) {
            return Err(Error::InvalidParameter(format!("gamma_blow must exceed 1, got {}", self.gamma_blow)));
        }
        if !(self.energy_drift_max > 0.0) {
            return Err(Error::InvalidParameter("energy drift ceiling must be positive".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Split-step propagator for a fixed grid, system and time step.
#[derive(Debug, Clone)]
pub struct SplitStep {
    grid: Arc<CartesianGrid>,
    params: SystemParams,
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl SplitStep {
    pub fn new(grid: Arc<CartesianGrid>, params: &SystemParams, dt: f64) -> Result<Self> {
        params.require_dynamics()?;
        if grid.dim() != params.dim() {
            return Err(Error::GridMismatch);
        }
        if !dt.is_finite() || dt == 0.0 {
            return Err(Error::InvalidParameter(format!("time step must be finite and nonzero, got {dt}")));
        }
        let phase = |t: f64| -> Vec<Complex64> { grid.k_squared().iter().map(|k2| Complex64::from_polar(1.0, -k2 * t)).collect() };
        let half = phase(0.5 * dt);
        let full = phase(dt);
        Ok(SplitStep { grid, params: params.clone(), dt, half, full })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn check(&self, u: &FieldVector) -> Result<()> {
        match u.grid() {
            Grid::Cartesian(g) if **g == *self.grid => {}
            _ => return Err(Error::GridMismatch),
        }
        if u.len() != self.params.components() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `e^{-i|k|^2 t}` on every mode, for the precomputed `t`.
    fn linear(&self, u: &mut FieldVector, factors: &[Complex64]) {
        for c in u.components_mut() {
            self.grid.fft_forward(c);
            exec::for_each_indexed(c, |i, z| *z *= factors[i]);
            self.grid.fft_inverse(c);
        }
    }

    /// `u_j ← e^{i V_j dt} u_j` with `V_j = Σ_k a_jk |u_k|^p |u_j|^{p-2}`.
    fn nonlinear(&self, u: &mut FieldVector) {
        let p = self.params.exponent();
        let m = u.len();
        let powers: Vec<Vec<f64>> = u
            .components()
            .iter()
            .map(|c| {
                let mut out = vec![0.0; c.len()];
                exec::for_each_indexed(&mut out, |i, v| *v = c[i].norm_sqr().powf(0.5 * p));
                out
            })
            .collect();
        let params = &self.params;
        let dt = self.dt;
        for (j, c) in u.components_mut().iter_mut().enumerate() {
            exec::for_each_indexed(c, |i, z| {
                let modulus_sq = z.norm_sqr();
                if modulus_sq == 0.0 {
                    return;
                }
                let coupling: f64 = (0..m).map(|k| params.a(j, k) * powers[k][i]).sum();
                let v = coupling * powers[j][i] / modulus_sq;
                *z *= Complex64::from_polar(1.0, v * dt);
            });
        }
    }

    /// One Strang step `L(dt/2) N(dt) L(dt/2)`.
    pub fn step(&self, u: &mut FieldVector) -> Result<()> {
        self.advance(u, 1)
    }

    /// `steps` Strang steps, merging adjacent linear half steps.
    pub fn advance(&self, u: &mut FieldVector, steps: usize) -> Result<()> {
        self.check(u)?;
        if steps == 0 {
            return Ok(());
        }
        self.linear(u, &self.half);
        for s in 0..steps {
            self.nonlinear(u);
            if s + 1 < steps {
                self.linear(u, &self.full);
            }
        }
        self.linear(u, &self.half);
        if !u.is_finite() {
            return Err(Error::PoisonedState);
        }
        Ok(())
    }
}

/// One Strang step of size `dt` (negative `dt` runs backwards).
pub fn step(u: &FieldVector, params: &SystemParams, dt: f64) -> Result<FieldVector> {
    u.check_finite()?;
    let grid = u.grid().as_cartesian()?.clone();
    let prop = SplitStep::new(grid, params, dt)?;
    let mut out = u.clone();
    prop.step(&mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Completed,
    /// First diagnostic time at which a blow-up trigger fired.
    BlowupDetected(f64),
    /// Non-finite samples appeared before this time.
    Poisoned(f64),
    /// An observer stopped the run at this time.
    Interrupted(f64),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Completed => "completed",
            Verdict::BlowupDetected(_) => "blowup_detected",
            Verdict::Poisoned(_) => "poisoned",
            Verdict::Interrupted(_) => "interrupted",
        }
    }

    pub fn time(&self) -> Option<f64> {
        match *self {
            Verdict::Completed => None,
            Verdict::BlowupDetected(t) | Verdict::Poisoned(t) | Verdict::Interrupted(t) => Some(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub moments: Moments,
    pub energy: f64,
    /// `Q = Σ_j ∫ |x|^2 |u_j|^2 dx` with box-centered coordinates.
    pub variance: f64,
    /// `K_{1,-2/N}`.
    pub virial: f64,
    /// Whether the mass beyond `|x| = L/2` is below the localization
    /// tolerance.
    pub localized: bool,
}

impl TraceRow {
    pub fn from_state(t: f64, u: &FieldVector, params: &SystemParams) -> Result<Self> {
        let moments = Moments::of(u, params)?;
        let f = Functionals::new(params, &moments);
        let energy = f.energy();
        let virial = f.constraint_unchecked(AlphaBeta::virial(params.dim()));
        let grid = u.grid();
        let variance: f64 = u.components().iter().map(|c| grid.integrate(|i| grid.radius_squared(i) * c[i].norm_sqr())).sum();
        let half = 0.5 * grid.outer_radius();
        let tail: f64 = u
            .components()
            .iter()
            .map(|c| grid.integrate(|i| if grid.radius_squared(i) > half * half { c[i].norm_sqr() } else { 0.0 }))
            .sum();
        let total = moments.total_mass();
        let localized = total == 0.0 || tail <= LOCALIZATION_TOLERANCE * total;
        Ok(TraceRow { t, moments, energy, variance, virial, localized })
    }

    pub fn total_gradient(&self) -> f64 {
        self.moments.total_gradient()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub rows: Vec<TraceRow>,
    pub verdict: Verdict,
}

impl EvolutionTrace {
    fn drift<F: Fn(&TraceRow) -> f64>(&self, f: F) -> f64 {
        let Some(first) = self.rows.first() else { return 0.0 };
        let v0 = f(first);
        let scale = if v0 != 0.0 { v0.abs() } else { 1.0 };
        self.rows.iter().map(|r| (f(r) - v0).abs() / scale).fold(0.0, f64::max)
    }

    /// Largest relative deviation of any component mass from its initial value.
    pub fn max_mass_drift(&self) -> f64 {
        let m = self.rows.first().map_or(0, |r| r.moments.masses.len());
        (0..m).map(|j| self.drift(|r| r.moments.masses[j])).fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.drift(|r| r.energy)
    }

    pub fn max_gradient(&self) -> f64 {
        self.rows.iter().map(TraceRow::total_gradient).fold(0.0, f64::max)
    }

    pub fn all_localized(&self) -> bool {
        self.rows.iter().all(|r| r.localized)
    }
}

/// Runs the evolution and stops early on a blow-up trigger.
pub fn evolve(u0: &FieldVector, params: &SystemParams, cfg: &EvolutionConfig) -> Result<EvolutionTrace> {
    evolve_with(u0, params, cfg, |_, _| ControlFlow::Continue(()))
}

/// Like [`evolve`], calling `observer` with every trace row and the state it
/// was computed from; returning `Break` stops the run.
pub fn evolve_with<F>(u0: &FieldVector, params: &SystemParams, cfg: &EvolutionConfig, mut observer: F) -> Result<EvolutionTrace>
where
    F: FnMut(&TraceRow, &FieldVector) -> ControlFlow<()>,
{
    cfg.validate()?;
    u0.check_finite()?;
    let grid = u0.grid().as_cartesian()?.clone();
    let prop = SplitStep::new(grid, params, cfg.dt)?;
    let mut u = u0.clone();
    let first = TraceRow::from_state(0.0, &u, params)?;
    let g0 = first.total_gradient();
    let e0 = first.energy;
    let e_scale = if e0 != 0.0 { e0.abs() } else { g0.max(f64::MIN_POSITIVE) };
    let mut rows = vec![first];
    if observer(&rows[0], &u).is_break() {
        return Ok(EvolutionTrace { rows, verdict: Verdict::Interrupted(0.0) });
    }
    let total = cfg.steps();
    let mut done = 0;
    while done < total {
        let chunk = cfg.stride.min(total - done);
        let t = (done + chunk) as f64 * cfg.dt;
        match prop.advance(&mut u, chunk) {
            Ok(()) => {}
            Err(Error::PoisonedState) => return Ok(EvolutionTrace { rows, verdict: Verdict::Poisoned(t) }),
            Err(e) => return Err(e),
        }
        done += chunk;
        let row = TraceRow::from_state(t, &u, params)?;
        let blown = row.total_gradient() > cfg.gamma_blow * g0 || (row.energy - e0).abs() / e_scale > cfg.energy_drift_max;
        let stop = observer(&row, &u).is_break();
        rows.push(row);
        if blown {
            return Ok(EvolutionTrace { rows, verdict: Verdict::BlowupDetected(t) });
        }
        if stop {
            return Ok(EvolutionTrace { rows, verdict: Verdict::Interrupted(t) });
        }
    }
    Ok(EvolutionTrace { rows, verdict: Verdict::Completed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirialReport {
    /// `(t, Q''/8, right-hand side, relative defect)` at interior rows.
    pub rows: Vec<(f64, f64, f64, f64)>,
    pub max_defect: f64,
    /// Some row used in the check had lost localization.
    pub delocalized: bool,
}

/// Compares the central second difference of `Q/8` with
/// `Σ ||∇u_j||^2 - N(p-1)/(2p) Σ a_jk P_jk` at interior rows. The defect is
/// relative to the sum of the magnitudes of the two right-hand terms.
pub fn virial_check(trace: &EvolutionTrace, params: &SystemParams) -> Result<VirialReport> {
    let rows = &trace.rows;
    if rows.len() < 5 {
        return Err(Error::InsufficientRows(rows.len()));
    }
    let dt = rows[1].t - rows[0].t;
    if !(dt > 0.0) || rows.windows(2).any(|w| ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(1.0)) {
        return Err(Error::InvalidParameter("virial check needs uniformly spaced rows".into()));
    }
    let n = params.dim() as f64;
    let p = params.exponent();
    let mut out = Vec::with_capacity(rows.len() - 2);
    let mut delocalized = false;
    for w in rows.windows(3) {
        let lhs = (w[2].variance - 2.0 * w[1].variance + w[0].variance) / (dt * dt) / 8.0;
        let grad = w[1].moments.total_gradient();
        let inter = n * (p - 1.0) / (2.0 * p) * w[1].moments.weighted_interaction(params);
        let rhs = grad - inter;
        let scale = grad.abs() + inter.abs();
        let defect = if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 };
        delocalized |= !(w[0].localized && w[1].localized && w[2].localized);
        out.push((w[1].t, lhs, rhs, defect));
    }
    let max_defect = out.iter().map(|r| r.3).fold(0.0, f64::max);
    Ok(VirialReport { rows: out, max_defect, delocalized })
}

/// Embeds a radial profile in the box as `A Ψ(s |x|)`, interpolating the
/// radial samples; points beyond the radial domain read zero.
pub fn transplant(profile: &FieldVector, grid: Arc<CartesianGrid>, amplitude: f64, dilation: f64) -> Result<FieldVector> {
    let radial = profile.grid().as_radial()?;
    if radial.dim() != grid.dim() {
        return Err(Error::GridMismatch);
    }
    let interps: Vec<(RadialInterpolant, RadialInterpolant)> = profile
        .components()
        .iter()
        .map(|c| {
            let re: Vec<f64> = c.iter().map(|z| z.re).collect();
            let im: Vec<f64> = c.iter().map(|z| z.im).collect();
            (RadialInterpolant::new(radial.spacing(), &re), RadialInterpolant::new(radial.spacing(), &im))
        })
        .collect();
    let comps = interps
        .iter()
        .map(|(re, im)| {
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            exec::for_each_indexed(&mut out, |i, z| {
                let r = dilation * grid.radius_squared(i).sqrt();
                *z = amplitude * Complex64::new(re.eval(r), im.eval(r));
            });
            out
        })
        .collect();
    FieldVector::new(Grid::Cartesian(grid), comps)
}

/// `Ψ_λ = λ^{N/2} Ψ(λ x)` embedded in the box.
pub fn transplant_dilated(profile: &FieldVector, grid: Arc<CartesianGrid>, lambda: f64) -> Result<FieldVector> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("dilation must be positive, got {lambda}")));
    }
    let amp = lambda.powf(grid.dim() as f64 / 2.0);
    transplant(profile, grid, amp, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SystemParams {
        SystemParams::new(2, 2.5, vec![vec![1.0]]).unwrap()
    }

    fn gaussian(grid: &Arc<CartesianGrid>, amp: f64) -> FieldVector {
        FieldVector::sample(Grid::Cartesian(grid.clone()), 1, |_, x| {
            Complex64::new(amp * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0)
        })
    }

    #[test]
    fn plane_wave_single_step() {
        let grid = Arc::new(CartesianGrid::new(2, 16, std::f64::consts::PI).unwrap());
        let (c, k) = (0.7, [2.0, -1.0]);
        let a = 1.3;
        let params = SystemParams::new(2, 2.5, vec![vec![a]]).unwrap();
        let u = FieldVector::sample(Grid::Cartesian(grid.clone()), 1, |_, x| Complex64::from_polar(c, k[0] * x[0] + k[1] * x[1]));
        let dt = 0.01;
        let v = step(&u, &params, dt).unwrap();
        let omega = a * c.powf(2.0 * 2.5 - 2.0) - 5.0;
        let err = v.component(0).iter().zip(u.component(0)).map(|(z, w)| (z - w * Complex64::from_polar(1.0, omega * dt)).norm()).fold(0.0, f64::max);
        assert!(err / c < 1e-10, "{err}");
    }

    #[test]
    fn unitary_and_reversible() {
        let grid = Arc::new(CartesianGrid::new(2, 64, 8.0).unwrap());
        let u = gaussian(&grid, 1.5);
        let v = step(&u, &params(), 0.01).unwrap();
        assert!((v.masses()[0] / u.masses()[0] - 1.0).abs() < 1e-13);
        let back = step(&v, &params(), -0.01).unwrap();
        let err = back.component(0).iter().zip(u.component(0)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn fused_steps_match_single_steps() {
        let grid = Arc::new(CartesianGrid::new(2, 32, 8.0).unwrap());
        let prop = SplitStep::new(grid.clone(), &params(), 0.01).unwrap();
        let mut a = gaussian(&grid, 1.0);
        let mut b = a.clone();
        prop.advance(&mut a, 7).unwrap();
        for _ in 0..7 {
            prop.step(&mut b).unwrap();
        }
        let err = a.component(0).iter().zip(b.component(0)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn zero_field_stays_zero() {
        let grid = Arc::new(CartesianGrid::new(2, 16, 4.0).unwrap());
        let z = FieldVector::zeros(Grid::Cartesian(grid), 1);
        assert_eq!(step(&z, &params(), 0.1).unwrap(), z);
    }

    #[test]
    fn rejects_radial_and_poisoned_states() {
        let radial = crate::grid::RadialGrid::new(2, 64, 8.0).unwrap();
        let u = FieldVector::zeros(radial.into(), 1);
        assert!(matches!(step(&u, &params(), 0.1), Err(Error::WrongGrid(_))));
        let grid = Arc::new(CartesianGrid::new(2, 16, 4.0).unwrap());
        let mut u = FieldVector::zeros(Grid::Cartesian(grid), 1);
        u.components_mut()[0][3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(step(&u, &params(), 0.1), Err(Error::PoisonedState)));
    }

    #[test]
    fn trace_rows_and_conservation() {
        let grid = Arc::new(CartesianGrid::new(2, 64, 10.0).unwrap());
        let cfg = EvolutionConfig::new(1e-3, 0.2, 20);
        let trace = evolve(&gaussian(&grid, 1.0), &params(), &cfg).unwrap();
        assert_eq!(trace.verdict, Verdict::Completed);
        assert_eq!(trace.rows.len(), 11);
        assert!(trace.rows.windows(2).all(|w| w[1].t > w[0].t));
        assert!(trace.max_mass_drift() < 1e-12);
        assert!(trace.max_energy_drift() < 1e-6);
        let virial = virial_check(&trace, &params()).unwrap();
        assert!(virial.max_defect < 1e-3, "{}", virial.max_defect);
    }

    #[test]
    fn virial_needs_rows() {
        let grid = Arc::new(CartesianGrid::new(2, 16, 6.0).unwrap());
        let trace = evolve(&gaussian(&grid, 0.5), &params(), &EvolutionConfig::new(1e-2, 0.02, 1)).unwrap();
        assert!(matches!(virial_check(&trace, &params()), Err(Error::InsufficientRows(3))));
    }

    #[test]
    fn blowup_trigger() {
        let grid = Arc::new(CartesianGrid::new(2, 64, 8.0).unwrap());
        let mut cfg = EvolutionConfig::new(1e-3, 1.0, 10);
        cfg.gamma_blow = 1.5;
        let trace = evolve(&gaussian(&grid, 3.0), &params(), &cfg).unwrap();
        assert!(matches!(trace.verdict, Verdict::BlowupDetected(t) if t < 1.0));
    }

    #[test]
    fn transplant_gaussian() {
        let radial = Arc::new(crate::grid::RadialGrid::new(2, 1024, 12.0).unwrap());
        let prof = FieldVector::from_real_profiles(radial.clone(), &[radial.nodes().iter().map(|r| (-r * r / 2.0).exp()).collect()]).unwrap();
        let grid = Arc::new(CartesianGrid::new(2, 64, 8.0).unwrap());
        let lambda = 1.2;
        let u = transplant_dilated(&prof, grid.clone(), lambda).unwrap();
        for (i, z) in u.component(0).iter().enumerate() {
            let r2 = grid.radius_squared(i) * lambda * lambda;
            assert!((z.re - lambda * (-r2 / 2.0).exp()).abs() < 1e-9);
        }
    }
}
