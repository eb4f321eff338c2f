//! Property suites over seeded random corpora. Each suite reports its worst
//! relative error against a fixed tolerance.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::evolution::SplitStep;
use crate::field::FieldVector;
use crate::functionals::{AlphaBeta, Functionals, Moments};
use crate::grid::{CartesianGrid, RadialGrid};
use crate::scaling::{
    bisect, nehari_root_amplitude_moments, nehari_root_dilation_moments, rescale, ScalingLaw,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteOutcome {
    fn new(name: &'static str, cases: usize, worst: f64, tolerance: f64) -> Self {
        SuiteOutcome { name, cases, worst, tolerance, passed: worst <= tolerance }
    }

    fn failed(name: &'static str, tolerance: f64) -> Self {
        SuiteOutcome { name, cases: 0, worst: f64::INFINITY, tolerance, passed: false }
    }
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    let scale = scale.max(a.abs()).max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn test_box(n: usize) -> Arc<CartesianGrid> {
    Arc::new(CartesianGrid::new(2, n, 8.0).expect("valid grid"))
}

/// `Σ_j Q_j = K_{1,-2/N}`, `S = Σ_j S_j` and
/// `H_{α,β} = S - K_{α,β} / (2α + Nβ)` on random fields with `m ∈ {1, 2, 3}`.
pub fn identities(seed: u64, count: usize) -> Result<SuiteOutcome> {
    let grid = test_box(64);
    let mut corpus = Corpus::new(seed);
    let mut worst: f64 = 0.0;
    for case in 0..count {
        let m = 1 + case % 3;
        let params = corpus.params(2, m)?;
        let u = corpus.box_field(grid.clone(), m);
        let moments = Moments::of(&u, &params)?;
        let f = Functionals::new(&params, &moments);
        let virial = AlphaBeta::virial(2);
        let q: Vec<f64> = f.q_parts();
        let q_scale: f64 = f.constraint_terms(virial).iter().map(|t| t.abs()).sum();
        worst = worst.max(rel(q.iter().sum(), f.constraint(virial)?, q_scale));
        let s_parts = f.s_parts();
        let s_scale = 0.5 * (moments.total_mass() + moments.total_gradient())
            + moments.weighted_interaction(&params) / (2.0 * params.exponent());
        worst = worst.max(rel(s_parts.iter().sum(), f.action(), s_scale));
        for ab in AlphaBeta::default_test_set(2) {
            if ab.mass_rate(2).abs() < 1e-12 {
                continue;
            }
            let k = f.constraint(ab)?;
            let h = f.auxiliary(ab)?;
            worst = worst.max(rel(h, f.action() - k / ab.mass_rate(2), s_scale));
        }
    }
    Ok(SuiteOutcome::new("identities", count, worst, 1e-12))
}

/// `K_{α,β}(u)` against a Richardson-extrapolated central difference of
/// `λ ↦ S((u^λ)^{α,β})` at `λ = 0`, with the rescaled fields resampled on the
/// grid.
pub fn derivative_anchor(seed: u64, count: usize) -> Result<SuiteOutcome> {
    let grid = test_box(64);
    let mut corpus = Corpus::new(seed);
    let h = 1e-2;
    let mut worst: f64 = 0.0;
    for case in 0..count {
        let m = 1 + case % 2;
        let params = corpus.params(2, m)?;
        let u = corpus.box_field(grid.clone(), m);
        let moments = Moments::of(&u, &params)?;
        let f = Functionals::new(&params, &moments);
        for ab in AlphaBeta::default_test_set(2) {
            let s_at = |lambda: f64| -> Result<f64> {
                let v = rescale(&u, ScalingLaw::Exponential { ab, lambda })?;
                crate::functionals::action(&v, &params)
            };
            let central = |step: f64| -> Result<f64> { Ok((s_at(step)? - s_at(-step)?) / (2.0 * step)) };
            let fd = (4.0 * central(h / 2.0)? - central(h)?) / 3.0;
            let scale: f64 = f.constraint_terms(ab).iter().map(|t| t.abs()).sum();
            worst = worst.max(rel(fd, f.constraint(ab)?, scale));
        }
    }
    Ok(SuiteOutcome::new("derivative-anchor", count, worst, 1e-6))
}

/// Gagliardo–Nirenberg ratio under `u ↦ t u` and `u ↦ u(λ ·)` for
/// `t, λ ∈ {0.5, 2, 5}`. The dilated field is represented exactly by
/// carrying the samples onto the box of half-extent `L / λ`.
pub fn gn_invariance(seed: u64, count: usize) -> Result<SuiteOutcome> {
    let grid = test_box(64);
    let mut corpus = Corpus::new(seed);
    let mut worst: f64 = 0.0;
    for case in 0..count {
        let m = 1 + case % 3;
        let params = corpus.params(2, m)?;
        let u = corpus.box_field(grid.clone(), m);
        let j0 = Functionals::new(&params, &Moments::of(&u, &params)?).gn_ratio()?;
        for factor in [0.5, 2.0, 5.0] {
            let scaled = u.scaled(factor);
            let j_amp = Functionals::new(&params, &Moments::of(&scaled, &params)?).gn_ratio()?;
            let shrunk = Arc::new(CartesianGrid::new(2, grid.points_per_axis(), grid.half_extent() / factor)?);
            let dilated = FieldVector::new(shrunk.into(), u.components().to_vec())?;
            let j_dil = Functionals::new(&params, &Moments::of(&dilated, &params)?).gn_ratio()?;
            worst = worst.max(rel(j_amp, j0, 0.0)).max(rel(j_dil, j0, 0.0));
        }
    }
    Ok(SuiteOutcome::new("gn-invariance", count, worst, 1e-10))
}

/// Physical and spectral masses agree, and `||∇u||^2 = -<u, Δu>`.
pub fn parseval(seed: u64, count: usize) -> Result<SuiteOutcome> {
    let grid = test_box(64);
    let mut corpus = Corpus::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let u = corpus.box_field(grid.clone(), 2);
        let lap = u.laplacian()?;
        let grads = u.gradient_norms();
        for (j, c) in u.components().iter().enumerate() {
            let physical: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            let mut hat = c.clone();
            grid.fft_forward(&mut hat);
            let spectral: f64 = hat.iter().map(|z| z.norm_sqr()).sum::<f64>() / hat.len() as f64;
            worst = worst.max(rel(physical, spectral, 0.0));
            let single = FieldVector::new(grid.clone().into(), vec![c.clone()])?;
            let lap_j = FieldVector::new(grid.clone().into(), vec![lap.component(j).to_vec()])?;
            worst = worst.max(rel(grads[j], -single.inner(&lap_j)?.re, 0.0));
        }
    }
    Ok(SuiteOutcome::new("parseval", count, worst, 1e-12))
}

/// `<Δu, v> = <u, Δv>` for the spectral Laplacian.
pub fn laplacian_symmetry(seed: u64, count: usize) -> Result<SuiteOutcome> {
    let grid = test_box(64);
    let mut corpus = Corpus::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let u = corpus.box_field(grid.clone(), 2);
        let v = corpus.box_field(grid.clone(), 2);
        let a = u.laplacian()?.inner(&v)?;
        let b = u.inner(&v.laplacian()?)?;
        let scale = u.gradient_norms().iter().sum::<f64>().sqrt() * v.gradient_norms().iter().sum::<f64>().sqrt();
        worst = worst.max((a - b).norm() / scale);
    }
    Ok(SuiteOutcome::new("laplacian-symmetry", count, worst, 1e-12))
}

/// Gaussian moments on the box (`N = 2, 3`) and on radial grids
/// (`N = 2..5`).
pub fn quadrature() -> Result<SuiteOutcome> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for dim in 2..=3 {
        let grid = CartesianGrid::new(dim, 48, 8.0)?;
        let u = FieldVector::sample(grid.into(), 1, |_, x| {
            Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp(), 0.0)
        });
        // ∫ e^{-|x|^2} = π^{N/2};  ∫ |∇ e^{-|x|^2/2}|^2 = (N/2) π^{N/2}.
        let exact = std::f64::consts::PI.powf(dim as f64 / 2.0);
        worst = worst.max(rel(u.masses()[0], exact, 0.0));
        worst = worst.max(rel(u.gradient_norms()[0], 0.5 * dim as f64 * exact, 0.0));
        cases += 1;
    }
    for dim in 2..=5 {
        let grid = RadialGrid::new(dim, 801, 10.0)?;
        let u = FieldVector::sample(grid.into(), 1, |_, r| Complex64::new((-r[0] * r[0] / 2.0).exp(), 0.0));
        let exact = std::f64::consts::PI.powf(dim as f64 / 2.0);
        worst = worst.max(rel(u.masses()[0], exact, 0.0));
        cases += 1;
    }
    Ok(SuiteOutcome::new("quadrature", cases, worst, 1e-10))
}

/// Closed-form constraint roots against bisection on the scaled moments.
pub fn nehari_roots(seed: u64, count: usize) -> Result<SuiteOutcome> {
    let grid = test_box(64);
    let mut corpus = Corpus::new(seed);
    let mut worst: f64 = 0.0;
    for case in 0..count {
        let m = 1 + case % 3;
        let params = corpus.params(2, m)?;
        let u = corpus.box_field(grid.clone(), m);
        let moments = Moments::of(&u, &params)?;
        for ab in AlphaBeta::default_test_set(2) {
            let closed = nehari_root_amplitude_moments(&moments, &params, ab)?;
            let k_at = |t: f64| {
                let scaled = ScalingLaw::Amplitude { lambda: t }.apply_to_moments(&moments, &params).expect("t > 0");
                Functionals::new(&params, &scaled).constraint_unchecked(ab)
            };
            let root = bisect(k_at, closed / 4.0, closed * 4.0).ok_or(Error::BracketFailure)?;
            worst = worst.max(rel(root, closed, 0.0));
        }
        let closed = nehari_root_dilation_moments(&moments, &params)?;
        let q_at = |l: f64| {
            let scaled = ScalingLaw::MassPreserving { lambda: l }.apply_to_moments(&moments, &params).expect("l > 0");
            Functionals::new(&params, &scaled).q_parts().iter().sum::<f64>()
        };
        let root = bisect(q_at, closed / 4.0, closed * 4.0).ok_or(Error::BracketFailure)?;
        worst = worst.max(rel(root, closed, 0.0));
    }
    Ok(SuiteOutcome::new("nehari-roots", count, worst, 1e-10))
}

/// Two-component constant-amplitude plane waves advanced `steps` steps and
/// compared with `c_j e^{i(k_j·x + ω_j t)}`,
/// `ω_j = Σ_k a_jk |c_k|^p |c_j|^{p-2} - |k_j|^2`.
pub fn plane_wave(seed: u64, steps: usize) -> Result<SuiteOutcome> {
    let mut corpus = Corpus::new(seed);
    let params = corpus.params(2, 2)?;
    let grid = Arc::new(CartesianGrid::new(2, 32, 8.0)?);
    let base = std::f64::consts::PI / grid.half_extent();
    let rng = corpus.rng();
    let amps: Vec<f64> = (0..2).map(|_| rng.gen_range(0.3..1.0)).collect();
    let waves: Vec<[f64; 2]> =
        (0..2).map(|_| [base * rng.gen_range(-3..=3) as f64, base * rng.gen_range(-3..=3) as f64]).collect();
    let p = params.exponent();
    let omega: Vec<f64> = (0..2)
        .map(|j| {
            (0..2).map(|k| params.a(j, k) * amps[k].powf(p) * amps[j].powf(p - 2.0)).sum::<f64>()
                - waves[j][0] * waves[j][0]
                - waves[j][1] * waves[j][1]
        })
        .collect();
    let exact = |t: f64| {
        FieldVector::sample(grid.clone().into(), 2, |j, x| {
            Complex64::from_polar(amps[j], waves[j][0] * x[0] + waves[j][1] * x[1] + omega[j] * t)
        })
    };
    let dt = 1e-3;
    let mut u = exact(0.0);
    SplitStep::new(grid.clone(), &params, dt)?.advance(&mut u, steps)?;
    let target = exact(dt * steps as f64);
    let diff = u.axpy(-1.0, &target)?;
    let worst = (diff.masses().iter().sum::<f64>() / target.masses().iter().sum::<f64>()).sqrt();
    Ok(SuiteOutcome::new("plane-wave", steps, worst, 1e-10))
}

/// Mass-preserving dilations keep `M` and multiply `||∇u||^2` by `λ^2`.
pub fn rescale_invariance(seed: u64, count: usize) -> Result<SuiteOutcome> {
    let grid = Arc::new(CartesianGrid::new(2, 128, 12.0)?);
    let mut corpus = Corpus::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let u = corpus.box_field(grid.clone(), 2);
        let (m0, g0) = u.inner_products();
        for lambda in [0.8, 1.25] {
            let v = rescale(&u, ScalingLaw::MassPreserving { lambda })?;
            let (m1, g1) = v.inner_products();
            for j in 0..2 {
                worst = worst.max(rel(m1[j], m0[j], 0.0));
                worst = worst.max(rel(g1[j], lambda * lambda * g0[j], 0.0));
            }
        }
    }
    Ok(SuiteOutcome::new("rescale-invariance", count, worst, 1e-8))
}

/// Every suite at the sizes used by the `check` command.
pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    type Suite = (&'static str, f64, Box<dyn Fn(u64) -> Result<SuiteOutcome>>);
    let suites: Vec<Suite> = vec![
        ("identities", 1e-12, Box::new(|s| identities(s, 30))),
        ("derivative-anchor", 1e-6, Box::new(|s| derivative_anchor(s, 4))),
        ("gn-invariance", 1e-10, Box::new(|s| gn_invariance(s, 10))),
        ("parseval", 1e-12, Box::new(|s| parseval(s, 10))),
        ("laplacian-symmetry", 1e-12, Box::new(|s| laplacian_symmetry(s, 10))),
        ("quadrature", 1e-10, Box::new(|_| quadrature())),
        ("nehari-roots", 1e-10, Box::new(|s| nehari_roots(s, 10))),
        ("plane-wave", 1e-10, Box::new(|s| plane_wave(s, 200))),
        ("rescale-invariance", 1e-8, Box::new(|s| rescale_invariance(s, 4))),
    ];
    suites
        .into_iter()
        .map(|(name, tol, run)| run(seed).unwrap_or_else(|_| SuiteOutcome::failed(name, tol)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_and_are_deterministic() {
        let first = run_all(11);
        assert!(first.len() >= 8);
        for s in &first {
            assert!(s.passed, "{s:?}");
        }
        assert_eq!(first, run_all(11));
    }
}
