//! Potential-well classification into the sets `A^±` and the global
//! existence / blow-up experiments built on it.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evolution::{evolve_with, transplant_dilated, EvolutionConfig, EvolutionTrace, Verdict};
use crate::field::FieldVector;
use crate::functionals::{AlphaBeta, Functionals, Moments};
use crate::grid::CartesianGrid;
use crate::params::SystemParams;

/// Relative distance to `m_ref` below which a state counts as on the
/// boundary of the well.
pub const BOUNDARY_RESOLUTION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WellVerdict {
    APlus,
    AMinus,
    AboveWell,
    Boundary,
}

impl WellVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            WellVerdict::APlus => "A_plus",
            WellVerdict::AMinus => "A_minus",
            WellVerdict::AboveWell => "above_well",
            WellVerdict::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub action: f64,
    pub m_ref: f64,
    pub constraints: Vec<(AlphaBeta, f64)>,
    pub verdict: WellVerdict,
}

/// Classifies a state from its moments.
pub fn classify_moments(
    moments: &Moments,
    params: &SystemParams,
    m_ref: f64,
    pairs: &[AlphaBeta],
    resolution: f64,
) -> Result<Classification> {
    if !(m_ref > 0.0) {
        return Err(Error::InvalidParameter(format!("reference level must be positive, got {m_ref}")));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("empty (alpha, beta) test set".into()));
    }
    let f = Functionals::new(params, moments);
    let action = f.action();
    let constraints = pairs.iter().map(|&ab| Ok((ab, f.constraint(ab)?))).collect::<Result<Vec<_>>>()?;
    let verdict = if ((action - m_ref) / m_ref).abs() <= resolution {
        WellVerdict::Boundary
    } else if action > m_ref {
        WellVerdict::AboveWell
    } else if constraints.iter().all(|c| c.1 >= 0.0) {
        WellVerdict::APlus
    } else if constraints.iter().all(|c| c.1 < 0.0) {
        WellVerdict::AMinus
    } else {
        return Err(Error::SignDisagreement);
    };
    Ok(Classification { action, m_ref, constraints, verdict })
}

pub fn classify(u: &FieldVector, params: &SystemParams, m_ref: f64, pairs: &[AlphaBeta]) -> Result<Classification> {
    classify_moments(&Moments::of(u, params)?, params, m_ref, pairs, BOUNDARY_RESOLUTION)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyReport {
    pub initial: Classification,
    pub trace: EvolutionTrace,
    /// Rows whose classification differs from the initial one, with the
    /// verdict seen there (`None` when the test set disagreed in sign).
    pub flips: Vec<(f64, Option<WellVerdict>)>,
    /// `(2 + N) m_ref / 2`.
    pub gradient_bound: f64,
    pub max_gradient: f64,
    /// `δ = m_ref - S(u_0)`; along `A^-` runs `K_{1,-2/N}(u(t)) ≤ -δ`.
    pub delta: f64,
    pub max_virial: f64,
    pub consistent: bool,
}

/// Evolves a state of `A^±`, re-classifying at every trace row, and checks
/// the outcome against the dichotomy.
pub fn dichotomy_experiment(
    u0: &FieldVector,
    params: &SystemParams,
    cfg: &EvolutionConfig,
    m_ref: f64,
    pairs: &[AlphaBeta],
) -> Result<DichotomyReport> {
    let initial = classify(u0, params, m_ref, pairs)?;
    if !matches!(initial.verdict, WellVerdict::APlus | WellVerdict::AMinus) {
        return Err(Error::InvalidParameter(format!(
            "the dichotomy experiment needs a state in A_plus or A_minus, got {}",
            initial.verdict.name()
        )));
    }
    let mut flips = Vec::new();
    let trace = evolve_with(u0, params, cfg, |row, _| {
        match classify_moments(&row.moments, params, m_ref, pairs, BOUNDARY_RESOLUTION) {
            Ok(c) if c.verdict == initial.verdict => {}
            Ok(c) => flips.push((row.t, Some(c.verdict))),
            Err(_) => flips.push((row.t, None)),
        }
        ControlFlow::Continue(())
    })?;
    let gradient_bound = (2.0 + params.dim() as f64) * m_ref / 2.0;
    let max_gradient = trace.max_gradient();
    let delta = m_ref - initial.action;
    let max_virial = trace.rows.iter().map(|r| r.virial).fold(f64::NEG_INFINITY, f64::max);
    let consistent = flips.is_empty()
        && match initial.verdict {
            WellVerdict::APlus => trace.verdict == Verdict::Completed && max_gradient <= gradient_bound * (1.0 + 1e-2),
            _ => matches!(trace.verdict, Verdict::BlowupDetected(_)) && max_virial <= -delta,
        };
    Ok(DichotomyReport { initial, trace, flips, gradient_bound, max_gradient, delta, max_virial, consistent })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityRow {
    pub lambda: f64,
    /// `||Ψ_λ - Ψ||_{H^1}` on the box.
    pub distance: f64,
    pub classification: Classification,
    pub trace: EvolutionTrace,
}

impl InstabilityRow {
    pub fn blowup_time(&self) -> Option<f64> {
        match self.trace.verdict {
            Verdict::BlowupDetected(t) => Some(t),
            _ => None,
        }
    }
}

/// For each `λ > 1` builds `Ψ_λ = λ^{N/2} Ψ(λ x)` on the box, records its
/// distance to `Ψ`, classifies it and evolves it.
pub fn instability_experiment(
    profile: &FieldVector,
    params: &SystemParams,
    m_ref: f64,
    lambdas: &[f64],
    grid: Arc<CartesianGrid>,
    cfg: &EvolutionConfig,
    pairs: &[AlphaBeta],
) -> Result<Vec<InstabilityRow>> {
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l > 1.0)) {
        return Err(Error::InvalidParameter(format!("instability dilations must exceed 1, got {bad}")));
    }
    let psi = transplant_dilated(profile, grid.clone(), 1.0)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let u0 = transplant_dilated(profile, grid.clone(), lambda)?;
            let diff = u0.axpy(-1.0, &psi)?;
            let (m, g) = diff.inner_products();
            let distance = (m.iter().sum::<f64>() + g.iter().sum::<f64>()).sqrt();
            let classification = classify(&u0, params, m_ref, pairs)?;
            let trace = crate::evolution::evolve(&u0, params, cfg)?;
            Ok(InstabilityRow { lambda, distance, classification, trace })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::{solve_ground_state, vector_seeds, GroundStateConfig};
    use crate::grid::RadialGrid;
    use crate::scaling::{rescale, ScalingLaw};

    fn ground() -> (SystemParams, FieldVector, f64) {
        let params = SystemParams::new(2, 2.5, vec![vec![1.0]]).unwrap();
        let g = Arc::new(RadialGrid::new(2, 2048, 16.0).unwrap());
        let res = solve_ground_state(&params, &GroundStateConfig::new(g.clone(), vector_seeds(&g, 1))).unwrap();
        (params, res.profile, res.level)
    }

    #[test]
    fn classifies_scaled_dilated_and_exact_ground_state() {
        let (params, psi, m) = ground();
        let pairs = AlphaBeta::default_test_set(2);
        assert_eq!(classify(&psi.scaled(0.1), &params, m, &pairs).unwrap().verdict, WellVerdict::APlus);
        assert_eq!(classify(&psi, &params, m, &pairs).unwrap().verdict, WellVerdict::Boundary);
        let dilated = rescale(&psi, ScalingLaw::MassPreserving { lambda: 1.05 }).unwrap();
        assert_eq!(classify(&dilated, &params, m, &pairs).unwrap().verdict, WellVerdict::AMinus);
        let wide = rescale(&psi, ScalingLaw::Exponential { ab: AlphaBeta::new(0.0, 1.0), lambda: 1.5f64.ln() }).unwrap();
        assert_eq!(classify(&wide.scaled(0.9), &params, m, &pairs).unwrap().verdict, WellVerdict::AboveWell);
        assert_eq!(classify(&psi.scaled(1.5), &params, m, &pairs).unwrap().verdict, WellVerdict::AMinus);
    }

    #[test]
    fn mixed_signs_below_the_well_are_errors() {
        let params = SystemParams::new(2, 2.5, vec![vec![1.0]]).unwrap();
        // Large gradient, small mass: K_{1,0} > 0 but K_{0,1} < 0.
        let moments = Moments { masses: vec![0.1], gradients: vec![10.0], interaction: vec![vec![1.0]] };
        let pairs = [AlphaBeta::new(1.0, 0.0), AlphaBeta::new(0.0, 1.0)];
        assert_eq!(classify_moments(&moments, &params, 100.0, &pairs, 1e-8), Err(Error::SignDisagreement));
        assert!(classify_moments(&moments, &params, 0.0, &pairs, 1e-8).is_err());
    }

    #[test]
    fn rejects_contracting_dilations() {
        let (params, psi, m) = ground();
        let grid = Arc::new(CartesianGrid::new(2, 32, 16.0).unwrap());
        let cfg = EvolutionConfig::new(1e-3, 0.01, 1);
        let pairs = AlphaBeta::default_test_set(2);
        assert!(instability_experiment(&psi, &params, m, &[0.9], grid, &cfg, &pairs).is_err());
    }
}
