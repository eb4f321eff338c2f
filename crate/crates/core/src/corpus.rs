//! Seeded random test states: Gaussian mixtures on the box and `t Ψ_λ`
//! mixtures built from a ground state.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldVector;
use crate::functionals::{Functionals, Moments};
use crate::grid::CartesianGrid;
use crate::params::{energy_critical_exponent, mass_critical_exponent, SystemParams};
use crate::scaling::{rescale, ScalingLaw};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bump {
    center: [f64; 4],
    width: f64,
    amplitude: Complex64,
    wavevector: [f64; 4],
}

impl Bump {
    fn eval(&self, x: &[f64], dim: usize) -> Complex64 {
        let (mut r2, mut phase) = (0.0, 0.0);
        for d in 0..dim {
            let y = x[d] - self.center[d];
            r2 += y * y;
            phase += self.wavevector[d] * x[d];
        }
        self.amplitude * (-r2 / (2.0 * self.width * self.width)).exp() * Complex64::from_polar(1.0, phase)
    }
}

/// Deterministic generator of random fields and parameters.
#[derive(Debug, Clone)]
pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Exponent drawn from the interior of the intercritical window.
    pub fn exponent(&mut self, dim: usize) -> f64 {
        let lo = mass_critical_exponent(dim);
        let hi = energy_critical_exponent(dim).min(lo + 3.0);
        lo + (hi - lo) * self.rng.gen_range(0.1..0.9)
    }

    /// Symmetric coupling with entries in `[0.5, 2]`.
    pub fn coupling(&mut self, m: usize) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; m]; m];
        for j in 0..m {
            for k in j..m {
                let v = self.rng.gen_range(0.5..2.0);
                a[j][k] = v;
                a[k][j] = v;
            }
        }
        a
    }

    pub fn params(&mut self, dim: usize, m: usize) -> Result<SystemParams> {
        let p = self.exponent(dim);
        let a = self.coupling(m);
        SystemParams::new(dim, p, a)
    }

    /// Each component is a sum of one to three complex Gaussians with
    /// widths in `[0.7, 1.4]`, centers within a sixth of the half-extent and
    /// a small plane-wave phase.
    pub fn box_field(&mut self, grid: Arc<CartesianGrid>, m: usize) -> FieldVector {
        let dim = grid.dim();
        let reach = grid.half_extent() / 6.0;
        let k_max = 0.5;
        let bumps: Vec<Vec<Bump>> = (0..m)
            .map(|_| {
                let count = self.rng.gen_range(1..=3);
                (0..count)
                    .map(|_| {
                        let mut center = [0.0; 4];
                        let mut wavevector = [0.0; 4];
                        for d in 0..dim {
                            center[d] = self.rng.gen_range(-reach..reach);
                            wavevector[d] = self.rng.gen_range(-k_max..k_max);
                        }
                        Bump {
                            center,
                            width: self.rng.gen_range(0.7..1.4),
                            amplitude: Complex64::from_polar(self.rng.gen_range(0.2..1.5), self.rng.gen_range(0.0..TAU)),
                            wavevector,
                        }
                    })
                    .collect()
            })
            .collect();
        FieldVector::sample(grid.into(), m, |j, x| bumps[j].iter().map(|b| b.eval(x, dim)).sum())
    }

    /// States `t_1 Ψ_{λ_1} + t_2 Ψ_{λ_2}` (second term present half of the
    /// time) on the profile's radial grid, kept only when `S < m_ref`.
    /// Dilations are drawn from `[0.75, 1.5]`, amplitudes from `[0.1, 1.4]`.
    pub fn below_well_states(
        &mut self,
        profile: &FieldVector,
        params: &SystemParams,
        m_ref: f64,
        count: usize,
    ) -> Result<Vec<FieldVector>> {
        let mut out = Vec::with_capacity(count);
        let max_tries = 100 * count.max(1);
        for _ in 0..max_tries {
            if out.len() == count {
                break;
            }
            let mut u = self.dilated(profile)?;
            if self.rng.gen_bool(0.5) {
                let v = self.dilated(profile)?;
                u = u.axpy(1.0, &v)?;
            }
            let moments = Moments::of(&u, params)?;
            let s = Functionals::new(params, &moments).action();
            if s < m_ref * (1.0 - 1e-6) {
                out.push(u);
            }
        }
        if out.len() < count {
            return Err(Error::InvalidParameter(format!("generated only {} of {count} states below the well", out.len())));
        }
        Ok(out)
    }

    fn dilated(&mut self, profile: &FieldVector) -> Result<FieldVector> {
        let lambda = self.rng.gen_range(0.75..1.5);
        let t = self.rng.gen_range(0.1..1.4);
        Ok(rescale(profile, ScalingLaw::MassPreserving { lambda })?.scaled(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_fields() {
        let grid = Arc::new(CartesianGrid::new(2, 32, 8.0).unwrap());
        let a = Corpus::new(7).box_field(grid.clone(), 2);
        let b = Corpus::new(7).box_field(grid.clone(), 2);
        let c = Corpus::new(8).box_field(grid, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_parameters_are_valid() {
        let mut corpus = Corpus::new(1);
        for dim in 2..=4 {
            for m in 1..=3 {
                corpus.params(dim, m).unwrap();
            }
        }
    }

    #[test]
    fn box_fields_are_localized() {
        let grid = Arc::new(CartesianGrid::new(2, 64, 8.0).unwrap());
        let mut corpus = Corpus::new(3);
        for _ in 0..10 {
            assert!(corpus.box_field(grid.clone(), 3).tail_fraction(0.9) < 1e-10);
        }
    }
}
