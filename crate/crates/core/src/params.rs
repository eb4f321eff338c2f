//! System parameters: dimension, exponent and the coupling matrix.

use crate::error::{Error, Result};

/// Lower end of the intercritical window, `1 + 2/N`.
pub fn mass_critical_exponent(dim: usize) -> f64 {
    1.0 + 2.0 / dim as f64
}

/// Upper end of the window, `N/(N-2)` for `N > 2` and infinity for `N = 2`.
pub fn energy_critical_exponent(dim: usize) -> f64 {
    if dim > 2 {
        dim as f64 / (dim as f64 - 2.0)
    } else {
        f64::INFINITY
    }
}

/// Symmetric positive coupling matrix `a_jk`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    m: usize,
    entries: Vec<f64>,
}

impl Coupling {
    pub fn components(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.m + k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.m).map(|r| r.to_vec()).collect()
    }

    /// `a_jj = mu_j` on the diagonal and `a_jk = mu` off it.
    pub fn diagonal_plus_uniform(diag: &[f64], mu: f64) -> Vec<Vec<f64>> {
        let m = diag.len();
        (0..m)
            .map(|j| (0..m).map(|k| if j == k { diag[j] } else { mu }).collect())
            .collect()
    }
}

/// Validated problem parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    dim: usize,
    exponent: f64,
    coupling: Coupling,
}

impl SystemParams {
    /// Validates a candidate parameter set.
    pub fn new(dim: usize, exponent: f64, coupling: Vec<Vec<f64>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let m = coupling.len();
        if m == 0 {
            return Err(Error::InvalidParameter("at least one component is required".into()));
        }
        if coupling.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter("coupling matrix must be square".into()));
        }
        for (j, row) in coupling.iter().enumerate() {
            for (k, &a) in row.iter().enumerate() {
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::NonPositiveCoupling(j, k, a));
                }
                if a != coupling[k][j] {
                    return Err(Error::NonSymmetricCoupling(j, k));
                }
            }
        }
        let lower = mass_critical_exponent(dim);
        let upper = energy_critical_exponent(dim);
        if !(exponent.is_finite() && exponent > lower && exponent < upper) {
            return Err(Error::ExponentOutOfRange { p: exponent, lower, upper });
        }
        Ok(SystemParams {
            dim,
            exponent,
            coupling: Coupling { m, entries: coupling.into_iter().flatten().collect() },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn components(&self) -> usize {
        self.coupling.m
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    #[inline]
    pub fn a(&self, j: usize, k: usize) -> f64 {
        self.coupling.get(j, k)
    }

    /// Dynamics are restricted to `2 <= N <= 4`.
    pub fn require_dynamics(&self) -> Result<()> {
        if self.dim > 4 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        Ok(())
    }

    /// Same problem with another coupling matrix.
    pub fn with_coupling(&self, coupling: Vec<Vec<f64>>) -> Result<Self> {
        SystemParams::new(self.dim, self.exponent, coupling)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_intercritical_exponents() {
        assert!(SystemParams::new(2, 2.5, vec![vec![1.0]]).is_ok());
        let p = SystemParams::new(3, 2.0, vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(p.components(), 2);
        assert_eq!(p.a(0, 1), 2.0);
    }

    #[test]
    fn rejects_mass_critical_exponent() {
        match SystemParams::new(2, 2.0, vec![vec![1.0]]) {
            Err(Error::ExponentOutOfRange { lower, upper, .. }) => {
                assert_eq!(lower, 2.0);
                assert!(upper.is_infinite());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            SystemParams::new(3, 3.0, vec![vec![1.0]]),
            Err(Error::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_bad_couplings() {
        assert_eq!(
            SystemParams::new(2, 2.5, vec![vec![1.0, 2.0], vec![3.0, 1.0]]),
            Err(Error::NonSymmetricCoupling(0, 1))
        );
        assert!(matches!(
            SystemParams::new(2, 2.5, vec![vec![0.0]]),
            Err(Error::NonPositiveCoupling(0, 0, _))
        ));
        assert_eq!(SystemParams::new(1, 4.0, vec![vec![1.0]]), Err(Error::UnsupportedDimension(1)));
    }

    #[test]
    fn dynamics_dimension_guard() {
        let p = SystemParams::new(5, 1.5, vec![vec![1.0]]).unwrap();
        assert_eq!(p.require_dynamics(), Err(Error::UnsupportedDimension(5)));
    }
}
