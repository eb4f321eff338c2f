//! Scalar functionals of a field: mass, energy, action, the constraint family
//! `K_{alpha,beta}`, the auxiliary functionals and the Gagliardo–Nirenberg
//! ratio.
//!
//! Everything is computed from one [`Moments`] pass (per-component masses,
//! gradient norms and the interaction matrix), so algebraic identities
//! between functionals hold to rounding.

use crate::error::{Error, Result};
use crate::exec;
use crate::field::FieldVector;
use crate::params::SystemParams;

/// Parameters of the exponential scaling family `e^{alpha l} u(e^{-beta l} x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
}

impl AlphaBeta {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        AlphaBeta { alpha, beta }
    }

    /// The virial pair `(1, -2/N)`.
    pub fn virial(dim: usize) -> Self {
        AlphaBeta::new(1.0, -2.0 / dim as f64)
    }

    /// Nonnegative and nonzero, or the virial pair.
    pub fn is_admissible(&self, dim: usize) -> bool {
        let positive = self.alpha >= 0.0 && self.beta >= 0.0 && (self.alpha > 0.0 || self.beta > 0.0);
        let v = AlphaBeta::virial(dim);
        positive || ((self.alpha - v.alpha).abs() < 1e-12 && (self.beta - v.beta).abs() < 1e-12)
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.alpha.is_finite() && self.beta.is_finite() && self.is_admissible(dim) {
            Ok(())
        } else {
            Err(Error::InadmissibleAlphaBeta(self.alpha, self.beta))
        }
    }

    /// `2 alpha + N beta`: the mass exponent of the scaling.
    pub fn mass_rate(&self, dim: usize) -> f64 {
        2.0 * self.alpha + dim as f64 * self.beta
    }

    /// `2 alpha + (N - 2) beta`: the gradient exponent of the scaling.
    pub fn gradient_rate(&self, dim: usize) -> f64 {
        2.0 * self.alpha + (dim as f64 - 2.0) * self.beta
    }

    /// `2 p alpha + N beta`: the interaction exponent of the scaling.
    pub fn interaction_rate(&self, dim: usize, p: f64) -> f64 {
        2.0 * p * self.alpha + dim as f64 * self.beta
    }

    /// `{(1,0), (0,1), (1,1), (1,-2/N)}`.
    pub fn default_test_set(dim: usize) -> Vec<AlphaBeta> {
        vec![
            AlphaBeta::new(1.0, 0.0),
            AlphaBeta::new(0.0, 1.0),
            AlphaBeta::new(1.0, 1.0),
            AlphaBeta::virial(dim),
        ]
    }
}

/// Interaction integrals `P_jk = int |u_j|^p |u_k|^p dx`, symmetric by
/// construction.
pub fn interaction_matrix(u: &FieldVector, params: &SystemParams) -> Vec<Vec<f64>> {
    let p = params.exponent();
    let grid = u.grid();
    let powers: Vec<Vec<f64>> = u
        .components()
        .iter()
        .map(|c| {
            let mut out = vec![0.0; c.len()];
            exec::for_each_indexed(&mut out, |i, v| *v = c[i].norm_sqr().powf(p / 2.0));
            out
        })
        .collect();
    let m = u.len();
    let mut mat = vec![vec![0.0; m]; m];
    for j in 0..m {
        for k in j..m {
            let (a, b) = (&powers[j], &powers[k]);
            let v = grid.integrate(|i| a[i] * b[i]);
            mat[j][k] = v;
            mat[k][j] = v;
        }
    }
    mat
}

/// Per-component masses, gradient norms and the interaction matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub masses: Vec<f64>,
    pub gradients: Vec<f64>,
    pub interaction: Vec<Vec<f64>>,
}

impl Moments {
    pub fn of(u: &FieldVector, params: &SystemParams) -> Result<Self> {
        u.check_finite()?;
        if u.len() != params.components() {
            return Err(Error::InvalidParameter(format!(
                "field has {} components, parameters expect {}",
                u.len(),
                params.components()
            )));
        }
        let (masses, gradients) = u.inner_products();
        Ok(Moments { masses, gradients, interaction: interaction_matrix(u, params) })
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn total_gradient(&self) -> f64 {
        self.gradients.iter().sum()
    }

    /// `sum_jk a_jk P_jk`.
    pub fn weighted_interaction(&self, params: &SystemParams) -> f64 {
        let m = self.masses.len();
        let mut s = 0.0;
        for j in 0..m {
            for k in 0..m {
                s += params.a(j, k) * self.interaction[j][k];
            }
        }
        s
    }

    /// `sum_k a_jk P_jk` for one component.
    pub fn row_interaction(&self, params: &SystemParams, j: usize) -> f64 {
        (0..self.masses.len()).map(|k| params.a(j, k) * self.interaction[j][k]).sum()
    }

    /// `sum_jk P_jk` without coupling weights.
    pub fn raw_interaction(&self) -> f64 {
        self.interaction.iter().flatten().sum()
    }
}

/// Functionals evaluated from a set of moments.
#[derive(Debug, Clone, Copy)]
pub struct Functionals<'a> {
    pub params: &'a SystemParams,
    pub moments: &'a Moments,
}

impl<'a> Functionals<'a> {
    pub fn new(params: &'a SystemParams, moments: &'a Moments) -> Self {
        Functionals { params, moments }
    }

    fn p(&self) -> f64 {
        self.params.exponent()
    }

    fn n(&self) -> f64 {
        self.params.dim() as f64
    }

    /// `E = 1/2 sum ||grad u_j||^2 - 1/(2p) sum a_jk P_jk`.
    pub fn energy(&self) -> f64 {
        0.5 * self.moments.total_gradient() - self.moments.weighted_interaction(self.params) / (2.0 * self.p())
    }

    /// `S = 1/2 sum ||u_j||_{H^1}^2 - 1/(2p) sum a_jk P_jk`.
    pub fn action(&self) -> f64 {
        0.5 * (self.moments.total_gradient() + self.moments.total_mass())
            - self.moments.weighted_interaction(self.params) / (2.0 * self.p())
    }

    /// `K_{alpha,beta}`: the derivative of the action along the scaling
    /// family at `lambda = 0`.
    pub fn constraint(&self, ab: AlphaBeta) -> Result<f64> {
        let dim = self.params.dim();
        ab.check(dim)?;
        Ok(self.constraint_unchecked(ab))
    }

    /// `K_{alpha,beta}` for any real pair (the stationary identities hold for
    /// all of them).
    pub fn constraint_unchecked(&self, ab: AlphaBeta) -> f64 {
        let dim = self.params.dim();
        let p = self.p();
        0.5 * (ab.gradient_rate(dim) * self.moments.total_gradient() + ab.mass_rate(dim) * self.moments.total_mass())
            - ab.interaction_rate(dim, p) / (2.0 * p) * self.moments.weighted_interaction(self.params)
    }

    /// The pieces of `K_{alpha,beta}` as (gradient, mass, interaction) terms;
    /// `K = gradient + mass - interaction`.
    pub fn constraint_terms(&self, ab: AlphaBeta) -> [f64; 3] {
        let dim = self.params.dim();
        let p = self.p();
        [
            0.5 * ab.gradient_rate(dim) * self.moments.total_gradient(),
            0.5 * ab.mass_rate(dim) * self.moments.total_mass(),
            ab.interaction_rate(dim, p) / (2.0 * p) * self.moments.weighted_interaction(self.params),
        ]
    }

    /// `H_{alpha,beta} = S - K_{alpha,beta} / (2 alpha + N beta)` in closed form:
    /// `(beta sum ||grad u_j||^2 + alpha (1 - 1/p) sum a_jk P_jk) / (2 alpha + N beta)`.
    pub fn auxiliary(&self, ab: AlphaBeta) -> Result<f64> {
        let dim = self.params.dim();
        ab.check(dim)?;
        let rate = ab.mass_rate(dim);
        if rate.abs() < 1e-12 {
            return Err(Error::DegenerateAlphaBeta(ab.alpha, ab.beta));
        }
        let p = self.p();
        Ok((ab.beta * self.moments.total_gradient()
            + ab.alpha * (1.0 - 1.0 / p) * self.moments.weighted_interaction(self.params))
            / rate)
    }

    /// `T(u) = 1/2 sum_j (||u_j||^2 + N/4 (1 - 1/p - 2/(N p)) sum_k a_jk P_jk)`.
    pub fn t_functional(&self) -> f64 {
        let (n, p) = (self.n(), self.p());
        0.5 * (self.moments.total_mass()
            + n / 4.0 * (1.0 - 1.0 / p - 2.0 / (n * p)) * self.moments.weighted_interaction(self.params))
    }

    /// `Q_j = 2/N ||grad u_j||^2 - (1 - 1/p) sum_k a_jk P_jk`.
    pub fn q_parts(&self) -> Vec<f64> {
        let (n, p) = (self.n(), self.p());
        (0..self.moments.masses.len())
            .map(|j| 2.0 / n * self.moments.gradients[j] - (1.0 - 1.0 / p) * self.moments.row_interaction(self.params, j))
            .collect()
    }

    /// `S_j = 1/2 ||u_j||_{H^1}^2 - 1/(2p) sum_k a_jk P_jk`.
    pub fn s_parts(&self) -> Vec<f64> {
        let p = self.p();
        (0..self.moments.masses.len())
            .map(|j| {
                0.5 * (self.moments.masses[j] + self.moments.gradients[j])
                    - self.moments.row_interaction(self.params, j) / (2.0 * p)
            })
            .collect()
    }

    /// Gagliardo–Nirenberg ratio
    /// `sum P_jk / ((sum G_j)^{N(p-1)/2} (sum M_j)^{(N - p(N-2))/2})`.
    pub fn gn_ratio(&self) -> Result<f64> {
        let (n, p) = (self.n(), self.p());
        let g = self.moments.total_gradient();
        let m = self.moments.total_mass();
        if g <= 0.0 || m <= 0.0 {
            return Err(Error::ZeroField);
        }
        let log_den = 0.5 * n * (p - 1.0) * g.ln() + 0.5 * (n - p * (n - 2.0)) * m.ln();
        Ok(self.moments.raw_interaction() * (-log_den).exp())
    }

    /// Right-hand side of the virial identity,
    /// `sum ||grad u_j||^2 - N(p-1)/(2p) sum a_jk P_jk`.
    pub fn virial_rhs(&self) -> f64 {
        let (n, p) = (self.n(), self.p());
        self.moments.total_gradient() - n * (p - 1.0) / (2.0 * p) * self.moments.weighted_interaction(self.params)
    }
}

/// Every scalar functional of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalReport {
    pub moments: Moments,
    pub energy: f64,
    pub action: f64,
    pub constraints: Vec<(AlphaBeta, f64)>,
    pub auxiliary: Vec<(AlphaBeta, f64)>,
    pub q_parts: Vec<f64>,
    pub s_parts: Vec<f64>,
    pub t: f64,
}

impl FunctionalReport {
    /// Evaluates all functionals; `H` is reported only for pairs with
    /// `2 alpha + N beta != 0`.
    pub fn compute(u: &FieldVector, params: &SystemParams, pairs: &[AlphaBeta]) -> Result<Self> {
        let moments = Moments::of(u, params)?;
        Self::from_moments(moments, params, pairs)
    }

    pub fn from_moments(moments: Moments, params: &SystemParams, pairs: &[AlphaBeta]) -> Result<Self> {
        let f = Functionals::new(params, &moments);
        let mut constraints = Vec::with_capacity(pairs.len());
        let mut auxiliary = Vec::new();
        for &ab in pairs {
            constraints.push((ab, f.constraint(ab)?));
            match f.auxiliary(ab) {
                Ok(h) => auxiliary.push((ab, h)),
                Err(Error::DegenerateAlphaBeta(..)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(FunctionalReport {
            energy: f.energy(),
            action: f.action(),
            q_parts: f.q_parts(),
            s_parts: f.s_parts(),
            t: f.t_functional(),
            constraints,
            auxiliary,
            moments,
        })
    }

    pub fn functionals<'a>(&'a self, params: &'a SystemParams) -> Functionals<'a> {
        Functionals::new(params, &self.moments)
    }

    pub fn constraint(&self, ab: AlphaBeta) -> Option<f64> {
        self.constraints.iter().find(|(x, _)| *x == ab).map(|(_, k)| *k)
    }
}

pub fn energy(u: &FieldVector, params: &SystemParams) -> Result<f64> {
    Ok(Functionals::new(params, &Moments::of(u, params)?).energy())
}

pub fn action(u: &FieldVector, params: &SystemParams) -> Result<f64> {
    Ok(Functionals::new(params, &Moments::of(u, params)?).action())
}

pub fn constraint_k(u: &FieldVector, params: &SystemParams, ab: AlphaBeta) -> Result<f64> {
    Functionals::new(params, &Moments::of(u, params)?).constraint(ab)
}

/// The constraint as first written with the doubled prefactor, `2 K_{alpha,beta}`.
pub fn constraint_k_doubled(u: &FieldVector, params: &SystemParams, ab: AlphaBeta) -> Result<f64> {
    Ok(2.0 * constraint_k(u, params, ab)?)
}

pub fn functional_h(u: &FieldVector, params: &SystemParams, ab: AlphaBeta) -> Result<f64> {
    Functionals::new(params, &Moments::of(u, params)?).auxiliary(ab)
}

pub fn functional_t(u: &FieldVector, params: &SystemParams) -> Result<f64> {
    Ok(Functionals::new(params, &Moments::of(u, params)?).t_functional())
}

pub fn gn_ratio(u: &FieldVector, params: &SystemParams) -> Result<f64> {
    Functionals::new(params, &Moments::of(u, params)?).gn_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CartesianGrid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn params(m: usize) -> SystemParams {
        SystemParams::new(2, 2.5, vec![vec![1.0; m]; m]).unwrap()
    }

    fn gaussian(amp: f64) -> FieldVector {
        let g = CartesianGrid::new(2, 128, 10.0).unwrap();
        FieldVector::sample(g.into(), 1, |_, x| Complex64::new(amp * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0))
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn gaussian_closed_forms() {
        // Closed-form Gaussian integrals: M = G = pi, P = pi/p.
        let u = gaussian(1.0);
        let p = params(1);
        let mom = Moments::of(&u, &p).unwrap();
        assert!(close(mom.interaction[0][0], PI / 2.5, 1e-8));
        let f = Functionals::new(&p, &mom);
        assert!(close(f.energy(), 0.42 * PI, 1e-8));
        assert!(close(f.action(), 0.92 * PI, 1e-8));
        let k = f.constraint(AlphaBeta::new(1.0, -1.0)).unwrap();
        assert!(close(k, 0.76 * PI, 1e-8));
        let k01 = f.constraint(AlphaBeta::new(0.0, 1.0)).unwrap();
        assert!(close(k01, PI - PI / 2.5 / 2.5, 1e-8));
    }

    #[test]
    fn doubled_amplitude_energy() {
        // E(2u) = 4 pi/2 - (1/5) 2^5 pi/2.5
        let e = energy(&gaussian(2.0), &params(1)).unwrap();
        let expected = 4.0 * PI / 2.0 - 0.2 * 32.0 * PI / 2.5;
        assert!(close(e, expected, 1e-8));
    }

    #[test]
    fn zero_field_functionals() {
        let g = CartesianGrid::new(2, 16, 4.0).unwrap();
        let u = FieldVector::zeros(g.into(), 2);
        let p = params(2);
        assert_eq!(energy(&u, &p).unwrap(), 0.0);
        assert_eq!(action(&u, &p).unwrap(), 0.0);
        assert_eq!(constraint_k(&u, &p, AlphaBeta::new(1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(functional_h(&u, &p, AlphaBeta::new(1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(functional_t(&u, &p).unwrap(), 0.0);
        assert_eq!(interaction_matrix(&u, &p), vec![vec![0.0; 2]; 2]);
        assert_eq!(gn_ratio(&u, &p), Err(Error::ZeroField));
    }

    #[test]
    fn duplicated_component_gives_equal_entries() {
        let g1 = gaussian(1.0);
        let c = g1.component(0).to_vec();
        let u = FieldVector::new(g1.grid().clone(), vec![c.clone(), c]).unwrap();
        let p = interaction_matrix(&u, &params(2));
        assert_eq!(p[0][1], p[0][0]);
        assert_eq!(p[1][1], p[0][0]);
    }

    #[test]
    fn admissibility() {
        assert!(AlphaBeta::new(1.0, 0.0).is_admissible(2));
        assert!(AlphaBeta::virial(3).is_admissible(3));
        assert!(!AlphaBeta::new(0.0, 0.0).is_admissible(2));
        assert!(!AlphaBeta::new(1.0, -0.5).is_admissible(2));
        let u = gaussian(1.0);
        assert_eq!(
            constraint_k(&u, &params(1), AlphaBeta::new(-1.0, 0.0)),
            Err(Error::InadmissibleAlphaBeta(-1.0, 0.0))
        );
    }

    #[test]
    fn virial_pair_has_no_auxiliary() {
        let u = gaussian(1.0);
        assert_eq!(functional_h(&u, &params(1), AlphaBeta::virial(2)), Err(Error::DegenerateAlphaBeta(1.0, -1.0)));
        let rep = FunctionalReport::compute(&u, &params(1), &AlphaBeta::default_test_set(2)).unwrap();
        assert_eq!(rep.constraints.len(), 4);
        assert_eq!(rep.auxiliary.len(), 3);
    }

    #[test]
    fn doubled_constraint() {
        let u = gaussian(1.3);
        let ab = AlphaBeta::new(1.0, 1.0);
        let k = constraint_k(&u, &params(1), ab).unwrap();
        assert_eq!(constraint_k_doubled(&u, &params(1), ab).unwrap(), 2.0 * k);
    }

    #[test]
    fn t_increases_with_amplitude() {
        let u = gaussian(1.0);
        let p = params(1);
        let mut prev = 0.0;
        for i in 1..20 {
            let t = functional_t(&u.scaled(0.2 * i as f64), &p).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }
}
