//! Vector fields `u = (u_1, ..., u_m)` sampled on a shared grid, with the
//! Laplacian and the basic quadratures.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{CartesianGrid, RadialGrid};

/// Grid shared by all components of a field.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Cartesian(Arc<CartesianGrid>),
    Radial(Arc<RadialGrid>),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Cartesian(g) => g.len(),
            Grid::Radial(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Grid::Cartesian(g) => g.dim(),
            Grid::Radial(g) => g.dim(),
        }
    }

    /// Quadrature weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        match self {
            Grid::Cartesian(g) => g.cell_volume(),
            Grid::Radial(g) => g.weights()[i],
        }
    }

    /// Deterministic quadrature `sum_i w_i f(i)`.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        match self {
            Grid::Cartesian(g) => g.cell_volume() * exec::sum_blocks(g.len(), |r| r.map(&f).sum()),
            Grid::Radial(g) => {
                let w = g.weights();
                exec::sum_blocks(g.len(), |r| r.map(|i| w[i] * f(i)).sum())
            }
        }
    }

    pub fn as_cartesian(&self) -> Result<&Arc<CartesianGrid>> {
        match self {
            Grid::Cartesian(g) => Ok(g),
            Grid::Radial(_) => Err(Error::WrongGrid("Cartesian")),
        }
    }

    pub fn as_radial(&self) -> Result<&Arc<RadialGrid>> {
        match self {
            Grid::Radial(g) => Ok(g),
            Grid::Cartesian(_) => Err(Error::WrongGrid("radial")),
        }
    }

    /// Coordinates of node `i` (radial grids report `[r]`).
    pub fn coordinates(&self, i: usize) -> [f64; 4] {
        match self {
            Grid::Cartesian(g) => g.point(i),
            Grid::Radial(g) => [g.nodes()[i], 0.0, 0.0, 0.0],
        }
    }

    /// `|x|^2` at node `i`.
    pub fn radius_squared(&self, i: usize) -> f64 {
        match self {
            Grid::Cartesian(g) => g.radius_squared(i),
            Grid::Radial(g) => g.nodes()[i] * g.nodes()[i],
        }
    }

    /// Radius beyond which a field counts as touching the boundary.
    pub fn outer_radius(&self) -> f64 {
        match self {
            Grid::Cartesian(g) => g.half_extent(),
            Grid::Radial(g) => g.radius(),
        }
    }

    /// Whether node `i` lies in the outer shell beyond `fraction` of the
    /// domain (sup-norm distance on the box).
    pub fn in_outer_shell(&self, i: usize, fraction: f64) -> bool {
        match self {
            Grid::Cartesian(g) => {
                let x = g.point(i);
                x[..g.dim()].iter().any(|v| v.abs() >= fraction * g.half_extent())
            }
            Grid::Radial(g) => g.nodes()[i] >= fraction * g.radius(),
        }
    }
}

impl From<CartesianGrid> for Grid {
    fn from(g: CartesianGrid) -> Self {
        Grid::Cartesian(Arc::new(g))
    }
}

impl From<RadialGrid> for Grid {
    fn from(g: RadialGrid) -> Self {
        Grid::Radial(Arc::new(g))
    }
}

impl From<Arc<CartesianGrid>> for Grid {
    fn from(g: Arc<CartesianGrid>) -> Self {
        Grid::Cartesian(g)
    }
}

impl From<Arc<RadialGrid>> for Grid {
    fn from(g: Arc<RadialGrid>) -> Self {
        Grid::Radial(g)
    }
}

/// `m` complex scalar fields on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    grid: Grid,
    components: Vec<Vec<Complex64>>,
}

impl FieldVector {
    pub fn new(grid: Grid, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("a field needs at least one component".into()));
        }
        if components.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(FieldVector { grid, components })
    }

    pub fn zeros(grid: Grid, m: usize) -> Self {
        let n = grid.len();
        FieldVector { grid, components: vec![vec![Complex64::new(0.0, 0.0); n]; m.max(1)] }
    }

    /// Samples `f(j, x)` at every node for every component `j`.
    pub fn sample<F>(grid: Grid, m: usize, f: F) -> Self
    where
        F: Fn(usize, &[f64]) -> Complex64 + Sync + Send,
    {
        let dim = match &grid {
            Grid::Cartesian(g) => g.dim(),
            Grid::Radial(_) => 1,
        };
        let components = (0..m)
            .map(|j| {
                let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
                exec::for_each_indexed(&mut data, |i, z| {
                    let x = grid.coordinates(i);
                    *z = f(j, &x[..dim]);
                });
                data
            })
            .collect();
        FieldVector { grid, components }
    }

    /// Real profiles on a radial grid.
    pub fn from_real_profiles(grid: Arc<RadialGrid>, profiles: &[Vec<f64>]) -> Result<Self> {
        let comps = profiles
            .iter()
            .map(|p| p.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        FieldVector::new(Grid::Radial(grid), comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.components
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        &self.components[j]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Real parts of every component.
    pub fn real_profiles(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| c.iter().map(|z| z.re).collect()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::PoisonedState)
        }
    }

    pub fn scaled(&self, factor: f64) -> FieldVector {
        let mut out = self.clone();
        for c in &mut out.components {
            exec::for_each_indexed(c, |_, z| *z *= factor);
        }
        out
    }

    /// Pointwise `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &FieldVector) -> Result<FieldVector> {
        if self.grid != other.grid || self.len() != other.len() {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        for (c, o) in out.components.iter_mut().zip(&other.components) {
            exec::for_each_indexed(c, |i, z| *z += factor * o[i]);
        }
        Ok(out)
    }

    /// Per-component masses `||u_j||^2`.
    pub fn masses(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| self.grid.integrate(|i| c[i].norm_sqr()))
            .collect()
    }

    /// Per-component `||grad u_j||^2`: spectral multiplier `|k|^2` on the
    /// box, fourth-order nodal derivatives on radial grids.
    pub fn gradient_norms(&self) -> Vec<f64> {
        match &self.grid {
            Grid::Cartesian(g) => self
                .components
                .iter()
                .map(|c| {
                    let mut hat = c.clone();
                    g.fft_forward(&mut hat);
                    let k2 = g.k_squared();
                    let s = exec::sum_blocks(hat.len(), |r| r.map(|i| k2[i] * hat[i].norm_sqr()).sum());
                    s * g.cell_volume() / g.len() as f64
                })
                .collect(),
            Grid::Radial(g) => self
                .components
                .iter()
                .map(|c| {
                    let re: Vec<f64> = c.iter().map(|z| z.re).collect();
                    let im: Vec<f64> = c.iter().map(|z| z.im).collect();
                    g.gradient_norm_sq(&re) + g.gradient_norm_sq(&im)
                })
                .collect(),
        }
    }

    /// `(||u_j||^2, ||grad u_j||^2)` per component.
    pub fn inner_products(&self) -> (Vec<f64>, Vec<f64>) {
        (self.masses(), self.gradient_norms())
    }

    /// Componentwise Laplacian.
    pub fn laplacian(&self) -> Result<FieldVector> {
        self.check_finite()?;
        let mut out = self.clone();
        match &self.grid {
            Grid::Cartesian(g) => {
                let k2 = g.k_squared();
                for c in &mut out.components {
                    g.fft_forward(c);
                    exec::for_each_indexed(c, |i, z| *z *= -k2[i]);
                    g.fft_inverse(c);
                }
            }
            Grid::Radial(g) => {
                let n = g.len();
                let mut lre = vec![0.0; n];
                let mut lim = vec![0.0; n];
                for c in &mut out.components {
                    let re: Vec<f64> = c.iter().map(|z| z.re).collect();
                    let im: Vec<f64> = c.iter().map(|z| z.im).collect();
                    g.laplacian_real(&re, &mut lre);
                    g.laplacian_real(&im, &mut lim);
                    for (i, z) in c.iter_mut().enumerate() {
                        *z = Complex64::new(lre[i], lim[i]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Grid inner product `sum_j <u_j, v_j>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &FieldVector) -> Result<Complex64> {
        if self.grid != other.grid || self.len() != other.len() {
            return Err(Error::GridMismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.components.iter().zip(&other.components) {
            let re = self.grid.integrate(|i| (a[i].conj() * b[i]).re);
            let im = self.grid.integrate(|i| (a[i].conj() * b[i]).im);
            acc += Complex64::new(re, im);
        }
        Ok(acc)
    }

    /// Fraction of the total mass located in the outer shell beyond
    /// `fraction` of the domain.
    pub fn tail_fraction(&self, fraction: f64) -> f64 {
        let total: f64 = self.masses().iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = self
            .components
            .iter()
            .map(|c| {
                self.grid.integrate(|i| if self.grid.in_outer_shell(i, fraction) { c[i].norm_sqr() } else { 0.0 })
            })
            .sum();
        tail / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian_box(n: usize, l: f64) -> FieldVector {
        let g = CartesianGrid::new(2, n, l).unwrap();
        FieldVector::sample(g.into(), 1, |_, x| Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0))
    }

    #[test]
    fn gaussian_norms_on_box() {
        let u = gaussian_box(128, 10.0);
        let (m, g) = u.inner_products();
        assert!((m[0] / PI - 1.0).abs() < 1e-8);
        assert!((g[0] / PI - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_field_norms() {
        let g = CartesianGrid::new(2, 16, 4.0).unwrap();
        let u = FieldVector::zeros(g.into(), 2);
        assert_eq!(u.inner_products(), (vec![0.0, 0.0], vec![0.0, 0.0]));
    }

    #[test]
    fn plane_wave_is_laplacian_eigenfunction() {
        let g = CartesianGrid::new(2, 32, PI).unwrap();
        let (kx, ky) = (3.0, -5.0);
        let u = FieldVector::sample(g.into(), 1, |_, x| Complex64::from_polar(1.0, kx * x[0] + ky * x[1]));
        let lap = u.laplacian().unwrap();
        let err = u.component(0)
            .iter()
            .zip(lap.component(0))
            .map(|(a, b)| (b + (kx * kx + ky * ky) * a).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "err = {err}");
    }

    #[test]
    fn constant_has_zero_laplacian() {
        let g = CartesianGrid::new(3, 8, 2.0).unwrap();
        let u = FieldVector::sample(g.into(), 1, |_, _| Complex64::new(2.5, -1.0));
        let lap = u.laplacian().unwrap();
        assert!(lap.component(0).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn radial_gaussian_laplacian_is_second_order() {
        let mut errs = Vec::new();
        for n in [512, 1024] {
            let g = RadialGrid::new(2, n, 12.0).unwrap();
            let u = FieldVector::sample(g.clone().into(), 1, |_, r| Complex64::new((-r[0] * r[0] / 2.0).exp(), 0.0));
            let lap = u.laplacian().unwrap();
            let err = g
                .nodes()
                .iter()
                .zip(lap.component(0))
                .take(n - 1)
                .map(|(&r, z)| (z.re - (r * r - 2.0) * (-r * r / 2.0).exp()).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[0] < 1e-3);
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }

    #[test]
    fn poisoned_state_is_detected() {
        let g = CartesianGrid::new(2, 8, 1.0).unwrap();
        let mut u = FieldVector::zeros(g.into(), 1);
        u.components_mut()[0][3] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(u.laplacian(), Err(Error::PoisonedState));
    }

    #[test]
    fn box_laplacian_is_self_adjoint() {
        let g: Grid = CartesianGrid::new(2, 32, 4.0).unwrap().into();
        let u = FieldVector::sample(g.clone(), 1, |_, x| Complex64::new((x[0] * 1.3).sin() * (-x[1] * x[1]).exp(), x[1].cos()));
        let v = FieldVector::sample(g, 1, |_, x| Complex64::new((-(x[0] - 0.5).powi(2)).exp(), (x[0] * x[1]).sin()));
        let a = u.laplacian().unwrap().inner(&v).unwrap();
        let b = u.inner(&v.laplacian().unwrap()).unwrap();
        let scale = u.masses()[0].sqrt() * v.masses()[0].sqrt();
        assert!((a - b).norm() <= 1e-10 * scale);
    }
}
