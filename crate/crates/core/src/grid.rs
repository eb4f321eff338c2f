//! Spatial grids: a periodic Cartesian box for dynamics and a radial grid for
//! stationary solves.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::exec;

/// Surface area of the unit sphere in `R^N`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    // Gamma(N/2) for integer N via the half-integer recursion.
    let half = dim as f64 / 2.0;
    let mut gamma = if dim % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if dim % 2 == 0 { 1.0 } else { 0.5 };
    while x < half {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half) / gamma
}

/// Periodic box `[-L, L)^N` with `n` points per axis.
#[derive(Clone)]
pub struct CartesianGrid {
    dim: usize,
    n: usize,
    half_extent: f64,
    spacing: f64,
    wavenumbers: Vec<f64>,
    k2: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CartesianGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CartesianGrid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("half_extent", &self.half_extent)
            .finish()
    }
}

impl PartialEq for CartesianGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.half_extent == other.half_extent
    }
}

impl CartesianGrid {
    pub fn new(dim: usize, n: usize, half_extent: f64) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("points per axis must be even and >= 4, got {n}")));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidParameter(format!("half extent must be positive, got {half_extent}")));
        }
        let spacing = 2.0 * half_extent / n as f64;
        let dk = PI / half_extent;
        let wavenumbers: Vec<f64> = (0..n)
            .map(|i| if i < n / 2 { i as f64 * dk } else { (i as f64 - n as f64) * dk })
            .collect();
        let total = n.pow(dim as u32);
        let mut k2 = vec![0.0; total];
        for (idx, slot) in k2.iter_mut().enumerate() {
            let mut rest = idx;
            let mut acc = 0.0;
            for _ in 0..dim {
                let k = wavenumbers[rest % n];
                acc += k * k;
                rest /= n;
            }
            *slot = acc;
        }
        let mut planner = FftPlanner::new();
        Ok(CartesianGrid {
            dim,
            n,
            half_extent,
            spacing,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
            k2,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.k2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k2.is_empty()
    }

    /// Quadrature weight of every node, `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Per-axis discrete frequencies in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// `|k|^2` for every flat spectral index.
    pub fn k_squared(&self) -> &[f64] {
        &self.k2
    }

    pub fn axis_coordinate(&self, i: usize) -> f64 {
        -self.half_extent + i as f64 * self.spacing
    }

    /// Coordinates of a flat index (row-major, last axis fastest).
    pub fn point(&self, idx: usize) -> [f64; 4] {
        let mut x = [0.0; 4];
        let mut rest = idx;
        for d in (0..self.dim).rev() {
            x[d] = self.axis_coordinate(rest % self.n);
            rest /= self.n;
        }
        x
    }

    pub fn radius_squared(&self, idx: usize) -> f64 {
        let x = self.point(idx);
        x[..self.dim].iter().map(|v| v * v).sum()
    }

    /// Unnormalized forward transform over all axes, in place.
    pub fn fft_forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform including the `1/n^N` normalization, in place.
    pub fn fft_inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        exec::for_each_indexed(data, |_, z| *z *= scale);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "buffer does not match the grid");
        let n = self.n;
        // Batch several lines per task so scratch allocation is amortized.
        let lines_per_task = (exec::REDUCE_BLOCK / n).max(1);
        let mut buf = vec![Complex64::new(0.0, 0.0); n.pow(self.dim as u32 - 1) * n];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                exec::for_each_chunk(data, n * lines_per_task, |_, c| plan.process(c));
                continue;
            }
            let block = n * stride;
            let tmp = &mut buf[..block];
            for chunk in data.chunks_mut(block) {
                {
                    let src = &*chunk;
                    exec::for_each_chunk(tmp, n, |j, line| {
                        for (i, z) in line.iter_mut().enumerate() {
                            *z = src[i * stride + j];
                        }
                    });
                }
                exec::for_each_chunk(tmp, n * lines_per_task, |_, c| plan.process(c));
                let src = &*tmp;
                exec::for_each_chunk(chunk, stride, |i, row| {
                    for (j, z) in row.iter_mut().enumerate() {
                        *z = src[j * n + i];
                    }
                });
            }
        }
    }
}

/// Radial grid on `[0, R]` with nodes `r_i = i h`.
///
/// Two weight sets live on the grid. Quadrature weights apply fourth-order
/// Gregory end corrections to the trapezoid rule on the `omega_N r^{N-1}`
/// measure, so polynomials up to degree three in `r` (and in particular the
/// ball volume for `N <= 4`) integrate exactly. Cell volumes are the dual
/// shells `[r_{i-1/2}, r_{i+1/2}]`; together with the face coefficients they
/// define the finite-volume Laplacian, which is symmetric under the
/// cell-volume inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    radius: f64,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    volumes: Vec<f64>,
    fluxes: Vec<f64>,
}

const GREGORY: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];

/// `B_{2j} / (2j)` for `j = 1..=8`.
const BERNOULLI_OVER_INDEX: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Corrections, in units of `h^N`, added to the trapezoid weights on the
/// first four nodes so that `int_0 f r^{N-1} dr` is exact at the origin end
/// for `f = 1, r^2, r^4`. The free null direction is used to keep the origin
/// weight positive.
fn origin_corrections(dim: usize) -> [f64; 4] {
    let rhs: Vec<f64> = (0..3)
        .map(|k| {
            let m = 2 * k + dim - 1;
            if m % 2 == 1 {
                BERNOULLI_OVER_INDEX[(m + 1) / 2 - 1]
            } else {
                0.0
            }
        })
        .collect();
    // Vandermonde in s = i^2 on nodes 0, 1, 2.
    let delta2 = (rhs[2] - rhs[1]) / 12.0;
    let delta1 = rhs[1] - 4.0 * delta2;
    let delta0 = rhs[0] - delta1 - delta2;
    let null = [1.0, -1.5, 0.6, -0.1];
    let t = (1.0 / 24.0 - delta0).max(0.0);
    [delta0 + t * null[0], delta1 + t * null[1], delta2 + t * null[2], t * null[3]]
}

impl RadialGrid {
    pub fn new(dim: usize, n_r: usize, radius: f64) -> Result<Self> {
        if !(2..=10).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n_r < 8 {
            return Err(Error::InvalidParameter(format!("radial grid needs >= 8 nodes, got {n_r}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        let h = radius / (n_r - 1) as f64;
        let nodes: Vec<f64> = (0..n_r).map(|i| if i == n_r - 1 { radius } else { i as f64 * h }).collect();
        let area = unit_sphere_area(dim);
        let origin = origin_corrections(dim);
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let end = n_r - 1 - i;
                let c = if end < 3 { GREGORY[end] } else { 1.0 };
                let mut w = h * c * r.powi(dim as i32 - 1);
                if i < 4 {
                    w += origin[i] * h.powi(dim as i32);
                }
                area * w
            })
            .collect();
        let nf = dim as f64;
        let shell = |a: f64, b: f64| -> f64 {
            // (b^N - a^N)/N without cancellation.
            let mut s = 0.0;
            for k in 0..dim {
                s += b.powi(k as i32) * a.powi((dim - 1 - k) as i32);
            }
            area * (b - a) * s / nf
        };
        let volumes = (0..n_r)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { (i as f64 - 0.5) * h };
                let hi = if i == n_r - 1 { radius } else { (i as f64 + 0.5) * h };
                shell(lo, hi)
            })
            .collect();
        let fluxes = (0..n_r - 1)
            .map(|i| area * ((i as f64 + 0.5) * h).powi(dim as i32 - 1) / h)
            .collect();
        Ok(RadialGrid { dim, radius, spacing: h, nodes, weights, volumes, fluxes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights for `int f dx` over the ball.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Dual-cell volumes of the finite-volume scheme.
    pub fn cell_volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Face coefficients `omega_N r_{i+1/2}^{N-1} / h`, one per interval.
    pub fn fluxes(&self) -> &[f64] {
        &self.fluxes
    }

    pub fn ball_volume(&self) -> f64 {
        unit_sphere_area(self.dim) * self.radius.powi(self.dim as i32) / self.dim as f64
    }

    /// Finite-volume Laplacian of a real profile, a second-order
    /// discretization of `psi'' + (N-1)/r psi'` with `psi'(0) = 0`. The outer
    /// node is held at zero (Dirichlet) and its output is zero.
    pub fn laplacian_real(&self, psi: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n - 1 {
            let right = if i + 1 < n - 1 { psi[i + 1] } else { 0.0 };
            let mut flux = self.fluxes[i] * (right - psi[i]);
            if i > 0 {
                flux -= self.fluxes[i - 1] * (psi[i] - psi[i - 1]);
            }
            out[i] = flux / self.volumes[i];
        }
        out[n - 1] = 0.0;
    }

    /// `-<psi, L psi>` under the cell volumes: the staggered-face gradient
    /// energy that pairs with [`laplacian_real`](Self::laplacian_real).
    pub fn face_gradient_norm_sq(&self, psi: &[f64]) -> f64 {
        let n = self.len();
        (0..n - 1)
            .map(|i| {
                let right = if i + 1 == n - 1 { 0.0 } else { psi[i + 1] };
                let d = right - psi[i];
                self.fluxes[i] * d * d
            })
            .sum()
    }

    /// Fourth-order nodal derivative with even reflection at the origin and
    /// zero extension past `R`.
    pub fn derivative(&self, psi: &[f64]) -> Vec<f64> {
        let n = self.len();
        let at = |i: isize| -> f64 {
            let k = i.unsigned_abs();
            if k < n - 1 {
                psi[k]
            } else {
                0.0
            }
        };
        let h = self.spacing;
        (0..n as isize)
            .map(|i| (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h))
            .collect()
    }

    /// `int |psi'|^2 dx` from nodal derivatives and the quadrature weights.
    pub fn gradient_norm_sq(&self, psi: &[f64]) -> f64 {
        self.derivative(psi)
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * d * d)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn box_quadrature_is_exact() {
        let g = CartesianGrid::new(2, 64, 8.0).unwrap();
        let total = g.cell_volume() * g.len() as f64;
        assert!((total - 256.0).abs() < 1e-12);
    }

    #[test]
    fn ball_quadrature_is_exact() {
        for dim in 2..=4 {
            let g = RadialGrid::new(dim, 4096, 16.0).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!(((s - g.ball_volume()) / g.ball_volume()).abs() < 1e-10, "N = {dim}");
            assert!(g.weights().iter().all(|&w| w > 0.0));
            let v: f64 = g.cell_volumes().iter().sum();
            assert!(((v - g.ball_volume()) / g.ball_volume()).abs() < 1e-12);
            assert_eq!(*g.nodes().last().unwrap(), 16.0);
            assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn radial_gaussian_integrals() {
        for dim in 2..=5 {
            let exact = PI.powf(dim as f64 / 2.0);
            let g = RadialGrid::new(dim, 401, 10.0).unwrap();
            let s: f64 = g.nodes().iter().zip(g.weights()).map(|(r, w)| w * (-r * r).exp()).sum();
            assert!(((s - exact) / exact).abs() < 1e-10, "N = {dim}: {}", s / exact - 1.0);
            let grad: f64 = g.gradient_norm_sq(&g.nodes().iter().map(|r| (-r * r / 2.0).exp()).collect::<Vec<_>>());
            let grad_exact = dim as f64 / 2.0 * exact;
            assert!(((grad - grad_exact) / grad_exact).abs() < 1e-6, "N = {dim}");
        }
    }

    #[test]
    fn wavenumber_convention() {
        let g = CartesianGrid::new(1, 8, PI).unwrap();
        assert_eq!(g.wavenumbers(), &[0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn fft_round_trip_3d() {
        let g = CartesianGrid::new(3, 8, 2.0).unwrap();
        let orig: Vec<Complex64> = (0..g.len()).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut data = orig.clone();
        g.fft_forward(&mut data);
        g.fft_inverse(&mut data);
        let err = orig.iter().zip(&data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }
}
