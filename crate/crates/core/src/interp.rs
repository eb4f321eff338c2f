//! Resampling kernels used by the scaling laws and by the radial-to-box
//! transplant.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::exec;
use crate::grid::CartesianGrid;

/// Monotone cubic Hermite interpolant of a radial profile on uniform nodes.
///
/// Node slopes come from fourth-order central differences (even reflection
/// through `r = 0`), then pass through a Hyman filter wherever the data are
/// locally monotone. The profile is taken as zero beyond the last node.
#[derive(Debug, Clone)]
pub struct RadialInterpolant {
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl RadialInterpolant {
    pub fn new(spacing: f64, values: &[f64]) -> Self {
        let n = values.len();
        let at = |i: isize| -> f64 {
            if i < 0 {
                values[(-i) as usize]
            } else if (i as usize) < n {
                values[i as usize]
            } else {
                0.0
            }
        };
        let h = spacing;
        let mut slopes: Vec<f64> = (0..n as isize)
            .map(|i| {
                if i == 0 {
                    0.0
                } else if (i as usize) + 2 < n {
                    (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h)
                } else {
                    (at(i + 1) - at(i - 1)) / (2.0 * h)
                }
            })
            .collect();
        for i in 1..n - 1 {
            let left = (values[i] - values[i - 1]) / h;
            let right = (values[i + 1] - values[i]) / h;
            if left * right > 0.0 {
                let cap = 3.0 * left.abs().min(right.abs());
                slopes[i] = slopes[i].signum() * slopes[i].abs().min(cap);
                if slopes[i] * left < 0.0 {
                    slopes[i] = 0.0;
                }
            } else if left == 0.0 || right == 0.0 {
                slopes[i] = 0.0;
            }
        }
        RadialInterpolant { h, values: values.to_vec(), slopes }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        let n = self.values.len();
        let last = (n - 1) as f64 * self.h;
        if r >= last {
            return if r == last { self.values[n - 1] } else { 0.0 };
        }
        let pos = r / self.h;
        let i = (pos.floor() as usize).min(n - 2);
        let t = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    }
}

/// Periodic sinc kernel of an even-length trigonometric interpolant with a
/// split Nyquist mode: `sin(n th/2) cot(th/2) / n`.
fn periodic_sinc(n: usize, theta: f64) -> f64 {
    let half = 0.5 * theta;
    let s = half.sin();
    if s.abs() < 1e-14 {
        // |theta| < 2 pi for targets inside the box, so this is theta = 0.
        return 1.0;
    }
    (n as f64 * half).sin() * half.cos() / s / n as f64
}

/// Samples `u(scale * x)` on the same box by separable trigonometric
/// interpolation; targets that fall outside the box read zero.
pub fn resample_dilated(grid: &CartesianGrid, data: &[Complex64], scale: f64) -> Vec<Complex64> {
    let n = grid.points_per_axis();
    let l = grid.half_extent();
    let dk = PI / l;
    // Interpolation matrix, shared by every line of every axis.
    let mut weights = vec![0.0; n * n];
    exec::for_each_chunk(&mut weights, n, |t, row| {
        let y = scale * grid.axis_coordinate(t);
        if y < -l || y >= l {
            return;
        }
        for (s, w) in row.iter_mut().enumerate() {
            *w = periodic_sinc(n, dk * (y - grid.axis_coordinate(s)));
        }
    });
    let mut cur = data.to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let block = n * stride;
        let src = &cur;
        let w = &weights;
        // Each output element depends on one input line.
        exec::for_each_indexed(&mut next, |idx, out| {
            let base = (idx / block) * block + idx % stride;
            let t = (idx % block) / stride;
            let row = &w[t * n..(t + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, &ws) in row.iter().enumerate() {
                if ws != 0.0 {
                    acc += ws * src[base + s * stride];
                }
            }
            *out = acc;
        });
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_interpolant_reproduces_smooth_profile() {
        let h = 0.01;
        let vals: Vec<f64> = (0..1201).map(|i| (-(i as f64 * h).powi(2)).exp()).collect();
        let f = RadialInterpolant::new(h, &vals);
        let mut err: f64 = 0.0;
        for k in 0..5000 {
            let r = k as f64 * 0.0023;
            err = err.max((f.eval(r) - (-r * r).exp()).abs());
        }
        assert!(err < 1e-8, "err = {err}");
        assert_eq!(f.eval(20.0), 0.0);
    }

    #[test]
    fn monotone_data_stay_monotone() {
        let vals = [1.0, 1.0, 0.9, 0.1, 0.0, 0.0, 0.0, 0.0];
        let f = RadialInterpolant::new(1.0, &vals);
        let mut prev = f.eval(0.0);
        for k in 1..700 {
            let v = f.eval(k as f64 * 0.01);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn sinc_resampling_identity_and_shift() {
        let g = CartesianGrid::new(1, 64, 8.0).unwrap();
        let data: Vec<Complex64> = (0..64)
            .map(|i| {
                let x = g.axis_coordinate(i);
                Complex64::new((-x * x).exp(), 0.0)
            })
            .collect();
        let same = resample_dilated(&g, &data, 1.0);
        let err = same.iter().zip(&data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
        let squeezed = resample_dilated(&g, &data, 1.5);
        for (i, z) in squeezed.iter().enumerate() {
            let x = g.axis_coordinate(i) * 1.5;
            let exact = if (-8.0..8.0).contains(&x) { (-x * x).exp() } else { 0.0 };
            assert!((z.re - exact).abs() < 1e-10, "i = {i}");
        }
    }
}
