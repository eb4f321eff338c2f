//! Scaling laws and the closed-form constraint roots along them.

use crate::error::{Error, Result};
use crate::field::{FieldVector, Grid};
use crate::functionals::{AlphaBeta, Functionals, Moments};
use crate::interp::{resample_dilated, RadialInterpolant};
use crate::params::SystemParams;
use num_complex::Complex64;

/// Mass fraction allowed in the outer tenth of the domain after a dilation.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Scaling operators acting on a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingLaw {
    /// `u -> e^{alpha l} u(e^{-beta l} x)`.
    Exponential { ab: AlphaBeta, lambda: f64 },
    /// `u -> l^{N/2} u(l x)`.
    MassPreserving { lambda: f64 },
    /// `u -> l u`.
    Amplitude { lambda: f64 },
}

impl ScalingLaw {
    /// `(A, s)` such that the law maps `u` to `A u(s x)`.
    pub fn factors(&self, dim: usize) -> Result<(f64, f64)> {
        match *self {
            ScalingLaw::Exponential { ab, lambda } => Ok(((ab.alpha * lambda).exp(), (-ab.beta * lambda).exp())),
            ScalingLaw::MassPreserving { lambda } if lambda > 0.0 => Ok((lambda.powf(dim as f64 / 2.0), lambda)),
            ScalingLaw::Amplitude { lambda } if lambda > 0.0 => Ok((lambda, 1.0)),
            ScalingLaw::MassPreserving { lambda } | ScalingLaw::Amplitude { lambda } => Err(Error::InvalidParameter(
                format!("scaling parameter must be positive, got {lambda}"),
            )),
        }
    }

    /// Exact transformation of the moments: `A u(s x)` has mass
    /// `A^2 s^{-N} M`, gradient norm `A^2 s^{2-N} G` and interaction
    /// `A^{2p} s^{-N} P`.
    pub fn apply_to_moments(&self, moments: &Moments, params: &SystemParams) -> Result<Moments> {
        let dim = params.dim() as i32;
        let (amp, s) = self.factors(params.dim())?;
        let p = params.exponent();
        let mass = amp * amp * s.powi(-dim);
        let grad = amp * amp * s.powi(2 - dim);
        let inter = amp.powf(2.0 * p) * s.powi(-dim);
        Ok(Moments {
            masses: moments.masses.iter().map(|m| m * mass).collect(),
            gradients: moments.gradients.iter().map(|g| g * grad).collect(),
            interaction: moments
                .interaction
                .iter()
                .map(|row| row.iter().map(|v| v * inter).collect())
                .collect(),
        })
    }
}

/// Applies a scaling law by resampling on the same grid.
///
/// Box fields are resampled by separable trigonometric interpolation, radial
/// profiles by monotone cubic interpolation; both read zero outside the
/// domain.
pub fn rescale(u: &FieldVector, law: ScalingLaw) -> Result<FieldVector> {
    u.check_finite()?;
    let dim = u.grid().dim();
    let (amp, s) = law.factors(dim)?;
    if s == 1.0 {
        return Ok(u.scaled(amp));
    }
    let comps: Vec<Vec<Complex64>> = match u.grid() {
        Grid::Cartesian(g) => u
            .components()
            .iter()
            .map(|c| {
                let mut out = resample_dilated(g, c, s);
                out.iter_mut().for_each(|z| *z *= amp);
                out
            })
            .collect(),
        Grid::Radial(g) => u
            .components()
            .iter()
            .map(|c| {
                let re: Vec<f64> = c.iter().map(|z| z.re).collect();
                let im: Vec<f64> = c.iter().map(|z| z.im).collect();
                let fre = RadialInterpolant::new(g.spacing(), &re);
                let fim = RadialInterpolant::new(g.spacing(), &im);
                g.nodes()
                    .iter()
                    .map(|&r| amp * Complex64::new(fre.eval(s * r), fim.eval(s * r)))
                    .collect()
            })
            .collect(),
    };
    let out = FieldVector::new(u.grid().clone(), comps)?;
    let tail = out.tail_fraction(0.9);
    if tail > TAIL_TOLERANCE {
        return Err(Error::SupportOverflow(tail));
    }
    Ok(out)
}

/// Dilation `l0` with `sum_j Q_j(u_{l0}) = 0` along `u_l = l^{N/2} u(l x)`:
/// `l0 = [(2G/N) / ((1 - 1/p) sum a_jk P_jk)]^{1/(N(p-1) - 2)}`.
pub fn nehari_root_dilation_moments(moments: &Moments, params: &SystemParams) -> Result<f64> {
    let n = params.dim() as f64;
    let p = params.exponent();
    let g = moments.total_gradient();
    let inter = moments.weighted_interaction(params);
    if g <= 0.0 {
        return Err(Error::DegenerateField("vanishing gradient norm"));
    }
    if inter <= 0.0 {
        return Err(Error::DegenerateField("vanishing interaction"));
    }
    Ok(((2.0 * g / n) / ((1.0 - 1.0 / p) * inter)).powf(1.0 / (n * (p - 1.0) - 2.0)))
}

pub fn nehari_root_dilation(u: &FieldVector, params: &SystemParams) -> Result<f64> {
    nehari_root_dilation_moments(&Moments::of(u, params)?, params)
}

/// Amplitude `t0` with `K_{alpha,beta}(t0 u) = 0`:
/// `t0 = (quadratic / interaction)^{1/(2p-2)}`.
pub fn nehari_root_amplitude_moments(moments: &Moments, params: &SystemParams, ab: AlphaBeta) -> Result<f64> {
    ab.check(params.dim())?;
    let f = Functionals::new(params, moments);
    let [grad, mass, inter] = f.constraint_terms(ab);
    let quadratic = grad + mass;
    if quadratic <= 0.0 {
        return Err(Error::DegenerateField("nonpositive quadratic part"));
    }
    if inter <= 0.0 {
        return Err(Error::DegenerateField("nonpositive interaction part"));
    }
    Ok((quadratic / inter).powf(1.0 / (2.0 * params.exponent() - 2.0)))
}

pub fn nehari_root_amplitude(u: &FieldVector, params: &SystemParams, ab: AlphaBeta) -> Result<f64> {
    nehari_root_amplitude_moments(&Moments::of(u, params)?, params, ab)
}

/// Bisection for a sign change of `f` on `[lo, hi]`; tolerance `1e-12`,
/// at most 200 halvings. Used to cross-check the closed-form roots.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
