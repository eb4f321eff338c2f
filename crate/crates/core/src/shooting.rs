//! Radial shooting for the single-component profile equation
//!
//! ```text
//! psi'' + (N-1)/r psi' - psi + a psi^{2p-1} = 0,   psi'(0) = 0,
//! ```
//!
//! used as an independent check of the gradient-flow solver.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::SystemParams;

const RTOL: f64 = 1e-11;
const ATOL: f64 = 1e-13;
const BISECTION_TOL: f64 = 1e-12;
const SERIES_RADIUS: f64 = 1e-2;

/// Fate of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shot {
    /// `psi` became negative at this radius.
    Crossed(f64),
    /// `psi'` became positive (or `psi` grew without bound) while `psi > 0`.
    Turned(f64),
    /// The trajectory reached the outer radius without either event.
    Reached,
}

impl Shot {
    fn crossed(&self) -> bool {
        matches!(self, Shot::Crossed(_))
    }
}

/// Converged shooting profile on the nodes of a radial grid.
#[derive(Debug, Clone)]
pub struct ShotProfile {
    /// Central value of the profile for coupling `a`.
    pub center: f64,
    /// Node values; zero beyond `cutoff`.
    pub values: Vec<f64>,
    /// Radius where the last trajectory left the decaying branch.
    pub cutoff: f64,
    /// Final bracket on the central value for `a = 1`, as
    /// `(value, fate)` pairs with opposite fates.
    pub bracket: [(f64, Shot); 2],
    pub bisection_steps: usize,
}

struct Rhs {
    dim: f64,
    power: f64,
}

impl Rhs {
    fn source(&self, psi: f64) -> f64 {
        psi - psi * psi.abs().powf(self.power)
    }

    fn eval(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        [y[1], -(self.dim - 1.0) / r * y[1] + self.source(y[0])]
    }

    fn series(&self, center: f64, r: f64) -> [f64; 2] {
        // psi = c0 + c2 r^2 + c4 r^4
        let f0 = self.source(center);
        let df = 1.0 - (self.power + 1.0) * center.abs().powf(self.power);
        let c2 = f0 / (2.0 * self.dim);
        let c4 = df * c2 / (4.0 * (self.dim + 2.0));
        [center + c2 * r * r + c4 * r.powi(4), 2.0 * c2 * r + 4.0 * c4 * r.powi(3)]
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dopri_step(rhs: &Rhs, r: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut ys = y;
        for (l, kl) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][l] * kl[0];
            ys[1] += h * A[s][l] * kl[1];
        }
        k[s] = rhs.eval(r + C[s] * h, ys);
    }
    let mut y5 = y;
    let mut y4 = y;
    for s in 0..7 {
        for d in 0..2 {
            y5[d] += h * B5[s] * k[s][d];
            y4[d] += h * B4[s] * k[s][d];
        }
    }
    let err = (0..2)
        .map(|d| {
            let sc = ATOL + RTOL * y[d].abs().max(y5[d].abs());
            ((y5[d] - y4[d]) / sc).powi(2)
        })
        .sum::<f64>()
        / 2.0;
    (y5, err.sqrt())
}

/// Integrates one trajectory from the center value, optionally recording
/// `psi` at the grid nodes it passes.
fn shoot(rhs: &Rhs, center: f64, nodes: &[f64], mut record: Option<&mut Vec<f64>>) -> Shot {
    let outer = *nodes.last().unwrap_or(&0.0);
    let mut next_node = 0;
    if let Some(rec) = record.as_deref_mut() {
        rec.clear();
        while next_node < nodes.len() && nodes[next_node] <= SERIES_RADIUS {
            rec.push(rhs.series(center, nodes[next_node])[0]);
            next_node += 1;
        }
    } else {
        next_node = nodes.partition_point(|&r| r <= SERIES_RADIUS);
    }
    let mut r = SERIES_RADIUS;
    let mut y = rhs.series(center, r);
    let mut h = 1e-3;
    let blowup = 1e3 * center.abs().max(1.0);
    while r < outer {
        let target = if next_node < nodes.len() { nodes[next_node] } else { outer };
        let lands = r + h >= target;
        let step = if lands { target - r } else { h };
        let (y_new, err) = dopri_step(rhs, r, y, step);
        if err > 1.0 || !y_new[0].is_finite() {
            h = step * (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }
        r = if lands { target } else { r + step };
        y = y_new;
        h = step * (0.9 * err.max(1e-10).powf(-0.2)).min(5.0);
        if lands {
            if let Some(rec) = record.as_deref_mut() {
                rec.push(y[0]);
            }
            next_node += 1;
        }
        if y[0] < 0.0 {
            return Shot::Crossed(r);
        }
        if y[1] > 0.0 || y[0] > blowup {
            return Shot::Turned(r);
        }
    }
    Shot::Reached
}

/// Solves the single-component profile equation by bisection on the central
/// value and samples the result on `grid`.
pub fn shooting_oracle(params: &SystemParams, grid: &RadialGrid) -> Result<ShotProfile> {
    if params.components() != 1 {
        return Err(Error::InvalidParameter("the shooting oracle handles one component".into()));
    }
    if params.dim() != grid.dim() {
        return Err(Error::GridMismatch);
    }
    let p = params.exponent();
    let rhs = Rhs { dim: params.dim() as f64, power: 2.0 * p - 2.0 };
    let nodes = grid.nodes();

    // Below the constant solution psi = 1 every trajectory turns upward.
    let mut lo = (1.0, shoot(&rhs, 1.0, nodes, None));
    let mut hi = (2.0, shoot(&rhs, 2.0, nodes, None));
    let mut expansions = 0;
    while !hi.1.crossed() {
        lo = hi;
        hi.0 *= 2.0;
        hi.1 = shoot(&rhs, hi.0, nodes, None);
        expansions += 1;
        if expansions > 60 {
            return Err(Error::BracketFailure);
        }
    }
    if lo.1.crossed() {
        return Err(Error::BracketFailure);
    }
    let mut steps = 0;
    while hi.0 - lo.0 > BISECTION_TOL {
        let mid = 0.5 * (lo.0 + hi.0);
        if mid <= lo.0 || mid >= hi.0 {
            break;
        }
        let fate = shoot(&rhs, mid, nodes, None);
        if fate.crossed() {
            hi = (mid, fate);
        } else {
            lo = (mid, fate);
        }
        steps += 1;
    }
    let mut values = Vec::with_capacity(nodes.len());
    let fate = shoot(&rhs, lo.0, nodes, Some(&mut values));
    let cutoff = match fate {
        Shot::Crossed(r) | Shot::Turned(r) => r,
        Shot::Reached => grid.radius(),
    };
    // Drop the node where the trajectory left the decaying branch.
    if fate != Shot::Reached {
        values.pop();
    }
    values.resize(nodes.len(), 0.0);
    if let Some(last) = values.last_mut() {
        *last = 0.0;
    }
    let scale = params.a(0, 0).powf(-1.0 / (2.0 * p - 2.0));
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(ShotProfile { center: lo.0 * scale, values, cutoff, bracket: [lo, hi], bisection_steps: steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_townes_profile() {
        // The Townes soliton (N = 2, cubic) has psi(0) = 2.2062...
        let rhs = Rhs { dim: 2.0, power: 2.0 };
        let grid = RadialGrid::new(2, 2049, 12.0).unwrap();
        let below = shoot(&rhs, 2.2, grid.nodes(), None);
        let above = shoot(&rhs, 2.21, grid.nodes(), None);
        assert!(matches!(below, Shot::Turned(_)));
        assert!(matches!(above, Shot::Crossed(_)));
    }

    #[test]
    fn profile_is_positive_and_decreasing() {
        let params = SystemParams::new(2, 2.5, vec![vec![1.0]]).unwrap();
        let grid = RadialGrid::new(2, 2048, 16.0).unwrap();
        let shot = shooting_oracle(&params, &grid).unwrap();
        assert!(shot.cutoff > 10.0, "cutoff {}", shot.cutoff);
        let live: Vec<f64> = shot.values.iter().copied().take_while(|&v| v > 0.0).collect();
        assert!(live.windows(2).all(|w| w[1] < w[0]));
        assert!(shot.bracket[1].0 - shot.bracket[0].0 <= 1e-12);
        assert!(matches!(shot.bracket[1].1, Shot::Crossed(_)));
    }

    #[test]
    fn coupling_rescales_amplitude() {
        let grid = RadialGrid::new(3, 1024, 12.0).unwrap();
        let one = shooting_oracle(&SystemParams::new(3, 2.0, vec![vec![1.0]]).unwrap(), &grid).unwrap();
        let four = shooting_oracle(&SystemParams::new(3, 2.0, vec![vec![4.0]]).unwrap(), &grid).unwrap();
        assert!((four.center - one.center * 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_vector_systems() {
        let params = SystemParams::new(2, 2.5, vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let grid = RadialGrid::new(2, 64, 8.0).unwrap();
        assert!(shooting_oracle(&params, &grid).is_err());
    }
}
