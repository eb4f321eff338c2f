//! Numerical laboratory for the focusing m-component coupled nonlinear
//! Schrödinger system
//!
//! ```text
//! i d/dt u_j + Δu_j + Σ_k a_jk |u_k|^p |u_j|^{p-2} u_j = 0,   j = 1..m,
//! ```
//!
//! covering its variational structure (action, constraint family, ground
//! states) and its dynamics (split-step evolution, potential-well
//! dichotomy, standing-wave instability).

pub mod checks;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod evolution;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod ground_state;
pub mod interp;
pub mod io;
pub mod params;
pub mod potential_well;
pub mod scaling;
pub mod shooting;

pub use error::{Error, Result};
pub use field::{FieldVector, Grid};
pub use functionals::{AlphaBeta, FunctionalReport, Functionals, Moments};
pub use grid::{CartesianGrid, RadialGrid};
pub use params::SystemParams;
