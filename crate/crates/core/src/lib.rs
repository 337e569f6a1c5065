//! Numerical laboratory for vacuum static spaces.
//!
//! * [`chart`]: coordinate-chart curvature engine with exact third-order jets.
//! * [`identities`]: pointwise curvature identity checks on a chart.
//! * [`warped`]: closed-form radial geometry of `ds² + h(s)² g_{N(k)}`.
//! * [`catalog`]: named model spaces with their static potentials.
//! * [`verifier`]: static-potential, D-tensor and Ambrozio predicates.
//! * [`ode`]: the warping-function ODE, its periodic orbits and
//!   Schwarzschild–de Sitter scans.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod chart;
pub mod identities;
pub mod jet;
pub mod ode;
pub mod sampling;
pub mod series;
pub mod tensor;
pub mod verifier;
pub mod warped;

pub use chart::{Chart, ChartError, CurvatureBundle, ScalarField};
pub use jet::{Jet, ScalarJet, MAX_DIM};
pub use series::Series;
