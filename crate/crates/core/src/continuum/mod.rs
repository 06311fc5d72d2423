//! Smooth fields on the torus and `l → 0` convergence studies.

pub mod fields;
pub mod fit;
pub mod sweep;

pub use fields::{curvature, quadrature, ym_integral, FourierMode, Quadrature, SmoothFieldSpec};
pub use fit::{fit_order, FitResult};
pub use sweep::{higgs_limit_sweep, smooth_gauge, wilson_limit_sweep, ConvergencePoint, ConvergenceReport, ErrorMode, HiggsSweepReport};
