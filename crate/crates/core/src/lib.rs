//! Numerical laboratory for singular quasilinear elliptic systems driven by
//! p-Laplace operators on the unit interval and the radial disk.
//!
//! The crate provides:
//!
//! - boundary-graded 1D meshes, grid functions and a discrete r-Laplacian
//!   ([`mesh`]),
//! - slowly varying log-power perturbation factors ([`karamata`]),
//! - closed-form regime classification with predicted boundary exponents
//!   for three families of coupled singular systems ([`regimes`]),
//! - a damped-Newton solver with positivity continuation for scalar
//!   problems `-Δ_r w + c(x)·w = g(x) + K(x)·w^δ` ([`scalar_solver`]),
//! - conical-shell construction, the two-component fixed-point operator,
//!   the expanding-domain monotone scheme and a uniqueness probe
//!   ([`system`]),
//! - boundary-exponent fitting, a discrete weak-comparison check and the
//!   Lindqvist convexity-gap oracle ([`analysis`]).
//!
//! All numerics are generic over the scalar type through [`Real`]; the
//! `*64` aliases below fix `f64`, which is what the CLI and the test
//! suites use.

pub mod analysis;
pub mod error;
pub mod karamata;
pub mod mesh;
pub mod regimes;
pub mod scalar;
pub mod scalar_solver;
pub mod system;

pub use error::SolverError;
pub use scalar::Real;

/// `f64` mesh.
pub type Mesh64 = mesh::GradedMesh1D<f64>;
/// `f64` grid function.
pub type Grid64 = mesh::GridFunction<f64>;
/// `f64` log-power slowly varying factor.
pub type LogPowerFactor64 = karamata::LogPowerFactor<f64>;
/// `f64` power-coupled system parameter bundle.
pub type SystemSpec64 = regimes::SystemSpec<f64>;
/// `f64` competition/logistic system parameter bundle.
pub type CompetitionSpec64 = regimes::CompetitionSpec<f64>;
/// `f64` absorption system parameter bundle.
pub type AbsorptionSpec64 = regimes::AbsorptionSpec<f64>;
/// `f64` regime classification report.
pub type RegimeReport64 = regimes::RegimeReport<f64>;
/// `f64` conical shell.
pub type ConicalShell64 = system::ConicalShell<f64>;
/// `f64` system solution.
pub type SystemSolution64 = system::SystemSolution<f64>;
