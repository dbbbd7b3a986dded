//! Error type shared by the solver and construction routines.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    /// A precondition on arguments or parameter ranges was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Residual stagnated before reaching the requested tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// An interior value dropped to zero or below after damping was exhausted.
    #[error("loss of positivity at node {node}")]
    LossOfPositivity { node: usize },

    /// A pivot of the tridiagonal Jacobian fell below the safe threshold.
    #[error("singular Jacobian (pivot {pivot})")]
    SingularJacobian { pivot: f64 },

    /// No scaling parameter m produced nonnegative sub/supersolution margins.
    #[error("shell construction failed, worst margin {worst_margin} at m = {m}")]
    ShellConstructionFailure { m: f64, worst_margin: f64 },

    /// A fixed-point output left the conical shell beyond tolerance.
    #[error("iterate escaped the shell by {violation}")]
    ShellEscape { violation: f64 },

    /// A monotone-scheme iterate decreased beyond tolerance.
    #[error("monotone scheme decreased by {decrease} at node {node}")]
    MonotonicityViolation { node: usize, decrease: f64 },

    /// Fewer than the required number of nodes in a fitting window.
    #[error("insufficient window: {points} points, need {required}")]
    InsufficientWindow { points: usize, required: usize },
}
