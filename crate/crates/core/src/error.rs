//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by the numerical operations.
#[derive(Debug, Error)]
pub enum Error {
    /// The Hardy coupling is below the critical constant -N^2/4.
    #[error("mu = {mu} is below the critical constant mu1 = {mu1} (N = {dim})")]
    MuBelowCritical { mu: f64, mu1: f64, dim: usize },

    /// Angular mode index must be >= 1.
    #[error("mode index {k} is invalid; the half-sphere spectrum starts at k = 1")]
    BadIndex { k: i64 },

    /// The logarithmic branch of the singular solution is only defined for r < 1.
    #[error("critical-branch evaluation requires r < 1, got r = {r}")]
    CriticalRange { r: f64 },

    /// Successive quadrature refinements disagree above the requested tolerance.
    #[error("quadrature did not converge: last refinement changed by {change:.3e} (tol {tol:.3e})")]
    QuadratureUnconverged { change: f64, tol: f64 },

    /// Only N = 2 and N = 3 domains are meshed.
    #[error("unsupported dimension N = {dim}; meshed domains exist for N = 2, 3")]
    UnsupportedDim { dim: usize },

    /// Requested spacing cannot separate the origin scale from the domain scale.
    #[error("mesh too coarse: {detail}")]
    MeshTooCoarse { detail: String },

    /// No mesh layer tracks the requested distance-to-boundary level.
    #[error("no mesh layer resolves the level set rho = {delta}")]
    LayerUnresolved { delta: f64 },

    /// An interior node coincides with the potential singularity.
    #[error("interior node {node} sits at the origin; the potential 1/|x|^2 is undefined there")]
    SingularNode { node: usize },

    /// The discrete operator failed its positive-definiteness probe.
    #[error("system is not positive definite: {detail}")]
    NotSpd { detail: String },

    /// Iterative solver hit its iteration cap.
    #[error("linear solver did not reach tolerance {tol:.3e} in {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, tol: f64, residual: f64 },

    /// Inverse iteration converged to a sign-changing vector.
    #[error("principal mode changed sign (min {min:.3e}, max {max:.3e}); mesh cannot represent it")]
    NegativeMode { min: f64, max: f64 },

    /// Log-log fit window contains too few resolved layers.
    #[error("fit window [{lo:.3e}, {hi:.3e}] holds {found} sample layers; need >= {need}")]
    WindowTooNarrow { lo: f64, hi: f64, found: usize, need: usize },

    /// A one-sided normal offset left the mesh.
    #[error("normal offset {offset:.3e} at boundary node {node} leaves the mesh")]
    OffsetOutsideMesh { node: usize, offset: f64 },

    /// Boundary data varies below the mesh scale.
    #[error("boundary datum unresolved: {detail}")]
    DataUnresolved { detail: String },

    /// A family that must be monotone in its parameter is not.
    #[error("sequence lost monotonicity at step {step}: worst violation {violation:.3e}")]
    NonMonotoneSequence { step: usize, violation: f64 },

    /// Probe values failed to decay.
    #[error("no decay: probe values {values:?} are not strictly decreasing")]
    NoDecay { values: Vec<f64> },

    /// The exhaustion limit mass bound failed.
    #[error("mass lower bound failed: got {got:.6e}, need >= {need:.6e}")]
    MassBoundFailed { got: f64, need: f64 },

    /// Kato-type inequality is outside its hypothesis (N = 2 at the critical coupling).
    #[error("hypothesis violated: the inequality requires N >= 3, or N = 2 with mu above critical")]
    HypothesisViolated,

    /// Boundary-mass sequence grows without bound.
    #[error("trace diverges: mass sequence {values:?} keeps growing; input is not admissible")]
    TraceDivergent { values: Vec<f64> },

    /// Configuration failed validation.
    #[error("invalid config: {field}: {message}")]
    ConfigInvalid { field: String, message: String },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
