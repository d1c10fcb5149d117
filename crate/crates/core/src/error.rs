//! Crate-wide error type.

/// Errors shared by the geometry, potential, field and solver layers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The tangent vectors are (numerically) parallel, so no normal exists.
    #[error("degenerate chart at ({q1:.6}, {q2:.6}): |d1 x d2| = {cross_norm:.3e}")]
    DegenerateChart { q1: f64, q2: f64, cross_norm: f64 },

    /// A chart point outside the declared coordinate domain.
    #[error("point ({q1:.6}, {q2:.6}) lies outside the chart domain")]
    OutOfDomain { q1: f64, q2: f64 },

    /// The thin-layer factor f = 1 + 2Mq3 + Kq3^2 is non-positive: the
    /// offset has crossed the focal set and the layer expansion is
    /// meaningless there.
    #[error("offset factor f = {f:.6e} <= 0 at q3 = {q3:.6}; offset exceeds the focal distance")]
    NonPositiveF { f: f64, q3: f64 },

    /// Shape parameters that do not describe a valid surface.
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// The vector potential fails the surface Coulomb-gauge check.
    #[error("vector potential violates the surface Coulomb gauge: max |div A| = {max_div:.3e} > {tol:.1e}")]
    GaugeViolation { max_div: f64, tol: f64 },

    /// Mismatched grid/array dimensions.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The grid solver only handles charts that are periodic in both
    /// coordinates.
    #[error("chart is not periodic in both coordinates; the grid solver requires doubly periodic charts")]
    ChartNotPeriodic,

    /// The iterative eigensolver ran out of iterations (diagnostics in the
    /// message).
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),

    /// A request that violates an operation precondition.
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
