use core::fmt;

/// Failures reported by the simulation and analysis kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument fell outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// The prescribed prefix does not describe two walks of equal length `n0 >= 1`.
    InvalidHistory,
    /// A direction vector is not a unit L1 tangent to the product of simplices.
    InvalidTangent,
    /// `after` is not the one-step successor of `before`.
    NotSuccessor,
    /// The operation only exists above the bifurcation point `beta = 2`.
    Subcritical { beta: f64 },
    /// The operation needs an attracting center, i.e. `beta < 2`.
    Supercritical { beta: f64 },
    /// Step-halving disagreed by more than the certification tolerance.
    StepHalving { discrepancy: f64, tolerance: f64 },
    /// The flow moved away from the center instead of contracting onto it.
    LeftNeighborhood { distance: f64 },
    /// Distances to the center hit the floating point floor inside the fit window.
    PrecisionFloor { time: f64 },
    /// Not enough samples for the requested statistic.
    TooFewSamples { got: usize, need: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::InvalidHistory => {
                f.write_str("initial history must give both walks the same length n0 >= 1")
            }
            Error::InvalidTangent => {
                f.write_str("direction must be a tangent vector with unit L1 norm")
            }
            Error::NotSuccessor => f.write_str("state is not the one-step successor"),
            Error::Subcritical { beta } => {
                write!(f, "beta = {beta} must exceed 2 for asymmetric equilibria")
            }
            Error::Supercritical { beta } => {
                write!(f, "beta = {beta} must be below 2 for an attracting center")
            }
            Error::StepHalving {
                discrepancy,
                tolerance,
            } => write!(
                f,
                "step-halving certificate failed: discrepancy {discrepancy:e} > {tolerance:e}"
            ),
            Error::LeftNeighborhood { distance } => {
                write!(f, "trajectory left the neighborhood of the center (distance {distance})")
            }
            Error::PrecisionFloor { time } => {
                write!(f, "distance to the center reached the precision floor at t = {time}")
            }
            Error::TooFewSamples { got, need } => {
                write!(f, "need at least {need} samples, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
