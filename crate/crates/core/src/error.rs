use core::fmt;

/// Errors raised by the solvers and post-processing routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Caputo order outside `(0, 1]`.
    InvalidOrder(f64),
    /// Grid with `tf <= t0`, no steps, or non-finite bounds.
    InvalidGrid { t0: f64, tf: f64, n_steps: usize },
    /// Order schedule breakpoints that are unordered, not on grid nodes,
    /// or do not end at the grid horizon.
    InvalidSchedule(&'static str),
    /// Vector length does not match the system dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// The integration produced a NaN or infinite value.
    NonFinite { node: usize },
    /// A lookup time does not fall on a grid node.
    OffGrid { t: f64 },
    /// Two series defined on different grids were combined.
    GridMismatch,
    /// `K + B` vanished in a saturating incidence term.
    SingularIncidence,
    /// `Phi_1 >= 1`: the migration configuration leaves no positive denominator.
    InvalidMigration { phi1: f64 },
    /// Parameter record violates a model invariant.
    InvalidParameter(&'static str),
    /// Reproduction number vanished where a relative index was requested.
    ZeroQuantity,
    /// Finite-difference derivative disagreed with its coarser-step check.
    UnstableDerivative { fine: f64, coarse: f64 },
    /// Control level outside `[0, 1)`.
    InvalidLevel(f64),
    /// Cost-effectiveness input out of its domain.
    InvalidCostInput(&'static str),
    /// Non-positive or non-finite sweep, weight, or bound setting.
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidOrder(a) => write!(f, "derivative order {a} is outside (0, 1]"),
            Error::InvalidGrid { t0, tf, n_steps } => {
                write!(f, "invalid grid t0={t0}, tf={tf}, n_steps={n_steps}")
            }
            Error::InvalidSchedule(why) => write!(f, "invalid order schedule: {why}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite { node } => write!(f, "non-finite state produced at node {node}"),
            Error::OffGrid { t } => write!(f, "time {t} is not a grid node"),
            Error::GridMismatch => f.write_str("series are defined on different grids"),
            Error::SingularIncidence => f.write_str("K + B vanished in the incidence term"),
            Error::InvalidMigration { phi1 } => {
                write!(f, "Phi_1 = {phi1} >= 1, reproduction numbers undefined")
            }
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Error::ZeroQuantity => f.write_str("quantity is zero at the base point"),
            Error::UnstableDerivative { fine, coarse } => write!(
                f,
                "finite-difference index unstable: step 1e-6 gives {fine}, step 1e-5 gives {coarse}"
            ),
            Error::InvalidLevel(l) => write!(f, "control level {l} is outside [0, 1)"),
            Error::InvalidCostInput(why) => write!(f, "invalid cost-effectiveness input: {why}"),
            Error::InvalidConfig(why) => write!(f, "invalid configuration: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
