use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (poles, guards, preconditions).
    #[error("domain error: {0}")]
    Domain(String),

    /// The working precision cannot deliver the requested accuracy.
    #[error("precision exhausted at {bits} bits: {detail}")]
    Precision { bits: u32, detail: String },

    /// An iterative or adaptive procedure failed to settle.
    #[error("no convergence in {what}: last estimate {last_estimate}, gap {gap:e}")]
    Convergence {
        what: String,
        last_estimate: String,
        gap: f64,
    },

    /// An integrand or evaluation produced a non-finite value.
    #[error("non-finite sample at node {node}: {detail}")]
    Evaluation { node: usize, detail: String },

    /// A logarithmic derivative was requested too close to a zero of the function.
    #[error("evaluation point ({re}, {im}) is within error of a zero: |F| = {modulus:e} <= bound {bound:e}")]
    ProximityToZero {
        re: f64,
        im: f64,
        modulus: f64,
        bound: f64,
    },

    #[error("index {index} is beyond the explicit coefficient list of length {len}")]
    OutOfRange { index: usize, len: usize },

    /// Two computations that must agree did not.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// A counting profile with no zeros at all; the function is an exponential-function candidate.
    #[error("degenerate profile: all counts are zero (exponential-function candidate)")]
    DegenerateProfile,

    #[error("no density witness: {0}")]
    WitnessNotFound(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(what: impl Into<String>, last_estimate: impl ToString, gap: f64) -> Self {
        Error::Convergence {
            what: what.into(),
            last_estimate: last_estimate.to_string(),
            gap,
        }
    }

    /// True for failures that a numeric sweep should record and move past.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::Precision { .. }
                | Error::Convergence { .. }
                | Error::Evaluation { .. }
                | Error::ProximityToZero { .. }
                | Error::Consistency(_)
        )
    }
}
