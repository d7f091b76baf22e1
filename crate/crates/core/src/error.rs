use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain(&'static str),
    /// An invariant that the mathematics guarantees did not hold numerically.
    InternalConsistency(&'static str),
    /// A series could not be truncated to the requested tolerance.
    Divergence(&'static str),
    /// The truncated p-th moment did not stabilize.
    MomentDivergence,
    /// The target function does not agree with the affine reference on the window.
    NotLocallyAffine { at: f64 },
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InternalConsistency(msg) => write!(f, "internal consistency failure: {msg}"),
            Error::Divergence(msg) => write!(f, "series divergence: {msg}"),
            Error::MomentDivergence => f.write_str("p-th moment of |f - l| did not stabilize"),
            Error::NotLocallyAffine { at } => {
                write!(f, "target differs from the affine reference at t = {at}")
            }
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

#[cfg(any(feature = "std", test))]
impl std::error::Error for Error {}
