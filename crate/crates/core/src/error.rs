use alloc::string::String;
use core::fmt;

use crate::enumeration::Family;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scenario, policy, partition or parameter violates an invariant.
    Validation(String),
    /// An index (cache, file, subset, placement) is out of range.
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    /// The operation needs a policy of a different placement family.
    WrongFamily {
        expected: &'static str,
        found: Family,
    },
    /// Enumerating the family would exceed the configured cap.
    CapExceeded {
        family: Family,
        count: u128,
        cap: usize,
    },
    /// Post-solve verification disagreed with the solver beyond tolerance.
    Verification(String),
    /// A privacy target that no policy of the method can reach.
    UnreachableTarget { zeta: f64, min: f64, max: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range (len {len})")
            }
            Error::WrongFamily { expected, found } => {
                write!(f, "expected a {expected} policy, found the {found} family")
            }
            Error::CapExceeded { family, count, cap } => write!(
                f,
                "the {family} family has {count} placements, above the enumeration cap of {cap}; \
                 use the subset-based (spc) method or raise --cap"
            ),
            Error::Verification(msg) => write!(f, "internal verification failed: {msg}"),
            Error::UnreachableTarget { zeta, min, max } => write!(
                f,
                "privacy target {zeta} is outside the achievable range [{min}, {max}]"
            ),
        }
    }
}

impl core::error::Error for Error {}
