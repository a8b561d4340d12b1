use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::group::Violation;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Shapes or indices do not fit together (dimension mismatch, missing
    /// matrix, malformed table).
    Structural(String),
    /// The operation is not defined for this input class.
    Unsupported(String),
    /// A documented precondition on parameters does not hold.
    Precondition(String),
    /// Extension data fails one or more of its defining relations.
    InvalidExtension(Vec<Violation>),
    /// Geometric degeneracy (non-spanning lattice, band crossing).
    Degenerate(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Structural(m) => write!(f, "structural error: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::Precondition(m) => write!(f, "precondition failed: {m}"),
            Error::InvalidExtension(v) => {
                write!(f, "invalid extension data ({} violations)", v.len())?;
                for x in v.iter().take(8) {
                    write!(f, "; {x}")?;
                }
                Ok(())
            }
            Error::Degenerate(m) => write!(f, "degenerate input: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! structural {
    ($($t:tt)*) => { $crate::error::Error::Structural(alloc::format!($($t)*)) };
}
macro_rules! precondition {
    ($($t:tt)*) => { $crate::error::Error::Precondition(alloc::format!($($t)*)) };
}
pub(crate) use precondition;
pub(crate) use structural;
