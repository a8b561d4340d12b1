//! Quantum walks on Cayley graphs of virtually Abelian groups.
//!
//! The crate is `no_std` (with `alloc`). It covers exact arithmetic in
//! Q-by-Z^d extensions, walk unitarity and isotropy checks, the regrouping
//! of a scalar walk into a coined walk on Z^d, momentum-space analysis and
//! evolution on periodic patches.

#![no_std]

extern crate alloc;

pub mod error;
pub mod group;
pub mod cayley;
pub mod lattice;
pub mod linalg;
pub mod walk;
pub mod coarse;
pub mod gauge;
pub mod catalog;
pub mod momentum;
pub mod sim;

pub use error::{Error, Result};
pub use group::{Element, Extension, Quotient};
pub use lattice::{IntMat, LatticeVector};
