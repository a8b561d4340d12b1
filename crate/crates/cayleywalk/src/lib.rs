//! File formats and the `cayleywalk` command-line tool built on
//! `cayleywalk-core`.

pub mod cli;
pub mod json;
pub mod table;

pub use cli::{run, run_with};
