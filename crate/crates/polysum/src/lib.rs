//! Sums of triangular numbers and squares: truants, the escalator tree,
//! completed quadratic forms, local densities, and the analytic constants
//! that reduce universality to a finite check.

pub mod analytic;
pub mod bits;
pub mod checkpoint;
pub mod config;
pub mod error;
pub mod escalator;
pub mod forms;
pub mod local;
pub mod parse;
pub mod report;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
pub use forms::{complete_squares, CongruenceForm};
pub use parse::parse_sum;
pub use sums::{PolygonalSum, Term, Truant};
