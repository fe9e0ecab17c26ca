//! Exact and high-precision evaluation of third order mock theta functions,
//! their companion series, and related q-series at roots of unity.

pub mod cli;
pub mod cyclotomic;
pub mod eta;
pub mod numeric;
pub mod qseries;
pub mod verify;
