//! Batch driver for the `qcfold` binary: config parsing, the command runners and the escape-time renderer.

pub mod commands;
pub mod config;
pub mod render;

/// All checks passed.
pub const EXIT_OK: i32 = 0;
/// Usage or configuration error.
pub const EXIT_USAGE: i32 = 1;
/// A check failed or the computation could not complete.
pub const EXIT_CHECK: i32 = 2;
