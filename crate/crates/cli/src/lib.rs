//! Library side of the `specreg` binary: configuration schema, command
//! implementations, output formatting, and the acceptance checks.

// Input checks are written `!(x > 0.0)` so that NaN takes the rejection
// branch; the suggested `x <= 0.0` would wave it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod criteria;
pub mod output;
