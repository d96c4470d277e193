//! File formats, configuration and the command-line front end for
//! `sbdyn-core`.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod export;
pub mod mesh_io;
pub mod scenario;
pub mod units;
