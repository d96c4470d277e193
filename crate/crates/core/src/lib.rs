//! Rigid-spacecraft motion about small bodies.
//!
//! This crate holds the numerical core: a constant-density polyhedron
//! gravity engine, coupled orbit/attitude dynamics of a dumbbell spacecraft
//! on SE(3), a geometric tracking controller, a two-phase landing guidance
//! law and the deterministic closed-loop simulation that ties them together.
//!
//! The crate is `no_std` when built without the default `std` feature; it
//! only needs `alloc`. File formats, configuration and the command line live
//! in the companion `sbdyn` crate.
//!
//! All quantities are SI: meters, kilograms, seconds and radians.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod controller;
pub mod gravity;
pub mod guidance;
mod math;
pub mod rigid_body;
pub mod shape_model;
pub mod simulation;

/// Universal gravitational constant, CODATA 2018 (m³ kg⁻¹ s⁻²).
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;

pub use nalgebra::{Matrix3, Vector3};
