//! Scalar transcendental functions.
//!
//! Routed through `libm` in every build so `std` and `no_std` targets
//! produce bit-identical trajectories.

pub(crate) use libm::{atan2, cos, log, sin, sqrt};

#[inline]
pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}
