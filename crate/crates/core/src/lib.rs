//! Quantum invariants of Dehn surgeries on the figure-eight knot, the
//! quantum dilogarithm contour representation, the SU(2) flat connection data
//! and the stationary phase machinery that links them.

// `!(x > a)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chernsimons;
pub mod error;
pub mod invariants;
pub mod qdilog;
pub mod quad;
pub mod repvar;
pub mod saddle;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Reduce to `[0, 1)`, snapping values within `1e-9` of an integer to zero.
pub fn mod_one(x: f64) -> f64 {
    let y = x - x.floor();
    if y < 1e-9 || 1.0 - y < 1e-9 {
        0.0
    } else {
        y
    }
}

/// Sign with `sign(0) = 0`.
pub fn sign(x: i64) -> i64 {
    x.signum()
}
