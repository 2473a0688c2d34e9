//! Envelope bounds, shooting and the t → 0 limit for u'' = b²(u⁴ - t⁴), u(0) = 1, u(1) = t.

pub mod builders;
pub mod error;
pub mod limit_zero;
pub mod model;
pub mod numerics;
pub mod shooting;
pub mod tables;
pub mod transcendental;
pub mod verification;

pub use error::{Error, Result};
