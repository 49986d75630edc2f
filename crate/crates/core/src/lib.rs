//! Numerical certification of generalized almost complex and generalized
//! almost Hermitian structures given by classical tensor data on a chart.

#![allow(
    clippy::needless_range_loop,
    clippy::suspicious_arithmetic_impl,
    clippy::neg_cmp_op_on_partial_ord
)]

pub mod bigtangent;
pub mod check;
pub mod error;
pub mod expr;
pub mod gcs;
pub mod geometry;
pub mod ghermitian;
pub mod harness;
pub mod hypersurface;
pub mod jets;
pub mod linalg;

pub use error::{Error, Result};
