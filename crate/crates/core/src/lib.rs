// NaN must fail range checks, so `!(x > 0.0)` is used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod classical;
pub mod cli;
pub mod domain;
pub mod error;
pub mod packet;
pub mod quadrature;
pub mod refraction;
pub mod specfun;
pub mod traversal;

pub use error::{Error, Result};
