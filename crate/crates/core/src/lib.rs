//! Frame bounds, canonical duals and finite-section analysis for
//! nonstationary systems of translates, Gabor systems and wavelet systems.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod family;
pub mod linalg;
pub mod operator;
pub mod oracle;
pub mod report;
pub mod spectrum;
pub mod systems;

pub use error::{FrameError, Result};
