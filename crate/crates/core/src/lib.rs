//! Reduced-rank adaptive filtering with joint interpolation, decimation and
//! filtering (JIDF), convex combinations of JIDF filters for joint model-order
//! and step-size adaptation, and a DS-CDMA downlink simulator to exercise them.
//!
//! Module map:
//!
//! - [`signalcore`]: Hankel regressors, decimation patterns, interpolation.
//! - [`filters`]: full-rank LMS and the JIDF reduced-rank filter.
//! - [`combiners`]: sigmoid convex combiners, Schemes A and B, and the
//!   convex combination of two full-rank LMS filters.
//! - [`cdma`]: signatures, multipath fading channel, received vectors, MMSE
//!   receiver and QPSK slicer.
//! - [`harness`]: Monte-Carlo experiments, complexity counts and CSV output.

pub mod cdma;
pub mod combiners;
mod error;
pub mod filters;
pub mod harness;
pub mod signalcore;

pub use error::{Error, Result};

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
