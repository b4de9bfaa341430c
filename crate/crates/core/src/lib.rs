//! Gaze-analytics core: event detection, attention metrics, risk
//! assessment, and deterministic report rendering for eye-tracking
//! sessions recorded during sorting-game play.
//!
//! The crate is `no_std` + `alloc`; all file and terminal IO lives in the
//! companion `gazemetry` crate. Math routes through `libm`, so results are
//! bit-identical with and without the standard library.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assess;
pub mod detect;
pub mod ingest;
pub(crate) mod math;
pub mod metrics;
pub mod report;
pub mod synth;

pub use ingest::{AoiMap, AoiRect, CleanSession, GazeSample, Point, ScreenConfig};

/// Quantizes a value to `decimals` fractional digits, rounding half-up.
/// Exposed for callers that need the exact rounding the reports use.
pub fn quantize(x: f64, decimals: u32) -> f64 {
    math::quantize(x, decimals)
}
