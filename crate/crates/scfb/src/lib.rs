//! Deterministic link-level simulator and algorithm library for
//! superimposed-coding (SC) downlink-CSI feedback based on 1-bit compressed
//! sensing.
//!
//! A user compresses its sparse downlink channel vector to sign measurements
//! (1-bit compressed sensing), packs them into a feedback frame, spreads the
//! frame with orthogonal Walsh codes, and superimposes the result at low power
//! on its own uplink data. The base station de-spreads the feedback, detects
//! and removes it from the data signal, and reconstructs the channel with
//! binary iterative hard thresholding (BIHT) — optionally aided by a fed-back
//! support set (SCA-BIHT). A time-division baseline that sends the
//! measurements on dedicated symbols is provided for comparison.
//!
//! Module map:
//!
//! * [`channel`] — sparse channel / uplink gain / noise generation
//! * [`onebit`] — Gaussian measurement matrices and 1-bit compression
//! * [`framing`] — feedback frame layout, QPSK mapping and hard decision
//! * [`spreading`] — Walsh spreading and de-spreading
//! * [`link`] — power-weighted superposition and the uplink channel model
//! * [`detection`] — MMSE frame detection, interference cancellation, data detection
//! * [`reconstruction`] — best-k thresholding, BIHT and SCA-BIHT solvers
//! * [`schemes`] — end-to-end single-trial pipelines for the compared systems
//! * [`sim`] — Monte-Carlo sweep engine, metrics and CSV output
//!
//! Every random quantity is drawn from an explicitly seeded generator, and
//! every Monte-Carlo trial is a pure function of its configuration and seed
//! block, so sweeps are reproducible bit-for-bit, including under parallel
//! execution.

pub mod channel;
pub mod cli;
pub mod detection;
pub mod error;
pub mod framing;
pub mod link;
pub mod mat;
pub mod onebit;
pub mod reconstruction;
pub mod schemes;
pub mod sim;
pub mod spreading;

pub use error::{Error, Result};
