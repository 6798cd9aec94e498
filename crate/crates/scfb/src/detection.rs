//! Base-station signal processing: MMSE detection of the de-spread feedback
//! frame, cancellation of the detected feedback from the raw observation, and
//! per-symbol MMSE detection of the uplink data.
//!
//! The frame detector applies the scalar MMSE coefficient
//! `P·√(ρE) / ((1 + (P−1)ρ)·E·‖g‖² + σ²)` to the matched-filter combination
//! `gᴴ·x̃` and hard-decides the result. The data detector is the per-symbol
//! analogue with the feedback power removed, assuming cancellation already
//! stripped the feedback contribution. The cancellation step is executed
//! exactly once; iterating it brings no measurable gain in this model.

use num_complex::Complex64;

use crate::channel::UplinkChannel;
use crate::error::{Error, Result};
use crate::framing::{hard_decide, qpsk_demodulate, ModulatedFrame};
use crate::link::{LinkConfig, LinkObservation};
use crate::mat::CMat;
use crate::spreading::{spread, SpreadingMatrix};

/// Hard-decided estimate of the modulated feedback frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedFrame {
    symbols: ModulatedFrame,
}

impl DetectedFrame {
    /// Constellation symbol estimates.
    pub fn symbols(&self) -> &ModulatedFrame {
        &self.symbols
    }
}

/// Hard-decided uplink data estimate and its demodulated bits.
#[derive(Debug, Clone, PartialEq)]
pub struct UlusEstimate {
    symbols: ModulatedFrame,
    bits: Vec<u8>,
}

impl UlusEstimate {
    /// Constellation symbol estimates (length P).
    pub fn symbols(&self) -> &ModulatedFrame {
        &self.symbols
    }

    /// Demodulated data bits (length 2P).
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

/// Pre-decision MMSE estimate of the frame symbols from the de-spread block.
///
/// Exposed separately so exactness properties of the linear stage can be
/// checked without the hard decision.
pub fn mmse_frame_soft(
    x_tilde: &CMat,
    g: &UplinkChannel,
    cfg: &LinkConfig,
) -> Result<Vec<Complex64>> {
    if cfg.rho() == 0.0 {
        return Err(Error::InvalidConfiguration(
            "frame detection requires feedback power (rho > 0)".into(),
        ));
    }
    if x_tilde.rows() != g.n() {
        return Err(Error::invalid_parameter(format!(
            "de-spread block has {} rows but the channel has {} antennas",
            x_tilde.rows(),
            g.n()
        )));
    }
    let p = cfg.p() as f64;
    let num = p * (cfg.rho() * cfg.e_k()).sqrt();
    let den = (1.0 + (p - 1.0) * cfg.rho()) * cfg.e_k() * g.norm_sq() + cfg.noise().variance();
    let coef = num / den;
    let combined = x_tilde.conj_dot_rows(g.gains())?;
    Ok(combined.into_iter().map(|v| coef * v).collect())
}

/// MMSE detection of the feedback frame: soft estimate then hard decision.
pub fn mmse_frame_detect(
    x_tilde: &CMat,
    g: &UplinkChannel,
    cfg: &LinkConfig,
) -> Result<DetectedFrame> {
    let soft = mmse_frame_soft(x_tilde, g, cfg)?;
    Ok(DetectedFrame {
        symbols: hard_decide(&soft),
    })
}

/// Removes the detected feedback from the observation:
/// `d_raw = y − √(ρE)·g·(x̂·qᵀ)`.
pub fn cancel_interference(
    y: &LinkObservation,
    detected: &DetectedFrame,
    q: &SpreadingMatrix,
    g: &UplinkChannel,
    cfg: &LinkConfig,
) -> Result<CMat> {
    cancel_interference_scaled(y, detected, q, g, cfg, 1.0)
}

/// [`cancel_interference`] with an extra amplitude applied to the re-spread
/// frame, for pipelines that transmitted the spread signal scaled (e.g. the
/// per-chip power normalization variant).
pub fn cancel_interference_scaled(
    y: &LinkObservation,
    detected: &DetectedFrame,
    q: &SpreadingMatrix,
    g: &UplinkChannel,
    cfg: &LinkConfig,
    spread_scale: f64,
) -> Result<CMat> {
    if y.y().rows() != g.n() {
        return Err(Error::invalid_parameter(format!(
            "observation has {} rows but the channel has {} antennas",
            y.y().rows(),
            g.n()
        )));
    }
    if y.y().cols() != q.p() {
        return Err(Error::invalid_parameter(format!(
            "observation has {} columns but the code length is {}",
            y.y().cols(),
            q.p()
        )));
    }
    // Scale the chips first so the subtracted product is formed exactly like
    // the transmitted one; with a correct frame the residual then cancels to
    // the bit.
    let w = (cfg.rho() * cfg.e_k()).sqrt() * spread_scale;
    let mut s = spread(detected.symbols(), q)?;
    for v in &mut s {
        *v *= w;
    }
    y.y().sub(&CMat::outer(g.gains(), &s))
}

/// Per-symbol MMSE detection of the uplink data from the cancelled block.
///
/// Applies `√((1−ρ)E) / ((1−ρ)E·‖g‖² + σ²)·gᴴ` to each column, hard-decides
/// and demodulates. The residual feedback term is omitted from the
/// coefficient: it is zero whenever the frame was detected correctly.
pub fn mmse_ulus_detect(d_raw: &CMat, g: &UplinkChannel, cfg: &LinkConfig) -> Result<UlusEstimate> {
    if cfg.rho() == 1.0 {
        return Err(Error::InvalidConfiguration(
            "data detection requires data power (rho < 1)".into(),
        ));
    }
    if d_raw.rows() != g.n() {
        return Err(Error::invalid_parameter(format!(
            "cancelled block has {} rows but the channel has {} antennas",
            d_raw.rows(),
            g.n()
        )));
    }
    let d_power = (1.0 - cfg.rho()) * cfg.e_k();
    let coef = d_power.sqrt() / (d_power * g.norm_sq() + cfg.noise().variance());
    let combined = d_raw.conj_dot_rows(g.gains())?;
    let soft: Vec<Complex64> = combined.into_iter().map(|v| coef * v).collect();
    let symbols = hard_decide(&soft);
    let bits = qpsk_demodulate(&symbols)?;
    Ok(UlusEstimate { symbols, bits })
}
