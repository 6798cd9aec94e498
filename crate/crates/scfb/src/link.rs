//! Uplink transmission model: power-weighted superposition of feedback and
//! data, propagation through the uplink channel with additive noise, and the
//! dedicated-symbol transmission used by the time-division baseline.
//!
//! The observation is the post-matched-filter block `Y = g·Xᵀ + noise`
//! (N antennas × P chips); the matched-filter front end is treated as already
//! applied.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{gen_noise, NoiseModel, UplinkChannel};
use crate::error::{Error, Result};
use crate::mat::CMat;

/// Power split, noise level and chip count for one uplink transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    rho: f64,
    e_k: f64,
    noise: NoiseModel,
    p: usize,
}

impl LinkConfig {
    /// Builds a configuration; `rho ∈ [0, 1]`, `e_k > 0`, `p ≥ 1`.
    pub fn new(rho: f64, e_k: f64, noise: NoiseModel, p: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) || !rho.is_finite() {
            return Err(Error::invalid_parameter(format!(
                "power proportion must lie in [0, 1], got {rho}"
            )));
        }
        if !e_k.is_finite() || e_k <= 0.0 {
            return Err(Error::invalid_parameter(format!(
                "transmit power must be positive, got {e_k}"
            )));
        }
        if p == 0 {
            return Err(Error::invalid_parameter("chip count must be positive"));
        }
        Ok(LinkConfig { rho, e_k, noise, p })
    }

    /// Builds a configuration from an SNR in dB: `σ² = e_k / 10^(snr/10)`.
    pub fn from_snr_db(rho: f64, e_k: f64, snr_db: f64, p: usize) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::invalid_parameter("SNR must be finite"));
        }
        let variance = e_k / 10f64.powf(snr_db / 10.0);
        LinkConfig::new(rho, e_k, NoiseModel::new(variance)?, p)
    }

    /// Fraction of transmit power assigned to the feedback signal.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Total per-chip transmit power E.
    pub fn e_k(&self) -> f64 {
        self.e_k
    }

    /// Receiver noise model.
    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    /// Chip count P of the superimposed block.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Nominal SNR in dB: `10·log10(e_k / σ²)`.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.e_k / self.noise.variance()).log10()
    }
}

/// One received N×P block.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkObservation {
    y: CMat,
}

impl LinkObservation {
    /// Received samples, antennas × chips.
    pub fn y(&self) -> &CMat {
        &self.y
    }
}

/// Power-weighted composite `X = √(ρE)·s + √((1−ρ)E)·d`.
pub fn superimpose(s: &[Complex64], d: &[Complex64], cfg: &LinkConfig) -> Result<Vec<Complex64>> {
    if s.len() != cfg.p() || d.len() != cfg.p() {
        return Err(Error::invalid_parameter(format!(
            "superposition inputs must both have length {}, got {} and {}",
            cfg.p(),
            s.len(),
            d.len()
        )));
    }
    let ws = (cfg.rho() * cfg.e_k()).sqrt();
    let wd = ((1.0 - cfg.rho()) * cfg.e_k()).sqrt();
    Ok(s.iter().zip(d).map(|(si, di)| ws * si + wd * di).collect())
}

/// Sends a composite through the uplink channel: `Y = g·xᵀ + noise`.
///
/// One noise element is drawn per received sample in row-major order.
pub fn transmit<R: Rng + ?Sized>(
    x: &[Complex64],
    g: &UplinkChannel,
    cfg: &LinkConfig,
    rng: &mut R,
) -> Result<LinkObservation> {
    let clean = CMat::outer(g.gains(), x);
    let noise = gen_noise(g.n(), x.len(), cfg.noise().variance(), rng)?;
    Ok(LinkObservation {
        y: clean.add(&noise)?,
    })
}

/// Sends symbols on dedicated slots at full power: `Y = √E·g·xᵀ + noise`.
///
/// Used by the time-division baseline, which does not split power between
/// feedback and data.
pub fn transmit_tdm_symbols<R: Rng + ?Sized>(
    x: &[Complex64],
    g: &UplinkChannel,
    cfg: &LinkConfig,
    rng: &mut R,
) -> Result<CMat> {
    let w = cfg.e_k().sqrt();
    let scaled: Vec<Complex64> = x.iter().map(|v| w * v).collect();
    let clean = CMat::outer(g.gains(), &scaled);
    let noise = gen_noise(g.n(), x.len(), cfg.noise().variance(), rng)?;
    clean.add(&noise)
}
