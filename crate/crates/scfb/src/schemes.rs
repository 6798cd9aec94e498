//! End-to-end single-trial pipelines for the three compared feedback systems.
//!
//! Two superimposed-coding variants share one pipeline: the channel direction
//! is one-bit compressed, framed, QPSK-modulated, spread over a Walsh code
//! and added at a ρ-fraction of the transmit power on top of the uplink data.
//! The base station de-spreads, MMSE-detects and re-encodes the frame,
//! subtracts it from the observation, detects the data from the residual and
//! reconstructs the channel direction from the parsed signs. The two variants
//! differ only in whether the frame carries the support indicator (and hence
//! in which reconstruction solver runs).
//!
//! The baseline sends the same information over dedicated resources instead:
//! the data block and the measurement signs are transmitted one after the
//! other, each at full power, which costs extra channel uses but avoids the
//! superposition interference entirely.
//!
//! Every trial is a pure function of its configuration: all randomness comes
//! from the four named seed streams (channel, matrix, noise, data), so any
//! trial can be reproduced in isolation and trials can run concurrently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{gen_sparse_channel, gen_uplink_channel, support_vector};
use crate::detection::{cancel_interference_scaled, mmse_frame_detect, mmse_ulus_detect};
use crate::error::{Error, Result};
use crate::framing::{
    assemble_frame, bits_to_signs, parse_frame, qpsk_demodulate, qpsk_modulate, signs_to_bits,
    FrameLayout,
};
use crate::link::{superimpose, transmit, transmit_tdm_symbols, LinkConfig};
use crate::onebit::{compress, gen_measurement_matrix, SignMeasurements};
use crate::reconstruction::{biht, sca_biht, ReconstructionConfig};
use crate::sim::nmse;
use crate::spreading::{despread, gen_walsh, spread};

/// Total transmit power per channel use. The SNR definition
/// `10·log10(E_k/σ²)` fixes the noise variance against this constant.
const E_K: f64 = 1.0;

/// The three compared feedback systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Superimposed feedback with support indicator and support-aided
    /// reconstruction.
    PropSca,
    /// Superimposed feedback without support indicator; plain reconstruction.
    PropBiht,
    /// Time-division baseline: data and measurement signs on separate,
    /// full-power segments.
    Tdm,
}

impl Scheme {
    /// Stable lowercase label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::PropSca => "prop_sca",
            Scheme::PropBiht => "prop_biht",
            Scheme::Tdm => "tdm",
        }
    }
}

/// Seeds for the four independent randomness streams of one trial.
///
/// Splitting the streams keeps draws aligned across schemes: two schemes run
/// with the same seeds see the same channel realization, the same data bits
/// and the same noise, so their outcomes differ only through what each
/// scheme transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    channel: u64,
    matrix: u64,
    noise: u64,
    data: u64,
}

impl TrialSeeds {
    /// Bundles the four stream seeds.
    pub fn new(channel: u64, matrix: u64, noise: u64, data: u64) -> Self {
        Self {
            channel,
            matrix,
            noise,
            data,
        }
    }

    /// Seed of the channel stream (downlink coefficients, then uplink gains).
    pub fn channel(&self) -> u64 {
        self.channel
    }

    /// Seed of the measurement-matrix stream.
    pub fn matrix(&self) -> u64 {
        self.matrix
    }

    /// Seed of the additive-noise stream.
    pub fn noise(&self) -> u64 {
        self.noise
    }

    /// Seed of the uplink data-bit stream.
    pub fn data(&self) -> u64 {
        self.data
    }
}

/// Full description of one trial: scheme, dimensions, operating point and
/// seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    scheme: Scheme,
    n: usize,
    p: usize,
    xi: usize,
    c: f64,
    rho: f64,
    snr_db: f64,
    itermax: usize,
    seeds: TrialSeeds,
    normalize_spread: bool,
    normalize_uplink: bool,
}

impl SchemeConfig {
    /// Creates a configuration with the standard dimensions (N=64, P=1024,
    /// ξ=8, 100 iterations). `c` sets the measurement count M = round(c·N).
    pub fn new(scheme: Scheme, snr_db: f64, rho: f64, c: f64, seeds: TrialSeeds) -> Result<Self> {
        Self {
            scheme,
            n: 64,
            p: 1024,
            xi: 8,
            c,
            rho,
            snr_db,
            itermax: 100,
            seeds,
            normalize_spread: false,
            normalize_uplink: true,
        }
        .validated()
    }

    /// Copy with different dimensions.
    pub fn with_dimensions(mut self, n: usize, p: usize, xi: usize) -> Result<Self> {
        self.n = n;
        self.p = p;
        self.xi = xi;
        self.validated()
    }

    /// Copy with a different iteration budget.
    pub fn with_itermax(mut self, itermax: usize) -> Result<Self> {
        self.itermax = itermax;
        self.validated()
    }

    /// Copy with the per-chip power normalization of the spread frame turned
    /// on or off (off reproduces the composite signal exactly as written).
    pub fn with_normalize_spread(mut self, normalize_spread: bool) -> Self {
        self.normalize_spread = normalize_spread;
        self
    }

    /// Copy with the unit-norm uplink convention turned on or off.
    ///
    /// When on (the default), the uplink gain vector is scaled to unit norm
    /// so the configured SNR is the post-combining SNR; when off, the raw
    /// gains add an N-fold array gain on top of the configured SNR.
    pub fn with_normalize_uplink(mut self, normalize_uplink: bool) -> Self {
        self.normalize_uplink = normalize_uplink;
        self
    }

    fn validated(self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::invalid_parameter("antenna count must be positive"));
        }
        if self.xi == 0 || self.xi > self.n {
            return Err(Error::invalid_parameter(format!(
                "sparsity {} must lie in 1..={}",
                self.xi, self.n
            )));
        }
        if self.p == 0 {
            return Err(Error::invalid_parameter("data length must be positive"));
        }
        if !self.c.is_finite() || self.c <= 0.0 {
            return Err(Error::invalid_parameter(format!(
                "sampling rate must be positive and finite, got {}",
                self.c
            )));
        }
        if self.m() == 0 {
            return Err(Error::invalid_parameter(
                "sampling rate rounds to zero measurements",
            ));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::invalid_parameter("SNR must be finite"));
        }
        if self.itermax == 0 {
            return Err(Error::invalid_parameter("itermax must be at least 1"));
        }
        if self.scheme != Scheme::Tdm {
            // The superimposed pipelines need both a detectable frame and a
            // detectable data signal, which rules out the power extremes.
            if !self.rho.is_finite() || self.rho <= 0.0 || self.rho >= 1.0 {
                return Err(Error::invalid_parameter(format!(
                    "power split rho must lie strictly between 0 and 1, got {}",
                    self.rho
                )));
            }
            if !self.p.is_power_of_two() {
                return Err(Error::invalid_parameter(
                    "spreading requires the data length to be a power of two",
                ));
            }
            let layout = self.layout()?;
            if layout.l() > self.p {
                return Err(Error::invalid_parameter(format!(
                    "frame needs {} spread symbols but only {} chips are available",
                    layout.l(),
                    self.p
                )));
            }
        } else if !self.rho.is_finite() {
            return Err(Error::invalid_parameter("rho must be finite"));
        }
        Ok(self)
    }

    /// Scheme selector.
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Number of transmit antennas N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Uplink data length P (symbols).
    pub fn p(&self) -> usize {
        self.p
    }

    /// Channel sparsity ξ.
    pub fn xi(&self) -> usize {
        self.xi
    }

    /// Sampling rate c (measurements per antenna).
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Number of one-bit measurements per part, M = round(c·N).
    pub fn m(&self) -> usize {
        (self.c * self.n as f64).round() as usize
    }

    /// Feedback power fraction ρ (ignored by the baseline).
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Operating signal-to-noise ratio in dB.
    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    /// Reconstruction iteration budget.
    pub fn itermax(&self) -> usize {
        self.itermax
    }

    /// Per-trial seed streams.
    pub fn seeds(&self) -> TrialSeeds {
        self.seeds
    }

    /// Copy with different seeds (same operating point).
    pub fn with_seeds(mut self, seeds: TrialSeeds) -> Self {
        self.seeds = seeds;
        self
    }

    /// Whether the spread frame is scaled to unit per-chip power.
    pub fn normalize_spread(&self) -> bool {
        self.normalize_spread
    }

    /// Whether the uplink gains are scaled to unit norm.
    pub fn normalize_uplink(&self) -> bool {
        self.normalize_uplink
    }

    /// Frame layout of the superimposed schemes (the baseline has no frame).
    pub fn layout(&self) -> Result<FrameLayout> {
        match self.scheme {
            Scheme::PropSca => FrameLayout::new(self.n, self.m(), true),
            Scheme::PropBiht => FrameLayout::new(self.n, self.m(), false),
            Scheme::Tdm => Err(Error::InvalidConfiguration(
                "the baseline transmits raw measurements, not a frame".into(),
            )),
        }
    }

    /// Feedback bits this configuration spends per channel realization.
    ///
    /// For the superimposed schemes this is the full frame length (sign bits,
    /// optional support indicator, sparsity field). The baseline transmits
    /// only the 2M sign bits; its sparsity is assumed known at the receiver.
    pub fn bit_overhead(&self) -> Result<usize> {
        match self.scheme {
            Scheme::PropSca | Scheme::PropBiht => Ok(self.layout()?.bit_len()),
            Scheme::Tdm => Ok(2 * self.m()),
        }
    }

    /// Fraction of extra uplink channel uses the scheme needs on top of the
    /// P data symbols: M/P for the baseline's dedicated segment, zero for
    /// the superimposed schemes.
    pub fn extra_bandwidth_ratio(&self) -> f64 {
        match self.scheme {
            Scheme::PropSca | Scheme::PropBiht => 0.0,
            Scheme::Tdm => self.m() as f64 / self.p as f64,
        }
    }
}

/// Metrics of one completed trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    bit_errors: u64,
    bits_total: u64,
    frame_bit_errors: u64,
    nmse_value: f64,
    iterations_used: usize,
    support_respected: bool,
}

impl TrialOutcome {
    fn new(
        bit_errors: u64,
        bits_total: u64,
        frame_bit_errors: u64,
        nmse_value: f64,
        iterations_used: usize,
        support_respected: bool,
    ) -> Self {
        debug_assert!(bit_errors <= bits_total);
        Self {
            bit_errors,
            bits_total,
            frame_bit_errors,
            nmse_value,
            iterations_used,
            support_respected,
        }
    }

    /// Uplink data bit errors in this trial.
    pub fn bit_errors(&self) -> u64 {
        self.bit_errors
    }

    /// Uplink data bits transmitted (2P).
    pub fn bits_total(&self) -> u64 {
        self.bits_total
    }

    /// Feedback bit errors: frame bits for the superimposed schemes,
    /// measurement bits for the baseline.
    pub fn frame_bit_errors(&self) -> u64 {
        self.frame_bit_errors
    }

    /// Squared error between the unit-normalized truth and the estimate.
    pub fn nmse_value(&self) -> f64 {
        self.nmse_value
    }

    /// Reconstruction iterations executed.
    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// Whether every nonzero of the channel estimate lies inside the support
    /// the reconstructor was given (vacuously true when no support is used).
    pub fn support_respected(&self) -> bool {
        self.support_respected
    }

    /// Bit error ratio of this trial.
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.bits_total as f64
    }
}

/// Runs one trial of whichever scheme the configuration selects.
pub fn run_trial(cfg: &SchemeConfig) -> Result<TrialOutcome> {
    match cfg.scheme() {
        Scheme::PropSca => run_trial_prop_sca(cfg),
        Scheme::PropBiht => run_trial_prop_biht(cfg),
        Scheme::Tdm => run_trial_tdm(cfg),
    }
}

/// Superimposed trial with support indicator and support-aided
/// reconstruction.
pub fn run_trial_prop_sca(cfg: &SchemeConfig) -> Result<TrialOutcome> {
    if cfg.scheme() != Scheme::PropSca {
        return Err(Error::InvalidConfiguration(
            "configuration does not select the support-aided scheme".into(),
        ));
    }
    superimposed_trial(cfg)
}

/// Superimposed trial without support indicator.
pub fn run_trial_prop_biht(cfg: &SchemeConfig) -> Result<TrialOutcome> {
    if cfg.scheme() != Scheme::PropBiht {
        return Err(Error::InvalidConfiguration(
            "configuration does not select the plain superimposed scheme".into(),
        ));
    }
    superimposed_trial(cfg)
}

fn draw_data_bits(p: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..2 * p).map(|_| rng.random_range(0..=1u8)).collect()
}

fn superimposed_trial(cfg: &SchemeConfig) -> Result<TrialOutcome> {
    let n = cfg.n();
    let p = cfg.p();
    let layout = cfg.layout()?;
    let with_support = layout.includes_support();
    let q = gen_walsh(p, layout.l())?;
    let link = LinkConfig::from_snr_db(cfg.rho(), E_K, cfg.snr_db(), p)?;

    // User side: realize the channel, compress, frame, modulate, spread.
    let mut channel_rng = ChaCha8Rng::seed_from_u64(cfg.seeds().channel());
    let h = gen_sparse_channel(n, cfg.xi(), &mut channel_rng)?;
    let z = support_vector(&h);
    let g_raw = gen_uplink_channel(n, &mut channel_rng)?;
    let g = if cfg.normalize_uplink() {
        g_raw.normalized()
    } else {
        g_raw
    };
    let phi = gen_measurement_matrix(n, cfg.m(), cfg.seeds().matrix())?;
    let y_sign = compress(&h, &phi)?;
    let frame = assemble_frame(&y_sign, with_support.then_some(&z), cfg.xi(), &layout)?;
    let x = qpsk_modulate(frame.bits())?;
    let mut s = spread(&x, &q)?;
    let spread_scale = if cfg.normalize_spread() {
        1.0 / (layout.l() as f64).sqrt()
    } else {
        1.0
    };
    if cfg.normalize_spread() {
        for v in &mut s {
            *v *= spread_scale;
        }
    }

    // Uplink: superimpose on the data and cross the channel.
    let data_bits = draw_data_bits(p, cfg.seeds().data());
    let d = qpsk_modulate(&data_bits)?;
    let composite = superimpose(&s, d.symbols(), &link)?;
    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seeds().noise());
    let observation = transmit(&composite, &g, &link, &mut noise_rng)?;

    // Base station: de-spread, detect and parse the frame.
    let x_tilde = despread(observation.y(), &q)?;
    let detected = mmse_frame_detect(&x_tilde, &g, &link)?;
    let detected_bits_padded = qpsk_demodulate(detected.symbols())?;
    let detected_bits = &detected_bits_padded[..layout.bit_len()];
    let frame_bit_errors = detected_bits
        .iter()
        .zip(frame.bits())
        .filter(|(a, b)| a != b)
        .count() as u64;
    let parsed = parse_frame(detected_bits, &layout)?;

    // Cancel the detected frame and recover the data from the residual.
    let residual =
        cancel_interference_scaled(&observation, &detected, &q, &g, &link, spread_scale)?;
    let data_est = mmse_ulus_detect(&residual, &g, &link)?;
    let bit_errors = data_est
        .bits()
        .iter()
        .zip(&data_bits)
        .filter(|(a, b)| a != b)
        .count() as u64;

    // Reconstruct the channel direction from the parsed signs. A corrupted
    // sparsity field is clamped into the valid range rather than aborting
    // the trial.
    let xi_used = parsed.xi.clamp(1, n);
    let rc = ReconstructionConfig::new(cfg.itermax(), 1.0, false)?;
    let recon = if with_support {
        let mask = parsed.z.as_ref().ok_or_else(|| {
            Error::ContractViolation("support segment missing after parse".into())
        })?;
        sca_biht(&parsed.y, &phi, xi_used, mask, &rc)?
    } else {
        biht(&parsed.y, &phi, xi_used, &rc)?
    };
    let support_respected = if with_support {
        let mask = parsed.z.as_ref().expect("checked above");
        recon
            .h_hat()
            .iter()
            .enumerate()
            .all(|(i, v)| v.norm_sqr() == 0.0 || mask.is_set(i))
    } else {
        true
    };
    let nmse_value = nmse(h.coeffs(), recon.h_hat())?;

    Ok(TrialOutcome::new(
        bit_errors,
        2 * p as u64,
        frame_bit_errors,
        nmse_value,
        recon.iterations_used(),
        support_respected,
    ))
}

/// Baseline trial: data and measurement signs on dedicated full-power
/// segments, no superposition.
pub fn run_trial_tdm(cfg: &SchemeConfig) -> Result<TrialOutcome> {
    if cfg.scheme() != Scheme::Tdm {
        return Err(Error::InvalidConfiguration(
            "configuration does not select the baseline scheme".into(),
        ));
    }
    let n = cfg.n();
    let p = cfg.p();
    let m = cfg.m();
    // ρ plays no role here; both segments use the full power E_K.
    let link = LinkConfig::from_snr_db(0.0, E_K, cfg.snr_db(), p)?;

    let mut channel_rng = ChaCha8Rng::seed_from_u64(cfg.seeds().channel());
    let h = gen_sparse_channel(n, cfg.xi(), &mut channel_rng)?;
    let g_raw = gen_uplink_channel(n, &mut channel_rng)?;
    let g = if cfg.normalize_uplink() {
        g_raw.normalized()
    } else {
        g_raw
    };
    let phi = gen_measurement_matrix(n, m, cfg.seeds().matrix())?;
    let y_sign = compress(&h, &phi)?;

    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seeds().noise());

    // Segment 1: uplink data alone.
    let data_bits = draw_data_bits(p, cfg.seeds().data());
    let d = qpsk_modulate(&data_bits)?;
    let data_block = transmit_tdm_symbols(d.symbols(), &g, &link, &mut noise_rng)?;
    let data_est = mmse_ulus_detect(&data_block, &g, &link)?;
    let bit_errors = data_est
        .bits()
        .iter()
        .zip(&data_bits)
        .filter(|(a, b)| a != b)
        .count() as u64;

    // Segment 2: the 2M sign bits as M full-power QPSK symbols.
    let mut meas_bits: Vec<u8> = signs_to_bits(y_sign.y_real()).collect();
    meas_bits.extend(signs_to_bits(y_sign.y_imag()));
    let meas_symbols = qpsk_modulate(&meas_bits)?;
    let meas_block = transmit_tdm_symbols(meas_symbols.symbols(), &g, &link, &mut noise_rng)?;
    let meas_est = mmse_ulus_detect(&meas_block, &g, &link)?;
    let frame_bit_errors = meas_est
        .bits()
        .iter()
        .zip(&meas_bits)
        .filter(|(a, b)| a != b)
        .count() as u64;

    // Reconstruct from the detected signs; the sparsity level is assumed
    // known at the base station (nothing in this mode transmits it).
    let est_bits = meas_est.bits();
    let y_est =
        SignMeasurements::from_parts(bits_to_signs(&est_bits[..m]), bits_to_signs(&est_bits[m..]))?;
    let rc = ReconstructionConfig::new(cfg.itermax(), 1.0, false)?;
    let recon = biht(&y_est, &phi, cfg.xi(), &rc)?;
    let nmse_value = nmse(h.coeffs(), recon.h_hat())?;

    Ok(TrialOutcome::new(
        bit_errors,
        2 * p as u64,
        frame_bit_errors,
        nmse_value,
        recon.iterations_used(),
        true,
    ))
}
