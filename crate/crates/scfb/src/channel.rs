//! Random generation of sparse channel vectors, uplink gains and receiver
//! noise, plus support-set labeling.
//!
//! All generators take an explicit seeded generator and have a documented draw
//! order, so identical `(seed, parameters)` always produce identical outputs.
//! Types are immutable after construction and safe to share read-only across
//! concurrent trial workers.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mat::{norm_sq, CMat};

/// A length-N complex channel vector with exactly `sparsity` nonzero entries.
///
/// The support is derived from the coefficients, so the two can never
/// disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseChannel {
    coeffs: Vec<Complex64>,
    support: Vec<usize>,
}

impl SparseChannel {
    /// Wraps a coefficient vector, deriving support and sparsity from its
    /// nonzero pattern.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let support = coeffs
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::ZERO)
            .map(|(i, _)| i)
            .collect();
        SparseChannel { coeffs, support }
    }

    /// Channel coefficients (length N).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Vector length N.
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// Number of nonzero coefficients.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// Sorted indices of the nonzero coefficients.
    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

/// Binary indicator vector marking the nonzero positions of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector {
    bits: Vec<u8>,
}

impl SupportVector {
    /// Builds a support vector from raw bits; every entry must be 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid_parameter(
                "support vector entries must be 0 or 1",
            ));
        }
        Ok(SupportVector { bits })
    }

    /// Indicator bits (length N).
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Vector length N.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// True if the vector has length zero.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of marked positions.
    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// True if position `i` is marked.
    pub fn is_set(&self, i: usize) -> bool {
        self.bits[i] == 1
    }
}

/// Per-antenna uplink gains from the user to the base station.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkChannel {
    gains: Vec<Complex64>,
}

impl UplinkChannel {
    /// Wraps a gain vector; the all-zero vector is rejected.
    pub fn new(gains: Vec<Complex64>) -> Result<Self> {
        if gains.iter().all(|z| *z == Complex64::ZERO) {
            return Err(Error::invalid_parameter(
                "uplink channel must not be the all-zero vector",
            ));
        }
        Ok(UplinkChannel { gains })
    }

    /// Complex gains (length N).
    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    /// Number of antennas N.
    pub fn n(&self) -> usize {
        self.gains.len()
    }

    /// Squared Euclidean norm ‖g‖².
    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.gains)
    }

    /// Copy of this channel scaled to unit norm.
    ///
    /// Scheme pipelines use this to pin the receive array gain at 1, so that
    /// the configured SNR is the post-combining detection SNR rather than
    /// being inflated by a factor ‖g‖² ≈ N. The generator contract itself is
    /// untouched: gains are drawn i.i.d. with unit variance.
    pub fn normalized(&self) -> UplinkChannel {
        let norm = self.norm_sq().sqrt();
        UplinkChannel {
            gains: self.gains.iter().map(|z| z / norm).collect(),
        }
    }
}

/// Additive receiver noise level, as variance per complex element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    /// Noise with the given per-element variance (must be finite and ≥ 0).
    pub fn new(variance: f64) -> Result<Self> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(Error::invalid_parameter(format!(
                "noise variance must be finite and non-negative, got {variance}"
            )));
        }
        Ok(NoiseModel { variance })
    }

    /// Variance per complex element.
    pub fn variance(&self) -> f64 {
        self.variance
    }
}

/// One circular complex Gaussian draw with the given total variance:
/// real and imaginary parts are i.i.d. `N(0, variance/2)`.
///
/// Draw order is real part first, then imaginary part.
pub fn complex_gaussian<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Generates a length-`n` channel with exactly `xi` nonzero entries.
///
/// The support is chosen uniformly at random without replacement, then one
/// unit-variance circular complex Gaussian is drawn per support index in
/// ascending index order. Entries off the support are exactly zero.
pub fn gen_sparse_channel<R: Rng + ?Sized>(
    n: usize,
    xi: usize,
    rng: &mut R,
) -> Result<SparseChannel> {
    if n == 0 {
        return Err(Error::invalid_parameter("channel length must be positive"));
    }
    if xi > n {
        return Err(Error::invalid_parameter(format!(
            "sparsity {xi} exceeds channel length {n}"
        )));
    }
    let mut support: Vec<usize> = rand::seq::index::sample(rng, n, xi).into_vec();
    support.sort_unstable();
    let mut coeffs = vec![Complex64::ZERO; n];
    for &i in &support {
        coeffs[i] = complex_gaussian(1.0, rng);
    }
    Ok(SparseChannel { coeffs, support })
}

/// Marks the nonzero positions of `h` with 1-bits.
pub fn support_vector(h: &SparseChannel) -> SupportVector {
    SupportVector {
        bits: h
            .coeffs
            .iter()
            .map(|z| u8::from(*z != Complex64::ZERO))
            .collect(),
    }
}

/// Generates a length-`n` uplink gain vector with i.i.d. unit-variance
/// circular complex Gaussian entries.
///
/// The all-zero outcome (probability zero, but conceivable under exotic
/// generators) is rejected and redrawn.
pub fn gen_uplink_channel<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UplinkChannel> {
    if n == 0 {
        return Err(Error::invalid_parameter(
            "uplink channel length must be positive",
        ));
    }
    loop {
        let gains: Vec<Complex64> = (0..n).map(|_| complex_gaussian(1.0, rng)).collect();
        if gains.iter().any(|z| *z != Complex64::ZERO) {
            return Ok(UplinkChannel { gains });
        }
    }
}

/// Generates a `rows`×`cols` matrix of i.i.d. circular complex Gaussian noise
/// with the given per-element variance.
///
/// Elements are drawn in row-major order. Variance 0 returns an exact zero
/// matrix without consuming any draws.
pub fn gen_noise<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut R,
) -> Result<CMat> {
    let model = NoiseModel::new(variance)?;
    if model.variance() == 0.0 {
        return Ok(CMat::zeros(rows, cols));
    }
    let data = (0..rows * cols)
        .map(|_| complex_gaussian(variance, rng))
        .collect();
    CMat::from_vec(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zero_sparsity_gives_zero_vector_and_empty_support() {
        let h = gen_sparse_channel(5, 0, &mut rng(1)).unwrap();
        assert!(h.coeffs().iter().all(|z| *z == Complex64::ZERO));
        assert!(h.support().is_empty());
        assert_eq!(h.sparsity(), 0);
    }

    #[test]
    fn full_sparsity_fills_every_entry() {
        let h = gen_sparse_channel(5, 5, &mut rng(2)).unwrap();
        assert!(h.coeffs().iter().all(|z| *z != Complex64::ZERO));
        assert_eq!(h.support(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(gen_sparse_channel(4, 5, &mut rng(3)).is_err());
        assert!(gen_sparse_channel(0, 0, &mut rng(3)).is_err());
        assert!(gen_uplink_channel(0, &mut rng(3)).is_err());
        assert!(gen_noise(1, 1, -0.5, &mut rng(3)).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
    }

    #[test]
    fn nonzero_entries_have_unit_sample_variance() {
        // Statistical oracle: mean |h_i|² over all nonzeros of repeated draws.
        let mut r = rng(10);
        let mut sum = 0.0;
        let mut count = 0usize;
        for _ in 0..10_000 {
            let h = gen_sparse_channel(64, 8, &mut r).unwrap();
            for &i in h.support() {
                sum += h.coeffs()[i].norm_sqr();
                count += 1;
            }
        }
        let var = sum / count as f64;
        assert!((0.9..=1.1).contains(&var), "sample variance {var}");
    }

    #[test]
    fn support_positions_are_uniform() {
        // Statistical oracle: with (n=8, xi=1) each index should be picked
        // with frequency 1/8 ± 0.01 over 10^5 draws.
        let mut r = rng(11);
        let mut counts = [0usize; 8];
        for _ in 0..100_000 {
            let h = gen_sparse_channel(8, 1, &mut r).unwrap();
            counts[h.support()[0]] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / 100_000.0;
            assert!(
                (freq - 0.125).abs() <= 0.01,
                "index {i} frequency {freq} outside 1/8 ± 0.01"
            );
        }
    }

    #[test]
    fn support_vector_marks_nonzeros() {
        let one = Complex64::new(1.0, -0.5);
        let h = SparseChannel::new(vec![one, one, Complex64::ZERO, Complex64::ZERO, one]);
        assert_eq!(support_vector(&h).bits(), &[1, 1, 0, 0, 1]);

        let zero = SparseChannel::new(vec![Complex64::ZERO; 4]);
        assert_eq!(support_vector(&zero).bits(), &[0, 0, 0, 0]);

        let dense = SparseChannel::new(vec![one; 3]);
        assert_eq!(support_vector(&dense).bits(), &[1, 1, 1]);
    }

    #[test]
    fn uplink_channel_mean_energy_matches_dimension() {
        // Statistical oracle: E‖G‖² = n for unit-variance entries; ±5% band.
        let mut r = rng(12);
        let mean = (0..10_000)
            .map(|_| gen_uplink_channel(64, &mut r).unwrap().norm_sq())
            .sum::<f64>()
            / 10_000.0;
        assert!((60.8..=67.2).contains(&mean), "mean ‖G‖² = {mean}");
    }

    #[test]
    fn single_antenna_uplink_is_a_scalar() {
        let g = gen_uplink_channel(1, &mut rng(13)).unwrap();
        assert_eq!(g.n(), 1);
        assert_ne!(g.gains()[0], Complex64::ZERO);
    }

    #[test]
    fn generators_are_deterministic_for_fixed_seed() {
        let a = gen_sparse_channel(64, 8, &mut rng(42)).unwrap();
        let b = gen_sparse_channel(64, 8, &mut rng(42)).unwrap();
        assert_eq!(a, b);

        let ga = gen_uplink_channel(64, &mut rng(42)).unwrap();
        let gb = gen_uplink_channel(64, &mut rng(42)).unwrap();
        assert_eq!(ga, gb);

        let na = gen_noise(4, 7, 0.3, &mut rng(42)).unwrap();
        let nb = gen_noise(4, 7, 0.3, &mut rng(42)).unwrap();
        assert_eq!(na, nb);
    }

    #[test]
    fn zero_variance_noise_is_exactly_zero() {
        let n = gen_noise(3, 5, 0.0, &mut rng(14)).unwrap();
        assert!(n.as_slice().iter().all(|z| *z == Complex64::ZERO));
    }

    #[test]
    fn noise_sample_variance_matches_request() {
        // Statistical oracle: per-element variance 2 ± 2% over 10^5 samples.
        let n = gen_noise(1, 100_000, 2.0, &mut rng(15)).unwrap();
        let var = n.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / 100_000.0;
        assert!((1.96..=2.04).contains(&var), "sample variance {var}");
    }

    #[test]
    fn normalized_uplink_has_unit_norm() {
        let g = gen_uplink_channel(64, &mut rng(16)).unwrap();
        let u = g.normalized();
        assert!((u.norm_sq() - 1.0).abs() < 1e-12);
        // Direction is preserved: u parallel to g.
        let ratio = g.gains()[0] / u.gains()[0];
        for (a, b) in g.gains().iter().zip(u.gains()) {
            assert!((a / b - ratio).norm() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn support_vector_popcount_equals_sparsity(n in 1usize..48, seed in 0u64..1000) {
            let mut r = rng(seed);
            let xi = (seed as usize) % (n + 1);
            let h = gen_sparse_channel(n, xi, &mut r).unwrap();
            let z = support_vector(&h);
            prop_assert_eq!(z.popcount(), h.sparsity());
            prop_assert_eq!(z.popcount(), xi);
            prop_assert_eq!(z.len(), n);
        }
    }
}
