//! Gaussian measurement matrices and 1-bit compression of the channel vector.
//!
//! The user projects its length-N channel onto M random directions and keeps
//! only the signs of the real and imaginary parts of the projections. The
//! matrix is never transmitted: user and base station regenerate it from a
//! shared seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::SparseChannel;
use crate::error::{Error, Result};

/// N×M real measurement matrix with i.i.d. standard normal entries,
/// reproducible from its seed.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    entries: Vec<f64>, // row-major, n rows × m columns
    n: usize,
    m: usize,
    seed: u64,
}

impl MeasurementMatrix {
    /// Builds a matrix from explicit row-major entries (mainly for tests and
    /// reference constructions); `seed` is carried as an identifier only.
    pub fn from_entries(n: usize, m: usize, entries: Vec<f64>, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid_parameter(
                "measurement matrix dimensions must be positive",
            ));
        }
        if entries.len() != n * m {
            return Err(Error::invalid_parameter(format!(
                "entry count {} does not match shape {n}x{m}",
                entries.len()
            )));
        }
        Ok(MeasurementMatrix {
            entries,
            n,
            m,
            seed,
        })
    }

    /// Number of rows N (channel length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns M (measurement count).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Seed identifier shared between user and base station.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Row `i` as a slice of length M.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }

    /// Flat row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Sign measurements of the real and imaginary projection parts, in the ±1
/// alphabet used by the reconstruction solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SignMeasurements {
    y_real: Vec<f64>,
    y_imag: Vec<f64>,
}

impl SignMeasurements {
    /// Builds sign measurements from two ±1 vectors of equal length.
    pub fn from_parts(y_real: Vec<f64>, y_imag: Vec<f64>) -> Result<Self> {
        if y_real.len() != y_imag.len() {
            return Err(Error::invalid_parameter(format!(
                "sign vector lengths differ: {} vs {}",
                y_real.len(),
                y_imag.len()
            )));
        }
        let is_sign = |v: &[f64]| v.iter().all(|&x| x == 1.0 || x == -1.0);
        if !is_sign(&y_real) || !is_sign(&y_imag) {
            return Err(Error::invalid_parameter(
                "sign measurements must contain exactly ±1",
            ));
        }
        Ok(SignMeasurements { y_real, y_imag })
    }

    /// Signs of the real projection parts (length M).
    pub fn y_real(&self) -> &[f64] {
        &self.y_real
    }

    /// Signs of the imaginary projection parts (length M).
    pub fn y_imag(&self) -> &[f64] {
        &self.y_imag
    }

    /// Measurement count M.
    pub fn m(&self) -> usize {
        self.y_real.len()
    }
}

/// Generates the shared N×M measurement matrix for a seed.
///
/// Entries are drawn i.i.d. standard normal in row-major order from a
/// dedicated generator, so both link ends obtain the identical matrix from
/// the seed alone.
pub fn gen_measurement_matrix(n: usize, m: usize, seed: u64) -> Result<MeasurementMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::invalid_parameter(
            "measurement matrix dimensions must be positive",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n * m)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(MeasurementMatrix {
        entries,
        n,
        m,
        seed,
    })
}

/// Element-wise sign with a symmetric alphabet: +1 for strictly positive
/// inputs, −1 otherwise (zero maps to −1).
///
/// The solvers need the gradient term `ỹ − sgn(rΦ)` to live in {−2, 0, +2},
/// which requires ±1 rather than {0, 1}; the bit-stream boundary maps
/// +1 ↔ bit 1 and −1 ↔ bit 0.
pub fn sign_vec(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| if x > 0.0 { 1.0 } else { -1.0 })
        .collect()
}

/// 1-bit compression: sign measurements of the real and imaginary parts of
/// `h·Φ`.
///
/// The projection sums only over the support of `h`; the result is identical
/// to the dense product because the remaining coefficients are exactly zero.
pub fn compress(h: &SparseChannel, phi: &MeasurementMatrix) -> Result<SignMeasurements> {
    if h.n() != phi.n() {
        return Err(Error::invalid_parameter(format!(
            "channel length {} does not match matrix rows {}",
            h.n(),
            phi.n()
        )));
    }
    let m = phi.m();
    let mut proj = vec![Complex64::ZERO; m];
    for &i in h.support() {
        let hi = h.coeffs()[i];
        for (p, &phi_ij) in proj.iter_mut().zip(phi.row(i)) {
            *p += hi * phi_ij;
        }
    }
    let re: Vec<f64> = proj.iter().map(|z| z.re).collect();
    let im: Vec<f64> = proj.iter().map(|z| z.im).collect();
    Ok(SignMeasurements {
        y_real: sign_vec(&re),
        y_imag: sign_vec(&im),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrix_generation_is_deterministic() {
        let a = gen_measurement_matrix(16, 32, 7).unwrap();
        let b = gen_measurement_matrix(16, 32, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_measurement_matrix(16, 32, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn matrix_entries_are_standard_normal() {
        // Statistical oracle over the 64×128 = 8192 entries of one draw.
        let phi = gen_measurement_matrix(64, 128, 1).unwrap();
        let k = phi.entries().len() as f64;
        let mean = phi.entries().iter().sum::<f64>() / k;
        let var = phi
            .entries()
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / k;
        assert!(mean.abs() <= 0.05, "sample mean {mean}");
        assert!((0.95..=1.05).contains(&var), "sample variance {var}");
    }

    #[test]
    fn smallest_matrix_is_one_by_one() {
        let phi = gen_measurement_matrix(1, 1, 3).unwrap();
        assert_eq!((phi.n(), phi.m()), (1, 1));
        assert_eq!(phi.entries().len(), 1);
    }

    #[test]
    fn zero_dimensions_are_rejected() {
        assert!(gen_measurement_matrix(0, 4, 1).is_err());
        assert!(gen_measurement_matrix(4, 0, 1).is_err());
        assert!(MeasurementMatrix::from_entries(2, 2, vec![0.0; 3], 0).is_err());
    }

    #[test]
    fn sign_vec_maps_zero_to_minus_one() {
        assert_eq!(sign_vec(&[0.5, -0.2, 0.0]), vec![1.0, -1.0, -1.0]);
        assert_eq!(sign_vec(&[3.0, 1e-300]), vec![1.0, 1.0]);
    }

    #[test]
    fn compress_single_row_projection() {
        // h = e_1 (real): projections equal Φ's first row, so y_real follows
        // its signs and y_imag is all −1 (zero imaginary part).
        let phi =
            MeasurementMatrix::from_entries(2, 3, vec![1.0, 1.0, 1.0, -0.3, 0.2, 0.9], 0).unwrap();
        let h = SparseChannel::new(vec![Complex64::new(1.0, 0.0), Complex64::ZERO]);
        let y = compress(&h, &phi).unwrap();
        assert_eq!(y.y_real(), &[1.0, 1.0, 1.0]);
        assert_eq!(y.y_imag(), &[-1.0, -1.0, -1.0]);
    }

    #[test]
    fn compress_zero_channel_gives_all_minus_one() {
        let phi = gen_measurement_matrix(4, 6, 2).unwrap();
        let h = SparseChannel::new(vec![Complex64::ZERO; 4]);
        let y = compress(&h, &phi).unwrap();
        assert!(y.y_real().iter().all(|&v| v == -1.0));
        assert!(y.y_imag().iter().all(|&v| v == -1.0));
    }

    #[test]
    fn compress_dimension_mismatch_is_rejected() {
        let phi = gen_measurement_matrix(4, 6, 2).unwrap();
        let h = SparseChannel::new(vec![Complex64::ZERO; 5]);
        assert!(compress(&h, &phi).is_err());
    }

    #[test]
    fn compress_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = gen_measurement_matrix(16, 24, 11).unwrap();
        let h = crate::channel::gen_sparse_channel(16, 4, &mut rng).unwrap();
        let scaled = SparseChannel::new(h.coeffs().iter().map(|z| z * 3.5).collect());
        assert_eq!(
            compress(&h, &phi).unwrap(),
            compress(&scaled, &phi).unwrap()
        );
    }

    #[test]
    fn compress_matches_dense_reference() {
        // Oracle: brute-force dense evaluation of h·Φ with explicit loops,
        // thresholded the same way.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for trial in 0..50 {
            let n = 8 + (trial % 5);
            let m = 12 + (trial % 7);
            let phi = gen_measurement_matrix(n, m, 100 + trial as u64).unwrap();
            let xi = trial % (n + 1);
            let h = crate::channel::gen_sparse_channel(n, xi, &mut rng).unwrap();
            let y = compress(&h, &phi).unwrap();
            for j in 0..m {
                let mut acc = Complex64::ZERO;
                for i in 0..n {
                    acc += h.coeffs()[i] * phi.row(i)[j];
                }
                let want_re = if acc.re > 0.0 { 1.0 } else { -1.0 };
                let want_im = if acc.im > 0.0 { 1.0 } else { -1.0 };
                assert_eq!(y.y_real()[j], want_re, "re mismatch at column {j}");
                assert_eq!(y.y_imag()[j], want_im, "im mismatch at column {j}");
            }
        }
    }

    #[test]
    fn from_parts_validates_alphabet_and_lengths() {
        assert!(SignMeasurements::from_parts(vec![1.0, -1.0], vec![-1.0, 1.0]).is_ok());
        assert!(SignMeasurements::from_parts(vec![1.0], vec![1.0, -1.0]).is_err());
        assert!(SignMeasurements::from_parts(vec![0.5], vec![1.0]).is_err());
        assert!(SignMeasurements::from_parts(vec![0.0], vec![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn sign_vec_is_odd_for_nonzero_inputs(v in proptest::collection::vec(-1e6f64..1e6, 1..40)) {
            let v: Vec<f64> = v.into_iter().filter(|x| *x != 0.0).collect();
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let s = sign_vec(&v);
            let sn = sign_vec(&neg);
            for (a, b) in s.iter().zip(&sn) {
                prop_assert_eq!(*a, -*b);
            }
        }

        #[test]
        fn output_length_is_m_regardless_of_sparsity(seed in 0u64..500) {
            let n = 8usize;
            let m = 13usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xi = (seed as usize) % (n + 1);
            let h = crate::channel::gen_sparse_channel(n, xi, &mut rng).unwrap();
            let phi = gen_measurement_matrix(n, m, seed).unwrap();
            let y = compress(&h, &phi).unwrap();
            prop_assert_eq!(y.m(), m);
            prop_assert_eq!(y.y_imag().len(), m);
        }
    }
}
