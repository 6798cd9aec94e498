//! Walsh spreading and de-spreading over length-P orthogonal codes.
//!
//! The spreading matrix is the first L columns of the order-P
//! Sylvester–Hadamard matrix `H_1 = [1]`, `H_{2k} = [[H_k, H_k], [H_k, −H_k]]`,
//! whose entry (i, j) is `(−1)^popcount(i AND j)`. Columns are exactly
//! orthogonal in integer arithmetic: `qᵀq = P·I_L`.
//!
//! Because the Hadamard matrix is symmetric and self-similar, both spreading
//! (`x·qᵀ`) and de-spreading (`y·q / P`) are evaluated with the radix-2 fast
//! Walsh–Hadamard transform in O(P log P) per vector instead of O(P·L); the
//! result equals the explicit matrix product up to floating-point rounding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::framing::ModulatedFrame;
use crate::mat::CMat;

/// The first L columns of the order-P Sylvester–Hadamard matrix.
///
/// Entries are looked up on demand from the popcount identity rather than
/// stored: the matrix is fully determined by `(p, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpreadingMatrix {
    p: usize,
    l: usize,
}

impl SpreadingMatrix {
    /// Spreading factor P (code length).
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of selected columns L.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Entry (i, j) ∈ {−1, +1} of the order-P Sylvester–Hadamard matrix.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        debug_assert!(i < self.p && j < self.l);
        if (i & j).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Column `j` as explicit ±1 values (used by tests and cancellation
    /// oracles; the transforms never materialize columns).
    pub fn column(&self, j: usize) -> Vec<i8> {
        (0..self.p).map(|i| self.entry(i, j)).collect()
    }
}

/// Builds the P×L Walsh spreading matrix.
///
/// `p` must be a power of two and `1 ≤ l ≤ p`.
pub fn gen_walsh(p: usize, l: usize) -> Result<SpreadingMatrix> {
    if p == 0 || !p.is_power_of_two() {
        return Err(Error::invalid_parameter(format!(
            "spreading factor must be a power of two, got {p}"
        )));
    }
    if l == 0 || l > p {
        return Err(Error::invalid_parameter(format!(
            "column count must satisfy 1 ≤ l ≤ {p}, got {l}"
        )));
    }
    Ok(SpreadingMatrix { p, l })
}

/// In-place fast Walsh–Hadamard transform in natural (Sylvester) order.
///
/// Computes `v ← H_P · v` for `P = v.len()`, a power of two.
fn fwht(v: &mut [Complex64]) {
    let n = v.len();
    let mut half = 1;
    while half < n {
        let mut block = 0;
        while block < n {
            for i in block..block + half {
                let a = v[i];
                let b = v[i + half];
                v[i] = a + b;
                v[i + half] = a - b;
            }
            block += 2 * half;
        }
        half <<= 1;
    }
}

/// Spreads the modulated frame over the code columns: `s = x·qᵀ`, length P.
///
/// `x` is zero-padded to length P and transformed; since the Hadamard matrix
/// is symmetric, `H·[x; 0]` equals the row-vector product `x·qᵀ` extended
/// over all P chips.
pub fn spread(x: &ModulatedFrame, q: &SpreadingMatrix) -> Result<Vec<Complex64>> {
    if x.len() != q.l() {
        return Err(Error::invalid_parameter(format!(
            "frame length {} does not match spreading columns {}",
            x.len(),
            q.l()
        )));
    }
    let mut buf = vec![Complex64::ZERO; q.p()];
    buf[..x.len()].copy_from_slice(x.symbols());
    fwht(&mut buf);
    Ok(buf)
}

/// De-spreads an N×P observation block: `x̃ = y·q / P`, an N×L matrix.
pub fn despread(y: &CMat, q: &SpreadingMatrix) -> Result<CMat> {
    if y.cols() != q.p() {
        return Err(Error::invalid_parameter(format!(
            "observation has {} columns but the code length is {}",
            y.cols(),
            q.p()
        )));
    }
    let scale = 1.0 / q.p() as f64;
    let mut out = CMat::zeros(y.rows(), q.l());
    let mut buf = vec![Complex64::ZERO; q.p()];
    for r in 0..y.rows() {
        buf.copy_from_slice(y.row(r));
        fwht(&mut buf);
        for (o, &v) in out.row_mut(r).iter_mut().zip(buf.iter().take(q.l())) {
            *o = v * scale;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::qpsk_modulate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Integer Gram matrix qᵀq, for exact orthogonality checks.
    fn gram(q: &SpreadingMatrix) -> Vec<Vec<i64>> {
        (0..q.l())
            .map(|a| {
                (0..q.l())
                    .map(|b| {
                        (0..q.p())
                            .map(|i| q.entry(i, a) as i64 * q.entry(i, b) as i64)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    fn assert_orthogonal(p: usize, l: usize) {
        let q = gen_walsh(p, l).unwrap();
        let g = gram(&q);
        for (a, row) in g.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                let want = if a == b { p as i64 } else { 0 };
                assert_eq!(v, want, "Gram({a},{b}) at (p={p}, l={l})");
            }
        }
    }

    #[test]
    fn base_case_is_the_order_two_hadamard() {
        let q = gen_walsh(2, 2).unwrap();
        assert_eq!(q.column(0), vec![1, 1]);
        assert_eq!(q.column(1), vec![1, -1]);
    }

    #[test]
    fn order_four_columns_follow_sylvester_recursion() {
        let q = gen_walsh(4, 3).unwrap();
        assert_eq!(q.column(0), vec![1, 1, 1, 1]);
        assert_eq!(q.column(1), vec![1, -1, 1, -1]);
        assert_eq!(q.column(2), vec![1, 1, -1, -1]);
    }

    #[test]
    fn columns_are_exactly_orthogonal_at_scale() {
        assert_orthogonal(2, 2);
        assert_orthogonal(1024, 132);
    }

    #[test]
    fn invalid_dimensions_are_rejected() {
        assert!(gen_walsh(0, 1).is_err());
        assert!(gen_walsh(12, 3).is_err());
        assert!(gen_walsh(8, 9).is_err());
        assert!(gen_walsh(8, 0).is_err());
    }

    #[test]
    fn all_ones_column_spreads_to_all_ones() {
        let q = gen_walsh(8, 1).unwrap();
        let x = qpsk_modulate(&[0, 0]).unwrap(); // single symbol (1+i)/√2
        let s = spread(&x, &q).unwrap();
        assert_eq!(s.len(), 8);
        for v in &s {
            assert_eq!(*v, x.symbols()[0]);
        }
    }

    fn random_frame(l: usize, seed: u64) -> ModulatedFrame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<u8> = (0..2 * l).map(|_| rng.random_range(0..=1u8)).collect();
        qpsk_modulate(&bits).unwrap()
    }

    #[test]
    fn spread_then_despread_is_identity() {
        // Scalar noiseless channel: (1/P)·(x qᵀ)·q must return x.
        let q = gen_walsh(1024, 132).unwrap();
        let x = random_frame(132, 3);
        let s = spread(&x, &q).unwrap();
        let y = CMat::from_vec(1, 1024, s).unwrap();
        let back = despread(&y, &q).unwrap();
        for (a, b) in back.row(0).iter().zip(x.symbols()) {
            assert!(
                (a - b).norm() < 1e-12,
                "round trip error {}",
                (a - b).norm()
            );
        }
    }

    #[test]
    fn spread_matches_explicit_matrix_product() {
        // Oracle: naive s[i] = Σ_j x[j]·q[i][j] using materialized entries.
        let q = gen_walsh(64, 23).unwrap();
        let x = random_frame(23, 4);
        let s = spread(&x, &q).unwrap();
        for (i, got) in s.iter().enumerate() {
            let mut want = Complex64::ZERO;
            for (j, sym) in x.symbols().iter().enumerate() {
                want += sym * q.entry(i, j) as f64;
            }
            assert!((got - want).norm() < 1e-9 * want.norm().max(1.0));
        }
    }

    #[test]
    fn despread_matches_explicit_matrix_product() {
        let q = gen_walsh(32, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<Complex64> = (0..2 * 32)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let y = CMat::from_vec(2, 32, data).unwrap();
        let out = despread(&y, &q).unwrap();
        for r in 0..2 {
            for j in 0..9 {
                let mut want = Complex64::ZERO;
                for i in 0..32 {
                    want += y.get(r, i) * q.entry(i, j) as f64;
                }
                want /= 32.0;
                assert!((out.get(r, j) - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn despread_of_zero_is_zero() {
        let q = gen_walsh(16, 5).unwrap();
        let out = despread(&CMat::zeros(3, 16), &q).unwrap();
        assert!(out.as_slice().iter().all(|z| *z == Complex64::ZERO));
    }

    #[test]
    fn despread_of_rank_one_spread_recovers_scaled_frame() {
        // y = g·(x qᵀ) row-wise de-spreads to g_n·x exactly up to round-off.
        let q = gen_walsh(256, 40).unwrap();
        let x = random_frame(40, 6);
        let s = spread(&x, &q).unwrap();
        let g = [Complex64::new(0.3, -1.1), Complex64::new(-0.8, 0.2)];
        let y = CMat::outer(&g, &s);
        let out = despread(&y, &q).unwrap();
        for (r, gn) in g.iter().enumerate() {
            for (j, sym) in x.symbols().iter().enumerate() {
                assert!((out.get(r, j) - gn * sym).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spreading_preserves_energy_times_p() {
        let q = gen_walsh(1024, 132).unwrap();
        let x = random_frame(132, 7);
        let s = spread(&x, &q).unwrap();
        let es: f64 = s.iter().map(|z| z.norm_sqr()).sum();
        let ex: f64 = x.symbols().iter().map(|z| z.norm_sqr()).sum();
        assert!((es - 1024.0 * ex).abs() < 1e-6 * es);
    }

    #[test]
    fn data_leakage_variance_follows_inverse_spreading_gain() {
        // Monte-Carlo oracle for the interference term: de-spreading a
        // non-spread random QPSK block leaks per-entry variance |g_n|²/P.
        let p = 256;
        let l = 16;
        let q = gen_walsh(p, l).unwrap();
        let g = [Complex64::new(0.8, -0.6), Complex64::new(-0.25, 1.3)];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let trials = 10_000;
        let mut sums = [0.0f64; 2];
        for _ in 0..trials {
            let bits: Vec<u8> = (0..2 * p).map(|_| rng.random_range(0..=1u8)).collect();
            let d = qpsk_modulate(&bits).unwrap();
            let y = CMat::outer(&g, d.symbols());
            let leak = despread(&y, &q).unwrap();
            for (r, sum) in sums.iter_mut().enumerate() {
                *sum += leak.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        for (r, sum) in sums.iter().enumerate() {
            let var = sum / (trials * l) as f64;
            let want = g[r].norm_sqr() / p as f64;
            assert!(
                (var / want - 1.0).abs() <= 0.10,
                "row {r}: leakage variance {var}, expected {want}"
            );
        }
    }

    proptest! {
        #[test]
        fn orthogonality_holds_for_small_powers(exp in 0u32..6, seed in 0u64..100) {
            let p = 1usize << exp;
            let l = 1 + (seed as usize) % p;
            let q = gen_walsh(p, l).unwrap();
            let g = gram(&q);
            for (a, row) in g.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    prop_assert_eq!(v, if a == b { p as i64 } else { 0 });
                }
            }
        }
    }
}
