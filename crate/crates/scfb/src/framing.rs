//! Feedback frame assembly/parsing and QPSK symbol mapping.
//!
//! The feedback payload is the bit vector `[y_real | y_imag | z | k_bin]`:
//! both sign-measurement halves (+1 ↔ bit 1, −1 ↔ bit 0), optionally the
//! support indicator bits, and the sparsity count in fixed-width binary.
//! This bit order is a wire contract between the user side and the base
//! station side and must match bit-exactly.
//!
//! Bits are carried on Gray-coded unit-energy QPSK. An odd payload length is
//! padded with one trailing 0 bit before modulation; the parser works on the
//! first `bit_len` demodulated bits, discarding the pad.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::SupportVector;
use crate::error::{Error, Result};
use crate::onebit::SignMeasurements;

/// Shape of a feedback frame: measurement count, optional support segment and
/// the width of the sparsity field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    n: usize,
    m: usize,
    b: usize,
    includes_support: bool,
}

impl FrameLayout {
    /// Layout for `n` antennas and `m` measurements.
    ///
    /// The sparsity field width is the smallest `b` with `2^b ≥ n + 1`, so
    /// every count in `[0, n]` is representable.
    pub fn new(n: usize, m: usize, includes_support: bool) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid_parameter(
                "frame layout requires n ≥ 1 and m ≥ 1",
            ));
        }
        let mut b = 0;
        while (1usize << b) < n + 1 {
            b += 1;
        }
        Ok(FrameLayout {
            n,
            m,
            b,
            includes_support,
        })
    }

    /// Antenna count N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Measurement count M.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Sparsity field width B in bits.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Whether the frame carries the support indicator segment.
    pub fn includes_support(&self) -> bool {
        self.includes_support
    }

    /// Total payload length: `2M + N + B` with support, `2M + B` without.
    pub fn bit_len(&self) -> usize {
        2 * self.m + if self.includes_support { self.n } else { 0 } + self.b
    }

    /// QPSK symbol count `L = ⌈bit_len / 2⌉`.
    pub fn l(&self) -> usize {
        self.bit_len().div_ceil(2)
    }
}

/// An assembled feedback payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackFrame {
    bits: Vec<u8>,
    layout: FrameLayout,
}

impl FeedbackFrame {
    /// Payload bits, length `layout.bit_len()`.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// The layout this frame was assembled under.
    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }
}

/// A vector of unit-energy QPSK symbols.
///
/// Instances are only produced by [`qpsk_modulate`] and [`hard_decide`], so
/// every symbol is one of the four constellation points `(±1 ± i)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedFrame {
    symbols: Vec<Complex64>,
}

impl ModulatedFrame {
    /// Constellation symbols.
    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    /// Symbol count.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// True if the frame has no symbols.
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// The fields recovered from a received frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFrame {
    /// Sign measurements in the ±1 alphabet.
    pub y: SignMeasurements,
    /// Support indicator, present iff the layout includes it.
    pub z: Option<SupportVector>,
    /// Decoded sparsity count.
    pub xi: usize,
}

/// Fixed-width big-endian binary encoding of the sparsity count.
pub fn encode_sparsity(xi: usize, b: usize) -> Result<Vec<u8>> {
    if b < usize::BITS as usize && xi >> b != 0 {
        return Err(Error::invalid_parameter(format!(
            "sparsity {xi} does not fit in {b} bits"
        )));
    }
    Ok((0..b).rev().map(|k| ((xi >> k) & 1) as u8).collect())
}

/// Inverse of [`encode_sparsity`].
pub fn decode_sparsity(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

/// Maps the ±1 sign alphabet onto payload bits (+1 → 1, −1 → 0).
pub fn signs_to_bits(signs: &[f64]) -> impl Iterator<Item = u8> + '_ {
    signs.iter().map(|&s| u8::from(s > 0.0))
}

/// Inverse of [`signs_to_bits`].
pub fn bits_to_signs(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b == 1 { 1.0 } else { -1.0 })
        .collect()
}

/// Concatenates `[y_real | y_imag | z | k_bin]` into the payload bit vector.
///
/// `z` must be present exactly when the layout includes the support segment.
pub fn assemble_frame(
    y: &SignMeasurements,
    z: Option<&SupportVector>,
    xi: usize,
    layout: &FrameLayout,
) -> Result<FeedbackFrame> {
    if y.m() != layout.m() {
        return Err(Error::invalid_parameter(format!(
            "measurement count {} does not match layout m = {}",
            y.m(),
            layout.m()
        )));
    }
    if z.is_some() != layout.includes_support() {
        return Err(Error::invalid_parameter(
            "support vector presence must match the layout",
        ));
    }
    let mut bits = Vec::with_capacity(layout.bit_len());
    bits.extend(signs_to_bits(y.y_real()));
    bits.extend(signs_to_bits(y.y_imag()));
    if let Some(z) = z {
        if z.len() != layout.n() {
            return Err(Error::invalid_parameter(format!(
                "support length {} does not match layout n = {}",
                z.len(),
                layout.n()
            )));
        }
        bits.extend_from_slice(z.bits());
    }
    bits.extend(encode_sparsity(xi, layout.b())?);
    Ok(FeedbackFrame {
        bits,
        layout: *layout,
    })
}

/// Splits a payload bit vector back into its fields (inverse of
/// [`assemble_frame`]).
pub fn parse_frame(bits: &[u8], layout: &FrameLayout) -> Result<ParsedFrame> {
    if bits.len() != layout.bit_len() {
        return Err(Error::invalid_parameter(format!(
            "payload length {} does not match layout bit_len {}",
            bits.len(),
            layout.bit_len()
        )));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::invalid_parameter("payload entries must be 0 or 1"));
    }
    let m = layout.m();
    let y_real = bits_to_signs(&bits[..m]);
    let y_imag = bits_to_signs(&bits[m..2 * m]);
    let mut cursor = 2 * m;
    let z = if layout.includes_support() {
        let z = SupportVector::from_bits(bits[cursor..cursor + layout.n()].to_vec())?;
        cursor += layout.n();
        Some(z)
    } else {
        None
    };
    let xi = decode_sparsity(&bits[cursor..]);
    Ok(ParsedFrame {
        y: SignMeasurements::from_parts(y_real, y_imag)?,
        z,
        xi,
    })
}

/// The four Gray-coded constellation points, indexed by the 2-bit label
/// `(b0 << 1) | b1`. `b0` selects the real sign and `b1` the imaginary sign
/// (0 → +), so neighbouring decisions differ in one bit.
const CONSTELLATION: [Complex64; 4] = [
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),   // 00
    Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),  // 01
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),  // 10
    Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2), // 11
];

/// Maps a bit vector onto Gray-coded unit-energy QPSK symbols.
///
/// Odd-length input is padded with one trailing 0 bit; the caller strips the
/// extra demodulated bit via the frame layout.
pub fn qpsk_modulate(bits: &[u8]) -> Result<ModulatedFrame> {
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::invalid_parameter("modulator input must be 0/1 bits"));
    }
    let mut symbols = Vec::with_capacity(bits.len().div_ceil(2));
    for pair in bits.chunks(2) {
        let b0 = pair[0];
        let b1 = if pair.len() == 2 { pair[1] } else { 0 };
        symbols.push(CONSTELLATION[((b0 << 1) | b1) as usize]);
    }
    Ok(ModulatedFrame { symbols })
}

/// Replaces each symbol by the nearest constellation point.
///
/// Distance ties (a coordinate exactly on a decision boundary) are broken
/// toward the point with the smaller Gray label, i.e. toward positive real
/// and positive imaginary parts.
pub fn hard_decide(symbols: &[Complex64]) -> ModulatedFrame {
    let symbols = symbols
        .iter()
        .map(|z| {
            let b0 = u8::from(z.re < 0.0);
            let b1 = u8::from(z.im < 0.0);
            CONSTELLATION[((b0 << 1) | b1) as usize]
        })
        .collect();
    ModulatedFrame { symbols }
}

/// Recovers the bit vector from constellation symbols (exact inverse of
/// [`qpsk_modulate`]; 2 bits per symbol including any pad bit).
pub fn qpsk_demodulate(frame: &ModulatedFrame) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(2 * frame.len());
    for z in frame.symbols() {
        let label = CONSTELLATION.iter().position(|c| c == z).ok_or_else(|| {
            Error::ContractViolation(format!("{z} is not a QPSK constellation point"))
        })?;
        bits.push((label >> 1) as u8);
        bits.push((label & 1) as u8);
    }
    Ok(bits)
}
