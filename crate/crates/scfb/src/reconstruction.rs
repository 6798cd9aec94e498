//! One-bit compressed-sensing recovery.
//!
//! Both solvers are variants of binary iterative hard thresholding. Starting
//! from a zero iterate, each iteration moves along the sign-mismatch gradient
//! and re-imposes sparsity by keeping the `ξ` largest-magnitude entries:
//!
//! ```text
//! r ← η_ξ( r + τ·(ỹ − sgn(r·Φ))·Φᵀ )
//! ```
//!
//! The real and imaginary parts of the channel run through this update
//! independently against their own sign vectors. The support-aided variant
//! additionally zeroes every iterate entry outside the fed-back support after
//! each update (skipping the correction when the iterate and the support do
//! not overlap at all). At exit the two parts are combined into one complex
//! vector and normalized to unit norm — one-bit measurements carry no
//! amplitude, so only the direction is ever recovered.
//!
//! Every dense matrix product is tallied in a multiply counter so that the
//! per-iteration `Θ(M·N)` work claim can be checked by measurement rather
//! than by inspection, and an optional early-stopping rule (sign consistency
//! plus support stability) exists purely to measure how many iterations each
//! solver needs before its decisions settle.

use num_complex::Complex64;

use crate::channel::SupportVector;
use crate::error::{Error, Result};
use crate::mat::norm_sq;
use crate::onebit::{sign_vec, MeasurementMatrix, SignMeasurements};

/// Iteration controls shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    itermax: usize,
    step_size: f64,
    early_stop: bool,
}

impl ReconstructionConfig {
    /// Creates a configuration; `itermax` must be at least 1 and the step
    /// size positive and finite.
    pub fn new(itermax: usize, step_size: f64, early_stop: bool) -> Result<Self> {
        if itermax == 0 {
            return Err(Error::invalid_parameter("itermax must be at least 1"));
        }
        if !step_size.is_finite() || step_size <= 0.0 {
            return Err(Error::invalid_parameter(format!(
                "step size must be positive and finite, got {step_size}"
            )));
        }
        Ok(Self {
            itermax,
            step_size,
            early_stop,
        })
    }

    /// Maximum number of iterations.
    pub fn itermax(&self) -> usize {
        self.itermax
    }

    /// Gradient step size τ.
    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    /// Whether the sign-consistency/support-stability stopping rule is
    /// active.
    pub fn early_stop(&self) -> bool {
        self.early_stop
    }

    /// Copy of `self` with the early-stopping rule switched on or off.
    pub fn with_early_stop(mut self, early_stop: bool) -> Self {
        self.early_stop = early_stop;
        self
    }
}

impl Default for ReconstructionConfig {
    /// 100 iterations, unit step, no early stopping. Normalization absorbs
    /// overall scale, so τ=1 is as good a default as any.
    fn default() -> Self {
        Self {
            itermax: 100,
            step_size: 1.0,
            early_stop: false,
        }
    }
}

/// Output of a reconstruction run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    h_hat: Vec<Complex64>,
    iterations_used: usize,
    sign_consistent: bool,
    multiplies: u64,
}

impl ReconstructionResult {
    /// Unit-norm channel direction estimate, or all zeros for the flagged
    /// degenerate exit.
    pub fn h_hat(&self) -> &[Complex64] {
        &self.h_hat
    }

    /// Number of iterations executed (equals `itermax` unless early stopping
    /// fired sooner).
    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// Whether `sgn(r·Φ)` matched ỹ for both parts at exit. Always `false`
    /// when the exit vector was exactly zero.
    pub fn sign_consistent(&self) -> bool {
        self.sign_consistent
    }

    /// Total scalar multiplications spent in dense matrix products.
    pub fn multiplies(&self) -> u64 {
        self.multiplies
    }
}

/// Keeps the `k` entries of largest magnitude and zeroes the rest.
/// Magnitude ties are broken toward the lower index.
pub fn threshold_best_k(v: &[f64], k: usize) -> Result<Vec<f64>> {
    if k > v.len() {
        return Err(Error::invalid_parameter(format!(
            "cannot keep {k} entries of a length-{} vector",
            v.len()
        )));
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    let mut out = vec![0.0; v.len()];
    for &i in &order[..k] {
        out[i] = v[i];
    }
    Ok(out)
}

/// Plain two-part iterative hard thresholding on the sign measurements.
pub fn biht(
    y: &SignMeasurements,
    phi: &MeasurementMatrix,
    xi: usize,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    run(y, phi, xi, None, cfg)
}

/// Support-aided variant: after every update, iterate entries outside the
/// fed-back support `z` are zeroed — unless the iterate support and `z` are
/// disjoint, in which case the correction is skipped for that iteration.
pub fn sca_biht(
    y: &SignMeasurements,
    phi: &MeasurementMatrix,
    xi: usize,
    z: &SupportVector,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    if z.len() != phi.n() {
        return Err(Error::invalid_parameter(format!(
            "support vector length {} does not match signal dimension {}",
            z.len(),
            phi.n()
        )));
    }
    run(y, phi, xi, Some(z), cfg)
}

/// Per-trial iteration statistics extracted from early-stopped runs.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    per_trial: Vec<usize>,
    never_consistent: usize,
    median: f64,
}

impl IterationStats {
    /// Iterations-to-consistency per trial, in input order. Trials that never
    /// reached consistency contribute `itermax`.
    pub fn per_trial(&self) -> &[usize] {
        &self.per_trial
    }

    /// Number of trials that exhausted `itermax` without reaching sign
    /// consistency.
    pub fn never_consistent(&self) -> usize {
        self.never_consistent
    }

    /// Median of the per-trial statistics (`NaN` for an empty input).
    pub fn median(&self) -> f64 {
        self.median
    }
}

/// Summarizes iterations-to-consistency over a batch of results from runs
/// with early stopping enabled.
///
/// Each trial contributes the iteration count at which the stopping rule
/// fired; a trial that ran the full `itermax` without reaching sign
/// consistency contributes `itermax` and is counted as never-consistent.
pub fn count_iterations_to_consistency(
    results: &[ReconstructionResult],
    itermax: usize,
) -> IterationStats {
    let per_trial: Vec<usize> = results.iter().map(|r| r.iterations_used()).collect();
    let never_consistent = results
        .iter()
        .filter(|r| !r.sign_consistent() && r.iterations_used() == itermax)
        .count();
    let mut sorted = per_trial.clone();
    sorted.sort_unstable();
    let median = if sorted.is_empty() {
        f64::NAN
    } else if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2] as f64
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) as f64 / 2.0
    };
    IterationStats {
        per_trial,
        never_consistent,
        median,
    }
}

/// `r·Φ` for a length-N row vector: one dense pass, N·M multiplies.
fn project(r: &[f64], phi: &MeasurementMatrix, multiplies: &mut u64) -> Vec<f64> {
    let mut out = vec![0.0; phi.m()];
    for (i, &ri) in r.iter().enumerate() {
        for (o, &p) in out.iter_mut().zip(phi.row(i)) {
            *o += ri * p;
        }
    }
    *multiplies += (phi.n() * phi.m()) as u64;
    out
}

/// `e·Φᵀ` for a length-M row vector: one dense pass, N·M multiplies.
fn back_project(e: &[f64], phi: &MeasurementMatrix, multiplies: &mut u64) -> Vec<f64> {
    let out = (0..phi.n())
        .map(|i| phi.row(i).iter().zip(e).map(|(&p, &ej)| p * ej).sum())
        .collect();
    *multiplies += (phi.n() * phi.m()) as u64;
    out
}

/// Whether `sgn(r·Φ)` equals the measured sign vector. Costs N·M multiplies.
fn signs_match(r: &[f64], y_part: &[f64], phi: &MeasurementMatrix, multiplies: &mut u64) -> bool {
    let proj = project(r, phi, multiplies);
    sign_vec(&proj) == y_part
}

/// Zeroes both parts outside the support mask, unless the current union
/// support and the mask are disjoint (then the iterate is left untouched).
fn apply_support_mask(r_re: &mut [f64], r_im: &mut [f64], z: &SupportVector) {
    let overlaps = (0..z.len()).any(|i| (r_re[i] != 0.0 || r_im[i] != 0.0) && z.is_set(i));
    if !overlaps {
        return;
    }
    for i in 0..z.len() {
        if !z.is_set(i) {
            r_re[i] = 0.0;
            r_im[i] = 0.0;
        }
    }
}

fn run(
    y: &SignMeasurements,
    phi: &MeasurementMatrix,
    xi: usize,
    mask: Option<&SupportVector>,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    if xi == 0 {
        return Err(Error::invalid_parameter(
            "sparsity level must be at least 1",
        ));
    }
    if y.m() != phi.m() {
        return Err(Error::invalid_parameter(format!(
            "{} sign measurements for a matrix with {} measurement columns",
            y.m(),
            phi.m()
        )));
    }
    let n = phi.n();
    let mut multiplies = 0u64;
    let mut r_re = vec![0.0; n];
    let mut r_im = vec![0.0; n];
    // Union support of the previous iterate; r⁰ = 0 has an empty support.
    let mut prev_support = vec![false; n];
    let mut iterations_used = cfg.itermax;
    let mut consistent_at_exit = false;

    for t in 1..=cfg.itermax {
        for (r, y_part) in [(&mut r_re, y.y_real()), (&mut r_im, y.y_imag())] {
            let proj = project(r, phi, &mut multiplies);
            let signs = sign_vec(&proj);
            let residual: Vec<f64> = y_part.iter().zip(&signs).map(|(a, b)| a - b).collect();
            let grad = back_project(&residual, phi, &mut multiplies);
            for (ri, gi) in r.iter_mut().zip(&grad) {
                *ri += cfg.step_size * gi;
            }
            *r = threshold_best_k(r, xi)?;
        }
        if let Some(z) = mask {
            apply_support_mask(&mut r_re, &mut r_im, z);
        }
        if cfg.early_stop {
            let support: Vec<bool> = r_re
                .iter()
                .zip(&r_im)
                .map(|(&a, &b)| a != 0.0 || b != 0.0)
                .collect();
            let stable = support == prev_support;
            // Both checks run unconditionally so the multiply count per
            // early-stopped iteration is a fixed 6·N·M.
            let re_ok = signs_match(&r_re, y.y_real(), phi, &mut multiplies);
            let im_ok = signs_match(&r_im, y.y_imag(), phi, &mut multiplies);
            prev_support = support;
            consistent_at_exit = re_ok && im_ok;
            if stable && consistent_at_exit {
                iterations_used = t;
                break;
            }
        }
    }

    if !cfg.early_stop {
        // One final check so the consistency flag is meaningful without the
        // stopping rule.
        let re_ok = signs_match(&r_re, y.y_real(), phi, &mut multiplies);
        let im_ok = signs_match(&r_im, y.y_imag(), phi, &mut multiplies);
        consistent_at_exit = re_ok && im_ok;
    }

    let mut h_hat: Vec<Complex64> = r_re
        .iter()
        .zip(&r_im)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    let norm = norm_sq(&h_hat).sqrt();
    let sign_consistent = if norm == 0.0 {
        // Normalizing an exact zero is undefined; report flagged zeros.
        false
    } else {
        for v in &mut h_hat {
            *v /= norm;
        }
        consistent_at_exit
    };
    Ok(ReconstructionResult {
        h_hat,
        iterations_used,
        sign_consistent,
        multiplies,
    })
}
