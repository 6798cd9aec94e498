//! Monte-Carlo sweep engine: grid enumeration, per-trial seed derivation,
//! metric aggregation and CSV emission.
//!
//! A sweep runs `trials` independent trials at every grid point
//! (scheme × SNR × ρ × c) and aggregates them into one record per point.
//! Each trial's seeds are a pure hash of (master seed, scheme, point index,
//! trial index), so the full sweep, any single point, or any single trial
//! can be reproduced in isolation, and the aggregate is independent of the
//! order in which trials actually execute. Trials within a point run in
//! parallel; aggregation always happens in trial order.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mat::norm_sq;
use crate::schemes::{run_trial, Scheme, SchemeConfig, TrialOutcome, TrialSeeds};

/// Exact column list of the CSV contract.
pub const CSV_HEADER: &str = "scheme,snr_db,rho,c,n,p,sparsity,trials,seed,ber,nmse,\
mean_iterations,bit_overhead,extra_bandwidth_ratio";

/// Bit error ratio between two equal-length bit streams.
pub fn ber(true_bits: &[u8], est_bits: &[u8]) -> Result<f64> {
    if true_bits.len() != est_bits.len() {
        return Err(Error::invalid_parameter(format!(
            "bit stream lengths differ: {} vs {}",
            true_bits.len(),
            est_bits.len()
        )));
    }
    if true_bits.is_empty() {
        return Err(Error::invalid_parameter(
            "bit error ratio of empty streams is undefined",
        ));
    }
    let errors = true_bits
        .iter()
        .zip(est_bits)
        .filter(|(a, b)| a != b)
        .count();
    Ok(errors as f64 / true_bits.len() as f64)
}

/// Squared error between the unit-normalized truth and the estimate:
/// `‖h/‖h‖₂ − ĥ‖₂²`.
///
/// The reconstruction returns a unit-norm direction, so the truth is brought
/// to unit norm before comparison.
pub fn nmse(h_true: &[Complex64], h_hat: &[Complex64]) -> Result<f64> {
    if h_true.len() != h_hat.len() {
        return Err(Error::invalid_parameter(format!(
            "vector lengths differ: {} vs {}",
            h_true.len(),
            h_hat.len()
        )));
    }
    let scale = norm_sq(h_true).sqrt();
    if scale == 0.0 {
        return Err(Error::invalid_parameter(
            "cannot normalize an all-zero reference channel",
        ));
    }
    Ok(h_true
        .iter()
        .zip(h_hat)
        .map(|(t, e)| (t / scale - e).norm_sqr())
        .sum())
}

/// 64-bit finalizer used for all seed mixing (the splitmix64 output
/// function). Bijective, so distinct inputs never collide.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn scheme_id(scheme: Scheme) -> u64 {
    match scheme {
        Scheme::PropSca => 1,
        Scheme::PropBiht => 2,
        Scheme::Tdm => 3,
    }
}

/// Derives the four stream seeds of one trial from the master seed, the
/// scheme, the grid-point index and the trial index.
///
/// The mixing function is fixed: the inputs are folded one at a time through
/// the splitmix64 finalizer, and the four streams are finalized from the
/// result with distinct tweaks. Changing any input changes all four streams.
pub fn derive_seeds(master: u64, scheme: Scheme, point: usize, trial: usize) -> TrialSeeds {
    let mut base = mix(master);
    base = mix(base ^ scheme_id(scheme));
    base = mix(base ^ point as u64);
    base = mix(base ^ trial as u64);
    TrialSeeds::new(mix(base ^ 1), mix(base ^ 2), mix(base ^ 3), mix(base ^ 4))
}

/// Full description of a Monte-Carlo sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    schemes: Vec<Scheme>,
    snr_db: Vec<f64>,
    rho: Vec<f64>,
    c: Vec<f64>,
    trials: usize,
    master_seed: u64,
    n: usize,
    p: usize,
    xi: usize,
    itermax: usize,
    normalize_spread: bool,
    normalize_uplink: bool,
    out: Option<PathBuf>,
}

impl SweepSpec {
    /// Creates a sweep over the cartesian grid scheme × SNR × ρ × c with the
    /// standard dimensions (N=64, P=1024, ξ=8, 100 iterations) and no output
    /// file.
    pub fn new(
        schemes: Vec<Scheme>,
        snr_db: Vec<f64>,
        rho: Vec<f64>,
        c: Vec<f64>,
        trials: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if schemes.is_empty() || snr_db.is_empty() || rho.is_empty() || c.is_empty() {
            return Err(Error::invalid_parameter(
                "scheme, SNR, rho and c lists must all be non-empty",
            ));
        }
        if trials == 0 {
            return Err(Error::invalid_parameter("trial count must be at least 1"));
        }
        Ok(Self {
            schemes,
            snr_db,
            rho,
            c,
            trials,
            master_seed,
            n: 64,
            p: 1024,
            xi: 8,
            itermax: 100,
            normalize_spread: false,
            normalize_uplink: true,
            out: None,
        })
    }

    /// Copy with different dimensions.
    pub fn with_dimensions(mut self, n: usize, p: usize, xi: usize) -> Self {
        self.n = n;
        self.p = p;
        self.xi = xi;
        self
    }

    /// Copy with a different iteration budget.
    pub fn with_itermax(mut self, itermax: usize) -> Self {
        self.itermax = itermax;
        self
    }

    /// Copy with per-chip spread power normalization on or off.
    pub fn with_normalize_spread(mut self, normalize_spread: bool) -> Self {
        self.normalize_spread = normalize_spread;
        self
    }

    /// Copy with the unit-norm uplink convention on or off.
    pub fn with_normalize_uplink(mut self, normalize_uplink: bool) -> Self {
        self.normalize_uplink = normalize_uplink;
        self
    }

    /// Copy that streams records to a CSV file as points complete. Rows
    /// written before an I/O failure remain on disk.
    pub fn with_output(mut self, path: impl Into<PathBuf>) -> Self {
        self.out = Some(path.into());
        self
    }

    /// Number of trials per grid point.
    pub fn trials(&self) -> usize {
        self.trials
    }

    /// Master seed of the sweep.
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
}

/// One aggregated result row.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    /// Scheme this point belongs to.
    pub scheme: Scheme,
    /// Operating SNR in dB.
    pub snr_db: f64,
    /// Feedback power fraction of the grid point (recorded as given, even
    /// where the baseline ignores it).
    pub rho: f64,
    /// Sampling rate c.
    pub c: f64,
    /// Antenna count N.
    pub n: usize,
    /// Data length P.
    pub p: usize,
    /// Channel sparsity ξ.
    pub sparsity: usize,
    /// Trials aggregated into this row.
    pub trials: usize,
    /// Master seed of the sweep that produced the row.
    pub seed: u64,
    /// Mean bit error ratio (total errors over total bits).
    pub ber: f64,
    /// Mean reconstruction error.
    pub nmse: f64,
    /// Mean reconstruction iterations per trial.
    pub mean_iterations: f64,
    /// Feedback bits per channel realization.
    pub bit_overhead: usize,
    /// Extra uplink channel uses as a fraction of P.
    pub extra_bandwidth_ratio: f64,
}

struct GridPoint {
    template: SchemeConfig,
}

fn enumerate_grid(spec: &SweepSpec) -> Result<Vec<GridPoint>> {
    let mut points = Vec::new();
    for &scheme in &spec.schemes {
        for &snr_db in &spec.snr_db {
            for &rho in &spec.rho {
                for &c in &spec.c {
                    let template =
                        SchemeConfig::new(scheme, snr_db, rho, c, TrialSeeds::new(0, 0, 0, 0))?
                            .with_dimensions(spec.n, spec.p, spec.xi)?
                            .with_itermax(spec.itermax)?
                            .with_normalize_spread(spec.normalize_spread)
                            .with_normalize_uplink(spec.normalize_uplink);
                    points.push(GridPoint { template });
                }
            }
        }
    }
    Ok(points)
}

fn aggregate(spec: &SweepSpec, point: &GridPoint, outcomes: &[TrialOutcome]) -> Result<SimRecord> {
    let cfg = &point.template;
    let total_errors: u64 = outcomes.iter().map(TrialOutcome::bit_errors).sum();
    let total_bits: u64 = outcomes.iter().map(TrialOutcome::bits_total).sum();
    let ber = total_errors as f64 / total_bits as f64;
    // All trials send the same number of bits, so the ratio of totals equals
    // the mean of the per-trial ratios up to rounding.
    debug_assert!({
        let mean_of_ratios =
            outcomes.iter().map(TrialOutcome::ber).sum::<f64>() / outcomes.len() as f64;
        (ber - mean_of_ratios).abs() < 1e-12
    });
    let nmse = outcomes.iter().map(TrialOutcome::nmse_value).sum::<f64>() / outcomes.len() as f64;
    let mean_iterations = outcomes
        .iter()
        .map(|o| o.iterations_used() as f64)
        .sum::<f64>()
        / outcomes.len() as f64;
    Ok(SimRecord {
        scheme: cfg.scheme(),
        snr_db: cfg.snr_db(),
        rho: cfg.rho(),
        c: cfg.c(),
        n: cfg.n(),
        p: cfg.p(),
        sparsity: cfg.xi(),
        trials: spec.trials,
        seed: spec.master_seed,
        ber,
        nmse,
        mean_iterations,
        bit_overhead: cfg.bit_overhead()?,
        extra_bandwidth_ratio: cfg.extra_bandwidth_ratio(),
    })
}

/// Runs the full sweep and returns one record per grid point, in grid order
/// (scheme-major, then SNR, ρ, c).
///
/// Trials within a point execute in parallel; every per-trial seed is
/// derived from (master seed, scheme, point index, trial index), and
/// aggregation runs in trial order, so the records — and any streamed CSV —
/// are identical run to run regardless of thread scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SimRecord>> {
    let points = enumerate_grid(spec)?;
    let mut writer = match &spec.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{CSV_HEADER}")?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut records = Vec::with_capacity(points.len());
    for (idx, point) in points.iter().enumerate() {
        let outcomes: Result<Vec<TrialOutcome>> = (0..spec.trials)
            .into_par_iter()
            .map(|trial| {
                let seeds = derive_seeds(spec.master_seed, point.template.scheme(), idx, trial);
                run_trial(&point.template.with_seeds(seeds))
            })
            .collect();
        let record = aggregate(spec, point, &outcomes?)?;
        if let Some(w) = writer.as_mut() {
            write_record(w, &record)?;
            w.flush()?;
        }
        records.push(record);
    }
    Ok(records)
}

/// Fixed-precision float formatting for CSV cells (7 significant digits).
fn fmt_float(v: f64) -> String {
    format!("{v:.6e}")
}

fn write_record<W: Write>(w: &mut W, r: &SimRecord) -> std::io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.scheme.label(),
        fmt_float(r.snr_db),
        fmt_float(r.rho),
        fmt_float(r.c),
        r.n,
        r.p,
        r.sparsity,
        r.trials,
        r.seed,
        fmt_float(r.ber),
        fmt_float(r.nmse),
        fmt_float(r.mean_iterations),
        r.bit_overhead,
        fmt_float(r.extra_bandwidth_ratio),
    )
}

/// Renders records to a CSV string with the same layout as [`write_csv`].
pub fn render_csv(records: &[SimRecord]) -> String {
    let mut out = Vec::new();
    writeln!(out, "{CSV_HEADER}").expect("infallible write to Vec");
    for r in records {
        write_record(&mut out, r).expect("infallible write to Vec");
    }
    String::from_utf8(out).expect("CSV content is ASCII")
}

/// Writes records as CSV: the exact header line, then one row per record.
/// UTF-8, LF line endings, floats with 7 significant digits.
pub fn write_csv(records: &[SimRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        write_record(&mut w, r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use std::fs;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ber_counts_mismatches() {
        assert_eq!(ber(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap(), 0.0);
        assert_eq!(ber(&[0, 1, 0], &[1, 0, 1]).unwrap(), 1.0);
        let mut est = vec![0u8; 1000];
        est[10] = 1;
        est[500] = 1;
        est[999] = 1;
        assert_eq!(ber(&vec![0u8; 1000], &est).unwrap(), 0.003);
    }

    #[test]
    fn ber_rejects_bad_inputs() {
        assert!(ber(&[0, 1], &[0]).is_err());
        assert!(ber(&[], &[]).is_err());
    }

    #[test]
    fn nmse_reference_cases() {
        let h = vec![c(3.0, 0.0), c(0.0, -4.0)];
        let unit: Vec<Complex64> = h.iter().map(|v| v / 5.0).collect();
        assert_eq!(nmse(&h, &unit).unwrap(), 0.0);
        let anti: Vec<Complex64> = unit.iter().map(|v| -v).collect();
        assert!((nmse(&h, &anti).unwrap() - 4.0).abs() < 1e-12);
        let e0 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let e1 = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(nmse(&e0, &e1).unwrap(), 2.0);
    }

    #[test]
    fn nmse_rejects_bad_inputs() {
        assert!(nmse(&[c(1.0, 0.0)], &[]).is_err());
        assert!(nmse(&[c(0.0, 0.0)], &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn seed_derivation_is_pure_and_sensitive_to_every_input() {
        let a = derive_seeds(1, Scheme::PropSca, 0, 0);
        assert_eq!(a, derive_seeds(1, Scheme::PropSca, 0, 0));
        let mut all = HashSet::new();
        for (master, scheme, point, trial) in [
            (1u64, Scheme::PropSca, 0usize, 0usize),
            (2, Scheme::PropSca, 0, 0),
            (1, Scheme::PropBiht, 0, 0),
            (1, Scheme::Tdm, 0, 0),
            (1, Scheme::PropSca, 1, 0),
            (1, Scheme::PropSca, 0, 1),
        ] {
            let s = derive_seeds(master, scheme, point, trial);
            // The four streams of one trial must be pairwise distinct too.
            all.insert(s.channel());
            all.insert(s.matrix());
            all.insert(s.noise());
            all.insert(s.data());
        }
        assert_eq!(all.len(), 24, "stream seeds collided");
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(vec![], vec![0.0], vec![0.2], vec![2.0], 1, 1).is_err());
        assert!(SweepSpec::new(vec![Scheme::Tdm], vec![], vec![0.2], vec![2.0], 1, 1).is_err());
        assert!(SweepSpec::new(vec![Scheme::Tdm], vec![0.0], vec![], vec![2.0], 1, 1).is_err());
        assert!(SweepSpec::new(vec![Scheme::Tdm], vec![0.0], vec![0.2], vec![], 1, 1).is_err());
        assert!(SweepSpec::new(vec![Scheme::Tdm], vec![0.0], vec![0.2], vec![2.0], 0, 1).is_err());
        // Invalid grid points surface before any trial runs.
        let bad = SweepSpec::new(
            vec![Scheme::PropSca],
            vec![10.0],
            vec![0.0],
            vec![2.0],
            1,
            1,
        )
        .unwrap();
        assert!(run_sweep(&bad).is_err());
    }

    fn small_spec(trials: usize) -> SweepSpec {
        SweepSpec::new(
            vec![Scheme::PropSca, Scheme::Tdm],
            vec![10.0],
            vec![0.2],
            vec![1.5],
            trials,
            42,
        )
        .unwrap()
        .with_dimensions(16, 256, 2)
        .with_itermax(50)
    }

    #[test]
    fn single_trial_record_equals_the_trial_outcome() {
        let spec = small_spec(1);
        let records = run_sweep(&spec).unwrap();
        assert_eq!(records.len(), 2);
        let seeds = derive_seeds(42, Scheme::PropSca, 0, 0);
        let cfg = SchemeConfig::new(Scheme::PropSca, 10.0, 0.2, 1.5, seeds)
            .unwrap()
            .with_dimensions(16, 256, 2)
            .unwrap()
            .with_itermax(50)
            .unwrap();
        let outcome = run_trial(&cfg).unwrap();
        assert_eq!(records[0].ber, outcome.ber());
        assert_eq!(records[0].nmse, outcome.nmse_value());
        assert_eq!(records[0].mean_iterations, outcome.iterations_used() as f64);
        assert_eq!(records[0].trials, 1);
        assert_eq!(records[0].seed, 42);
    }

    #[test]
    fn sweep_reruns_are_identical_including_the_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path_a = dir.path().join("a.csv");
        let path_b = dir.path().join("b.csv");
        let spec = small_spec(4);
        let ra = run_sweep(&spec.clone().with_output(&path_a)).unwrap();
        let rb = run_sweep(&spec.with_output(&path_b)).unwrap();
        assert_eq!(ra, rb);
        let bytes_a = fs::read(&path_a).unwrap();
        let bytes_b = fs::read(&path_b).unwrap();
        assert!(!bytes_a.is_empty());
        assert_eq!(bytes_a, bytes_b);
    }

    #[test]
    fn aggregation_is_independent_of_trial_order() {
        // Recompute the first record with trials evaluated in reverse order
        // and aggregated by index; the record must not change.
        let spec = small_spec(5);
        let records = run_sweep(&spec).unwrap();
        let template =
            SchemeConfig::new(Scheme::PropSca, 10.0, 0.2, 1.5, TrialSeeds::new(0, 0, 0, 0))
                .unwrap()
                .with_dimensions(16, 256, 2)
                .unwrap()
                .with_itermax(50)
                .unwrap();
        let mut outcomes: Vec<Option<TrialOutcome>> = vec![None; 5];
        for trial in (0..5).rev() {
            let seeds = derive_seeds(42, Scheme::PropSca, 0, trial);
            outcomes[trial] = Some(run_trial(&template.with_seeds(seeds)).unwrap());
        }
        let outcomes: Vec<TrialOutcome> = outcomes.into_iter().map(Option::unwrap).collect();
        let total_errors: u64 = outcomes.iter().map(TrialOutcome::bit_errors).sum();
        let total_bits: u64 = outcomes.iter().map(TrialOutcome::bits_total).sum();
        assert_eq!(records[0].ber, total_errors as f64 / total_bits as f64);
        let nmse_mean =
            outcomes.iter().map(TrialOutcome::nmse_value).sum::<f64>() / outcomes.len() as f64;
        assert_eq!(records[0].nmse, nmse_mean);
    }

    #[test]
    fn csv_layout_follows_the_contract() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_csv(&[], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        assert!(!text.contains('\r'));

        let record = SimRecord {
            scheme: Scheme::Tdm,
            snr_db: 4.0,
            rho: 0.2,
            c: 2.0,
            n: 64,
            p: 1024,
            sparsity: 8,
            trials: 2000,
            seed: 7,
            ber: 0.0123456789,
            nmse: 0.25,
            mean_iterations: 100.0,
            bit_overhead: 256,
            extra_bandwidth_ratio: 0.125,
        };
        write_csv(&[record], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("tdm,4.000000e0,2.000000e-1,2.000000e0,64,1024,8,2000,7,"));
        assert!(lines[1].contains("1.234568e-2"));
        assert!(lines[1].ends_with(",256,1.250000e-1"));
    }

    #[test]
    fn csv_round_trips_to_six_significant_digits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        let spec = small_spec(2);
        let records = run_sweep(&spec).unwrap();
        write_csv(&records, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let parsed: Vec<Vec<String>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_owned).collect())
            .collect();
        assert_eq!(parsed.len(), records.len());
        for (row, rec) in parsed.iter().zip(&records) {
            assert_eq!(row[0], rec.scheme.label());
            let close = |cell: &str, v: f64| {
                let got: f64 = cell.parse().unwrap();
                (got - v).abs() <= 1e-6 * v.abs().max(1.0)
            };
            assert!(close(&row[1], rec.snr_db));
            assert!(close(&row[2], rec.rho));
            assert!(close(&row[3], rec.c));
            assert_eq!(row[4].parse::<usize>().unwrap(), rec.n);
            assert_eq!(row[5].parse::<usize>().unwrap(), rec.p);
            assert_eq!(row[6].parse::<usize>().unwrap(), rec.sparsity);
            assert_eq!(row[7].parse::<usize>().unwrap(), rec.trials);
            assert_eq!(row[8].parse::<u64>().unwrap(), rec.seed);
            assert!(close(&row[9], rec.ber));
            assert!(close(&row[10], rec.nmse));
            assert!(close(&row[11], rec.mean_iterations));
            assert_eq!(row[12].parse::<usize>().unwrap(), rec.bit_overhead);
            assert!(close(&row[13], rec.extra_bandwidth_ratio));
        }
    }

    #[test]
    fn grid_order_is_scheme_major() {
        let spec = SweepSpec::new(
            vec![Scheme::PropBiht, Scheme::Tdm],
            vec![0.0, 10.0],
            vec![0.2],
            vec![2.0],
            1,
            9,
        )
        .unwrap()
        .with_dimensions(8, 64, 1)
        .with_itermax(5);
        let records = run_sweep(&spec).unwrap();
        let labels: Vec<(&str, f64)> = records
            .iter()
            .map(|r| (r.scheme.label(), r.snr_db))
            .collect();
        assert_eq!(
            labels,
            vec![
                ("prop_biht", 0.0),
                ("prop_biht", 10.0),
                ("tdm", 0.0),
                ("tdm", 10.0),
            ]
        );
    }
}
