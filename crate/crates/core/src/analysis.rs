//! Plot data, level-spacing statistics and the capacity probe.

use crate::error::{Error, Result};
use crate::model::{rabi_monic_family, ModelParams, Parity, TOL_POLE};
use crate::ops::poly_zeros_in;
use crate::spectrum::{
    classify_sign_changes, f_cf, f_schweber, solve_range, EnergyLevel, ParitySource, SolveOptions, Spectrum,
    Variable,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Which quantization function to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVariant {
    /// Parity-resolved `F(x)`.
    Parity(Parity),
    /// `F(ζ)` from the Schweber recurrence, both parities at once.
    Schweber,
}

/// `F` sampled on a uniform grid; `None` marks points skipped next to a pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSeries {
    pub params: ModelParams,
    pub variant: ScanVariant,
    pub variable: Variable,
    pub samples: Vec<(f64, Option<f64>)>,
    pub poles: Vec<f64>,
}

impl ScanSeries {
    fn unmasked_pairs(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        let pts: Vec<(f64, f64)> = self.samples.iter().filter_map(|&(t, f)| f.map(|f| (t, f))).collect();
        (1..pts.len()).map(move |i| (pts[i - 1], pts[i]))
    }

    fn pole_between(&self, a: f64, b: f64) -> bool {
        self.poles.iter().any(|&p| p > a && p < b)
    }

    /// Sign changes between consecutive unmasked samples, poles included.
    pub fn sign_changes(&self) -> usize {
        self.unmasked_pairs().filter(|(a, b)| (a.1 < 0.0) != (b.1 < 0.0)).count()
    }

    /// Sign changes with no annotated pole between the two samples.
    pub fn zero_crossings(&self) -> usize {
        self.unmasked_pairs()
            .filter(|(a, b)| (a.1 < 0.0) != (b.1 < 0.0) && !self.pole_between(a.0, b.0))
            .count()
    }

    /// Levels in the scanned window. For the parity variant this is the change
    /// of the counting function `#{poles < t} + [F(t) < 0]` across the window,
    /// which also counts zeros too close to a pole to show up on the grid.
    pub fn level_count(&self) -> usize {
        match self.variant {
            ScanVariant::Schweber => self.zero_crossings(),
            ScanVariant::Parity(_) => {
                let pts: Vec<(f64, f64)> =
                    self.samples.iter().filter_map(|&(t, f)| f.map(|f| (t, f))).collect();
                let (Some(first), Some(last)) = (pts.first(), pts.last()) else { return 0 };
                let count = |(t, f): (f64, f64)| {
                    self.poles.iter().filter(|&&p| p < t).count() + (f < 0.0) as usize
                };
                count(*last).saturating_sub(count(*first))
            }
        }
    }
}

/// Sample `F` at `samples` equally spaced points of `[lo, hi]`.
pub fn scan_f(
    params: &ModelParams,
    variant: ScanVariant,
    lo: f64,
    hi: f64,
    samples: usize,
    opts: &SolveOptions,
) -> Result<ScanSeries> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad range [{lo}, {hi}]")));
    }
    let grid: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    let near = |poles: &[f64], t: f64| poles.iter().any(|&p| (t - p).abs() < TOL_POLE);
    match variant {
        ScanVariant::Parity(parity) => {
            let rec0 = rabi_monic_family(params, parity, 0)?;
            let poles = poly_zeros_in(&rec0, opts.n_trunc, lo, hi, opts.tol)?;
            let src = ParitySource::new(*params, parity);
            let samples = grid
                .par_iter()
                .map(|&x| {
                    if near(&poles, x) {
                        return Ok((x, None));
                    }
                    Ok((x, Some(f_cf(&src, x, opts.cf_tol, opts.cf_max_terms)?.0)))
                })
                .collect::<Result<_>>()?;
            Ok(ScanSeries { params: *params, variant, variable: Variable::X, samples, poles })
        }
        ScanVariant::Schweber => {
            let f = |z: f64| match f_schweber(params, z, opts) {
                Err(Error::PoleAtInteger { .. }) => Ok(None),
                r => r.map(Some),
            };
            let raw: Vec<(f64, Option<f64>)> =
                grid.par_iter().map(|&z| Ok((z, f(z)?))).collect::<Result<_>>()?;
            // integer poles, then the poles of F between sampled points
            let mut poles: Vec<f64> = (lo.ceil().max(0.0) as i64..=hi.floor() as i64)
                .map(|m| m as f64)
                .filter(|&m| m >= lo && m <= hi)
                .collect();
            let g = |z: f64| f_schweber(params, z, opts);
            for w in raw.windows(2) {
                if let ((a, Some(fa)), (b, Some(fb))) = (w[0], w[1]) {
                    if (fa < 0.0) != (fb < 0.0) && !poles.iter().any(|&p| p > a && p < b) {
                        poles.extend(classify_sign_changes(&g, &[a, b], opts.tol, true)?.1);
                    }
                }
            }
            poles.sort_by(f64::total_cmp);
            let samples = raw.into_iter().map(|(z, v)| (z, if near(&poles, z) { None } else { v })).collect();
            Ok(ScanSeries { params: *params, variant, variable: Variable::Zeta, samples, poles })
        }
    }
}

/// Number of histogram bins on `[0, SPACING_RANGE]`.
pub const SPACING_BINS: usize = 30;
pub const SPACING_RANGE: f64 = 3.0;

/// Nearest-neighbour spacing statistics of one parity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingStats {
    /// Number of levels.
    pub count: usize,
    /// Mean raw spacing.
    pub mean: f64,
    /// Spacings divided by their mean.
    pub spacings: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub bin_width: f64,
    pub histogram: Vec<usize>,
    /// Normalized spacings beyond the histogram range.
    pub overflow: usize,
}

/// Statistics of an ascending list of levels.
pub fn spacing_stats_of(values: &[f64]) -> Result<SpacingStats> {
    if values.len() < 3 {
        return Err(Error::TooFewLevels { count: values.len() });
    }
    let raw: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let spacings: Vec<f64> = raw.iter().map(|d| d / mean).collect();
    let bin_width = SPACING_RANGE / SPACING_BINS as f64;
    let mut histogram = vec![0; SPACING_BINS];
    let mut overflow = 0;
    for &s in &spacings {
        let b = (s / bin_width).floor();
        if b >= 0.0 && (b as usize) < SPACING_BINS {
            histogram[b as usize] += 1;
        } else if s == SPACING_RANGE {
            histogram[SPACING_BINS - 1] += 1;
        } else {
            overflow += 1;
        }
    }
    Ok(SpacingStats {
        count: values.len(),
        mean,
        min: spacings.iter().copied().fold(f64::INFINITY, f64::min),
        max: spacings.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        spacings,
        bin_width,
        histogram,
        overflow,
    })
}

/// Spacing statistics of a single-parity spectrum, in `ε`.
pub fn spacing_stats(spec: &Spectrum) -> Result<SpacingStats> {
    let mut labels = spec.levels.iter().map(|l| l.parity);
    if let Some(first) = labels.next() {
        if labels.any(|p| p != first) {
            return Err(Error::InvalidArgument("spacing statistics need levels of one parity".into()));
        }
    }
    let mut values = spec.epsilons();
    values.sort_by(f64::total_cmp);
    spacing_stats_of(&values)
}

/// Published count of reliably computed levels per parity, for comparison.
pub const REFERENCE_CAPACITY: usize = 1350;
/// Levels solved per round of the capacity probe.
pub const CAPACITY_CHUNK: usize = 64;

/// Why the capacity probe stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureDiagnostics {
    pub k: usize,
    pub epsilon: Option<f64>,
    pub residual: Option<f64>,
    pub shift: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub params: ModelParams,
    pub parity: Parity,
    pub n_ceiling: usize,
    pub n_trunc: usize,
    pub levels_computed: usize,
    pub first_failure: Option<FailureDiagnostics>,
    pub elapsed_secs: f64,
    pub budget_exhausted: bool,
    pub reference: usize,
}

/// Solve levels upward in chunks until one fails its residual, stability or
/// ordering check, `n_ceiling` is reached, or `budget` runs out. At `Δ = 0`
/// every level is also compared with `l − κ²`.
pub fn capacity_probe(
    params: &ModelParams,
    parity: Parity,
    n_ceiling: usize,
    budget: Duration,
    opts: &SolveOptions,
) -> Result<CapacityReport> {
    if n_ceiling < 100 {
        return Err(Error::InvalidArgument("n_ceiling must be at least 100".into()));
    }
    let start = Instant::now();
    let n = opts.n_trunc.max(4 * n_ceiling);
    let opts = SolveOptions { check_stability: true, ..opts.clone() };
    let mut report = CapacityReport {
        params: *params,
        parity,
        n_ceiling,
        n_trunc: n,
        levels_computed: 0,
        first_failure: None,
        elapsed_secs: 0.0,
        budget_exhausted: false,
        reference: REFERENCE_CAPACITY,
    };
    let mut prev = f64::NEG_INFINITY;
    let mut k = 0;
    'outer: while k < n_ceiling {
        if start.elapsed() >= budget {
            report.budget_exhausted = true;
            break;
        }
        let hi = (k + CAPACITY_CHUNK).min(n_ceiling);
        let levels = match solve_range(params, parity, n, k, hi, &opts) {
            Ok(l) => l,
            Err(e) => {
                report.first_failure =
                    Some(FailureDiagnostics { k, epsilon: None, residual: None, shift: None, reason: e.to_string() });
                break;
            }
        };
        for level in &levels {
            if let Some(reason) = check_level(params, level, prev, &opts) {
                report.first_failure = Some(FailureDiagnostics {
                    k: level.k,
                    epsilon: Some(level.value.epsilon),
                    residual: Some(level.residual),
                    shift: Some(level.shift),
                    reason,
                });
                break 'outer;
            }
            prev = level.value.epsilon;
            report.levels_computed += 1;
        }
        k = hi;
    }
    report.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

fn check_level(params: &ModelParams, level: &EnergyLevel, prev: f64, opts: &SolveOptions) -> Option<String> {
    let e = level.value.epsilon;
    if !e.is_finite() {
        return Some("non-finite level".into());
    }
    if e <= prev {
        return Some(format!("level not above its predecessor ({e} <= {prev})"));
    }
    if !(level.residual <= opts.residual_tol) {
        return Some(format!("residual {} exceeds {}", level.residual, opts.residual_tol));
    }
    if !(level.shift < opts.stability_tol) {
        return Some(format!("shift {} under truncation doubling exceeds {}", level.shift, opts.stability_tol));
    }
    if params.delta() == 0.0 {
        let exact = crate::dho::dho_eigenvalue(level.k, params.kappa());
        if (e - exact).abs() > 1e-8 {
            return Some(format!("deviates from the closed form {exact} by {}", (e - exact).abs()));
        }
    }
    None
}
