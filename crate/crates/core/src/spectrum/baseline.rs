use super::cf::ParitySource;
use super::solve::{count_below, solve_spectrum};
use super::SolveOptions;
use crate::error::{Error, Result};
use crate::model::{rabi_monic_family, ModelParams, Parity};

/// Distance in `ε` from the baseline `l − κ²` to the nearest level of `parity`.
pub fn baseline_distance(params: &ModelParams, parity: Parity, l: usize, opts: &SolveOptions) -> Result<f64> {
    let base = l as f64 - params.kappa() * params.kappa();
    let s = solve_spectrum(params, parity, l + 3, opts)?;
    Ok(s.epsilons().iter().map(|e| (e - base).abs()).fold(f64::INFINITY, f64::min))
}

fn count_at_baseline(kappa: f64, delta: f64, parity: Parity, l: usize, opts: &SolveOptions) -> Result<usize> {
    let p = ModelParams::new(kappa, delta, 1.0)?;
    let src = ParitySource::new(p, parity);
    let rec0 = rabi_monic_family(&p, parity, 0)?;
    let x = (l as f64 - kappa * kappa) / kappa;
    count_below(&rec0, opts.n_trunc, &src, x, opts)
}

fn bisect_count(lo: f64, hi: f64, c_lo: usize, f: impl Fn(f64) -> Result<usize>) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-14 * hi.abs().max(1.0) {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Couplings in `[kappa_lo, kappa_hi]` at which both parities have a level on the
/// baseline `ε = l − κ²` at once.
///
/// Each parity's count of levels below the baseline is tracked over a `samples`
/// grid; cells where both counts jump are bisected separately, and coinciding
/// jumps that pass the distance check are reported. Grid points already within
/// `tol` for both parities (every point when `Δ = 0`) are reported as well.
pub fn detect_baseline_crossings(
    kappa_lo: f64,
    kappa_hi: f64,
    samples: usize,
    delta: f64,
    l: usize,
    tol: f64,
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    if l == 0 || !(kappa_lo > 0.0 && kappa_hi >= kappa_lo) || samples < 2 {
        return Err(Error::InvalidArgument("need l >= 1, 0 < kappa_lo <= kappa_hi and samples >= 2".into()));
    }
    let grid: Vec<f64> =
        (0..samples).map(|i| kappa_lo + (kappa_hi - kappa_lo) * i as f64 / (samples - 1) as f64).collect();
    let on_baseline = |k: f64| -> Result<bool> {
        let p = ModelParams::new(k, delta, 1.0)?;
        Ok(baseline_distance(&p, Parity::Plus, l, opts)? < tol && baseline_distance(&p, Parity::Minus, l, opts)? < tol)
    };
    let mut found = Vec::new();
    let mut counts = Vec::with_capacity(samples);
    for &k in &grid {
        if on_baseline(k)? {
            found.push(k);
        }
        counts.push((
            count_at_baseline(k, delta, Parity::Plus, l, opts)?,
            count_at_baseline(k, delta, Parity::Minus, l, opts)?,
        ));
    }
    for i in 1..samples {
        let (p0, m0) = counts[i - 1];
        let (p1, m1) = counts[i];
        if p0 == p1 || m0 == m1 {
            continue;
        }
        let kp = bisect_count(grid[i - 1], grid[i], p0, |k| count_at_baseline(k, delta, Parity::Plus, l, opts))?;
        let km = bisect_count(grid[i - 1], grid[i], m0, |k| count_at_baseline(k, delta, Parity::Minus, l, opts))?;
        let k = 0.5 * (kp + km);
        if (kp - km).abs() < 1e-8 * k && on_baseline(k)? {
            found.push(k);
        }
    }
    found.sort_by(f64::total_cmp);
    found.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(found)
}
