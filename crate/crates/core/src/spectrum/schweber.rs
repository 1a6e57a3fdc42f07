use super::cf::{f_cf, SchweberSource};
use super::{EnergyLevel, SolveOptions, Spectrum, Variable};
use crate::error::{Error, Result};
use crate::model::{EnergyValue, ModelParams, TOL_POLE};
use rayon::prelude::*;

/// `F(ζ) = −f_0(ζ) + r_0(ζ)` from the Schweber recurrence.
pub fn f_schweber(params: &ModelParams, zeta: f64, opts: &SolveOptions) -> Result<f64> {
    Ok(f_cf(&SchweberSource { params: *params }, zeta, opts.cf_tol, opts.cf_max_terms)?.0)
}

/// Ratio of the geometric grading towards an integer end.
const GRADING: f64 = 1.189_207_115_002_721; // 2^(1/4)

/// Grid avoiding the non-negative integers: each unit cell is sampled separately,
/// `per_unit` points per unit length, with the cell ends pulled in. Next to an
/// integer the spacing shrinks geometrically down to `margin`, where pole–zero
/// pairs crowd together.
pub(crate) fn cell_grids(lo: f64, hi: f64, per_unit: usize, margin: f64) -> Vec<Vec<f64>> {
    let mut cells = Vec::new();
    if !(hi > lo) || per_unit == 0 {
        return cells;
    }
    let mut m = lo.floor();
    while m < hi {
        let a = if m >= 0.0 { (m + margin).max(lo) } else { m.max(lo) };
        let b = if m + 1.0 >= 0.0 { (m + 1.0 - margin).min(hi) } else { (m + 1.0).min(hi) };
        if b > a {
            let count = ((b - a) * per_unit as f64).ceil().max(1.0) as usize;
            let mut g: Vec<f64> = (0..=count).map(|j| a + (b - a) * j as f64 / count as f64).collect();
            let step = (b - a) / count as f64;
            let mut d = step / GRADING;
            while d > margin {
                if m >= 0.0 && m + d > a && m + d < b {
                    g.push(m + d);
                }
                if m + 1.0 >= 0.0 && m + 1.0 - d > a && m + 1.0 - d < b {
                    g.push(m + 1.0 - d);
                }
                d /= GRADING;
            }
            g.sort_by(f64::total_cmp);
            g.dedup();
            cells.push(g);
        }
        m += 1.0;
    }
    cells
}

/// Levels of local refinement for cells hiding a pole–zero pair.
const REFINE_DEPTH: usize = 12;
const REFINE_SPLIT: usize = 16;
/// Rounds in which cells with a sign change are split too.
const REFINE_ROOT_ROUNDS: usize = 2;

/// `F` increases between its poles, so a sample where the direction reverses
/// without a sign change flags a pole–zero pair narrower than the grid step.
/// The cells either side of such a sample are resampled until the pair shows
/// as sign changes or the cells reach rounding width. A single sign change can
/// hide a zero–pole–zero triple, so those cells get a couple of rounds as well.
pub(crate) fn refine_hidden_pairs<F>(f: &F, grid: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = grid.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let mut pts: Vec<(f64, f64)> = grid.iter().copied().zip(vals).collect();
    for round in 0..REFINE_DEPTH {
        let mut split = vec![false; pts.len()];
        if round < REFINE_ROOT_ROUNDS {
            for j in 0..pts.len().saturating_sub(1) {
                let (v0, v1) = (pts[j].1, pts[j + 1].1);
                split[j] = (v0 > 0.0) != (v1 > 0.0) && v0 != 0.0 && v1 != 0.0;
            }
        }
        for i in 1..pts.len().saturating_sub(1) {
            let (a, b, c) = (pts[i - 1].1, pts[i].1, pts[i + 1].1);
            if (b - a) * (c - b) >= 0.0 {
                continue;
            }
            for j in [i - 1, i] {
                let (t0, v0) = pts[j];
                let (t1, v1) = pts[j + 1];
                let same_sign = (v0 > 0.0) == (v1 > 0.0) && v0 != 0.0 && v1 != 0.0;
                if same_sign && t1 - t0 > 64.0 * f64::EPSILON * t0.abs().max(1.0) {
                    split[j] = true;
                }
            }
        }
        if !split.iter().any(|&s| s) {
            break;
        }
        let new: Vec<f64> = (0..pts.len())
            .filter(|&j| split[j])
            .flat_map(|j| {
                let (t0, t1) = (pts[j].0, pts[j + 1].0);
                (1..REFINE_SPLIT).map(move |m| t0 + (t1 - t0) * m as f64 / REFINE_SPLIT as f64)
            })
            .collect();
        let vals: Vec<f64> = new.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
        pts.extend(new.into_iter().zip(vals));
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        pts.dedup_by(|x, y| x.0 == y.0);
    }
    Ok(pts.into_iter().map(|p| p.0).collect())
}

/// A zero of a scanned function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GridRoot {
    pub value: f64,
    pub bracket: (f64, f64),
    pub cell: (f64, f64),
    pub residual: f64,
}

/// Sign changes of `f` along `grid`, bisected and split into zeros and poles.
/// A sign change is a pole when `|f|` grows as its bracket shrinks; with
/// `detect_poles` off every sign change is taken as a zero.
pub(crate) fn classify_sign_changes<F>(
    f: &F,
    grid: &[f64],
    tol: f64,
    detect_poles: bool,
) -> Result<(Vec<GridRoot>, Vec<f64>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = grid.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    let mut poles = Vec::new();
    for i in 1..grid.len() {
        let (fa, fb) = (vals[i - 1], vals[i]);
        let cell = (grid[i - 1], grid[i]);
        if fa == 0.0 {
            roots.push(GridRoot { value: grid[i - 1], bracket: (grid[i - 1], grid[i - 1]), cell, residual: 0.0 });
            continue;
        }
        if (fa > 0.0) == (fb > 0.0) || fb == 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut flo, mut fhi) = (grid[i - 1], grid[i], fa, fb);
        while hi - lo > tol {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid)?;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                flo = 0.0;
                fhi = 0.0;
                break;
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        let mid = lo + 0.5 * (hi - lo);
        if !detect_poles || flo.abs().max(fhi.abs()) <= 1e-3 * fa.abs().max(fb.abs()) {
            roots.push(GridRoot { value: mid, bracket: (lo, hi), cell, residual: f(mid)?.abs() });
        } else {
            poles.push(mid);
        }
    }
    Ok((roots, poles))
}

/// Zeros of the Schweber-form `F(ζ)` in `[zeta_lo, zeta_hi]`, found by dense
/// scanning and bisection.
pub fn schweber_spectrum(
    params: &ModelParams,
    zeta_lo: f64,
    zeta_hi: f64,
    samples_per_unit: usize,
    opts: &SolveOptions,
) -> Result<Spectrum> {
    if samples_per_unit < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples per unit".into()));
    }
    let f = |z: f64| f_schweber(params, z, opts);
    let mut levels = Vec::new();
    for grid in cell_grids(zeta_lo, zeta_hi, samples_per_unit, 1e3 * TOL_POLE) {
        let grid = refine_hidden_pairs(&f, &grid)?;
        for r in classify_sign_changes(&f, &grid, opts.tol, true)?.0 {
            levels.push(EnergyLevel {
                k: levels.len(),
                parity: None,
                value: EnergyValue::from_zeta(r.value, params),
                bracket: r.bracket,
                gap: r.cell,
                residual: r.residual,
                n_trunc: 0,
                stable: true,
                shift: 0.0,
            });
        }
    }
    Ok(Spectrum { params: *params, parity: None, variable: Variable::Zeta, options: opts.clone(), levels })
}
