//! Braak's `G±(ζ)` functions, used as an independent route to the spectrum.
//!
//! `K_n` is generated upward from `K_0 = 1`, `K_1 = f_0(ζ)`. Upward recursion
//! follows the dominant solution on purpose; the series
//! `G±(ζ) = Σ K_n κⁿ [1 ∓ Δ/(ζ − n)]` converges geometrically regardless.

use crate::error::{Error, Result};
use crate::model::{schweber_coeffs, schweber_f, EnergyValue, ModelParams, Parity, TOL_POLE};
use crate::scaled::ScaledValue;
use crate::spectrum::CF_QUIET_TERMS;
use crate::spectrum::{cell_grids, classify_sign_changes, EnergyLevel, SolveOptions, Spectrum, Variable};
use rayon::prelude::*;

/// Default term budget for one `G±` evaluation.
pub const BRAAK_MAX_TERMS: usize = 100_000;
/// Default scan density, points per unit `ζ`.
pub const BRAAK_SAMPLES_PER_UNIT: usize = 256;

/// Running state of the `G±` series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraakSeriesState {
    pub k_prev: ScaledValue,
    pub k_curr: ScaledValue,
    /// Index of `k_curr`.
    pub n: usize,
    /// `κⁿ`.
    pub kappa_pow: ScaledValue,
    pub g_plus: f64,
    pub g_minus: f64,
}

impl BraakSeriesState {
    /// State after the `n = 0` term.
    pub fn start(params: &ModelParams, zeta: f64) -> Result<Self> {
        schweber_coeffs(params, zeta, 0)?;
        let mut s = BraakSeriesState {
            k_prev: ScaledValue::ZERO,
            k_curr: ScaledValue::ONE,
            n: 0,
            kappa_pow: ScaledValue::ONE,
            g_plus: 0.0,
            g_minus: 0.0,
        };
        s.accumulate(params, zeta);
        Ok(s)
    }

    fn accumulate(&mut self, params: &ModelParams, zeta: f64) -> (f64, f64) {
        let w = (self.k_curr * self.kappa_pow).to_f64();
        let r = params.delta() / (zeta - self.n as f64);
        let (tp, tm) = (w * (1.0 - r), w * (1.0 + r));
        self.g_plus += tp;
        self.g_minus += tm;
        (tp, tm)
    }

    /// Advance to `n + 1`; returns the two added terms.
    pub fn step(&mut self, params: &ModelParams, zeta: f64) -> (f64, f64) {
        let n = self.n;
        let f = schweber_f(params, zeta, n);
        let next = (self.k_curr.mul_f64(f) - self.k_prev).div_f64((n + 1) as f64);
        self.k_prev = self.k_curr;
        self.k_curr = next;
        self.n = n + 1;
        self.kappa_pow = self.kappa_pow.mul_f64(params.kappa());
        self.accumulate(params, zeta)
    }
}

fn turning_index(params: &ModelParams, zeta: f64) -> usize {
    let mut l = zeta.max(0.0).floor() as usize + 1;
    while schweber_f(params, zeta, l) < 2.0 * ((l + 1) as f64).sqrt() {
        l += 1;
    }
    l
}

/// `(G+, G−, terms used)` at `ζ`.
#[allow(non_snake_case)]
pub fn braak_G(params: &ModelParams, zeta: f64, tol: f64, n_max: usize) -> Result<(f64, f64, usize)> {
    let mut s = BraakSeriesState::start(params, zeta)?;
    let turn = turning_index(params, zeta);
    let mut quiet = 0;
    while s.n < n_max {
        let (tp, tm) = s.step(params, zeta);
        let scale = s.g_plus.abs().max(s.g_minus.abs()).max(1.0);
        if tp.abs().max(tm.abs()) <= tol * scale {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= CF_QUIET_TERMS && s.n >= turn {
            return Ok((s.g_plus, s.g_minus, s.n + 1));
        }
    }
    Err(Error::NoConvergence { t: zeta, n_max })
}

/// Zeros of `G+` and `G−` in `[zeta_lo, zeta_hi]` from a dense scan of each
/// unit cell with bisection on every sign change. Zeros of `G+` carry the label
/// [`Parity::Plus`], zeros of `G−` the label [`Parity::Minus`].
pub fn braak_spectrum(
    params: &ModelParams,
    zeta_lo: f64,
    zeta_hi: f64,
    samples_per_unit: usize,
    tol: f64,
) -> Result<Spectrum> {
    if samples_per_unit < 64 {
        return Err(Error::InvalidArgument("braak scan needs at least 64 samples per unit".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let g = |z: f64, plus: bool| -> Result<f64> {
        let (gp, gm, _) = braak_G(params, z, 1e-16, BRAAK_MAX_TERMS)?;
        Ok(if plus { gp } else { gm })
    };
    let cells = cell_grids(zeta_lo, zeta_hi, samples_per_unit, 1e3 * TOL_POLE);
    let per_cell: Vec<Vec<(f64, Parity, (f64, f64), (f64, f64), f64)>> = cells
        .par_iter()
        .map(|grid| {
            let mut out = Vec::new();
            for (plus, parity) in [(true, Parity::Plus), (false, Parity::Minus)] {
                let f = |z: f64| g(z, plus);
                for r in classify_sign_changes(&f, grid, tol, false)?.0 {
                    out.push((r.value, parity, r.bracket, r.cell, r.residual));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut found: Vec<_> = per_cell.into_iter().flatten().collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut counts = [0usize; 2];
    let levels = found
        .into_iter()
        .map(|(z, parity, bracket, gap, residual)| {
            let slot = &mut counts[(parity == Parity::Minus) as usize];
            let k = *slot;
            *slot += 1;
            EnergyLevel {
                k,
                parity: Some(parity),
                value: EnergyValue::from_zeta(z, params),
                bracket,
                gap,
                residual,
                n_trunc: 0,
                stable: true,
                shift: 0.0,
            }
        })
        .collect();
    let options = SolveOptions { tol, ..SolveOptions::default() };
    Ok(Spectrum { params: *params, parity: None, variable: Variable::Zeta, options, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::solve_spectrum;

    fn k07_d04() -> ModelParams {
        ModelParams::new(0.7, 0.4, 1.0).unwrap()
    }

    #[test]
    fn first_ratio_is_f0() {
        let p = k07_d04();
        let mut s = BraakSeriesState::start(&p, 0.5).unwrap();
        s.step(&p, 0.5);
        let r = (s.k_curr / s.k_prev).to_f64();
        assert!((r - 1.2714286).abs() < 1e-7, "{r}");
    }

    #[test]
    fn rejects_integer_zeta() {
        assert!(matches!(braak_G(&k07_d04(), 2.0, 1e-16, 1000), Err(Error::PoleAtInteger { pole: 2, .. })));
        assert!(matches!(braak_G(&k07_d04(), 0.3, 1e-16, 5), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn equal_at_zero_delta() {
        let p = ModelParams::dho(0.9).unwrap();
        for &z in &[-1.3, 0.2, 1.7, 4.4] {
            let (gp, gm, _) = braak_G(&p, z, 1e-16, 10_000).unwrap();
            assert_eq!(gp, gm);
        }
    }

    #[test]
    fn reference_zeros() {
        let s = braak_spectrum(&k07_d04(), -1.0, 2.0, 256, 1e-12).unwrap();
        let z = s.zetas();
        let expect = [-0.217805, 0.0629563, 0.86095, 1.1636, 1.85076];
        assert_eq!(z.len(), expect.len(), "{z:?}");
        for (a, b) in z.iter().zip(expect) {
            assert!((a - b).abs() < 5e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn labels_match_parity_solver() {
        let p = k07_d04();
        let s = braak_spectrum(&p, -1.0, 4.0, 256, 1e-12).unwrap();
        for parity in Parity::BOTH {
            let ours = solve_spectrum(&p, parity, 4, &SolveOptions::default()).unwrap();
            let theirs: Vec<f64> = s.of_parity(parity).iter().map(|l| l.value.zeta(&p)).collect();
            for (a, b) in ours.zetas().iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-9, "{parity}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn empty_range() {
        assert!(braak_spectrum(&k07_d04(), 1.5, 1.5, 256, 1e-12).unwrap().levels.is_empty());
        assert!(braak_spectrum(&k07_d04(), 0.0, 1.0, 10, 1e-12).is_err());
    }
}
