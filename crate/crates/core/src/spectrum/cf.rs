//! The quantization function `F` as the ρ/u series of the continued fraction
//! attached to a raw three-term recurrence.

use crate::error::{Error, Result};
use crate::model::{c_bar, rabi_raw_coeffs, schweber_coeffs, schweber_f, ModelParams, Parity};
use crate::scaled::ScaledValue;

/// A recurrence `φ_{n+1} + a_n φ_n + b_n φ_{n−1} = 0` whose coefficients depend on
/// a spectral variable `t` (`x` for the parity form, `ζ` for the Schweber form).
pub trait RawCoefficients: Sync {
    fn coeffs(&self, t: f64, n: usize) -> (f64, f64);

    /// First index from which the two Perron–Kreuser solutions are well separated.
    /// Before it, small series terms may still be followed by large ones.
    fn turning_index(&self, t: f64) -> usize;

    fn check(&self, _t: f64) -> Result<()> {
        Ok(())
    }
}

fn parity_turning_index(kappa: f64, delta: f64, x: f64) -> usize {
    // smallest l with (l − Δ)/κ − x ≥ 2√(l+1), a lower bound for c̄_l − x
    let disc = kappa * kappa + 1.0 + delta + kappa * x;
    if disc <= 0.0 {
        return 1;
    }
    let s = kappa + disc.sqrt();
    ((s * s - 1.0).ceil().max(1.0)) as usize
}

#[derive(Debug, Clone, Copy)]
pub struct ParitySource {
    pub params: ModelParams,
    pub parity: Parity,
}

impl RawCoefficients for ParitySource {
    fn coeffs(&self, x: f64, n: usize) -> (f64, f64) {
        rabi_raw_coeffs(&self.params, self.parity, x, n)
    }

    fn turning_index(&self, x: f64) -> usize {
        parity_turning_index(self.params.kappa(), self.params.delta(), x)
    }
}

impl ParitySource {
    pub fn new(params: ModelParams, parity: Parity) -> Self {
        ParitySource { params, parity }
    }

    /// `a_0`
    pub fn a0(&self, x: f64) -> f64 {
        -(x - c_bar(&self.params, self.parity, 0))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DhoSource {
    pub kappa: f64,
}

impl RawCoefficients for DhoSource {
    fn coeffs(&self, x: f64, n: usize) -> (f64, f64) {
        crate::model::dho_raw_coeffs(self.kappa, x, n)
    }

    fn turning_index(&self, x: f64) -> usize {
        parity_turning_index(self.kappa, 0.0, x)
    }
}

/// Schweber's form in `ζ`, with `a_n = −f_n/(n+1)`.
#[derive(Debug, Clone, Copy)]
pub struct SchweberSource {
    pub params: ModelParams,
}

impl RawCoefficients for SchweberSource {
    fn coeffs(&self, zeta: f64, n: usize) -> (f64, f64) {
        let np1 = (n + 1) as f64;
        (-schweber_f(&self.params, zeta, n) / np1, 1.0 / np1)
    }

    fn turning_index(&self, zeta: f64) -> usize {
        let mut l = zeta.max(0.0).floor() as usize + 1;
        while schweber_f(&self.params, zeta, l) < 2.0 * ((l + 1) as f64).sqrt() {
            l += 1;
        }
        l
    }

    fn check(&self, zeta: f64) -> Result<()> {
        schweber_coeffs(&self.params, zeta, 0).map(|_| ())
    }
}

/// Number of consecutive negligible terms required before stopping.
pub const CF_QUIET_TERMS: usize = 8;
/// Default relative size below which a series term is negligible.
pub const CF_TOL: f64 = 1e-16;
pub const CF_MAX_TERMS: usize = 1_000_000;

const TINY: f64 = 1e-300;

fn nonzero(v: f64) -> f64 {
    if v == 0.0 {
        TINY
    } else {
        v
    }
}

/// Partial sums larger than the result by this factor trigger a tail-first
/// re-evaluation.
const CANCELLATION_LIMIT: f64 = 1e4;

/// `F(t) = a_0 + Σ_k ρ_1⋯ρ_k`, returning the value and the number of terms used.
///
/// `ρ_1 = −b_1/a_1`, `u_1 = 1`, `u_l = 1/(1 − u_{l−1} b_l/(a_l a_{l−1}))` and
/// `ρ_l = u_l − 1`. The running product is kept scaled so that a long stretch of
/// tiny factors cannot flush it to zero before the turning index.
///
/// The partial sums are the convergents, so near a zero of an early denominator
/// they swing far past the limit and cancel. When that costs more than four
/// digits the same fraction is re-evaluated from the tail, starting beyond the
/// depth at which the series stopped.
pub fn f_cf<S: RawCoefficients + ?Sized>(src: &S, t: f64, tol: f64, n_max: usize) -> Result<(f64, usize)> {
    if n_max < 16 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 16, got {n_max}")));
    }
    src.check(t)?;
    let (a0, _) = src.coeffs(t, 0);
    let (a1, b1) = src.coeffs(t, 1);
    let mut a_prev = nonzero(a1);
    let rho1 = -b1 / a_prev;
    let mut prod = ScaledValue::new(rho1);
    let mut acc = a0 + rho1;
    let mut u_prev = 1.0;
    let mut quiet = if rho1.abs() < tol * acc.abs().max(1.0) { 1 } else { 0 };
    let mut swing = acc.abs();
    let turn = src.turning_index(t);
    for l in 2..=n_max {
        let (al, bl) = src.coeffs(t, l);
        let al = nonzero(al);
        let u = 1.0 / nonzero(1.0 - u_prev * bl / (al * a_prev));
        prod = prod.mul_f64(u - 1.0);
        let term = prod.to_f64();
        acc += term;
        swing = swing.max(acc.abs());
        if term.abs() < tol * acc.abs().max(1.0) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= CF_QUIET_TERMS && l >= turn {
            if swing > CANCELLATION_LIMIT * acc.abs().max(1.0) {
                return Ok((a0 + tail_first(src, t, l + 2 * CF_QUIET_TERMS), l));
            }
            return Ok((acc, l));
        }
        u_prev = u;
        a_prev = al;
    }
    Err(Error::NoConvergence { t, n_max })
}

/// `φ_1/φ_0` of the minimal solution by the backward ratio recurrence
/// `r_{n−1} = −b_n/(a_n + r_n)` from `r_depth = 0`.
fn tail_first<S: RawCoefficients + ?Sized>(src: &S, t: f64, depth: usize) -> f64 {
    let mut r = 0.0;
    for n in (1..=depth).rev() {
        let (a, b) = src.coeffs(t, n);
        r = -b / nonzero(a + r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rabi_monic_family;
    use crate::ops::convergent;

    #[test]
    fn dho_ground_state_is_a_zero() {
        for &k in &[0.5, 1.0, 1.4] {
            let x0 = -k;
            let (f, _) = f_cf(&DhoSource { kappa: k }, x0, CF_TOL, CF_MAX_TERMS).unwrap();
            assert!(f.abs() < 1e-8, "κ={k}: F={f}");
        }
    }

    #[test]
    fn dho_source_matches_parity_source() {
        let p = ModelParams::dho(1.3).unwrap();
        for &x in &[-2.0, 0.3, 4.7] {
            let a = f_cf(&DhoSource { kappa: 1.3 }, x, CF_TOL, CF_MAX_TERMS).unwrap().0;
            let b = f_cf(&ParitySource::new(p, Parity::Minus), x, CF_TOL, CF_MAX_TERMS).unwrap().0;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn schweber_sign_change_at_lowest_level() {
        let src = SchweberSource { params: ModelParams::new(0.7, 0.4, 1.0).unwrap() };
        let lo = f_cf(&src, -0.2178, CF_TOL, CF_MAX_TERMS).unwrap().0;
        let hi = f_cf(&src, -0.2179 + 0.0002, CF_TOL, CF_MAX_TERMS).unwrap().0;
        let below = f_cf(&src, -0.2188, CF_TOL, CF_MAX_TERMS).unwrap().0;
        let above = f_cf(&src, -0.2168, CF_TOL, CF_MAX_TERMS).unwrap().0;
        assert!(below * above < 0.0, "{below} {above} {lo} {hi}");
        assert!(matches!(f_cf(&src, 2.0, CF_TOL, CF_MAX_TERMS), Err(Error::PoleAtInteger { pole: 2, .. })));
    }

    #[test]
    fn agrees_with_convergent() {
        let p = ModelParams::new(1.4, 0.4, 1.0).unwrap();
        for parity in Parity::BOTH {
            let src = ParitySource::new(p, parity);
            let r0 = rabi_monic_family(&p, parity, 0).unwrap();
            let r1 = rabi_monic_family(&p, parity, 1).unwrap();
            for &x in &[-2.3, -0.1, 0.77, 3.3, 7.9] {
                let f = f_cf(&src, x, CF_TOL, CF_MAX_TERMS).unwrap().0;
                let g = convergent(&r0, &r1, src.a0(x), x, 600).unwrap();
                assert!((f - g).abs() < 1e-8 * f.abs().max(1.0), "x={x}: {f} vs {g}");
            }
        }
    }

    #[test]
    fn accurate_next_to_a_vanishing_denominator() {
        // a_1 = 0 at x = 1 for κ = 1; the level there is exact
        let src = DhoSource { kappa: 1.0 };
        for d in [-1e-6, -1e-9, 0.0, 1e-9, 1e-6] {
            let f = f_cf(&src, 1.0 + d, CF_TOL, CF_MAX_TERMS).unwrap().0;
            let h = 1e-5;
            let slope = (f_cf(&src, 1.0 + h, CF_TOL, CF_MAX_TERMS).unwrap().0
                - f_cf(&src, 1.0 - h, CF_TOL, CF_MAX_TERMS).unwrap().0)
                / (2.0 * h);
            assert!((f - slope * d).abs() < 1e-3 * d.abs() + 1e-14, "d={d}: {f}");
        }
    }

    #[test]
    fn rejects_tiny_budget() {
        assert!(f_cf(&DhoSource { kappa: 1.0 }, 0.5, CF_TOL, 8).is_err());
        let r = f_cf(&DhoSource { kappa: 1.0 }, 5000.5, CF_TOL, 100);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
