//! Model parameters, energy representations and the coefficient streams of the
//! parity recurrences.
//!
//! Every recurrence is kept in the canonical form
//! `φ_{n+1} + a_n φ_n + b_n φ_{n−1} = 0`. The Schweber form, which is usually
//! written with `−f_n/(n+1)`, is converted to it by setting `a_n = −f_n/(n+1)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Distance from a non-negative integer below which `ζ` counts as sitting on a pole.
pub const TOL_POLE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    kappa: f64,
    delta: f64,
    omega: f64,
}

impl ModelParams {
    pub fn new(kappa: f64, delta: f64, omega: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParams(format!("kappa must be finite and > 0, got {kappa}")));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParams(format!("delta must be finite and >= 0, got {delta}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParams(format!("omega must be finite and > 0, got {omega}")));
        }
        Ok(ModelParams { kappa, delta, omega })
    }

    /// Displaced harmonic oscillator: `Δ = 0`, `ω = 1`.
    pub fn dho(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0, 1.0)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Plus, Parity::Minus];

    fn sign(self) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Plus => "plus",
            Parity::Minus => "minus",
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Parity::Plus),
            "minus" | "-" => Ok(Parity::Minus),
            _ => Err(Error::InvalidArgument(format!("unknown parity '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repr {
    Epsilon,
    X,
    Zeta,
    E,
}

/// Dimensionless energy `ε = E/ω`; the other views are derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyValue {
    pub epsilon: f64,
}

impl EnergyValue {
    pub fn from_epsilon(epsilon: f64) -> Self {
        EnergyValue { epsilon }
    }

    pub fn from_x(x: f64, p: &ModelParams) -> Self {
        EnergyValue { epsilon: x * p.kappa }
    }

    pub fn from_zeta(zeta: f64, p: &ModelParams) -> Self {
        EnergyValue { epsilon: zeta - p.kappa * p.kappa }
    }

    pub fn x(&self, p: &ModelParams) -> f64 {
        self.epsilon / p.kappa
    }

    pub fn zeta(&self, p: &ModelParams) -> f64 {
        self.epsilon + p.kappa * p.kappa
    }

    pub fn energy(&self, p: &ModelParams) -> f64 {
        self.epsilon * p.omega
    }
}

/// Affine conversion between representations. `E` is output-only.
pub fn energy_convert(value: f64, from: Repr, to: Repr, p: &ModelParams) -> Result<f64> {
    let e = match from {
        Repr::Epsilon => EnergyValue::from_epsilon(value),
        Repr::X => EnergyValue::from_x(value, p),
        Repr::Zeta => EnergyValue::from_zeta(value, p),
        Repr::E => return Err(Error::InvalidArgument("E is an output-only representation".into())),
    };
    Ok(match to {
        Repr::Epsilon => e.epsilon,
        Repr::X => e.x(p),
        Repr::Zeta => e.zeta(p),
        Repr::E => e.energy(p),
    })
}

/// `c̄_n = [n ± (−1)ⁿΔ]/κ`.
pub fn c_bar(p: &ModelParams, parity: Parity, n: usize) -> f64 {
    let alt = if n % 2 == 0 { 1.0 } else { -1.0 };
    (n as f64 + parity.sign() * alt * p.delta) / p.kappa
}

/// `(a_n, b_n)` of the parity recurrence at `x = ε/κ`.
pub fn rabi_raw_coeffs(p: &ModelParams, parity: Parity, x: f64, n: usize) -> (f64, f64) {
    let np1 = (n + 1) as f64;
    (-(x - c_bar(p, parity, n)) / np1, 1.0 / np1)
}

/// Displaced-oscillator recurrence, `a_n = (n − κx)/((n+1)κ)`.
pub fn dho_raw_coeffs(kappa: f64, x: f64, n: usize) -> (f64, f64) {
    let np1 = (n + 1) as f64;
    ((n as f64 - kappa * x) / (np1 * kappa), 1.0 / np1)
}

fn check_off_integer(zeta: f64) -> Result<()> {
    let m = zeta.round();
    if m >= 0.0 && (zeta - m).abs() < TOL_POLE {
        return Err(Error::PoleAtInteger { zeta, pole: m as i64 });
    }
    Ok(())
}

/// `f_n = 2κ + (n − ζ − Δ²/(n − ζ))/(2κ)`.
pub fn schweber_coeffs(p: &ModelParams, zeta: f64, n: usize) -> Result<f64> {
    check_off_integer(zeta)?;
    Ok(schweber_f(p, zeta, n))
}

pub(crate) fn schweber_f(p: &ModelParams, zeta: f64, n: usize) -> f64 {
    let d = n as f64 - zeta;
    2.0 * p.kappa + (d - p.delta * p.delta / d) / (2.0 * p.kappa)
}

/// Coefficients of a monic recurrence `P_n = (x − c_n) P_{n−1} − λ_n P_{n−2}`.
pub trait MonicCoefficients: Sync {
    /// `c_n` for `n ≥ 1`.
    fn c(&self, n: usize) -> f64;
    /// `λ_n` for `n ≥ 1`; positive.
    fn lambda(&self, n: usize) -> f64;
}

/// One of the three monic families derived from a parity recurrence:
/// `c_n = c̄_{n+α}` and `λ_n = n + α`, except that `λ_1 = 1` when `α = −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonicRecurrence {
    params: ModelParams,
    parity: Parity,
    alpha: i32,
}

impl MonicRecurrence {
    pub fn alpha(&self) -> i32 {
        self.alpha
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }
}

impl MonicCoefficients for MonicRecurrence {
    fn c(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        c_bar(&self.params, self.parity, (n as i64 + self.alpha as i64) as usize)
    }

    fn lambda(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        if self.alpha == -1 && n == 1 {
            1.0
        } else {
            (n as i64 + self.alpha as i64) as f64
        }
    }
}

pub fn rabi_monic_family(p: &ModelParams, parity: Parity, alpha: i32) -> Result<MonicRecurrence> {
    if !(-1..=1).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha must be -1, 0 or 1, got {alpha}")));
    }
    Ok(MonicRecurrence { params: *p, parity, alpha })
}

/// Explicit coefficient tables, mostly for tests against classical families.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRecurrence {
    /// `c[n-1] = c_n`
    pub c: Vec<f64>,
    /// `lambda[n-1] = λ_n`
    pub lambda: Vec<f64>,
}

impl MonicCoefficients for TabulatedRecurrence {
    fn c(&self, n: usize) -> f64 {
        self.c[n - 1]
    }

    fn lambda(&self, n: usize) -> f64 {
        self.lambda[n - 1]
    }
}

/// Smallest `N₀` such that `c̄_n > 0` and `λ̄_{n+1}/(c̄_n c̄_{n+1}) < 1/4` for every
/// `N₀ ≤ n ≤ n_check`, or `None` when the condition still fails at `n_check`.
pub fn growth_condition_onset(p: &ModelParams, parity: Parity, n_check: usize) -> Option<usize> {
    let mut onset = None;
    for n in 0..=n_check {
        let (c0, c1) = (c_bar(p, parity, n), c_bar(p, parity, n + 1));
        let ok = c0 > 0.0 && c1 > 0.0 && (n + 1) as f64 / (c0 * c1) < 0.25;
        match (ok, onset) {
            (true, None) => onset = Some(n),
            (false, _) => onset = None,
            _ => {}
        }
    }
    onset
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(k: f64, d: f64) -> ModelParams {
        ModelParams::new(k, d, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(0.0, 0.4, 1.0).is_err());
        assert!(ModelParams::new(1.0, -0.1, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 0.1, 1.0).is_err());
    }

    #[test]
    fn raw_coefficient_examples() {
        assert_eq!(rabi_raw_coeffs(&p(1.0, 0.0), Parity::Plus, 0.0, 0), (0.0, 1.0));
        let (a1, b1) = rabi_raw_coeffs(&p(0.7, 0.4), Parity::Plus, 1.0, 1);
        assert_relative_eq!(a1, -1.0 / 14.0, max_relative = 1e-14);
        assert_eq!(b1, 0.5);
        let (a0, b0) = rabi_raw_coeffs(&p(0.7, 0.4), Parity::Minus, 0.0, 0);
        // a_0 = −x − Δ/κ for Minus
        assert_relative_eq!(a0, -4.0 / 7.0, max_relative = 1e-14);
        assert_eq!(b0, 1.0);
    }

    #[test]
    fn dho_examples() {
        assert_eq!(dho_raw_coeffs(1.0, 0.0, 0).0, 0.0);
        assert_relative_eq!(dho_raw_coeffs(1.0, 0.0, 2).0, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn schweber_examples() {
        let q = p(0.7, 0.4);
        assert_relative_eq!(schweber_coeffs(&q, 0.5, 0).unwrap(), 1.2714285714285714, max_relative = 1e-14);
        assert_relative_eq!(schweber_coeffs(&q, 0.5, 1).unwrap(), 1.5285714285714285, max_relative = 1e-14);
        for n in [0, 1, 5] {
            assert!(matches!(schweber_coeffs(&q, 1.0, n), Err(Error::PoleAtInteger { pole: 1, .. })));
        }
        // negative integers are not poles
        assert!(schweber_coeffs(&q, -1.0, 0).is_ok());
    }

    #[test]
    fn monic_family_examples() {
        let q = p(1.0, 0.0);
        let f0 = rabi_monic_family(&q, Parity::Plus, 0).unwrap();
        assert_eq!((f0.c(1), f0.c(2), f0.lambda(2)), (1.0, 2.0, 2.0));
        let f1 = rabi_monic_family(&q, Parity::Plus, 1).unwrap();
        assert_eq!((f1.c(1), f1.lambda(1)), (2.0, 2.0));
        let fm = rabi_monic_family(&q, Parity::Plus, -1).unwrap();
        assert_eq!((fm.c(1), fm.lambda(1), fm.lambda(2), fm.lambda(3)), (0.0, 1.0, 1.0, 2.0));
        assert!(rabi_monic_family(&q, Parity::Plus, 2).is_err());
    }

    #[test]
    fn conversions() {
        let k1 = p(1.0, 0.0);
        assert_eq!(energy_convert(-1.0, Repr::X, Repr::Epsilon, &k1).unwrap(), -1.0);
        let k7 = p(0.7, 0.4);
        assert_relative_eq!(energy_convert(0.0, Repr::Zeta, Repr::Epsilon, &k7).unwrap(), -0.49, max_relative = 1e-15);
        let w2 = ModelParams::new(0.7, 0.4, 2.0).unwrap();
        assert_eq!(energy_convert(-0.49, Repr::Epsilon, Repr::E, &w2).unwrap(), -0.98);
        assert!(energy_convert(1.0, Repr::E, Repr::X, &w2).is_err());
    }

    #[test]
    fn growth_condition_is_finite() {
        for &(k, d) in &[(0.3, 0.0), (0.7, 0.4), (1.4, 0.4), (3.0, 2.0), (5.0, 0.1)] {
            for parity in Parity::BOTH {
                let n0 = growth_condition_onset(&p(k, d), parity, 20_000).unwrap();
                assert!(n0 < 20 + (8.0 * k * k) as usize, "κ={k} Δ={d}: N₀={n0}");
            }
        }
    }
}
