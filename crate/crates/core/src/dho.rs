//! Closed-form displaced harmonic oscillator (`Δ = 0`).
//!
//! Levels are `ε_l = l − κ²`, i.e. `ζ = l`, and the expansion coefficients are
//! Charlier polynomials
//! `φ_n = Σ_j (−1)^{n−j} κ^{n−2j} / ((n−j)! j!) · Π_{k<j} (ζ − k)`.
//! The alternating sum cancels badly, so it is summed in double-double with a
//! separate binary exponent; each term comes from the previous one by a single
//! multiply, which avoids the factorials.

use crate::scaled::{ldexp, ScaledValue};
use serde::{Deserialize, Serialize};

/// One oscillator level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhoLevel {
    pub l: usize,
    pub epsilon: f64,
}

impl DhoLevel {
    pub fn new(l: usize, kappa: f64) -> Self {
        DhoLevel { l, epsilon: dho_eigenvalue(l, kappa) }
    }
}

/// `ε_l = l − κ²`.
pub fn dho_eigenvalue(l: usize, kappa: f64) -> f64 {
    l as f64 - kappa * kappa
}

// --- double-double with an exponent -------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let d = quick(s, e + t);
        quick(d.hi, d.lo + f)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn mul_f(self, x: f64) -> Dd {
        self.mul(Dd::from(x))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul_f(-q1));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul_f(-q2));
        let q3 = r.hi / o.hi;
        let q = quick(q1, q2);
        q.add(Dd::from(q3))
    }

    fn scale(self, e: i64) -> Dd {
        Dd { hi: ldexp(self.hi, e), lo: ldexp(self.lo, e) }
    }
}

/// `value · 2^exp` with `|value.hi|` kept near 1.
#[derive(Debug, Clone, Copy)]
struct ScaledDd {
    value: Dd,
    exp: i64,
}

impl ScaledDd {
    fn normalized(value: Dd, exp: i64) -> ScaledDd {
        if value.hi == 0.0 {
            return ScaledDd { value: Dd::ZERO, exp: 0 };
        }
        let e = ScaledValue::new(value.hi).exponent();
        ScaledDd { value: value.scale(-e), exp: exp + e }
    }

    fn mul(self, d: Dd) -> ScaledDd {
        ScaledDd::normalized(self.value.mul(d), self.exp)
    }

    fn add(self, o: ScaledDd) -> ScaledDd {
        if self.value.hi == 0.0 {
            return o;
        }
        if o.value.hi == 0.0 {
            return self;
        }
        let e = self.exp.max(o.exp);
        // a shift past the double-double width only drops bits below its precision
        let a = self.value.scale((self.exp - e).max(-1100));
        let b = o.value.scale((o.exp - e).max(-1100));
        ScaledDd::normalized(a.add(b), e)
    }

    fn to_scaled(self) -> ScaledValue {
        ScaledValue::from_parts(self.value.hi + self.value.lo, self.exp)
    }
}

fn charlier_at(n: usize, kappa: f64, zeta: Dd) -> ScaledValue {
    let k = Dd::from(kappa);
    let k2 = k.mul(k);
    // t_0 = (−κ)ⁿ / n!
    let mut t = ScaledDd::normalized(Dd::from(1.0), 0);
    for i in 1..=n {
        t = t.mul(Dd::from(-kappa).div(Dd::from(i as f64)));
    }
    let mut sum = t;
    for j in 0..n {
        // t_{j+1}/t_j = −(n−j)(ζ−j) / ((j+1) κ²)
        let num = zeta.add(Dd::from(-(j as f64))).mul_f(-((n - j) as f64));
        let den = k2.mul_f((j + 1) as f64);
        t = t.mul(num.div(den));
        if t.value.hi == 0.0 {
            break;
        }
        sum = sum.add(t);
    }
    sum.to_scaled()
}

/// `φ_n` at energy `ε`, as a scaled value (safe for large `n`).
pub fn charlier_phi_scaled(n: usize, kappa: f64, epsilon: f64) -> ScaledValue {
    let k = Dd::from(kappa);
    charlier_at(n, kappa, Dd::from(epsilon).add(k.mul(k)))
}

/// `φ_n` at energy `ε`, normalized so that `φ_0 = 1`.
pub fn charlier_phi(n: usize, kappa: f64, epsilon: f64) -> f64 {
    charlier_phi_scaled(n, kappa, epsilon).to_f64()
}

/// Behaviour of the coefficients on and off the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub l: usize,
    pub kappa: f64,
    pub n_max: usize,
    /// Largest relative difference, over `l ≤ n ≤ n_max`, between the summed
    /// series at `ζ = l` and its collapsed form, a Charlier polynomial of degree
    /// `l` in `n`.
    pub max_rel_deviation: f64,
    /// `|φ_{n_max}|` over the surviving `j = l` term `κ^{n−2l} / (n−l)!`.
    pub leading_ratio: f64,
    /// `(n+1)|φ_{n+1}/φ_n|/κ` stays within `[1/2, 2]` for `n ≥ 2l + 1`.
    pub decays_factorially: bool,
    /// `n!|φ_n|/κⁿ` at `ζ = l + 1/2`, for `n = 0..=n_max`.
    pub off_spectrum_growth: Vec<f64>,
    /// Ratio of `n!|φ_n|/κⁿ` off and on the spectrum at `n_max`.
    pub off_to_on_ratio: f64,
}

/// `φ_n` at `ζ = l` from the collapsed sum
/// `(−κ)ⁿ/n! · Σ_{j≤l} C(l,j) n(n−1)⋯(n−j+1) (−1/κ²)^j`.
fn collapsed(n: usize, l: usize, kappa: f64) -> ScaledValue {
    let mut poly = 0.0;
    let mut term = 1.0;
    for j in 0..=l.min(n) {
        poly += term;
        // C(l,j+1)/C(l,j) = (l−j)/(j+1)
        term *= (l - j) as f64 / (j + 1) as f64 * (n - j) as f64 * (-1.0 / (kappa * kappa));
    }
    let mut pre = ScaledValue::ONE;
    for i in 1..=n {
        pre = pre.mul_f64(-kappa / i as f64);
    }
    pre.mul_f64(poly)
}

/// Collapse diagnostics at the level `ζ = l`.
pub fn dho_collapse_check(l: usize, kappa: f64, n_max: usize) -> CollapseReport {
    let on: Vec<ScaledValue> = (0..=n_max).map(|n| charlier_at(n, kappa, Dd::from(l as f64))).collect();
    let off: Vec<ScaledValue> = (0..=n_max).map(|n| charlier_at(n, kappa, Dd::from(l as f64 + 0.5))).collect();
    let mut max_rel_deviation: f64 = 0.0;
    for n in l..=n_max {
        let c = collapsed(n, l, kappa);
        if c.is_zero() {
            continue;
        }
        let d = ((on[n] - c) / c).to_f64().abs();
        max_rel_deviation = max_rel_deviation.max(d);
    }
    let lead = |n: usize| {
        let mut v = ScaledValue::ONE;
        for _ in 0..(n - l) {
            v = v.mul_f64(kappa);
        }
        for _ in 0..l {
            v = v.div_f64(kappa);
        }
        for i in 1..=(n - l) {
            v = v.div_f64(i as f64);
        }
        v
    };
    let leading_ratio =
        if n_max >= l { (on[n_max].abs() / lead(n_max)).to_f64() } else { f64::NAN };
    let decays_factorially = (2 * l + 1..n_max).all(|n| {
        if on[n].is_zero() {
            return false;
        }
        let r = (on[n + 1] / on[n]).to_f64().abs() * (n + 1) as f64 / kappa;
        (0.5..=2.0).contains(&r)
    });
    // n!|φ_n|/κⁿ
    let normalized = |v: &[ScaledValue]| -> Vec<ScaledValue> {
        let mut f = ScaledValue::ONE;
        v.iter()
            .enumerate()
            .map(|(n, x)| {
                if n > 0 {
                    f = f.mul_f64(n as f64 / kappa);
                }
                x.abs() * f
            })
            .collect()
    };
    let g_on = normalized(&on);
    let g_off = normalized(&off);
    CollapseReport {
        l,
        kappa,
        n_max,
        max_rel_deviation,
        leading_ratio,
        decays_factorially,
        off_spectrum_growth: g_off.iter().map(|v| v.to_f64()).collect(),
        off_to_on_ratio: (g_off[n_max] / g_on[n_max]).to_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalues() {
        assert_eq!(dho_eigenvalue(0, 1.0), -1.0);
        assert_eq!(dho_eigenvalue(5, 0.5), 4.75);
        // exact whenever κ² is representable; otherwise l − κ² rounds
        for l in 0..50 {
            assert_eq!(dho_eigenvalue(l + 1, 1.5) - dho_eigenvalue(l, 1.5), 1.0);
            let d = dho_eigenvalue(l + 1, 1.3) - dho_eigenvalue(l, 1.3);
            assert!((d - 1.0).abs() <= 4.0 * f64::EPSILON * (l + 1) as f64);
        }
    }

    #[test]
    fn low_orders() {
        assert_eq!(charlier_phi(0, 0.8, 0.3), 1.0);
        assert_relative_eq!(charlier_phi(2, 1.0, 3.0), 2.5, max_relative = 1e-15);
        assert_relative_eq!(charlier_phi(2, 1.0, -1.0), 0.5, max_relative = 1e-15);
        for &(k, e) in &[(1.0, 3.0), (0.3, -0.7), (2.2, 11.0), (1.7, -2.89)] {
            assert_eq!(charlier_phi(1, k, e), e / k);
        }
    }

    #[test]
    fn ground_state_is_poisson_like() {
        for n in 0..60 {
            let mut want = 1.0;
            for i in 1..=n {
                want *= -1.0 / i as f64;
            }
            assert_relative_eq!(charlier_phi(n, 1.0, -1.0), want, max_relative = 1e-14);
        }
    }

    #[test]
    fn large_order_does_not_overflow() {
        // (−κ)ⁿ/n! alone is far below the f64 range here
        let v = charlier_phi_scaled(400, 1.2, 2.3);
        assert!(!v.is_zero() && v.ln_abs().is_finite());
        let v = charlier_phi_scaled(1000, 1.0, -1.0);
        assert_relative_eq!(v.ln_abs(), -5912.128178488163, max_relative = 1e-13);
    }

    #[test]
    fn collapse_on_and_off_spectrum() {
        let r = dho_collapse_check(0, 1.0, 40);
        assert!(r.max_rel_deviation < 1e-14);
        assert_relative_eq!(r.leading_ratio, 1.0, max_relative = 1e-14);
        let r = dho_collapse_check(1, 1.0, 50);
        assert!(r.max_rel_deviation < 1e-12, "{}", r.max_rel_deviation);
        assert!(r.decays_factorially);
        // φ_n/(κ^{n−2}/(n−1)!) = 1 − κ²/n at l = 1
        assert_relative_eq!(r.leading_ratio, 1.0 - 1.0 / 50.0, max_relative = 1e-13);
        let g = &r.off_spectrum_growth;
        assert!(g[50] > 1e6 * g[10], "{} {}", g[10], g[50]);
        assert!(r.off_to_on_ratio > 1e6);
    }
}
