//! Monic orthogonal polynomials: evaluation, Sturm counts, zeros, Gauss weights,
//! convergents and partial fractions.

use crate::error::{Error, Result};
use crate::model::{MonicCoefficients, TOL_POLE};
use crate::scaled::{ldexp, rescale_pair, ScaledValue};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default absolute bisection tolerance for nodes.
pub const NODE_TOL: f64 = 1e-12;

/// `(P_n(x), P_{n−1}(x))`, with `P_{−1} = 0`.
pub fn eval_monic<R: MonicCoefficients + ?Sized>(rec: &R, x: f64, n: usize) -> (ScaledValue, ScaledValue) {
    let (mut prev, mut curr, mut e) = (0.0, 1.0, 0i64);
    for k in 1..=n {
        let next = (x - rec.c(k)) * curr - rec.lambda(k) * prev;
        prev = curr;
        curr = next;
        e += rescale_pair(&mut prev, &mut curr);
    }
    (ScaledValue::from_parts(curr, e), ScaledValue::from_parts(prev, e))
}

/// `(P_n(x), P_n′(x))` from the recurrence and its derivative, scaled together.
pub fn eval_monic_with_derivative<R: MonicCoefficients + ?Sized>(
    rec: &R,
    x: f64,
    n: usize,
) -> (ScaledValue, ScaledValue) {
    let (mut p0, mut p1) = (0.0, 1.0);
    let (mut d0, mut d1) = (0.0, 0.0);
    let mut e = 0i64;
    for k in 1..=n {
        let (c, l) = (rec.c(k), rec.lambda(k));
        let p2 = (x - c) * p1 - l * p0;
        let d2 = p1 + (x - c) * d1 - l * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        let m = p0.abs().max(p1.abs()).max(d0.abs()).max(d1.abs());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            let s = ScaledValue::new(m).exponent();
            p0 = ldexp(p0, -s);
            p1 = ldexp(p1, -s);
            d0 = ldexp(d0, -s);
            d1 = ldexp(d1, -s);
            e += s;
        }
    }
    (ScaledValue::from_parts(p1, e), ScaledValue::from_parts(d1, e))
}

fn pivot_guard(c: f64, lambda: f64) -> f64 {
    // a zero pivot is nudged upward, i.e. x is treated as slightly below the
    // nearby zero so that the count stays "strictly below x"
    f64::EPSILON * (c.abs() + lambda.abs() + 1.0)
}

/// Number of zeros of `P_n` strictly below `x`.
pub fn sturm_count<R: MonicCoefficients + ?Sized>(rec: &R, x: f64, n: usize) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for k in 1..=n {
        let (c, l) = (rec.c(k), rec.lambda(k));
        d = if k == 1 { c - x } else { (c - x) - l / d };
        if d == 0.0 {
            d = pivot_guard(c, l);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Interval containing every zero of `P_n` (Gershgorin on the Jacobi matrix).
pub fn zero_bounds<R: MonicCoefficients + ?Sized>(rec: &R, n: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut left = 0.0;
    for i in 1..=n {
        let right = if i < n { rec.lambda(i + 1).sqrt() } else { 0.0 };
        let r = left + right;
        lo = lo.min(rec.c(i) - r);
        hi = hi.max(rec.c(i) + r);
        left = right;
    }
    let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    (lo - pad, hi + pad)
}

fn sign_of_p<R: MonicCoefficients + ?Sized>(rec: &R, x: f64, n: usize) -> f64 {
    eval_monic(rec, x, n).0.signum()
}

fn bisect_kth<R: MonicCoefficients + ?Sized>(rec: &R, n: usize, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    // invariant: count(lo) < k <= count(hi)
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(rec, mid, n) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // polish on the sign of P_n while the sign change is still resolvable
    let (slo, shi) = (sign_of_p(rec, lo, n), sign_of_p(rec, hi, n));
    if slo != 0.0 && shi != 0.0 && slo != shi {
        for _ in 0..64 {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = sign_of_p(rec, mid, n);
            if s == 0.0 {
                return mid;
            }
            if s == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    lo + 0.5 * (hi - lo)
}

/// Zeros `x_{n,k_lo} < … < x_{n,k_hi}` of `P_n` (1-based `k`).
pub fn poly_zeros<R: MonicCoefficients + ?Sized>(
    rec: &R,
    n: usize,
    k_lo: usize,
    k_hi: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !(1 <= k_lo && k_lo <= k_hi && k_hi <= n) {
        return Err(Error::InvalidArgument(format!("need 1 <= k_lo <= k_hi <= n, got {k_lo}, {k_hi}, {n}")));
    }
    let (lo, hi) = zero_bounds(rec, n);
    let mut zeros: Vec<f64> = (k_lo..=k_hi)
        .into_par_iter()
        .map(|k| bisect_kth(rec, n, k, lo, hi, tol))
        .collect();
    // coincident-in-double zeros are nudged apart so the sequence stays strictly increasing
    for i in 1..zeros.len() {
        if zeros[i] <= zeros[i - 1] {
            zeros[i] = zeros[i - 1].next_up();
        }
    }
    Ok(zeros)
}

/// All zeros of `P_n` inside `[lo, hi]`.
pub fn poly_zeros_in<R: MonicCoefficients + ?Sized>(rec: &R, n: usize, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>> {
    let k_lo = sturm_count(rec, lo, n) + 1;
    let k_hi = sturm_count(rec, hi.next_up(), n);
    if k_lo > k_hi {
        return Ok(Vec::new());
    }
    poly_zeros(rec, n, k_lo, k_hi, tol)
}

/// `P_0 … P_n` at a zero of `P_n`, built from forward pivots below a twist index
/// and backward ratios above it, so that neither direction runs into the other's
/// cancellation.
pub fn node_values<R: MonicCoefficients + ?Sized>(rec: &R, x: f64, n: usize) -> Vec<ScaledValue> {
    let mut fwd = vec![0.0; n + 1];
    for l in 1..=n {
        let (c, lam) = (rec.c(l), rec.lambda(l));
        let mut d = if l == 1 { x - c } else { (x - c) - lam / fwd[l - 1] };
        if d == 0.0 {
            // same direction as the Sturm guard: x treated as slightly low
            d = -pivot_guard(c, lam);
        }
        fwd[l] = d;
    }
    let mut bwd = vec![0.0; n + 1];
    for l in (1..n).rev() {
        let (c, lam) = (rec.c(l + 1), rec.lambda(l + 1));
        let mut den = (x - c) - bwd[l + 1];
        if den == 0.0 {
            den = -pivot_guard(c, lam);
        }
        bwd[l] = lam / den;
    }
    // γ_l = fwd_l − bwd_l is the reciprocal diagonal of (J − x)⁻¹; the row with the
    // smallest |γ| carries the largest eigenvector component
    let twist = (1..=n)
        .min_by(|&i, &j| (fwd[i] - bwd[i]).abs().total_cmp(&(fwd[j] - bwd[j]).abs()))
        .unwrap_or(0);
    let mut out = Vec::with_capacity(n + 1);
    let mut p = ScaledValue::ONE;
    out.push(p);
    for l in 1..=n {
        p = p.mul_f64(if l < twist { fwd[l] } else { bwd[l] });
        out.push(p);
    }
    out
}

/// Gauss rule of order `n`, normalized so that the weights sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    /// From `M = [Σ_l P_l²/h_l]⁻¹`.
    pub weights: Vec<ScaledValue>,
    /// From `M = h_{n−1}/(P_{n−1} P_n′)`, the Christoffel–Darboux form.
    pub weights_cd: Vec<ScaledValue>,
}

impl QuadratureRule {
    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(ScaledValue::to_f64).collect()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().fold(ScaledValue::ZERO, |a, &w| a + w).to_f64()
    }
}

/// Relative disagreement allowed between the two weight formulas.
pub const WEIGHT_CONSISTENCY_TOL: f64 = 1e-8;

/// Weights at the full zero set of `P_n`. The functional is normalized to
/// `μ_0 = 1`, i.e. `h_l = λ_2 ⋯ λ_{l+1}`.
pub fn quadrature_weights<R: MonicCoefficients + ?Sized>(rec: &R, nodes: &[f64]) -> Result<QuadratureRule> {
    let n = nodes.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty node set".into()));
    }
    // h_l for l = 0..n-1
    let mut h = Vec::with_capacity(n);
    let mut acc = ScaledValue::ONE;
    h.push(acc);
    for l in 1..n {
        acc = acc.mul_f64(rec.lambda(l + 1));
        h.push(acc);
    }
    let pairs: Vec<(ScaledValue, ScaledValue)> = nodes
        .par_iter()
        .map(|&x| {
            let p = node_values(rec, x, n);
            let s = (0..n).fold(ScaledValue::ZERO, |s, l| s + p[l] * p[l] / h[l]);
            let w = s.recip();
            let (_, dp) = eval_monic_with_derivative(rec, x, n);
            let den = p[n - 1] * dp;
            let w_cd = if den.is_zero() { ScaledValue::ZERO } else { h[n - 1] / den };
            (w, w_cd)
        })
        .collect();
    let mut weights = Vec::with_capacity(n);
    let mut weights_cd = Vec::with_capacity(n);
    for (k, (w, w_cd)) in pairs.into_iter().enumerate() {
        let rel = ((w - w_cd) / w).to_f64().abs();
        if !(rel <= WEIGHT_CONSISTENCY_TOL) || w_cd.signum() <= 0.0 {
            return Err(Error::InconsistentWeights { k: k + 1, first: w_cd.to_f64(), second: w.to_f64() });
        }
        weights.push(w);
        weights_cd.push(w_cd);
    }
    Ok(QuadratureRule { order: n, nodes: nodes.to_vec(), weights, weights_cd })
}

/// Order-`n` Gauss rule of a recurrence.
pub fn gauss_rule<R: MonicCoefficients + ?Sized>(rec: &R, n: usize, tol: f64) -> Result<QuadratureRule> {
    let nodes = poly_zeros(rec, n, 1, n, tol)?;
    quadrature_weights(rec, &nodes)
}

fn near_zero_of<R: MonicCoefficients + ?Sized>(rec: &R, x: f64, n: usize) -> bool {
    n > 0 && sturm_count(rec, x - TOL_POLE, n) != sturm_count(rec, x + TOL_POLE, n)
}

/// `F_n(x) = a_0 + P^{(1)}_{n−1}(x)/P_n(x)`.
pub fn convergent<R0, R1>(rec0: &R0, rec1: &R1, a0: f64, x: f64, n: usize) -> Result<f64>
where
    R0: MonicCoefficients + ?Sized,
    R1: MonicCoefficients + ?Sized,
{
    if n == 0 {
        return Ok(a0);
    }
    if near_zero_of(rec0, x, n) {
        return Err(Error::NearPole { x, tol: TOL_POLE });
    }
    let (p, _) = eval_monic(rec0, x, n);
    let (q, _) = eval_monic(rec1, x, n - 1);
    Ok(a0 + (q / p).to_f64())
}

/// `a_0 + Σ_k M_k/(x − x_k)`.
pub fn pfd_eval(quad: &QuadratureRule, a0: f64, x: f64) -> Result<f64> {
    if quad.nodes.iter().any(|&xk| (x - xk).abs() < TOL_POLE) {
        return Err(Error::NearPole { x, tol: TOL_POLE });
    }
    let mut s = a0;
    for (xk, w) in quad.nodes.iter().zip(&quad.weights) {
        s += w.div_f64(x - xk).to_f64();
    }
    Ok(s)
}

/// `μ_0 … μ_{2n−1}` from the order-`n` rule.
pub fn moments<R: MonicCoefficients + ?Sized>(rec: &R, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("moments need n >= 1".into()));
    }
    let quad = gauss_rule(rec, n, NODE_TOL)?;
    let mut mu = vec![ScaledValue::ZERO; 2 * n];
    for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
        let mut t = w;
        for m in mu.iter_mut() {
            *m = *m + t;
            t = t.mul_f64(x);
        }
    }
    Ok(mu.iter().map(ScaledValue::to_f64).collect())
}
