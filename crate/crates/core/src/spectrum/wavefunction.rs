use super::cf::{ParitySource, RawCoefficients};
use crate::error::{Error, Result};
use crate::model::{rabi_monic_family, EnergyValue, ModelParams, MonicCoefficients, Parity};
use crate::scaled::{rescale_pair, ScaledValue};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Forward,
    #[default]
    Backward,
}

/// Bargmann-space coefficients `φ_0 … φ_N`, normalized to `φ_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionCoeffs {
    pub phi: Vec<ScaledValue>,
    pub method: Method,
}

impl WavefunctionCoeffs {
    pub fn phi_f64(&self) -> Vec<f64> {
        self.phi.iter().map(ScaledValue::to_f64).collect()
    }

    /// `φ_{n+1}/φ_n`
    pub fn ratio(&self, n: usize) -> f64 {
        (self.phi[n + 1] / self.phi[n]).to_f64()
    }
}

fn forward(params: &ModelParams, parity: Parity, x: f64, n: usize) -> Result<Vec<ScaledValue>> {
    // n! φ_n = P^{(−1)}_n(x)
    let rec = rabi_monic_family(params, parity, -1)?;
    let src = ParitySource::new(*params, parity);
    let turn = src.turning_index(x);
    let mut out = Vec::with_capacity(n + 1);
    out.push(ScaledValue::ONE);
    let (mut prev, mut curr, mut e) = (0.0, 1.0, 0i64);
    let mut fact = ScaledValue::ONE;
    for k in 1..=n {
        let next = (x - rec.c(k)) * curr - rec.lambda(k) * prev;
        prev = curr;
        curr = next;
        e += rescale_pair(&mut prev, &mut curr);
        fact = fact.mul_f64(k as f64);
        out.push(ScaledValue::from_parts(curr, e) / fact);
        // past the turning index the minimal solution shrinks like κ/k and the
        // dominant one like 1/κ; their geometric mean is 1/√k
        let m = k - 1;
        if m >= turn && !out[m].is_zero() {
            let r = (out[k] / out[m]).to_f64().abs();
            if r > 1.0 / ((m + 1) as f64).sqrt() {
                return Err(Error::MethodUnstable { index: m });
            }
        }
    }
    Ok(out)
}

fn backward(params: &ModelParams, parity: Parity, x: f64, n: usize) -> Result<Vec<ScaledValue>> {
    let src = ParitySource::new(*params, parity);
    let top = n.max(src.turning_index(x)) + 64;
    let mut m = vec![ScaledValue::ZERO; n + 1];
    let (mut above, mut here, mut e) = (0.0_f64, 1.0_f64, 0_i64);
    if top <= n {
        m[top] = ScaledValue::ONE;
    }
    for k in (1..=top).rev() {
        let (a, b) = src.coeffs(x, k);
        let below = -(above + a * here) / b;
        above = here;
        here = below;
        e += rescale_pair(&mut above, &mut here);
        if k - 1 <= n {
            m[k - 1] = ScaledValue::from_parts(here, e);
        }
    }
    let m0 = m[0];
    if m0.is_zero() {
        return Err(Error::NearPole { x, tol: 0.0 });
    }
    Ok(m.into_iter().map(|v| v / m0).collect())
}

/// Expansion coefficients of the eigenstate at `eigen`.
pub fn wavefunction(
    params: &ModelParams,
    parity: Parity,
    eigen: EnergyValue,
    n: usize,
    method: Method,
) -> Result<WavefunctionCoeffs> {
    let x = eigen.x(params);
    let phi = match method {
        Method::Forward => forward(params, parity, x, n)?,
        Method::Backward => backward(params, parity, x, n)?,
    };
    Ok(WavefunctionCoeffs { phi, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{solve_spectrum, SolveOptions};

    #[test]
    fn dho_ground_state() {
        let p = ModelParams::dho(1.0).unwrap();
        let e = EnergyValue::from_x(-1.0, &p);
        for method in [Method::Forward, Method::Backward] {
            let w = wavefunction(&p, Parity::Plus, e, 8, method).unwrap();
            let phi = w.phi_f64();
            assert_eq!(phi[0], 1.0);
            assert!((phi[1] + 1.0).abs() < 1e-14);
            assert!((phi[2] - 0.5).abs() < 1e-14, "{method:?}: {}", phi[2]);
            let mut fact = 1.0;
            for (n, v) in phi.iter().enumerate().skip(1) {
                fact *= n as f64;
                let expect = if n % 2 == 0 { 1.0 } else { -1.0 } / fact;
                assert!((v - expect).abs() < 1e-12 * expect.abs().max(1e-300), "n={n}");
            }
        }
    }

    #[test]
    fn forward_blows_up_and_backward_decays() {
        let p = ModelParams::new(1.4, 0.4, 1.0).unwrap();
        let opts = SolveOptions { n_trunc: 200, ..SolveOptions::default() };
        let s = solve_spectrum(&p, Parity::Plus, 3, &opts).unwrap();
        let lvl = &s.levels[2];
        assert!(matches!(
            wavefunction(&p, Parity::Plus, lvl.value, 400, Method::Forward),
            Err(Error::MethodUnstable { .. })
        ));
        let w = wavefunction(&p, Parity::Plus, lvl.value, 400, Method::Backward).unwrap();
        let x = lvl.value.x(&p);
        let a0 = ParitySource::new(p, Parity::Plus).a0(x);
        assert!((w.phi_f64()[1] + a0).abs() < 1e-6);
        for n in 200..400 {
            let t = w.ratio(n) * n as f64 / p.kappa() + 1.0;
            assert!(t.abs() < 0.05, "n={n}: {t}");
        }
    }
}
