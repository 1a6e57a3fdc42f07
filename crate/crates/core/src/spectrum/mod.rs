//! Eigenvalues as zeros of the quantization function, one per pole gap.

mod baseline;
mod cf;
mod schweber;
mod solve;
mod wavefunction;

pub use baseline::{baseline_distance, detect_baseline_crossings};
pub use cf::{f_cf, DhoSource, ParitySource, RawCoefficients, SchweberSource, CF_MAX_TERMS, CF_QUIET_TERMS, CF_TOL};
pub use schweber::{f_schweber, schweber_spectrum};
pub(crate) use schweber::{cell_grids, classify_sign_changes};
pub(crate) use solve::solve_range;
pub use solve::{
    boundary_defect, branch_scan, count_below, find_root, leading_bracket_sign_changes, pole_brackets, solve_spectrum,
    x_floor,
};
pub use wavefunction::{wavefunction, Method, WavefunctionCoeffs};

use crate::model::{EnergyValue, ModelParams, Parity};
use serde::{Deserialize, Serialize};

pub const DEGENERACY_TOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const STABILITY_TOL: f64 = 1e-8;

/// Variable in which brackets are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Zeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Minimum truncation order for the pole approximations.
    pub n_trunc: usize,
    /// Absolute bisection tolerance in the working variable.
    pub tol: f64,
    pub cf_tol: f64,
    pub cf_max_terms: usize,
    pub residual_tol: f64,
    pub stability_tol: f64,
    /// Re-solve at twice the truncation to set the `stable` flag.
    pub check_stability: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            n_trunc: 2000,
            tol: 1e-12,
            cf_tol: CF_TOL,
            cf_max_terms: CF_MAX_TERMS,
            residual_tol: RESIDUAL_TOL,
            stability_tol: STABILITY_TOL,
            check_stability: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    /// 0-based index within its parity (or within the G-function for Braak spectra).
    pub k: usize,
    pub parity: Option<Parity>,
    pub value: EnergyValue,
    /// Final bisection interval, `lo ≤ value ≤ hi`, in the working variable.
    pub bracket: (f64, f64),
    /// Pole gap the level was searched in.
    pub gap: (f64, f64),
    /// Distance to the matching eigenvalue of the truncated Hamiltonian, found
    /// independently by Sturm bisection (parity levels), or `|F|` resp. `|G|` at the
    /// root for scan-based spectra.
    pub residual: f64,
    pub n_trunc: usize,
    pub stable: bool,
    /// Movement under truncation doubling (0 when not checked).
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub params: ModelParams,
    /// `None` for merged or Schweber-form spectra.
    pub parity: Option<Parity>,
    pub variable: Variable,
    pub options: SolveOptions,
    pub levels: Vec<EnergyLevel>,
}

impl Spectrum {
    pub fn epsilons(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value.epsilon).collect()
    }

    pub fn zetas(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value.zeta(&self.params)).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value.x(&self.params)).collect()
    }

    /// Levels of one parity, in order.
    pub fn of_parity(&self, parity: Parity) -> Vec<&EnergyLevel> {
        self.levels.iter().filter(|l| l.parity == Some(parity)).collect()
    }

    /// Both parities interleaved by energy.
    pub fn merge(a: &Spectrum, b: &Spectrum) -> Spectrum {
        let mut levels: Vec<EnergyLevel> = a.levels.iter().chain(&b.levels).cloned().collect();
        levels.sort_by(|p, q| p.value.epsilon.total_cmp(&q.value.epsilon));
        Spectrum { params: a.params, parity: None, variable: a.variable, options: a.options.clone(), levels }
    }
}
