// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameter extraction: a bounded Levenberg-Marquardt engine ([`nls_fit`])
//! and the two fitters built on it, for net-coupling curves
//! ([`fit_gcurve`]) and Purcell-limited coupler lifetimes ([`fit_purcell`]).

mod data;
mod gcurve;
mod nls;
mod purcell;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use data::{GCurve, GPoint, T1Curve, T1Point};
pub use gcurve::{fit_gcurve, gcurve_model, GCurveFitOptions, GCurveParams, RConvention};
pub use nls::{nls_fit, NlsOptions, NlsSolution, ParamSpec, DEFAULT_MAX_ITERATIONS};
pub use purcell::fit_purcell;

pub(crate) use data::parse_row;

/// Condition number of the parameter correlation matrix above which a fit
/// is flagged as unidentifiable.
pub const UNIDENTIFIABLE_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Result of a converged fit. Parameter names carry their unit suffix
/// (`_hz`, `_s`); bare names are dimensionless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: String,
    pub params: BTreeMap<String, ParamEstimate>,
    pub fixed_params: BTreeMap<String, f64>,
    /// Quantities implied by the fit that carry no standard error.
    pub derived: BTreeMap<String, f64>,
    /// Order of the rows/columns of `covariance`.
    pub covariance_params: Vec<String>,
    pub covariance: Vec<Vec<f64>>,
    /// RMS of the weighted residuals (dimensionless when uncertainties are
    /// given).
    pub residual_rms_weighted: f64,
    /// Fit-specific residual summaries with unit-suffixed names.
    pub residuals: BTreeMap<String, f64>,
    pub n_points: usize,
    pub dof: usize,
    pub iterations: usize,
    pub converged: bool,
    pub correlation_condition: f64,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl FitReport {
    /// Report skeleton from a solution; `names` replace the engine's
    /// parameter names (same order).
    pub(crate) fn from_solution(model: &str, sol: &NlsSolution) -> Self {
        let se = sol.std_errors();
        let params = sol
            .names
            .iter()
            .zip(sol.values.iter().zip(&se))
            .map(|(n, (&value, &std_error))| (n.clone(), ParamEstimate { value, std_error }))
            .collect();
        let p = sol.values.len();
        let correlation_condition = sol.correlation_condition();
        let mut warnings = Vec::new();
        if correlation_condition > UNIDENTIFIABLE_CONDITION {
            warnings.push(format!(
                "Unidentifiable: parameter correlation condition number {correlation_condition:.3e} exceeds {UNIDENTIFIABLE_CONDITION:.0e}"
            ));
        }
        Self {
            model: model.to_string(),
            params,
            fixed_params: BTreeMap::new(),
            derived: BTreeMap::new(),
            covariance_params: sol.names.clone(),
            covariance: (0..p).map(|i| (0..p).map(|j| sol.covariance[(i, j)]).collect()).collect(),
            residual_rms_weighted: sol.residual_rms(),
            residuals: BTreeMap::new(),
            n_points: sol.n_points,
            dof: sol.dof(),
            iterations: sol.iterations,
            converged: sol.converged,
            correlation_condition,
            warnings,
            notes: Vec::new(),
        }
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.params.get(name).map(|p| p.value)
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.params.get(name).map(|p| p.std_error)
    }

    pub fn is_unidentifiable(&self) -> bool {
        self.warnings.iter().any(|w| w.starts_with("Unidentifiable"))
    }
}
