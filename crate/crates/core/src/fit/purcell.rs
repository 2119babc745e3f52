// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Extraction of the coupler-resonator coupling from Purcell-limited coupler
//! lifetimes.
//!
//! Noise on lifetimes is multiplicative, so the residuals are taken on the
//! log scale: `ln T1_model(omega_c) - ln T1`.

use super::{nls_fit, FitReport, NlsOptions, ParamSpec, T1Curve};
use crate::circuit::{purcell_t1, PurcellParams};
use crate::error::{Error, Result};

const G_RC_BOUNDS_HZ: (f64, f64) = (1.0, 1e11);

/// Coupling that reproduces one lifetime exactly.
fn single_point_g(curve: &T1Curve, i: usize) -> f64 {
    let p = curve.points[i];
    let detuning = p.omega_c_hz - curve.omega_r_hz;
    detuning.abs() / (2.0 * std::f64::consts::PI * curve.kappa_r_hz * p.t1_s).sqrt()
}

/// Fits `g_rc` (report parameter `g_rc_hz`) with `omega_r` and `kappa_r`
/// fixed.
pub fn fit_purcell(curve: &T1Curve, opts: &NlsOptions) -> Result<FitReport> {
    curve.validate()?;
    let n = curve.points.len();
    let mut singles: Vec<f64> = (0..n).map(|i| single_point_g(curve, i)).collect();
    singles.sort_by(f64::total_cmp);
    let init = singles[n / 2].clamp(G_RC_BOUNDS_HZ.0, G_RC_BOUNDS_HZ.1);
    if !init.is_finite() {
        return Err(Error::InvalidData("lifetimes give no finite coupling estimate".into()));
    }
    let residuals = |x: &[f64]| -> Result<Vec<f64>> {
        let params = PurcellParams::new(curve.omega_r_hz, curve.kappa_r_hz, x[0])?;
        curve.points.iter().map(|p| Ok((purcell_t1(&params, p.omega_c_hz)? / p.t1_s).ln())).collect()
    };
    let sol = nls_fit(residuals, &[ParamSpec::new("g_rc_hz", init, G_RC_BOUNDS_HZ.0, G_RC_BOUNDS_HZ.1)], opts)?;
    let mut rep = FitReport::from_solution("purcell_t1", &sol);
    rep.fixed_params.insert("omega_r_hz".into(), curve.omega_r_hz);
    rep.fixed_params.insert("kappa_r_hz".into(), curve.kappa_r_hz);
    rep.residuals.insert("residual_rms_log".into(), sol.residual_rms());
    if n < 3 {
        rep.warnings.push(format!("only {n} lifetime point(s); the standard error is not meaningful"));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::T1Point;
    use approx::assert_relative_eq;

    fn curve(g: f64, n: usize) -> T1Curve {
        let p = PurcellParams::new(7e9, 1e6, g).unwrap();
        let pts = (0..n)
            .map(|i| {
                let w = 7e9 - 200e6 - 700e6 * i as f64 / (n.max(2) - 1) as f64;
                T1Point { omega_c_hz: w, t1_s: purcell_t1(&p, w).unwrap() }
            })
            .collect();
        T1Curve::new(pts, 7e9, 1e6).unwrap()
    }

    #[test]
    fn noiseless_round_trip() {
        let rep = fit_purcell(&curve(54e6, 10), &NlsOptions::default()).unwrap();
        assert_relative_eq!(rep.value("g_rc_hz").unwrap(), 54e6, max_relative = 1e-9);
    }

    #[test]
    fn single_point_matches_closed_form() {
        let c = T1Curve::new(vec![T1Point { omega_c_hz: 6.4e9, t1_s: 12e-6 }], 7e9, 1e6).unwrap();
        let expect = 600e6 * (1.0 / (2.0 * std::f64::consts::PI * 1e6 * 12e-6)).sqrt();
        let rep = fit_purcell(&c, &NlsOptions::default()).unwrap();
        assert_relative_eq!(rep.value("g_rc_hz").unwrap(), expect, max_relative = 1e-10);
        assert!(!rep.warnings.is_empty());
    }
}
