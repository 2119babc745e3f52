// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Extraction of `|g12|`, `G = sqrt(|g1c g2c|)`, `E_Jc` and `r` from a
//! net-coupling curve, with the coupler charging energy and the qubit
//! frequencies held fixed.
//!
//! Initialisation is a grid over `(E_Jc, r)`. At each grid point the model
//! `g(phi) = g12 - s G^2 h(phi; E_Jc, r)` (with `s` the sign fixed by the pad
//! configuration) is linear in `(g12, G^2)`, so those two are solved for
//! exactly and the grid point is scored by its residual. The best few grid
//! points seed the full nonlinear refinement.
//!
//! `E_Jeff` is unchanged under `r -> 1/r`, so the fit works with `r <= 1`
//! and reports `1/r` when asked to.

use serde::{Deserialize, Serialize};

use super::{nls_fit, FitReport, GCurve, NlsOptions, NlsSolution, ParamEstimate, ParamSpec};
use crate::circuit::{
    CouplerModel, CouplerParams, CouplingSet, FluxBias, PadConfig, Qubit, TransmonParams,
};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Qubit charging energy used to build qubits from fixed frequencies. It
/// does not enter the net coupling.
const NOMINAL_QUBIT_EC_HZ: f64 = 200e6;

/// Which branch of the `r <-> 1/r` degeneracy to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RConvention {
    #[default]
    AtMostOne,
    AtLeastOne,
}

/// Full parameter set of the net-coupling curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GCurveParams {
    /// Signed direct coupling, Hz.
    pub g12: f64,
    /// `sqrt(|g1c g2c|)` at zero flux, Hz.
    pub g_sqrt: f64,
    pub e_jc: f64,
    pub r: f64,
    pub e_cc: f64,
    pub omega_q1: f64,
    pub omega_q2: f64,
    pub config: PadConfig,
}

/// Coupler model realising `p`.
pub fn gcurve_model(p: &GCurveParams) -> Result<CouplerModel> {
    let q = |label: &str, w: f64| -> Result<Qubit> {
        Ok(Qubit::new(TransmonParams::from_frequency(label, w, NOMINAL_QUBIT_EC_HZ)?).with_frequency(w))
    };
    Ok(CouplerModel::new(
        q("q1", p.omega_q1)?,
        q("q2", p.omega_q2)?,
        CouplerParams::new(p.e_jc, p.r, p.e_cc, p.config)?,
        CouplingSet::from_composite(p.g12, p.g_sqrt, p.config),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GCurveFitOptions {
    pub e_cc_hz: f64,
    pub omega_q1_hz: f64,
    pub omega_q2_hz: f64,
    pub config: PadConfig,
    #[serde(default)]
    pub r_convention: RConvention,
    /// Geometric grid of `E_Jc` (Hz): `(lo, hi, points)`.
    pub grid_e_jc: (f64, f64, usize),
    /// Linear grid of `r` (canonical branch): `(lo, hi, points)`.
    pub grid_r: (f64, f64, usize),
    /// Number of best grid points refined by the nonlinear fit.
    pub starts: usize,
    #[serde(skip)]
    pub nls: NlsOptions,
    #[serde(skip)]
    pub exec: Execution,
}

impl GCurveFitOptions {
    pub fn new(e_cc_hz: f64, omega_q1_hz: f64, omega_q2_hz: f64, config: PadConfig) -> Self {
        Self {
            e_cc_hz,
            omega_q1_hz,
            omega_q2_hz,
            config,
            r_convention: RConvention::AtMostOne,
            grid_e_jc: (5e9, 80e9, 48),
            grid_r: (0.2, 0.99, 40),
            starts: 3,
            nls: NlsOptions::default(),
            exec: Execution::default(),
        }
    }

    fn params(&self, g12: f64, g_sqrt: f64, e_jc: f64, r: f64) -> GCurveParams {
        GCurveParams {
            g12,
            g_sqrt,
            e_jc,
            r,
            e_cc: self.e_cc_hz,
            omega_q1: self.omega_q1_hz,
            omega_q2: self.omega_q2_hz,
            config: self.config,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("e_cc", self.e_cc_hz), ("omega_q1", self.omega_q1_hz), ("omega_q2", self.omega_q2_hz)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let (lo, hi, n) = self.grid_e_jc;
        let (rlo, rhi, rn) = self.grid_r;
        if !(lo > 0.0 && hi >= lo && n >= 1 && rlo > 0.0 && rhi >= rlo && rhi < 1.0 && rn >= 1 && self.starts >= 1) {
            return Err(Error::InvalidParameter("invalid initialisation grid".into()));
        }
        Ok(())
    }
}

const G12_BOUND_HZ: f64 = 2e9;
const G_SQRT_BOUNDS_HZ: (f64, f64) = (1e3, 5e9);
const E_JC_BOUNDS_HZ: (f64, f64) = (1e8, 2e12);
const R_BOUNDS: (f64, f64) = (1e-3, 0.999);

/// Variable-projection score of one `(E_Jc, r)` grid point: best
/// `(ssr, g12, G)`, or `None` when the coupler crosses a qubit inside the
/// data range or the point is otherwise unusable.
fn grid_point(data: &GCurve, w: &[f64], opts: &GCurveFitOptions, e_jc: f64, r: f64) -> Option<(f64, f64, f64)> {
    // unit couplings: g(phi) = g12 - s * h(phi) with G = 1
    let model = gcurve_model(&opts.params(0.0, 1.0, e_jc, r)).ok()?;
    let qs = model.qubit_frequencies();
    let mut side = [0.0f64; 2];
    let mut h = Vec::with_capacity(data.points.len());
    for p in &data.points {
        let f = FluxBias(p.phi);
        let wc = model.coupler_frequency(f).ok()?;
        for k in 0..2 {
            let s = (wc - qs[k]).signum();
            if side[k] == 0.0 {
                side[k] = s;
            } else if side[k] != s {
                return None;
            }
        }
        h.push(-model.net_coupling(f).ok()?);
    }
    // weighted least squares for y = a + b * x with x = -h (b = G^2 >= 0)
    let (mut s0, mut s1, mut s2, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((p, &hi), &wi) in data.points.iter().zip(&h).zip(w) {
        let (x, y, ww) = (-hi, p.g_hz, wi * wi);
        s0 += ww;
        s1 += ww * x;
        s2 += ww * x * x;
        sy += ww * y;
        sxy += ww * x * y;
    }
    let det = s0 * s2 - s1 * s1;
    let (mut a, mut b) = if det.abs() > 0.0 { ((s2 * sy - s1 * sxy) / det, (s0 * sxy - s1 * sy) / det) } else { (sy / s0, 0.0) };
    // also catches a NaN slope
    if b.is_nan() || b <= 0.0 {
        a = sy / s0;
        b = 0.0;
    }
    let ssr: f64 = data
        .points
        .iter()
        .zip(&h)
        .zip(w)
        .map(|((p, &hi), &wi)| ((a - b * hi - p.g_hz) * wi).powi(2))
        .sum();
    ssr.is_finite().then(|| (ssr, a, b.sqrt()))
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Fits the net-coupling curve.
///
/// Report parameters: `g12_abs_hz`, `g_sqrt_hz` (`sqrt(|g1c g2c|)` at zero
/// flux), `e_jc_hz`, `r`. The sign of `g12` is reported under `derived`.
pub fn fit_gcurve(data: &GCurve, opts: &GCurveFitOptions) -> Result<FitReport> {
    data.validate()?;
    opts.validate()?;
    if data.points.len() < 4 {
        return Err(Error::TooFewPoints { points: data.points.len(), params: 4 });
    }
    let w: Vec<f64> = data.points.iter().map(|p| 1.0 / p.sigma_hz.unwrap_or(1.0)).collect();

    let (elo, ehi, en) = opts.grid_e_jc;
    let (rlo, rhi, rn) = opts.grid_r;
    let grid: Vec<(f64, f64)> = geometric(elo, ehi, en)
        .into_iter()
        .flat_map(|e| (0..rn).map(move |i| (e, if rn == 1 { rlo } else { rlo + (rhi - rlo) * i as f64 / (rn - 1) as f64 })))
        .collect();
    let mut scored: Vec<(f64, f64, f64, f64, f64)> = exec::map(opts.exec, &grid, |&(e, r)| {
        grid_point(data, &w, opts, e, r).map(|(ssr, a, g)| (ssr, a, g, e, r))
    })
    .into_iter()
    .flatten()
    .collect();
    if scored.is_empty() {
        return Err(Error::InvalidData("no initialisation grid point is compatible with the data".into()));
    }
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    scored.truncate(opts.starts);
    log::debug!("grid starts: {scored:?}");

    let residuals = |x: &[f64]| -> Result<Vec<f64>> {
        let model = gcurve_model(&opts.params(x[0], x[1], x[2], x[3]))?;
        data.points.iter().zip(&w).map(|(p, wi)| Ok((model.net_coupling(FluxBias(p.phi))? - p.g_hz) * wi)).collect()
    };
    let fits: Vec<Result<NlsSolution>> = exec::map(opts.exec, &scored, |&(_, a, g, e, r)| {
        let specs = [
            ParamSpec::new("g12_hz", a.clamp(-G12_BOUND_HZ, G12_BOUND_HZ), -G12_BOUND_HZ, G12_BOUND_HZ),
            ParamSpec::new("g_sqrt_hz", g.clamp(G_SQRT_BOUNDS_HZ.0, G_SQRT_BOUNDS_HZ.1), G_SQRT_BOUNDS_HZ.0, G_SQRT_BOUNDS_HZ.1),
            ParamSpec::new("e_jc_hz", e.clamp(E_JC_BOUNDS_HZ.0, E_JC_BOUNDS_HZ.1), E_JC_BOUNDS_HZ.0, E_JC_BOUNDS_HZ.1),
            ParamSpec::new("r", r.clamp(R_BOUNDS.0, R_BOUNDS.1), R_BOUNDS.0, R_BOUNDS.1),
        ];
        nls_fit(residuals, &specs, &opts.nls)
    });
    let mut best: Option<NlsSolution> = None;
    let mut last_err = None;
    for f in fits {
        match f {
            Ok(s) => {
                if best.as_ref().is_none_or(|b| s.ssr < b.ssr) {
                    best = Some(s);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let sol = match (best, last_err) {
        (Some(s), _) => s,
        (None, Some(e)) => return Err(e),
        (None, None) => unreachable!("at least one start"),
    };
    Ok(report(data, opts, &sol))
}

fn report(data: &GCurve, opts: &GCurveFitOptions, sol: &NlsSolution) -> FitReport {
    let mut rep = FitReport::from_solution("net_coupling", sol);
    let [g12, g_sqrt, e_jc, r] = [sol.values[0], sol.values[1], sol.values[2], sol.values[3]];
    let sign = if g12 < 0.0 { -1.0 } else { 1.0 };
    let above = opts.r_convention == RConvention::AtLeastOne;
    let (r_rep, dr) = if above { (1.0 / r, -1.0 / (r * r)) } else { (r, 1.0) };
    // linear transform of the covariance to the reported parameters
    let t = [sign, 1.0, 1.0, dr];
    let cov: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| t[i] * sol.covariance[(i, j)] * t[j]).collect()).collect();
    let names = ["g12_abs_hz", "g_sqrt_hz", "e_jc_hz", "r"];
    let values = [g12.abs(), g_sqrt, e_jc, r_rep];
    rep.params = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.to_string(), ParamEstimate { value: values[i], std_error: cov[i][i].max(0.0).sqrt() }))
        .collect();
    rep.covariance_params = names.iter().map(|s| s.to_string()).collect();
    rep.covariance = cov;
    rep.fixed_params.insert("e_cc_hz".into(), opts.e_cc_hz);
    rep.fixed_params.insert("omega_q1_hz".into(), opts.omega_q1_hz);
    rep.fixed_params.insert("omega_q2_hz".into(), opts.omega_q2_hz);
    rep.derived.insert("g12_sign".into(), sign);
    rep.derived.insert("g1c_g2c_sign".into(), opts.config.product_sign());

    let model = gcurve_model(&opts.params(g12, g_sqrt, e_jc, r)).expect("fitted parameters are valid");
    let raw: Vec<f64> = data
        .points
        .iter()
        .map(|p| model.net_coupling(FluxBias(p.phi)).map(|g| g - p.g_hz).unwrap_or(f64::NAN))
        .collect();
    let rms = (raw.iter().map(|v| v * v).sum::<f64>() / raw.len() as f64).sqrt();
    rep.residuals.insert("residual_rms_hz".into(), rms);
    if data.has_sigma() {
        rep.residuals.insert("reduced_chi2".into(), sol.ssr / sol.dof() as f64);
    }
    rep.notes.push(format!(
        "r and 1/r give the same effective Josephson energy; reported on the r {} 1 branch",
        if above { ">=" } else { "<=" }
    ));
    rep.notes.push(format!("pad configuration: {:?}", opts.config).to_lowercase());
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::linspace;
    use crate::fit::GPoint;

    fn bump_bump() -> GCurveParams {
        GCurveParams {
            g12: -5.2e6,
            g_sqrt: 93e6,
            e_jc: 58.4e9,
            r: 0.4,
            e_cc: 113e6,
            omega_q1: 4.2e9,
            omega_q2: 4.3e9,
            config: PadConfig::Asymmetric,
        }
    }

    fn curve(p: &GCurveParams, n: usize) -> GCurve {
        let m = gcurve_model(p).unwrap();
        GCurve::new(
            linspace(0.0, 0.5, n)
                .into_iter()
                .map(|phi| GPoint { phi, g_hz: m.net_coupling(FluxBias(phi)).unwrap(), sigma_hz: None })
                .collect(),
        )
        .unwrap()
    }

    fn opts_for(p: &GCurveParams) -> GCurveFitOptions {
        GCurveFitOptions::new(p.e_cc, p.omega_q1, p.omega_q2, p.config)
    }

    #[test]
    fn noiseless_round_trip() {
        let p = bump_bump();
        let rep = fit_gcurve(&curve(&p, 25), &opts_for(&p)).unwrap();
        for (name, truth) in [("g12_abs_hz", 5.2e6), ("g_sqrt_hz", 93e6), ("e_jc_hz", 58.4e9), ("r", 0.4)] {
            let v = rep.value(name).unwrap();
            assert!(((v - truth) / truth).abs() < 1e-6, "{name}: {v} vs {truth}");
        }
        assert_eq!(rep.derived["g12_sign"], -1.0);
    }

    #[test]
    fn reports_inverse_ratio_on_request() {
        let p = GCurveParams { r: 1.0 / 3.0, ..bump_bump() };
        let mut o = opts_for(&p);
        o.r_convention = RConvention::AtLeastOne;
        let rep = fit_gcurve(&curve(&p, 25), &o).unwrap();
        assert!((rep.value("r").unwrap() - 3.0).abs() < 1e-5);
    }

    #[test]
    fn too_few_points() {
        let p = bump_bump();
        assert!(matches!(fit_gcurve(&curve(&p, 3), &opts_for(&p)), Err(Error::TooFewPoints { .. })));
    }
}
