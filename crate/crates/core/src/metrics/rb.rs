// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Randomized-benchmarking decay fits and interleaved gate fidelity.
//!
//! Survival curves follow `A p^m + B`. The interleaved estimate uses the
//! standard two-qubit convention (dimension `d = 4`):
//! `F = 1 - (d - 1)/d * (1 - p_int / p_ref)`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fit::{nls_fit, parse_row, FitReport, NlsOptions, ParamSpec};
use crate::synth::{self, RbSimConfig};

/// Hilbert-space dimension of a two-qubit gate.
pub const TWO_QUBIT_DIM: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RbVariant {
    Reference,
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbPoint {
    pub m: u32,
    pub survival_mean: f64,
    pub survival_sem: Option<f64>,
}

/// Mean survival probability per sequence length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbRun {
    pub variant: RbVariant,
    pub points: Vec<RbPoint>,
}

impl RbRun {
    pub fn new(variant: RbVariant, points: Vec<RbPoint>) -> Result<Self> {
        let r = Self { variant, points };
        r.validate()?;
        Ok(r)
    }

    pub fn sequence_lengths(&self) -> Vec<u32> {
        self.points.iter().map(|p| p.m).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let with_sem = self.points.iter().filter(|p| p.survival_sem.is_some()).count();
        if with_sem != 0 && with_sem != self.points.len() {
            return Err(Error::InvalidData("survival_sem must be given for all points or none".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(0.0..=1.0).contains(&p.survival_mean) {
                return Err(Error::InvalidData(format!("point {i}: survival {} outside [0, 1]", p.survival_mean)));
            }
            if let Some(s) = p.survival_sem {
                if !(s.is_finite() && s >= 0.0) {
                    return Err(Error::InvalidData(format!("point {i}: survival_sem must be >= 0, got {s}")));
                }
            }
            if i > 0 && p.m <= self.points[i - 1].m {
                return Err(Error::InvalidData("sequence lengths must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    /// CSV with header `m,survival_mean[,survival_sem]`.
    pub fn read_csv<R: Read>(reader: R, variant: RbVariant) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        let sem = match cols.as_slice() {
            ["m", "survival_mean"] => false,
            ["m", "survival_mean", "survival_sem"] => true,
            _ => {
                return Err(Error::InvalidData(format!(
                    "expected header `m,survival_mean[,survival_sem]`, got `{}`",
                    cols.join(",")
                )))
            }
        };
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let m: u32 = rec
                .get(0)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidData(format!("row {}: m must be a non-negative integer", i + 1)))?;
            let v = parse_row(&rec, i, if sem { 3 } else { 2 })?;
            points.push(RbPoint { m, survival_mean: v[1], survival_sem: sem.then(|| v[2]) });
        }
        Self::new(variant, points)
    }

    pub fn load(path: impl AsRef<Path>, variant: RbVariant) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, variant)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let sem = self.points.first().is_some_and(|p| p.survival_sem.is_some());
        if sem {
            w.write_record(["m", "survival_mean", "survival_sem"])?;
        } else {
            w.write_record(["m", "survival_mean"])?;
        }
        for p in &self.points {
            let mut row = vec![p.m.to_string(), p.survival_mean.to_string()];
            if let Some(s) = p.survival_sem {
                row.push(s.to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Survival probability `a p^m + b`.
pub fn rb_decay(m: u32, a: f64, b: f64, p: f64) -> f64 {
    a * p.powi(m as i32) + b
}

/// Interleaved gate fidelity from reference and interleaved decay
/// constants.
pub fn irb_gate_fidelity(p_ref: f64, p_int: f64, d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {d}")));
    }
    if !(p_ref > 0.0 && p_ref <= 1.0 && p_int > 0.0) {
        return Err(Error::InvalidParameter(format!("decays must satisfy 0 < p <= 1, got p_ref {p_ref}, p_int {p_int}")));
    }
    if p_int > p_ref {
        return Err(Error::InvalidDecay { p_ref, p_int });
    }
    let d = d as f64;
    Ok(1.0 - (d - 1.0) / d * (1.0 - p_int / p_ref))
}

/// Fitted decay with the full report (parameters `a`, `b`, `p`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbFit {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub p_std_error: f64,
    pub report: FitReport,
}

const P_BOUNDS: (f64, f64) = (1e-6, 1.0);

/// Least-squares fit of `a p^m + b` (weighted by the standard errors when
/// present), initialised from a grid over `p` with `a`, `b` solved linearly.
pub fn fit_rb(run: &RbRun, opts: &NlsOptions) -> Result<RbFit> {
    run.validate()?;
    if run.points.len() < 4 {
        return Err(Error::TooFewPoints { points: run.points.len(), params: 3 });
    }
    // a zero standard error cannot be used as a weight
    let weighted = run.points.iter().all(|p| p.survival_sem.is_some_and(|s| s > 0.0));
    let w: Vec<f64> =
        run.points.iter().map(|p| if weighted { 1.0 / p.survival_sem.unwrap_or(1.0) } else { 1.0 }).collect();

    // linear least squares for (a, b) at fixed p
    let solve = |p: f64| -> (f64, f64, f64) {
        let (mut s0, mut s1, mut s2, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (pt, wi) in run.points.iter().zip(&w) {
            let (x, y, ww) = (p.powi(pt.m as i32), pt.survival_mean, wi * wi);
            s0 += ww;
            s1 += ww * x;
            s2 += ww * x * x;
            sy += ww * y;
            sxy += ww * x * y;
        }
        let det = s0 * s2 - s1 * s1;
        let (a, b) = if det.abs() > 1e-300 { ((s0 * sxy - s1 * sy) / det, (s2 * sy - s1 * sxy) / det) } else { (0.0, sy / s0) };
        let ssr = run.points.iter().zip(&w).map(|(pt, wi)| ((rb_decay(pt.m, a, b, p) - pt.survival_mean) * wi).powi(2)).sum();
        (ssr, a, b)
    };
    let (mut best, mut p0) = ((f64::INFINITY, 0.0, 0.0), 0.5);
    for i in 0..=400 {
        // dense near 1, where decays live
        let p = 1.0 - 0.5 * (1e-5f64 / 0.5).powf(i as f64 / 400.0);
        let s = solve(p);
        if s.0 < best.0 {
            best = s;
            p0 = p;
        }
    }
    let (_, a0, b0) = best;
    let residuals = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(run.points.iter().zip(&w).map(|(pt, wi)| (rb_decay(pt.m, x[0], x[1], x[2]) - pt.survival_mean) * wi).collect())
    };
    let specs = [
        ParamSpec::new("a", a0.clamp(-2.0, 2.0), -2.0, 2.0),
        ParamSpec::new("b", b0.clamp(-1.0, 2.0), -1.0, 2.0),
        ParamSpec::new("p", p0.clamp(P_BOUNDS.0, P_BOUNDS.1), P_BOUNDS.0, P_BOUNDS.1),
    ];
    let sol = nls_fit(residuals, &specs, opts)?;
    // measured standard errors set the scale; rescaling by the reduced
    // chi-square would make the intervals Student-t with only n - 3 dof
    let sol = if weighted { sol.with_absolute_sigma() } else { sol };
    let mut report = FitReport::from_solution("rb_decay", &sol);
    report.residuals.insert("reduced_chi2".into(), sol.ssr / sol.dof() as f64);
    report.notes.push(format!("variant: {:?}", run.variant).to_lowercase());
    report.notes.push(if weighted {
        "covariance from the survival standard errors (absolute sigma)".to_string()
    } else {
        "unweighted; covariance scaled by the residual variance".to_string()
    });
    let se = sol.std_errors();
    Ok(RbFit { a: sol.values[0], b: sol.values[1], p: sol.values[2], p_std_error: se[2], report })
}

/// Interleaved fidelity with first-order propagated standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrbResult {
    pub fidelity: f64,
    pub fidelity_std_error: f64,
    pub reference: RbFit,
    pub interleaved: RbFit,
    pub dimension: u32,
}

pub fn irb_from_runs(reference: &RbRun, interleaved: &RbRun, d: u32, opts: &NlsOptions) -> Result<IrbResult> {
    let r = fit_rb(reference, opts)?;
    let i = fit_rb(interleaved, opts)?;
    let fidelity = irb_gate_fidelity(r.p, i.p, d)?;
    let ratio = i.p / r.p;
    let rel = ((i.p_std_error / i.p).powi(2) + (r.p_std_error / r.p).powi(2)).sqrt();
    let fidelity_std_error = (d as f64 - 1.0) / d as f64 * ratio * rel;
    Ok(IrbResult { fidelity, fidelity_std_error, reference: r, interleaved: i, dimension: d })
}

/// Simulated-and-refitted interleaved fidelities for `reruns` independent
/// noise streams of `seed`; with a non-zero `fidelity_spread` each rerun
/// first draws its own planted fidelity. Stream `k` is the same regardless
/// of scheduling.
pub fn simulate_irb_reruns(cfg: &RbSimConfig, reruns: usize, seed: u64, exec: Execution) -> Result<Vec<f64>> {
    cfg.validate()?;
    let ks: Vec<u64> = (0..reruns as u64).collect();
    exec::map(exec, &ks, |&k| {
        let mut rng = synth::stream_rng(seed, k);
        let member = RbSimConfig { fidelity: synth::drifted_fidelity(cfg, &mut rng), fidelity_spread: 0.0, ..cfg.clone() };
        let (reference, interleaved) = synth::rb_pair(&member, &mut rng)?;
        Ok(irb_from_runs(&reference, &interleaved, cfg.dimension, &NlsOptions::default())?.fidelity)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn decay_examples() {
        assert_eq!(rb_decay(0, 0.3, 0.6, 0.9), 0.3 + 0.6);
        assert_eq!(rb_decay(17, 0.3, 0.6, 1.0), 0.3 + 0.6);
        assert!((rb_decay(100, 0.5, 0.5, 0.99) - 0.6830).abs() < 5e-5);
    }

    #[test]
    fn irb_examples() {
        assert_eq!(irb_gate_fidelity(0.97, 0.97, 4).unwrap(), 1.0);
        assert_relative_eq!(irb_gate_fidelity(1.0, 0.98, 2).unwrap(), 0.99, max_relative = 1e-12);
        let ratio = 1.0 - 4.0 / 3.0 * 0.0087;
        assert_relative_eq!(ratio, 0.9884, max_relative = 1e-12);
        assert_relative_eq!(irb_gate_fidelity(0.97, 0.97 * ratio, 4).unwrap(), 0.9913, max_relative = 1e-12);
        assert!(matches!(irb_gate_fidelity(0.9, 0.95, 4), Err(Error::InvalidDecay { .. })));
    }

    #[test]
    fn noiseless_fit_is_exact() {
        let pts = [1u32, 2, 4, 8, 16, 32, 64, 128]
            .iter()
            .map(|&m| RbPoint { m, survival_mean: rb_decay(m, 0.7, 0.25, 0.97), survival_sem: None })
            .collect();
        let f = fit_rb(&RbRun::new(RbVariant::Reference, pts).unwrap(), &NlsOptions::default()).unwrap();
        assert_relative_eq!(f.p, 0.97, max_relative = 1e-9);
        assert_relative_eq!(f.a, 0.7, max_relative = 1e-7);
        assert_relative_eq!(f.b, 0.25, max_relative = 1e-7);
    }

    #[test]
    fn csv_and_invariants() {
        let r = RbRun::read_csv("m,survival_mean,survival_sem\n1,0.93,0.01\n4,0.88,0.01\n".as_bytes(), RbVariant::Reference).unwrap();
        assert_eq!(r.sequence_lengths(), vec![1, 4]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(RbRun::read_csv(buf.as_slice(), RbVariant::Reference).unwrap(), r);
        assert!(RbRun::read_csv("m,survival_mean\n1,1.2\n".as_bytes(), RbVariant::Reference).is_err());
        assert!(RbRun::read_csv("m,survival_mean\n4,0.9\n2,0.95\n".as_bytes(), RbVariant::Reference).is_err());
        assert!(RbRun::read_csv("m,survival_mean\n1.5,0.9\n".as_bytes(), RbVariant::Reference).is_err());
    }
}
