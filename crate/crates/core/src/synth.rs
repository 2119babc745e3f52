// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic data sets.
//!
//! Every generator takes an explicit random generator; [`rng`] and
//! [`stream_rng`] build reproducible ChaCha generators from a `u64` seed, the
//! latter giving independent numbered streams for parallel ensembles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::circuit::{purcell_t1, FluxBias, PurcellParams};
use crate::error::{Error, Result};
use crate::fit::{gcurve_model, GCurve, GCurveParams, GPoint, T1Curve, T1Point};
use crate::metrics::{rb_decay, RbPoint, RbRun, RbVariant, TWO_QUBIT_DIM};

pub type SynthRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `k` of `seed`: independent of every other stream.
pub fn stream_rng(seed: u64, k: u64) -> SynthRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

fn standard_normal(r: &mut SynthRng) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").sample(r)
}

/// Net-coupling curve at the flux points `phis` with additive Gaussian noise
/// of standard deviation `sigma_hz` (recorded as the per-point uncertainty
/// when positive).
pub fn gcurve(p: &GCurveParams, phis: &[f64], sigma_hz: f64, r: &mut SynthRng) -> Result<GCurve> {
    if !(sigma_hz.is_finite() && sigma_hz >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma_hz}")));
    }
    let m = gcurve_model(p)?;
    let points = phis
        .iter()
        .map(|&phi| {
            let g = m.net_coupling(FluxBias(phi))?;
            Ok(GPoint {
                phi,
                g_hz: g + sigma_hz * standard_normal(r),
                sigma_hz: (sigma_hz > 0.0).then_some(sigma_hz),
            })
        })
        .collect::<Result<_>>()?;
    let mut c = GCurve::new(points)?;
    c.config = Some(p.config);
    Ok(c)
}

/// Purcell-limited lifetimes at coupler frequencies `omegas_hz`, each
/// multiplied by `1 + rel_noise * N(0, 1)` (redrawn until positive).
pub fn t1_curve(p: &PurcellParams, omegas_hz: &[f64], rel_noise: f64, r: &mut SynthRng) -> Result<T1Curve> {
    if !(rel_noise.is_finite() && rel_noise >= 0.0) {
        return Err(Error::InvalidParameter(format!("relative noise must be >= 0, got {rel_noise}")));
    }
    let points = omegas_hz
        .iter()
        .map(|&w| {
            let t1 = purcell_t1(p, w)?;
            let factor = loop {
                let f = 1.0 + rel_noise * standard_normal(r);
                if f > 0.0 {
                    break f;
                }
            };
            Ok(T1Point { omega_c_hz: w, t1_s: t1 * factor })
        })
        .collect::<Result<_>>()?;
    T1Curve::new(points, p.omega_r, p.kappa_r)
}

/// Decay-model randomized benchmarking: each of `randomizations` random
/// sequences per length is measured with `shots` binomial shots of the
/// survival probability `a p^m + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbSimConfig {
    pub lengths: Vec<u32>,
    pub a: f64,
    pub b: f64,
    pub p_ref: f64,
    /// Planted gate fidelity; sets `p_int`.
    pub fidelity: f64,
    /// Standard deviation of the planted fidelity between reruns of an
    /// ensemble (drift of the device between benchmark runs).
    #[serde(default)]
    pub fidelity_spread: f64,
    pub dimension: u32,
    pub shots: u64,
    pub randomizations: usize,
}

impl Default for RbSimConfig {
    fn default() -> Self {
        Self {
            lengths: vec![1, 2, 4, 8, 12, 16, 24, 32, 48, 64, 96, 128],
            a: 0.7,
            b: 0.25,
            p_ref: 0.97,
            fidelity: 0.9913,
            fidelity_spread: 0.0,
            dimension: TWO_QUBIT_DIM,
            shots: 100,
            randomizations: 30,
        }
    }
}

impl RbSimConfig {
    /// Interleaved decay constant that makes the planted fidelity exact.
    pub fn p_int(&self) -> f64 {
        let d = self.dimension as f64;
        self.p_ref * (1.0 - d / (d - 1.0) * (1.0 - self.fidelity))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = !self.lengths.is_empty()
            && self.lengths.windows(2).all(|w| w[0] < w[1])
            && self.p_ref > 0.0
            && self.p_ref <= 1.0
            && self.fidelity > 0.0
            && self.fidelity <= 1.0
            && self.fidelity_spread.is_finite()
            && self.fidelity_spread >= 0.0
            && self.dimension >= 2
            && self.shots >= 1
            && self.randomizations >= 1
            && self.p_int() > 0.0;
        if !ok {
            return Err(Error::InvalidParameter("invalid RB simulation settings".into()));
        }
        for &m in &self.lengths {
            for p in [self.p_ref, self.p_int()] {
                if !(0.0..=1.0).contains(&rb_decay(m, self.a, self.b, p)) {
                    return Err(Error::InvalidParameter(format!("survival at m = {m} leaves [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

/// One simulated survival curve with decay `p`.
pub fn rb_run(cfg: &RbSimConfig, p: f64, variant: RbVariant, r: &mut SynthRng) -> Result<RbRun> {
    let n = cfg.randomizations as f64;
    let points = cfg
        .lengths
        .iter()
        .map(|&m| {
            let prob = rb_decay(m, cfg.a, cfg.b, p).clamp(0.0, 1.0);
            let dist = Binomial::new(cfg.shots, prob).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let samples: Vec<f64> = (0..cfg.randomizations).map(|_| dist.sample(r) as f64 / cfg.shots as f64).collect();
            let mean = samples.iter().sum::<f64>() / n;
            let sem = if cfg.randomizations > 1 {
                (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            Ok(RbPoint { m, survival_mean: mean, survival_sem: Some(sem) })
        })
        .collect::<Result<_>>()?;
    RbRun::new(variant, points)
}

/// Reference and interleaved curves with the planted fidelity.
pub fn rb_pair(cfg: &RbSimConfig, r: &mut SynthRng) -> Result<(RbRun, RbRun)> {
    cfg.validate()?;
    Ok((rb_run(cfg, cfg.p_ref, RbVariant::Reference, r)?, rb_run(cfg, cfg.p_int(), RbVariant::Interleaved, r)?))
}

/// Planted fidelity of one ensemble member: `fidelity` plus Gaussian drift
/// of `fidelity_spread`, kept in `(0, 1]`.
pub fn drifted_fidelity(cfg: &RbSimConfig, r: &mut SynthRng) -> f64 {
    if cfg.fidelity_spread == 0.0 {
        return cfg.fidelity;
    }
    loop {
        let f = cfg.fidelity + cfg.fidelity_spread * standard_normal(r);
        if f > 0.0 && f <= 1.0 {
            return f;
        }
    }
}

/// Uniform draw, exposed for callers that need extra seeded randomness.
pub fn uniform(r: &mut SynthRng) -> f64 {
    r.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::PadConfig;

    #[test]
    fn reproducible() {
        let p = GCurveParams {
            g12: -5.2e6,
            g_sqrt: 93e6,
            e_jc: 58.4e9,
            r: 0.4,
            e_cc: 113e6,
            omega_q1: 4.2e9,
            omega_q2: 4.3e9,
            config: PadConfig::Asymmetric,
        };
        let phis = [0.0, 0.1, 0.2];
        let a = gcurve(&p, &phis, 5e4, &mut rng(7)).unwrap();
        let b = gcurve(&p, &phis, 5e4, &mut rng(7)).unwrap();
        let c = gcurve(&p, &phis, 5e4, &mut rng(8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn streams_differ() {
        assert_ne!(uniform(&mut stream_rng(1, 0)), uniform(&mut stream_rng(1, 1)));
        assert_eq!(uniform(&mut stream_rng(1, 3)), uniform(&mut stream_rng(1, 3)));
    }

    #[test]
    fn planted_ratio() {
        let c = RbSimConfig::default();
        assert!((c.p_int() / c.p_ref - 0.9884).abs() < 1e-12);
        let (r, i) = rb_pair(&c, &mut rng(1)).unwrap();
        assert_eq!(r.points.len(), c.lengths.len());
        assert_eq!(i.variant, RbVariant::Interleaved);
    }
}
