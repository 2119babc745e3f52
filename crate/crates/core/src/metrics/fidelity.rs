// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Coherence-limited fidelity of a flux-modulated CZ gate.
//!
//! Qubit 2 is the modulated qubit; quantities with a `_mod` suffix are its
//! coherence times while modulated. The gate is a flat top of length
//! `t_flat` with ramps of total length `t_pad`, and
//!
//! ```text
//! 1 - F = (1/5)   (1/T1_q1  + 1/T1_q2_mod)  t_pad
//!       + (2/5)   (1/T2s_q1 + 1/T2s_q2_mod) t_pad
//!       + (19/160)(1/T1_q2  + 1/T1_q2_mod)  t_flat
//!       + ((61/80)/T2s_q2 + (29/80)/T2s_q2_mod) t_flat
//! ```
//!
//! The expression is evaluated exactly as written, including the pairing
//! of qubit 1 with the modulated qubit 2 in the ramp terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coherence times in seconds; `f64::INFINITY` means no decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSet {
    pub t1_q1_s: f64,
    pub t2s_q1_s: f64,
    pub t1_q2_s: f64,
    pub t2s_q2_s: f64,
    pub t1_q2_mod_s: f64,
    pub t2s_q2_mod_s: f64,
}

impl CoherenceSet {
    /// Static qubit-2 times taken equal to the modulated ones.
    pub fn static_equals_modulated(t1_q1_s: f64, t2s_q1_s: f64, t1_q2_mod_s: f64, t2s_q2_mod_s: f64) -> Self {
        Self { t1_q1_s, t2s_q1_s, t1_q2_s: t1_q2_mod_s, t2s_q2_s: t2s_q2_mod_s, t1_q2_mod_s, t2s_q2_mod_s }
    }

    fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("t1_q1_s", self.t1_q1_s),
            ("t2s_q1_s", self.t2s_q1_s),
            ("t1_q2_s", self.t1_q2_s),
            ("t2s_q2_s", self.t2s_q2_s),
            ("t1_q2_mod_s", self.t1_q2_mod_s),
            ("t2s_q2_mod_s", self.t2s_q2_mod_s),
        ]
    }

    /// Errors on non-positive times; returns warnings for pairs with
    /// `T2* > 2 T1`, which measured data may show within noise.
    pub fn validate(&self) -> Result<Vec<String>> {
        for (name, v) in self.fields() {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let mut warnings = Vec::new();
        for (label, t1, t2) in [
            ("q1", self.t1_q1_s, self.t2s_q1_s),
            ("q2", self.t1_q2_s, self.t2s_q2_s),
            ("q2 modulated", self.t1_q2_mod_s, self.t2s_q2_mod_s),
        ] {
            if t2 > 2.0 * t1 {
                let msg = format!("{label}: T2* = {t2:e} s exceeds 2 T1 = {:e} s", 2.0 * t1);
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        Ok(warnings)
    }
}

/// Gate durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTiming {
    pub t_flat_s: f64,
    pub t_pad_s: f64,
}

impl GateTiming {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t_flat_s", self.t_flat_s), ("t_pad_s", self.t_pad_s)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Coherence-limited CZ fidelity.
pub fn coherence_limited_fidelity(c: &CoherenceSet, t: &GateTiming) -> Result<f64> {
    c.validate()?;
    t.validate()?;
    let g = |x: f64| 1.0 / x;
    let infidelity = (1.0 / 5.0) * (g(c.t1_q1_s) + g(c.t1_q2_mod_s)) * t.t_pad_s
        + (2.0 / 5.0) * (g(c.t2s_q1_s) + g(c.t2s_q2_mod_s)) * t.t_pad_s
        + (19.0 / 160.0) * (g(c.t1_q2_s) + g(c.t1_q2_mod_s)) * t.t_flat_s
        + ((61.0 / 80.0) * g(c.t2s_q2_s) + (29.0 / 80.0) * g(c.t2s_q2_mod_s)) * t.t_flat_s;
    Ok(1.0 - infidelity)
}

#[cfg(test)]
mod tests {
    use super::*;

    const US: f64 = 1e-6;
    const NS: f64 = 1e-9;

    fn timing() -> GateTiming {
        GateTiming { t_flat_s: 56.0 * NS, t_pad_s: 4.0 * NS }
    }

    #[test]
    fn infinite_coherence_is_perfect() {
        let inf = f64::INFINITY;
        let c = CoherenceSet::static_equals_modulated(inf, inf, inf, inf);
        assert_eq!(coherence_limited_fidelity(&c, &timing()).unwrap(), 1.0);
    }

    #[test]
    fn reference_values() {
        let c = CoherenceSet::static_equals_modulated(16.4 * US, 8.4 * US, 11.5 * US, 5.7 * US);
        let f = coherence_limited_fidelity(&c, &timing()).unwrap();
        assert!((f - 0.98720).abs() < 5e-5, "{f}");
    }

    #[test]
    fn linear_in_rates() {
        let c = CoherenceSet::static_equals_modulated(16.4 * US, 8.4 * US, 11.5 * US, 5.7 * US);
        let half = CoherenceSet::static_equals_modulated(8.2 * US, 4.2 * US, 5.75 * US, 2.85 * US);
        let (f1, f2) = (coherence_limited_fidelity(&c, &timing()).unwrap(), coherence_limited_fidelity(&half, &timing()).unwrap());
        assert!(((1.0 - f2) - 2.0 * (1.0 - f1)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input_and_warns() {
        let mut c = CoherenceSet::static_equals_modulated(16.4 * US, 8.4 * US, 11.5 * US, 5.7 * US);
        c.t1_q1_s = 0.0;
        assert!(coherence_limited_fidelity(&c, &timing()).is_err());
        let c = CoherenceSet::static_equals_modulated(1.0 * US, 3.0 * US, 11.5 * US, 5.7 * US);
        assert_eq!(c.validate().unwrap().len(), 1);
        assert!(coherence_limited_fidelity(&CoherenceSet::static_equals_modulated(1.0, 1.0, 1.0, 1.0), &GateTiming { t_flat_s: -1.0, t_pad_s: 0.0 }).is_err());
    }
}
