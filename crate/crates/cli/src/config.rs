// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Device configuration file (`"schema": "mcoupler.device/1"`).
//!
//! All quantities are in Hz, seconds and metres. Relative file paths are
//! resolved against the directory of the configuration file. Each command
//! reads only the sections it needs and names any missing one.

use std::path::{Path, PathBuf};

use mcoupler::capnet::{model_from_network, Design, NetworkFile};
use mcoupler::circuit::{CouplerModel, CouplerParams, CouplingSet, PadConfig, Qubit, TransmonParams};
use mcoupler::fit::RConvention;
use mcoupler::metrics::{CoherenceSet, GateTiming};
use mcoupler::synth::RbSimConfig;
use mcoupler::Error;
use serde::{Deserialize, Serialize};

pub const DEVICE_SCHEMA: &str = "mcoupler.device/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<[QubitSpec; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupler: Option<CouplerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<CouplingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance_tol_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purcell: Option<PurcellSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateTiming>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub find_zero: Option<BracketSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_g: Option<FitGSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rb: Option<RbSpec>,
}

/// A qubit given by its frequency (plus charging energy for the
/// anharmonicity) or by its junction and charging energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    pub label: String,
    pub e_c_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_j_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerSpec {
    pub e_jc_hz: f64,
    pub r: f64,
    pub e_cc_hz: f64,
    pub config: PadConfig,
}

/// Either explicit signed couplings or `g12` plus the composite
/// `sqrt(|g1c g2c|)` with signs from the coupler's pad configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub g12_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_sqrt_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1c_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2c_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkRef {
    pub path: PathBuf,
    pub design: Design,
    pub height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurcellSpec {
    pub omega_r_hz: f64,
    pub kappa_r_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_rc_hz: Option<f64>,
}

/// Coherence times in seconds; the static qubit-2 values are optional
/// because they may be unmeasured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceSpec {
    pub t1_q1_s: f64,
    pub t2s_q1_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_q2_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2s_q2_s: Option<f64>,
    pub t1_q2_mod_s: f64,
    pub t2s_q2_mod_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub phi_min: f64,
    pub phi_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySpec {
    pub network: PathBuf,
    pub design: Design,
    pub heights_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitGSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub r_convention: RConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interleaved: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<RbSimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reruns: Option<usize>,
}

fn missing(section: &str) -> Error {
    Error::InvalidParameter(format!("configuration is missing the `{section}` section"))
}

impl DeviceConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, Error> {
        let mut c: DeviceConfig = serde_json::from_str(text)?;
        if c.schema != DEVICE_SCHEMA {
            return Err(Error::InvalidParameter(format!("`schema` must be `{DEVICE_SCHEMA}`, got `{}`", c.schema)));
        }
        c.resolve_paths(base);
        c.check_paths()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(n) = &mut self.network {
            fix(&mut n.path);
        }
        if let Some(s) = &mut self.sensitivity {
            fix(&mut s.network);
        }
        if let Some(f) = self.fit_g.as_mut().and_then(|f| f.data.as_mut()) {
            fix(f);
        }
        if let Some(rb) = &mut self.rb {
            for p in [&mut rb.reference, &mut rb.interleaved].into_iter().flatten() {
                fix(p);
            }
        }
    }

    fn check_paths(&self) -> Result<(), Error> {
        let mut paths: Vec<(&str, &Path)> = Vec::new();
        if let Some(n) = &self.network {
            paths.push(("network.path", &n.path));
        }
        if let Some(s) = &self.sensitivity {
            paths.push(("sensitivity.network", &s.network));
        }
        if let Some(p) = self.fit_g.as_ref().and_then(|f| f.data.as_deref()) {
            paths.push(("fit_g.data", p));
        }
        if let Some(rb) = &self.rb {
            for (name, p) in [("rb.reference", &rb.reference), ("rb.interleaved", &rb.interleaved)] {
                if let Some(p) = p {
                    paths.push((name, p));
                }
            }
        }
        for (name, p) in paths {
            if !p.exists() {
                return Err(Error::InvalidParameter(format!("`{name}` refers to missing file {}", p.display())));
            }
        }
        Ok(())
    }

    fn qubit(spec: &QubitSpec) -> Result<Qubit, Error> {
        match (spec.frequency_hz, spec.e_j_hz) {
            (Some(f), None) => Ok(Qubit::new(TransmonParams::from_frequency(&spec.label, f, spec.e_c_hz)?).with_frequency(f)),
            (None, Some(e_j)) => Ok(Qubit::new(TransmonParams::new(&spec.label, e_j, spec.e_c_hz)?)),
            _ => Err(Error::InvalidParameter(format!(
                "qubit `{}` needs exactly one of `frequency_hz` or `e_j_hz`",
                spec.label
            ))),
        }
    }

    /// The coupler model, from explicit couplings or from the network.
    pub fn model(&self) -> Result<CouplerModel, Error> {
        let mut model = match (&self.couplings, &self.network) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter("give either `couplings` or `network`, not both".into()))
            }
            (None, None) => return Err(Error::InvalidParameter("configuration needs a `couplings` or `network` section".into())),
            (None, Some(n)) => {
                let file = NetworkFile::load(&n.path)?;
                let conns = n.design.connections(&file)?;
                model_from_network(&file.network()?, &conns, &file.roles()?, n.height_m)?
            }
            (Some(cs), None) => {
                let qs = self.qubits.as_ref().ok_or_else(|| missing("qubits"))?;
                let c = self.coupler.as_ref().ok_or_else(|| missing("coupler"))?;
                let coupler = CouplerParams::new(c.e_jc_hz, c.r, c.e_cc_hz, c.config)?;
                let couplings = match (cs.g_sqrt_hz, cs.g1c_hz, cs.g2c_hz) {
                    (Some(g), None, None) => CouplingSet::from_composite(cs.g12_hz, g, c.config),
                    (None, Some(g1c), Some(g2c)) => CouplingSet { g12: cs.g12_hz, g1c, g2c },
                    _ => {
                        return Err(Error::InvalidParameter(
                            "`couplings` needs either `g_sqrt_hz` or both `g1c_hz` and `g2c_hz`".into(),
                        ))
                    }
                };
                CouplerModel::new(Self::qubit(&qs[0])?, Self::qubit(&qs[1])?, coupler, couplings)
            }
        };
        if let Some(t) = self.resonance_tol_hz {
            model.resonance_tol_hz = t;
        }
        model.validate()?;
        Ok(model)
    }

    pub fn coupler_spec(&self) -> Result<&CouplerSpec, Error> {
        self.coupler.as_ref().ok_or_else(|| missing("coupler"))
    }

    pub fn qubit_frequencies(&self) -> Result<[f64; 2], Error> {
        let qs = self.qubits.as_ref().ok_or_else(|| missing("qubits"))?;
        Ok([Self::qubit(&qs[0])?.frequency(), Self::qubit(&qs[1])?.frequency()])
    }

    pub fn purcell(&self) -> Result<&PurcellSpec, Error> {
        self.purcell.as_ref().ok_or_else(|| missing("purcell"))
    }

    pub fn gate(&self) -> Result<GateTiming, Error> {
        self.gate.ok_or_else(|| missing("gate"))
    }

    /// Coherence set; the static qubit-2 values must be present unless the
    /// caller explicitly assumes they equal the modulated ones.
    pub fn coherence(&self, assume_static_equals_modulated: bool) -> Result<CoherenceSet, Error> {
        let c = self.coherence.as_ref().ok_or_else(|| missing("coherence"))?;
        let (t1, t2) = match (c.t1_q2_s, c.t2s_q2_s, assume_static_equals_modulated) {
            (Some(t1), Some(t2), false) => (t1, t2),
            (_, _, true) => {
                if c.t1_q2_s.is_some() || c.t2s_q2_s.is_some() {
                    return Err(Error::InvalidParameter(
                        "static qubit-2 coherence given together with --assume-static-equals-modulated; drop one".into(),
                    ));
                }
                (c.t1_q2_mod_s, c.t2s_q2_mod_s)
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "coherence.t1_q2_s and coherence.t2s_q2_s (static qubit 2) are required; \
                     pass --assume-static-equals-modulated to use the modulated values instead"
                        .into(),
                ))
            }
        };
        Ok(CoherenceSet {
            t1_q1_s: c.t1_q1_s,
            t2s_q1_s: c.t2s_q1_s,
            t1_q2_s: t1,
            t2s_q2_s: t2,
            t1_q2_mod_s: c.t1_q2_mod_s,
            t2s_q2_mod_s: c.t2s_q2_mod_s,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"{"schema": "mcoupler.device/1",
        "qubits": [{"label": "q1", "frequency_hz": 4.2e9, "e_c_hz": 2e8}, {"label": "q2", "frequency_hz": 4.3e9, "e_c_hz": 2e8}],
        "coupler": {"e_jc_hz": 58.4e9, "r": 0.4, "e_cc_hz": 113e6, "config": "asymmetric"},
        "couplings": {"g12_hz": -5.2e6, "g_sqrt_hz": 93e6}}"#;

    #[test]
    fn builds_model() {
        let c = DeviceConfig::parse(MIN, Path::new(".")).unwrap();
        let m = c.model().unwrap();
        assert_eq!(m.couplings.g2c, -93e6);
        assert_eq!(m.qubit_frequencies(), [4.2e9, 4.3e9]);
    }

    #[test]
    fn missing_coupler_is_named() {
        let text = MIN.replace(r#""coupler": {"e_jc_hz": 58.4e9, "r": 0.4, "e_cc_hz": 113e6, "config": "asymmetric"},"#, "");
        let err = DeviceConfig::parse(&text, Path::new(".")).unwrap().model().unwrap_err();
        assert!(err.to_string().contains("coupler"), "{err}");
    }

    #[test]
    fn rejects_schema_and_unknown_fields() {
        assert!(DeviceConfig::parse(&MIN.replace("device/1", "device/9"), Path::new(".")).is_err());
        assert!(DeviceConfig::parse(&MIN.replace("\"label\": \"q1\"", "\"name\": \"q1\""), Path::new(".")).is_err());
    }

    #[test]
    fn static_coherence_policy() {
        let text = MIN.replace(
            r#""couplings""#,
            r#""coherence": {"t1_q1_s": 1.64e-5, "t2s_q1_s": 8.4e-6, "t1_q2_mod_s": 1.15e-5, "t2s_q2_mod_s": 5.7e-6}, "couplings""#,
        );
        let c = DeviceConfig::parse(&text, Path::new(".")).unwrap();
        assert!(c.coherence(false).is_err());
        assert_eq!(c.coherence(true).unwrap().t1_q2_s, 1.15e-5);
    }
}
