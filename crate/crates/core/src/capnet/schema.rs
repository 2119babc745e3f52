// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON network description.
//!
//! ```json
//! {
//!   "schema": "mcoupler.network/1",
//!   "nodes": [ {"id": 0, "kind": "ground"}, {"id": 1, "kind": "pad", "owner": "q1"} ],
//!   "capacitances_ff": [ {"a": 1, "b": 0, "value": 70.0} ],
//!   "elements": [
//!     {"label": "q1", "role": "qubit", "pads": [1, 2], "e_j_hz": 11.2e9},
//!     {"label": "coupler", "role": "coupler", "pads": [3, 4], "e_jc_hz": 58.4e9, "r": 0.4}
//!   ],
//!   "connections": [
//!     {"a": 4, "b": 5, "kind": "bump", "paddle_area_um2": 160000.0, "paddle_fringe_ff": 2.0}
//!   ],
//!   "roles": {"q1": "q1", "q2": "q2", "coupler": "coupler"}
//! }
//! ```
//!
//! Capacitances are in femtofarads and paddle areas in square micrometres.
//! Each connection is realised as declared unless a sweep design overrides
//! it; a connection that may be realised as a paddle needs the paddle
//! geometry even when its declared kind is `bump`. `roles` is optional and
//! defaults to the first two qubits and the first coupler.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    CapNetwork, Capacitance, ConnectionKind, Element, ElementRole, InterChipConnection, Josephson, Node, NodeId,
    SweepRoles,
};
use crate::consts::FEMTOFARAD;
use crate::error::{Error, Result};

pub const NETWORK_SCHEMA: &str = "mcoupler.network/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub schema: String,
    pub nodes: Vec<Node>,
    pub capacitances_ff: Vec<CapacitanceSpec>,
    pub elements: Vec<ElementSpec>,
    #[serde(default)]
    pub connections: Vec<ConnectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<SweepRoles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitanceSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub label: String,
    pub role: ElementRole,
    pub pads: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_j_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_jc_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredKind {
    Paddle,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: DeclaredKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paddle_area_um2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paddle_fringe_ff: Option<f64>,
}

impl ConnectionSpec {
    /// The connection realised as a bump or as a paddle.
    pub fn realize(&self, as_paddle: bool) -> Result<InterChipConnection> {
        let kind = if as_paddle {
            let area = self.paddle_area_um2.ok_or_else(|| {
                Error::InvalidNetwork(format!("connection {}-{} has no paddle_area_um2", self.a, self.b))
            })?;
            ConnectionKind::Paddle { area: area * 1e-12, fringe: self.paddle_fringe_ff.unwrap_or(0.0) * FEMTOFARAD }
        } else {
            ConnectionKind::Bump
        };
        Ok(InterChipConnection { kind, node_a: self.a, node_b: self.b })
    }

    pub fn declared(&self) -> Result<InterChipConnection> {
        self.realize(self.kind == DeclaredKind::Paddle)
    }
}

impl ElementSpec {
    fn to_element(&self) -> Result<Element> {
        let josephson = match (self.e_j_hz, self.e_jc_hz, self.r) {
            (Some(e_j), None, None) => Josephson::Junction { e_j },
            (None, Some(e_jc), r) => Josephson::Squid { e_jc, r: r.unwrap_or(1.0) },
            _ => {
                return Err(Error::InvalidNetwork(format!(
                    "element `{}` needs either e_j_hz or e_jc_hz (+ r)",
                    self.label
                )))
            }
        };
        Ok(Element { label: self.label.clone(), role: self.role, pads: self.pads.clone(), josephson })
    }
}

impl NetworkFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: NetworkFile = serde_json::from_str(text)?;
        if f.schema != NETWORK_SCHEMA {
            return Err(Error::InvalidNetwork(format!("schema must be `{NETWORK_SCHEMA}`, got `{}`", f.schema)));
        }
        f.network()?.validate()?;
        Ok(f)
    }

    pub fn network(&self) -> Result<CapNetwork> {
        Ok(CapNetwork {
            nodes: self.nodes.clone(),
            caps: self
                .capacitances_ff
                .iter()
                .map(|c| Capacitance { a: c.a, b: c.b, farads: c.value * FEMTOFARAD })
                .collect(),
            elements: self.elements.iter().map(ElementSpec::to_element).collect::<Result<_>>()?,
        })
    }

    pub fn declared_connections(&self) -> Result<Vec<InterChipConnection>> {
        self.connections.iter().map(ConnectionSpec::declared).collect()
    }

    pub fn roles(&self) -> Result<SweepRoles> {
        if let Some(r) = &self.roles {
            return Ok(r.clone());
        }
        let qubits: Vec<_> = self.elements.iter().filter(|e| e.role == ElementRole::Qubit).collect();
        let coupler = self.elements.iter().find(|e| e.role == ElementRole::Coupler);
        match (qubits.as_slice(), coupler) {
            ([a, b, ..], Some(c)) => {
                Ok(SweepRoles { q1: a.label.clone(), q2: b.label.clone(), coupler: c.label.clone() })
            }
            _ => Err(Error::InvalidNetwork("network needs two qubit elements and one coupler".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": "mcoupler.network/1",
        "nodes": [{"id": 0, "kind": "ground"}, {"id": 1, "kind": "pad"}],
        "capacitances_ff": [{"a": 1, "b": 0, "value": 80.0}],
        "elements": [{"label": "q", "role": "qubit", "pads": [1], "e_j_hz": 1e10}]
    }"#;

    #[test]
    fn parses_minimal() {
        let f = NetworkFile::parse(MINIMAL).unwrap();
        let net = f.network().unwrap();
        assert_eq!(net.caps[0].farads, 80.0 * FEMTOFARAD);
    }

    #[test]
    fn rejects_wrong_schema_and_unknown_fields() {
        assert!(NetworkFile::parse(&MINIMAL.replace("mcoupler.network/1", "other")).is_err());
        assert!(NetworkFile::parse(&MINIMAL.replace("\"value\"", "\"farads\"")).is_err());
    }

    #[test]
    fn bump_without_geometry_cannot_become_paddle() {
        let c = ConnectionSpec { a: 1, b: 2, kind: DeclaredKind::Bump, paddle_area_um2: None, paddle_fringe_ff: None };
        assert!(c.declared().is_ok());
        assert!(c.realize(true).is_err());
    }
}
