// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Lumped capacitance networks of multi-chip pad layouts.
//!
//! A [`CapNetwork`] lists pads (plus one ground node), the pairwise
//! capacitances between them and the Josephson elements that own one pad
//! (grounded transmon) or two pads (floating transmon or coupler). Inter-chip
//! [`InterChipConnection`]s join pads on facing chips either through a
//! vacuum-gap paddle, `C(h) = eps0 A / h + C_fringe`, or through a galvanic
//! indium bump that merges the two nodes.
//!
//! [`build_matrix`] assembles the Maxwell matrix over the surviving nodes and
//! [`reduce_to_energies`] turns it into charging and coupling energies under
//! `H = sum 4 E_Ci n_i^2 + sum_{i<j} 4 E_ij n_i n_j`.

mod schema;
mod sweep;

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::consts::{ELEMENTARY_CHARGE, PLANCK, VACUUM_PERMITTIVITY};
use crate::error::{Error, Result};

pub use schema::{ConnectionSpec, NetworkFile, NETWORK_SCHEMA};
pub use sweep::{model_from_network, sensitivity_sweep, Design, SensitivityOptions, SensitivityRow, SweepRoles};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Ground,
    Pad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
}

/// Pairwise capacitance in farads. Node `b` may be the ground node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capacitance {
    pub a: NodeId,
    pub b: NodeId,
    pub farads: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementRole {
    Qubit,
    Coupler,
}

/// Josephson content of an element, in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Josephson {
    Junction { e_j: f64 },
    Squid { e_jc: f64, r: f64 },
}

impl Josephson {
    /// Josephson energy at zero flux.
    pub fn zero_flux_energy(&self) -> f64 {
        match *self {
            Josephson::Junction { e_j } => e_j,
            Josephson::Squid { e_jc, .. } => e_jc,
        }
    }
}

/// A transmon-like element: one pad (grounded) or two pads (floating).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub label: String,
    pub role: ElementRole,
    pub pads: Vec<NodeId>,
    pub josephson: Josephson,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CapNetwork {
    pub nodes: Vec<Node>,
    pub caps: Vec<Capacitance>,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConnectionKind {
    /// Facing pads of `area` m^2 across the bump gap, plus a constant fringe
    /// capacitance in farads.
    Paddle { area: f64, fringe: f64 },
    /// Galvanic short.
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterChipConnection {
    pub kind: ConnectionKind,
    pub node_a: NodeId,
    pub node_b: NodeId,
}

/// Parallel-plate paddle capacitance at gap `height` (m).
pub fn paddle_capacitance(area: f64, fringe: f64, height: f64) -> f64 {
    VACUUM_PERMITTIVITY * area / height + fringe
}

/// Maxwell capacitance matrix over the non-ground nodes that survive bump
/// merging. Row `k` belongs to node `nodes[k]` (the smallest id of its merged
/// group).
#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellMatrix {
    pub nodes: Vec<NodeId>,
    pub matrix: DMatrix<f64>,
    /// Every declared node mapped to its surviving representative; the ground
    /// group maps to the ground id.
    pub representative: BTreeMap<NodeId, NodeId>,
    pub ground: NodeId,
}

impl MaxwellMatrix {
    /// Row of the node a declared node was merged into, `None` for ground.
    pub fn row_of(&self, id: NodeId) -> Option<usize> {
        let rep = *self.representative.get(&id)?;
        if rep == self.ground {
            return None;
        }
        self.nodes.iter().position(|&n| n == rep)
    }
}

/// Charging energies per element and coupling energies per element pair, Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEnergies {
    pub labels: Vec<String>,
    pub charging: Vec<f64>,
    /// Symmetric, zero diagonal.
    pub coupling: DMatrix<f64>,
}

impl ReducedEnergies {
    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn charging_of(&self, label: &str) -> Option<f64> {
        self.index(label).map(|i| self.charging[i])
    }

    pub fn coupling_between(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.coupling[(self.index(a)?, self.index(b)?)])
    }
}

impl CapNetwork {
    pub fn ground(&self) -> Result<NodeId> {
        let grounds: Vec<_> = self.nodes.iter().filter(|n| n.kind == NodeKind::Ground).collect();
        match grounds.as_slice() {
            [g] => Ok(g.id),
            _ => Err(Error::InvalidNetwork(format!("expected exactly one ground node, found {}", grounds.len()))),
        }
    }

    pub fn element(&self, label: &str) -> Result<&Element> {
        self.elements
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| Error::InvalidNetwork(format!("no element labelled `{label}`")))
    }

    pub fn validate(&self) -> Result<()> {
        let ground = self.ground()?;
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return Err(Error::InvalidNetwork(format!("duplicate node id {}", n.id)));
            }
        }
        for c in &self.caps {
            if c.a == c.b {
                return Err(Error::InvalidNetwork(format!("self-capacitance on node {}", c.a)));
            }
            for id in [c.a, c.b] {
                if !ids.contains(&id) {
                    return Err(Error::InvalidNetwork(format!("capacitance references unknown node {id}")));
                }
            }
            if !(c.farads.is_finite() && c.farads > 0.0) {
                return Err(Error::InvalidNetwork(format!("capacitance {}-{} must be positive, got {}", c.a, c.b, c.farads)));
            }
        }
        let mut labels = BTreeSet::new();
        for e in &self.elements {
            if !labels.insert(e.label.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate element label `{}`", e.label)));
            }
            if !(1..=2).contains(&e.pads.len()) || (e.pads.len() == 2 && e.pads[0] == e.pads[1]) {
                return Err(Error::InvalidNetwork(format!("element `{}` needs one or two distinct pads", e.label)));
            }
            for p in &e.pads {
                if !ids.contains(p) || *p == ground {
                    return Err(Error::InvalidNetwork(format!("element `{}` pad {p} is not a pad node", e.label)));
                }
            }
            let ok = match e.josephson {
                Josephson::Junction { e_j } => e_j.is_finite() && e_j > 0.0,
                Josephson::Squid { e_jc, r } => e_jc.is_finite() && e_jc > 0.0 && r.is_finite() && r > 0.0,
            };
            if !ok {
                return Err(Error::InvalidNetwork(format!("element `{}` has non-positive Josephson energy", e.label)));
            }
        }
        Ok(())
    }
}

struct UnionFind {
    parent: BTreeMap<NodeId, NodeId>,
}

impl UnionFind {
    fn new(ids: impl Iterator<Item = NodeId>) -> Self {
        Self { parent: ids.map(|i| (i, i)).collect() }
    }

    fn find(&mut self, x: NodeId) -> NodeId {
        let p = self.parent[&x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.parent.insert(x, root);
        root
    }

    /// Union keeping `keep` as root when it is in either set, otherwise the
    /// smaller id.
    fn union(&mut self, a: NodeId, b: NodeId, keep: NodeId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (root, child) = if rb == keep || (ra != keep && rb < ra) { (rb, ra) } else { (ra, rb) };
        self.parent.insert(child, root);
    }
}

/// Assembles the Maxwell matrix of `net` with `connections` realised at gap
/// `bump_height` (m).
pub fn build_matrix(net: &CapNetwork, connections: &[InterChipConnection], bump_height: f64) -> Result<MaxwellMatrix> {
    net.validate()?;
    if !(bump_height.is_finite() && bump_height > 0.0) {
        return Err(Error::InvalidParameter(format!("bump height must be positive, got {bump_height}")));
    }
    let ground = net.ground()?;
    let known: BTreeSet<NodeId> = net.nodes.iter().map(|n| n.id).collect();

    let mut uf = UnionFind::new(known.iter().copied());
    let mut caps: Vec<Capacitance> = net.caps.clone();
    for c in connections {
        for id in [c.node_a, c.node_b] {
            if !known.contains(&id) {
                return Err(Error::InvalidNetwork(format!("connection references unknown node {id}")));
            }
        }
        if c.node_a == c.node_b {
            return Err(Error::InvalidNetwork(format!("connection from node {} to itself", c.node_a)));
        }
        match c.kind {
            ConnectionKind::Bump => uf.union(c.node_a, c.node_b, ground),
            ConnectionKind::Paddle { area, fringe } => {
                if !(area.is_finite() && area > 0.0 && fringe.is_finite() && fringe >= 0.0) {
                    return Err(Error::InvalidNetwork(format!(
                        "paddle {}-{} needs area > 0 and fringe >= 0",
                        c.node_a, c.node_b
                    )));
                }
                caps.push(Capacitance { a: c.node_a, b: c.node_b, farads: paddle_capacitance(area, fringe, bump_height) });
            }
        }
    }

    let representative: BTreeMap<NodeId, NodeId> = known.iter().map(|&id| (id, uf.find(id))).collect();
    let nodes: Vec<NodeId> = representative
        .iter()
        .filter(|(id, rep)| id == rep && **rep != ground)
        .map(|(id, _)| *id)
        .collect();
    let row: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &id)| (id, i)).collect();

    let n = nodes.len();
    if n == 0 {
        return Err(Error::InvalidNetwork("no pad nodes survive merging".into()));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for c in &caps {
        let (ra, rb) = (representative[&c.a], representative[&c.b]);
        if ra == rb {
            continue;
        }
        match (row.get(&ra), row.get(&rb)) {
            (Some(&i), Some(&j)) => {
                m[(i, i)] += c.farads;
                m[(j, j)] += c.farads;
                m[(i, j)] -= c.farads;
                m[(j, i)] -= c.farads;
            }
            (Some(&i), None) | (None, Some(&i)) => m[(i, i)] += c.farads,
            (None, None) => unreachable!("distinct representatives cannot both be ground"),
        }
    }
    if Cholesky::new(m.clone()).is_none() {
        return Err(Error::NonPositiveDefinite);
    }
    Ok(MaxwellMatrix { nodes, matrix: m, representative, ground })
}

/// Mode-coordinate rows: unit vector of a grounded element's pad, or the
/// difference of the two pads of a floating one.
fn mode_rows(c: &MaxwellMatrix, elements: &[Element]) -> Result<DMatrix<f64>> {
    let n = c.nodes.len();
    let mut v = DMatrix::<f64>::zeros(elements.len(), n);
    for (k, e) in elements.iter().enumerate() {
        for (p, sign) in e.pads.iter().zip([1.0, -1.0]) {
            if !c.representative.contains_key(p) {
                return Err(Error::InvalidNetwork(format!("element `{}` pad {p} not in matrix", e.label)));
            }
            if let Some(r) = c.row_of(*p) {
                v[(k, r)] += sign;
            }
        }
    }
    Ok(v)
}

/// Completes the element rows to an invertible transform with unit rows for
/// the remaining (charge-free) coordinates.
fn complete_transform(v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (k, n) = v.shape();
    let rank = |m: &DMatrix<f64>| m.clone().svd(false, false).rank(1e-9);
    if rank(v) < k {
        return Err(Error::SingularTransform(
            "element coordinates are linearly dependent (shorted or shared pads)".into(),
        ));
    }
    let mut t = v.clone();
    for i in 0..n {
        if t.nrows() == n {
            break;
        }
        let mut cand = t.clone().insert_row(t.nrows(), 0.0);
        let last = cand.nrows() - 1;
        cand[(last, i)] = 1.0;
        if rank(&cand) == cand.nrows() {
            t = cand;
        }
    }
    if t.nrows() != n {
        return Err(Error::SingularTransform("could not complete the mode basis".into()));
    }
    Ok(t)
}

/// Charging and coupling energies of `elements` from the Maxwell matrix.
///
/// Node fluxes are rewritten in mode coordinates (grounded pad flux, or pad
/// difference for floating elements). The remaining coordinates (the total
/// charge of each floating island, pads without junctions) carry no charge
/// and are dropped from the inverse transformed capacitance `M`; then
/// `E_Ci = e^2 M_ii / 2h` and `E_ij = e^2 M_ij / h`.
pub fn reduce_to_energies(c: &MaxwellMatrix, elements: &[Element]) -> Result<ReducedEnergies> {
    if elements.is_empty() {
        return Err(Error::InvalidNetwork("no elements to reduce".into()));
    }
    let k = elements.len();
    let v = mode_rows(c, elements)?;
    let t = complete_transform(&v)?;
    let t_inv = t.clone().try_inverse().ok_or_else(|| Error::SingularTransform("transform not invertible".into()))?;
    // Phi = T^-1 psi, so the mode capacitance matrix is T^-T C T^-1
    let c_modes = t_inv.transpose() * &c.matrix * &t_inv;
    let c_modes = 0.5 * (&c_modes + c_modes.transpose());
    let m = Cholesky::new(c_modes).ok_or(Error::NonPositiveDefinite)?.inverse();

    let scale = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / PLANCK;
    let charging = (0..k).map(|i| 0.5 * scale * m[(i, i)]).collect();
    let mut coupling = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if i != j {
                coupling[(i, j)] = scale * 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
    }
    Ok(ReducedEnergies { labels: elements.iter().map(|e| e.label.clone()).collect(), charging, coupling })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::FEMTOFARAD;
    use approx::assert_relative_eq;

    fn node(id: NodeId) -> Node {
        Node { id, kind: if id == 0 { NodeKind::Ground } else { NodeKind::Pad }, owner: None }
    }

    fn cap(a: NodeId, b: NodeId, ff: f64) -> Capacitance {
        Capacitance { a, b, farads: ff * FEMTOFARAD }
    }

    fn junction(label: &str, pads: Vec<NodeId>) -> Element {
        Element { label: label.into(), role: ElementRole::Qubit, pads, josephson: Josephson::Junction { e_j: 10e9 } }
    }

    #[test]
    fn paddle_parallel_plate() {
        let c = paddle_capacitance(100e-6 * 100e-6, 0.0, 3.5e-6);
        assert_relative_eq!(c, 8.854_187_812_8e-12 * 1e-8 / 3.5e-6, max_relative = 1e-15);
        assert!((c / FEMTOFARAD - 25.3).abs() < 0.05);
    }

    #[test]
    fn single_pad_charging_energy() {
        let net = CapNetwork { nodes: vec![node(0), node(1)], caps: vec![cap(1, 0, 80.0)], elements: vec![junction("q", vec![1])] };
        let m = build_matrix(&net, &[], 1e-6).unwrap();
        let e = reduce_to_energies(&m, &net.elements).unwrap();
        let expect = ELEMENTARY_CHARGE.powi(2) / (2.0 * 80.0 * FEMTOFARAD * PLANCK);
        assert_relative_eq!(e.charging[0], expect, max_relative = 1e-12);
        assert!((e.charging[0] / 1e6 - 242.0).abs() < 0.5);
    }

    #[test]
    fn isolated_pads_do_not_couple() {
        let net = CapNetwork {
            nodes: vec![node(0), node(1), node(2)],
            caps: vec![cap(1, 0, 80.0), cap(2, 0, 70.0)],
            elements: vec![junction("a", vec![1]), junction("b", vec![2])],
        };
        let e = reduce_to_energies(&build_matrix(&net, &[], 1e-6).unwrap(), &net.elements).unwrap();
        assert_eq!(e.coupling[(0, 1)], 0.0);
    }

    #[test]
    fn maxwell_structure() {
        let net = CapNetwork {
            nodes: vec![node(0), node(1), node(2), node(3)],
            caps: vec![cap(1, 0, 50.0), cap(2, 0, 40.0), cap(3, 0, 30.0), cap(1, 2, 5.0), cap(2, 3, 7.0)],
            elements: vec![],
        };
        let m = build_matrix(&net, &[], 1e-6).unwrap().matrix;
        assert_eq!(m, m.transpose());
        assert_relative_eq!(m[(0, 0)], 55.0 * FEMTOFARAD, max_relative = 1e-15);
        assert_relative_eq!(m[(1, 1)], 52.0 * FEMTOFARAD, max_relative = 1e-15);
        assert_relative_eq!(m[(1, 2)], -7.0 * FEMTOFARAD, max_relative = 1e-15);
        assert_eq!(m[(0, 2)], 0.0);
    }

    #[test]
    fn floating_island_without_ground_is_not_positive_definite() {
        let net = CapNetwork { nodes: vec![node(0), node(1), node(2)], caps: vec![cap(1, 2, 5.0)], elements: vec![] };
        assert!(matches!(build_matrix(&net, &[], 1e-6), Err(Error::NonPositiveDefinite)));
    }

    #[test]
    fn invalid_networks() {
        let two_grounds = CapNetwork { nodes: vec![node(0), Node { id: 1, kind: NodeKind::Ground, owner: None }], ..Default::default() };
        assert!(build_matrix(&two_grounds, &[], 1e-6).is_err());
        let selfcap = CapNetwork { nodes: vec![node(0), node(1)], caps: vec![cap(1, 1, 5.0)], elements: vec![] };
        assert!(build_matrix(&selfcap, &[], 1e-6).is_err());
        let negative = CapNetwork { nodes: vec![node(0), node(1)], caps: vec![cap(1, 0, -5.0)], elements: vec![] };
        assert!(build_matrix(&negative, &[], 1e-6).is_err());
        let ok = CapNetwork { nodes: vec![node(0), node(1)], caps: vec![cap(1, 0, 5.0)], elements: vec![] };
        assert!(build_matrix(&ok, &[], 0.0).is_err());
    }

    #[test]
    fn shorted_floating_element_is_singular() {
        let net = CapNetwork {
            nodes: vec![node(0), node(1), node(2)],
            caps: vec![cap(1, 0, 50.0), cap(2, 0, 50.0), cap(1, 2, 10.0)],
            elements: vec![junction("q", vec![1, 2])],
        };
        let bump = InterChipConnection { kind: ConnectionKind::Bump, node_a: 1, node_b: 2 };
        let m = build_matrix(&net, &[bump], 1e-6).unwrap();
        assert!(matches!(reduce_to_energies(&m, &net.elements), Err(Error::SingularTransform(_))));
    }

    #[test]
    fn floating_pair_charging_energy() {
        // two pads of 60 fF to ground and 20 fF between them: C_diff = 20 + 60/2 = 50 fF
        let net = CapNetwork {
            nodes: vec![node(0), node(1), node(2)],
            caps: vec![cap(1, 0, 60.0), cap(2, 0, 60.0), cap(1, 2, 20.0)],
            elements: vec![junction("q", vec![1, 2])],
        };
        let e = reduce_to_energies(&build_matrix(&net, &[], 1e-6).unwrap(), &net.elements).unwrap();
        let expect = ELEMENTARY_CHARGE.powi(2) / (2.0 * 50.0 * FEMTOFARAD * PLANCK);
        assert_relative_eq!(e.charging[0], expect, max_relative = 1e-10);
    }

    #[test]
    fn reduction_matches_direct_inverse_projection() {
        // M = V C^-1 V^T with passive and total-charge coordinates at zero charge
        let net = CapNetwork {
            nodes: (0..6).map(node).collect(),
            caps: vec![
                cap(1, 0, 60.0), cap(2, 0, 55.0), cap(1, 2, 40.0), cap(3, 0, 120.0), cap(4, 0, 90.0),
                cap(3, 4, 50.0), cap(2, 3, 9.0), cap(1, 4, 4.0), cap(4, 5, 20.0), cap(5, 0, 70.0),
            ],
            elements: vec![junction("q", vec![1, 2]), junction("c", vec![3, 4]), junction("g", vec![5])],
        };
        let c = build_matrix(&net, &[], 1e-6).unwrap();
        let e = reduce_to_energies(&c, &net.elements).unwrap();
        let v = mode_rows(&c, &net.elements).unwrap();
        let m = &v * c.matrix.clone().try_inverse().unwrap() * v.transpose();
        let s = ELEMENTARY_CHARGE.powi(2) / PLANCK;
        for i in 0..3 {
            assert_relative_eq!(e.charging[i], 0.5 * s * m[(i, i)], max_relative = 1e-9);
            for j in 0..3 {
                if i != j {
                    assert_relative_eq!(e.coupling[(i, j)], s * m[(i, j)], max_relative = 1e-9);
                }
            }
        }
    }
}
