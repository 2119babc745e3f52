// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! From a capacitance network to a coupler model, and bump-height sweeps.

use serde::{Deserialize, Serialize};

use super::{build_matrix, reduce_to_energies, CapNetwork, InterChipConnection, Josephson, NetworkFile};
use crate::circuit::{
    coupling_from_energy, linspace, CouplerModel, CouplerParams, CouplingSet, PadConfig, Qubit, RootOptions,
    TransmonParams, DEFAULT_RESONANCE_TOLERANCE_HZ,
};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Which network elements play the two qubits and the coupler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRoles {
    pub q1: String,
    pub q2: String,
    pub coupler: String,
}

/// How the inter-chip connection slots of a network are realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    /// Every slot is a paddle.
    PaddlePaddle,
    /// The first slot is a bump, the rest are paddles.
    BumpPaddle,
    /// Every slot is a bump.
    BumpBump,
    /// Each slot as declared in the network file.
    AsDeclared,
}

impl Design {
    pub fn connections(self, file: &NetworkFile) -> Result<Vec<InterChipConnection>> {
        file.connections
            .iter()
            .enumerate()
            .map(|(i, c)| match self {
                Design::PaddlePaddle => c.realize(true),
                Design::BumpPaddle => c.realize(i > 0),
                Design::BumpBump => c.realize(false),
                Design::AsDeclared => c.declared(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityOptions {
    /// Flux points (in flux quanta) on which `max |g|` is taken.
    pub phi_grid: Vec<f64>,
    pub resonance_tol_hz: f64,
    pub root: RootOptions,
}

impl Default for SensitivityOptions {
    fn default() -> Self {
        Self {
            phi_grid: linspace(0.0, 0.5, 201),
            resonance_tol_hz: DEFAULT_RESONANCE_TOLERANCE_HZ,
            root: RootOptions::default(),
        }
    }
}

/// Couplings of one design at one bump height, all in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub height_m: f64,
    pub g12_hz: f64,
    pub g1c_hz: f64,
    pub g2c_hz: f64,
    pub max_abs_g_hz: f64,
    /// First flux on the grid interval where the net coupling vanishes.
    pub phi_zero: Option<f64>,
}

fn transmon(net: &CapNetwork, label: &str, e_c: f64) -> Result<(TransmonParams, Josephson)> {
    let el = net.element(label)?;
    let p = TransmonParams::new(label, el.josephson.zero_flux_energy(), e_c)?;
    Ok((p, el.josephson))
}

/// Coupler model of `net` with `connections` realised at `height` (m).
///
/// Charging and coupling energies come from the reduced Maxwell matrix; the
/// coupler's Josephson energy enters at zero flux, where its couplings are
/// referenced. The pad configuration follows the sign of `g1c g2c`.
pub fn model_from_network(
    net: &CapNetwork,
    connections: &[InterChipConnection],
    roles: &SweepRoles,
    height: f64,
) -> Result<CouplerModel> {
    let elements: Vec<_> =
        [&roles.q1, &roles.q2, &roles.coupler].iter().map(|l| net.element(l).cloned()).collect::<Result<_>>()?;
    let c = build_matrix(net, connections, height)?;
    let e = reduce_to_energies(&c, &elements)?;
    let (q1, _) = transmon(net, &roles.q1, e.charging[0])?;
    let (q2, _) = transmon(net, &roles.q2, e.charging[1])?;
    let (cp, cj) = transmon(net, &roles.coupler, e.charging[2])?;
    let r = match cj {
        Josephson::Squid { r, .. } => r,
        Josephson::Junction { .. } => {
            return Err(Error::InvalidNetwork(format!("coupler `{}` must be a squid", roles.coupler)))
        }
    };
    let g12 = coupling_from_energy(e.coupling[(0, 1)], &q1, &q2);
    let g1c = coupling_from_energy(e.coupling[(0, 2)], &q1, &cp);
    let g2c = coupling_from_energy(e.coupling[(1, 2)], &q2, &cp);
    let couplings = CouplingSet { g12, g1c, g2c };
    let config = couplings.pad_config().unwrap_or(PadConfig::Asymmetric);
    let coupler = CouplerParams::new(cp.e_j, r, cp.e_c, config)?;
    let model = CouplerModel::new(Qubit::new(q1), Qubit::new(q2), coupler, couplings);
    model.validate()?;
    Ok(model)
}

fn row_at(
    net: &CapNetwork,
    connections: &[InterChipConnection],
    roles: &SweepRoles,
    height: f64,
    opts: &SensitivityOptions,
) -> Result<SensitivityRow> {
    let mut model = model_from_network(net, connections, roles, height)?;
    model.resonance_tol_hz = opts.resonance_tol_hz;
    let g = model.sweep(&opts.phi_grid, Execution::Sequential)?;
    let max_abs_g_hz = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut phi_zero = None;
    for k in 1..g.len() {
        if g[k - 1] == 0.0 {
            phi_zero = Some(opts.phi_grid[k - 1]);
            break;
        }
        if g[k - 1].signum() != g[k].signum() {
            let (lo, hi) = (opts.phi_grid[k - 1], opts.phi_grid[k]);
            phi_zero = Some(model.find_zero_coupling(lo.min(hi), lo.max(hi), &opts.root)?.0);
            break;
        }
    }
    Ok(SensitivityRow {
        height_m: height,
        g12_hz: model.couplings.g12,
        g1c_hz: model.couplings.g1c,
        g2c_hz: model.couplings.g2c,
        max_abs_g_hz,
        phi_zero,
    })
}

/// Couplings of `design` at each bump height (m), in input order.
pub fn sensitivity_sweep(
    file: &NetworkFile,
    design: Design,
    heights: &[f64],
    opts: &SensitivityOptions,
    exec: Execution,
) -> Result<Vec<SensitivityRow>> {
    if heights.is_empty() || opts.phi_grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    let net = file.network()?;
    let conns = design.connections(file)?;
    let roles = file.roles()?;
    exec::map(exec, heights, |&h| row_at(&net, &conns, &roles, h, opts)).into_iter().collect()
}
