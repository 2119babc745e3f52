// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Residual ZZ of the qubit-coupler-qubit chain by exact diagonalisation.
//!
//! Each mode is a Duffing ladder `w n + (alpha/2) n (n-1)` with
//! `alpha = -E_C`, and every pair is coupled by `g_ij (a_i^+ a_j + a_i a_j^+)`.
//! That exchange conserves the total excitation number, so the Hamiltonian is
//! block diagonal in it and only the blocks holding `|000>`, `|100>`, `|001>`
//! and `|101>` (mode order q1, coupler, q2) are diagonalised.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{CouplerModel, FluxBias};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZzOptions {
    /// Levels kept per mode; at least 3.
    pub levels_per_mode: usize,
    /// Allowed relative change of zeta when the truncation is doubled.
    pub convergence_rel: f64,
    /// Minimum squared overlap for a dressed state to inherit a bare label.
    pub min_overlap: f64,
}

impl Default for ZzOptions {
    fn default() -> Self {
        Self { levels_per_mode: 4, convergence_rel: 0.01, min_overlap: 0.5 }
    }
}

struct Modes {
    freq: [f64; 3],
    anharm: [f64; 3],
    /// (i, j, g_ij)
    links: [(usize, usize, f64); 3],
}

impl Modes {
    fn from_model(m: &CouplerModel, f: FluxBias) -> Result<Self> {
        let g = m.couplings_at(f);
        let [w1, w2] = m.qubit_frequencies();
        Ok(Self {
            freq: [w1, m.coupler_frequency(f)?, w2],
            anharm: [m.q1.anharmonicity(), -m.coupler.e_cc, m.q2.anharmonicity()],
            links: [(0, 1, g.g1c), (1, 2, g.g2c), (0, 2, g.g12)],
        })
    }

    fn bare_energy(&self, s: &[usize; 3]) -> f64 {
        (0..3)
            .map(|i| {
                let n = s[i] as f64;
                self.freq[i] * n + 0.5 * self.anharm[i] * n * (n - 1.0)
            })
            .sum()
    }
}

/// Bare states with `total` excitations and at most `levels - 1` per mode.
fn block_states(total: usize, levels: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..levels.min(total + 1) {
        for b in 0..levels.min(total - a + 1) {
            let c = total - a - b;
            if c < levels {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Dressed-minus-bare energy shift of each requested bare state within one
/// excitation block.
fn block_shifts(modes: &Modes, levels: usize, total: usize, targets: &[[usize; 3]], min_overlap: f64) -> Result<Vec<f64>> {
    let states = block_states(total, levels);
    let index = |s: &[usize; 3]| states.iter().position(|t| t == s);
    let n = states.len();
    let mut h = DMatrix::<f64>::zeros(n, n);
    // energies measured from the first target's bare energy keep the
    // eigen-solver working on O(g) numbers
    let reference = modes.bare_energy(&targets[0]);
    for (k, s) in states.iter().enumerate() {
        h[(k, k)] = modes.bare_energy(s) - reference;
        for &(i, j, g) in &modes.links {
            if g == 0.0 {
                continue;
            }
            // a_i^+ a_j |s>
            if s[j] > 0 && s[i] + 1 < levels {
                let mut t = *s;
                t[j] -= 1;
                t[i] += 1;
                let amp = g * ((s[j] as f64) * ((s[i] + 1) as f64)).sqrt();
                let l = index(&t).expect("exchange stays in block");
                h[(l, k)] += amp;
                h[(k, l)] += amp;
            }
        }
    }
    let eig = SymmetricEigen::new(h);
    targets
        .iter()
        .map(|t| {
            let row = index(t).expect("target in block");
            let (best, overlap) = (0..n)
                .map(|c| (c, eig.eigenvectors[(row, c)].powi(2)))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if overlap <= min_overlap {
                return Err(Error::LabelAmbiguous { state: *t, overlap });
            }
            Ok(eig.eigenvalues[best] - (modes.bare_energy(t) - reference))
        })
        .collect()
}

/// Zeta at one fixed truncation, without the convergence check.
pub fn residual_zz_at_truncation(m: &CouplerModel, f: FluxBias, levels: usize, min_overlap: f64) -> Result<f64> {
    if levels < 3 {
        return Err(Error::InvalidParameter(format!("levels_per_mode must be >= 3, got {levels}")));
    }
    let modes = Modes::from_model(m, f)?;
    let s00 = block_shifts(&modes, levels, 0, &[[0, 0, 0]], min_overlap)?[0];
    let s1 = block_shifts(&modes, levels, 1, &[[1, 0, 0], [0, 0, 1]], min_overlap)?;
    let s11 = block_shifts(&modes, levels, 2, &[[1, 0, 1]], min_overlap)?[0];
    // bare energies cancel identically in zeta; only the shifts remain
    Ok(s11 - s1[0] - s1[1] + s00)
}

pub(super) fn residual_zz(m: &CouplerModel, f: FluxBias, opts: &ZzOptions) -> Result<f64> {
    let zeta = residual_zz_at_truncation(m, f, opts.levels_per_mode, opts.min_overlap)?;
    let doubled = residual_zz_at_truncation(m, f, 2 * opts.levels_per_mode, opts.min_overlap)?;
    let scale = zeta.abs().max(doubled.abs());
    if scale > 0.0 {
        let rel = (zeta - doubled).abs() / scale;
        if rel > opts.convergence_rel {
            return Err(Error::TruncationUnconverged { relative_change: rel });
        }
    }
    Ok(zeta)
}
