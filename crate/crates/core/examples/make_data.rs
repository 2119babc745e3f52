// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Regenerates the synthetic data sets shipped under `data/`.
//!
//! ```text
//! cargo run -p mcoupler --example make_data -- data
//! ```
//!
//! Every file is drawn from seed 42 so reruns reproduce them byte for byte.

use std::fs::File;
use std::path::PathBuf;

use mcoupler::circuit::{linspace, PadConfig, PurcellParams};
use mcoupler::fit::GCurveParams;
use mcoupler::synth::{self, RbSimConfig};

const SEED: u64 = 42;

fn main() -> mcoupler::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    let phis = linspace(0.0, 0.5, 25);

    // coupler parameters of the two device classes; qubit frequencies are
    // design choices, see README
    let bump_bump = GCurveParams {
        g12: -5.2e6,
        g_sqrt: 93e6,
        e_jc: 58.4e9,
        r: 0.4,
        e_cc: 113e6,
        omega_q1: 4.2e9,
        omega_q2: 4.3e9,
        config: PadConfig::Asymmetric,
    };
    let four_bump = GCurveParams {
        g12: -5.2e6,
        g_sqrt: 93e6,
        e_jc: 15.1e9,
        r: 3.0,
        e_cc: 116e6,
        omega_q1: 3.95e9,
        omega_q2: 5.0e9,
        config: PadConfig::Symmetric,
    };
    for (name, p) in [("bump_bump_gcurve.csv", &bump_bump), ("four_bump_gcurve.csv", &four_bump)] {
        let curve = synth::gcurve(p, &phis, 0.05e6, &mut synth::rng(SEED))?;
        curve.write_csv(File::create(dir.join(name))?)?;
    }

    let purcell = PurcellParams::new(7.0e9, 1.0e6, 54e6)?;
    let omegas: Vec<f64> = linspace(200e6, 900e6, 10).iter().map(|d| purcell.omega_r - d).collect();
    synth::t1_curve(&purcell, &omegas, 0.05, &mut synth::rng(SEED))?.write_csv(File::create(dir.join("purcell_t1.csv"))?)?;

    let (reference, interleaved) = synth::rb_pair(&RbSimConfig::default(), &mut synth::rng(SEED))?;
    reference.write_csv(File::create(dir.join("rb_reference.csv"))?)?;
    interleaved.write_csv(File::create(dir.join("rb_interleaved.csv"))?)?;
    Ok(())
}
