// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Sequential vs parallel execution of the data-parallel workloads.

use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mcoupler::capnet::{sensitivity_sweep, Design, NetworkFile, SensitivityOptions};
use mcoupler::circuit::{linspace, PadConfig};
use mcoupler::exec::Execution;
use mcoupler::fit::{fit_gcurve, gcurve_model, GCurveFitOptions, GCurveParams};
use mcoupler::metrics::simulate_irb_reruns;
use mcoupler::synth::{self, RbSimConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn params() -> GCurveParams {
    GCurveParams {
        g12: -5.2e6,
        g_sqrt: 93e6,
        e_jc: 15.1e9,
        r: 1.0 / 3.0,
        e_cc: 116e6,
        omega_q1: 3.95e9,
        omega_q2: 5.0e9,
        config: PadConfig::Symmetric,
    }
}

fn flux_sweep(c: &mut Criterion) {
    let model = gcurve_model(&params()).unwrap();
    let phis = linspace(0.0, 1.0, 100_001);
    let mut g = c.benchmark_group("flux_sweep_100k");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| model.sweep(black_box(&phis), exec).unwrap()));
    }
    g.finish();
}

fn height_sweep(c: &mut Criterion) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/reference_network.json");
    let file = NetworkFile::load(path).unwrap();
    let heights = linspace(2.0e-6, 5.0e-6, 64);
    let opts = SensitivityOptions::default();
    let mut g = c.benchmark_group("height_sweep_64");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| sensitivity_sweep(&file, Design::PaddlePaddle, black_box(&heights), &opts, exec).unwrap())
        });
    }
    g.finish();
}

fn gcurve_fit(c: &mut Criterion) {
    let p = params();
    let data = synth::gcurve(&p, &linspace(0.0, 0.5, 25), 0.05e6, &mut synth::rng(42)).unwrap();
    let mut g = c.benchmark_group("gcurve_fit_25");
    g.sample_size(20);
    for (name, exec) in MODES {
        let mut opts = GCurveFitOptions::new(p.e_cc, p.omega_q1, p.omega_q2, p.config);
        opts.exec = exec;
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| b.iter(|| fit_gcurve(&data, o).unwrap()));
    }
    g.finish();
}

fn rb_ensemble(c: &mut Criterion) {
    let cfg = RbSimConfig::default();
    let mut g = c.benchmark_group("irb_reruns_20");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| simulate_irb_reruns(&cfg, 20, 42, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, flux_sweep, height_sweep, gcurve_fit, rb_ensemble);
criterion_main!(benches);
