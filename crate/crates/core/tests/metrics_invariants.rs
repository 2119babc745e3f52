// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate-metric invariants: fidelity formula structure, RB fit coverage and
//! interleaved-fidelity identities.

use mcoupler::fit::NlsOptions;
use mcoupler::metrics::{
    coherence_limited_fidelity, fit_rb, irb_gate_fidelity, rb_decay, CoherenceSet, GateTiming, RbPoint, RbRun,
    RbVariant,
};
use mcoupler::synth::{self, RbSimConfig};

fn coherence() -> CoherenceSet {
    CoherenceSet::static_equals_modulated(16.4e-6, 8.4e-6, 11.5e-6, 5.7e-6)
}

const TIMING: GateTiming = GateTiming { t_flat_s: 56e-9, t_pad_s: 4e-9 };

fn times(c: &CoherenceSet) -> [f64; 6] {
    [c.t1_q1_s, c.t2s_q1_s, c.t1_q2_s, c.t2s_q2_s, c.t1_q2_mod_s, c.t2s_q2_mod_s]
}

fn with_times(t: [f64; 6]) -> CoherenceSet {
    CoherenceSet {
        t1_q1_s: t[0],
        t2s_q1_s: t[1],
        t1_q2_s: t[2],
        t2s_q2_s: t[3],
        t1_q2_mod_s: t[4],
        t2s_q2_mod_s: t[5],
    }
}

#[test]
fn fidelity_is_one_without_decoherence() {
    let c = with_times([f64::INFINITY; 6]);
    assert_eq!(coherence_limited_fidelity(&c, &TIMING).unwrap(), 1.0);
}

#[test]
fn fidelity_non_increasing_in_every_rate_and_time() {
    let base = coherence_limited_fidelity(&coherence(), &TIMING).unwrap();
    for k in 0..6 {
        for shrink in [0.9, 0.5, 0.1] {
            // shorter coherence time = larger decay rate
            let mut t = times(&coherence());
            t[k] *= shrink;
            let f = coherence_limited_fidelity(&with_times(t), &TIMING).unwrap();
            assert!(f <= base, "time {k} x{shrink}: {f} > {base}");
        }
    }
    for (df, dp) in [(1e-9, 0.0), (0.0, 1e-9), (10e-9, 2e-9)] {
        let longer = GateTiming { t_flat_s: TIMING.t_flat_s + df, t_pad_s: TIMING.t_pad_s + dp };
        assert!(coherence_limited_fidelity(&coherence(), &longer).unwrap() <= base);
    }
}

#[test]
fn infidelity_linear_in_gate_times() {
    let c = coherence();
    let e0 = 1.0 - coherence_limited_fidelity(&c, &TIMING).unwrap();
    for s in [0.0, 0.5, 2.0, 3.7] {
        let scaled = GateTiming { t_flat_s: s * TIMING.t_flat_s, t_pad_s: s * TIMING.t_pad_s };
        let e = 1.0 - coherence_limited_fidelity(&c, &scaled).unwrap();
        assert!((e - s * e0).abs() <= 1e-12, "s = {s}: {e} vs {}", s * e0);
    }
    // additivity in the two gate segments
    let flat = 1.0 - coherence_limited_fidelity(&c, &GateTiming { t_pad_s: 0.0, ..TIMING }).unwrap();
    let pad = 1.0 - coherence_limited_fidelity(&c, &GateTiming { t_flat_s: 0.0, ..TIMING }).unwrap();
    assert!((flat + pad - e0).abs() <= 1e-14);
}

#[test]
fn interleaved_fidelity_identities() {
    for p in [0.5, 0.9, 0.97, 1.0] {
        for d in [2, 4, 8] {
            assert_eq!(irb_gate_fidelity(p, p, d).unwrap(), 1.0);
        }
    }
    assert!(irb_gate_fidelity(0.95, 0.96, 4).is_err());
}

#[test]
fn noiseless_rb_recovers_exactly() {
    let (a, b, p) = (0.7, 0.25, 0.97);
    let points =
        [1, 2, 4, 8, 16, 32, 64, 128].iter().map(|&m| RbPoint { m, survival_mean: rb_decay(m, a, b, p), survival_sem: None });
    let run = RbRun::new(RbVariant::Reference, points.collect()).unwrap();
    let f = fit_rb(&run, &NlsOptions::default()).unwrap();
    assert!((f.a - a).abs() < 1e-8 && (f.b - b).abs() < 1e-8 && (f.p - p).abs() < 1e-10, "{f:?}");
}

#[test]
fn rb_decay_within_two_standard_errors() {
    let cfg = RbSimConfig::default();
    let trials = 200;
    let mut covered = 0;
    for seed in 0..trials {
        let run = synth::rb_run(&cfg, cfg.p_ref, RbVariant::Reference, &mut synth::rng(10_000 + seed)).unwrap();
        let f = fit_rb(&run, &NlsOptions::default()).unwrap();
        if (f.p - cfg.p_ref).abs() <= 2.0 * f.p_std_error {
            covered += 1;
        }
    }
    let frac = covered as f64 / trials as f64;
    assert!(frac >= 0.95, "coverage {covered}/{trials}");
}
