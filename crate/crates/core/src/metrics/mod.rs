// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate-quality analytics: coherence-limited CZ fidelity, randomized
//! benchmarking fits and stability statistics of repeated runs.

mod fidelity;
mod rb;
mod stats;

pub use fidelity::{coherence_limited_fidelity, CoherenceSet, GateTiming};
pub use rb::{
    fit_rb, irb_from_runs, irb_gate_fidelity, rb_decay, simulate_irb_reruns, IrbResult, RbFit, RbPoint, RbRun,
    RbVariant, TWO_QUBIT_DIM,
};
pub use stats::{ecdf, ecdf_eval, format_percent, stability_stats, EcdfPoint, StabilityStats};
