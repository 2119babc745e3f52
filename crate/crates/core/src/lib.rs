// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Modelling toolkit for flux-tunable floating couplers that bridge several
//! chips.
//!
//! The crate is organised by analysis stage:
//!
//! * [`circuit`] holds the closed-form two-qubit + coupler model: SQUID
//!   tuning, pairwise couplings, dispersive net coupling, zero-coupling
//!   search, Purcell-limited lifetime and the exact-diagonalisation residual
//!   ZZ.
//! * [`capnet`] assembles Maxwell capacitance matrices of multi-chip pad
//!   layouts (vacuum-gap paddles or galvanic bumps between chips) and reduces
//!   them to charging and coupling energies.
//! * [`fit`] is a bounded Levenberg-Marquardt engine with the coupling-curve
//!   and Purcell fitters built on top of it.
//! * [`metrics`] covers coherence-limited CZ fidelity, randomized-benchmarking
//!   decay fits and stability statistics.
//! * [`synth`] produces seeded synthetic data sets for all of the above.
//!
//! All energies and frequencies are ordinary frequencies in Hz (`E/h`,
//! `omega/2pi`); times are in seconds.
//!
//! Data-parallel loops (flux sweeps, height sweeps, grid initialisation,
//! Monte-Carlo ensembles) run on rayon when the `parallel` feature is enabled
//! and fall back to plain iterators otherwise. See [`exec`].

pub mod capnet;
pub mod circuit;
pub mod consts;
pub mod error;
pub mod exec;
pub mod fit;
pub mod metrics;
pub mod synth;

pub use error::{Error, Result};
