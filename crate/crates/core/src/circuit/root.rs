// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Bracketed scalar root search: secant steps inside a bisection bracket.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_G_TOLERANCE_HZ: f64 = 100.0;
pub const MAX_ROOT_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    /// Stop once `|f(x)|` is below this.
    pub tol_g_hz: f64,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { tol_g_hz: DEFAULT_G_TOLERANCE_HZ, max_iterations: MAX_ROOT_ITERATIONS }
    }
}

/// Finds `x` in `[lo, hi]` with `|f(x)| < opts.tol_g_hz`.
///
/// Each step tries the secant point of the current bracket; when it falls
/// outside the bracket, or the previous step failed to halve the bracket, a
/// bisection step is taken instead, so the bracket width at least halves
/// every two iterations.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, opts: &RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa.abs() < opts.tol_g_hz && fa.abs() <= fb.abs() {
        return Ok(a);
    }
    if fb.abs() < opts.tol_g_hz {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }

    let mut force_bisect = false;
    for _ in 0..opts.max_iterations {
        let width = b - a;
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if !force_bisect && secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        let fx = f(x)?;
        if fx.abs() < opts.tol_g_hz {
            return Ok(x);
        }
        if fa.signum() != fx.signum() {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        force_bisect = !force_bisect && (b - a) > 0.5 * width;
    }
    Err(Error::RootNotConverged { tol_hz: opts.tol_g_hz, iterations: opts.max_iterations })
}
