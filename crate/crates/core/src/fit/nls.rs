// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Bounded Levenberg-Marquardt least squares.
//!
//! Minimises `sum r_i(x)^2` for a caller-supplied residual vector (already
//! divided by the per-point uncertainty when there is one). Each iteration
//! solves the damped normal equations with Marquardt's diagonal scaling,
//!
//! ```text
//! (J^T J + lambda D) dx = -J^T r,    D = running max of diag(J^T J),
//! ```
//!
//! through an SVD of the augmented system `[J; sqrt(lambda D)]`, then projects
//! the trial point onto the box bounds. The Jacobian is taken by central
//! differences (one-sided next to a bound). The diagonal scaling makes the
//! iterates independent of a constant rescaling of the residuals, so fits
//! with all-equal weights coincide with unweighted fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITERATIONS: usize = 500;

/// A free parameter with its starting value and box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub init: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, init: f64, lower: f64, upper: f64) -> Self {
        Self { name: name.into(), init, lower, upper }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlsOptions {
    pub max_iterations: usize,
    /// Converged when an accepted step lowers the cost by less than this
    /// relative amount.
    pub ftol: f64,
    /// Converged when the scaled step is this small relative to the scaled
    /// parameter vector.
    pub xtol: f64,
    /// Converged when every Jacobian column is this close to orthogonal to
    /// the residual vector (cosine).
    pub gtol: f64,
    /// Relative finite-difference step.
    pub diff_step: f64,
}

impl Default for NlsOptions {
    fn default() -> Self {
        Self { max_iterations: DEFAULT_MAX_ITERATIONS, ftol: 1e-14, xtol: 1e-13, gtol: 1e-12, diff_step: 1e-6 }
    }
}

/// Optimum of a least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NlsSolution {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    /// `(J^T J)^-1 * ssr / dof` at the optimum.
    pub covariance: DMatrix<f64>,
    /// Sum of squared residuals at the optimum.
    pub ssr: f64,
    pub n_points: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl NlsSolution {
    /// Degrees of freedom used for the residual variance (at least 1).
    pub fn dof(&self) -> usize {
        self.n_points.saturating_sub(self.values.len()).max(1)
    }

    /// Covariance `(J^T J)^-1` without the residual-variance factor, for
    /// residuals weighted by measured (absolute) uncertainties. Leaves the
    /// solution unchanged when the fit is exact.
    pub fn with_absolute_sigma(mut self) -> Self {
        if self.ssr > 0.0 {
            self.covariance *= self.dof() as f64 / self.ssr;
        }
        self
    }

    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.covariance[(i, i)].max(0.0).sqrt()).collect()
    }

    /// Root mean square of the (weighted) residuals.
    pub fn residual_rms(&self) -> f64 {
        (self.ssr / self.n_points as f64).sqrt()
    }

    /// Condition number of the correlation matrix derived from the
    /// covariance; large values flag parameters the data cannot separate.
    pub fn correlation_condition(&self) -> f64 {
        let n = self.values.len();
        let d: Vec<f64> = (0..n).map(|i| self.covariance[(i, i)].sqrt()).collect();
        if d.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return f64::INFINITY;
        }
        let corr = DMatrix::from_fn(n, n, |i, j| self.covariance[(i, j)] / (d[i] * d[j]));
        let sv = corr.singular_values();
        let (max, min) = (sv.max(), sv.min());
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

fn project(x: &mut [f64], specs: &[ParamSpec]) {
    for (v, s) in x.iter_mut().zip(specs) {
        *v = v.clamp(s.lower, s.upper);
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn jacobian<F>(f: &F, x: &[f64], r0: &[f64], specs: &[ParamSpec], rel_step: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let (n, p) = (r0.len(), x.len());
    let mut j = DMatrix::<f64>::zeros(n, p);
    for k in 0..p {
        let typical = if specs[k].init != 0.0 { specs[k].init.abs() } else { 1.0 };
        let h = rel_step * x[k].abs().max(typical);
        let up = x[k] + h <= specs[k].upper;
        let down = x[k] - h >= specs[k].lower;
        let eval = |dx: f64| -> Result<Vec<f64>> {
            let mut xt = x.to_vec();
            xt[k] += dx;
            f(&xt)
        };
        let col: Vec<f64> = match (up, down) {
            (true, true) => {
                let (rp, rm) = (eval(h)?, eval(-h)?);
                rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            }
            (true, false) => eval(h)?.iter().zip(r0).map(|(a, b)| (a - b) / h).collect(),
            (false, true) => r0.iter().zip(&eval(-h)?).map(|(a, b)| (a - b) / h).collect(),
            (false, false) => {
                return Err(Error::InvalidParameter(format!("bounds of `{}` are narrower than the difference step", specs[k].name)))
            }
        };
        for (i, v) in col.into_iter().enumerate() {
            j[(i, k)] = v;
        }
    }
    if j.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularJacobian);
    }
    Ok(j)
}

/// Damped step `dx` for scaling `d` (diagonal of `D`) and damping `lambda`.
fn lm_step(j: &DMatrix<f64>, r: &[f64], d: &[f64], lambda: f64) -> Option<DVector<f64>> {
    let (n, p) = j.shape();
    let mut a = DMatrix::<f64>::zeros(n + p, p);
    a.view_mut((0, 0), (n, p)).copy_from(j);
    for k in 0..p {
        a[(n + k, k)] = (lambda * d[k]).sqrt();
    }
    let mut b = DVector::<f64>::zeros(n + p);
    for i in 0..n {
        b[i] = -r[i];
    }
    a.svd(true, true).solve(&b, 0.0).ok()
}

/// Covariance `(J^T J)^-1 * ssr / dof` via the SVD of the column-scaled
/// Jacobian.
fn covariance(j: &DMatrix<f64>, ssr: f64, dof: usize) -> Result<DMatrix<f64>> {
    let p = j.ncols();
    let norms: Vec<f64> = (0..p).map(|k| j.column(k).norm()).collect();
    if norms.contains(&0.0) {
        return Err(Error::SingularJacobian);
    }
    let js = DMatrix::from_fn(j.nrows(), p, |i, k| j[(i, k)] / norms[k]);
    let svd = js.svd(false, true);
    let s = &svd.singular_values;
    if s.min() <= s.max() * 1e-15 * (p as f64) {
        return Err(Error::SingularJacobian);
    }
    let v_t = svd.v_t.expect("requested");
    let mut cov = DMatrix::<f64>::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            let mut acc = 0.0;
            for k in 0..p {
                acc += v_t[(k, a)] * v_t[(k, b)] / (s[k] * s[k]);
            }
            cov[(a, b)] = acc / (norms[a] * norms[b]) * ssr / dof as f64;
        }
    }
    Ok(cov)
}

/// Minimises the squared norm of `residuals(x)` within the bounds of `specs`.
///
/// A residual evaluation that fails at a trial point (a pole, a degenerate
/// SQUID) rejects that step; a failure at an accepted point propagates.
pub fn nls_fit<F>(residuals: F, specs: &[ParamSpec], opts: &NlsOptions) -> Result<NlsSolution>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let p = specs.len();
    if p == 0 {
        return Err(Error::InvalidParameter("no free parameters".into()));
    }
    for s in specs {
        if !(s.lower <= s.init && s.init <= s.upper) || !s.init.is_finite() {
            return Err(Error::InitOutOfBounds(format!("{} = {} not in [{}, {}]", s.name, s.init, s.lower, s.upper)));
        }
    }
    let mut x: Vec<f64> = specs.iter().map(|s| s.init).collect();
    let mut r = residuals(&x)?;
    let n = r.len();
    if n < p {
        return Err(Error::TooFewPoints { points: n, params: p });
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite residual at the initial point".into()));
    }
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    let mut d = vec![0.0f64; p];
    let mut converged = false;
    let mut iterations = 0;
    let mut j = jacobian(&residuals, &x, &r, specs, opts.diff_step)?;

    'outer: while iterations < opts.max_iterations {
        iterations += 1;
        if c == 0.0 {
            converged = true;
            break;
        }
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = dk.max(j.column(k).norm_squared());
        }
        if d.contains(&0.0) {
            return Err(Error::SingularJacobian);
        }
        // gradient test: cosine between each column and the residual
        let rn = c.sqrt();
        let g = j.transpose() * DVector::from_column_slice(&r);
        let gmax = (0..p)
            .map(|k| {
                let cn = j.column(k).norm();
                if cn > 0.0 {
                    // a component pushing into an active bound does not count
                    let into_bound = (x[k] <= specs[k].lower && g[k] > 0.0) || (x[k] >= specs[k].upper && g[k] < 0.0);
                    if into_bound {
                        0.0
                    } else {
                        g[k].abs() / (cn * rn)
                    }
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        if gmax <= opts.gtol {
            converged = true;
            break;
        }
        loop {
            let Some(dx) = lm_step(&j, &r, &d, lambda) else {
                return Err(Error::SingularJacobian);
            };
            let mut xt: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
            project(&mut xt, specs);
            let step_norm: f64 = (0..p).map(|k| ((xt[k] - x[k]) * d[k].sqrt()).powi(2)).sum::<f64>().sqrt();
            let x_norm: f64 = (0..p).map(|k| (x[k] * d[k].sqrt()).powi(2)).sum::<f64>().sqrt();
            let small_step = step_norm <= opts.xtol * (x_norm + opts.xtol);
            let trial = residuals(&xt).ok().filter(|rt| rt.iter().all(|v| v.is_finite()));
            if let Some(rt) = trial {
                let ct = cost(&rt);
                if ct < c {
                    let rel = (c - ct) / c;
                    x = xt;
                    r = rt;
                    c = ct;
                    lambda = (lambda / 10.0).max(1e-12);
                    j = jacobian(&residuals, &x, &r, specs, opts.diff_step)?;
                    if rel <= opts.ftol || small_step {
                        converged = true;
                        break 'outer;
                    }
                    continue 'outer;
                }
            }
            if small_step && lambda > 1.0 {
                // no descent left at the working precision
                converged = true;
                break 'outer;
            }
            lambda *= 10.0;
            if lambda > 1e20 {
                converged = true;
                break 'outer;
            }
        }
    }
    if !converged {
        return Err(Error::MaxIterations(opts.max_iterations));
    }
    let names = specs.iter().map(|s| s.name.clone()).collect();
    let dof = n.saturating_sub(p).max(1);
    let covariance = covariance(&j, c, dof)?;
    Ok(NlsSolution { names, values: x, covariance, ssr: c, n_points: n, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line_data() -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..12).map(|i| i as f64 * 0.7).collect();
        let y = x.iter().enumerate().map(|(i, v)| 2.5 * v + [0.3, -0.2, 0.1][i % 3]).collect();
        (x, y)
    }

    #[test]
    fn linear_slope_matches_normal_equations() {
        let (x, y) = line_data();
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let slope = sxy / sxx;
        let f = |p: &[f64]| Ok(x.iter().zip(&y).map(|(a, b)| p[0] * a - b).collect());
        let sol = nls_fit(f, &[ParamSpec::new("a", 1.0, -10.0, 10.0)], &NlsOptions::default()).unwrap();
        assert!((sol.values[0] - slope).abs() < 1e-10, "{} vs {slope}", sol.values[0]);
        // analytic standard error
        let ssr: f64 = x.iter().zip(&y).map(|(a, b)| (slope * a - b).powi(2)).sum();
        let se = (ssr / (x.len() - 1) as f64 / sxx).sqrt();
        assert_relative_eq!(sol.std_errors()[0], se, max_relative = 1e-6);
    }

    #[test]
    fn noiseless_exponential_round_trip() {
        let t: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|v| 0.7 * 0.93f64.powf(*v) + 0.25).collect();
        let f = |p: &[f64]| Ok(t.iter().zip(&y).map(|(v, w)| p[0] * p[1].powf(*v) + p[2] - w).collect());
        let specs = [
            ParamSpec::new("a", 0.6, 0.0, 2.0),
            ParamSpec::new("p", 0.85, 0.0, 1.0),
            ParamSpec::new("b", 0.3, -1.0, 1.0),
        ];
        let sol = nls_fit(f, &specs, &NlsOptions::default()).unwrap();
        for (v, truth) in sol.values.iter().zip([0.7, 0.93, 0.25]) {
            assert_relative_eq!(*v, truth, max_relative = 1e-6);
        }
    }

    #[test]
    fn preconditions() {
        let f = |p: &[f64]| Ok(vec![p[0] - 1.0]);
        let two = [ParamSpec::new("a", 0.0, -1.0, 1.0), ParamSpec::new("b", 0.0, -1.0, 1.0)];
        assert!(matches!(nls_fit(f, &two, &NlsOptions::default()), Err(Error::TooFewPoints { .. })));
        let bad = [ParamSpec::new("a", 5.0, -1.0, 1.0)];
        assert!(matches!(nls_fit(f, &bad, &NlsOptions::default()), Err(Error::InitOutOfBounds(_))));
    }

    #[test]
    fn insensitive_parameter_is_singular() {
        let f = |p: &[f64]| Ok(vec![p[0] - 1.0, p[0] - 2.0, p[0]]);
        let specs = [ParamSpec::new("a", 0.0, -5.0, 5.0), ParamSpec::new("b", 0.0, -5.0, 5.0)];
        assert!(matches!(nls_fit(f, &specs, &NlsOptions::default()), Err(Error::SingularJacobian)));
    }

    #[test]
    fn bound_is_respected() {
        let f = |p: &[f64]| Ok(vec![p[0] - 3.0, p[0] - 3.2]);
        let sol = nls_fit(f, &[ParamSpec::new("a", 0.0, -1.0, 1.0)], &NlsOptions::default()).unwrap();
        assert_eq!(sol.values[0], 1.0);
    }

    #[test]
    fn residual_scale_does_not_change_estimate() {
        let (x, y) = line_data();
        let specs = [ParamSpec::new("a", 1.0, -10.0, 10.0), ParamSpec::new("b", 0.0, -10.0, 10.0)];
        let fit = |w: f64| {
            let f = |p: &[f64]| Ok(x.iter().zip(&y).map(|(a, b)| (p[0] * a + p[1] - b) / w).collect());
            nls_fit(f, &specs, &NlsOptions::default()).unwrap()
        };
        let (a, b) = (fit(1.0), fit(0.05));
        for k in 0..2 {
            assert_relative_eq!(a.values[k], b.values[k], max_relative = 1e-9);
            assert_relative_eq!(a.std_errors()[k], b.std_errors()[k], max_relative = 1e-6);
        }
    }

    #[test]
    fn max_iterations() {
        let f = |p: &[f64]| Ok(vec![(p[0] - 0.3).sin() * 1e3, p[0].cos() + 2.0]);
        let opts = NlsOptions { max_iterations: 1, ..Default::default() };
        assert!(matches!(nls_fit(f, &[ParamSpec::new("a", 2.0, -5.0, 5.0)], &opts), Err(Error::MaxIterations(1))));
    }
}
