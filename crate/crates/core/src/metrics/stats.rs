// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Summary statistics of repeated benchmark runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One step of an empirical CDF: `P(X <= value) = fraction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcdfPoint {
    pub value: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Distinct sorted values with the fraction of samples at or below each.
    pub ecdf: Vec<EcdfPoint>,
}

impl StabilityStats {
    /// `"98.61 ± 0.18%"` for fidelities given as fractions.
    pub fn percent_summary(&self) -> String {
        format_percent(self.mean, self.std)
    }

    /// Fraction of samples at or below `x` (right-continuous step function).
    pub fn ecdf_at(&self, x: f64) -> f64 {
        ecdf_eval(&self.ecdf, x)
    }
}

/// Formats a fraction and its spread as percentages with two decimals.
pub fn format_percent(mean: f64, std: f64) -> String {
    format!("{:.2} ± {:.2}%", mean * 100.0, std * 100.0)
}

/// Empirical CDF of `xs`: ties collapse into one step, the last step is 1.
pub fn ecdf(xs: &[f64]) -> Result<Vec<EcdfPoint>> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidData("non-finite sample".into()));
    }
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut out: Vec<EcdfPoint> = Vec::new();
    for (i, &v) in s.iter().enumerate() {
        let fraction = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.value == v => last.fraction = fraction,
            _ => out.push(EcdfPoint { value: v, fraction }),
        }
    }
    Ok(out)
}

/// Evaluates a step ECDF at `x`.
pub fn ecdf_eval(points: &[EcdfPoint], x: f64) -> f64 {
    let k = points.partition_point(|p| p.value <= x);
    if k == 0 {
        0.0
    } else {
        points[k - 1].fraction
    }
}

pub fn stability_stats(xs: &[f64]) -> Result<StabilityStats> {
    let ecdf = ecdf(xs)?;
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { s[n / 2] } else { 0.5 * (s[n / 2 - 1] + s[n / 2]) };
    Ok(StabilityStats { n, mean, std, median, min: s[0], max: s[n - 1], ecdf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn basic_stats() {
        let s = stability_stats(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.median, 2.0);
        assert_eq!(s.mean, 2.0);
        assert_relative_eq!(s.std, 1.0);
        assert_eq!(stability_stats(&[1.0, 4.0, 2.0, 3.0]).unwrap().median, 2.5);
    }

    #[test]
    fn single_value() {
        let s = stability_stats(&[0.99]).unwrap();
        assert_eq!((s.mean, s.median, s.std), (0.99, 0.99, 0.0));
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(stability_stats(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn percent_format() {
        assert_eq!(format_percent(0.9861, 0.0018), "98.61 ± 0.18%");
    }

    #[test]
    fn ecdf_steps() {
        let e = ecdf(&[2.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e[1], EcdfPoint { value: 2.0, fraction: 0.75 });
        assert_eq!(ecdf_eval(&e, 0.5), 0.0);
        assert_eq!(ecdf_eval(&e, 2.0), 0.75);
        assert_eq!(ecdf_eval(&e, 2.5), 0.75);
        assert_eq!(ecdf_eval(&e, 3.0), 1.0);
    }
}
