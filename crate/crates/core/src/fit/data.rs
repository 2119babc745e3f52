// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Measured curves and their CSV form.
//!
//! * coupling curve: header `phi,g_hz` or `phi,g_hz,sigma_hz`
//! * coupler lifetime: header `omega_c_hz,t1_s`
//!
//! Headers are required and matched exactly; numbers use a decimal point.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::PadConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GPoint {
    /// Coupler flux in flux quanta.
    pub phi: f64,
    pub g_hz: f64,
    pub sigma_hz: Option<f64>,
}

/// Net coupling versus coupler flux.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GCurve {
    pub points: Vec<GPoint>,
    pub label: Option<String>,
    pub config: Option<PadConfig>,
}

impl GCurve {
    pub fn new(points: Vec<GPoint>) -> Result<Self> {
        let c = Self { points, label: None, config: None };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let with_sigma = self.points.iter().filter(|p| p.sigma_hz.is_some()).count();
        if with_sigma != 0 && with_sigma != self.points.len() {
            return Err(Error::InvalidData("sigma_hz must be given for all points or none".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.phi.is_finite() || !p.g_hz.is_finite() {
                return Err(Error::InvalidData(format!("point {i}: phi and g_hz must be finite")));
            }
            if let Some(s) = p.sigma_hz {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::InvalidData(format!("point {i}: sigma_hz must be positive, got {s}")));
                }
            }
        }
        Ok(())
    }

    pub fn has_sigma(&self) -> bool {
        self.points.first().is_some_and(|p| p.sigma_hz.is_some())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        let sigma = match cols.as_slice() {
            ["phi", "g_hz"] => false,
            ["phi", "g_hz", "sigma_hz"] => true,
            _ => return Err(Error::InvalidData(format!("expected header `phi,g_hz[,sigma_hz]`, got `{}`", cols.join(",")))),
        };
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let v = parse_row(&rec, i, if sigma { 3 } else { 2 })?;
            points.push(GPoint { phi: v[0], g_hz: v[1], sigma_hz: sigma.then(|| v[2]) });
        }
        Self::new(points)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if self.has_sigma() {
            w.write_record(["phi", "g_hz", "sigma_hz"])?;
        } else {
            w.write_record(["phi", "g_hz"])?;
        }
        for p in &self.points {
            let mut row = vec![p.phi.to_string(), p.g_hz.to_string()];
            if let Some(s) = p.sigma_hz {
                row.push(s.to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T1Point {
    pub omega_c_hz: f64,
    pub t1_s: f64,
}

/// Coupler lifetime versus coupler frequency, with the readout resonator
/// frequency and linewidth (Hz) held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T1Curve {
    pub points: Vec<T1Point>,
    pub omega_r_hz: f64,
    pub kappa_r_hz: f64,
}

impl T1Curve {
    pub fn new(points: Vec<T1Point>, omega_r_hz: f64, kappa_r_hz: f64) -> Result<Self> {
        let c = Self { points, omega_r_hz, kappa_r_hz };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !(self.omega_r_hz.is_finite() && self.omega_r_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("omega_r must be positive, got {}", self.omega_r_hz)));
        }
        if !(self.kappa_r_hz.is_finite() && self.kappa_r_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("kappa_r must be positive, got {}", self.kappa_r_hz)));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(p.t1_s.is_finite() && p.t1_s > 0.0) {
                return Err(Error::InvalidData(format!("point {i}: t1_s must be positive, got {}", p.t1_s)));
            }
            if !p.omega_c_hz.is_finite() || p.omega_c_hz == self.omega_r_hz {
                return Err(Error::InvalidData(format!("point {i}: omega_c_hz must be finite and differ from omega_r")));
            }
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, omega_r_hz: f64, kappa_r_hz: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols != ["omega_c_hz", "t1_s"] {
            return Err(Error::InvalidData(format!("expected header `omega_c_hz,t1_s`, got `{}`", cols.join(","))));
        }
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let v = parse_row(&rec?, i, 2)?;
            points.push(T1Point { omega_c_hz: v[0], t1_s: v[1] });
        }
        Self::new(points, omega_r_hz, kappa_r_hz)
    }

    pub fn load(path: impl AsRef<Path>, omega_r_hz: f64, kappa_r_hz: f64) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, omega_r_hz, kappa_r_hz)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["omega_c_hz", "t1_s"])?;
        for p in &self.points {
            w.write_record([p.omega_c_hz.to_string(), p.t1_s.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses exactly `n` numeric fields of data row `i` (0-based).
pub(crate) fn parse_row(rec: &csv::StringRecord, i: usize, n: usize) -> Result<Vec<f64>> {
    if rec.len() != n {
        return Err(Error::InvalidData(format!("row {}: expected {n} fields, got {}", i + 1, rec.len())));
    }
    rec.iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidData(format!("row {}: `{s}` is not a number", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcurve_csv_round_trip() {
        let c = GCurve::new(vec![
            GPoint { phi: 0.0, g_hz: -1.5e6, sigma_hz: Some(5e4) },
            GPoint { phi: 0.25, g_hz: 3.25e6, sigma_hz: Some(5e4) },
        ])
        .unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("phi,g_hz,sigma_hz\n"));
        assert_eq!(GCurve::read_csv(buf.as_slice()).unwrap(), c);
    }

    #[test]
    fn gcurve_rejects_bad_input() {
        assert!(GCurve::read_csv("phi,g\n0,1\n".as_bytes()).is_err());
        assert!(GCurve::read_csv("phi,g_hz\n0,1,2\n".as_bytes()).is_err());
        assert!(GCurve::read_csv("phi,g_hz\n0,1e6\n0.1,1,5e6\n".as_bytes()).is_err());
        assert!(GCurve::read_csv("phi,g_hz,sigma_hz\n0,1,0\n".as_bytes()).is_err());
        assert!(GCurve::read_csv("phi,g_hz\n0,\"1,5\"\n".as_bytes()).is_err());
        assert!(GCurve::read_csv("phi,g_hz\n".as_bytes()).is_err());
    }

    #[test]
    fn t1_csv() {
        let c = T1Curve::read_csv("omega_c_hz,t1_s\n6.5e9,1.3e-5\n".as_bytes(), 7e9, 1e6).unwrap();
        assert_eq!(c.points[0].t1_s, 1.3e-5);
        assert!(T1Curve::read_csv("omega_c_hz,t1_s\n7e9,1e-5\n".as_bytes(), 7e9, 1e6).is_err());
        assert!(T1Curve::read_csv("omega_c_hz,t1_s\n6e9,-1\n".as_bytes(), 7e9, 1e6).is_err());
    }
}
