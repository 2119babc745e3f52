// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form model of two transmons joined by a floating tunable coupler.
//!
//! The coupler is a transmon with a SQUID of total Josephson energy `E_Jc`
//! and junction asymmetry `r = E_Jc1 / E_Jc2`. Its frequency follows the
//! flux through the loop, and the qubit-qubit interaction is the direct
//! coupling `g12` minus the virtual exchange through the coupler:
//!
//! ```text
//! g(phi)     = g12 - g_eff(phi)
//! g_eff(phi) = g1c(phi) g2c(phi) / 2 * sum_k [1/(w_c - w_k) + 1/(w_c + w_k)]
//! ```
//!
//! Qubit-coupler couplings are supplied at zero flux and follow the coupler
//! Josephson energy as `g_kc(phi) = g_kc(0) (E_Jeff(phi) / E_Jc)^(1/4)`.

mod root;
mod zz;

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::exec::{self, Execution};

pub use root::{find_root, RootOptions, DEFAULT_G_TOLERANCE_HZ, MAX_ROOT_ITERATIONS};
pub use zz::{residual_zz_at_truncation, ZzOptions};

/// Default guard on `|w_c - w_k|` below which the dispersive formula is
/// refused.
pub const DEFAULT_RESONANCE_TOLERANCE_HZ: f64 = 1e3;

/// Below this `E_J/E_C` a transmon is outside the regime the formulas assume.
pub const TRANSMON_REGIME_RATIO: f64 = 20.0;

/// Josephson and charging energy of a fixed-frequency transmon, in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub label: String,
    pub e_j: f64,
    pub e_c: f64,
}

impl TransmonParams {
    pub fn new(label: impl Into<String>, e_j: f64, e_c: f64) -> Result<Self> {
        let t = Self { label: label.into(), e_j, e_c };
        t.validate()?;
        Ok(t)
    }

    /// Transmon whose [`transmon_frequency`] equals `frequency`.
    pub fn from_frequency(label: impl Into<String>, frequency: f64, e_c: f64) -> Result<Self> {
        ensure(frequency > 0.0 && e_c > 0.0, || {
            format!("frequency and E_C must be positive (got {frequency}, {e_c})")
        })?;
        let e_j = (frequency + e_c).powi(2) / (8.0 * e_c);
        Self::new(label, e_j, e_c)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.e_j.is_finite() && self.e_j > 0.0, || {
            format!("{}: E_J must be positive, got {}", self.label, self.e_j)
        })?;
        ensure(self.e_c.is_finite() && self.e_c > 0.0, || {
            format!("{}: E_C must be positive, got {}", self.label, self.e_c)
        })?;
        Ok(())
    }

    pub fn ej_over_ec(&self) -> f64 {
        self.e_j / self.e_c
    }

    /// Logs a warning when `E_J/E_C` is below the transmon regime. Returns
    /// whether the parameters are inside it.
    pub fn check_transmon_regime(&self) -> bool {
        let ok = self.ej_over_ec() >= TRANSMON_REGIME_RATIO;
        if !ok {
            log::warn!(
                "{}: E_J/E_C = {:.1} is below {TRANSMON_REGIME_RATIO}; charge dispersion is not modelled",
                self.label,
                self.ej_over_ec()
            );
        }
        ok
    }
}

/// Relative sign of the two qubit-coupler couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PadConfig {
    /// `g1c` and `g2c` have opposite signs.
    Asymmetric,
    /// `g1c` and `g2c` have the same sign.
    Symmetric,
}

impl PadConfig {
    /// Sign of `g1c * g2c`.
    pub fn product_sign(self) -> f64 {
        match self {
            PadConfig::Asymmetric => -1.0,
            PadConfig::Symmetric => 1.0,
        }
    }
}

/// Flux-tunable coupler: SQUID total `E_Jc`, asymmetry `r`, charging `E_Cc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerParams {
    pub e_jc: f64,
    pub r: f64,
    pub e_cc: f64,
    pub config: PadConfig,
}

impl CouplerParams {
    pub fn new(e_jc: f64, r: f64, e_cc: f64, config: PadConfig) -> Result<Self> {
        let c = Self { e_jc, r, e_cc, config };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("E_Jc", self.e_jc), ("r", self.r), ("E_Cc", self.e_cc)] {
            ensure(v.is_finite() && v > 0.0, || format!("coupler {name} must be positive, got {v}"))?;
        }
        Ok(())
    }

    /// Flux-independent correction `xi = sqrt(2 E_Cc / E_Jc)`.
    pub fn xi(&self) -> f64 {
        (2.0 * self.e_cc / self.e_jc).sqrt()
    }
}

/// Signed pairwise couplings in Hz. `g1c`/`g2c` refer to zero coupler flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub g12: f64,
    pub g1c: f64,
    pub g2c: f64,
}

impl CouplingSet {
    /// Couplings from the composite `sqrt(g1c g2c)` with signs set by `config`
    /// (`g1c > 0`, `g2c` carries the relative sign).
    pub fn from_composite(g12: f64, g_sqrt: f64, config: PadConfig) -> Self {
        Self { g12, g1c: g_sqrt, g2c: config.product_sign() * g_sqrt }
    }

    pub fn zero() -> Self {
        Self { g12: 0.0, g1c: 0.0, g2c: 0.0 }
    }

    /// Pad configuration implied by the signs of `g1c` and `g2c`, if both are
    /// non-zero.
    pub fn pad_config(&self) -> Option<PadConfig> {
        let p = self.g1c * self.g2c;
        if p < 0.0 {
            Some(PadConfig::Asymmetric)
        } else if p > 0.0 {
            Some(PadConfig::Symmetric)
        } else {
            None
        }
    }
}

/// Coupler flux in units of the flux quantum. Every flux-dependent quantity
/// has period 1 and is even.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FluxBias(pub f64);

impl FluxBias {
    /// Representative of the flux in `[0, 1)`.
    pub fn wrapped(self) -> f64 {
        self.0.rem_euclid(1.0)
    }
}

/// Readout resonator seen by the coupler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurcellParams {
    pub omega_r: f64,
    pub kappa_r: f64,
    pub g_rc: f64,
}

impl PurcellParams {
    pub fn new(omega_r: f64, kappa_r: f64, g_rc: f64) -> Result<Self> {
        for (name, v) in [("omega_r", omega_r), ("kappa_r", kappa_r), ("g_rc", g_rc)] {
            ensure(v.is_finite() && v > 0.0, || format!("Purcell {name} must be positive, got {v}"))?;
        }
        Ok(Self { omega_r, kappa_r, g_rc })
    }
}

/// `E_Jeff = E_Jc sqrt(1 + r^2 + 2 r cos(2 pi phi)) / (1 + r)`.
pub fn effective_josephson_energy(c: &CouplerParams, f: FluxBias) -> f64 {
    let r = c.r;
    let arg = 1.0 + r * r + 2.0 * r * (2.0 * PI * f.wrapped()).cos();
    // arg can dip a few ulp below zero at r = 1, phi = 1/2
    c.e_jc * arg.max(0.0).sqrt() / (1.0 + r)
}

/// `w_c = sqrt(8 E_Jeff E_Cc) - E_Cc (1 + xi/4)`, with `xi` from the total
/// `E_Jc`.
pub fn coupler_frequency(c: &CouplerParams, f: FluxBias) -> Result<f64> {
    let e_jeff = effective_josephson_energy(c, f);
    if e_jeff <= 0.0 {
        return Err(Error::DegenerateSquid);
    }
    Ok((8.0 * e_jeff * c.e_cc).sqrt() - c.e_cc * (1.0 + c.xi() / 4.0))
}

/// `w = sqrt(8 E_J E_C) - E_C`.
pub fn transmon_frequency(t: &TransmonParams) -> f64 {
    (8.0 * t.e_j * t.e_c).sqrt() - t.e_c
}

/// Exchange coupling from a charge-coupling energy:
/// `g = E / sqrt(2) * (E_Ja/E_Ca * E_Jb/E_Cb)^(1/4)`.
pub fn coupling_from_energy(e_coupling: f64, a: &TransmonParams, b: &TransmonParams) -> f64 {
    e_coupling / SQRT_2 * (a.ej_over_ec() * b.ej_over_ec()).powf(0.25)
}

/// Purcell-limited lifetime `T1 = (w_c - w_r)^2 / (kappa_r g_rc^2)` with all
/// rates angular. Returns seconds; `+inf` when `g_rc` is zero.
pub fn purcell_t1(p: &PurcellParams, omega_c: f64) -> Result<f64> {
    let detuning = omega_c - p.omega_r;
    if detuning == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    if p.g_rc == 0.0 {
        return Ok(f64::INFINITY);
    }
    let two_pi = 2.0 * PI;
    let d = two_pi * detuning;
    let g = two_pi * p.g_rc;
    Ok(d * d / (two_pi * p.kappa_r * g * g))
}

/// A qubit given by its circuit parameters, optionally with a measured
/// frequency that replaces the transmon estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qubit {
    pub params: TransmonParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_override: Option<f64>,
}

impl Qubit {
    pub fn new(params: TransmonParams) -> Self {
        Self { params, frequency_override: None }
    }

    pub fn with_frequency(mut self, frequency: f64) -> Self {
        self.frequency_override = Some(frequency);
        self
    }

    pub fn frequency(&self) -> f64 {
        self.frequency_override.unwrap_or_else(|| transmon_frequency(&self.params))
    }

    pub fn anharmonicity(&self) -> f64 {
        -self.params.e_c
    }
}

/// Two qubits, the coupler and their couplings: everything needed to
/// evaluate `g(phi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerModel {
    pub q1: Qubit,
    pub q2: Qubit,
    pub coupler: CouplerParams,
    pub couplings: CouplingSet,
    pub resonance_tol_hz: f64,
}

impl CouplerModel {
    pub fn new(q1: Qubit, q2: Qubit, coupler: CouplerParams, couplings: CouplingSet) -> Self {
        Self { q1, q2, coupler, couplings, resonance_tol_hz: DEFAULT_RESONANCE_TOLERANCE_HZ }
    }

    pub fn validate(&self) -> Result<()> {
        self.q1.params.validate()?;
        self.q2.params.validate()?;
        self.coupler.validate()?;
        for (name, w) in [("q1", self.q1.frequency()), ("q2", self.q2.frequency())] {
            ensure(w.is_finite() && w > 0.0, || format!("{name} frequency must be positive, got {w}"))?;
        }
        Ok(())
    }

    pub fn qubit_frequencies(&self) -> [f64; 2] {
        [self.q1.frequency(), self.q2.frequency()]
    }

    pub fn coupler_frequency(&self, f: FluxBias) -> Result<f64> {
        coupler_frequency(&self.coupler, f)
    }

    /// Ratio `(E_Jeff(phi)/E_Jc)^(1/4)` by which `g1c`, `g2c` scale.
    pub fn coupling_scale(&self, f: FluxBias) -> f64 {
        (effective_josephson_energy(&self.coupler, f) / self.coupler.e_jc).powf(0.25)
    }

    /// Couplings at flux `f` (`g12` is flux independent).
    pub fn couplings_at(&self, f: FluxBias) -> CouplingSet {
        let s = self.coupling_scale(f);
        CouplingSet { g12: self.couplings.g12, g1c: self.couplings.g1c * s, g2c: self.couplings.g2c * s }
    }

    /// Virtual coupling through the coupler, `g_eff(phi)`.
    pub fn effective_coupling(&self, f: FluxBias) -> Result<f64> {
        let wc = self.coupler_frequency(f)?;
        let mut sum = 0.0;
        for (k, wk) in self.qubit_frequencies().into_iter().enumerate() {
            let delta = wc - wk;
            if delta.abs() < self.resonance_tol_hz {
                return Err(Error::ResonantCoupler { qubit: k + 1, detuning_hz: delta });
            }
            sum += 1.0 / delta + 1.0 / (wc + wk);
        }
        let g = self.couplings_at(f);
        Ok(0.5 * g.g1c * g.g2c * sum)
    }

    /// Net qubit-qubit coupling `g = g12 - g_eff(phi)` in Hz.
    pub fn net_coupling(&self, f: FluxBias) -> Result<f64> {
        Ok(self.couplings.g12 - self.effective_coupling(f)?)
    }

    /// `g` on a list of flux points, in input order.
    pub fn sweep(&self, phis: &[f64], exec: Execution) -> Result<Vec<f64>> {
        exec::map(exec, phis, |&p| self.net_coupling(FluxBias(p))).into_iter().collect()
    }

    /// Flux in `[lo, hi]` where the net coupling vanishes to within
    /// `opts.tol_g_hz`.
    pub fn find_zero_coupling(&self, lo: f64, hi: f64, opts: &RootOptions) -> Result<FluxBias> {
        find_root(|p| self.net_coupling(FluxBias(p)), lo, hi, opts).map(FluxBias)
    }

    /// Conditional frequency shift `zeta = E11 - E10 - E01 + E00` in Hz from
    /// exact diagonalisation of the three-mode Hamiltonian. Fails with
    /// [`Error::TruncationUnconverged`] if doubling the per-mode truncation
    /// changes the result by more than `opts.convergence_rel`.
    pub fn residual_zz(&self, f: FluxBias, opts: &ZzOptions) -> Result<f64> {
        zz::residual_zz(self, f, opts)
    }
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GHZ: f64 = 1e9;
    const MHZ: f64 = 1e6;

    fn bump_bump_coupler() -> CouplerParams {
        CouplerParams::new(58.4 * GHZ, 0.4, 113.0 * MHZ, PadConfig::Asymmetric).unwrap()
    }

    fn model(q1: f64, q2: f64, coupler: CouplerParams, cs: CouplingSet) -> CouplerModel {
        CouplerModel::new(
            Qubit::new(TransmonParams::from_frequency("q1", q1, 200.0 * MHZ).unwrap()),
            Qubit::new(TransmonParams::from_frequency("q2", q2, 200.0 * MHZ).unwrap()),
            coupler,
            cs,
        )
    }

    #[test]
    fn ejeff_at_zero_flux_is_total() {
        for r in [0.1, 0.4, 1.0, 3.0] {
            let c = CouplerParams::new(12.3 * GHZ, r, 0.1 * GHZ, PadConfig::Symmetric).unwrap();
            assert_relative_eq!(effective_josephson_energy(&c, FluxBias(0.0)), 12.3 * GHZ, max_relative = 1e-15);
        }
    }

    #[test]
    fn ejeff_at_half_flux() {
        // E_Jc |1 - r| / (1 + r)
        let v = effective_josephson_energy(&bump_bump_coupler(), FluxBias(0.5));
        assert_relative_eq!(v, 58.4 * GHZ * 0.6 / 1.4, max_relative = 1e-12);
        assert!((v / GHZ - 25.03).abs() < 5e-3);
    }

    #[test]
    fn ejeff_even_and_periodic() {
        let c = bump_bump_coupler();
        let a = effective_josephson_energy(&c, FluxBias(0.3));
        assert_relative_eq!(a, effective_josephson_energy(&c, FluxBias(-0.3)), max_relative = 1e-12);
        assert_relative_eq!(a, effective_josephson_energy(&c, FluxBias(1.3)), max_relative = 1e-12);
    }

    #[test]
    fn four_bump_coupler_frequency() {
        let c = CouplerParams::new(15.1 * GHZ, 3.0, 116.0 * MHZ, PadConfig::Symmetric).unwrap();
        // hand evaluation in GHz
        let xi = (2.0_f64 * 0.116 / 15.1).sqrt();
        let expect = (8.0_f64 * 15.1 * 0.116).sqrt() - 0.116 * (1.0 + xi / 4.0);
        let got = coupler_frequency(&c, FluxBias(0.0)).unwrap() / GHZ;
        assert_relative_eq!(got, expect, max_relative = 1e-12);
        assert!((got - 3.623).abs() < 1e-3);
    }

    #[test]
    fn xi_does_not_depend_on_flux() {
        let c = bump_bump_coupler();
        let w = |p| coupler_frequency(&c, FluxBias(p)).unwrap();
        let ej = |p| effective_josephson_energy(&c, FluxBias(p));
        let shift = c.e_cc * (1.0 + c.xi() / 4.0);
        for p in [0.0, 0.2, 0.45] {
            assert_relative_eq!(w(p), (8.0 * ej(p) * c.e_cc).sqrt() - shift, max_relative = 1e-14);
        }
    }

    #[test]
    fn symmetric_squid_degenerates_at_half_flux() {
        let c = CouplerParams::new(20.0 * GHZ, 1.0, 0.1 * GHZ, PadConfig::Symmetric).unwrap();
        assert!(matches!(coupler_frequency(&c, FluxBias(0.5)), Err(Error::DegenerateSquid)));
    }

    #[test]
    fn coupler_frequency_decreases_to_half_flux() {
        let c = bump_bump_coupler();
        let ws: Vec<f64> = linspace(0.0, 0.5, 101).into_iter().map(|p| coupler_frequency(&c, FluxBias(p)).unwrap()).collect();
        assert!(ws.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn transmon_frequency_examples() {
        let t = TransmonParams::new("q", 12.0 * GHZ, 0.2 * GHZ).unwrap();
        assert_relative_eq!(transmon_frequency(&t) / GHZ, 19.2_f64.sqrt() - 0.2, max_relative = 1e-14);
        assert!((transmon_frequency(&t) / GHZ - 4.1818).abs() < 1e-4);
        let s = 3.0;
        let ts = TransmonParams::new("q", s * t.e_j, s * t.e_c).unwrap();
        assert_relative_eq!(transmon_frequency(&ts) + ts.e_c, s * (transmon_frequency(&t) + t.e_c), max_relative = 1e-14);
        let f = TransmonParams::from_frequency("q", 4.25 * GHZ, 0.2 * GHZ).unwrap();
        assert_relative_eq!(transmon_frequency(&f), 4.25 * GHZ, max_relative = 1e-14);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(TransmonParams::new("q", -1.0, 1.0).is_err());
        assert!(TransmonParams::new("q", 1.0, 0.0).is_err());
        assert!(CouplerParams::new(1.0, 0.0, 1.0, PadConfig::Symmetric).is_err());
        assert!(PurcellParams::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn transmon_regime_check() {
        assert!(TransmonParams::new("q", 10.0, 1.0).map(|t| !t.check_transmon_regime()).unwrap());
        assert!(TransmonParams::new("q", 50.0, 1.0).unwrap().check_transmon_regime());
    }

    #[test]
    fn coupling_from_energy_cases() {
        let unit = TransmonParams::new("u", 1.0 * GHZ, 1.0 * GHZ).unwrap();
        assert_eq!(coupling_from_energy(0.0, &unit, &unit), 0.0);
        assert_relative_eq!(coupling_from_energy(10.0 * MHZ, &unit, &unit), 10.0 * MHZ / SQRT_2, max_relative = 1e-15);
        let a = TransmonParams::new("a", 10.0 * GHZ, 0.2 * GHZ).unwrap();
        let b = TransmonParams::new("b", 20.0 * GHZ, 0.1 * GHZ).unwrap();
        let a2 = TransmonParams::new("a", 20.0 * GHZ, 0.2 * GHZ).unwrap();
        let b2 = TransmonParams::new("b", 40.0 * GHZ, 0.1 * GHZ).unwrap();
        let g = coupling_from_energy(-3.0 * MHZ, &a, &b);
        assert!(g < 0.0);
        assert_relative_eq!(coupling_from_energy(-3.0 * MHZ, &a2, &b2), g * SQRT_2, max_relative = 1e-14);
    }

    #[test]
    fn net_coupling_without_coupler_arm_is_direct() {
        let m = model(4.0 * GHZ, 4.25 * GHZ, bump_bump_coupler(), CouplingSet { g12: -5.2 * MHZ, g1c: 0.0, g2c: -93.0 * MHZ });
        for p in linspace(0.0, 1.0, 21) {
            assert_eq!(m.net_coupling(FluxBias(p)).unwrap(), -5.2 * MHZ);
        }
    }

    #[test]
    fn shipped_bump_bump_crosses_zero() {
        let cs = CouplingSet::from_composite(-5.2 * MHZ, 93.0 * MHZ, PadConfig::Asymmetric);
        let m = model(4.0 * GHZ, 4.25 * GHZ, bump_bump_coupler(), cs);
        let g = m.sweep(&linspace(0.0, 0.5, 501), Execution::Sequential).unwrap();
        let changes = g.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert_eq!(changes, 1);
    }

    #[test]
    fn resonance_guard() {
        let c = bump_bump_coupler();
        let wc = coupler_frequency(&c, FluxBias(0.25)).unwrap();
        let cs = CouplingSet::from_composite(-5.2 * MHZ, 93.0 * MHZ, PadConfig::Asymmetric);
        let mut m = model(4.0 * GHZ, 4.25 * GHZ, c, cs);
        m.q2.frequency_override = Some(wc + 10.0);
        assert!(matches!(m.net_coupling(FluxBias(0.25)), Err(Error::ResonantCoupler { qubit: 2, .. })));
        m.resonance_tol_hz = 1.0;
        assert!(m.net_coupling(FluxBias(0.25)).is_ok());
    }

    #[test]
    fn purcell_examples() {
        let p = PurcellParams::new(7.4 * GHZ, 1.0 * MHZ, 54.0 * MHZ).unwrap();
        let t1 = purcell_t1(&p, 7.4 * GHZ - 500.0 * MHZ).unwrap();
        let two_pi = 2.0 * PI;
        let expect = (two_pi * 5e8).powi(2) / ((two_pi * 1e6) * (two_pi * 5.4e7).powi(2));
        assert_relative_eq!(t1, expect, max_relative = 1e-14);
        assert!((t1 * 1e6 - 13.6).abs() < 0.05);
        let t2 = purcell_t1(&p, 7.4 * GHZ - 1000.0 * MHZ).unwrap();
        assert_relative_eq!(t2, 4.0 * t1, max_relative = 1e-14);
        assert!(matches!(purcell_t1(&p, 7.4 * GHZ), Err(Error::ZeroDetuning)));
        let mut p0 = p;
        p0.g_rc = 0.0;
        assert_eq!(purcell_t1(&p0, 7.0 * GHZ).unwrap(), f64::INFINITY);
    }

    #[test]
    fn linspace_ends() {
        assert_eq!(linspace(0.0, 0.5, 2), vec![0.0, 0.5]);
        assert_eq!(linspace(0.0, 0.5, 101)[100], 0.5);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }
}
