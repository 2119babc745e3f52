// Copyright 2026 The mcoupler Authors
// SPDX-License-Identifier: Apache-2.0

//! Verb implementations. Each verb writes its machine output (a JSON report
//! or a CSV table) to `--out` or standard output and a short human summary
//! in MHz / µs to standard error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use mcoupler::capnet::{sensitivity_sweep, Design, NetworkFile, SensitivityOptions};
use mcoupler::circuit::{linspace, CouplerModel, FluxBias, RootOptions, ZzOptions};
use mcoupler::exec::Execution;
use mcoupler::fit::{fit_gcurve, fit_purcell, FitReport, GCurve, GCurveFitOptions, NlsOptions, RConvention, T1Curve};
use mcoupler::metrics::{
    coherence_limited_fidelity, irb_from_runs, simulate_irb_reruns, stability_stats, RbRun, RbVariant, TWO_QUBIT_DIM,
};
use mcoupler::synth::{self, RbSimConfig};
use mcoupler::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::DeviceConfig;
use crate::{
    Command, Common, FidelityArgs, FindZeroArgs, FitGArgs, FitPurcellArgs, RbArgs, SensitivityArgs, SweepArgs, ZzArgs,
    TOOL, VERSION,
};

type Result<T> = std::result::Result<T, Error>;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Sweep(a) => sweep(a),
        Command::FindZero(a) => find_zero(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::FitG(a) => fit_g(a),
        Command::FitPurcell(a) => fit_purcell_cmd(a),
        Command::Fidelity(a) => fidelity(a),
        Command::Rb(a) => rb(a),
        Command::Zz(a) => zz(a),
    }
}

fn mhz(hz: f64) -> String {
    format!("{:.3} MHz", hz / 1e6)
}

fn us(s: f64) -> String {
    format!("{:.3} µs", s * 1e6)
}

fn load_config(common: &Common) -> Result<DeviceConfig> {
    let path = common
        .config
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("`--config` is required for this command".into()))?;
    DeviceConfig::load(path)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Report envelope shared by every verb.
fn report(command: &str, common: &Common, inputs: Value, result: Value) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "inputs": {
            "config_path": common.config,
            "seed": common.seed,
            "args": inputs,
        },
        "result": result,
    })
}

fn write_json(path: Option<&Path>, v: &Value) -> Result<()> {
    let mut w = open_out(path)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

fn print_fit_warnings(r: &FitReport) {
    for w in &r.warnings {
        eprintln!("  warning: {w}");
    }
    for n in &r.notes {
        eprintln!("  note: {n}");
    }
}

fn sweep(a: SweepArgs) -> Result<()> {
    let cfg = load_config(&a.common)?;
    let model = cfg.model()?;
    let spec = cfg.sweep.clone();
    let phi_min = a.phi_min.or(spec.as_ref().map(|s| s.phi_min)).unwrap_or(0.0);
    let phi_max = a.phi_max.or(spec.as_ref().map(|s| s.phi_max)).unwrap_or(0.5);
    let points = a.points.or(spec.as_ref().map(|s| s.points)).unwrap_or(101);
    if points < 2 {
        return Err(Error::InvalidParameter(format!("`points` must be at least 2, got {points}")));
    }
    if !(phi_min.is_finite() && phi_max.is_finite() && phi_min < phi_max) {
        return Err(Error::InvalidParameter(format!("flux range [{phi_min}, {phi_max}] is empty or not finite")));
    }
    let phis = linspace(phi_min, phi_max, points);
    let g = model.sweep(&phis, Execution::available())?;

    let mut w = csv::Writer::from_writer(open_out(a.common.out.as_deref())?);
    w.write_record(["phi", "g_hz"]).map_err(Error::from)?;
    for (p, gv) in phis.iter().zip(&g) {
        w.write_record([p.to_string(), gv.to_string()]).map_err(Error::from)?;
    }
    w.flush()?;

    let crossings = g.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    let (gmin, gmax) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    eprintln!(
        "sweep: {points} points over phi in [{phi_min}, {phi_max}]; g from {} to {}; {crossings} sign change(s)",
        mhz(gmin),
        mhz(gmax)
    );
    if let Some(path) = a.report.as_deref() {
        let inputs = json!({"config": cfg, "phi_min": phi_min, "phi_max": phi_max, "points": points, "model": model});
        let result = json!({"g_min_hz": gmin, "g_max_hz": gmax, "sign_changes": crossings, "table": a.common.out});
        write_json(Some(path), &report("sweep", &a.common, inputs, result))?;
    }
    Ok(())
}

fn find_zero(a: FindZeroArgs) -> Result<()> {
    let cfg = load_config(&a.common)?;
    let model = cfg.model()?;
    let lo = a.lo.or(cfg.find_zero.as_ref().map(|b| b.lo)).unwrap_or(0.0);
    let hi = a.hi.or(cfg.find_zero.as_ref().map(|b| b.hi)).unwrap_or(0.5);
    let mut opts = RootOptions::default();
    if let Some(t) = a.tol_hz {
        opts.tol_g_hz = t;
    }
    let phi = model.find_zero_coupling(lo, hi, &opts)?;
    let residual = model.net_coupling(phi)?;
    eprintln!("find-zero: phi_zero = {:.6} flux quanta, residual g = {:.3} kHz", phi.0, residual / 1e3);
    let inputs = json!({"config": cfg, "bracket": [lo, hi], "root": opts, "model": model});
    let result = json!({"phi_zero": phi.0, "g_residual_hz": residual, "omega_c_hz": model.coupler_frequency(phi)?});
    write_json(a.common.out.as_deref(), &report("find-zero", &a.common, inputs, result))
}

fn sensitivity(a: SensitivityArgs) -> Result<()> {
    let cfg = match &a.common.config {
        Some(_) => Some(load_config(&a.common)?),
        None => None,
    };
    let spec = cfg.as_ref().and_then(|c| c.sensitivity.clone());
    let network: PathBuf = a
        .network
        .clone()
        .or(spec.as_ref().map(|s| s.network.clone()))
        .ok_or_else(|| Error::InvalidParameter("`sensitivity.network` (or --network) is required".into()))?;
    let design: Design = a
        .design
        .map(Design::from)
        .or(spec.as_ref().map(|s| s.design))
        .ok_or_else(|| Error::InvalidParameter("`sensitivity.design` (or --design) is required".into()))?;
    let heights = a
        .heights
        .clone()
        .or(spec.as_ref().map(|s| s.heights_m.clone()))
        .ok_or_else(|| Error::InvalidParameter("`sensitivity.heights_m` (or --heights) is required".into()))?;
    if heights.is_empty() {
        return Err(Error::InvalidParameter("`heights` list is empty".into()));
    }
    let file = NetworkFile::load(&network)?;
    let mut opts = SensitivityOptions::default();
    if let Some(t) = cfg.as_ref().and_then(|c| c.resonance_tol_hz) {
        opts.resonance_tol_hz = t;
    }
    let rows = sensitivity_sweep(&file, design, &heights, &opts, Execution::available())?;

    let mut w = csv::Writer::from_writer(open_out(a.common.out.as_deref())?);
    for r in &rows {
        w.serialize(r).map_err(Error::from)?;
    }
    w.flush()?;

    eprintln!("sensitivity: {design:?}");
    for r in &rows {
        eprintln!(
            "  h = {:.2} µm: g12 {}, g1c {}, g2c {}, max|g| {}, zero at {}",
            r.height_m * 1e6,
            mhz(r.g12_hz),
            mhz(r.g1c_hz),
            mhz(r.g2c_hz),
            mhz(r.max_abs_g_hz),
            r.phi_zero.map_or("none".to_string(), |p| format!("{p:.4}"))
        );
    }
    if let Some(path) = a.report.as_deref() {
        let inputs = json!({"config": cfg, "network": file, "design": design, "heights_m": heights, "options": opts});
        write_json(Some(path), &report("sensitivity", &a.common, inputs, to_value(&rows)?))?;
    }
    Ok(())
}

fn fit_g(a: FitGArgs) -> Result<()> {
    let cfg = load_config(&a.common)?;
    let data_path = a
        .data
        .clone()
        .or(cfg.fit_g.as_ref().and_then(|f| f.data.clone()))
        .ok_or_else(|| Error::InvalidParameter("`fit_g.data` (or --data) is required".into()))?;
    let data = GCurve::load(&data_path)?;
    let c = cfg.coupler_spec()?;
    let [w1, w2] = cfg.qubit_frequencies()?;
    let mut opts = GCurveFitOptions::new(c.e_cc_hz, w1, w2, c.config);
    opts.r_convention = if a.r_at_least_one {
        RConvention::AtLeastOne
    } else {
        cfg.fit_g.as_ref().map(|f| f.r_convention).unwrap_or_default()
    };
    opts.exec = Execution::available();
    let fit = fit_gcurve(&data, &opts)?;

    eprintln!("fit-g: {} points, {:?} coupler", data.points.len(), c.config);
    for (name, p) in &fit.params {
        if name.ends_with("_hz") {
            eprintln!("  {name:<12} {} ± {}", mhz(p.value), mhz(p.std_error));
        } else {
            eprintln!("  {name:<12} {:.4} ± {:.4}", p.value, p.std_error);
        }
    }
    print_fit_warnings(&fit);
    let inputs = json!({"config": cfg, "data_path": data_path, "data": data, "options": opts});
    write_json(a.common.out.as_deref(), &report("fit-g", &a.common, inputs, to_value(&fit)?))
}

fn fit_purcell_cmd(a: FitPurcellArgs) -> Result<()> {
    let cfg = load_config(&a.common)?;
    let p = cfg.purcell()?;
    let data = T1Curve::load(&a.data, p.omega_r_hz, p.kappa_r_hz)?;
    let fit = fit_purcell(&data, &NlsOptions::default())?;
    let g = fit.params.get("g_rc_hz").copied();
    if let Some(g) = g {
        eprintln!("fit-purcell: {} points, g_rc = {} ± {}", data.points.len(), mhz(g.value), mhz(g.std_error));
    }
    print_fit_warnings(&fit);
    let inputs = json!({"config": cfg, "data_path": a.data, "data": data});
    write_json(a.common.out.as_deref(), &report("fit-purcell", &a.common, inputs, to_value(&fit)?))
}

fn fidelity(a: FidelityArgs) -> Result<()> {
    let cfg = load_config(&a.common)?;
    let coherence = cfg.coherence(a.assume_static_equals_modulated)?;
    let gate = cfg.gate()?;
    let warnings = coherence.validate()?;
    let f = coherence_limited_fidelity(&coherence, &gate)?;
    let mut assumptions = Vec::new();
    if a.assume_static_equals_modulated {
        assumptions.push("static qubit-2 T1 and T2* set equal to the modulated values".to_string());
    }
    eprintln!(
        "fidelity: F = {:.4} ({:.2}%) for t_flat = {}, t_pad = {}",
        f,
        f * 100.0,
        us(gate.t_flat_s),
        us(gate.t_pad_s)
    );
    eprintln!(
        "  q1: T1 {}, T2* {}; q2 static: T1 {}, T2* {}; q2 modulated: T1 {}, T2* {}",
        us(coherence.t1_q1_s),
        us(coherence.t2s_q1_s),
        us(coherence.t1_q2_s),
        us(coherence.t2s_q2_s),
        us(coherence.t1_q2_mod_s),
        us(coherence.t2s_q2_mod_s)
    );
    for s in assumptions.iter().chain(&warnings) {
        eprintln!("  note: {s}");
    }
    let inputs = json!({
        "config": cfg,
        "assume_static_equals_modulated": a.assume_static_equals_modulated,
        "coherence": coherence,
        "gate": gate,
    });
    let result = json!({"fidelity": f, "infidelity": 1.0 - f, "assumptions": assumptions, "warnings": warnings});
    write_json(a.common.out.as_deref(), &report("fidelity", &a.common, inputs, result))
}

fn rb(a: RbArgs) -> Result<()> {
    let cfg = match &a.common.config {
        Some(_) => Some(load_config(&a.common)?),
        None => None,
    };
    let spec = cfg.as_ref().and_then(|c| c.rb.clone());
    let mut sim: Option<RbSimConfig> = spec.as_ref().and_then(|s| s.simulate.clone());
    if let Some(f) = a.simulate_fidelity {
        sim = Some(RbSimConfig { fidelity: f, ..sim.unwrap_or_default() });
    }
    let dimension = a.dimension.or(spec.as_ref().and_then(|s| s.dimension)).unwrap_or(TWO_QUBIT_DIM);
    let reruns = a.reruns.or(spec.as_ref().and_then(|s| s.reruns));
    // a data source chosen on the command line replaces the one in the config
    let cli_csv = a.reference.is_some() || a.interleaved.is_some();
    let (spec_reference, spec_interleaved) = match (&spec, a.simulate_fidelity) {
        (Some(s), None) => (s.reference.clone(), s.interleaved.clone()),
        _ => (None, None),
    };
    if cli_csv && a.simulate_fidelity.is_none() {
        sim = None;
    }
    let reference_path = a.reference.clone().or(spec_reference);
    let interleaved_path = a.interleaved.clone().or(spec_interleaved);
    let opts = NlsOptions::default();

    let (reference, interleaved, source) = match (&sim, &reference_path, &interleaved_path) {
        (Some(s), None, None) => {
            let s = RbSimConfig { dimension, ..s.clone() };
            s.validate()?;
            let (r, i) = synth::rb_pair(&s, &mut synth::rng(a.common.seed))?;
            sim = Some(s);
            (r, i, "simulated")
        }
        (None, Some(r), Some(i)) => {
            (RbRun::load(r, RbVariant::Reference)?, RbRun::load(i, RbVariant::Interleaved)?, "csv")
        }
        (Some(_), _, _) => {
            return Err(Error::InvalidParameter("give either simulation settings or reference/interleaved CSVs, not both".into()))
        }
        _ => {
            return Err(Error::InvalidParameter(
                "rb needs both `--reference` and `--interleaved` CSVs, or `--simulate-fidelity`".into(),
            ))
        }
    };
    let irb = irb_from_runs(&reference, &interleaved, dimension, &opts)?;
    eprintln!(
        "rb ({source}): p_ref = {:.5} ± {:.5}, p_int = {:.5} ± {:.5}",
        irb.reference.p, irb.reference.p_std_error, irb.interleaved.p, irb.interleaved.p_std_error
    );
    eprintln!("  gate fidelity = {:.4} ± {:.4} ({:.2}%)", irb.fidelity, irb.fidelity_std_error, irb.fidelity * 100.0);

    let stability = match (reruns, &sim) {
        (Some(k), Some(s)) => {
            let xs = simulate_irb_reruns(s, k, a.common.seed, Execution::available())?;
            let st = stability_stats(&xs)?;
            eprintln!("  stability over {k} reruns: {}", st.percent_summary());
            Some(json!({"reruns": k, "fidelities": xs, "summary": st.percent_summary(), "stats": st}))
        }
        (Some(_), None) => {
            return Err(Error::InvalidParameter("`reruns` needs simulation settings (--simulate-fidelity or rb.simulate)".into()))
        }
        _ => None,
    };
    let inputs = json!({
        "config": cfg,
        "source": source,
        "simulation": sim,
        "reference_path": reference_path,
        "interleaved_path": interleaved_path,
        "reference": reference,
        "interleaved": interleaved,
        "dimension": dimension,
    });
    let result = json!({
        "fidelity": irb.fidelity,
        "fidelity_std_error": irb.fidelity_std_error,
        "summary": format!("{:.4} ± {:.4}", irb.fidelity, irb.fidelity_std_error),
        "reference_fit": irb.reference,
        "interleaved_fit": irb.interleaved,
        "stability": stability,
    });
    write_json(a.common.out.as_deref(), &report("rb", &a.common, inputs, result))
}

/// Flux of maximum |g| on a dense grid over [0, 0.5].
fn max_coupling_flux(model: &CouplerModel) -> Result<f64> {
    let phis = linspace(0.0, 0.5, 501);
    let g = model.sweep(&phis, Execution::available())?;
    let k = (0..g.len()).max_by(|&i, &j| g[i].abs().total_cmp(&g[j].abs())).ok_or(Error::EmptyInput)?;
    Ok(phis[k])
}

fn zz(a: ZzArgs) -> Result<()> {
    let cfg = load_config(&a.common)?;
    let model = cfg.model()?;
    let opts = ZzOptions { levels_per_mode: a.levels, ..ZzOptions::default() };
    let mut notes = Vec::new();
    let points: Vec<(String, f64)> = match &a.phi {
        Some(ps) if !ps.is_empty() => ps.iter().map(|&p| ("requested".to_string(), p)).collect(),
        Some(_) => return Err(Error::InvalidParameter("`--phi` list is empty".into())),
        None => {
            let mut v = Vec::new();
            match model.find_zero_coupling(0.0, 0.5, &RootOptions::default()) {
                Ok(p) => v.push(("zero_coupling".to_string(), p.0)),
                Err(e @ Error::NoSignChange { .. }) => notes.push(format!("no zero-coupling flux in [0, 0.5]: {e}")),
                Err(e) => return Err(e),
            }
            v.push(("max_coupling".to_string(), max_coupling_flux(&model)?));
            v
        }
    };
    let mut rows = Vec::new();
    eprintln!("zz: {} levels per mode", opts.levels_per_mode);
    for (label, phi) in &points {
        let f = FluxBias(*phi);
        let zeta = model.residual_zz(f, &opts)?;
        let g = model.net_coupling(f)?;
        eprintln!("  {label:<14} phi = {phi:.4}: zeta = {:.3} kHz, g = {}", zeta / 1e3, mhz(g));
        rows.push(json!({"label": label, "phi": phi, "zz_hz": zeta, "g_hz": g, "omega_c_hz": model.coupler_frequency(f)?}));
    }
    for n in &notes {
        eprintln!("  note: {n}");
    }
    let inputs = json!({
        "config": cfg,
        "model": model,
        "levels_per_mode": opts.levels_per_mode,
        "convergence_rel": opts.convergence_rel,
        "min_overlap": opts.min_overlap,
    });
    let result = json!({"points": rows, "notes": notes});
    write_json(a.common.out.as_deref(), &report("zz", &a.common, inputs, result))
}
