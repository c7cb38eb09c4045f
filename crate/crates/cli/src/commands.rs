//! One function per subcommand: validate the relevant config sections,
//! call into the core engines, and write JSON/CSV artifacts.

use crate::config::{CriterionConfig, ExperimentConfig, Mode, SweepConfig};
use anyhow::{bail, Context, Result};
use fracblow_core::criterion::criterion_report;
use fracblow_core::ode_blowup::{blowup_time_bound, integrate_system, OdeSpec, StepControl};
use fracblow_core::stable_kernel::{density_grid_bounded, eval_density, KernelSpec};
use fracblow_core::{
    eval_f, literature_bounds, BlowUpReason, BlowUpVerdict, CriterionReport, ProblemSpec,
    RunRecord, SimVerdict, Solver, SystemParams,
};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Every JSON artifact embeds the resolved config and the seed for
/// reproducibility. The timestamp is informational and excluded from any
/// byte-level comparison.
#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    seed: Option<u64>,
    generated_unix_seconds: u64,
    #[serde(flatten)]
    payload: T,
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    config: &ExperimentConfig,
    seed: Option<u64>,
    payload: T,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output dir {}", dir.display()))?;
    let path = dir.join(name);
    let report = Report { config, seed, generated_unix_seconds: now_unix(), payload };
    let text = serde_json::to_string_pretty(&report)?;
    std::fs::write(&path, text + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn csv_writer(dir: &Path, name: &str) -> Result<(csv::Writer<std::fs::File>, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let w = csv::Writer::from_path(&path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok((w, path))
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.12e}")
    }
}

// ---------------------------------------------------------------- kernel

#[derive(Serialize)]
struct KernelValue {
    t: f64,
    x: Vec<f64>,
    value: f64,
}

#[derive(Serialize)]
struct KernelGridMass {
    t: f64,
    grid_mass: f64,
    tail_mass: f64,
}

#[derive(Serialize)]
struct PropertyReport {
    /// |grid mass + tail mass - 1| over the configured times
    worst_normalization_defect: f64,
    /// relative defect of p(ts,x) = t^{-d/a} p(s, t^{-1/a} x)
    worst_scaling_relative: f64,
    /// most negative value of p(t,x) - (s/t)^{d/a} p(s,x), t >= s
    worst_monotone_defect: f64,
    /// most negative value of p(t,(x-y)/tau) - p(t,x) p(t,y), tau >= 2,
    /// evaluated only when p(t,0) <= 1
    worst_product_defect: f64,
}

#[derive(Serialize)]
struct KernelPayload {
    values: Vec<KernelValue>,
    grids: Vec<KernelGridMass>,
    properties: Option<PropertyReport>,
}

pub fn cmd_kernel(
    cfg: &ExperimentConfig,
    out: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let kc = cfg
        .kernel
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("config field 'kernel' is required for mode kernel"))?;
    let spec = KernelSpec::new(kc.alpha, kc.dim, kc.grid_halfwidth, kc.grid_points, kc.quad_tol)?;

    let mut values = Vec::new();
    for &t in &kc.times {
        for x in &kc.points {
            if x.len() != kc.dim as usize {
                bail!("kernel point {x:?} has wrong dimension (expected {})", kc.dim);
            }
            values.push(KernelValue { t, x: x.clone(), value: eval_density(&spec, t, x)? });
        }
    }

    let mut grids = Vec::new();
    if kc.grid_mass || kc.property_suite {
        for &t in &kc.times {
            let g = density_grid_bounded(&spec, t, kc.max_tail)?;
            grids.push(KernelGridMass { t, grid_mass: g.grid_mass, tail_mass: g.tail_mass });
        }
    }

    let properties = if kc.property_suite {
        let point = |r: f64| -> Vec<f64> {
            let mut x = vec![0.0; kc.dim as usize];
            x[0] = r;
            x
        };
        let mut norm = 0.0_f64;
        for g in &grids {
            norm = norm.max((g.grid_mass + g.tail_mass - 1.0).abs());
        }
        let radii = [0.0, 0.4, 1.1, 2.7, 5.0];
        let mut scaling = 0.0_f64;
        for &s in &kc.times {
            for &tscale in &[2.0_f64, 5.0] {
                for &r in &radii {
                    let lhs = eval_density(&spec, tscale * s, &point(r))?;
                    let rhs = tscale.powf(-(kc.dim as f64) / kc.alpha)
                        * eval_density(&spec, s, &point(r * tscale.powf(-1.0 / kc.alpha)))?;
                    scaling = scaling.max((lhs - rhs).abs() / rhs.abs().max(1e-300));
                }
            }
        }
        let mut monotone = 0.0_f64;
        for &s in &kc.times {
            for &factor in &[1.5_f64, 3.0] {
                let t = s * factor;
                for &r in &radii {
                    let pt = eval_density(&spec, t, &point(r))?;
                    let ps = eval_density(&spec, s, &point(r))?;
                    let defect = pt - (s / t).powf(kc.dim as f64 / kc.alpha) * ps;
                    monotone = monotone.min(defect);
                }
            }
        }
        let mut product = 0.0_f64;
        for &t in &kc.times {
            if eval_density(&spec, t, &point(0.0))? > 1.0 {
                continue;
            }
            for &tau in &[2.0_f64, 3.0] {
                for &x in &radii {
                    for &y in &[-2.7, 0.4, 5.0] {
                        let lhs = eval_density(&spec, t, &point((x - y) / tau))?;
                        let rhs = eval_density(&spec, t, &point(x))?
                            * eval_density(&spec, t, &point(y))?;
                        product = product.min(lhs - rhs);
                    }
                }
            }
        }
        Some(PropertyReport {
            worst_normalization_defect: norm,
            worst_scaling_relative: scaling,
            worst_monotone_defect: monotone,
            worst_product_defect: product,
        })
    } else {
        None
    };

    let n_values = values.len();
    let path = write_json(out, "kernel_report.json", cfg, seed, KernelPayload {
        values,
        grids,
        properties,
    })?;
    println!("kernel: {n_values} point evaluations -> {}", path.display());
    Ok(())
}

// ------------------------------------------------------------- criterion

pub fn cmd_criterion(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<()> {
    let params = cfg.system()?.to_params()?;
    let cc = cfg.criterion.clone().unwrap_or_default();
    let report = criterion_report(&params, cc.t_start, cc.horizon)?;
    let verdict = report.verdict;
    let method = report.method;
    let path = write_json(out, "criterion_report.json", cfg, seed, report)?;
    println!(
        "criterion: {} ({}) -> {}",
        match verdict {
            BlowUpVerdict::BlowUp => "blow_up",
            BlowUpVerdict::Inconclusive => "inconclusive",
        },
        match method {
            fracblow_core::CriterionMethod::ExactPowerLaw => "exact_power_law",
            fracblow_core::CriterionMethod::NumericHeuristic => "numeric_heuristic",
        },
        path.display()
    );
    Ok(())
}

// ------------------------------------------------------------------ ode

#[derive(Serialize)]
struct OdePayload {
    blowup_detected: bool,
    t_blowup_numeric: Option<f64>,
    t_blowup_envelope: Option<f64>,
    /// Closed-form envelope bound with the configured constant c.
    t_blowup_envelope_closed_form: Option<f64>,
    steps_recorded: usize,
}

pub fn cmd_ode(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<()> {
    let params = cfg.system()?.to_params()?;
    let oc = cfg
        .ode
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("config field 'ode' is required for mode ode"))?;

    let forcing = |i: u8| -> fracblow_core::TimeFn {
        let p = params.clone();
        Arc::new(move |t: f64| eval_f(&p, i, t).unwrap_or(f64::NAN))
    };
    // fail early on an unevaluable forcing rather than mid-integration
    for frac in [0.0, 0.37, 1.0] {
        let t = oc.t0 + frac * (oc.horizon - oc.t0);
        let v = (eval_f(&params, 1, t)?, eval_f(&params, 2, t)?);
        if !(v.0.is_finite() && v.1.is_finite()) {
            bail!("forcing f_i not finite at t={t}: {v:?}");
        }
    }
    let spec = OdeSpec::new(
        (forcing(1), forcing(2)),
        params.beta,
        oc.k,
        oc.t0,
        oc.horizon,
    )?;
    let traj = integrate_system(&spec, &StepControl::default())?;
    let closed_form = blowup_time_bound(&spec, &|t| spec.big_f(t), oc.envelope_c)?;

    let (mut w, csv_path) = csv_writer(out, "ode_series.csv")?;
    w.write_record(["t", "z1", "z2", "big_z", "envelope"])?;
    for i in 0..traj.times.len() {
        w.write_record([
            fmt(traj.times[i]),
            fmt(traj.z.0[i]),
            fmt(traj.z.1[i]),
            fmt(traj.big_z[i]),
            fmt(traj.envelope[i]),
        ])?;
    }
    w.flush()?;

    let payload = OdePayload {
        blowup_detected: traj.blowup_detected,
        t_blowup_numeric: traj.t_blowup_numeric,
        t_blowup_envelope: traj.t_blowup_envelope,
        t_blowup_envelope_closed_form: closed_form,
        steps_recorded: traj.times.len(),
    };
    let path = write_json(out, "ode_report.json", cfg, seed, payload)?;
    match traj.t_blowup_numeric {
        Some(t) => println!("ode: blow-up detected, t approx {t:.6}"),
        None => println!("ode: no blow-up by t = {}", oc.horizon),
    }
    println!("ode: wrote {} and {}", path.display(), csv_path.display());
    Ok(())
}

// ------------------------------------------------------------- simulate

fn write_run_csv(out: &Path, name: &str, rec: &RunRecord) -> Result<PathBuf> {
    let (mut w, path) = csv_writer(out, name)?;
    w.write_record(["t", "sup1", "sup2", "moment1", "moment2", "dt"])?;
    for i in 0..rec.times.len() {
        w.write_record([
            fmt(rec.times[i]),
            fmt(rec.supnorm.0[i]),
            fmt(rec.supnorm.1[i]),
            fmt(rec.moments.0.get(i).copied().unwrap_or(f64::NAN)),
            fmt(rec.moments.1.get(i).copied().unwrap_or(f64::NAN)),
            fmt(rec.dts.get(i).copied().unwrap_or(f64::NAN)),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

fn verdict_line(v: &SimVerdict) -> String {
    match v {
        SimVerdict::BlewUp { t_e, reason } => format!(
            "blew_up t_e\u{2248}{t_e:.6} ({})",
            match reason {
                BlowUpReason::SupThreshold => "sup_threshold",
                BlowUpReason::DtUnderflow => "dt_underflow",
            }
        ),
        SimVerdict::BoundedOnHorizon => "bounded_on_horizon".to_string(),
    }
}

pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<()> {
    let params = cfg.system()?.to_params()?;
    let sc = cfg
        .solver
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("config field 'solver' is required for mode simulate"))?;
    let problem = ProblemSpec::new(
        params,
        sc.phi.clone(),
        sc.box_halfwidth,
        sc.resolution,
    )?;
    let solver = Solver::new(problem)?;
    let rec = solver.run_simulation(&sc.control.to_control())?;
    let csv_path = write_run_csv(out, "run_series.csv", &rec)?;
    let line = verdict_line(&rec.verdict);
    let path = write_json(out, "run_record.json", cfg, seed, &rec)?;
    println!("simulate: {line}");
    println!("simulate: wrote {} and {}", path.display(), csv_path.display());
    Ok(())
}

// ----------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepRow {
    beta1: f64,
    beta2: f64,
    dim: u32,
    verdict: String,
    method: String,
    f_exponent: Option<f64>,
    blowup_condition_lhs: Option<f64>,
    blowup_condition_rhs: Option<f64>,
    c_u: Option<f64>,
    c_a: Option<f64>,
    c_v: Option<f64>,
    sim_verdict: String,
    agreement: String,
    note: String,
}

#[derive(Serialize)]
struct SweepPayload {
    tuples: usize,
    blow_up: usize,
    inconclusive: usize,
    invalid: usize,
    simulated: usize,
    agreements: usize,
    disagreements: usize,
}

fn sweep_tuple(
    cfg: &ExperimentConfig,
    sw: &SweepConfig,
    cc: &CriterionConfig,
    beta: (f64, f64),
    dim: u32,
) -> SweepRow {
    let sys = cfg.system().expect("validated before dispatch");
    let mut row = SweepRow {
        beta1: beta.0,
        beta2: beta.1,
        dim,
        verdict: String::new(),
        method: String::new(),
        f_exponent: None,
        blowup_condition_lhs: None,
        blowup_condition_rhs: None,
        c_u: None,
        c_a: None,
        c_v: None,
        sim_verdict: String::new(),
        agreement: String::new(),
        note: String::new(),
    };
    let params = match SystemParams::new(dim, sys.alpha, beta, sys.g.clone(), sys.h.clone()) {
        Ok(p) => p,
        Err(e) => {
            row.verdict = "invalid".into();
            row.note = e.to_string();
            return row;
        }
    };
    if let Ok(b) = literature_bounds(beta) {
        row.c_u = Some(b.c_u);
        row.c_a = Some(b.c_a);
        row.c_v = Some(b.c_v);
    }
    let rep: CriterionReport = match criterion_report(&params, cc.t_start, cc.horizon) {
        Ok(r) => r,
        Err(e) => {
            row.verdict = "invalid".into();
            row.note = e.to_string();
            return row;
        }
    };
    row.verdict = match rep.verdict {
        BlowUpVerdict::BlowUp => "blow_up",
        BlowUpVerdict::Inconclusive => "inconclusive",
    }
    .into();
    row.method = match rep.method {
        fracblow_core::CriterionMethod::ExactPowerLaw => "exact_power_law",
        fracblow_core::CriterionMethod::NumericHeuristic => "numeric_heuristic",
    }
    .into();
    row.f_exponent = rep.f_exponent;
    row.blowup_condition_lhs = rep.blowup_condition_lhs;
    row.blowup_condition_rhs = rep.blowup_condition_rhs;

    if sw.simulate && dim <= 2 {
        match cfg.solver.as_ref() {
            None => row.note = "simulate requested but no solver section".into(),
            Some(sc) => {
                let sim = ProblemSpec::new(params, sc.phi.clone(), sc.box_halfwidth, sc.resolution)
                    .and_then(Solver::new)
                    .and_then(|s| s.run_simulation(&sc.control.to_control()));
                match sim {
                    Ok(rec) => {
                        let blew = matches!(rec.verdict, SimVerdict::BlewUp { .. });
                        row.sim_verdict = verdict_line(&rec.verdict);
                        row.agreement =
                            ((rep.verdict == BlowUpVerdict::BlowUp) == blew).to_string();
                    }
                    Err(e) => row.note = format!("simulation failed: {e}"),
                }
            }
        }
    }
    row
}

pub fn cmd_sweep(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<()> {
    cfg.system()?;
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("config field 'sweep' is required for mode sweep"))?;
    if sw.dims.is_empty() {
        bail!("sweep 'dims' must be non-empty");
    }
    let cc = cfg.criterion.clone().unwrap_or_default();
    let b1 = sw.beta1.values()?;
    let b2 = sw.beta2.values()?;
    let mut tuples = Vec::new();
    for &x in &b1 {
        for &y in &b2 {
            for &d in &sw.dims {
                tuples.push(((x, y), d));
            }
        }
    }
    // parallel evaluation, deterministic order by construction of `tuples`
    let rows: Vec<SweepRow> = tuples
        .par_iter()
        .map(|&(beta, dim)| sweep_tuple(cfg, sw, &cc, beta, dim))
        .collect();

    let (mut w, csv_path) = csv_writer(out, "sweep_results.csv")?;
    w.write_record([
        "beta1", "beta2", "dim", "verdict", "method", "f_exponent", "blowup_condition_lhs",
        "blowup_condition_rhs", "c_u", "c_a", "c_v", "sim_verdict", "agreement", "note",
    ])?;
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    for r in &rows {
        w.write_record([
            fmt(r.beta1),
            fmt(r.beta2),
            r.dim.to_string(),
            r.verdict.clone(),
            r.method.clone(),
            opt(r.f_exponent),
            opt(r.blowup_condition_lhs),
            opt(r.blowup_condition_rhs),
            opt(r.c_u),
            opt(r.c_a),
            opt(r.c_v),
            r.sim_verdict.clone(),
            r.agreement.clone(),
            r.note.clone(),
        ])?;
    }
    w.flush()?;

    let payload = SweepPayload {
        tuples: rows.len(),
        blow_up: rows.iter().filter(|r| r.verdict == "blow_up").count(),
        inconclusive: rows.iter().filter(|r| r.verdict == "inconclusive").count(),
        invalid: rows.iter().filter(|r| r.verdict == "invalid").count(),
        simulated: rows.iter().filter(|r| !r.sim_verdict.is_empty()).count(),
        agreements: rows.iter().filter(|r| r.agreement == "true").count(),
        disagreements: rows.iter().filter(|r| r.agreement == "false").count(),
    };
    let n = payload.tuples;
    let nb = payload.blow_up;
    let path = write_json(out, "sweep_report.json", cfg, seed, payload)?;
    println!("sweep: {n} tuples, {nb} blow_up -> {} and {}", path.display(), csv_path.display());
    Ok(())
}

pub fn dispatch(cfg: &ExperimentConfig, mode: Mode, out: &Path, seed: Option<u64>) -> Result<()> {
    match mode {
        Mode::Kernel => cmd_kernel(cfg, out, seed),
        Mode::Criterion => cmd_criterion(cfg, out, seed),
        Mode::Ode => cmd_ode(cfg, out, seed),
        Mode::Simulate => cmd_simulate(cfg, out, seed),
        Mode::Sweep => cmd_sweep(cfg, out, seed),
    }
}
