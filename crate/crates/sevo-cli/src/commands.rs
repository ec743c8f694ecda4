//! Command implementations.
//!
//! Every artifact-producing command writes into `<out>/<command>-<run_id>/`:
//! `manifest.json` echoing the resolved config, `report.json` with a uniform
//! envelope (`command`, `run_id`, `pass`, `cases`, `detail`), and
//! command-specific CSVs. `report` only reads.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use sevo::analysis::{
    builtin_decay_matrix, choose_corollary, geomspace, gn_check, lifespan_sweep, run_decay_matrix,
    run_lemma_checks, CaseReport, SweepConfig,
};
use sevo::model::{
    check_region, critical_exponent, decay_prediction, derive_constants, loss_of_decay,
    phase_rows, ratio_f64, DecayPrediction, ModelError, Regime, EPS_SLACK_DEFAULT,
};
use sevo::propagator::{evolve_linear, radial_norm};
use sevo::quad::QuadSpec;
use sevo::semilinear::{default_threshold, integrate, BlowupTrigger, SimOptions, SystemState};
use sevo::spectral::{sobolev_norm, SpectralField, SpectralGrid};

use crate::config::{
    branch_name, manifest, run_id, CliError, CommandKind, ProfileCfg, Resolved,
};

pub fn dispatch(r: &Resolved) -> Result<bool, CliError> {
    match r.command {
        CommandKind::Rates => cmd_rates(r),
        CommandKind::Regions => cmd_regions(r),
        CommandKind::Simulate => cmd_simulate(r),
        CommandKind::SweepLifespan => cmd_sweep_lifespan(r),
        CommandKind::VerifyLinear => cmd_verify_linear(r),
        CommandKind::VerifyLemmas => cmd_verify_lemmas(r),
        CommandKind::Report => cmd_report(r),
    }
}

struct RunDir {
    path: PathBuf,
    id: String,
}

fn io_at(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Other(format!("csv write failed: {e}"))
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("json values serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_at(path, e))
}

fn prepare_run_dir(r: &Resolved) -> Result<RunDir, CliError> {
    let m = manifest(r);
    let id = run_id(&m);
    let path = r.out_dir.join(format!("{}-{}", r.command.as_str(), id));
    std::fs::create_dir_all(&path).map_err(|e| io_at(&path, e))?;
    write_json(&path.join("manifest.json"), &m)?;
    Ok(RunDir { path, id })
}

fn write_report(
    dir: &RunDir,
    r: &Resolved,
    pass: bool,
    cases: &[CaseReport],
    detail: Value,
) -> Result<(), CliError> {
    let v = json!({
        "command": r.command.as_str(),
        "run_id": dir.id,
        "pass": pass,
        "cases": serde_json::to_value(cases).expect("case reports serialize"),
        "detail": detail,
    });
    write_json(&dir.path.join("report.json"), &v)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::Writer::from_path(path)
        .map_err(|e| CliError::Other(format!("cannot write `{}`: {e}", path.display())))
}

fn cmd_rates(r: &Resolved) -> Result<bool, CliError> {
    let p = &r.params;
    let c = derive_constants(p);

    // Predictions first: an infeasible explicit branch should fail the run
    // before any artifact exists.
    let mut rows: Vec<DecayPrediction> = Vec::new();
    for &j in &r.rates.j_values {
        for &a in &r.rates.a_values {
            let branch = r.rates.corollary.unwrap_or_else(|| choose_corollary(p));
            rows.push(decay_prediction(p, j, a, branch)?);
        }
    }
    let loss_p = loss_of_decay(p, p.p, EPS_SLACK_DEFAULT);
    let loss_q = loss_of_decay(p, p.q, EPS_SLACK_DEFAULT);
    let crit = match critical_exponent(p) {
        Ok(x) => x.to_string(),
        Err(ModelError::Domain(msg)) => format!("undefined ({msg})"),
        Err(e) => return Err(e.into()),
    };

    let dir = prepare_run_dir(r)?;
    println!(
        "model: sigma = {}, delta = {}, n = {}, p = {}, q = {}, m = {}",
        p.sigma, p.delta, p.n, p.p, p.q, p.m
    );
    let m0 = c.m0.map_or_else(|| "infinity".to_string(), |x| x.to_string());
    println!(
        "scales: k- = {}, k+ = {}, m0 = {}, regime {}",
        c.k_minus,
        c.k_plus,
        m0,
        c.regime.name()
    );
    if c.regime == Regime::Half {
        println!("note: k- = k+ = sigma, one scale governs both frequency regimes");
    }
    println!("critical exponent: {crit}");
    println!(
        "loss of decay: eps(p) = {loss_p}, eps(q) = {loss_q} (slack {})",
        EPS_SLACK_DEFAULT
    );
    println!();
    println!(
        "{:<3} {:<8} {:<7} {:<12} {:<12} {:<10} {:<10}",
        "j", "a", "branch", "E0", "E1", "reg(w0)", "reg(w1)"
    );
    let path = dir.path.join("rates.csv");
    let mut w = csv_writer(&path)?;
    w.write_record([
        "j",
        "a",
        "branch",
        "exponent_data0",
        "exponent_data1",
        "regularity_data0",
        "regularity_data1",
        "loss_eps_p",
        "loss_eps_q",
    ])
    .map_err(csv_err)?;
    for pred in &rows {
        println!(
            "{:<3} {:<8} {:<7} {:<12} {:<12} {:<10} {:<10}",
            pred.j,
            pred.a.to_string(),
            branch_name(pred.corollary),
            pred.exponent_data0.to_string(),
            pred.exponent_data1.to_string(),
            pred.regularity_data0.to_string(),
            pred.regularity_data1.to_string()
        );
        w.write_record([
            pred.j.to_string(),
            pred.a.to_string(),
            branch_name(pred.corollary).to_string(),
            pred.exponent_data0.to_string(),
            pred.exponent_data1.to_string(),
            pred.regularity_data0.to_string(),
            pred.regularity_data1.to_string(),
            loss_p.to_string(),
            loss_q.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_at(&path, e))?;

    write_report(
        &dir,
        r,
        true,
        &[],
        json!({
            "critical_exponent": crit,
            "k_minus": c.k_minus.to_string(),
            "k_plus": c.k_plus.to_string(),
            "regime": c.regime.name(),
            "loss_eps_p": loss_p.to_string(),
            "loss_eps_q": loss_q.to_string(),
        }),
    )?;
    println!();
    println!("run {} -> {}", dir.id, dir.path.display());
    Ok(true)
}

fn cmd_regions(r: &Resolved) -> Result<bool, CliError> {
    let dir = prepare_run_dir(r)?;
    let cfg = &r.regions;

    // Theorems that cannot be evaluated for the base parameters (missing
    // s1/s2, out-of-scope orders) produce no rows; name them up front so an
    // absent column in the CSV is not a surprise.
    let mut probe = r.params.clone();
    probe.p = cfg.p_values[0];
    probe.q = cfg.q_values[0];
    let mut skipped = Vec::new();
    for &t in &cfg.theorems {
        if let Err(e) = check_region(&probe, t) {
            skipped.push((t.name(), e.to_string()));
        }
    }
    let rows = phase_rows(&r.params, &cfg.p_values, &cfg.q_values, &cfg.theorems);

    let path = dir.path.join("regions.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["p", "q", "theorem", "admissible", "first_violated"])
        .map_err(csv_err)?;
    for row in &rows {
        w.write_record([
            row.p.to_string(),
            row.q.to_string(),
            row.theorem.name().to_string(),
            row.admissible.to_string(),
            row.first_violated.unwrap_or("").to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_at(&path, e))?;

    for (name, why) in &skipped {
        println!("skipped {name}: {why}");
    }
    for &t in &cfg.theorems {
        let total = rows.iter().filter(|x| x.theorem == t).count();
        if total == 0 {
            continue;
        }
        let ok = rows.iter().filter(|x| x.theorem == t && x.admissible).count();
        println!("{:<6} admissible at {ok}/{total} grid points", t.name());
    }
    println!(
        "wrote {} rows ({} x {} points) -> {}",
        rows.len(),
        cfg.p_values.len(),
        cfg.q_values.len(),
        path.display()
    );

    write_report(
        &dir,
        r,
        true,
        &[],
        json!({
            "rows": rows.len(),
            "skipped": skipped
                .iter()
                .map(|(n, why)| json!({"theorem": n, "reason": why}))
                .collect::<Vec<_>>(),
        }),
    )?;
    println!("run {} -> {}", dir.id, dir.path.display());
    Ok(true)
}

fn profile_samples(grid: &SpectralGrid, prof: &ProfileCfg) -> Vec<f64> {
    let coords = grid.axis_coords();
    let size = grid.size();
    let dim = grid.dim();
    let half_length = grid.half_length();
    (0..grid.len())
        .map(|i| {
            let mut rem = i;
            let mut x = [0.0f64; 3];
            for axis in (0..dim).rev() {
                x[axis] = coords[rem % size];
                rem /= size;
            }
            match *prof {
                ProfileCfg::Gaussian { amplitude, width } => {
                    let r2: f64 = x[..dim].iter().map(|c| (c / width) * (c / width)).sum();
                    amplitude * (-r2).exp()
                }
                ProfileCfg::Bump { amplitude, width } => {
                    let r2: f64 = x[..dim].iter().map(|c| (c / width) * (c / width)).sum();
                    if r2 < 1.0 {
                        amplitude * (1.0 - 1.0 / (1.0 - r2)).exp()
                    } else {
                        0.0
                    }
                }
                ProfileCfg::SingleMode { amplitude, mode } => {
                    amplitude
                        * (std::f64::consts::PI * mode as f64 * x[0] / half_length).cos()
                }
            }
        })
        .collect()
}

fn build_field(
    grid: &Arc<SpectralGrid>,
    prof: &Option<ProfileCfg>,
) -> Result<SpectralField, CliError> {
    match prof {
        None => Ok(SpectralField::zero(grid)),
        Some(p) => SpectralField::from_real(grid, &profile_samples(grid, p)).map_err(Into::into),
    }
}

fn cmd_simulate(r: &Resolved) -> Result<bool, CliError> {
    let dir = prepare_run_dir(r)?;
    let cfg = &r.simulate;
    let grid = SpectralGrid::new(r.params.n as usize, r.grid.points, r.grid.half_length)?;
    let u0 = build_field(&grid, &r.data.u0)?;
    let u1 = build_field(&grid, &r.data.u1)?;
    let v0 = build_field(&grid, &r.data.v0)?;
    let v1 = build_field(&grid, &r.data.v1)?;
    let state = SystemState::new(u0.clone(), u1.clone(), v0.clone(), v1.clone())?;
    let threshold = cfg
        .blowup_threshold
        .unwrap_or_else(|| default_threshold(&state));
    let mut opts = SimOptions::new(cfg.horizon, cfg.dt, threshold);
    opts.nonlinear = cfg.nonlinear;
    opts.samples_per_decade = cfg.samples_per_decade;
    let schedule: Vec<(u8, f64)> = cfg.norms.iter().map(|&(j, a)| (j, ratio_f64(a))).collect();
    let (record, blow) = integrate(&state, cfg.coupling, &r.params, &opts, &schedule)?;

    let path = dir.path.join("series.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["t", "norm_id", "value"]).map_err(csv_err)?;
    for (row, &t) in record.values.iter().zip(&record.times) {
        for (id, &v) in record.norm_ids.iter().zip(row) {
            w.write_record([format!("{t}"), id.clone(), format!("{v}")])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| io_at(&path, e))?;

    // With the nonlinearity off every step composes exact modal propagators,
    // so recorded norms must match the closed-form evolution to rounding.
    let mut linear_case = None;
    if !cfg.nonlinear {
        let t_last = *record
            .times
            .last()
            .expect("integration records at least one sample");
        let (ue, ute) = evolve_linear(&u0, &u1, t_last, &r.params)?;
        let (ve, vte) = evolve_linear(&v0, &v1, t_last, &r.params)?;
        let last_row = record.values.last().expect("one row per recorded time");
        let mut max_gap = 0.0f64;
        for (k, &(j, a)) in schedule.iter().enumerate() {
            let (fu, fv) = if j == 0 { (&ue, &ve) } else { (&ute, &vte) };
            for (exact, got) in [
                (sobolev_norm(fu, a, true), last_row[2 * k]),
                (sobolev_norm(fv, a, true), last_row[2 * k + 1]),
            ] {
                max_gap = max_gap.max((exact - got).abs() / exact.abs().max(1e-300));
            }
        }
        linear_case = Some(CaseReport {
            case_id: "linear-consistency".into(),
            predicted: 0.0,
            measured: max_gap,
            tolerance: 1e-9,
            pass: max_gap <= 1e-9,
        });
    }

    let trigger = blow.trigger.map(|t| match t {
        BlowupTrigger::NormThreshold => "norm-threshold",
        BlowupTrigger::NonFinite => "non-finite",
    });
    let final_time = *record.times.last().expect("at least one sample");
    if blow.blew_up {
        println!(
            "blow-up detected at t = {:.6e} ({})",
            blow.t_detect.unwrap_or(f64::NAN),
            trigger.unwrap_or("?")
        );
    } else {
        println!("reached the horizon t = {final_time} without blow-up");
    }
    println!("peak monitored norm: {:.6e}", blow.peak_norm);
    if let Some(c) = &linear_case {
        println!(
            "linear consistency: max relative gap {:.3e} (tolerance 1e-9): {}",
            c.measured,
            if c.pass { "pass" } else { "fail" }
        );
    }
    let pass = linear_case.as_ref().is_none_or(|c| c.pass);
    let cases: Vec<CaseReport> = linear_case.into_iter().collect();
    write_report(
        &dir,
        r,
        pass,
        &cases,
        json!({
            "blew_up": blow.blew_up,
            "t_detect": blow.t_detect,
            "trigger": trigger,
            "peak_norm": blow.peak_norm,
            "final_time": final_time,
            "samples": record.times.len(),
        }),
    )?;
    println!("run {} -> {}", dir.id, dir.path.display());
    Ok(pass)
}

fn cmd_sweep_lifespan(r: &Resolved) -> Result<bool, CliError> {
    let dir = prepare_run_dir(r)?;
    let cfg = &r.sweep;
    let eps = geomspace(cfg.eps_min, cfg.eps_max, cfg.eps_count);
    let sc = SweepConfig {
        half_length: cfg.half_length,
        points: cfg.points,
        bump_width: cfg.bump_width,
        dt: cfg.dt,
        horizon: cfg.horizon,
        threshold_factor: cfg.threshold_factor,
    };
    let curve = lifespan_sweep(&r.params, cfg.coupling, &eps, &sc)?;

    let path = dir.path.join("lifespan.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["eps", "t_detect"]).map_err(csv_err)?;
    for (&e, &t) in curve.eps_values.iter().zip(&curve.t_detect) {
        w.write_record([format!("{e}"), format!("{t}")])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| io_at(&path, e))?;

    let rel = (curve.fitted_slope - curve.predicted_slope).abs() / curve.predicted_slope.abs();
    let pass = rel <= cfg.tolerance;
    println!(
        "lifespan slope: fitted {:.4}, predicted {:.4}, relative error {:.1}% (tolerance {:.0}%): {}",
        curve.fitted_slope,
        curve.predicted_slope,
        100.0 * rel,
        100.0 * cfg.tolerance,
        if pass { "pass" } else { "fail" }
    );
    let case = CaseReport {
        case_id: "lifespan-slope".into(),
        predicted: curve.predicted_slope,
        measured: curve.fitted_slope,
        tolerance: cfg.tolerance,
        pass,
    };
    write_report(
        &dir,
        r,
        pass,
        &[case],
        serde_json::to_value(&curve).expect("curve serializes"),
    )?;
    println!("run {} -> {}", dir.id, dir.path.display());
    Ok(pass)
}

fn cmd_verify_linear(r: &Resolved) -> Result<bool, CliError> {
    let dir = prepare_run_dir(r)?;
    let cfg = r.verify_linear;
    let reports = run_decay_matrix(cfg.window, cfg.tolerance)?;

    // Per-case series with the same sampling the fits used, for plotting.
    let spec = QuadSpec::default();
    let ts = geomspace(cfg.window.0, cfg.window.1, 17);
    let matrix = builtin_decay_matrix();
    let series: Vec<(String, Vec<f64>)> = matrix
        .par_iter()
        .map(|case| {
            let params = case.params()?;
            let a = ratio_f64(case.a);
            let vals = ts
                .iter()
                .map(|&t| radial_norm(&case.data, t, case.j, a, &params, &spec))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((case.id.to_string(), vals))
        })
        .collect::<Result<_, CliError>>()?;

    let path = dir.path.join("series.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["case_id", "t", "value"]).map_err(csv_err)?;
    for (id, vals) in &series {
        for (&t, &v) in ts.iter().zip(vals) {
            w.write_record([id.clone(), format!("{t}"), format!("{v}")])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| io_at(&path, e))?;

    let mut pass = true;
    for c in &reports {
        println!(
            "{} {:<22} measured {:+.4}, predicted {:+.4} (tolerance {:.2})",
            if c.pass { "pass" } else { "FAIL" },
            c.case_id,
            c.measured,
            c.predicted,
            c.tolerance
        );
        pass &= c.pass;
    }
    write_report(
        &dir,
        r,
        pass,
        &reports,
        json!({"window": [cfg.window.0, cfg.window.1]}),
    )?;
    println!("run {} -> {}", dir.id, dir.path.display());
    Ok(pass)
}

fn cmd_verify_lemmas(r: &Resolved) -> Result<bool, CliError> {
    let dir = prepare_run_dir(r)?;
    let cfg = r.verify_lemmas;
    let mut cases = run_lemma_checks()?;
    let gn = gn_check(
        2.0,
        2.0,
        2.0,
        cfg.gn_s,
        cfg.gn_sigma,
        cfg.gn_n,
        cfg.gn_samples,
        r.seed,
    )?;
    cases.push(CaseReport {
        case_id: "gn-l2-interpolation".into(),
        predicted: 1.0,
        measured: gn.worst_ratio,
        tolerance: 1e-9,
        pass: gn.worst_ratio <= 1.0 + 1e-9,
    });
    let mut pass = true;
    for c in &cases {
        println!(
            "{} {:<22} measured {:+.6}, predicted {:+.6} (tolerance {:.0e})",
            if c.pass { "pass" } else { "FAIL" },
            c.case_id,
            c.measured,
            c.predicted,
            c.tolerance
        );
        pass &= c.pass;
    }
    println!(
        "interpolation exponent theta = {:.4} over {} sampled fields",
        gn.theta, gn.samples
    );
    write_report(
        &dir,
        r,
        pass,
        &cases,
        json!({"gn_theta": gn.theta, "gn_samples": gn.samples}),
    )?;
    println!("run {} -> {}", dir.id, dir.path.display());
    Ok(pass)
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_at(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Other(format!("cannot parse `{}`: {e}", path.display())))
}

fn cmd_report(r: &Resolved) -> Result<bool, CliError> {
    let root = r.report_dir.clone().unwrap_or_else(|| r.out_dir.clone());
    let mut found: Vec<(String, Value)> = Vec::new();
    let direct = root.join("report.json");
    if direct.is_file() {
        found.push((root.display().to_string(), read_json(&direct)?));
    }
    let entries = std::fs::read_dir(&root).map_err(|e| io_at(&root, e))?;
    let mut subdirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    for sub in subdirs {
        let p = sub.join("report.json");
        if p.is_file() {
            let name = sub
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            found.push((name, read_json(&p)?));
        }
    }
    if found.is_empty() {
        return Err(CliError::Other(format!(
            "no report.json files found under `{}`",
            root.display()
        )));
    }

    let mut all = true;
    println!("{:<6} {:<16} {:<10} run", "status", "command", "cases");
    for (name, v) in &found {
        let pass = v.get("pass").and_then(Value::as_bool).unwrap_or(false);
        let command = v.get("command").and_then(Value::as_str).unwrap_or("?");
        let cases = v.get("cases").and_then(Value::as_array);
        let n_cases = cases.map_or(0, |c| c.len());
        let n_failed = cases.map_or(0, |c| {
            c.iter()
                .filter(|x| x.get("pass").and_then(Value::as_bool) == Some(false))
                .count()
        });
        println!(
            "{:<6} {:<16} {:<10} {}",
            if pass { "pass" } else { "FAIL" },
            command,
            format!("{}/{} ok", n_cases - n_failed, n_cases),
            name
        );
        all &= pass;
    }
    println!(
        "{} run(s), overall: {}",
        found.len(),
        if all { "pass" } else { "fail" }
    );
    Ok(all)
}
