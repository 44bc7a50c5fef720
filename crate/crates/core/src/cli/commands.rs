//! Subcommand bodies.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::config::{InitialSpec, RunConfig};
use super::output::{
    constants_json, drift_json, drift_of_rows, export_indices, format_float, read_trajectory_csv,
    read_trajectory_json, sample_row, write_csv, write_json, write_trajectory_csv, write_trajectory_json, Row,
};
use super::{CliError, Format, Outcome};
use crate::analytic::{
    axial_branch, circle_params, classify_orbit, clean_offset, forbidden_region, orbit_center_azimuth,
    orbit_residual_normalized, phi_closed_form_onaxis, radial_turning_points, z_closed_form, z_marginal,
    OrbitClass, RadialRange, ZRegime,
};
use crate::dynamics::{integrate, DriftReport, IntegrateError, Trajectory};
use crate::field::{field_strength_phir, maxwell_residual_with, uniform_grid};
use crate::geometry::{SpaceChart, State};
use crate::invariants::MotionConstants;

const MANIFEST: &str = "manifest.json";

/// Print to stdout, ignoring a closed pipe.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn trajectory_name(format: Format) -> &'static str {
    match format {
        Format::Csv => "trajectory.csv",
        Format::Json => "trajectory.json",
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Integrate; a halt keeps the partial trajectory.
fn run_trajectory(cfg: &RunConfig, initial: &State) -> Result<(Trajectory, Option<Value>), CliError> {
    match integrate(&cfg.chart, &cfg.particle, &cfg.field, initial, cfg.step, cfg.duration) {
        Ok(t) => Ok((t, None)),
        Err(IntegrateError::Halted { reason, at, partial }) => {
            Ok((*partial, Some(json!({ "reason": reason.to_string(), "t": at }))))
        }
        Err(IntegrateError::Invalid(e)) => Err(CliError::Config("initial".into(), e.to_string())),
    }
}

fn regime_and_class(k: &MotionConstants, chart: &SpaceChart) -> (Option<ZRegime>, Option<OrbitClass>) {
    (forbidden_region(k, chart).ok(), classify_orbit(k, chart).ok())
}

fn on_axis(cfg: &RunConfig, k: &MotionConstants) -> bool {
    cfg.chart.is_hyperbolic() && (matches!(cfg.initial, InitialSpec::OnAxis { .. }) || clean_offset(k, &cfg.chart) == 0.0)
}

/// Property checks recorded in the simulation manifest.
fn trajectory_checks(cfg: &RunConfig, traj: &Trajectory) -> Value {
    let chart = &cfg.chart;
    let first = traj.first();
    let k = first.constants;
    let mut checks = Map::new();
    let embed = traj
        .states()
        .map(|s| chart.embed(s).quadric_residual(chart.kappa(), chart.rho()))
        .fold(0.0, f64::max);
    checks.insert("embedding_max_rel_residual".into(), json!(embed));
    if on_axis(cfg, &k) {
        let r0 = first.state.r;
        let dev = traj.states().map(|s| (s.r - r0).abs()).fold(0.0, f64::max);
        checks.insert("r0".into(), json!(r0));
        checks.insert("max_abs_r_minus_r0".into(), json!(dev));
    }
    if let Ok(ZRegime::Reflected { .. }) = forbidden_region(&k, chart) {
        let bound = (k.transverse / k.speed_sq - 1.0).sqrt();
        let min = traj.states().map(|s| (s.z / chart.rho()).sinh().abs()).fold(f64::INFINITY, f64::min);
        checks.insert("forbidden_bound".into(), json!(bound));
        checks.insert("min_abs_sinh_z".into(), json!(min));
        checks.insert("forbidden_region_respected".into(), json!(min >= bound - 1e-8));
    }
    if k.transverse == 0.0 {
        let s0 = first.state;
        let dev = traj.states().map(|s| (s.z - (s0.z + s0.vz * (s.t - s0.t))).abs()).fold(0.0, f64::max);
        checks.insert("z_affine_max_dev".into(), json!(dev));
    }
    Value::Object(checks)
}

pub fn simulate(cfg: &RunConfig, out: &Path, format: Format) -> Result<Outcome, CliError> {
    let (initial, _) = cfg.initial_state().map_err(CliError::from)?;
    let (traj, halt) = run_trajectory(cfg, &initial)?;
    let rows: Vec<Row> =
        export_indices(traj.len(), cfg.stride).into_iter().map(|i| sample_row(&cfg.chart, &traj.samples()[i])).collect();
    let path = out.join(trajectory_name(format));
    match format {
        Format::Csv => write_trajectory_csv(&path, &rows),
        Format::Json => write_trajectory_json(&path, &rows),
    }
    .map_err(|e| io_err(&path, e))?;

    let k0 = traj.first().constants;
    let (regime, class) = regime_and_class(&k0, &cfg.chart);
    let meta = traj.meta();
    let manifest = json!({
        "command": "simulate",
        "config": cfg.resolved(),
        "trajectory_file": trajectory_name(format),
        "format": format.name(),
        "method": meta.method,
        "step": meta.step,
        "omega": meta.omega,
        "samples": traj.len(),
        "exported_rows": rows.len(),
        "initial_constants": constants_json(&k0),
        "drift": drift_json(&meta.drift),
        "drift_exported": drift_json(&drift_of_rows(&rows, meta.omega)),
        "regime": regime.map(|r| r.name()),
        "class": class.map(|c| c.name()),
        "halt": halt,
        "checks": trajectory_checks(cfg, &traj),
        "wall_clock_seconds": meta.wall_clock.as_secs_f64(),
    });
    let mpath = out.join(MANIFEST);
    write_json(&mpath, &manifest).map_err(|e| io_err(&mpath, e))?;

    say!("wrote {} ({} rows) and {}", path.display(), rows.len(), mpath.display());
    say!("max invariant drift {:.3e}", meta.drift.max_invariant());
    if let (Some(r), Some(c)) = (regime, class) {
        say!("regime {}, class {}", r.name(), c.name());
    }
    match halt {
        Some(h) => {
            say!("halted: {}", h["reason"].as_str().unwrap_or(""));
            Ok(Outcome::Halted)
        }
        None => Ok(Outcome::Success),
    }
}

#[derive(Default)]
struct Deviations(Vec<(&'static str, f64, f64)>);

impl Deviations {
    fn push(&mut self, name: &'static str, value: f64, tol: f64) {
        self.0.push((name, value, tol));
    }

    fn pass(&self) -> bool {
        self.0.iter().all(|(_, v, t)| v <= t)
    }
}

pub fn compare(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let chart = &cfg.chart;
    if !chart.is_hyperbolic() {
        return Err(CliError::Config("chart.kappa".into(), "closed forms exist only for kappa = -1".into()));
    }
    let (initial, omega) = cfg.initial_state().map_err(CliError::from)?;
    let k = MotionConstants::from_state(chart, &initial, omega);
    if cfg.compare.phi && !on_axis(cfg, &k) {
        return Err(CliError::Config(
            "compare.phi".into(),
            format!(
                "closed-form azimuth exists only for motion on an axis-centred circle (C = 0); here C = {:e}",
                k.offset
            ),
        ));
    }
    let (traj, halt) = run_trajectory(cfg, &initial)?;
    let tol = &cfg.compare;
    let mut dev = Deviations::default();
    let (regime, class) = regime_and_class(&k, chart);

    let sup = |f: &dyn Fn(&State) -> f64| traj.states().map(f).fold(0.0, f64::max);
    match regime {
        Some(ZRegime::Marginal) => {
            let mut dz: f64 = 0.0;
            let mut dvz: f64 = 0.0;
            for s in traj.states() {
                let (z, vz) = z_marginal(&k, chart, &initial, s.t).map_err(|e| CliError::Config("initial".into(), e.to_string()))?;
                dz = dz.max((z - s.z).abs());
                dvz = dvz.max((vz - s.vz).abs());
            }
            dev.push("z", dz, tol.tol_z);
            dev.push("vz", dvz, tol.tol_vz);
        }
        Some(_) => {
            let branch = axial_branch(&k, chart, &initial).map_err(|e| CliError::Config("initial".into(), e.to_string()))?;
            let mut dz: f64 = 0.0;
            let mut dvz: f64 = 0.0;
            for s in traj.states() {
                let (z, vz) = z_closed_form(&k, chart, s.t, branch.t0, branch.sign)
                    .map_err(|e| CliError::Config("initial".into(), e.to_string()))?;
                dz = dz.max((z - s.z).abs());
                dvz = dvz.max((vz - s.vz).abs());
            }
            dev.push("z", dz, tol.tol_z);
            dev.push("vz", dvz, tol.tol_vz);
        }
        None => {}
    }

    if on_axis(cfg, &k) {
        let r0 = initial.r;
        dev.push("r", sup(&|s: &State| (s.r - r0).abs()), tol.tol_r);
        if cfg.compare.phi {
            let branch = axial_branch(&k, chart, &initial).map_err(|e| CliError::Config("initial".into(), e.to_string()))?;
            let (at_start, _) = phi_closed_form_onaxis(&k, chart, r0, initial.t, branch.t0, 0.0)
                .map_err(|e| CliError::Config("initial".into(), e.to_string()))?;
            let phi0 = initial.phi - at_start;
            let mut dphi: f64 = 0.0;
            let mut dvphi: f64 = 0.0;
            for s in traj.states() {
                let (phi, vphi) = phi_closed_form_onaxis(&k, chart, r0, s.t, branch.t0, phi0)
                    .map_err(|e| CliError::Config("initial".into(), e.to_string()))?;
                dphi = dphi.max((phi - s.phi).abs());
                dvphi = dvphi.max((vphi - s.vphi).abs());
            }
            dev.push("phi", dphi, tol.tol_phi);
            dev.push("vphi", dvphi, tol.tol_vphi);
        }
    } else if let Ok(phi0) = orbit_center_azimuth(chart, &initial, k.omega) {
        let res = sup(&|s: &State| orbit_residual_normalized(&k, chart, s.r, s.phi, phi0).abs());
        dev.push("orbit", res, tol.tol_orbit);
    }

    let pass = dev.pass() && halt.is_none();
    let report = json!({
        "command": "compare",
        "config": cfg.resolved(),
        "regime": regime.map(|r| r.name()),
        "class": class.map(|c| c.name()),
        "initial_constants": constants_json(&k),
        "deviations": dev.0.iter().map(|(n, v, _)| (n.to_string(), json!(v))).collect::<Map<_, _>>(),
        "tolerances": dev.0.iter().map(|(n, _, t)| (n.to_string(), json!(t))).collect::<Map<_, _>>(),
        "halt": halt,
        "pass": pass,
    });
    let path = out.join("compare.json");
    write_json(&path, &report).map_err(|e| io_err(&path, e))?;
    for (name, value, t) in &dev.0 {
        let verdict = if value <= t { "ok" } else { "FAIL" };
        say!("{name:>6}: sup deviation {value:.3e} (tolerance {t:.1e}) {verdict}");
    }
    if let Some(h) = &halt {
        say!("halted: {}", h["reason"].as_str().unwrap_or(""));
        return Ok(Outcome::Halted);
    }
    Ok(if pass { Outcome::Success } else { Outcome::ToleranceFailure })
}

struct SweepResult {
    epsilon: f64,
    transverse: f64,
    angular_momentum: f64,
    offset: f64,
    omega: f64,
    regime: String,
    class: String,
    radius: Option<f64>,
    center_distance: Option<f64>,
    drift: DriftReport,
    status: String,
}

fn sweep_job(cfg: &RunConfig) -> Result<SweepResult, String> {
    let chart = &cfg.chart;
    let (initial, omega) = cfg.initial_state().map_err(|e| e.to_string())?;
    let k = MotionConstants::from_state(chart, &initial, omega);
    let (regime, class) = regime_and_class(&k, chart);
    let geometry = match class {
        Some(OrbitClass::BoundedCircle) => {
            let phi0 = orbit_center_azimuth(chart, &initial, omega).unwrap_or(0.0);
            circle_params(&k, chart, phi0).ok()
        }
        _ => None,
    };
    let (traj, halt) = run_trajectory(cfg, &initial).map_err(|e| e.to_string())?;
    let status = match halt {
        None => "ok".to_string(),
        Some(h) => format!("halted: {}", h["reason"].as_str().unwrap_or("")),
    };
    Ok(SweepResult {
        epsilon: k.speed_sq,
        transverse: k.transverse,
        angular_momentum: k.angular_momentum,
        offset: k.offset,
        omega,
        regime: regime.map_or("n/a", |r| r.name()).to_string(),
        class: class.map_or("n/a", |c| c.name()).to_string(),
        radius: geometry.map(|g| g.radius),
        center_distance: geometry.map(|g| g.center_distance),
        drift: traj.meta().drift,
        status,
    })
}

pub fn sweep(cfg: &RunConfig, out: &Path, format: Format, jobs: Option<usize>) -> Result<Outcome, CliError> {
    if cfg.sweep.is_empty() {
        return Err(CliError::Config("sweep.x".into(), "a sweep needs sweep.x (and optionally sweep.y)".into()));
    }
    let axes = &cfg.sweep;
    let ny = axes.get(1).map_or(1, |a| a.count);
    let points: Vec<(usize, usize)> = (0..axes[0].count).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    let job = |&(i, j): &(usize, usize)| {
        let mut values = vec![axes[0].value(i)];
        if let Some(y) = axes.get(1) {
            values.push(y.value(j));
        }
        let mut point = Ok(cfg.clone());
        for (axis, v) in axes.iter().zip(&values) {
            point = point.and_then(|c: RunConfig| c.with_entry(&axis.key, format_float(*v)).map_err(|e| e.to_string()));
        }
        let result = point.and_then(|c| sweep_job(&c));
        (i, j, values, result)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let results: Vec<_> = pool.install(|| points.par_iter().map(job).collect());

    let mut header: Vec<String> = vec!["ix".into(), "iy".into()];
    header.extend(axes.iter().map(|a| a.key.clone()));
    for col in [
        "epsilon", "A", "I", "C", "omega", "regime", "class", "r0", "R", "drift_epsilon", "drift_I", "drift_A",
        "drift_C", "status",
    ] {
        header.push(col.into());
    }
    let blank = || String::new();
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(results.len());
    let mut failures = 0;
    for (i, j, values, result) in &results {
        let mut row = vec![i.to_string(), j.to_string()];
        row.extend(values.iter().map(|v| format_float(*v)));
        match result {
            Ok(r) => {
                row.extend([r.epsilon, r.transverse, r.angular_momentum, r.offset, r.omega].map(format_float));
                row.push(r.regime.clone());
                row.push(r.class.clone());
                row.push(r.radius.map_or_else(blank, format_float));
                row.push(r.center_distance.map_or_else(blank, format_float));
                row.extend(
                    [r.drift.speed_sq, r.drift.angular_momentum, r.drift.transverse, r.drift.offset].map(format_float),
                );
                row.push(r.status.clone());
            }
            Err(msg) => {
                failures += 1;
                row.extend(std::iter::repeat_with(blank).take(13));
                row.push(format!("error: {msg}"));
            }
        }
        rows.push(row);
    }

    let path = match format {
        Format::Csv => {
            let path = out.join("sweep.csv");
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            write_csv(&path, &header_refs, &rows).map_err(|e| io_err(&path, e))?;
            path
        }
        Format::Json => {
            let path = out.join("sweep.json");
            write_json(&path, &json!({ "columns": header, "rows": rows })).map_err(|e| io_err(&path, e))?;
            path
        }
    };
    say!("wrote {} ({} rows, {} failed)", path.display(), rows.len(), failures);
    Ok(Outcome::Success)
}

pub fn classify(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let chart = &cfg.chart;
    let (initial, omega) = cfg.initial_state().map_err(CliError::from)?;
    let k = MotionConstants::from_state(chart, &initial, omega);
    let (regime, class) = regime_and_class(&k, chart);
    let mut report = Map::new();
    report.insert("command".into(), json!("classify"));
    report.insert("config".into(), json!(cfg.resolved()));
    report.insert("constants".into(), constants_json(&k));
    report.insert("regime".into(), json!(regime.map(|r| r.name())));
    if let Some(ZRegime::Reflected { z_plus, z_minus }) = regime {
        report.insert("z_plus".into(), json!(z_plus));
        report.insert("z_minus".into(), json!(z_minus));
    }
    report.insert("class".into(), json!(class.map(|c| c.name())));
    match radial_turning_points(&k, chart) {
        Ok(RadialRange::Bounded { r_min, r_max }) => {
            report.insert("r_min".into(), json!(r_min));
            report.insert("r_max".into(), json!(r_max));
        }
        Ok(RadialRange::Unbounded { r_min }) => {
            report.insert("r_min".into(), json!(r_min));
        }
        Err(_) => {}
    }
    if class == Some(OrbitClass::BoundedCircle) {
        let phi0 = orbit_center_azimuth(chart, &initial, omega).ok();
        if let Ok(g) = circle_params(&k, chart, phi0.unwrap_or(0.0)) {
            report.insert("r0".into(), json!(g.radius));
            report.insert("R".into(), json!(g.center_distance));
            // the centre direction is meaningless when C = 0
            if clean_offset(&k, chart) > 0.0 {
                report.insert("center_azimuth".into(), json!(g.center_azimuth));
            }
        }
    }
    let report = Value::Object(report);
    let path = out.join("classify.json");
    write_json(&path, &report).map_err(|e| io_err(&path, e))?;
    for key in ["regime", "z_plus", "class", "r_min", "r_max", "r0", "R"] {
        if let Some(v) = report.get(key) {
            say!("{key}: {v}");
        }
    }
    Ok(Outcome::Success)
}

pub fn maxwell_check(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let m = &cfg.maxwell;
    if m.r_max <= m.r_min || m.points < 3 {
        return Err(CliError::Config("maxwell.points".into(), "need r_min < r_max and at least 3 points".into()));
    }
    let chart = &cfg.chart;
    let grid = uniform_grid(m.r_min, m.r_max, m.points);
    // a perturbation δr³ of the potential adds 3δr² to the field
    let residual = maxwell_residual_with(chart, &grid, m.z, |r| {
        -field_strength_phir(chart, &cfg.field, r) - 3.0 * m.perturb * r * r
    })
    .map_err(|e| CliError::Config("maxwell".into(), e.to_string()))?;
    let pass = residual <= m.tol;
    let report = json!({
        "command": "maxwell-check",
        "config": cfg.resolved(),
        "residual": residual,
        "tolerance": m.tol,
        "pass": pass,
    });
    let path = out.join("maxwell.json");
    write_json(&path, &report).map_err(|e| io_err(&path, e))?;
    say!("maxwell residual {residual:.3e} (tolerance {:.1e}) {}", m.tol, if pass { "ok" } else { "FAIL" });
    Ok(if pass { Outcome::Success } else { Outcome::ToleranceFailure })
}

/// Re-check an exported run: drifts from the table must match the manifest.
pub fn verify(out: &Path) -> Result<Outcome, CliError> {
    let mpath = out.join(MANIFEST);
    let text = fs::read_to_string(&mpath).map_err(|e| io_err(&mpath, e))?;
    let manifest: Value = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", mpath.display())))?;
    let entries = serde_json::from_value(manifest["config"].clone())
        .map_err(|e| CliError::Io(format!("{}: bad config block: {e}", mpath.display())))?;
    let cfg = RunConfig::from_entries(entries).map_err(CliError::from)?;
    let omega = manifest["omega"].as_f64().ok_or_else(|| CliError::Io("manifest lacks omega".into()))?;
    let file = manifest["trajectory_file"].as_str().unwrap_or("trajectory.csv");
    let tpath = out.join(file);
    let rows = if file.ends_with(".json") { read_trajectory_json(&tpath) } else { read_trajectory_csv(&tpath) }
        .map_err(|e| io_err(&tpath, e))?;

    let mut worst: f64 = 0.0;
    let recorded = &manifest["drift_exported"];
    let drift = drift_json(&drift_of_rows(&rows, omega));
    for key in ["epsilon", "I", "A", "C"] {
        let (a, b) = (drift[key].as_f64().unwrap_or(f64::NAN), recorded[key].as_f64().unwrap_or(f64::NAN));
        worst = worst.max((a - b).abs());
    }
    // stored invariant columns must follow from the stored states
    let mut column_mismatch: f64 = 0.0;
    for r in &rows {
        let s = State::new(r[0], r[1], r[2], r[3], r[4], r[5], r[6]);
        let k = MotionConstants::from_state(&cfg.chart, &s, omega);
        for (x, y) in [(k.speed_sq, r[7]), (k.angular_momentum, r[8]), (k.transverse, r[9]), (k.offset, r[10])] {
            column_mismatch = column_mismatch.max((x - y).abs() / y.abs().max(1.0));
        }
    }
    let pass = worst <= 1e-12 && column_mismatch <= 1e-12;
    say!("drift mismatch {worst:.3e}, invariant column mismatch {column_mismatch:.3e} {}", if pass { "ok" } else { "FAIL" });
    Ok(if pass { Outcome::Success } else { Outcome::ToleranceFailure })
}
