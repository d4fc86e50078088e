//! Implementations of the five subcommands. Each returns the JSON summary it
//! also writes (so `main` can print it), with every default parameter echoed
//! into the summary.

use super::config::{
    parse_formulation, square_from_flat, CounterexampleConfig, EvalConfig, PathConfig, ScanConfig,
};
use super::output::{
    csv_document, flat_square, flat_sym, flat_vector, fmt_f64, json_f64, json_floats,
    matrix_headers, write_json, write_text,
};
use super::CliError;
use crate::ellipticity::{
    counterexample_curve, directional_second_derivative, rank_one_scan, shear_deformation,
    EllipticityReport, LineConvexity, Verdict, TOL_LINE_REL,
};
use crate::energy::{log_stretch, EnergyModel};
use crate::plasticity::{PlasticState, ProbeSettings, StepResult};
use crate::tensor::SquareMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use std::path::Path;

fn dispatch_n<R>(
    n: usize,
    run2: impl FnOnce() -> Result<R, CliError>,
    run3: impl FnOnce() -> Result<R, CliError>,
) -> Result<R, CliError> {
    match n {
        2 => run2(),
        3 => run3(),
        other => Err(CliError::Config(format!("supported dimensions are 2 and 3, got {other}"))),
    }
}

fn json_square<const N: usize>(m: &SquareMatrix<N>) -> Value {
    json_floats(&flat_square(m))
}

// ---------------------------------------------------------------- eval

pub fn cmd_eval(cfg: &EvalConfig) -> Result<Value, CliError> {
    dispatch_n(cfg.model.n, || eval_n::<2>(cfg), || eval_n::<3>(cfg))
}

fn eval_n<const N: usize>(cfg: &EvalConfig) -> Result<Value, CliError> {
    let (model, warnings) = cfg.model.build::<N>()?;
    let f = square_from_flat::<N>(&cfg.f)?;
    let finite_strain = !matches!(model, EnergyModel::SmallStrainQuadratic { .. });
    if finite_strain && f.det() <= 0.0 {
        return Err(CliError::Domain(format!(
            "det F = {:e} violates the orientation constraint det F > 0",
            f.det()
        )));
    }
    let energy = model.energy(&f);
    let piola = model.piola_stress(&f).map_err(|e| CliError::Domain(e.to_string()))?;
    let cauchy = if f.det() > 0.0 {
        Some(model.cauchy_stress(&f).map_err(|e| CliError::Domain(e.to_string()))?)
    } else {
        None
    };
    let driving = model.driving_stress(&f).map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(json!({
        "command": "eval",
        "model": serde_json::to_value(&cfg.model).unwrap(),
        "f": json_square(&f),
        "energy": json_f64(energy),
        "piola_stress": json_square(&piola),
        "cauchy_stress": cauchy.map(|s| json_floats(&flat_sym(&s))),
        "driving_stress": match driving {
            Some(s) => json_floats(&flat_sym(&s)),
            None => Value::Null,
        },
        "warnings": warnings,
    }))
}

// ------------------------------------------------------- counterexample

fn convexity_json(c: &LineConvexity) -> Value {
    match c {
        LineConvexity::Convex => json!({"verdict": "convex"}),
        LineConvexity::Nonconvex { witness } => json!({
            "verdict": "nonconvex",
            "witness": witness.iter()
                .map(|&(t, h)| json!([json_f64(t), json_f64(h)]))
                .collect::<Vec<_>>(),
        }),
    }
}

pub fn cmd_counterexample(cfg: &CounterexampleConfig, out: &Path) -> Result<Value, CliError> {
    if cfg.samples < 3 {
        return Err(CliError::Config(format!(
            "samples must be >= 3 for a convexity check, got {}",
            cfg.samples
        )));
    }
    if !(cfg.t_max > cfg.t_min) {
        return Err(CliError::Config("t_max must exceed t_min".into()));
    }
    let grid: Vec<f64> = (0..cfg.samples)
        .map(|i| cfg.t_min + (cfg.t_max - cfg.t_min) * i as f64 / (cfg.samples - 1) as f64)
        .collect();
    let curve = counterexample_curve(cfg.a, cfg.b, &grid)?;

    let header = vec!["t".to_string(), "h_closed_form".to_string(), "h_direct".to_string()];
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            vec![
                fmt_f64(curve.t[i]),
                fmt_f64(curve.closed_form[i]),
                fmt_f64(curve.direct[i]),
            ]
        })
        .collect();
    write_text(&out.join("counterexample.csv"), &csv_document(&header, &rows))?;

    let summary = json!({
        "command": "counterexample",
        "parameters": serde_json::to_value(cfg).unwrap(),
        "defaults": {"line_convexity_rel_tol": TOL_LINE_REL},
        "closed_form_convexity": convexity_json(&curve.closed_form_convexity),
        "direct_convexity": convexity_json(&curve.direct_convexity),
        "evenness_residual": json_f64(curve.evenness_residual),
        "route_discrepancy": {
            "t": json_f64(curve.max_discrepancy.0),
            "abs_gap": json_f64(curve.max_discrepancy.1),
            "note": "the transcribed closed form and the spectral evaluation disagree away from t = 0; both columns are reported",
        },
        "csv": "counterexample.csv",
    });
    write_json(&out.join("counterexample_summary.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- scan

/// Uniform random rotation; Shoemake quaternion sampling in 3D.
fn random_rotation<const N: usize>(rng: &mut StdRng) -> SquareMatrix<N> {
    let mut m = SquareMatrix::<N>::identity();
    match N {
        2 => {
            let th = rng.random::<f64>() * std::f64::consts::TAU;
            let (s, c) = th.sin_cos();
            m.entries[0][0] = c;
            m.entries[0][1] = -s;
            m.entries[1][0] = s;
            m.entries[1][1] = c;
        }
        3 => {
            let (u1, u2, u3) =
                (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
            let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
            let (x, y) = (a * (std::f64::consts::TAU * u2).sin(), a * (std::f64::consts::TAU * u2).cos());
            let (z, w) = (b * (std::f64::consts::TAU * u3).sin(), b * (std::f64::consts::TAU * u3).cos());
            let r = [
                [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
                [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
                [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
            ];
            for i in 0..3 {
                for j in 0..3 {
                    m.entries[i][j] = r[i][j];
                }
            }
        }
        _ => unreachable!("supported dimensions are 2 and 3"),
    }
    m
}

/// F = R1 diag(sv) R2 with singular values uniform in [sv_min, sv_max].
pub fn random_deformation<const N: usize>(
    rng: &mut StdRng,
    sv_min: f64,
    sv_max: f64,
) -> SquareMatrix<N> {
    let mut sv = [0.0; N];
    for s in sv.iter_mut() {
        *s = sv_min + (sv_max - sv_min) * rng.random::<f64>();
    }
    let r1 = random_rotation::<N>(rng);
    let r2 = random_rotation::<N>(rng);
    r1.matmul(&SquareMatrix::diagonal(&sv)).matmul(&r2)
}

fn report_json<const N: usize>(label: &str, f: &SquareMatrix<N>, r: &EllipticityReport<N>) -> Value {
    json!({
        "label": label,
        "f": json_square(f),
        "verdict": r.verdict.as_str(),
        "min_q": json_f64(r.min_q),
        "samples": r.samples,
        "tol": json_f64(r.tol),
        "witness": r.witness.as_ref().map(|w| json!({
            "eta": json_floats(&flat_vector(&w.eta)),
            "xi": json_floats(&flat_vector(&w.xi)),
        })),
    })
}

pub fn cmd_scan(cfg: &ScanConfig, out: &Path, seed: u64) -> Result<Value, CliError> {
    dispatch_n(cfg.model.n, || scan_n::<2>(cfg, out, seed), || scan_n::<3>(cfg, out, seed))
}

fn scan_n<const N: usize>(cfg: &ScanConfig, out: &Path, seed: u64) -> Result<Value, CliError> {
    let (model, warnings) = cfg.model.build::<N>()?;
    let mut base_points: Vec<(String, SquareMatrix<N>)> = Vec::new();
    for (i, entries) in cfg.points.iter().enumerate() {
        base_points.push((format!("point[{i}]"), square_from_flat::<N>(entries)?));
    }
    if let Some(sp) = &cfg.shear_path {
        if sp.samples < 1 || !(sp.t_max >= sp.t_min) {
            return Err(CliError::Config("shear path needs samples >= 1 and t_max >= t_min".into()));
        }
        for i in 0..sp.samples {
            let t = if sp.samples == 1 {
                sp.t_min
            } else {
                sp.t_min + (sp.t_max - sp.t_min) * i as f64 / (sp.samples - 1) as f64
            };
            let shear = shear_deformation(t);
            let mut f = SquareMatrix::<N>::identity();
            for i in 0..2 {
                for j in 0..2 {
                    f.entries[i][j] = shear.entries[i][j];
                }
            }
            base_points.push((format!("shear_t={}", fmt_f64(t)), f));
        }
    }
    if let Some(rd) = &cfg.random {
        if !(rd.sv_min > 0.0 && rd.sv_max >= rd.sv_min) {
            return Err(CliError::Config("random scan needs 0 < sv_min <= sv_max".into()));
        }
        let mut rng = StdRng::seed_from_u64(seed);
        for i in 0..rd.count {
            base_points.push((
                format!("random[{i}]"),
                random_deformation::<N>(&mut rng, rd.sv_min, rd.sv_max),
            ));
        }
    }
    if base_points.is_empty() {
        return Err(CliError::Config(
            "scan needs at least one base point (points, shear_path or random)".into(),
        ));
    }
    if cfg.write_cells && N != 2 {
        return Err(CliError::Config("per-cell CSV output is 2D only".into()));
    }

    let mut reports = Vec::with_capacity(base_points.len());
    let mut aggregate = Verdict::Elliptic;
    for (idx, (label, f)) in base_points.iter().enumerate() {
        let report = rank_one_scan(&model, f, cfg.resolution)
            .map_err(|e| CliError::Domain(e.to_string()))?;
        match report.verdict {
            Verdict::Violated => aggregate = Verdict::Violated,
            Verdict::Inconclusive if aggregate == Verdict::Elliptic => {
                aggregate = Verdict::Inconclusive
            }
            _ => {}
        }
        if cfg.write_cells {
            write_cells_csv::<N>(&model, f, cfg.resolution, &out.join(format!("cells_{idx}.csv")))?;
        }
        reports.push(report_json(label, f, &report));
    }

    let summary = json!({
        "command": "scan",
        "model": serde_json::to_value(&cfg.model).unwrap(),
        "defaults": {
            "resolution": cfg.resolution,
            "seed": seed,
            "tol_rel": crate::ellipticity::TOL_ELL_REL,
            "tol_floor": crate::ellipticity::TOL_ELL_FLOOR,
        },
        "aggregate_verdict": aggregate.as_str(),
        "reports": reports,
        "warnings": warnings,
    });
    write_json(&out.join("scan_summary.json"), &summary)?;
    Ok(summary)
}

fn write_cells_csv<const N: usize>(
    model: &EnergyModel<N>,
    f: &SquareMatrix<N>,
    resolution: usize,
    path: &Path,
) -> Result<(), CliError> {
    let header = vec!["theta".to_string(), "phi".to_string(), "q".to_string()];
    let mut rows = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let theta = std::f64::consts::PI * i as f64 / resolution as f64;
        let mut eta = [0.0; N];
        eta[0] = theta.cos();
        eta[1] = theta.sin();
        for j in 0..resolution {
            let phi = std::f64::consts::PI * j as f64 / resolution as f64;
            let mut xi = [0.0; N];
            xi[0] = phi.cos();
            xi[1] = phi.sin();
            let q = directional_second_derivative(model, f, &eta, &xi)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            rows.push(vec![fmt_f64(theta), fmt_f64(phi), fmt_f64(q)]);
        }
    }
    write_text(path, &csv_document(&header, &rows))
}

// ---------------------------------------------------------------- path

fn plastic_entries<const N: usize>(p: &PlasticState<N>) -> Vec<f64> {
    match p {
        PlasticState::SmallStrain(s) | PlasticState::AdditiveLog(s) => flat_sym(s),
        PlasticState::Multiplicative(fp) => flat_square(fp),
    }
}

fn plastic_variant<const N: usize>(p: &PlasticState<N>) -> &'static str {
    match p {
        PlasticState::SmallStrain(_) => "small_strain",
        PlasticState::AdditiveLog(_) => "additive_log",
        PlasticState::Multiplicative(_) => "multiplicative",
    }
}

/// Frobenius norm of the plastic log-stretch (the plastic strain itself for
/// the additive formulations).
fn plastic_norm<const N: usize>(p: &PlasticState<N>) -> f64 {
    match p {
        PlasticState::SmallStrain(s) | PlasticState::AdditiveLog(s) => s.frobenius_norm(),
        PlasticState::Multiplicative(fp) => match log_stretch(fp) {
            Some(l) => l.frobenius_norm(),
            None => f64::NAN,
        },
    }
}

fn verdict_cell<const N: usize>(r: &StepResult<N>) -> String {
    match &r.ellipticity {
        Some(rep) => rep.verdict.as_str().to_string(),
        None => "skipped".to_string(),
    }
}

pub fn cmd_path(cfg: &PathConfig, out: &Path) -> Result<Value, CliError> {
    dispatch_n(cfg.n, || path_n::<2>(cfg, out), || path_n::<3>(cfg, out))
}

fn path_n<const N: usize>(cfg: &PathConfig, out: &Path) -> Result<Value, CliError> {
    let name = cfg
        .formulation
        .as_deref()
        .ok_or_else(|| CliError::Config("path requires a `formulation` field".into()))?;
    let formulation = parse_formulation(name)?;
    let spec = cfg.to_spec::<N>(formulation)?;
    let probe = cfg.probe_ellipticity.then_some(ProbeSettings { resolution: cfg.probe_resolution });
    let results = crate::plasticity::drive_path(&spec, probe)?;

    let mut header = vec!["t".to_string()];
    header.extend(matrix_headers("s", N));
    header.extend(matrix_headers("p", N));
    header.push("lambda_plus".to_string());
    header.push("yield_residual".to_string());
    header.push("verdict".to_string());
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = vec![fmt_f64(r.time)];
            row.extend(flat_sym(&r.stress).iter().map(|&x| fmt_f64(x)));
            row.extend(plastic_entries(&r.plastic).iter().map(|&x| fmt_f64(x)));
            row.push(fmt_f64(r.lambda_plus));
            row.push(fmt_f64(r.kkt.yield_residual));
            row.push(verdict_cell(r));
            row
        })
        .collect();
    write_text(&out.join("path.csv"), &csv_document(&header, &rows))?;

    let first_violation = results
        .iter()
        .enumerate()
        .find(|(_, r)| {
            matches!(&r.ellipticity, Some(rep) if rep.verdict == Verdict::Violated)
        })
        .map(|(i, r)| json!({"step": i, "t": json_f64(r.time)}));
    let max_yield = results.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.kkt.yield_residual));
    let max_compl =
        results.iter().fold(0.0_f64, |m, r| m.max(r.kkt.complementarity_residual));
    let last = results.last().expect("validated paths are nonempty");

    let summary = json!({
        "command": "path",
        "parameters": serde_json::to_value(cfg).unwrap(),
        "defaults": {
            "domain_radius_factor": cfg.domain_factor(formulation),
            "kkt_tolerance": json_f64(spec.yield_surface.kkt_tolerance()),
            "probe_resolution": cfg.probe_resolution,
        },
        "steps": results.len(),
        "first_violating_step": first_violation,
        "max_yield_residual": json_f64(max_yield),
        "max_complementarity_residual": json_f64(max_compl),
        "final_plastic_state": {
            "variant": plastic_variant(&last.plastic),
            "entries": json_floats(&plastic_entries(&last.plastic)),
        },
        "csv": "path.csv",
    });
    write_json(&out.join("path_summary.json"), &summary)?;
    Ok(summary)
}

// -------------------------------------------------------------- compare

pub fn cmd_compare(cfg: &PathConfig, out: &Path) -> Result<Value, CliError> {
    dispatch_n(cfg.n, || compare_n::<2>(cfg, out), || compare_n::<3>(cfg, out))
}

fn compare_n<const N: usize>(cfg: &PathConfig, out: &Path) -> Result<Value, CliError> {
    let names = cfg
        .formulations
        .clone()
        .ok_or_else(|| CliError::Config("compare requires a `formulations` list".into()))?;
    if names.len() < 2 {
        return Err(CliError::Config("compare needs at least two formulations".into()));
    }
    let probe = cfg.probe_ellipticity.then_some(ProbeSettings { resolution: cfg.probe_resolution });

    let mut header = vec!["t".to_string()];
    let mut runs = Vec::new();
    for name in &names {
        let formulation = parse_formulation(name)?;
        let spec = cfg.to_spec::<N>(formulation)?;
        let results = crate::plasticity::drive_path(&spec, probe)?;
        header.extend(matrix_headers(&format!("{name}_s"), N));
        header.push(format!("{name}_plastic_norm"));
        header.push(format!("{name}_energy"));
        header.push(format!("{name}_lambda_plus"));
        header.push(format!("{name}_verdict"));
        runs.push((spec, results));
    }

    let steps = cfg.steps.len();
    let mut rows = Vec::with_capacity(steps);
    let mut summaries = Vec::new();
    for i in 0..steps {
        let mut row = vec![fmt_f64(cfg.steps[i].t)];
        for (spec, results) in &runs {
            let r = &results[i];
            let f = spec.steps[i].1;
            let energy = spec.frozen_model(&r.plastic).energy(&f);
            row.extend(flat_sym(&r.stress).iter().map(|&x| fmt_f64(x)));
            row.push(fmt_f64(plastic_norm(&r.plastic)));
            row.push(fmt_f64(energy));
            row.push(fmt_f64(r.lambda_plus));
            row.push(verdict_cell(r));
        }
        rows.push(row);
    }
    for (name, (spec, results)) in names.iter().zip(&runs) {
        let violations = results
            .iter()
            .filter(|r| matches!(&r.ellipticity, Some(rep) if rep.verdict == Verdict::Violated))
            .count();
        summaries.push(json!({
            "formulation": name,
            "domain_radius_factor": spec.yield_surface.domain_factor,
            "violating_steps": violations,
            "final_plastic_norm": json_f64(plastic_norm(&results.last().unwrap().plastic)),
        }));
    }
    write_text(&out.join("compare.csv"), &csv_document(&header, &rows))?;

    let summary = json!({
        "command": "compare",
        "parameters": serde_json::to_value(cfg).unwrap(),
        "defaults": {"probe_resolution": cfg.probe_resolution},
        "formulations": summaries,
        "csv": "compare.csv",
    });
    write_json(&out.join("compare_summary.json"), &summary)?;
    Ok(summary)
}
