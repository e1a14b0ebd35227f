//! One function per subcommand. Each returns the files to write and a JSON
//! metrics object for the manifest.

use std::collections::BTreeMap;

use rug::Float;
use serde_json::{json, Value};
use skinbench::audit::{audit_precision, AuditModel};
use skinbench::gaussdyn::{fit_slope, neel_init, evolve, propagator_norm_series, step_count, steady_state_metrics, Lattice};
use skinbench::linalg::{eig, log10_condition_number, qr_rq_lab, sort_spectrum};
use skinbench::manybody::{
    build_interacting, closed_form_span, disorder_condition_sweep, fock_basis, interacting_log10_condition,
    mb_propagator_norm, position_sum_span,
};
use skinbench::models::{
    build, envelope_slope, exact_log10_condition_number, exact_spectrum, exact_wavefunctions, longest_run_between,
    Variant,
};
use skinbench::pseudospec::{check_sandwich, perturbed_eigencloud, resolvent_norm_grid, spectral_distance};
use skinbench::table::{fmt_f64, fmt_float, Table};
use skinbench::{ComplexMatrix, ComplexScalar, Precision, Result};

use crate::args::*;

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub metrics: Value,
    pub seeds: BTreeMap<String, u64>,
    pub notes: Vec<String>,
}

/// `hash` names files whose name must follow the parameters.
pub fn run(cmd: &Command, hash: &str) -> Result<Outcome> {
    match cmd {
        Command::Spectrum(a) => spectrum(a),
        Command::Wavefunctions(a) => wavefunctions(a),
        Command::Pseudo(a) => pseudo(a),
        Command::Cloud(a) => cloud(a),
        Command::Cond(a) => cond(a),
        Command::Evolve(a) => evolve_cmd(a, hash),
        Command::Norms(a) => norms(a),
        Command::Qrlab(a) => qrlab(a),
        Command::Manybody(a) => manybody(a),
        Command::Disorder(a) => disorder(a),
        Command::Audit(a) => audit(a),
    }
}

fn ctx_of(p: &PrecisionArgs) -> Precision {
    p.ctx().expect("precision resolved before dispatch")
}

fn model_seeds(m: &ModelArgs) -> BTreeMap<String, u64> {
    m.seed.map(|s| BTreeMap::from([("disorder_seed".to_string(), s)])).unwrap_or_default()
}

/// Largest distance from a reference eigenvalue to the nearest computed one.
fn max_mismatch(computed: &[ComplexScalar], reference: &[ComplexScalar]) -> f64 {
    reference.iter().map(|z| spectral_distance(z, computed).to_f64()).fold(0.0, f64::max)
}

fn spectrum(a: &SpectrumArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.precision);
    let spec = a.model.spec();
    let s = eig(&build(&spec, ctx)?)?;
    let mut t = Table::new(["index", "re", "im", "residual"]);
    for (k, (z, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
        t.push(vec![k.to_string(), fmt_float(&z.re, ctx), fmt_float(&z.im, ctx), fmt_f64(*r, ctx)]);
    }
    let mut metrics = json!({
        "dim": s.eigenvalues.len(),
        "max_abs_imag": s.max_abs_imag(),
        "max_residual": s.max_residual(),
    });
    if let Ok(mut exact) = exact_spectrum(&spec, ctx) {
        sort_spectrum(&mut exact);
        metrics["max_error_vs_closed_form"] = json!(max_mismatch(&s.eigenvalues, &exact));
    }
    Ok(Outcome { files: vec![("spectrum.csv".into(), t.to_csv())], metrics, seeds: model_seeds(&a.model), notes: vec![] })
}

fn vectors_table(values: &[ComplexScalar], v: &ComplexMatrix, ctx: Precision) -> Table {
    let mut t = Table::new(["mode", "energy_re", "energy_im", "site", "re", "im", "abs"]);
    for (m, e) in values.iter().enumerate() {
        for i in 0..v.rows() {
            let z = &v[(i, m)];
            t.push(vec![
                m.to_string(),
                fmt_float(&e.re, ctx),
                fmt_float(&e.im, ctx),
                (i + 1).to_string(),
                fmt_float(&z.re, ctx),
                fmt_float(&z.im, ctx),
                fmt_float(&z.abs(), ctx),
            ]);
        }
    }
    t
}

fn wavefunctions(a: &SpectrumArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.precision);
    let spec = a.model.spec();
    let s = eig(&build(&spec, ctx)?)?;
    let mut files = vec![("wavefunctions.csv".into(), vectors_table(&s.eigenvalues, &s.right_vectors, ctx).to_csv())];
    if let (Ok(exact), Ok(values)) = (exact_wavefunctions(&spec, ctx), exact_spectrum(&spec, ctx)) {
        files.push(("wavefunctions_exact.csv".into(), vectors_table(&values, &exact, ctx).to_csv()));
    }
    let columns: Vec<Vec<ComplexScalar>> = (0..s.right_vectors.cols()).map(|m| s.right_vectors.column(m)).collect();
    let slopes: Vec<f64> = columns.iter().map(|c| envelope_slope(c)).collect();
    let mut metrics = json!({ "envelope_slopes": slopes });
    if let (Variant::Hn { j, gamma, .. }, skinbench::models::Boundary::Obc) = (&spec.variant, spec.bc) {
        let expected = 0.5 * ((j + gamma) / (j - gamma)).abs().ln();
        let good = slopes.iter().filter(|s| (*s - expected).abs() <= 0.05 * expected.abs()).count();
        let floors = columns.iter().filter(|c| longest_run_between(c, 1e-17, 1e-14) >= 10).count();
        let shallow = slopes.iter().filter(|s| s.abs() < 0.9 * expected.abs()).count();
        let floored_or_shallow = columns
            .iter()
            .zip(&slopes)
            .filter(|(c, s)| longest_run_between(c, 1e-17, 1e-14) >= 10 || s.abs() < 0.9 * expected.abs())
            .count();
        let n = slopes.len() as f64;
        metrics["expected_slope"] = json!(expected);
        metrics["fraction_slope_within_5pct"] = json!(good as f64 / n);
        metrics["floored_vectors"] = json!(floors);
        metrics["shallow_vectors"] = json!(shallow);
        metrics["fraction_floored_or_shallow"] = json!(floored_or_shallow as f64 / n);
    }
    Ok(Outcome { files, metrics, seeds: model_seeds(&a.model), notes: vec![] })
}

fn pow10(x: f64, ctx: Precision) -> Float {
    Float::with_val(ctx.bits(), rug::ops::Pow::pow(ctx.int(10), &ctx.real(x)))
}

/// Reference eigenvalues and `cond(V)` for the sandwich check: closed forms
/// when available, else the computed ones.
fn reference(a: &SpectrumArgs, h: &ComplexMatrix, ctx: Precision) -> Result<(Vec<ComplexScalar>, Float, &'static str)> {
    let spec = a.model.spec();
    if let (Ok(values), Ok(lc)) = (exact_spectrum(&spec, ctx), exact_log10_condition_number(&spec)) {
        let cond = pow10(lc, ctx);
        return Ok((values, cond, "closed_form"));
    }
    let s = eig(h)?;
    let lc = log10_condition_number(&s.right_vectors)?;
    let cond = pow10(lc, ctx);
    Ok((s.eigenvalues, cond, "computed"))
}

fn pseudo(a: &PseudoArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.base.precision);
    let h = build(&a.base.model.spec(), ctx)?;
    let grid = resolvent_norm_grid(&h, &a.grid(), ctx)?;
    let (values, cond, source) = reference(&a.base, &h, ctx)?;
    let r = check_sandwich(&grid, &values, &cond, ctx);
    let metrics = json!({
        "points": r.points,
        "sandwich_violations": r.violations.len(),
        "sandwich_holds": r.holds(),
        "lower_margin": r.lower_margin,
        "upper_ratio": r.upper_ratio,
        "cond": cond.to_f64(),
        "reference": source,
    });
    Ok(Outcome {
        files: vec![("pseudo.csv".into(), grid.to_table(ctx).to_csv())],
        metrics,
        seeds: model_seeds(&a.base.model),
        notes: vec![],
    })
}

fn cloud(a: &CloudArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.base.precision);
    let h = build(&a.base.model.spec(), ctx)?;
    let seed = a.sample_seed.unwrap();
    let c = perturbed_eigencloud(&h, a.epsilon.unwrap(), a.samples.unwrap(), seed, ctx)?;
    let base = eig(&h)?.eigenvalues;
    let spread = c.points().map(|z| spectral_distance(z, &base).to_f64()).fold(0.0, f64::max);
    let max_imag = c.points().map(|z| z.im.to_f64().abs()).fold(0.0, f64::max);
    let mut seeds = model_seeds(&a.base.model);
    seeds.insert("sample_seed".into(), seed);
    Ok(Outcome {
        files: vec![("cloud.csv".into(), c.to_table(ctx).to_csv())],
        metrics: json!({ "points": c.points().count(), "max_distance_from_spectrum": spread, "max_abs_imag": max_imag }),
        seeds,
        notes: vec![],
    })
}

fn cond(a: &SpectrumArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.precision);
    let spec = a.model.spec();
    let s = eig(&build(&spec, ctx)?)?;
    let lc = log10_condition_number(&s.right_vectors)?;
    let exact = exact_log10_condition_number(&spec).ok();
    let mut t = Table::new(["L", "log10_cond", "log10_cond_exact"]);
    t.push(vec![spec.sites().to_string(), format!("{lc:.17e}"), exact.map(|x| format!("{x:.17e}")).unwrap_or_default()]);
    Ok(Outcome {
        files: vec![("cond.csv".into(), t.to_csv())],
        metrics: json!({ "log10_cond": lc, "log10_cond_exact": exact }),
        seeds: model_seeds(&a.model),
        notes: vec![],
    })
}

fn evolve_cmd(a: &EvolveArgs, hash: &str) -> Result<Outcome> {
    let ctx = ctx_of(&a.base.precision);
    let spec = a.base.model.spec();
    let h = build(&spec, ctx)?;
    let dt = a.dt.unwrap();
    let steps = step_count(dt, a.tmax.unwrap());
    let (series, state) = evolve(neel_init(&spec, ctx)?, &h, &Lattice::of(&spec), dt, steps, a.record_every.unwrap())?;
    let m = steady_state_metrics(&series, a.window.unwrap())?;
    let metrics = json!({
        "steps": steps,
        "records": series.len(),
        "window_samples": m.samples,
        "middle_width": m.middle_width,
        "edge_densities": m.edge_densities,
        "mean_current": m.mean_current,
        "mean_chain_current": m.mean_chain_current,
        "mean_abs_current": m.mean_abs_current,
        "mean_abs_chain_current": m.mean_abs_chain_current,
        "max_abs_current_sum": m.max_abs_current_sum,
        "mean_entropy": m.mean_entropy,
        "mean_density": m.mean_density,
        "final_log_norm": state.log_norm.to_f64(),
    });
    Ok(Outcome {
        files: vec![(format!("evolve-{hash}.csv"), series.to_table(ctx).to_csv())],
        metrics,
        seeds: model_seeds(&a.base.model),
        notes: vec!["one step propagator exp(-i h dt) is computed once and reused for every step".into()],
    })
}

fn norm_outcome(series: &[(f64, Float)], ctx: Precision, file: &str) -> (Table, Value) {
    let ln10 = std::f64::consts::LN_10;
    let mut t = Table::new(["t", "log_norm", "log10_norm"]);
    for (ti, ln) in series {
        let l10 = Float::with_val(ctx.bits(), ln / &ctx.real(ln10));
        t.push(vec![fmt_f64(*ti, ctx), fmt_float(ln, ctx), fmt_float(&l10, ctx)]);
    }
    let early: Vec<(f64, f64)> = series.iter().filter(|p| p.0 <= 1.0 + 1e-9).map(|p| (p.0, p.1.to_f64())).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = early.into_iter().unzip();
    let slope = if x.len() >= 2 { fit_slope(&x, &y) } else { f64::NAN };
    let max_ln = series.iter().map(|p| p.1.to_f64()).fold(f64::NEG_INFINITY, f64::max);
    let metrics = json!({
        "file": file,
        "early_slope": slope,
        "max_log_norm": max_ln,
        "max_log10_norm": max_ln / ln10,
    });
    (t, metrics)
}

fn norms(a: &NormsArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.base.precision);
    let h = build(&a.base.model.spec(), ctx)?;
    let series = propagator_norm_series(&h, a.dt.unwrap(), a.tmax.unwrap(), ctx)?;
    let (t, metrics) = norm_outcome(&series, ctx, "norms.csv");
    Ok(Outcome { files: vec![("norms.csv".into(), t.to_csv())], metrics, seeds: model_seeds(&a.base.model), notes: vec![] })
}

fn qrlab(a: &QrlabArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.base.precision);
    let h = build(&a.base.model.spec(), ctx)?;
    let r = qr_rq_lab(&h, a.iters.unwrap(), a.threshold.unwrap())?;
    let mut t = Table::new(["call", "min_denominator"]);
    for (k, d) in r.schur.denominators.iter().enumerate() {
        t.push(vec![k.to_string(), fmt_f64(*d, ctx)]);
    }
    let sizes = r.schur.block_sizes.clone().unwrap_or_default();
    let metrics = json!({
        "blocks": sizes.len(),
        "blocks_size_1": sizes.iter().filter(|&&s| s == 1).count(),
        "blocks_size_2": r.complex_blocks,
        "min_denominator": r.min_denominator,
        "small_denominator_calls": r.small_denominator_calls,
    });
    Ok(Outcome { files: vec![("qrlab.csv".into(), t.to_csv())], metrics, seeds: model_seeds(&a.base.model), notes: vec![] })
}

fn manybody(a: &ManybodyArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.precision);
    let spec = a.spec();
    let basis = fock_basis(spec.l, spec.n)?;
    let s = eig(&build_interacting(&spec, ctx)?)?;
    let mut t = Table::new(["index", "re", "im", "residual"]);
    for (k, (z, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
        t.push(vec![k.to_string(), fmt_float(&z.re, ctx), fmt_float(&z.im, ctx), fmt_f64(*r, ctx)]);
    }
    let mut files = vec![("manybody_spectrum.csv".to_string(), t.to_csv())];
    let mut metrics = json!({
        "dim": basis.dim(),
        "max_abs_imag": s.max_abs_imag(),
        "max_residual": s.max_residual(),
        "span_enumerated": position_sum_span(&basis),
        "span_closed_form": closed_form_span(spec.l, spec.n),
        "log10_cond_closed_form": interacting_log10_condition(&spec).ok(),
    });
    if let Some(tmax) = a.tmax {
        let series = mb_propagator_norm(&spec, a.dt.unwrap(), tmax, ctx)?;
        let (nt, nm) = norm_outcome(&series, ctx, "manybody_norms.csv");
        files.push(("manybody_norms.csv".into(), nt.to_csv()));
        metrics["norms"] = nm;
    }
    Ok(Outcome { files, metrics, seeds: BTreeMap::new(), notes: vec![] })
}

fn disorder(a: &DisorderArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.precision);
    let seed = a.seed.unwrap();
    let w = a.w.as_ref().unwrap();
    let l = a.l.as_ref().unwrap();
    let sweep = disorder_condition_sweep(a.j.unwrap(), a.gamma.unwrap(), w, l, a.samples.unwrap(), seed, ctx)?;
    let cells: Vec<Value> = sweep
        .cells
        .iter()
        .map(|c| json!({ "W": c.w, "L": c.l, "mean_log10_cond": c.mean_log10_cond, "stderr": c.stderr }))
        .collect();
    Ok(Outcome {
        files: vec![
            ("disorder_samples.csv".into(), sweep.sample_table().to_csv()),
            ("disorder_cells.csv".into(), sweep.cell_table().to_csv()),
        ],
        metrics: json!({ "cells": cells }),
        seeds: BTreeMap::from([("seed".to_string(), seed)]),
        notes: vec![],
    })
}

fn audit(a: &AuditArgs) -> Result<Outcome> {
    let ctx = ctx_of(&a.base.precision);
    let m = &a.base.model;
    let model = if a.interacting.unwrap() {
        AuditModel::Interacting(skinbench::manybody::ManyBodySpec::new(
            m.j.unwrap(),
            m.gamma.unwrap(),
            a.u.unwrap(),
            m.l.unwrap(),
            a.n.unwrap(),
            m.bc.unwrap().into(),
        ))
    } else {
        AuditModel::Single(m.spec())
    };
    let r = audit_precision(&model, a.probes.as_ref().unwrap(), a.target.unwrap(), ctx)?;
    let mut t = Table::new(["L", "log10_cond", "fit"]);
    for (l, c) in &r.probes {
        let x = if r.quadratic { (l * l) as f64 } else { *l as f64 };
        t.push(vec![l.to_string(), format!("{c:.17e}"), format!("{:.17e}", r.intercept + r.slope * x)]);
    }
    let metrics = serde_json::to_value(&r).expect("report serializes");
    Ok(Outcome { files: vec![("audit.csv".into(), t.to_csv())], metrics, seeds: model_seeds(m), notes: vec![] })
}
