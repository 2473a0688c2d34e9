use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use hcr_core::builders::{boundary_layer, derivative_bounds, spec_for, BuildOptions, EnvelopeBand};
use hcr_core::limit_zero::{bracket_r, w0_integrate, u0_upper, TOL_R, W0_STEPS};
use hcr_core::model::{EnvelopeKind, ProblemParams};
use hcr_core::shooting::{bracket_error, oracle_solve, shoot, ORACLE_STEPS, ORACLE_TOL, TABLE_STEPS};
use hcr_core::tables;
use hcr_core::verification::{compare_to_oracle, inspect};
use hcr_core::Error;

use crate::config::{Command, Kind, RunConfig};
use crate::output::{jnum, write_table, Cell, Table};

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: Value,
    /// False when any certificate was refused or a comparison failed.
    pub ok: bool,
}

/// A command that could not run.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl Failure {
    pub fn record(&self) -> Value {
        match self {
            Failure::Core(e) => json!({ "error": e.kind(), "message": e.to_string() }),
            Failure::Io(e) => json!({ "error": "io", "message": e.to_string() }),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Run = Result<Outcome, Failure>;

pub fn run(cfg: &RunConfig) -> Run {
    match cfg.command {
        Command::Envelope => envelope(cfg),
        Command::Shoot => shoot_cmd(cfg),
        Command::Limit0 => limit0(cfg),
        Command::Blayer => blayer(cfg),
        Command::Verify => verify(cfg),
        Command::Report => report(cfg),
    }
}

fn params_json(p: &ProblemParams) -> Value {
    json!({
        "b": jnum(p.b()),
        "t": jnum(p.t()),
        "B": jnum(p.big_b()),
        "T": jnum(p.big_t()),
    })
}

fn certificate_record(kind: EnvelopeKind, p: &ProblemParams, opts: &BuildOptions) -> (Value, bool) {
    let spec = match spec_for(kind, p, opts) {
        Ok(s) => s,
        Err(e) => {
            return (
                json!({ "envelope": kind.name(), "status": "refused", "check": e.kind(), "detail": e.to_string() }),
                false,
            )
        }
    };
    let params = json!({ "q": jnum(spec.q), "eps": jnum(spec.eps), "C": jnum(spec.c) });
    match inspect(&spec, p, kind) {
        Ok(c) if c.issued() => (
            json!({
                "envelope": kind.name(),
                "status": "issued",
                "spec": params,
                "residue_min": jnum(c.residue_profile.min()),
                "residue_max": jnum(c.residue_profile.max()),
            }),
            true,
        ),
        Ok(c) => (
            json!({
                "envelope": kind.name(),
                "status": "refused",
                "spec": params,
                "check": c.first_failure().unwrap_or("unknown"),
                "detail": c.details,
            }),
            false,
        ),
        Err(e) => (
            json!({ "envelope": kind.name(), "status": "refused", "check": e.kind(), "detail": e.to_string() }),
            false,
        ),
    }
}

fn bands_for(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Global => &["global"],
        Kind::Partial => &["partial"],
        Kind::Both => &["global", "partial"],
    }
}

fn band_kinds(band: &str) -> [EnvelopeKind; 2] {
    if band == "global" {
        [EnvelopeKind::GlobalLower, EnvelopeKind::GlobalUpper]
    } else {
        [EnvelopeKind::PartialLower, EnvelopeKind::PartialUpper]
    }
}

fn build_band(band: &str, p: &ProblemParams, opts: &BuildOptions) -> hcr_core::Result<EnvelopeBand> {
    if band == "global" {
        EnvelopeBand::global(p, opts)
    } else {
        EnvelopeBand::partial(p, opts)
    }
}

fn files_json(files: &[PathBuf]) -> Value {
    Value::Array(files.iter().map(|f| Value::String(f.display().to_string())).collect())
}

fn envelope(cfg: &RunConfig) -> Run {
    let p = ProblemParams::new(cfg.b, cfg.t)?;
    let opts = BuildOptions::with_rule(cfg.rule);
    let layer = boundary_layer(&p);
    let mut ok = true;
    let mut certificates = Vec::new();
    let (mut wy, mut wu) = (Map::new(), Map::new());
    let mut files = Vec::new();
    for &band in bands_for(cfg.kind) {
        for kind in band_kinds(band) {
            let (rec, issued) = certificate_record(kind, &p, &opts);
            ok &= issued;
            certificates.push(rec);
        }
        let built = match build_band(band, &p, &opts) {
            Ok(b) => b,
            Err(_) => {
                ok = false;
                continue;
            }
        };
        let samples = built.samples(cfg.grid_points)?;
        let mut table = Table::new(vec!["x", "x_u", "y_lower", "y_upper", "u_lower", "u_upper", "width_y", "width_u"]);
        let t = p.t();
        let mut max_w: f64 = 0.0;
        for s in &samples {
            max_w = max_w.max(s.width());
            table.push(vec![
                s.x.into(),
                (1.0 - s.x).into(),
                s.lower.into(),
                s.upper.into(),
                (t * s.lower).into(),
                (t * s.upper).into(),
                s.width().into(),
                (t * s.width()).into(),
            ]);
        }
        wy.insert(band.into(), jnum(max_w));
        wu.insert(band.into(), jnum(t * max_w));
        if let Some(dir) = &cfg.out {
            files.push(write_table(dir, &format!("envelope_{band}"), &table, cfg.format)?);
        }
    }
    let summary = json!({
        "command": "envelope",
        "params": params_json(&p),
        "B": jnum(p.big_b()),
        "T": jnum(p.big_t()),
        "bt025": jnum(layer.value),
        "has_layer": layer.has_layer,
        "iteration_rule": cfg.rule.name(),
        "max_width_y": wy,
        "max_width_u": wu,
        "certificates": certificates,
        "files": files_json(&files),
    });
    Ok(Outcome { summary, ok })
}

fn stride(steps: usize, points: usize) -> usize {
    (steps / (points - 1).max(1)).max(1)
}

fn shoot_cmd(cfg: &RunConfig) -> Run {
    let p = ProblemParams::new(cfg.b, cfg.t)?;
    let steps = cfg.steps.unwrap_or(TABLE_STEPS);
    let bounds = derivative_bounds(&p);
    let plus = shoot(&p, 0.0, steps)?;
    let minus = shoot(&p, bounds.delta, steps)?;
    let err = bracket_error(&p, steps)?;
    let mut files = Vec::new();
    if let Some(dir) = &cfg.out {
        let mut table = Table::new(vec!["x", "x_u", "y_plus", "y_minus", "err_y", "u_plus", "u_minus"]);
        let k = stride(steps, cfg.grid_points);
        for (i, (a, b)) in plus.samples.iter().zip(&minus.samples).enumerate() {
            if i % k == 0 || i == steps {
                let t = p.t();
                table.push(vec![a.0.into(), (1.0 - a.0).into(), a.1.into(), b.1.into(), (a.1 - b.1).into(), (t * a.1).into(), (t * b.1).into()]);
            }
        }
        files.push(write_table(dir, "shoot", &table, cfg.format)?);
    }
    let summary = json!({
        "command": "shoot",
        "params": params_json(&p),
        "steps": steps,
        "delta": jnum(bounds.delta),
        "d": jnum(bounds.d),
        "y0_plus": jnum(plus.terminal_y0),
        "y0_minus": jnum(minus.terminal_y0),
        "max_err_y": jnum(err.max_err),
        "max_err_u": jnum(p.t() * err.max_err),
        "log_ratio": jnum(err.log_ratio),
        "at_x": jnum(err.at_x),
        "files": files_json(&files),
    });
    Ok(Outcome { summary, ok: true })
}

fn limit0(cfg: &RunConfig) -> Run {
    let steps = cfg.steps.unwrap_or(W0_STEPS);
    let res = bracket_r(cfg.b, TOL_R, steps)?;
    let mut files = Vec::new();
    if let Some(dir) = &cfg.out {
        let lo = w0_integrate(cfg.b, res.r_lower, steps)?;
        let up = w0_integrate(cfg.b, res.r_upper, steps)?;
        let mut table = Table::new(vec!["x", "w_lower", "w_upper", "u0_upper"]);
        let k = stride(steps, cfg.grid_points);
        for i in 0..lo.xs.len() {
            if i % k == 0 || i + 1 == lo.xs.len() {
                let x = lo.xs[i];
                table.push(vec![x.into(), lo.ws[i].into(), up.ws[i].into(), u0_upper(cfg.b, x).into()]);
            }
        }
        files.push(write_table(dir, "limit0", &table, cfg.format)?);
    }
    let summary = json!({
        "command": "limit0",
        "b": jnum(cfg.b),
        "steps": steps,
        "gamma": jnum(res.gamma),
        "r_lower": jnum(res.r_lower),
        "r_upper": jnum(res.r_upper),
        "w_terminal_lower": jnum(res.w_terminal_lower),
        "w_terminal_upper": jnum(res.w_terminal_upper),
        "width": jnum(res.width()),
        "u0_upper_terminal": jnum(res.u0p_terminal),
        "seeds": {
            "r_minus": jnum(res.seeds.r_minus),
            "r_plus": jnum(res.seeds.r_plus),
            "w_minus": jnum(res.seeds.w_minus),
            "w_plus": jnum(res.seeds.w_plus),
        },
        "below_recommended": res.below_recommended,
        "files": files_json(&files),
    });
    Ok(Outcome { summary, ok: true })
}

fn blayer(cfg: &RunConfig) -> Run {
    let p = ProblemParams::new(cfg.b, cfg.t)?;
    let r = boundary_layer(&p);
    let summary = json!({
        "command": "blayer",
        "params": params_json(&p),
        "bt025": jnum(r.value),
        "has_layer": r.has_layer,
        "variation_ratio": jnum(r.variation_ratio),
        "xi": jnum(r.xi),
    });
    Ok(Outcome { summary, ok: true })
}

fn verify(cfg: &RunConfig) -> Run {
    let p = ProblemParams::new(cfg.b, cfg.t)?;
    let opts = BuildOptions::with_rule(cfg.rule);
    let mut ok = true;
    let mut certificates = Vec::new();
    for kind in EnvelopeKind::ALL {
        let (rec, issued) = certificate_record(kind, &p, &opts);
        ok &= issued;
        certificates.push(rec);
    }
    let oracle = oracle_solve(&p, ORACLE_TOL, cfg.steps.unwrap_or(ORACLE_STEPS))?;
    let mut comparisons = Vec::new();
    for band in ["global", "partial"] {
        let Ok(built) = build_band(band, &p, &opts) else {
            comparisons.push(json!({ "band": band, "status": "skipped" }));
            continue;
        };
        let xs = built.eval_grid(cfg.grid_points)?;
        match compare_to_oracle(&built, &oracle, &xs) {
            Ok(c) => comparisons.push(json!({
                "band": band,
                "status": "ok",
                "points": c.points_checked,
                "max_width_y": jnum(c.max_width_y),
                "max_oracle_minus_lower_y": jnum(c.max_oracle_minus_lower_y),
                "max_upper_minus_oracle_y": jnum(c.max_upper_minus_oracle_y),
            })),
            Err(e) => {
                ok = false;
                comparisons.push(json!({ "band": band, "status": "violated", "error": e.kind(), "detail": e.to_string() }));
            }
        }
    }
    let summary = json!({
        "command": "verify",
        "params": params_json(&p),
        "iteration_rule": cfg.rule.name(),
        "delta_star": jnum(oracle.delta_star),
        "oracle_steps": oracle.steps,
        "certificates": certificates,
        "sandwich": comparisons,
    });
    Ok(Outcome { summary, ok })
}

fn report(cfg: &RunConfig) -> Run {
    let dir: &Path = cfg.out.as_deref().unwrap_or(Path::new("hcr-report"));
    let opts = BuildOptions::with_rule(cfg.rule);
    let mut files = Vec::new();

    let mut t = Table::new(vec!["lambda", "c0"]);
    for r in tables::fixed_point_rows(&tables::FIXED_POINT_LAMBDAS) {
        t.push(vec![r.lambda.into(), r.c0.into()]);
    }
    files.push(write_table(dir, "fixed_point", &t, cfg.format)?);

    let mut t = Table::new(vec!["b", "t", "B", "max_err_y", "log_ratio"]);
    for r in tables::shooting_rows(&tables::SHOOTING_PARAMS, cfg.steps.unwrap_or(TABLE_STEPS))? {
        t.push(vec![r.b.into(), r.t.into(), r.big_b.into(), r.max_err.into(), r.log_ratio.into()]);
    }
    files.push(write_table(dir, "shooting_error", &t, cfg.format)?);

    let w0_steps = cfg.steps.unwrap_or(W0_STEPS);
    let mut t = Table::new(vec!["b", "w_1", "u0_upper_1", "difference"]);
    for r in tables::limit_gamma_rows(&tables::LIMIT_GAMMA_B, w0_steps)? {
        t.push(vec![r.b.into(), r.w1.into(), r.u0p1.into(), r.diff.into()]);
    }
    files.push(write_table(dir, "limit_gamma", &t, cfg.format)?);

    let mut t = Table::new(vec!["b", "r_minus", "r_plus", "w_minus_1", "w_plus_1", "u0_upper_1"]);
    for r in tables::limit_seed_rows(&tables::LIMIT_SEED_B, w0_steps)? {
        t.push(vec![r.b.into(), r.r_minus.into(), r.r_plus.into(), r.w_minus.into(), r.w_plus.into(), r.u0p1.into()]);
    }
    files.push(write_table(dir, "limit_seeds", &t, cfg.format)?);

    let mut t = Table::new(vec![
        "b",
        "t",
        "B",
        "bt025",
        "global_width_y",
        "global_width_u",
        "partial_width_y",
        "partial_width_u",
        "partial_status",
        "delta_star",
        "sandwich_points",
    ]);
    for r in tables::band_rows(&tables::BAND_PARAMS, &opts, cfg.steps.unwrap_or(ORACLE_STEPS))? {
        let status = match &r.partial_error {
            None => "issued".to_string(),
            Some(e) => e.clone(),
        };
        t.push(vec![
            r.b.into(),
            r.t.into(),
            r.big_b.into(),
            r.bt025.into(),
            r.global_y.into(),
            r.global_u.into(),
            r.partial_y.into(),
            r.partial_u.into(),
            Cell::Text(status),
            r.delta_star.into(),
            r.sandwich_points.into(),
        ]);
    }
    files.push(write_table(dir, "band_widths", &t, cfg.format)?);

    let (b, tt) = tables::POINTWISE_PARAMS;
    let mut t = Table::new(vec!["x", "u_upper", "u_lower", "exact_decimals"]);
    for r in tables::pointwise_rows(b, tt, &tables::POINTWISE_EXPONENTS, &opts)? {
        t.push(vec![r.x.into(), r.u_upper.into(), r.u_lower.into(), r.exact_decimals.into()]);
    }
    files.push(write_table(dir, "pointwise_bounds", &t, cfg.format)?);

    let summary = json!({
        "command": "report",
        "iteration_rule": cfg.rule.name(),
        "files": files_json(&files),
    });
    Ok(Outcome { summary, ok: true })
}
