//! Parameter sweeps over the standard cases; rows are computed in parallel.

use rayon::prelude::*;

use crate::builders::{boundary_layer, spec_for, BuildOptions, EnvelopeBand, BAND_POINTS};
use crate::error::Result;
use crate::limit_zero::{seed_terminals, u0_upper, w0_integrate};
use crate::model::{Envelope, EnvelopeKind, ProblemParams};
use crate::shooting::{bracket_error, oracle_solve, ORACLE_TOL};
use crate::transcendental::{fixed_point_c0, C0_ITERATIONS};
use crate::verification::compare_to_oracle;

pub const FIXED_POINT_LAMBDAS: [f64; 6] = [1.0, 1.1, 1.5, 1.67, 2.0, 5.0];
pub const SHOOTING_PARAMS: [(f64, f64); 3] = [(10.0, 0.3), (55.0, 0.1), (30.0, 0.7)];
pub const LIMIT_GAMMA_B: [f64; 8] = [10.0, 30.0, 70.0, 100.0, 500.0, 1000.0, 5e4, 1e5];
pub const LIMIT_SEED_B: [f64; 10] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10];
pub const BAND_PARAMS: [(f64, f64); 5] = [(500.0, 0.1), (700.0, 0.2), (5000.0, 0.01), (1e4, 0.005), (1e6, 2e-4)];
pub const POINTWISE_PARAMS: (f64, f64) = (500.0, 0.1);
pub const POINTWISE_EXPONENTS: [i32; 5] = [2, 4, 6, 8, 10];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointRow {
    pub lambda: f64,
    pub c0: f64,
}

pub fn fixed_point_rows(lambdas: &[f64]) -> Vec<FixedPointRow> {
    lambdas
        .iter()
        .map(|&lambda| FixedPointRow { lambda, c0: fixed_point_c0(lambda, C0_ITERATIONS).c0 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingRow {
    pub b: f64,
    pub t: f64,
    pub big_b: f64,
    pub max_err: f64,
    pub log_ratio: f64,
}

pub fn shooting_rows(params: &[(f64, f64)], steps: usize) -> Result<Vec<ShootingRow>> {
    params
        .par_iter()
        .map(|&(b, t)| {
            let p = ProblemParams::new(b, t)?;
            let e = bracket_error(&p, steps)?;
            Ok(ShootingRow { b, t, big_b: p.big_b(), max_err: e.max_err, log_ratio: e.log_ratio })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitGammaRow {
    pub b: f64,
    pub w1: f64,
    pub u0p1: f64,
    pub diff: f64,
}

pub fn limit_gamma_rows(bs: &[f64], steps: usize) -> Result<Vec<LimitGammaRow>> {
    bs.par_iter()
        .map(|&b| {
            let w1 = w0_integrate(b, -10.0 / 3.0, steps)?.terminal;
            let u0p1 = u0_upper(b, 1.0);
            Ok(LimitGammaRow { b, w1, u0p1, diff: u0p1 - w1 })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSeedRow {
    pub b: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub w_minus: f64,
    pub w_plus: f64,
    pub u0p1: f64,
}

pub fn limit_seed_rows(bs: &[f64], steps: usize) -> Result<Vec<LimitSeedRow>> {
    bs.par_iter()
        .map(|&b| {
            let s = seed_terminals(b, steps)?;
            Ok(LimitSeedRow {
                b,
                r_minus: s.r_minus,
                r_plus: s.r_plus,
                w_minus: s.w_minus,
                w_plus: s.w_plus,
                u0p1: u0_upper(b, 1.0),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandRow {
    pub b: f64,
    pub t: f64,
    pub big_b: f64,
    pub bt025: f64,
    pub global_y: f64,
    pub global_u: f64,
    pub partial_y: Option<f64>,
    pub partial_u: Option<f64>,
    /// Why the partial band is missing, if it is.
    pub partial_error: Option<String>,
    pub delta_star: f64,
    /// Grid points at which lower ≤ oracle ≤ upper was confirmed.
    pub sandwich_points: usize,
}

/// Band widths plus the sandwich check against the shooting oracle; a failed sandwich is an error.
pub fn band_row(b: f64, t: f64, opts: &BuildOptions, oracle_steps: usize, points: usize) -> Result<BandRow> {
    let p = ProblemParams::new(b, t)?;
    let oracle = oracle_solve(&p, ORACLE_TOL, oracle_steps)?;
    let global = EnvelopeBand::global(&p, opts)?;
    let xs = global.eval_grid(points)?;
    let g = compare_to_oracle(&global, &oracle, &xs)?;
    let mut sandwich_points = g.points_checked;
    let (partial_y, partial_u, partial_error) = match EnvelopeBand::partial(&p, opts) {
        Ok(band) => {
            let xs = band.eval_grid(points)?;
            let c = compare_to_oracle(&band, &oracle, &xs)?;
            sandwich_points += c.points_checked;
            let w = band.max_width(points)?;
            (Some(w), Some(t * w), None)
        }
        Err(e) => (None, None, Some(e.to_string())),
    };
    let global_y = global.max_width(points)?;
    Ok(BandRow {
        b,
        t,
        big_b: p.big_b(),
        bt025: boundary_layer(&p).value,
        global_y,
        global_u: t * global_y,
        partial_y,
        partial_u,
        partial_error,
        delta_star: oracle.delta_star,
        sandwich_points,
    })
}

pub fn band_rows(params: &[(f64, f64)], opts: &BuildOptions, oracle_steps: usize) -> Result<Vec<BandRow>> {
    params.par_iter().map(|&(b, t)| band_row(b, t, opts, oracle_steps, BAND_POINTS)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseRow {
    /// Distance from the cold end, in the original coordinate of u.
    pub x: f64,
    pub u_upper: f64,
    pub u_lower: f64,
    pub exact_decimals: usize,
}

/// Largest d such that a and b agree when truncated to d decimals.
pub fn exact_decimals(a: f64, b: f64) -> usize {
    let mut d = 0;
    while d < 17 {
        let s = 10f64.powi(d as i32 + 1);
        if (a * s).floor() != (b * s).floor() {
            break;
        }
        d += 1;
    }
    d
}

/// t·y₊ and t·y₋ from the partial envelopes at x = 10^{-k}.
pub fn pointwise_rows(b: f64, t: f64, exponents: &[i32], opts: &BuildOptions) -> Result<Vec<PointwiseRow>> {
    let p = ProblemParams::new(b, t)?;
    let up = Envelope::new(spec_for(EnvelopeKind::PartialUpper, &p, opts)?, p);
    let lo = Envelope::new(spec_for(EnvelopeKind::PartialLower, &p, opts)?, p);
    exponents
        .iter()
        .map(|&k| {
            let x = 10f64.powi(-k);
            let u_upper = t * up.y_at_s(x)?;
            let u_lower = t * lo.y_at_s(x)?;
            Ok(PointwiseRow { x, u_upper, u_lower, exact_decimals: exact_decimals(u_upper, u_lower) })
        })
        .collect()
}
