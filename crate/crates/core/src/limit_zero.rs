//! The t = 0 problem u'' = b²u⁴, u(0) = 1, u(1) = 0: the closed-form upper envelope,
//! the Γ-approximation w' = -(√2b/√5)√(w⁵+Γ), and bracketing of the exponent r.

use crate::error::{Error, Result};
use crate::numerics::{bisect, rk4_on_grid, Grid};

pub const W0_STEPS: usize = 20_000;
pub const TOL_R: f64 = 1e-7;
pub const RHO_MINUS: f64 = 2.84;
pub const RHO_PLUS: f64 = 2.8;
const WIDEN_ATTEMPTS: usize = 10;

/// 1.5√2·b/√5.
fn slope_scale(b: f64) -> f64 {
    1.5 * 2f64.sqrt() * b / 5f64.sqrt()
}

/// ũ₀₊(x) = [1 + (1.5√2/√5)·b·x]^{-2/3}.
pub fn u0_upper(b: f64, x: f64) -> f64 {
    (1.0 + slope_scale(b) * x).powf(-2.0 / 3.0)
}

/// Γ = (1 + 1.5√2·b/√5)^{-10/3}.
pub fn gamma_of_b(b: f64) -> f64 {
    gamma_r(b, -10.0 / 3.0)
}

/// (1 + 1.5√2·b/√5)^r.
pub fn gamma_r(b: f64, r: f64) -> f64 {
    (r * slope_scale(b).ln_1p()).exp()
}

/// Seed exponent -10/3 + ρ/ln b.
pub fn seed_r(b: f64, rho: f64) -> f64 {
    -10.0 / 3.0 + rho / b.ln()
}

fn grid_for(b: f64, steps: usize) -> Result<Grid> {
    let k = 2f64.sqrt() * b / 5f64.sqrt();
    Grid::graded(steps + 1, (1.0 + 1.5 * k).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct W0Result {
    pub terminal: f64,
    pub xs: Vec<f64>,
    pub ws: Vec<f64>,
}

/// Integrates w' = -(√2b/√5)√(w⁵+γ) from w(0) = 1 to x = 1 on a grid graded toward x = 0.
pub fn integrate_with_gamma(b: f64, gamma: f64, steps: usize) -> Result<W0Result> {
    if !(b > 0.0) || steps == 0 {
        return Err(Error::InvalidParams("need b > 0 and steps > 0".into()));
    }
    let k = 2f64.sqrt() * b / 5f64.sqrt();
    let grid = grid_for(b, steps)?;
    let traj = rk4_on_grid(move |_x, w: f64| -k * (w.powi(5) + gamma).max(0.0).sqrt(), grid.points(), 1.0)?;
    Ok(W0Result { terminal: traj.terminal(), xs: traj.xs, ws: traj.ys })
}

pub fn w0_integrate(b: f64, exponent_r: f64, steps: usize) -> Result<W0Result> {
    if !(exponent_r < 0.0) {
        return Err(Error::InvalidParams(format!("exponent r = {exponent_r} must be negative")));
    }
    integrate_with_gamma(b, gamma_r(b, exponent_r), steps)
}

fn w0_terminal(b: f64, r: f64, steps: usize) -> Result<f64> {
    Ok(w0_integrate(b, r, steps)?.terminal)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedTerminals {
    pub r_minus: f64,
    pub r_plus: f64,
    pub w_minus: f64,
    pub w_plus: f64,
}

/// Terminal values at the seeds with ρ₋ = 2.84 and ρ₊ = 2.8.
pub fn seed_terminals(b: f64, steps: usize) -> Result<SeedTerminals> {
    let r_minus = seed_r(b, RHO_MINUS);
    let r_plus = seed_r(b, RHO_PLUS);
    Ok(SeedTerminals {
        r_minus,
        r_plus,
        w_minus: w0_terminal(b, r_minus, steps)?,
        w_plus: w0_terminal(b, r_plus, steps)?,
    })
}

/// Exponents whose integrations end below and above zero.
///
/// A larger r means a larger Γ and a faster descent, so `r_lower` exceeds `r_upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitZeroResult {
    pub b: f64,
    pub gamma: f64,
    pub r_lower: f64,
    pub r_upper: f64,
    pub w_terminal_lower: f64,
    pub w_terminal_upper: f64,
    pub u0p_terminal: f64,
    pub seeds: SeedTerminals,
    /// b is under 16, where the seeds are known to be unreliable.
    pub below_recommended: bool,
}

impl LimitZeroResult {
    /// Largest possible gap between the two integrations, attained at x = 1.
    pub fn width(&self) -> f64 {
        self.w_terminal_upper - self.w_terminal_lower
    }
}

pub fn bracket_r(b: f64, tol_r: f64, steps: usize) -> Result<LimitZeroResult> {
    if !(b > 1.0) {
        return Err(Error::InvalidParams(format!("r-bracketing needs b > 1 (got {b})")));
    }
    if !(tol_r > 0.0) {
        return Err(Error::InvalidParams("tol_r must be positive".into()));
    }
    let seeds = seed_terminals(b, steps)?;
    let (mut r_lo_env, mut r_up_env) = (seeds.r_minus, seeds.r_plus);
    let (mut w_lo, mut w_up) = (seeds.w_minus, seeds.w_plus);
    let center = seed_r(b, RHO_PLUS);
    let mut half = (RHO_MINUS - RHO_PLUS) / b.ln();
    let mut attempts = 0;
    while !(w_lo < 0.0 && w_up > 0.0) {
        if attempts == WIDEN_ATTEMPTS {
            return Err(Error::NoBracket { lo: r_up_env, hi: r_lo_env });
        }
        half *= 2.0;
        r_lo_env = center + half;
        r_up_env = (center - half).min(-1e-12);
        w_lo = w0_terminal(b, r_lo_env, steps)?;
        w_up = w0_terminal(b, r_up_env, steps)?;
        attempts += 1;
    }
    while r_lo_env - r_up_env > tol_r {
        let mid = 0.5 * (r_lo_env + r_up_env);
        if mid <= r_up_env || mid >= r_lo_env {
            break;
        }
        let w = w0_terminal(b, mid, steps)?;
        if !(w >= w_lo && w <= w_up) {
            return Err(Error::Degenerate(format!("w(1) is not monotone in r near r = {mid}")));
        }
        if w < 0.0 {
            r_lo_env = mid;
            w_lo = w;
        } else {
            r_up_env = mid;
            w_up = w;
        }
    }
    Ok(LimitZeroResult {
        b,
        gamma: gamma_of_b(b),
        r_lower: r_lo_env,
        r_upper: r_up_env,
        w_terminal_lower: w_lo,
        w_terminal_upper: w_up,
        u0p_terminal: u0_upper(b, 1.0),
        seeds,
        below_recommended: b < 16.0,
    })
}

/// Reference u₀ from bisection on γ until u(1) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct U0Oracle {
    pub gamma: f64,
    pub solution: W0Result,
}

pub fn u0_oracle(b: f64, steps: usize) -> Result<U0Oracle> {
    let terminal = |lg: f64| integrate_with_gamma(b, lg.exp(), steps).map(|r| r.terminal).unwrap_or(f64::NAN);
    let lo = (gamma_of_b(b) * 1e-3).ln();
    let mut hi = (gamma_of_b(b) * 1e3).ln();
    let mut tries = 0;
    while terminal(hi) >= 0.0 && tries < 20 {
        hi += 5.0;
        tries += 1;
    }
    let lg = bisect(terminal, lo, hi, 1e-15)?;
    Ok(U0Oracle { gamma: lg.exp(), solution: integrate_with_gamma(b, lg.exp(), steps)? })
}
