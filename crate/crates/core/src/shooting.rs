//! First-order shooting y'/√2 = B√(y⁵-5y+4+δ) from y(1) = T, and the δ-bisection oracle.
//!
//! The integration runs in s = 1 - x on w = y^{-3/2}, whose right-hand side is bounded. Near the
//! cold end the state is carried as m = 1 - w instead, so that y - 1 keeps its relative precision.

use crate::builders::derivative_bounds;
use crate::error::{Error, Result};
use crate::model::ProblemParams;
use crate::numerics::rk4_step;

pub const ORACLE_STEPS: usize = 200_000;
pub const TABLE_STEPS: usize = 20_000;
pub const ORACLE_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 100;

/// `y - 1` from m = 1 - y^{-3/2}.
fn gap_of_m(m: f64) -> f64 {
    (-(2.0 / 3.0) * (-m).ln_1p()).exp_m1()
}

/// y⁵ - 5y + 4 + δ, scaled by w^{10/3}.
fn radicand_w(w: f64, delta: f64) -> f64 {
    let w13 = w.max(0.0).cbrt();
    let w83 = w * w * w13 * w13;
    1.0 - 5.0 * w83 + (4.0 + delta) * w83 * w13 * w13
}

fn radicand_m(m: f64, delta: f64) -> f64 {
    if m > 0.5 {
        return radicand_w(1.0 - m, delta);
    }
    let e = gap_of_m(m);
    let y = 1.0 + e;
    let w103 = ((10.0 / 3.0) * (-m).ln_1p()).exp();
    w103 * (e * e * (((y + 2.0) * y + 3.0) * y + 4.0) + delta)
}

/// Integration state; `W` while w < 1/2, `M` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    W(f64),
    M(f64),
}

impl State {
    fn start(p: &ProblemParams) -> Self {
        let w = p.t().powf(1.5);
        if w < 0.5 {
            State::W(w)
        } else {
            State::M(-(1.5 * p.t().ln()).exp_m1())
        }
    }

    // 1 - w is exact for w in [1/2, 1]
    fn normalize(self) -> Self {
        match self {
            State::W(w) if w >= 0.5 => State::M(1.0 - w),
            State::M(m) if m > 0.5 => State::W(1.0 - m),
            s => s,
        }
    }

    fn gap(self) -> f64 {
        match self {
            State::W(w) => (-(2.0 / 3.0) * w.ln()).exp_m1(),
            State::M(m) => gap_of_m(m),
        }
    }

    fn y(self) -> f64 {
        match self {
            State::W(w) => 1.0 / (w * w).cbrt(),
            State::M(m) => 1.0 + gap_of_m(m),
        }
    }

    fn step(self, k: f64, delta: f64, s: f64, h: f64) -> Self {
        match self {
            State::W(w) => State::W(rk4_step(&|_, w: f64| k * radicand_w(w, delta).max(0.0).sqrt(), s, w, h)),
            State::M(m) => State::M(rk4_step(&|_, m: f64| -k * radicand_m(m, delta).max(0.0).sqrt(), s, m, h)),
        }
        .normalize()
    }
}

fn rate(p: &ProblemParams) -> f64 {
    1.5 * 2f64.sqrt() * p.big_b()
}

fn integrate(p: &ProblemParams, delta: f64, steps: usize, mut visit: impl FnMut(State)) -> State {
    let (k, h) = (rate(p), 1.0 / steps as f64);
    let mut st = State::start(p);
    visit(st);
    for i in 0..steps {
        st = st.step(k, delta, i as f64 * h, h);
        visit(st);
    }
    st
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult {
    pub delta: f64,
    /// `(x, y)` from x = 1 down to x = 0.
    pub samples: Vec<(f64, f64)>,
    pub terminal_y0: f64,
    /// `y(0) - 1`, accurate when y(0) is close to 1.
    pub terminal_gap: f64,
    pub blewup: bool,
}

impl ShootResult {
    pub fn max_y(&self) -> f64 {
        self.samples.first().map(|s| s.1).unwrap_or(f64::NAN)
    }
}

pub fn shoot(p: &ProblemParams, delta: f64, steps: usize) -> Result<ShootResult> {
    if !(delta >= 0.0) || steps == 0 {
        return Err(Error::InvalidParams(format!("shooting needs δ ≥ 0 and steps > 0 (δ = {delta})")));
    }
    let h = 1.0 / steps as f64;
    let mut samples = Vec::with_capacity(steps + 1);
    let end = integrate(p, delta, steps, |st| samples.push((1.0 - samples.len() as f64 * h, st.y())));
    let blewup = !end.y().is_finite();
    Ok(ShootResult { delta, samples, terminal_y0: end.y(), terminal_gap: end.gap(), blewup })
}

/// `y(0) - 1` without keeping the trajectory.
pub fn shoot_terminal_gap(p: &ProblemParams, delta: f64, steps: usize) -> f64 {
    integrate(p, delta, steps, |_| {}).gap()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketError {
    pub max_err: f64,
    /// ln(max_err)/B.
    pub log_ratio: f64,
    pub at_x: f64,
}

/// Largest gap between the δ = 0 and δ = Δ shots.
pub fn bracket_error(p: &ProblemParams, steps: usize) -> Result<BracketError> {
    let delta = derivative_bounds(p).delta;
    let plus = shoot(p, 0.0, steps)?;
    let minus = shoot(p, delta, steps)?;
    let (mut max_err, mut at_x) = (0.0, 1.0);
    for (a, b) in plus.samples.iter().zip(&minus.samples) {
        let e = a.1 - b.1;
        if e > max_err {
            max_err = e;
            at_x = a.0;
        }
    }
    // at x = 0 the gaps carry more digits than the differences of y
    let e0 = plus.terminal_gap - minus.terminal_gap;
    if e0 >= max_err {
        max_err = e0;
        at_x = 0.0;
    }
    Ok(BracketError { max_err, log_ratio: max_err.ln() / p.big_b(), at_x })
}

/// Reference solution from bisection on δ until y(0) = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Oracle {
    pub params: ProblemParams,
    pub delta_star: f64,
    pub steps: usize,
    pub tol: f64,
    nodes: Vec<State>,
}

impl Oracle {
    /// y at an arbitrary x, by one RK4 sub-step from the nearest node to the right.
    pub fn y_at(&self, x: f64) -> f64 {
        let s = (1.0 - x).clamp(0.0, 1.0);
        let h = 1.0 / self.steps as f64;
        let i = ((s / h).floor() as usize).min(self.steps);
        let si = i as f64 * h;
        let node = self.nodes[i];
        if s > si {
            node.step(rate(&self.params), self.delta_star, si, s - si).y()
        } else {
            node.y()
        }
    }

    pub fn terminal_gap(&self) -> f64 {
        self.nodes.last().expect("nonempty").gap()
    }

    pub fn trajectory(&self) -> ShootResult {
        let h = 1.0 / self.steps as f64;
        let samples = self.nodes.iter().enumerate().map(|(i, st)| (1.0 - i as f64 * h, st.y())).collect();
        let end = *self.nodes.last().expect("nonempty");
        ShootResult {
            delta: self.delta_star,
            samples,
            terminal_y0: end.y(),
            terminal_gap: end.gap(),
            blewup: false,
        }
    }
}

pub fn oracle_solve(p: &ProblemParams, tol: f64, steps: usize) -> Result<Oracle> {
    if !(tol > 0.0) || steps == 0 {
        return Err(Error::InvalidParams("oracle needs tol > 0 and steps > 0".into()));
    }
    let big_delta = derivative_bounds(p).delta;
    let g0 = shoot_terminal_gap(p, 0.0, steps);
    if g0 < -tol {
        return Err(Error::NoBracket { lo: 0.0, hi: big_delta });
    }
    let mut delta_star = 0.0;
    if big_delta >= 1e-300 && g0 > tol {
        let mut hi = big_delta;
        let g_hi = shoot_terminal_gap(p, hi, steps);
        if g_hi > tol {
            return Err(Error::NoBracket { lo: 0.0, hi });
        }
        let mut lo = 0.0;
        delta_star = hi;
        if g_hi.abs() > tol {
            for _ in 0..MAX_HALVINGS {
                let mid = 0.5 * (lo + hi);
                let g = shoot_terminal_gap(p, mid, steps);
                delta_star = mid;
                if g.abs() <= tol {
                    break;
                }
                if g > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    let mut nodes = Vec::with_capacity(steps + 1);
    integrate(p, delta_star, steps, |st| nodes.push(st));
    Ok(Oracle { params: *p, delta_star, steps, tol, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(b: f64, t: f64) -> ProblemParams {
        ProblemParams::new(b, t).unwrap()
    }

    #[test]
    fn radicand_forms_agree() {
        for &w in &[0.3f64, 0.5, 0.6, 0.9] {
            let direct = 1.0 - 5.0 * w.powf(8.0 / 3.0) + 4.01 * w.powf(10.0 / 3.0);
            assert!((radicand_m(1.0 - w, 0.01) - direct).abs() < 1e-12);
            assert!((radicand_w(w, 0.01) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn state_switch_is_exact() {
        let st = State::W(0.5).normalize();
        assert_eq!(st, State::M(0.5));
        assert!((State::M(0.75).y() - State::W(0.25).normalize().y()).abs() < 1e-15);
        assert_eq!(State::M(0.75).normalize(), State::W(0.25));
    }

    #[test]
    fn gap_is_step_independent_near_one() {
        let p = pp(30.0, 0.7);
        let d = derivative_bounds(&p).delta;
        let a = shoot_terminal_gap(&p, d, 2000);
        let b = shoot_terminal_gap(&p, d, 200_000);
        assert!((a / b - 1.0).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn shots_bracket_one() {
        let p = pp(10.0, 0.3);
        let d = derivative_bounds(&p).delta;
        let plus = shoot(&p, 0.0, TABLE_STEPS).unwrap();
        let minus = shoot(&p, d, TABLE_STEPS).unwrap();
        assert!(plus.terminal_y0 >= 1.0);
        assert!(minus.terminal_y0 <= 1.0);
        assert_eq!(plus.samples[0], (1.0, plus.samples[0].1));
        assert!((plus.samples[0].1 - p.big_t()).abs() < 1e-12 * p.big_t());
        assert!(plus.samples.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 <= w[0].1));
    }

    #[test]
    fn error_shrinks_toward_x1() {
        let p = pp(10.0, 0.3);
        let d = derivative_bounds(&p).delta;
        let plus = shoot(&p, 0.0, TABLE_STEPS).unwrap();
        let minus = shoot(&p, d, TABLE_STEPS).unwrap();
        let errs: Vec<f64> = plus.samples.iter().zip(&minus.samples).map(|(a, b)| a.1 - b.1).collect();
        assert!(errs.windows(2).all(|w| w[1] >= w[0] - 1e-13));
        let be = bracket_error(&p, TABLE_STEPS).unwrap();
        assert_eq!(be.at_x, 0.0);
        assert!(be.log_ratio <= -3.0);
    }

    #[test]
    fn oracle_is_bracketed() {
        let p = pp(10.0, 0.3);
        let d = derivative_bounds(&p).delta;
        let o = oracle_solve(&p, ORACLE_TOL, TABLE_STEPS).unwrap();
        assert!(o.delta_star >= 0.0 && o.delta_star <= d);
        assert!(o.terminal_gap().abs() <= ORACLE_TOL);
        let plus = shoot(&p, 0.0, TABLE_STEPS).unwrap();
        let minus = shoot(&p, d, TABLE_STEPS).unwrap();
        let tr = o.trajectory();
        for ((a, b), c) in plus.samples.iter().zip(&minus.samples).zip(&tr.samples) {
            assert!(b.1 <= c.1 && c.1 <= a.1);
        }
        assert!((o.y_at(0.5) - tr.samples[TABLE_STEPS / 2].1).abs() < 1e-14);
        let mid = o.y_at(0.5 + 0.3 / TABLE_STEPS as f64);
        assert!(mid >= o.y_at(0.5) && mid <= o.y_at(0.5 + 1.0 / TABLE_STEPS as f64));
    }

    #[test]
    fn oracle_short_circuits() {
        let p = pp(500.0, 0.5);
        let o = oracle_solve(&p, ORACLE_TOL, 2000).unwrap();
        assert_eq!(o.delta_star, 0.0);
    }

    #[test]
    fn step_halving_is_stable() {
        let p = pp(10.0, 0.3);
        let a = bracket_error(&p, TABLE_STEPS).unwrap().max_err;
        let b = bracket_error(&p, TABLE_STEPS / 2).unwrap().max_err;
        assert!((a - b).abs() < 0.01 * a);
    }
}
