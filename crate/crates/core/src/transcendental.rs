//! The fixed point c₀(Λ) of c = tanh(Λc), the root of ζ = rhs(c), its explicit
//! brackets, and the reduction of the C-equation to that root problem.

use crate::error::{Error, Result};
use crate::numerics::{atanh_safe, bisect, sech2, tanh_gap, tanh_sum_unit, SaturatingArg, UnitValue};

pub const C0_ITERATIONS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub lambda: f64,
    pub c0: f64,
    /// `1 - c0`, kept separately once `c0` rounds to 1.
    pub gap: f64,
    pub iterations: usize,
}

impl FixedPoint {
    pub fn unit(&self) -> UnitValue {
        if self.c0 < 0.5 {
            UnitValue::Direct(self.c0)
        } else {
            UnitValue::complement(self.gap)
        }
    }
}

/// `iters` iterations of `c ↦ tanh(Λc)` from `c = 1`; an upper bound for c₀(Λ).
pub fn fixed_point_c0(lambda: f64, iters: usize) -> FixedPoint {
    if lambda > 40.0 {
        let gap = 2.0 * (-2.0 * lambda).exp();
        return FixedPoint { lambda, c0: 1.0 - gap, gap, iterations: iters };
    }
    let mut c = 1.0f64;
    let mut gap = 0.0;
    for _ in 0..iters {
        let a = lambda * c;
        gap = tanh_gap(a);
        c = a.tanh();
    }
    FixedPoint { lambda, c0: c, gap, iterations: iters }
}

/// The true fixed point: 0 for Λ ≤ 1.
pub fn fixed_point_exact(lambda: f64) -> FixedPoint {
    if lambda <= 1.0 {
        return FixedPoint { lambda, c0: 0.0, gap: 1.0, iterations: 0 };
    }
    if lambda >= 3.0 {
        // contraction factor Λ sech²(Λc₀) is below 0.03 here
        return fixed_point_c0(lambda, 200);
    }
    let c = bisect(|c| (lambda * c).tanh() - c, 1e-12, 1.0, 1e-16).unwrap_or(0.0);
    FixedPoint { lambda, c0: c, gap: 1.0 - c, iterations: 0 }
}

/// `c (1 - c tanh(Λc)) / (c - tanh(Λc))`.
pub fn rhs(c: f64, lambda: f64) -> f64 {
    if c < 0.5 {
        let th = (lambda * c).tanh();
        return c * (1.0 - c * th) / (c - th);
    }
    rhs_gap(1.0 - c, lambda)
}

/// `rhs(1 - g)` evaluated through complements.
pub fn rhs_gap(g: f64, lambda: f64) -> f64 {
    let c = 1.0 - g;
    let gth = tanh_gap(lambda * c);
    c * (g + c * gth) / (gth - g)
}

fn check_pair(zeta: f64, lambda: f64) -> Result<()> {
    if !(zeta > 1.0 && zeta.is_finite()) {
        return Err(Error::Precondition(format!("ζ = {zeta} must exceed 1")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("Λ = {lambda} must be positive")));
    }
    if lambda < 1.0 && zeta >= 1.0 / (1.0 - lambda) {
        return Err(Error::Precondition(format!(
            "no root: ζ = {zeta} ≥ 1/(1-Λ) = {}",
            1.0 / (1.0 - lambda)
        )));
    }
    Ok(())
}

/// Unique root of ζ = rhs(c), complement-aware.
pub fn solve_c_exact_unit(zeta: f64, lambda: f64, tol: f64) -> Result<UnitValue> {
    check_pair(zeta, lambda)?;
    let fp = fixed_point_exact(lambda);
    if fp.c0 > 0.5 {
        // work with ln(1 - c); rhs grows with the gap
        let g_hi = fp.gap * (1.0 - 1e-9);
        let lo = (f64::MIN_POSITIVE * 1e10).ln();
        let u = bisect(|u| rhs_gap(u.exp(), lambda) - zeta, lo, g_hi.ln(), tol.min(1e-13))?;
        return Ok(UnitValue::complement(u.exp()));
    }
    let c_lo = if lambda > 1.0 { fp.c0 + 1e-9 * (1.0 - fp.c0) } else { 1e-12 };
    let c = bisect(|c| rhs(c, lambda) - zeta, c_lo, 1.0 - 1e-16, tol)?;
    Ok(if c < 0.5 { UnitValue::Direct(c) } else { UnitValue::complement(1.0 - c) })
}

pub fn solve_c_exact(zeta: f64, lambda: f64, tol: f64) -> Result<f64> {
    solve_c_exact_unit(zeta, lambda, tol).map(UnitValue::value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SmallLambda,
    LargeLambda,
    VeryLargeLambda,
}

/// Explicit bounds around the root of ζ = rhs(c).
///
/// Numerically `c_minus ≤ c ≤ c_plus`; `c_lower`/`c_upper` give the ordered pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranscendentalBounds {
    pub zeta: f64,
    pub lambda: f64,
    pub c_minus: UnitValue,
    pub c_plus: UnitValue,
    pub regime: Regime,
}

impl TranscendentalBounds {
    pub fn c_lower(&self) -> f64 {
        self.c_minus.value().min(self.c_plus.value())
    }

    pub fn c_upper(&self) -> f64 {
        self.c_minus.value().max(self.c_plus.value())
    }

    /// Containment test carried out on the distances to 1.
    pub fn contains(&self, c: UnitValue) -> bool {
        let (gm, gp, g) = (self.c_minus.gap(), self.c_plus.gap(), c.gap());
        let (g_small, g_large) = if gm < gp { (gm, gp) } else { (gp, gm) };
        g >= g_small * (1.0 - 1e-12) - 1e-300 && g <= g_large * (1.0 + 1e-12)
    }
}

fn tanh_of(arg: f64) -> Result<UnitValue> {
    Ok(SaturatingArg::new(arg)?.tanh())
}

/// Bounds for Λ ∈ [1.5, 5], also the fallback for very large Λ with ζ > e^Λ.
pub fn bound_c_moderate(zeta: f64, lambda: f64, iters: usize) -> Result<TranscendentalBounds> {
    check_pair(zeta, lambda)?;
    let fp = fixed_point_c0(lambda, iters);
    let lc0 = lambda * fp.c0;
    let c_minus = tanh_sum_unit(lc0, atanh_safe(UnitValue::Direct(fp.c0 / zeta))?);
    let den = 1.0 - lambda * sech2(lc0);
    if !(den > 0.0) {
        return Err(Error::Regime(format!("1 - Λ sech²(Λc₀) = {den} at Λ = {lambda}")));
    }
    let c_plus = tanh_sum_unit(lc0, atanh_safe(UnitValue::Direct(1.0 / zeta))? / den);
    Ok(TranscendentalBounds { zeta, lambda, c_minus, c_plus, regime: Regime::LargeLambda })
}

/// Bounds for Λ ≥ 5 with ζ ≤ e^Λ, where c₀ is replaced by tanh Λ.
pub fn bound_c_very_large(zeta: f64, lambda: f64) -> Result<TranscendentalBounds> {
    check_pair(zeta, lambda)?;
    if lambda < 5.0 {
        return Err(Error::Regime(format!("Λ = {lambda} below 5")));
    }
    if lambda < 700.0 && zeta > lambda.exp() {
        return Err(Error::Regime(format!("ζ = {zeta} exceeds e^Λ")));
    }
    let th = lambda.tanh();
    let c_minus = tanh_sum_unit(lambda * th, atanh_safe(UnitValue::Direct(th / zeta))?);
    let s2 = sech2(lambda);
    let den = 1.0 - lambda * s2;
    let num = atanh_safe(UnitValue::Direct(1.0 / zeta))? + lambda * (th - lambda * s2);
    let c_plus = tanh_of(num / den)?;
    Ok(TranscendentalBounds { zeta, lambda, c_minus, c_plus, regime: Regime::VeryLargeLambda })
}

/// Smaller root in c² of (ζ-1)/Λ = (ζ-c²)(1 - ρΛ²c²).
pub fn c_rho(zeta: f64, lambda: f64, rho: f64) -> Result<f64> {
    let num = 2.0 * (1.0 + zeta * (lambda - 1.0)) / lambda;
    let a = rho * zeta * lambda * lambda;
    let den = (1.0 + a) + ((1.0 - a).powi(2) + 4.0 * rho * lambda * (zeta - 1.0)).sqrt();
    if !(num >= 0.0) {
        return Err(Error::Regime(format!("negative radicand in c_ρ at ζ = {zeta}, Λ = {lambda}")));
    }
    Ok((num / den).sqrt())
}

/// Bounds for Λ < 1.5 from the quartic model of tanh.
pub fn bound_c_small(zeta: f64, lambda: f64) -> Result<TranscendentalBounds> {
    check_pair(zeta, lambda)?;
    let c35 = c_rho(zeta, lambda, 0.35)?.min(1.0);
    let c05 = c_rho(zeta, lambda, 0.05)?.min(1.0);
    let c_minus = tanh_sum_unit(lambda * c35, atanh_safe(UnitValue::Direct(c35 / zeta))?);
    let x = lambda * c05;
    let s2 = sech2(x);
    let den = 1.0 - lambda * s2;
    if !(den > 0.0) {
        return Err(Error::Regime(format!("1 - Λ sech²(Λc) = {den} at Λ = {lambda}")));
    }
    let num = atanh_safe(UnitValue::Direct(c05 / zeta))? + lambda * (x.tanh() - x * s2);
    let c_plus = tanh_of(num / den)?;
    Ok(TranscendentalBounds { zeta, lambda, c_minus, c_plus, regime: Regime::SmallLambda })
}

/// Regime dispatch; very large Λ with ζ > e^Λ falls back to the moderate formulas.
pub fn bound_c(zeta: f64, lambda: f64) -> Result<TranscendentalBounds> {
    check_pair(zeta, lambda)?;
    if lambda < 1.5 {
        bound_c_small(zeta, lambda)
    } else if lambda < 5.0 {
        bound_c_moderate(zeta, lambda, C0_ITERATIONS)
    } else {
        match bound_c_very_large(zeta, lambda) {
            Err(Error::Regime(_)) => bound_c_moderate(zeta, lambda, C0_ITERATIONS),
            other => other,
        }
    }
}

/// `(z1 - αC)/(z1 + βC) = (z0 - αC)/(z0 + βC) · e^{2LC}` in the unknown C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CEquationParams {
    pub z0: f64,
    pub z1: f64,
    pub big_l: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl CEquationParams {
    pub fn new(z0: f64, z1: f64, big_l: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(z0 > 0.0 && z1 > z0 && big_l > 0.0 && alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidParams(format!(
                "C-equation needs z1 > z0 > 0, L > 0, α, β > 0 (got z0={z0}, z1={z1}, L={big_l}, α={alpha}, β={beta})"
            )));
        }
        Ok(CEquationParams { z0, z1, big_l, alpha, beta })
    }

    /// Log-form residual; zero at a solution.
    pub fn residual(&self, big_c: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        ((self.z1 - a * big_c) / (self.z1 + b * big_c)).ln()
            - ((self.z0 - a * big_c) / (self.z0 + b * big_c)).ln()
            - 2.0 * self.big_l * big_c
    }

    pub fn lambda_minus(&self) -> f64 {
        self.z0 * self.big_l / self.beta
    }

    pub fn lambda_plus(&self) -> f64 {
        self.z0 * self.big_l / self.alpha
    }
}

/// Substitution constants evaluated at a given C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CReduction {
    pub zeta: f64,
    pub lambda: f64,
    pub c: f64,
}

pub fn reduce_c_equation(p: &CEquationParams, big_c: f64) -> CReduction {
    let shift = 0.5 * (p.beta - p.alpha) * big_c;
    let zeta0 = p.z0 + shift;
    let zeta1 = p.z1 + shift;
    CReduction {
        zeta: zeta1 / zeta0,
        lambda: 2.0 * zeta0 * p.big_l / (p.beta + p.alpha),
        c: (p.beta + p.alpha) * big_c / (2.0 * zeta0),
    }
}

/// `C = 2 z0 c / ((β+α) - (β-α) c)`.
pub fn c_to_big_c(p: &CEquationParams, c: UnitValue) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    match c {
        UnitValue::Complement { negative: false, gap } => {
            2.0 * p.z0 * (1.0 - gap) / (2.0 * a + (b - a) * gap)
        }
        _ => {
            let c = c.value();
            2.0 * p.z0 * c / ((b + a) - (b - a) * c)
        }
    }
}

/// `(ζ₋, ζ₊)` feeding the c₋ bound at Λ = z0L/β and the c₊ bound at Λ = z0L/α.
pub fn zeta_plus_minus(p: &CEquationParams, c0_iters: usize) -> (f64, f64) {
    let c0 = fixed_point_c0(p.lambda_minus(), c0_iters).c0;
    let sm = (p.beta - p.alpha) * p.z0 / (2.0 * p.beta) * c0;
    let sp = (p.beta - p.alpha) * p.z0 / (2.0 * p.alpha);
    ((p.z1 + sm) / (p.z0 + sm), (p.z1 + sp) / (p.z0 + sp))
}

/// Direct bisection on the C-equation over (0, z0/α).
pub fn solve_c_equation_exact(p: &CEquationParams) -> Result<f64> {
    let c_max = p.z0 / p.alpha;
    let slope0 = (p.alpha + p.beta) * (1.0 / p.z0 - 1.0 / p.z1) - 2.0 * p.big_l;
    if slope0 >= 0.0 {
        return Err(Error::NoRoot("only the trivial solution C = 0 exists".into()));
    }
    let mut lo = c_max * 1e-6;
    while p.residual(lo) >= 0.0 && lo > 1e-300 {
        lo *= 1e-3;
    }
    let hi = c_max * (1.0 - 1e-15);
    bisect(|c| p.residual(c), lo, hi, c_max * 1e-16)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_truncated_values() {
        let v = |l| fixed_point_c0(l, C0_ITERATIONS).c0;
        assert!(v(1.0) <= 0.25);
        assert!(fixed_point_c0(1.0, 60).c0 < v(1.0));
        let trunc = |l| (v(l) * 100.0).floor() / 100.0;
        assert_eq!(trunc(1.10), 0.50);
        assert_eq!(trunc(1.50), 0.85);
        assert_eq!(trunc(1.67), 0.90);
        assert_eq!(trunc(2.0), 0.95);
        assert!(v(5.0) > 0.999);
        let fp = fixed_point_c0(45.0, 30);
        assert!(fp.gap > 0.0 && fp.gap < 1e-38);
    }

    #[test]
    fn c0_monotone() {
        let mut prev = 0.0;
        for i in 1..200 {
            let c = fixed_point_c0(0.1 * i as f64, 30).c0;
            assert!(c >= prev);
            prev = c;
        }
        for l in [1.2, 1.7, 3.0] {
            let a = fixed_point_c0(l, 10).c0;
            let b = fixed_point_c0(l, 20).c0;
            assert!(b <= a);
            assert!(b >= fixed_point_exact(l).c0 - 1e-15);
        }
    }

    #[test]
    fn exact_fixed_point() {
        assert_eq!(fixed_point_exact(0.7).c0, 0.0);
        for l in [1.1, 1.5, 2.0, 4.0, 10.0] {
            let fp = fixed_point_exact(l);
            assert!(((l * fp.c0).tanh() - fp.c0).abs() <= 1e-12, "Λ = {l}");
        }
    }

    #[test]
    fn exact_root_solves_equation() {
        for &(z, l) in &[(2.0, 2.0), (1.5, 0.5), (1.5, 0.8), (3.0, 1.0), (7.0, 3.0)] {
            let c = solve_c_exact(z, l, 1e-15).unwrap();
            assert!(c > 0.0 && c < 1.0);
            assert!(((rhs(c, l) - z) / z).abs() < 1e-6, "ζ={z} Λ={l}");
        }
        let c = solve_c_exact(2.0, 2.0, 1e-15).unwrap();
        assert!(c > 0.95 && c < 1.0);
        let u = solve_c_exact_unit(5.0, 30.0, 1e-14).unwrap();
        assert!(u.gap() > 0.0 && u.gap() < fixed_point_exact(30.0).gap);
    }

    #[test]
    fn root_preconditions() {
        assert!(matches!(solve_c_exact(2.5, 0.5, 1e-12), Err(Error::Precondition(_))));
        assert!(matches!(solve_c_exact(0.9, 2.0, 1e-12), Err(Error::Precondition(_))));
        assert!(matches!(bound_c(2.0, 0.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn regimes() {
        assert_eq!(bound_c(2.0, 2.0).unwrap().regime, Regime::LargeLambda);
        assert_eq!(bound_c(5f64.exp(), 10.0).unwrap().regime, Regime::VeryLargeLambda);
        assert_eq!(bound_c(1.5, 0.8).unwrap().regime, Regime::SmallLambda);
        assert!(matches!(bound_c_very_large(200.0, 5.0), Err(Error::Regime(_))));
        assert_eq!(bound_c(200.0, 5.0).unwrap().regime, Regime::LargeLambda);
    }

    #[test]
    fn bracket_examples() {
        let b = bound_c(2.0, 2.0).unwrap();
        let c = solve_c_exact_unit(2.0, 2.0, 1e-15).unwrap();
        assert!(b.contains(c));
        assert!(b.c_upper() - b.c_lower() < 0.05);
        assert!(b.c_minus.value() <= b.c_plus.value());

        let b = bound_c(5f64.exp(), 10.0).unwrap();
        assert!(b.contains(solve_c_exact_unit(5f64.exp(), 10.0, 1e-15).unwrap()));

        let c = solve_c_exact(1.5, 0.8, 1e-15).unwrap();
        assert!(c_rho(1.5, 0.8, 0.35).unwrap() < c && c < c_rho(1.5, 0.8, 0.05).unwrap());
        assert!(bound_c(1.5, 0.8).unwrap().contains(UnitValue::Direct(c)));
    }

    #[test]
    fn bracket_containment_grid() {
        let mut checked = 0;
        for i in 0..20 {
            let z = 1.1 + (10.0 - 1.1) * i as f64 / 19.0;
            for j in 0..20 {
                let l = 1.2 + (40.0 - 1.2) * j as f64 / 19.0;
                let b = bound_c(z, l).unwrap();
                let c = solve_c_exact_unit(z, l, 1e-15).unwrap();
                assert!(b.contains(c), "ζ={z} Λ={l} {b:?} {c:?}");
                checked += 1;
            }
        }
        assert_eq!(checked, 400);
    }

    #[test]
    fn small_lambda_containment() {
        for i in 0..20 {
            let z = 1.2 + (10.0 - 1.2) * i as f64 / 19.0;
            for k in 0..=30 {
                let l = 0.3 + 1.2 * k as f64 / 30.0;
                if l < 1.0 && z >= 1.0 / (1.0 - l) {
                    continue;
                }
                let b = bound_c(z, l).unwrap();
                let c = solve_c_exact_unit(z, l, 1e-15).unwrap();
                assert!(b.contains(c), "ζ={z} Λ={l}");
            }
        }
    }

    #[test]
    fn quartic_tanh_model() {
        for i in 1..=1000 {
            let x = 1.5 * i as f64 / 1000.0;
            assert!((x.tanh() / x - (1.0 - 0.2 * x * x)).abs() <= 0.15 * x * x);
        }
    }

    #[test]
    fn c_map() {
        let p = CEquationParams::new(1.0, 3.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(c_to_big_c(&p, UnitValue::Direct(0.37)), 0.37);
        let eps = 0.8;
        let p = CEquationParams::new(1.0, 5.0, 2.0, eps, 1.0).unwrap();
        let c = 0.6;
        let want = 2.0 * c / ((1.0 + eps) - (1.0 - eps) * c);
        assert!((c_to_big_c(&p, UnitValue::Direct(c)) - want).abs() < 1e-15);
        let edge = c_to_big_c(&p, UnitValue::complement(1e-30));
        assert!((edge - 1.0 / eps).abs() < 1e-14);
    }

    #[test]
    fn zeta_shifts() {
        let p = CEquationParams::new(1.0, 4.0, 3.0, 1.0, 1.0).unwrap();
        assert_eq!(zeta_plus_minus(&p, 30), (4.0, 4.0));
        let eps = 0.9;
        let t15 = 10f64.powf(1.5);
        let p = CEquationParams::new(1.0, t15, 3.0, eps, 1.0).unwrap();
        let (zm, zp) = zeta_plus_minus(&p, 30);
        let k = (1.0 - eps) / (2.0 * eps);
        assert!(((t15 + k) / (1.0 + k) - zp).abs() < 1e-12);
        assert!(zm > 1.0 && zp > 1.0);
    }

    #[test]
    fn c_equation_round_trip() {
        for &(z1, l, a) in &[(3.0, 2.0, 0.8), (10f64.powf(1.5), 4.0, 0.9), (5.0, 1.5, 0.75)] {
            let p = CEquationParams::new(1.0, z1, l, a, 1.0).unwrap();
            let big_c = solve_c_equation_exact(&p).unwrap();
            assert!(p.residual(big_c).abs() < 1e-10);
            let red = reduce_c_equation(&p, big_c);
            let c = solve_c_exact_unit(red.zeta, red.lambda, 1e-15).unwrap();
            let back = c_to_big_c(&p, c);
            assert!(p.residual(back).abs() < 1e-10, "residual {}", p.residual(back));
            assert!((back - big_c).abs() < 1e-9 * big_c);
            let lo = p.z0 * fixed_point_c0(p.lambda_minus(), 30).c0 / p.beta;
            assert!(big_c < p.z0 / p.alpha && big_c > 0.99 * lo);
        }
    }

    proptest::proptest! {
        #[test]
        fn bracket_contains_root(zeta in 1.2f64..10.0, lambda in 1.0f64..40.0) {
            let b = bound_c(zeta, lambda).unwrap();
            let c = solve_c_exact_unit(zeta, lambda, 1e-15).unwrap();
            proptest::prop_assert!(b.contains(c));
        }

        #[test]
        fn c0_below_one(lambda in 1.01f64..60.0) {
            let c = fixed_point_c0(lambda, C0_ITERATIONS);
            proptest::prop_assert!(c.c0 <= 1.0 && c.gap >= 0.0);
        }
    }
}
