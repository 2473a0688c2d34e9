//! The closed-form family y_{B̃,C,ε}, its residue, and the residue polynomial R(y,q,C,ε).

use crate::error::{Error, Result};
use crate::numerics::Grid;

/// (b, t) together with the derived constants B, T and L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    b: f64,
    t: f64,
    big_b: f64,
    big_t: f64,
    big_l: f64,
}

impl ProblemParams {
    pub fn new(b: f64, t: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParams(format!("b = {b} must be positive and finite")));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidParams(format!("t = {t} must lie in (0, 1)")));
        }
        let big_b = b * t.powf(1.5) / 5f64.sqrt();
        Ok(ProblemParams { b, t, big_b, big_t: 1.0 / t, big_l: 1.5 * 2f64.sqrt() * big_b })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn big_b(&self) -> f64 {
        self.big_b
    }

    pub fn big_t(&self) -> f64 {
        self.big_t
    }

    pub fn big_l(&self) -> f64 {
        self.big_l
    }

    /// T^1.5.
    pub fn t15(&self) -> f64 {
        self.big_t.powf(1.5)
    }

    pub fn sqrt_t(&self) -> f64 {
        self.big_t.sqrt()
    }
}

/// Parameters (q, ε, C) of one member of the closed-form family; B = q·B̃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSpec {
    pub q: f64,
    pub eps: f64,
    pub c: f64,
    pub btilde: f64,
}

impl EnvelopeSpec {
    pub fn new(p: &ProblemParams, q: f64, eps: f64, c: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite() && c > 0.0 && c.is_finite() && eps < 2.0 && eps > -1.0) {
            return Err(Error::InvalidParams(format!("bad envelope spec q={q}, ε={eps}, C={c}")));
        }
        if eps > 0.0 && eps * c > 1.0 + 1e-12 {
            return Err(Error::InvalidParams(format!("C = {c} exceeds 1/ε = {}", 1.0 / eps)));
        }
        Ok(EnvelopeSpec { q, eps, c, btilde: p.big_b() / q })
    }

    /// 3√2·B̃·C, the rate of the exponential in the closed form.
    pub fn kappa(&self) -> f64 {
        3.0 * 2f64.sqrt() * self.btilde * self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvelopeKind {
    GlobalUpper,
    GlobalLower,
    PartialUpper,
    PartialLower,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 4] = [
        EnvelopeKind::GlobalUpper,
        EnvelopeKind::GlobalLower,
        EnvelopeKind::PartialUpper,
        EnvelopeKind::PartialLower,
    ];

    pub fn is_upper(self) -> bool {
        matches!(self, EnvelopeKind::GlobalUpper | EnvelopeKind::PartialUpper)
    }

    pub fn is_partial(self) -> bool {
        matches!(self, EnvelopeKind::PartialUpper | EnvelopeKind::PartialLower)
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::GlobalUpper => "global-upper",
            EnvelopeKind::GlobalLower => "global-lower",
            EnvelopeKind::PartialUpper => "partial-upper",
            EnvelopeKind::PartialLower => "partial-lower",
        }
    }
}

impl std::fmt::Display for EnvelopeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EnvelopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvelopeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown envelope kind '{s}'")))
    }
}

/// y^1.5 of the closed form at distance s = 1 - x from the right end.
fn z_at_s(spec: &EnvelopeSpec, p: &ProblemParams, s: f64) -> Result<f64> {
    let (eps, c, t15) = (spec.eps, spec.c, p.t15());
    let a = spec.kappa() * s;
    let (num, den) = if a <= 1.0 {
        let em = a.exp_m1();
        (t15 * (1.0 + eps + eps * em) + eps * c * em, t15 * em + c * (1.0 + eps + em))
    } else {
        // divided through by e^a
        let f = (-a).exp();
        let one_minus_f = -(-a).exp_m1();
        (t15 * (f + eps) + eps * c * one_minus_f, t15 * one_minus_f + c * (1.0 + eps * f))
    };
    if !(den > 0.0) || !(num > 0.0) {
        return Err(Error::Degenerate(format!("closed form degenerates at s = {s}: num={num}, den={den}")));
    }
    Ok(c * num / den)
}

/// The closed-form member y_{B̃,C,ε}(x); y(1) = T.
pub fn closed_form_y(spec: &EnvelopeSpec, p: &ProblemParams, x: f64) -> Result<f64> {
    if !(-1e-15..=1.0 + 1e-15).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(z_at_s(spec, p, (1.0 - x).max(0.0))?.powf(2.0 / 3.0))
}

/// `R(y,q,C,ε)`.
pub fn residue_poly(y: f64, q: f64, c: f64, eps: f64) -> f64 {
    let (a, b, k) = eps_quadratic(y, q, c);
    a * eps * eps + b * eps + k
}

/// Coefficients of R(y,q,C,·) as a quadratic in ε.
fn eps_quadratic(y: f64, q: f64, c: f64) -> (f64, f64, f64) {
    let k = 1.25 * q * q * (1.0 - y.powi(4));
    let y25 = y * y * y.sqrt();
    let yh = 1.0 / y.sqrt();
    let c2 = c * c;
    let a = k + 2.0 * c2 * y + c2 * c * yh - c2 * c2 / (y * y);
    let b = 2.0 * k - 7.0 * c * y25 - 8.0 * c2 * y - c2 * c * yh;
    let k0 = k + 5.0 * y.powi(4) + 7.0 * c * y25 + 2.0 * c2 * y;
    (a, b, k0)
}

/// `y'' - B²(5y⁴ - 5)` of the closed-form member, expressed through y.
pub fn residue(y: f64, spec: &EnvelopeSpec, _p: &ProblemParams) -> f64 {
    let scale = 2.0 * spec.btilde / (1.0 + spec.eps);
    scale * scale * residue_poly(y, spec.q, spec.c, spec.eps)
}

/// Root of R(y,q,C,ε) = r nearest to ε = 1.
pub fn eps_root(y: f64, q: f64, c: f64, r: f64) -> Result<f64> {
    let (a, b, k) = eps_quadratic(y, q, c);
    let k = k - r;
    let scale = a.abs().max(b.abs()).max(k.abs());
    if a.abs() <= 1e-14 * scale {
        if b == 0.0 {
            return Err(Error::NoRoot("R is constant in ε".into()));
        }
        return Ok(-k / b);
    }
    let disc = b * b - 4.0 * a * k;
    if disc < 0.0 {
        return Err(Error::NoRoot(format!("negative discriminant {disc} at y = {y}")));
    }
    let qq = -0.5 * (b + b.signum() * disc.sqrt());
    let r1 = qq / a;
    let r2 = if qq != 0.0 { k / qq } else { r1 };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    Ok(if (hi - 1.0).abs() < (lo - 1.0).abs() { hi } else { lo })
}

/// `(ε̃₋(s), ε̃₊(s))`.
pub fn eps_tilde_bounds(s: f64) -> (f64, f64) {
    let s3 = s * s * s;
    let s4 = s3 * s;
    (1.0 - 0.8 * s3 + 0.6 * s4, 1.0 - 0.8 * s3 + (8.0 - 3.0 * s) / 5.0 * s4)
}

/// Slope matching factor q(y, ε, C) with the radicand shifted by δ.
pub fn slope_q(y: f64, eps: f64, c: f64, delta: f64) -> f64 {
    let s = 1.0 / y;
    let s15 = s * s.sqrt();
    let s4 = s.powi(4);
    let m = (1.0 - 5.0 * s4 + (4.0 + delta) * s4 * s).sqrt();
    2.0 * (1.0 + (1.0 - eps) * c * s15 - eps * c * c * s15 * s15) / ((1.0 + eps) * m)
}

/// A closed-form member bound to its problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub spec: EnvelopeSpec,
    pub params: ProblemParams,
}

impl Envelope {
    pub fn new(spec: EnvelopeSpec, params: ProblemParams) -> Self {
        Envelope { spec, params }
    }

    pub fn y_at(&self, x: f64) -> Result<f64> {
        closed_form_y(&self.spec, &self.params, x)
    }

    pub fn y_at_s(&self, s: f64) -> Result<f64> {
        Ok(z_at_s(&self.spec, &self.params, s)?.powf(2.0 / 3.0))
    }

    fn p_poly(&self, y: f64) -> (f64, f64) {
        let (eps, c) = (self.spec.eps, self.spec.c);
        let ys = y.sqrt();
        let p = y * y * ys + (1.0 - eps) * c * y - eps * c * c / ys;
        let dp = 2.5 * y * ys + (1.0 - eps) * c + 0.5 * eps * c * c / (y * ys);
        (p, dp)
    }

    fn k(&self) -> f64 {
        2.0 * 2f64.sqrt() * self.spec.btilde / (1.0 + self.spec.eps)
    }

    /// dy/dx.
    pub fn dy(&self, x: f64) -> Result<f64> {
        let y = self.y_at(x)?;
        Ok(self.k() * self.p_poly(y).0)
    }

    /// d²y/dx².
    pub fn d2y(&self, x: f64) -> Result<f64> {
        let y = self.y_at(x)?;
        let (p, dp) = self.p_poly(y);
        let k = self.k();
        Ok(k * k * p * dp)
    }

    /// Slope as a function of y.
    pub fn slope_at_y(&self, y: f64) -> f64 {
        self.k() * self.p_poly(y).0
    }

    pub fn residue_at_y(&self, y: f64) -> f64 {
        residue(y, &self.spec, &self.params)
    }

    /// Distance from the right end at which the member takes the value y.
    pub fn s_of_y(&self, y: f64) -> Result<f64> {
        let (eps, c) = (self.spec.eps, self.spec.c);
        let z = y.powf(1.5);
        let t15 = self.params.t15();
        if !(z > eps * c) || !(z <= t15 * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("y = {y} outside the range of the envelope")));
        }
        let k = (1.0 + eps) * c;
        let s = ((k / (z - eps * c)).ln_1p() - (k / (t15 - eps * c)).ln_1p()) / self.spec.kappa();
        Ok(s.max(0.0))
    }

    pub fn x_of_y(&self, y: f64) -> Result<f64> {
        Ok(1.0 - self.s_of_y(y)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    AllNonNeg,
    AllNonPos,
    Mixed,
}

/// Samples of the residue on a uniform y-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueProfile {
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
    /// Absolute slack granted to the sign test.
    pub tolerance: f64,
    pub sign_certified: SignClass,
}

pub const PROFILE_POINTS: usize = 2001;
pub const SIGN_TOLERANCE: f64 = 1e-12;

impl ResidueProfile {
    pub fn sample(env: &Envelope, y_lo: f64, y_hi: f64, points: usize) -> Result<Self> {
        if !(y_hi > y_lo) {
            return Err(Error::Domain(format!("empty y-range [{y_lo}, {y_hi}]")));
        }
        let grid = Grid::uniform(points)?;
        let ys: Vec<f64> = grid.points().iter().map(|u| y_lo + (y_hi - y_lo) * u).collect();
        let values: Vec<f64> = ys.iter().map(|&y| env.residue_at_y(y)).collect();
        let scale = ys.iter().map(|&y| residue_scale(y, &env.spec)).fold(0.0, f64::max);
        Ok(ResidueProfile::from_values(ys, values, SIGN_TOLERANCE * scale))
    }

    pub fn from_values(ys: Vec<f64>, values: Vec<f64>, tolerance: f64) -> Self {
        let sign_certified = classify(&values, tolerance);
        ResidueProfile { ys, values, tolerance, sign_certified }
    }

    pub fn is_nonneg(&self) -> bool {
        self.values.iter().all(|&v| v >= -self.tolerance)
    }

    pub fn is_nonpos(&self) -> bool {
        self.values.iter().all(|&v| v <= self.tolerance)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sum of the magnitudes of the terms making up the residue at y.
pub fn residue_scale(y: f64, spec: &EnvelopeSpec) -> f64 {
    let (q, e, c) = (spec.q, spec.eps, spec.c);
    let k = 1.25 * q * q * (1.0 + e) * (1.0 + e);
    let y4 = y.powi(4);
    let terms = 5.0 * y4
        + k * (y4 + 1.0)
        + 7.0 * ((1.0 - e) * c).abs() * y * y * y.sqrt()
        + 2.0 * (4.0 * e - 1.0 - e * e).abs() * c * c * y
        + (e * (1.0 - e)).abs() * c.powi(3) / y.sqrt()
        + e * e * c.powi(4) / (y * y);
    let f = 2.0 * spec.btilde / (1.0 + e);
    f * f * terms
}

fn classify(values: &[f64], tol: f64) -> SignClass {
    if values.iter().all(|&v| v >= -tol) {
        SignClass::AllNonNeg
    } else if values.iter().all(|&v| v <= tol) {
        SignClass::AllNonPos
    } else {
        SignClass::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProblemParams {
        ProblemParams::new(70.0, 0.1).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn params_derived() {
        let p = ProblemParams::new(500.0, 0.1).unwrap();
        assert_eq!(p.big_b(), 500.0 * 0.1f64.powf(1.5) / 5f64.sqrt());
        assert_eq!(p.big_l(), 1.5 * 2f64.sqrt() * p.big_b());
        assert!(ProblemParams::new(-1.0, 0.5).is_err());
        assert!(ProblemParams::new(1.0, 1.0).is_err());
    }

    #[test]
    fn right_end_is_t() {
        let p = params();
        for &(q, eps, c) in &[(1.0, 1.0, 1.0), (1.05, 0.75, 1.2), (0.98, 0.99, 0.9)] {
            let spec = EnvelopeSpec::new(&p, q, eps, c).unwrap();
            let y = closed_form_y(&spec, &p, 1.0).unwrap();
            assert!(rel(y, p.big_t()) < 1e-12);
        }
    }

    #[test]
    fn reduces_to_tanh_form() {
        for &(b, t) in &[(70.0, 0.1), (10.0, 0.3), (500.0, 0.1), (3.0, 0.8)] {
            let p = ProblemParams::new(b, t).unwrap();
            let q = 0.97;
            let spec = EnvelopeSpec::new(&p, q, 1.0, 1.0).unwrap();
            for i in 0..100 {
                let x = i as f64 / 99.0;
                let arg = t.powf(1.5).atanh() + 1.5 * 2f64.sqrt() * spec.btilde * (1.0 - x);
                let want = arg.tanh().powf(-2.0 / 3.0);
                let got = closed_form_y(&spec, &p, x).unwrap();
                assert!(rel(got, want) < 1e-12, "b={b} t={t} x={x}");
            }
        }
    }

    #[test]
    fn no_overflow_for_large_rate() {
        let p = ProblemParams::new(1e4, 0.5).unwrap();
        let spec = EnvelopeSpec::new(&p, 1.0, 1.0, 1.0).unwrap();
        assert!(spec.kappa() > 700.0);
        let y = closed_form_y(&spec, &p, 0.0).unwrap();
        assert!(y.is_finite() && y >= 1.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = ProblemParams::new(10.0, 0.3).unwrap();
        for &(q, eps, c) in &[(1.0, 1.0, 1.0), (1.03, 0.8, 1.1), (0.99, 0.95, 0.7)] {
            let env = Envelope::new(EnvelopeSpec::new(&p, q, eps, c).unwrap(), p);
            let h = 1e-5;
            for i in 1..=50 {
                let x = i as f64 / 51.0;
                let (ym, y0, yp) = (env.y_at(x - h).unwrap(), env.y_at(x).unwrap(), env.y_at(x + h).unwrap());
                let d1 = (yp - ym) / (2.0 * h);
                let d2 = (yp - 2.0 * y0 + ym) / (h * h);
                assert!(rel(d1, env.dy(x).unwrap()) < 1e-6, "y' at {x}");
                assert!(rel(d2, env.d2y(x).unwrap()) < 1e-5, "y'' at {x}");
            }
        }
    }

    #[test]
    fn residue_is_ode_defect() {
        let p = ProblemParams::new(10.0, 0.3).unwrap();
        let env = Envelope::new(EnvelopeSpec::new(&p, 1.02, 0.85, 1.05).unwrap(), p);
        let bb = p.big_b() * p.big_b();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let y = env.y_at(x).unwrap();
            let want = env.d2y(x).unwrap() - bb * (5.0 * y.powi(4) - 5.0);
            let got = env.residue_at_y(y);
            assert!((got - want).abs() <= 1e-9 * want.abs().max(bb * y.powi(4)));
        }
    }

    #[test]
    fn residue_at_unit_parameters() {
        let p = ProblemParams::new(30.0, 0.4).unwrap();
        let spec = EnvelopeSpec::new(&p, 1.0, 1.0, 1.0).unwrap();
        let (bt, bb) = (spec.btilde, p.big_b());
        for i in 0..50 {
            let y = 1.0 + 0.1 * i as f64;
            let want = bt * bt * (5.0 * y.powi(4) - 4.0 * y - y.powi(-2)) - bb * bb * (5.0 * y.powi(4) - 5.0);
            assert!((residue(y, &spec, &p) - want).abs() <= 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn residue_poly_identities() {
        assert_eq!(residue_poly(1.0, 1.0, 1.0, 1.0), 0.0);
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let c = 0.1 + 2.0 * next();
            let e = -0.5 + 1.5 * next();
            let want = c * c * (2.0 + c - c * c) * e * e - c * (7.0 + 8.0 * c + c * c) * e + 5.0 + 7.0 * c + 2.0 * c * c;
            assert!((residue_poly(1.0, 1.0, c, e) - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        assert!(residue_poly(1.0, 1.0, 1.0, 7.0).abs() < 1e-12);
    }

    #[test]
    fn eps_root_cases() {
        assert!((eps_root(1.0, 1.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for &(y, q, c, r) in &[(10.0, 1.0, 0.99, 0.0), (3.0, 1.01, 0.9, 0.3), (50.0, 0.999, 1.0, -0.2)] {
            let e = eps_root(y, q, c, r).unwrap();
            let scale = 5.0 * y.powi(4);
            assert!((residue_poly(y, q, c, e) - r).abs() <= 1e-9 * scale);
            let alt = crate::numerics::bisect(|e| residue_poly(y, q, c, e) - r, e - 0.05, e + 0.05, 1e-15);
            if let Ok(b) = alt {
                assert!((b - e).abs() < 1e-9);
            }
        }
        let s: f64 = 0.01;
        let want = 1.0 - 0.8 * s.powi(3) + s.powi(4);
        assert!((eps_root(1.0 / s, 1.0, 1.0, 0.0).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn eps_tilde() {
        assert_eq!(eps_tilde_bounds(0.0), (1.0, 1.0));
        let (lo, hi) = eps_tilde_bounds(1.0);
        assert!((lo - 0.8).abs() < 1e-15 && (hi - 1.2).abs() < 1e-15);
        for i in 1..=1000 {
            let s = i as f64 / 1000.0;
            let (lo, hi) = eps_tilde_bounds(s);
            assert!(residue_poly(1.0 / s, 1.0, 1.0, lo) >= 2.0 - 1e-9, "s={s}");
            assert!(residue_poly(1.0 / s, 1.0, 1.0, hi) <= -2.0 / 3.0 + 1e-9, "s={s}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let p = ProblemParams::new(500.0, 0.1).unwrap();
        let env = Envelope::new(EnvelopeSpec::new(&p, 1.02, 0.8, 1.2).unwrap(), p);
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            let y = env.y_at(x).unwrap();
            let x2 = env.x_of_y(y).unwrap();
            assert!((env.y_at(x2).unwrap() - y).abs() <= 1e-10 * y);
        }
    }

    #[test]
    fn profile_signs() {
        let p = params();
        let env = Envelope::new(EnvelopeSpec::new(&p, 1.0, 1.0, 1.0).unwrap(), p);
        let prof = ResidueProfile::sample(&env, 1.0, p.big_t(), PROFILE_POINTS).unwrap();
        assert_eq!(prof.ys.len(), PROFILE_POINTS);
        assert_eq!(prof.sign_certified, SignClass::AllNonPos);
        assert!(prof.is_nonpos() && !prof.is_nonneg());
        assert_eq!(classify(&[1.0, -1.0], 0.0), SignClass::Mixed);
        assert_eq!(classify(&[-1.0, 0.0], 0.0), SignClass::AllNonPos);
        assert_eq!(classify(&[1.0, -1e-3], 1e-2), SignClass::AllNonNeg);
    }

    #[test]
    fn kind_names() {
        for k in EnvelopeKind::ALL {
            assert_eq!(k.name().parse::<EnvelopeKind>().unwrap(), k);
        }
        assert!("sideways".parse::<EnvelopeKind>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn right_end_hits_t(
            b in 1.0f64..1e5,
            t in 0.01f64..0.95,
            q in 0.9f64..1.1,
            eps in 0.5f64..1.0,
            c in 0.5f64..1.0,
        ) {
            let p = ProblemParams::new(b, t).unwrap();
            let env = Envelope::new(EnvelopeSpec::new(&p, q, eps, c).unwrap(), p);
            let y1 = env.y_at(1.0).unwrap();
            proptest::prop_assert!(rel(y1, p.big_t()) <= 1e-12);
        }

        #[test]
        fn monotone_in_x(b in 1.0f64..1e4, t in 0.05f64..0.9, x in 0.0f64..0.999) {
            let p = ProblemParams::new(b, t).unwrap();
            let env = Envelope::new(EnvelopeSpec::new(&p, 1.0, 0.9, 0.95).unwrap(), p);
            proptest::prop_assert!(env.y_at(x).unwrap() <= env.y_at(x + 1e-3).unwrap() * (1.0 + 1e-14));
        }

        #[test]
        fn inverse_round_trip_random(b in 1.0f64..500.0, t in 0.05f64..0.9, frac in 0.0f64..1.0) {
            let p = ProblemParams::new(b, t).unwrap();
            let env = Envelope::new(EnvelopeSpec::new(&p, 1.02, 0.8, 0.9).unwrap(), p);
            let y0 = env.y_at(0.0).unwrap();
            let y = y0 + (p.big_t() - y0) * frac;
            let x = env.x_of_y(y).unwrap();
            proptest::prop_assert!(rel(env.y_at(x).unwrap(), y) <= 1e-9);
        }
    }
}
