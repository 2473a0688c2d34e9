//! The four envelopes, the bands they form, derivative bounds and the boundary-layer test.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{eps_root, eps_tilde_bounds, residue_poly, slope_q, Envelope, EnvelopeKind, EnvelopeSpec, ProblemParams};
use crate::numerics::{atanh_safe, tanh_gap, Grid, UnitValue};
use crate::transcendental::{
    bound_c, bound_c_moderate, bound_c_small, c_to_big_c, fixed_point_c0, zeta_plus_minus, CEquationParams,
    C0_ITERATIONS,
};
use crate::verification::{certify, Certificate};

/// Which recipe drives the lower/partial constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterationRule {
    /// ε = 0.75, gradient step R·t⁴/(20B²).
    Text,
    /// ε = 0.73, gradient step R·t⁴/15, one extra lower refinement.
    #[default]
    Listing,
}

impl IterationRule {
    pub fn name(self) -> &'static str {
        match self {
            IterationRule::Text => "text",
            IterationRule::Listing => "listing",
        }
    }
}

impl FromStr for IterationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(IterationRule::Text),
            "listing" => Ok(IterationRule::Listing),
            _ => Err(Error::InvalidParams(format!("unknown iteration rule '{s}' (expected text or listing)"))),
        }
    }
}

impl std::fmt::Display for IterationRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub rule: IterationRule,
    pub gradient_iterations: usize,
    pub c0_iterations: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { rule: IterationRule::default(), gradient_iterations: 2, c0_iterations: C0_ITERATIONS }
    }
}

impl BuildOptions {
    pub fn with_rule(rule: IterationRule) -> Self {
        BuildOptions { rule, ..Default::default() }
    }
}

pub const EPS_GLOBAL_LOWER_TEXT: f64 = 0.75;
pub const EPS_GLOBAL_LOWER_LISTING: f64 = 0.73;

/// q̃₊ = √((1-t³)(5+t³)/(5(1-t⁴))), always in [√0.9, 1].
pub fn global_upper_q(t: f64) -> f64 {
    let ratio = (1.0 + t + t * t) / ((1.0 + t) * (1.0 + t * t));
    (ratio * (5.0 + t * t * t) / 5.0).sqrt()
}

pub fn global_upper_spec(p: &ProblemParams) -> EnvelopeSpec {
    EnvelopeSpec::new(p, global_upper_q(p.t()), 1.0, 1.0).expect("q̃₊ is positive")
}

/// ỹ₊(x) - 1 without cancellation.
fn global_upper_minus_one(p: &ProblemParams, x: f64) -> f64 {
    let a0 = atanh_safe(UnitValue::complement(-(1.5 * p.t().ln()).exp_m1())).expect("t < 1");
    let bt = p.big_b() / global_upper_q(p.t());
    let arg = a0 + 1.5 * 2f64.sqrt() * bt * (1.0 - x);
    (-(2.0 / 3.0) * (-tanh_gap(arg)).ln_1p()).exp_m1()
}

/// Δ, d and the derived bounds on y'(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBounds {
    pub delta: f64,
    pub d: f64,
    /// `(15/B²)(e^{3B}-1)^{-2}(1+(e^{3B}-1)^{-1})²`.
    pub cap: f64,
    pub y1_lower: f64,
    pub y1_gap: f64,
}

pub fn derivative_bounds(p: &ProblemParams) -> DerivativeBounds {
    let b = p.big_b();
    let h = 0.25 * 2f64.sqrt() * b;
    let g25 = global_upper_minus_one(p, 0.25);
    let g0 = global_upper_minus_one(p, 0.0);
    let delta = (g25 / h).powi(2);
    let d = ((g25 - g0).max(0.0) / h).powi(2);
    let m = 1.0 / (3.0 * b).exp_m1();
    let cap = 15.0 / (b * b) * m * m * (1.0 + m) * (1.0 + m);
    let t = p.big_t();
    let rad = t.powi(5) - 5.0 * t + 4.0;
    DerivativeBounds {
        delta,
        d,
        cap,
        y1_lower: 2f64.sqrt() * b * rad.sqrt(),
        y1_gap: 2f64.sqrt() * b * delta / (2.0 * rad.sqrt()),
    }
}

fn big_c_of(c: f64, eps: f64) -> f64 {
    2.0 * c / ((1.0 + eps) - (1.0 - eps) * c)
}

/// ζ with the C-shift taken from c ↦ C(c).
fn zeta_listing(t15: f64, eps: f64, cc: f64) -> f64 {
    let k = 0.5 * (1.0 - eps) * big_c_of(cc, eps);
    (t15 + k) / (1.0 + k)
}

fn c_minus(rule: IterationRule, zeta: f64, lambda: f64) -> Result<UnitValue> {
    Ok(match rule {
        IterationRule::Listing if lambda >= 1.5 => bound_c_moderate(zeta, lambda, C0_ITERATIONS)?.c_minus,
        IterationRule::Listing => bound_c_small(zeta, lambda)?.c_minus,
        IterationRule::Text => bound_c(zeta, lambda)?.c_minus,
    })
}

fn c_plus(rule: IterationRule, zeta: f64, lambda: f64) -> Result<UnitValue> {
    Ok(match rule {
        IterationRule::Listing if lambda >= 1.5 => bound_c_moderate(zeta, lambda, C0_ITERATIONS)?.c_plus,
        IterationRule::Listing => bound_c_small(zeta, lambda)?.c_plus,
        IterationRule::Text => bound_c(zeta, lambda)?.c_plus,
    })
}

fn ceq(p: &ProblemParams, q: f64, eps: f64) -> Result<CEquationParams> {
    CEquationParams::new(1.0, p.t15(), p.big_l() / q, eps, 1.0)
}

pub fn global_lower_spec(p: &ProblemParams, opts: &BuildOptions) -> Result<EnvelopeSpec> {
    let delta = derivative_bounds(p).delta;
    let eps = match opts.rule {
        IterationRule::Text => EPS_GLOBAL_LOWER_TEXT,
        IterationRule::Listing => EPS_GLOBAL_LOWER_LISTING,
    };
    let q = slope_q(p.big_t(), eps, 1.0 / eps, delta).min(1.1);
    let eq = ceq(p, q, eps)?;
    let zeta = match opts.rule {
        IterationRule::Text => zeta_plus_minus(&eq, opts.c0_iterations).0,
        IterationRule::Listing => {
            zeta_listing(p.t15(), eps, fixed_point_c0(0.99 * p.big_l(), opts.c0_iterations).c0)
        }
    };
    let c = c_minus(opts.rule, zeta, eq.lambda_minus())?;
    EnvelopeSpec::new(p, q, eps, c_to_big_c(&eq, c))
}

/// 1 - C₀ ≤ t³/10, the range where the residue sign of the partial upper envelope is known a priori.
/// Outside it the certificate alone decides.
pub fn partial_upper_smallness(p: &ProblemParams, opts: &BuildOptions) -> bool {
    let t3 = p.t().powi(3);
    1.0 - fixed_point_c0(0.99 * p.big_l(), opts.c0_iterations).c0 <= t3 / 10.0
}

pub fn partial_upper_spec(p: &ProblemParams, opts: &BuildOptions) -> Result<EnvelopeSpec> {
    let t = p.t();
    let t3 = t * t * t;
    let c0 = fixed_point_c0(0.99 * p.big_l(), opts.c0_iterations).c0;
    let q0 = 1.0 - 0.6 * t3;
    let eps = eps_root(p.big_t(), q0, c0, 0.0)?;
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::Precondition(format!("ε₊ = {eps} outside (0, 2)")));
    }
    let eps_slope = match opts.rule {
        IterationRule::Listing => eps_tilde_bounds(t).0,
        IterationRule::Text => 1.0 - 0.8 * t3,
    };
    let mut q = slope_q(p.big_t(), eps_slope, c0, 0.0);
    let big_c_at = |q: f64| -> Result<f64> {
        let eq = ceq(p, q, eps)?;
        let zeta = zeta_plus_minus(&eq, opts.c0_iterations).1;
        Ok(c_to_big_c(&eq, c_plus(opts.rule, zeta, eq.lambda_plus())?))
    };
    let mut big_c = big_c_at(q)?;
    let bb = p.big_b() * p.big_b();
    for _ in 0..opts.gradient_iterations {
        let r = residue_poly(p.big_t(), q, big_c, eps);
        q += match opts.rule {
            IterationRule::Listing => r * t.powi(4) / 15.0,
            IterationRule::Text => r * t.powi(4) / (20.0 * bb),
        };
        big_c = big_c_at(q)?;
    }
    EnvelopeSpec::new(p, q, eps, big_c)
}

pub fn partial_lower_spec(p: &ProblemParams, opts: &BuildOptions) -> Result<EnvelopeSpec> {
    let t = p.t();
    let (eps_lo, eps) = eps_tilde_bounds(t);
    let delta = derivative_bounds(p).delta;
    let y = p.sqrt_t();
    let q = slope_q(y, eps, 1.0 / eps_lo, delta);
    match opts.rule {
        IterationRule::Text => {
            let eq = ceq(p, q, eps)?;
            let zeta = zeta_plus_minus(&eq, opts.c0_iterations).0;
            let c = c_minus(opts.rule, zeta, eq.lambda_minus())?;
            EnvelopeSpec::new(p, q, eps, c_to_big_c(&eq, c))
        }
        IterationRule::Listing => {
            let zeta = zeta_listing(p.t15(), eps, fixed_point_c0(p.big_l() / 1.25, opts.c0_iterations).c0);
            let eq = ceq(p, q, eps)?;
            let c0 = c_to_big_c(&eq, c_minus(opts.rule, zeta, eq.lambda_minus())?);
            let q1 = slope_q(y, eps, c0, delta);
            let eq = ceq(p, q1, eps)?;
            let c1 = c_to_big_c(&eq, c_minus(opts.rule, zeta, eq.lambda_minus())?);
            EnvelopeSpec::new(p, q1, eps, c1)
        }
    }
}

/// Uncertified parameters of the requested envelope.
pub fn spec_for(kind: EnvelopeKind, p: &ProblemParams, opts: &BuildOptions) -> Result<EnvelopeSpec> {
    match kind {
        EnvelopeKind::GlobalUpper => Ok(global_upper_spec(p)),
        EnvelopeKind::GlobalLower => global_lower_spec(p, opts),
        EnvelopeKind::PartialUpper => partial_upper_spec(p, opts),
        EnvelopeKind::PartialLower => partial_lower_spec(p, opts),
    }
}

/// An envelope together with the certificate that licenses it.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedEnvelope {
    pub kind: EnvelopeKind,
    pub envelope: Envelope,
    pub certificate: Certificate,
}

impl CertifiedEnvelope {
    pub fn spec(&self) -> &EnvelopeSpec {
        &self.envelope.spec
    }

    pub fn y_at(&self, x: f64) -> Result<f64> {
        self.envelope.y_at(x)
    }
}

/// Builds and certifies; a refused certificate is an error.
pub fn build(kind: EnvelopeKind, p: &ProblemParams, opts: &BuildOptions) -> Result<CertifiedEnvelope> {
    let spec = spec_for(kind, p, opts)?;
    let certificate = certify(&spec, p, kind)?;
    Ok(CertifiedEnvelope { kind, envelope: Envelope::new(spec, *p), certificate })
}

pub fn build_global_upper(p: &ProblemParams) -> Result<CertifiedEnvelope> {
    build(EnvelopeKind::GlobalUpper, p, &BuildOptions::default())
}

pub fn build_global_lower(p: &ProblemParams, opts: &BuildOptions) -> Result<CertifiedEnvelope> {
    build(EnvelopeKind::GlobalLower, p, opts)
}

pub fn build_partial_upper(p: &ProblemParams, opts: &BuildOptions) -> Result<CertifiedEnvelope> {
    build(EnvelopeKind::PartialUpper, p, opts)
}

pub fn build_partial_lower(p: &ProblemParams, opts: &BuildOptions) -> Result<CertifiedEnvelope> {
    build(EnvelopeKind::PartialLower, p, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Global,
    /// y ∈ [√T, T].
    BoundaryLayer,
}

impl Validity {
    pub fn name(self) -> &'static str {
        match self {
            Validity::Global => "global",
            Validity::BoundaryLayer => "boundary-layer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSample {
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BandSample {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

pub const BAND_POINTS: usize = 2001;

/// A certified lower/upper pair on its validity range.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeBand {
    pub lower: CertifiedEnvelope,
    pub upper: CertifiedEnvelope,
    pub validity: Validity,
    pub params: ProblemParams,
}

impl EnvelopeBand {
    pub fn global(p: &ProblemParams, opts: &BuildOptions) -> Result<Self> {
        Ok(EnvelopeBand {
            lower: build_global_lower(p, opts)?,
            upper: build_global_upper(p)?,
            validity: Validity::Global,
            params: *p,
        })
    }

    pub fn partial(p: &ProblemParams, opts: &BuildOptions) -> Result<Self> {
        Ok(EnvelopeBand {
            lower: build_partial_lower(p, opts)?,
            upper: build_partial_upper(p, opts)?,
            validity: Validity::BoundaryLayer,
            params: *p,
        })
    }

    pub fn y_range(&self) -> (f64, f64) {
        match self.validity {
            Validity::Global => (1.0, self.params.big_t()),
            Validity::BoundaryLayer => (self.params.sqrt_t(), self.params.big_t()),
        }
    }

    /// Left end of the x-range covered: where the lower envelope reaches the bottom of the y-range.
    pub fn x_edge(&self) -> Result<f64> {
        match self.validity {
            Validity::Global => Ok(0.0),
            Validity::BoundaryLayer => {
                let y0 = self.lower.y_at(0.0)?;
                if y0 >= self.params.sqrt_t() {
                    Ok(0.0)
                } else {
                    self.lower.envelope.x_of_y(self.params.sqrt_t())
                }
            }
        }
    }

    /// Uniform x-points on [x_edge, 1] merged with points uniform in y on the lower envelope.
    pub fn eval_grid(&self, points: usize) -> Result<Vec<f64>> {
        let x0 = self.x_edge()?;
        let grid = Grid::uniform(points.max(2))?;
        let y_lo = self.lower.y_at(x0)?;
        let y_hi = self.params.big_t();
        let mut xs: Vec<f64> = grid.points().iter().map(|u| x0 + (1.0 - x0) * u).collect();
        for &u in grid.points() {
            let y = y_lo + (y_hi - y_lo) * u;
            if let Ok(x) = self.lower.envelope.x_of_y(y) {
                if x >= x0 && x <= 1.0 {
                    xs.push(x);
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        Ok(xs)
    }

    pub fn sample(&self, xs: &[f64]) -> Result<Vec<BandSample>> {
        xs.iter()
            .map(|&x| Ok(BandSample { x, lower: self.lower.y_at(x)?, upper: self.upper.y_at(x)? }))
            .collect()
    }

    pub fn samples(&self, points: usize) -> Result<Vec<BandSample>> {
        self.sample(&self.eval_grid(points)?)
    }

    /// Largest upper - lower on the validity range, in y.
    pub fn max_width(&self, points: usize) -> Result<f64> {
        Ok(self.samples(points)?.iter().map(BandSample::width).fold(0.0, f64::max))
    }

    /// Lower ≤ upper at every grid point.
    pub fn check_ordering(&self, points: usize) -> Result<()> {
        for s in self.samples(points)? {
            if s.lower > s.upper + 1e-12 * s.upper.abs() {
                return Err(Error::Ordering {
                    x: s.x,
                    detail: format!("lower {} exceeds upper {}", s.lower, s.upper),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLayerReport {
    /// b·t^0.25.
    pub value: f64,
    pub has_layer: bool,
    pub variation_ratio: f64,
    /// ξ = √5/b.
    pub xi: f64,
}

pub fn has_layer(p: &ProblemParams) -> bool {
    p.big_b() * p.big_t().powf(1.25) >= 50.0
}

pub fn boundary_layer(p: &ProblemParams) -> BoundaryLayerReport {
    let xi = 5f64.sqrt() / p.b();
    let upper = Envelope::new(global_upper_spec(p), *p);
    let y = upper.y_at((1.0 - xi).max(0.0)).expect("global upper is defined on [0, 1]");
    let tt = p.big_t();
    BoundaryLayerReport {
        value: p.b() * p.t().powf(0.25),
        has_layer: has_layer(p),
        variation_ratio: (tt - y) / (tt - 1.0),
        xi,
    }
}

/// Lower bound for the variation ratio as a function of t alone.
pub fn variation_function(t: f64) -> f64 {
    let t15 = t.powf(1.5);
    let arg = t15.atanh() + 1.5 * 2f64.sqrt() * t15;
    (1.0 - t * arg.tanh().powf(-2.0 / 3.0)) / (1.0 - t)
}
