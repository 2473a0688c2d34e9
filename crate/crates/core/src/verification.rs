//! Certificates for envelope claims and comparison of bands against the shooting oracle.

use crate::builders::{derivative_bounds, EnvelopeBand, Validity};
use crate::error::{Error, Result};
use crate::model::{Envelope, EnvelopeKind, EnvelopeSpec, ProblemParams, ResidueProfile, PROFILE_POINTS};
use crate::numerics::Grid;
use crate::shooting::Oracle;

const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: EnvelopeKind,
    pub residue_profile: ResidueProfile,
    pub boundary_ok: bool,
    pub residue_ok: bool,
    /// Slope hypothesis at y = √T; always true for global kinds.
    pub slope_ok: bool,
    /// Nondecreasing in x on the sampling grid.
    pub ordering_ok: bool,
    pub y_range: (f64, f64),
    pub details: String,
}

impl Certificate {
    pub fn issued(&self) -> bool {
        self.boundary_ok && self.residue_ok && self.slope_ok && self.ordering_ok
    }

    /// Name of the first failing check.
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.boundary_ok {
            Some("boundary")
        } else if !self.residue_ok {
            Some("residue-sign")
        } else if !self.slope_ok {
            Some("slope")
        } else if !self.ordering_ok {
            Some("monotonicity")
        } else {
            None
        }
    }
}

/// `B√(y⁵-5y+4+δ)`.
fn exact_slope(p: &ProblemParams, y: f64, delta: f64) -> f64 {
    p.big_b() * ((y - 1.0).powi(2) * (((y + 2.0) * y + 3.0) * y + 4.0) + delta).sqrt()
}

/// Runs every check without refusing.
pub fn inspect(spec: &EnvelopeSpec, p: &ProblemParams, kind: EnvelopeKind) -> Result<Certificate> {
    let env = Envelope::new(*spec, *p);
    let tt = p.big_t();
    let y0 = env.y_at(0.0)?;
    let y1 = env.y_at(1.0)?;
    let right_ok = (y1 - tt).abs() <= REL_TOL * tt;
    let mut details = Vec::new();
    let left_ok = match kind {
        EnvelopeKind::GlobalUpper => y0 >= 1.0 - REL_TOL,
        EnvelopeKind::GlobalLower => y0 <= 1.0 + REL_TOL,
        EnvelopeKind::PartialLower => y0 <= p.sqrt_t() * (1.0 + REL_TOL),
        EnvelopeKind::PartialUpper => true,
    };
    if !right_ok {
        details.push(format!("y(1) = {y1} differs from T = {tt}"));
    }
    if !left_ok {
        details.push(format!("y(0) = {y0} on the wrong side"));
    }

    let y_lo = if kind.is_partial() { p.sqrt_t() } else { 1.0 };
    let profile = ResidueProfile::sample(&env, y_lo, tt, PROFILE_POINTS)?;
    let residue_ok = if kind.is_upper() { profile.is_nonpos() } else { profile.is_nonneg() };
    if !residue_ok {
        details.push(format!("residue range [{:.6e}, {:.6e}] on [{y_lo}, {tt}]", profile.min(), profile.max()));
    }

    let slope_ok = if kind.is_partial() {
        let y = p.sqrt_t();
        let g = env.slope_at_y(y) / 2f64.sqrt();
        let ok = match kind {
            EnvelopeKind::PartialUpper => g <= exact_slope(p, y, 0.0) * (1.0 + REL_TOL),
            _ => g >= exact_slope(p, y, derivative_bounds(p).delta) * (1.0 - REL_TOL),
        };
        if !ok {
            details.push(format!("slope {g:.6e} at y = √T fails the comparison"));
        }
        ok
    } else {
        true
    };

    let grid = Grid::uniform(PROFILE_POINTS)?;
    let mut prev = f64::NEG_INFINITY;
    let mut ordering_ok = true;
    for &x in grid.points() {
        let y = env.y_at(x)?;
        if y < prev * (1.0 - REL_TOL) {
            ordering_ok = false;
            details.push(format!("decreasing at x = {x}"));
            break;
        }
        prev = y;
    }

    Ok(Certificate {
        kind,
        residue_profile: profile,
        boundary_ok: right_ok && left_ok,
        residue_ok,
        slope_ok,
        ordering_ok,
        y_range: (y_lo, tt),
        details: details.join("; "),
    })
}

/// Issues a certificate or names the first failing check.
pub fn certify(spec: &EnvelopeSpec, p: &ProblemParams, kind: EnvelopeKind) -> Result<Certificate> {
    let cert = inspect(spec, p, kind)?;
    match cert.first_failure() {
        None => Ok(cert),
        Some(check) => Err(Error::Certification {
            check: format!("{kind}: {check}"),
            detail: cert.details.clone(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub max_width_y: f64,
    pub max_width_u: f64,
    pub max_oracle_minus_lower_y: f64,
    pub max_upper_minus_oracle_y: f64,
    pub max_oracle_minus_lower_u: f64,
    pub max_upper_minus_oracle_u: f64,
    pub points_checked: usize,
}

/// Tolerance allowed to the sandwich at a point of size y.
pub fn sandwich_tolerance(y: f64, oracle_tol: f64) -> f64 {
    REL_TOL * y.abs() + 2.0 * oracle_tol
}

/// Checks lower ≤ oracle ≤ upper on the grid and reports the spreads.
pub fn compare_to_oracle(band: &EnvelopeBand, oracle: &Oracle, xs: &[f64]) -> Result<OracleComparison> {
    let t = band.params.t();
    let root_t = band.params.sqrt_t();
    let mut out = OracleComparison {
        max_width_y: 0.0,
        max_width_u: 0.0,
        max_oracle_minus_lower_y: 0.0,
        max_upper_minus_oracle_y: 0.0,
        max_oracle_minus_lower_u: 0.0,
        max_upper_minus_oracle_u: 0.0,
        points_checked: 0,
    };
    for &x in xs {
        let y = oracle.y_at(x);
        if band.validity == Validity::BoundaryLayer && y < root_t {
            continue;
        }
        let lo = band.lower.y_at(x)?;
        let up = band.upper.y_at(x)?;
        let tol = sandwich_tolerance(y, oracle.tol);
        if lo > y + tol {
            return Err(Error::Ordering { x, detail: format!("lower {lo} above oracle {y}") });
        }
        if y > up + tol {
            return Err(Error::Ordering { x, detail: format!("oracle {y} above upper {up}") });
        }
        out.max_width_y = out.max_width_y.max(up - lo);
        out.max_oracle_minus_lower_y = out.max_oracle_minus_lower_y.max(y - lo);
        out.max_upper_minus_oracle_y = out.max_upper_minus_oracle_y.max(up - y);
        out.points_checked += 1;
    }
    out.max_width_u = t * out.max_width_y;
    out.max_oracle_minus_lower_u = t * out.max_oracle_minus_lower_y;
    out.max_upper_minus_oracle_u = t * out.max_upper_minus_oracle_y;
    Ok(out)
}

pub const L2_POINTS: usize = 4001;

/// ‖resd(y)‖ in L²[0, 1] by composite Simpson.
pub fn residue_l2_norm(env: &Envelope, points: usize) -> Result<f64> {
    let n = if points % 2 == 0 { points + 1 } else { points.max(3) };
    let h = 1.0 / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let x = i as f64 * h;
        let r = env.residue_at_y(env.y_at(x)?);
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * r * r;
    }
    Ok((acc * h / 3.0).sqrt())
}
