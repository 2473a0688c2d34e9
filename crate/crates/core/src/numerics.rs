//! Overflow-safe tanh algebra, fixed-step RK4 and bracketing root finders.

use crate::error::{Error, Result};

/// Arguments above this magnitude never have `1 - tanh` formed by subtraction.
pub const SATURATION: f64 = 15.0;

/// Below this magnitude tanh values are kept in direct form.
const COMPLEMENT_FROM: f64 = 0.5;

pub const BLOWUP_CAP: f64 = 1e300;

/// A number in (-1, 1), stored directly or through its distance to ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitValue {
    Direct(f64),
    /// Represents `±(1 - gap)`.
    Complement { negative: bool, gap: f64 },
}

impl UnitValue {
    pub fn complement(gap: f64) -> Self {
        UnitValue::Complement { negative: false, gap }
    }

    pub fn value(self) -> f64 {
        match self {
            UnitValue::Direct(v) => v,
            UnitValue::Complement { negative, gap } => {
                let v = 1.0 - gap;
                if negative {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// `1 - |v|`.
    pub fn gap(self) -> f64 {
        match self {
            UnitValue::Direct(v) => 1.0 - v.abs(),
            UnitValue::Complement { gap, .. } => gap,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            UnitValue::Direct(v) => v < 0.0,
            UnitValue::Complement { negative, .. } => negative,
        }
    }
}

impl From<f64> for UnitValue {
    fn from(v: f64) -> Self {
        UnitValue::Direct(v)
    }
}

/// `1 - tanh(x)` for `x >= 0`.
pub fn tanh_gap(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let e = (-2.0 * x).exp();
    2.0 * e / (1.0 + e)
}

/// `sech²(x)` without overflow.
pub fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Argument of tanh/exp, checked finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatingArg {
    value: f64,
}

impl SaturatingArg {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("non-finite tanh argument {value}")));
        }
        Ok(SaturatingArg { value })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn tanh(self) -> UnitValue {
        unit_tanh(self.value)
    }

    /// `1 - tanh(value)`.
    pub fn tanh_complement(self) -> f64 {
        if self.value >= 0.0 {
            tanh_gap(self.value)
        } else {
            2.0 / (1.0 + (2.0 * self.value).exp())
        }
    }
}

fn unit_tanh(x: f64) -> UnitValue {
    if x.abs() < COMPLEMENT_FROM {
        UnitValue::Direct(x.tanh())
    } else {
        UnitValue::Complement {
            negative: x < 0.0,
            gap: tanh_gap(x.abs()),
        }
    }
}

/// tanh(a + b) in complement-aware form.
pub fn tanh_sum_unit(a: f64, b: f64) -> UnitValue {
    let s = a + b;
    if s.abs() < COMPLEMENT_FROM {
        return UnitValue::Direct(s.tanh());
    }
    let negative = s < 0.0;
    let (a, b) = if negative { (-a, -b) } else { (a, b) };
    let gap = if a >= 0.0 && b >= 0.0 {
        // (1-ta)(1-tb) / (1 + ta tb), symmetric in a and b
        let ga = tanh_gap(a);
        let gb = tanh_gap(b);
        ga * gb / (2.0 - (ga + gb) + ga * gb)
    } else {
        tanh_gap(a + b)
    };
    UnitValue::Complement { negative, gap }
}

pub fn tanh_sum(a: f64, b: f64) -> f64 {
    tanh_sum_unit(a, b).value()
}

pub fn atanh_safe(c: UnitValue) -> Result<f64> {
    match c {
        UnitValue::Direct(v) => {
            if !(v.abs() < 1.0) {
                return Err(Error::Domain(format!("atanh of {v}")));
            }
            Ok(v.atanh())
        }
        UnitValue::Complement { negative, gap } => {
            if !(gap > 0.0 && gap <= 2.0) {
                return Err(Error::Domain(format!("atanh of complement {gap}")));
            }
            let r = 0.5 * ((2.0 - gap).ln() - gap.ln());
            Ok(if negative { -r } else { r })
        }
    }
}

/// Ordered sample points covering [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParams("a grid needs at least two points".into()));
        }
        if points[0] != 0.0 || *points.last().unwrap() != 1.0 {
            return Err(Error::InvalidParams("grid must start at 0 and end at 1".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("grid must be strictly increasing".into()));
        }
        Ok(Grid { points })
    }

    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidParams("grid count must be at least 2".into()));
        }
        let n = (count - 1) as f64;
        Grid::new((0..count).map(|i| i as f64 / n).collect())
    }

    /// `x_i = expm1(λ i/n) / expm1(λ)`, dense near 0.
    pub fn graded(count: usize, lambda: f64) -> Result<Self> {
        if count < 2 || !(lambda > 0.0) {
            return Err(Error::InvalidParams("graded grid needs count >= 2 and λ > 0".into()));
        }
        let n = (count - 1) as f64;
        let den = lambda.exp_m1();
        let mut points: Vec<f64> = (0..count)
            .map(|i| (lambda * i as f64 / n).exp_m1() / den)
            .collect();
        points[count - 1] = 1.0;
        Grid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Sampled solution of a scalar IVP; `xs` follow the integration direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Trajectory {
    pub fn terminal(&self) -> f64 {
        *self.ys.last().expect("trajectory is never empty")
    }
}

pub fn rk4_step<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, h: f64) -> f64 {
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    let k4 = f(x + h, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn check_cap(x: f64, y: f64, cap: f64) -> Result<()> {
    if !y.is_finite() || y.abs() > cap {
        Err(Error::Blowup { x })
    } else {
        Ok(())
    }
}

/// Classical RK4 with `steps` equal steps from `x0` to `x1` (either direction).
pub fn rk4_integrate<F: Fn(f64, f64) -> f64>(
    f: F,
    x0: f64,
    y0: f64,
    x1: f64,
    steps: usize,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidParams("steps must be positive".into()));
    }
    let h = (x1 - x0) / steps as f64;
    let mut xs = Vec::with_capacity(steps + 1);
    let mut ys = Vec::with_capacity(steps + 1);
    xs.push(x0);
    ys.push(y0);
    let mut y = y0;
    for i in 0..steps {
        let x = x0 + i as f64 * h;
        y = rk4_step(&f, x, y, h);
        let xn = if i + 1 == steps { x1 } else { x0 + (i + 1) as f64 * h };
        check_cap(xn, y, BLOWUP_CAP)?;
        xs.push(xn);
        ys.push(y);
    }
    Ok(Trajectory { xs, ys })
}

/// RK4 through the given nodes in order.
pub fn rk4_on_grid<F: Fn(f64, f64) -> f64>(f: F, nodes: &[f64], y0: f64) -> Result<Trajectory> {
    if nodes.len() < 2 {
        return Err(Error::InvalidParams("need at least two nodes".into()));
    }
    let mut ys = Vec::with_capacity(nodes.len());
    ys.push(y0);
    let mut y = y0;
    for w in nodes.windows(2) {
        y = rk4_step(&f, w[0], y, w[1] - w[0]);
        check_cap(w[1], y, BLOWUP_CAP)?;
        ys.push(y);
    }
    Ok(Trajectory { xs: nodes.to_vec(), ys })
}

/// Bisection on a sign change; returns the midpoint of the final bracket.
pub fn bisect<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || glo.is_nan() || ghi.is_nan() {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..2000 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, for a predicate true on a prefix.
pub fn bisect_predicate<P: Fn(f64) -> bool>(pred: P, lo: f64, hi: f64, iters: usize) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..iters {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn tanh_sum_basics() {
        assert_eq!(tanh_sum(0.0, 0.0), 0.0);
        assert_eq!(tanh_sum(40.0, -40.0), 0.0);
        let u = tanh_sum_unit(20.0, 20.0);
        assert!(rel(u.gap(), 3.609_702_775_690_830_3e-35) < 1e-14);
        assert_eq!(u.value(), 1.0);
    }

    #[test]
    fn tanh_sum_is_bitwise_symmetric() {
        for &(a, b) in &[(0.3, 17.0), (-2.0, 40.0), (1e-3, 0.2), (25.0, 3.5), (-30.0, -0.7)] {
            assert_eq!(tanh_sum_unit(a, b), tanh_sum_unit(b, a));
        }
    }

    #[test]
    fn atanh_values() {
        assert_eq!(atanh_safe(UnitValue::Direct(0.0)).unwrap(), 0.0);
        let v = atanh_safe(UnitValue::Direct(0.5)).unwrap();
        assert!(rel(v, 0.549_306_144_334_054_8) < 1e-15);
        let v = atanh_safe(UnitValue::complement(1e-20)).unwrap();
        assert!(rel(v, 23.372_424_520_220_43) < 1e-14);
        assert!(atanh_safe(UnitValue::Direct(1.0)).is_err());
        assert!(atanh_safe(UnitValue::Direct(-1.5)).is_err());
        assert!(atanh_safe(UnitValue::complement(0.0)).is_err());
    }

    #[test]
    fn saturating_arg() {
        assert!(SaturatingArg::new(f64::NAN).is_err());
        let a = SaturatingArg::new(30.0).unwrap();
        assert!(rel(a.tanh_complement(), 2.0 * (-60.0f64).exp()) < 1e-14);
        let a = SaturatingArg::new(-3.0).unwrap();
        assert!(rel(a.tanh_complement(), 1.0 - (-3.0f64).tanh()) < 1e-15);
    }

    #[test]
    fn grids() {
        let g = Grid::uniform(5).unwrap();
        assert_eq!(g.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = Grid::graded(101, 3.0).unwrap();
        assert_eq!(g.count(), 101);
        assert!(g.points()[1] < 0.01);
        assert!(Grid::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Grid::new(vec![0.1, 1.0]).is_err());
    }

    #[test]
    fn rk4_exponential() {
        let tr = rk4_integrate(|_, y| y, 0.0, 1.0, 1.0, 1000).unwrap();
        assert!((tr.terminal() - std::f64::consts::E).abs() < 1e-11);
        let tr = rk4_integrate(|_, _| 0.0, 0.0, 2.5, 1.0, 10).unwrap();
        assert_eq!(tr.terminal(), 2.5);
        assert_eq!(tr.xs.len(), 11);
    }

    #[test]
    fn rk4_order_four() {
        let err = |n| (rk4_integrate(|_, y| y, 0.0, 1.0, 1.0, n).unwrap().terminal() - std::f64::consts::E).abs();
        let ratio = err(20) / err(40);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rk4_blowup() {
        let r = rk4_integrate(|_, y| y * y, 0.0, 1.0, 2.0, 1000);
        assert!(matches!(r, Err(Error::Blowup { .. })));
    }

    #[test]
    fn rk4_grid_matches_uniform() {
        let g = Grid::uniform(101).unwrap();
        let a = rk4_on_grid(|x, y| x * y, g.points(), 1.0).unwrap();
        let b = rk4_integrate(|x, y| x * y, 0.0, 1.0, 1.0, 100).unwrap();
        assert!((a.terminal() - b.terminal()).abs() < 1e-14);
    }

    #[test]
    fn bisection() {
        let r = bisect(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(bisect(|x| x, -1.0, 1.0, 1e-12).unwrap(), 0.0);
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(Error::NoBracket { .. })));
        let a = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-12).unwrap();
        let b = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn predicate_bisection() {
        let x = bisect_predicate(|x| x * x < 0.5, 0.0, 1.0, 100);
        assert!((x - 0.5f64.sqrt()).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn atanh_inverts_tanh(a in -300.0f64..300.0) {
            let back = atanh_safe(tanh_sum_unit(a, 0.0)).unwrap();
            proptest::prop_assert!((back - a).abs() <= 1e-12 * a.abs().max(1e-300));
        }

        #[test]
        fn tanh_sum_commutes(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            proptest::prop_assert_eq!(tanh_sum_unit(a, b), tanh_sum_unit(b, a));
        }

        #[test]
        fn tanh_sum_matches_direct(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            proptest::prop_assert!((tanh_sum(a, b) - (a + b).tanh()).abs() < 1e-15);
        }

        #[test]
        fn gap_matches_one_minus_tanh(x in 0.0f64..20.0) {
            proptest::prop_assert!((tanh_gap(x) - (1.0 - x.tanh())).abs() <= 1e-15 * (1.0 + tanh_gap(x)));
        }
    }
}
