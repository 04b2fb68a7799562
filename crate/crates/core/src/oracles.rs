//! Closed-form reference solutions, a finite-difference evaluator of the
//! graph operator, and a 1D shooting solver for strip and radial problems.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;
use thiserror::Error;

use crate::geom::Point;
use crate::metric::{ConformalMetric, MetricError};
use crate::solver::ProblemKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("({x}, {y}) lies outside the validity domain of {field}")]
    OutsideDomain { field: String, x: f64, y: f64 },
    #[error("finite-difference stencil of width {step} at ({x}, {y}) leaves the domain")]
    StencilOutside { x: f64, y: f64, step: f64 },
    #[error("invalid oracle parameter: {0}")]
    InvalidParameter(String),
    #[error("shooting failed to bracket the target: parameter in [{lo}, {hi}] gives misfit [{misfit_lo}, {misfit_hi}]")]
    Bracket {
        lo: f64,
        hi: f64,
        misfit_lo: f64,
        misfit_hi: f64,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Scherk's surface `ln cos x − ln cos y` on the open square `(−π/2, π/2)²`.
pub fn scherk(x: f64, y: f64) -> Result<f64, OracleError> {
    OracleField::Scherk.value(Point::new(x, y))
}

/// Grim reaper `−(1/c)·ln cos(c x)` on `|c x| < π/2`.
pub fn grim_reaper(x: f64, c: f64) -> Result<f64, OracleError> {
    OracleField::grim_reaper(c)?.value(Point::new(x, 0.0))
}

/// Lower spherical cap `−√(R² − x² − y²)`.
pub fn spherical_cap(x: f64, y: f64, r: f64) -> Result<f64, OracleError> {
    OracleField::spherical_cap(r)?.value(Point::new(x, y))
}

/// An exact Euclidean solution of one of the graph equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum OracleField {
    Scherk,
    /// Grim reaper in `x`, constant in `y`.
    GrimReaper { c: f64 },
    SphericalCap { radius: f64 },
}

impl OracleField {
    pub fn grim_reaper(c: f64) -> Result<Self, OracleError> {
        if c > 0.0 && c.is_finite() {
            Ok(OracleField::GrimReaper { c })
        } else {
            Err(OracleError::InvalidParameter(format!("translator speed must be positive, got {c}")))
        }
    }

    pub fn spherical_cap(radius: f64) -> Result<Self, OracleError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(OracleField::SphericalCap { radius })
        } else {
            Err(OracleError::InvalidParameter(format!("radius must be positive, got {radius}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OracleField::Scherk => "scherk",
            OracleField::GrimReaper { .. } => "grim_reaper",
            OracleField::SphericalCap { .. } => "spherical_cap",
        }
    }

    /// The equation this field solves, with `H0 = 2/R` for the cap.
    pub fn kind(&self) -> ProblemKind {
        match *self {
            OracleField::Scherk => ProblemKind::Minimal,
            OracleField::GrimReaper { c } => ProblemKind::Translator { c },
            OracleField::SphericalCap { radius } => ProblemKind::Cmc { h0: 2.0 / radius },
        }
    }

    /// Whether `p` lies in the open validity domain.
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            OracleField::Scherk => p.x.abs() < FRAC_PI_2 && p.y.abs() < FRAC_PI_2,
            OracleField::GrimReaper { c } => (c * p.x).abs() < FRAC_PI_2 && p.y.is_finite(),
            OracleField::SphericalCap { radius } => p.norm_sq() < radius * radius,
        }
    }

    fn inside(&self, p: Point) -> Result<(), OracleError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(OracleError::OutsideDomain {
                field: self.name().into(),
                x: p.x,
                y: p.y,
            })
        }
    }

    pub fn value(&self, p: Point) -> Result<f64, OracleError> {
        self.inside(p)?;
        Ok(match *self {
            OracleField::Scherk => p.x.cos().ln() - p.y.cos().ln(),
            OracleField::GrimReaper { c } => -(c * p.x).cos().ln() / c,
            OracleField::SphericalCap { radius } => -(radius * radius - p.norm_sq()).sqrt(),
        })
    }

    pub fn gradient(&self, p: Point) -> Result<Point, OracleError> {
        self.inside(p)?;
        Ok(match *self {
            OracleField::Scherk => Point::new(-p.x.tan(), p.y.tan()),
            OracleField::GrimReaper { c } => Point::new((c * p.x).tan(), 0.0),
            OracleField::SphericalCap { radius } => p * (1.0 / (radius * radius - p.norm_sq()).sqrt()),
        })
    }

    /// Right-hand side `F` of `div(∇u/W) = F` at `p`: 0, `c/W` or `2/R`.
    pub fn rhs(&self, p: Point) -> Result<f64, OracleError> {
        self.inside(p)?;
        Ok(match *self {
            OracleField::Scherk => 0.0,
            OracleField::GrimReaper { c } => c * (c * p.x).cos(),
            OracleField::SphericalCap { radius } => 2.0 / radius,
        })
    }
}

/// A scalar field that can be sampled pointwise; `None` outside its domain.
pub trait ScalarField {
    fn sample(&self, p: Point) -> Option<f64>;
}

impl ScalarField for OracleField {
    fn sample(&self, p: Point) -> Option<f64> {
        self.value(p).ok()
    }
}

impl<F: Fn(Point) -> Option<f64>> ScalarField for F {
    fn sample(&self, p: Point) -> Option<f64> {
        self(p)
    }
}

/// `(1/λ²)·div_e(∇u/W)` with `W = √(1 + |∇u|²/λ²)` by central differences of
/// step `h`; fluxes live on the half-step points of a 3×3 stencil.
pub fn fd_divergence(
    u: &impl ScalarField,
    metric: &ConformalMetric,
    p: Point,
    h: f64,
) -> Result<f64, OracleError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(OracleError::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let mut s = [[0.0; 3]; 3];
    for (i, row) in s.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let q = p + Point::new((i as f64 - 1.0) * h, (j as f64 - 1.0) * h);
            *v = u.sample(q).ok_or(OracleError::StencilOutside { x: p.x, y: p.y, step: h })?;
        }
    }
    let flux = |q: Point, g: Point| -> Result<Point, OracleError> {
        let l = metric.lambda(q)?;
        Ok(g * (1.0 / (1.0 + g.norm_sq() / (l * l)).sqrt()))
    };
    // x-faces at (i ± 1/2, 1), y-faces at (1, j ± 1/2)
    let gx = |i: usize| {
        Point::new(
            (s[i + 1][1] - s[i][1]) / h,
            (s[i + 1][2] + s[i][2] - s[i + 1][0] - s[i][0]) / (4.0 * h),
        )
    };
    let gy = |j: usize| {
        Point::new(
            (s[2][j + 1] + s[2][j] - s[0][j + 1] - s[0][j]) / (4.0 * h),
            (s[1][j + 1] - s[1][j]) / h,
        )
    };
    let half = 0.5 * h;
    let fe = flux(p + Point::new(half, 0.0), gx(1))?.x;
    let fw = flux(p - Point::new(half, 0.0), gx(0))?.x;
    let fnn = flux(p + Point::new(0.0, half), gy(1))?.y;
    let fs = flux(p - Point::new(0.0, half), gy(0))?.y;
    let l = metric.lambda(p)?;
    Ok(((fe - fw) + (fnn - fs)) / (h * l * l))
}

/// One-dimensional reduction solved by `ode_shoot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OdeKind {
    /// `u'' = 0`
    Minimal,
    /// `u'' = c(1 + u'²)`
    Translator { c: f64 },
    /// Radial constant mean curvature `(r u'/W)'/r = H` with `u'(0) = 0`.
    CmcRadial { h: f64 },
}

/// Reference profile on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Converged shooting parameter: initial slope, or centre value for radial problems.
    pub parameter: f64,
}

impl Profile {
    /// Linear interpolation at `x` inside the grid.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (a, b) = (self.x[0], *self.x.last()?);
        if !(x >= a && x <= b) {
            return None;
        }
        let n = self.x.len() - 1;
        let k = (((x - a) / (b - a)) * n as f64).floor().min(n as f64 - 1.0) as usize;
        let t = (x - self.x[k]) / (self.x[k + 1] - self.x[k]);
        Some(self.u[k] + t * (self.u[k + 1] - self.u[k]))
    }
}

/// Fraction of the interval bounding the RK4 step.
const MAX_STEP_FRACTION: f64 = 1e-4;
/// Slope magnitude treated as blow-up.
const BLOW_UP: f64 = 1e12;

/// State `(u, q)`: `q = u'` for strips, `q = u'/W` for the radial problem.
fn rhs(kind: OdeKind, x: f64, y: [f64; 2]) -> [f64; 2] {
    match kind {
        OdeKind::Minimal => [y[1], 0.0],
        OdeKind::Translator { c } => [y[1], c * (1.0 + y[1] * y[1])],
        OdeKind::CmcRadial { h } => {
            let slope = y[1] / (1.0 - y[1] * y[1]).sqrt();
            // regular centre: q/r → q'(0) = H/2
            let q_over_r = if x == 0.0 { 0.5 * h } else { y[1] / x };
            [slope, h - q_over_r]
        }
    }
}

fn rk4_step(kind: OdeKind, x: f64, y: [f64; 2], dx: f64) -> [f64; 2] {
    let add = |y: [f64; 2], k: [f64; 2], s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    let k1 = rhs(kind, x, y);
    let k2 = rhs(kind, x + 0.5 * dx, add(y, k1, 0.5 * dx));
    let k3 = rhs(kind, x + 0.5 * dx, add(y, k2, 0.5 * dx));
    let k4 = rhs(kind, x + dx, add(y, k3, dx));
    [
        y[0] + dx / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + dx / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrates across the interval, recording grid values; `None` on blow-up.
fn integrate(kind: OdeKind, (a, b): (f64, f64), y0: [f64; 2], grid: usize) -> Option<Vec<[f64; 2]>> {
    let per_cell = ((1.0 / MAX_STEP_FRACTION) / grid as f64).ceil() as usize;
    let steps = grid * per_cell;
    let dx = (b - a) / steps as f64;
    let mut y = y0;
    let mut out = vec![y];
    for k in 0..steps {
        y = rk4_step(kind, a + k as f64 * dx, y, dx);
        let bad = match kind {
            OdeKind::CmcRadial { .. } => !(y[1].abs() < 1.0),
            _ => !(y[1].abs() < BLOW_UP),
        };
        if bad || !y[0].is_finite() {
            return None;
        }
        if (k + 1) % per_cell == 0 {
            out.push(y);
        }
    }
    Some(out)
}

/// Two-point boundary value problem by RK4 shooting and bisection.
///
/// Strip problems take `left = Some(u(a))` and shoot on the slope. The radial
/// problem needs `a = 0` and `left = None` (regular centre) and shoots on `u(0)`.
pub fn ode_shoot(
    kind: OdeKind,
    interval: (f64, f64),
    left: Option<f64>,
    right: f64,
    grid: usize,
) -> Result<Profile, OracleError> {
    let (a, b) = interval;
    let bad = |m: String| Err(OracleError::InvalidParameter(m));
    if !(a.is_finite() && b.is_finite() && b > a) {
        return bad(format!("interval ({a}, {b}) must be finite and increasing"));
    }
    if grid == 0 || !right.is_finite() {
        return bad("grid must be positive and the right value finite".into());
    }
    match (kind, left) {
        (OdeKind::Translator { c }, _) if !(c > 0.0 && c.is_finite()) => {
            return bad(format!("translator speed must be positive, got {c}"))
        }
        (OdeKind::CmcRadial { .. }, Some(_)) => return bad("the radial problem takes no left value".into()),
        (OdeKind::CmcRadial { .. }, None) if a != 0.0 => {
            return bad("the radial problem starts at the centre r = 0".into())
        }
        (OdeKind::CmcRadial { h }, None) if !h.is_finite() => return bad(format!("H must be finite, got {h}")),
        (OdeKind::Minimal | OdeKind::Translator { .. }, None) => {
            return bad("strip problems need a left value".into())
        }
        (_, Some(l)) if !l.is_finite() => return bad("left value must be finite".into()),
        _ => {}
    }
    let start = |s: f64| match kind {
        OdeKind::CmcRadial { .. } => [s, 0.0],
        _ => [left.unwrap_or(0.0), s],
    };
    // misfit u(b) − right, increasing in the shooting parameter; blow-up counts as +∞
    let misfit = |s: f64| match integrate(kind, interval, start(s), grid) {
        Some(path) => path.last().unwrap()[0] - right,
        None => f64::INFINITY,
    };
    let guess = match kind {
        OdeKind::CmcRadial { .. } => right,
        _ => (right - left.unwrap_or(0.0)) / (b - a),
    };
    let (mut lo, mut hi) = (guess - 1.0, guess + 1.0);
    let (mut flo, mut fhi) = (misfit(lo), misfit(hi));
    let mut width = 1.0;
    for _ in 0..200 {
        if flo <= 0.0 && fhi >= 0.0 {
            break;
        }
        width *= 2.0;
        if flo > 0.0 {
            hi = lo;
            fhi = flo;
            lo -= width;
            flo = misfit(lo);
        } else {
            // overshoot is blow-up: shrink toward the last undershoot
            lo = hi;
            flo = fhi;
            hi += width;
            fhi = misfit(hi);
        }
    }
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(OracleError::Bracket {
            lo,
            hi,
            misfit_lo: flo,
            misfit_hi: fhi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = misfit(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let path = integrate(kind, interval, start(s), grid).ok_or(OracleError::Bracket {
        lo,
        hi,
        misfit_lo: flo,
        misfit_hi: fhi,
    })?;
    let x = (0..=grid).map(|k| a + (b - a) * k as f64 / grid as f64).collect();
    let du = path
        .iter()
        .map(|y| match kind {
            OdeKind::CmcRadial { .. } => y[1] / (1.0 - y[1] * y[1]).sqrt(),
            _ => y[1],
        })
        .collect();
    Ok(Profile {
        x,
        u: path.iter().map(|y| y[0]).collect(),
        du,
        parameter: s,
    })
}

/// One row of the oracle identity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub field: String,
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub fd_divergence: f64,
    pub rhs: f64,
    pub abs_error: f64,
}

/// Values and divergence identities of each oracle at fixed points.
pub fn identity_table(step: f64) -> Result<Vec<IdentityRow>, OracleError> {
    let euclid = ConformalMetric::euclidean();
    let cases = [
        (OracleField::Scherk, Point::new(0.0, 0.0)),
        (OracleField::Scherk, Point::new(1.0, 0.0)),
        (OracleField::Scherk, Point::new(0.5, 0.3)),
        (OracleField::grim_reaper(1.0)?, Point::new(0.5, 0.0)),
        (OracleField::grim_reaper(1.0)?, Point::new(std::f64::consts::FRAC_PI_3, 0.0)),
        (OracleField::grim_reaper(2.0)?, Point::new(std::f64::consts::PI / 6.0, 0.0)),
        (OracleField::spherical_cap(1.0)?, Point::new(0.0, 0.0)),
        (OracleField::spherical_cap(2.0)?, Point::new(0.3, 0.4)),
    ];
    cases
        .iter()
        .map(|(f, p)| {
            let d = fd_divergence(f, &euclid, *p, step)?;
            let r = f.rhs(*p)?;
            Ok(IdentityRow {
                field: f.name().into(),
                x: p.x,
                y: p.y,
                value: f.value(*p)?,
                fd_divergence: d,
                rhs: r,
                abs_error: (d - r).abs(),
            })
        })
        .collect()
}

pub fn identity_csv(rows: &[IdentityRow]) -> String {
    let mut s = String::from("field,x,y,value,fd_divergence,rhs,abs_error\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.field, r.x, r.y, r.value, r.fd_divergence, r.rhs, r.abs_error
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, LN_2, PI};

    #[test]
    fn closed_form_values() {
        assert_eq!(scherk(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(scherk(0.7, 0.7).unwrap(), 0.0);
        assert!((scherk(1.0, 0.0).unwrap() + 0.615626).abs() < 1e-6);
        assert!(scherk(1.6, 0.0).is_err());
        assert_eq!(grim_reaper(0.0, 1.0).unwrap(), 0.0);
        assert!((grim_reaper(FRAC_PI_3, 1.0).unwrap() - LN_2).abs() < 1e-14);
        assert!((grim_reaper(PI / 6.0, 2.0).unwrap() - LN_2 / 2.0).abs() < 1e-14);
        assert!(grim_reaper(1.0, 2.0).is_err());
        assert!(grim_reaper(0.1, -1.0).is_err());
        assert_eq!(spherical_cap(0.0, 0.0, 1.0).unwrap(), -1.0);
        assert!(spherical_cap(1.0, 0.5, 1.0).is_err());
        // flat limit
        let r = 1e6;
        assert!((spherical_cap(0.3, 0.4, r).unwrap() + r).abs() < 1e-6);
    }

    #[test]
    fn divergence_identities() {
        let e = ConformalMetric::euclidean();
        let c = |_: Point| Some(3.5);
        assert_eq!(fd_divergence(&c, &e, Point::new(0.1, 0.2), 0.01).unwrap(), 0.0);
        let d = fd_divergence(&OracleField::Scherk, &e, Point::new(0.5, 0.3), 1e-4).unwrap();
        assert!(d.abs() < 1e-6, "{d}");
        let g = OracleField::grim_reaper(1.0).unwrap();
        let d = fd_divergence(&g, &e, Point::new(0.5, 7.0), 1e-4).unwrap();
        assert!((d - 0.5f64.cos()).abs() < 1e-6, "{d}");
        let cap = OracleField::spherical_cap(2.0).unwrap();
        let d = fd_divergence(&cap, &e, Point::new(0.3, 0.4), 1e-4).unwrap();
        assert!((d - 1.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn stencil_outside_is_an_error() {
        let e = ConformalMetric::euclidean();
        assert!(matches!(
            fd_divergence(&OracleField::Scherk, &e, Point::new(1.57, 0.0), 0.01),
            Err(OracleError::StencilOutside { .. })
        ));
    }

    #[test]
    fn minimal_shooting_is_a_line() {
        let p = ode_shoot(OdeKind::Minimal, (0.0, 1.0), Some(0.0), 1.0, 10).unwrap();
        for (x, u) in p.x.iter().zip(&p.u) {
            assert!((u - x).abs() < 1e-12);
        }
    }

    #[test]
    fn translator_shooting_recovers_grim_reaper() {
        let v = -(1.2f64).cos().ln();
        let p = ode_shoot(OdeKind::Translator { c: 1.0 }, (-1.2, 1.2), Some(v), v, 24).unwrap();
        for (x, u) in p.x.iter().zip(&p.u) {
            assert!((u + x.cos().ln()).abs() < 1e-8, "{x} {u}");
        }
    }

    #[test]
    fn radial_shooting_recovers_cap() {
        let right = -(3.0f64).sqrt();
        let p = ode_shoot(OdeKind::CmcRadial { h: 1.0 }, (0.0, 1.0), None, right, 20).unwrap();
        for (r, u) in p.x.iter().zip(&p.u) {
            assert!((u + (4.0 - r * r).sqrt()).abs() < 1e-8, "{r} {u}");
        }
        assert!(ode_shoot(OdeKind::CmcRadial { h: 1.0 }, (0.0, 1.0), Some(0.0), right, 20).is_err());
    }

    #[test]
    fn impossible_translator_bracket_reports_diagnostics() {
        // no grim reaper spans a strip wider than π/c
        let r = ode_shoot(OdeKind::Translator { c: 1.0 }, (-2.0, 2.0), Some(0.0), 0.0, 10);
        assert!(matches!(r, Err(OracleError::Bracket { .. })), "{r:?}");
    }

    #[test]
    fn identity_table_is_consistent() {
        let rows = identity_table(1e-4).unwrap();
        assert!(rows.iter().all(|r| r.abs_error < 1e-6));
        let csv = identity_csv(&rows);
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }
}
