//! Two-point geodesics of a conformal metric by shooting.
//!
//! A curve parametrized by Euclidean arclength with tangent angle θ is a
//! σ-geodesic iff `θ' = ∂_ν ln λ` (ν the left normal), so the boundary value
//! problem becomes a 2×2 root find over the initial angle and the length.

use crate::geom::Point;
use crate::metric::ConformalMetric;

const STEPS: usize = 256;
const MAX_ITERS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub points: Vec<Point>,
}

fn rhs(metric: &ConformalMetric, p: Point, th: f64) -> Option<(Point, f64)> {
    let t = Point::new(th.cos(), th.sin());
    let g = metric.dlog_lambda(p).ok()?;
    Some((t, g.dot(t.perp())))
}

/// Integrates from `a` with initial angle `th0` over Euclidean length `len`.
fn integrate(metric: &ConformalMetric, a: Point, th0: f64, len: f64) -> Option<Vec<Point>> {
    let ds = len / STEPS as f64;
    let mut p = a;
    let mut th = th0;
    let mut out = Vec::with_capacity(STEPS + 1);
    out.push(p);
    for _ in 0..STEPS {
        let (k1p, k1t) = rhs(metric, p, th)?;
        let (k2p, k2t) = rhs(metric, p + k1p * (0.5 * ds), th + 0.5 * ds * k1t)?;
        let (k3p, k3t) = rhs(metric, p + k2p * (0.5 * ds), th + 0.5 * ds * k2t)?;
        let (k4p, k4t) = rhs(metric, p + k3p * ds, th + ds * k3t)?;
        p = p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (ds / 6.0);
        th += ds / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
        if !p.is_finite() || !metric.contains(p) {
            return None;
        }
        out.push(p);
    }
    Some(out)
}

/// Geodesic from `a` to `b`, or `None` when shooting does not converge.
pub fn shoot_geodesic(metric: &ConformalMetric, a: Point, b: Point) -> Option<GeodesicPath> {
    let d = b - a;
    let dist = d.norm();
    if dist == 0.0 || !metric.contains(a) || !metric.contains(b) {
        return None;
    }
    if metric.is_euclidean() {
        return Some(GeodesicPath {
            points: (0..=STEPS)
                .map(|i| a.lerp(b, i as f64 / STEPS as f64))
                .collect(),
        });
    }
    let tol = 1e-12 * (1.0 + dist);
    let mut th = d.y.atan2(d.x);
    let mut len = dist;
    for _ in 0..MAX_ITERS {
        let path = integrate(metric, a, th, len)?;
        let f = *path.last().unwrap() - b;
        if f.norm() <= tol {
            let mut points = path;
            *points.last_mut().unwrap() = b;
            return Some(GeodesicPath { points });
        }
        let eps_t = 1e-7;
        let eps_l = 1e-7 * len;
        let ft = (*integrate(metric, a, th + eps_t, len)?.last().unwrap() - b - f) * (1.0 / eps_t);
        let fl = (*integrate(metric, a, th, len + eps_l)?.last().unwrap() - b - f) * (1.0 / eps_l);
        let det = ft.x * fl.y - ft.y * fl.x;
        if det.abs() < 1e-300 {
            return None;
        }
        let dth = (f.x * fl.y - f.y * fl.x) / det;
        let dl = (ft.x * f.y - ft.y * f.x) / det;
        // damp large corrections to stay in the basin
        let scale = (0.5 / dth.abs().max(1e-300)).min(0.5 * len / dl.abs().max(1e-300)).min(1.0);
        th -= scale * dth;
        len -= scale * dl;
        if !(len > 0.0) {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{geodesic_curvature, NormalSide};

    #[test]
    fn diameter_of_poincare_disk_is_straight() {
        let m = ConformalMetric::poincare_disk(1.0).unwrap();
        let g = shoot_geodesic(&m, Point::new(-0.5, 0.0), Point::new(0.5, 0.0)).unwrap();
        assert!(g.points.iter().all(|p| p.y.abs() < 1e-12));
    }

    #[test]
    fn off_center_hyperbolic_geodesic_is_orthogonal_circle() {
        let m = ConformalMetric::poincare_disk(1.0).unwrap();
        let (a, b) = (Point::new(-0.4, 0.3), Point::new(0.5, 0.2));
        let g = shoot_geodesic(&m, a, b).unwrap();
        // circle orthogonal to the unit circle through a and b: |c|² = 1 + r²
        // and |c − a| = |c − b| = r; solve the two linear equations for c.
        let (ea, eb) = (1.0 + a.norm_sq(), 1.0 + b.norm_sq());
        let det = 2.0 * (a.x * b.y - a.y * b.x);
        let c = Point::new((ea * b.y - eb * a.y) / det, (a.x * eb - b.x * ea) / det);
        let r = c.dist(a);
        for p in &g.points {
            assert!((p.dist(c) - r).abs() < 1e-6, "{}", (p.dist(c) - r).abs());
        }
        let k = geodesic_curvature(&g.points, &m, 128, NormalSide::Left).unwrap();
        assert!(k.abs() < 1e-4);
    }

    #[test]
    fn euclidean_geodesic_is_the_chord() {
        let m = ConformalMetric::euclidean();
        let g = shoot_geodesic(&m, Point::new(0.0, 0.0), Point::new(1.0, 2.0)).unwrap();
        assert_eq!(g.points[0], Point::new(0.0, 0.0));
        assert_eq!(*g.points.last().unwrap(), Point::new(1.0, 2.0));
    }
}
