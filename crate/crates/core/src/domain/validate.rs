use serde::Serialize;

use super::{ArcGeometry, ArcKind, CheckMode, DomainError, DomainSpec};
use crate::geom;
use crate::metric::NormalSide;

/// Samples per arc used for curvature checks.
pub(crate) const CURVATURE_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcValidation {
    pub arc: String,
    pub kind: super::ArcKind,
    pub metric_length: f64,
    pub min_kappa: f64,
    pub max_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub length_scale: f64,
    pub euclidean_area: f64,
    pub arcs: Vec<ArcValidation>,
}

/// Closed simple counterclockwise boundary, A/A and B/B endpoint
/// disjointness, convex C arcs, and geodesic A/B arcs outside CMC mode.
pub fn validate_domain(spec: &DomainSpec, mode: CheckMode) -> Result<ValidationReport, DomainError> {
    let n = spec.arcs.len();
    let diam_e = {
        let pts: Vec<_> = spec
            .arcs
            .iter()
            .flat_map(|a| a.geometry.sample_uniform(16))
            .collect();
        geom::diameter(&pts)
    };
    if !(diam_e > 0.0) {
        return Err(DomainError::BadGeometry {
            arc: spec.arcs[0].id.clone(),
            reason: "domain has zero extent".into(),
        });
    }
    let close_tol = 1e-9 * diam_e;
    for i in 0..n {
        let j = (i + 1) % n;
        let gap = spec.arcs[i].geometry.end().dist(spec.arcs[j].geometry.start());
        if gap > close_tol {
            return Err(DomainError::OpenBoundary {
                from: spec.arcs[i].id.clone(),
                to: spec.arcs[j].id.clone(),
                gap,
            });
        }
    }

    let step = spec.euclidean_perimeter() / 1024.0;
    let pieces: Vec<Vec<geom::Point>> = spec
        .arcs
        .iter()
        .map(|a| match &a.geometry {
            ArcGeometry::Segment { p, q } => vec![*p, *q],
            g => g.discretize(step),
        })
        .collect();
    for p in pieces.iter().flatten() {
        if !spec.metric.contains(*p) {
            return Err(DomainError::Metric(crate::metric::MetricError::OutsideDomain {
                x: p.x,
                y: p.y,
            }));
        }
    }
    check_simple(spec, &pieces, 1e-12 * diam_e * diam_e)?;

    let area = spec.euclidean_area();
    if !(area > 0.0) {
        return Err(DomainError::Clockwise { area });
    }

    if n > 1 {
        for i in 0..n {
            let j = (i + 1) % n;
            if i == j {
                continue;
            }
            let (ki, kj) = (spec.arcs[i].kind, spec.arcs[j].kind);
            if ki == kj && ki != ArcKind::C {
                return Err(DomainError::AdjacentBlowUp {
                    kind: ki,
                    first: spec.arcs[i].id.clone(),
                    second: spec.arcs[j].id.clone(),
                });
            }
        }
    }

    let scale = spec.length_scale()?;
    let curv_slack = 1e-6 / scale;
    let mut arcs = Vec::with_capacity(n);
    for a in &spec.arcs {
        let ks = a.curvature_samples(&spec.metric, NormalSide::Left, CURVATURE_SAMPLES)?;
        let min_kappa = ks.iter().map(|k| k.1).fold(f64::INFINITY, f64::min);
        let max_kappa = ks.iter().map(|k| k.1).fold(f64::NEG_INFINITY, f64::max);
        match a.kind {
            ArcKind::C => {
                if min_kappa < -curv_slack {
                    return Err(DomainError::NonConvex {
                        arc: a.id.clone(),
                        min_kappa,
                    });
                }
            }
            ArcKind::A | ArcKind::B => {
                let worst = min_kappa.abs().max(max_kappa.abs());
                if !matches!(mode, CheckMode::Cmc { .. }) && worst > curv_slack {
                    return Err(DomainError::NonGeodesic {
                        arc: a.id.clone(),
                        max_kappa: worst,
                    });
                }
            }
        }
        arcs.push(ArcValidation {
            arc: a.id.clone(),
            kind: a.kind,
            metric_length: a.length(&spec.metric)?,
            min_kappa,
            max_kappa,
        });
    }
    Ok(ValidationReport {
        vertex_count: spec.vertices.len(),
        length_scale: scale,
        euclidean_area: area,
        arcs,
    })
}

/// No two pieces of the boundary polyline meet except at shared endpoints of
/// consecutive pieces.
fn check_simple(
    spec: &DomainSpec,
    pieces: &[Vec<geom::Point>],
    eps: f64,
) -> Result<(), DomainError> {
    // flattened segments with owning arc and position
    let mut segs = Vec::new();
    for (k, pts) in pieces.iter().enumerate() {
        for w in pts.windows(2) {
            segs.push((k, w[0], w[1]));
        }
    }
    let m = segs.len();
    for i in 0..m {
        for j in i + 1..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            let (ka, a0, a1) = segs[i];
            let (kb, b0, b1) = segs[j];
            if adjacent {
                // consecutive segments may only share their common point; a
                // fold-back makes them overlap
                let (shared, pa, pb) = if j == i + 1 { (a1, a0, b1) } else { (a0, a1, b0) };
                let (u, v) = (pa - shared, pb - shared);
                if u.cross(v).abs() <= eps && u.dot(v) > 0.0 {
                    return Err(DomainError::SelfIntersection {
                        first: spec.arcs[ka].id.clone(),
                        second: spec.arcs[kb].id.clone(),
                    });
                }
                continue;
            }
            if geom::segments_intersect(a0, a1, b0, b1, eps) {
                return Err(DomainError::SelfIntersection {
                    first: spec.arcs[ka].id.clone(),
                    second: spec.arcs[kb].id.clone(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::presets::*;
    use super::*;
    use crate::geom::Point;
    use crate::metric::ConformalMetric;
    use ArcKind::*;

    #[test]
    fn scherk_square_is_valid() {
        let r = validate_domain(&scherk_square(std::f64::consts::FRAC_PI_2), CheckMode::Minimal)
            .unwrap();
        assert_eq!(r.vertex_count, 4);
        assert!((r.length_scale - std::f64::consts::PI * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn adjacent_a_arcs_rejected() {
        let d = rectangle("x", (0.0, 1.0), (0.0, 1.0), [A, C, C, A], "0").unwrap();
        match validate_domain(&d, CheckMode::Minimal) {
            Err(DomainError::AdjacentBlowUp { kind, first, second }) => {
                assert_eq!(kind, A);
                assert_eq!((first.as_str(), second.as_str()), ("s3", "s0"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn open_and_clockwise_boundaries_rejected() {
        let cw = polygon(
            "cw",
            &[Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)],
            &[C, C, C],
            "0",
        )
        .unwrap();
        assert!(matches!(
            validate_domain(&cw, CheckMode::Minimal),
            Err(DomainError::Clockwise { .. })
        ));
        let mut open = rectangle("o", (0.0, 1.0), (0.0, 1.0), [C, C, C, C], "0").unwrap();
        open.arcs[2].geometry = ArcGeometry::Segment {
            p: Point::new(1.0, 1.0),
            q: Point::new(0.0, 0.9),
        };
        assert!(matches!(
            validate_domain(&open, CheckMode::Minimal),
            Err(DomainError::OpenBoundary { .. })
        ));
    }

    #[test]
    fn bow_tie_self_intersects() {
        let d = polygon(
            "bow",
            &[
                Point::new(0.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
            &[C, C, C, C],
            "0",
        )
        .unwrap();
        assert!(matches!(
            validate_domain(&d, CheckMode::Minimal),
            Err(DomainError::SelfIntersection { .. })
        ));
    }

    #[test]
    fn curved_blow_up_arc_is_not_geodesic() {
        let lens = lens(1.0, 0.8, A, 1.0, "0").unwrap();
        assert!(matches!(
            validate_domain(&lens, CheckMode::Minimal),
            Err(DomainError::NonGeodesic { .. })
        ));
        assert!(validate_domain(&lens, CheckMode::Cmc { h: 1.0 }).is_ok());
    }

    #[test]
    fn concave_c_arc_rejected() {
        // unit square whose top side bulges inward
        let mut d = rectangle("c", (0.0, 1.0), (0.0, 1.0), [C, C, C, C], "0").unwrap();
        let c = Point::new(0.5, 2.0);
        let r = c.dist(Point::new(1.0, 1.0));
        let a0 = (1.0f64 - 2.0).atan2(0.5);
        let a1 = (1.0f64 - 2.0).atan2(-0.5);
        d.arcs[2].geometry = ArcGeometry::CircularArc {
            center: c,
            radius: r,
            from_angle: a0,
            to_angle: a1,
            ccw: false,
        };
        assert!(matches!(
            validate_domain(&d, CheckMode::Minimal),
            Err(DomainError::NonConvex { .. })
        ));
    }

    #[test]
    fn poincare_diameter_arc_is_geodesic() {
        // half of a Euclidean disk of radius 0.5 in the Poincaré disk: the
        // diameter is a hyperbolic geodesic
        let m = ConformalMetric::poincare_disk(1.0).unwrap();
        let arcs = vec![
            super::super::Arc {
                id: "d".into(),
                kind: A,
                geometry: ArcGeometry::Segment {
                    p: Point::new(-0.5, 0.0),
                    q: Point::new(0.5, 0.0),
                },
                data: None,
            },
            super::super::Arc {
                id: "c".into(),
                kind: C,
                geometry: ArcGeometry::CircularArc {
                    center: Point::new(0.0, 0.0),
                    radius: 0.5,
                    from_angle: 0.0,
                    to_angle: std::f64::consts::PI,
                    ccw: true,
                },
                data: Some(crate::expr::Expr::parse("0").unwrap()),
            },
        ];
        let d = DomainSpec::new("half", m, arcs).unwrap();
        let r = validate_domain(&d, CheckMode::Minimal).unwrap();
        assert!((r.arcs[0].metric_length - 2.0 * 2.0 * 0.5f64.atanh()).abs() < 1e-9);
    }
}
