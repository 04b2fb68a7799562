mod common;

use std::sync::Arc;

use jsgraph::analysis::{weighted_area, GraphSurface};
use jsgraph::domain::presets::{polygon, rectangle};
use jsgraph::domain::{check_minimal, ArcKind};
use jsgraph::geom::Point;
use jsgraph::mesh::{generate_mesh, read_jsmesh, write_jsmesh};
use jsgraph::metric::ConformalMetric;
use jsgraph::oracles::OracleField;
use jsgraph::solver::{compare, newton_solve, DirichletData, ProblemKind, SolverConfig};
use proptest::prelude::*;

use common::{canonical, minimal_verdict, rel_close, PolygonDomain};

fn kind_strategy() -> impl Strategy<Value = ArcKind> {
    prop_oneof![Just(ArcKind::A), Just(ArcKind::B), Just(ArcKind::C)]
}

/// Star-shaped polygon with 3 to 6 vertices, possibly nonconvex.
fn star_polygon() -> impl Strategy<Value = (Vec<[f64; 2]>, Vec<ArcKind>)> {
    (3usize..=6).prop_flat_map(|n| {
        (
            proptest::collection::vec((0.15f64..0.85, 0.5f64..1.3), n),
            proptest::collection::vec(kind_strategy(), n),
        )
            .prop_map(move |(polar, kinds)| {
                let step = std::f64::consts::TAU / n as f64;
                let vs = polar
                    .iter()
                    .enumerate()
                    .map(|(i, (frac, r))| {
                        let t = (i as f64 + frac) * step;
                        [r * t.cos(), r * t.sin()]
                    })
                    .collect();
                (vs, kinds)
            })
    })
}

fn mesh_of(w: f64, h: f64, step: f64) -> Arc<jsgraph::mesh::TriMesh> {
    use ArcKind::C;
    let spec = rectangle("box", (0.0, w), (0.0, h), [C, C, C, C], "0").unwrap();
    Arc::new(generate_mesh(&spec, step, 1.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn checker_matches_brute_force((vs, kinds) in star_polygon()) {
        let pts: Vec<Point> = vs.iter().map(|v| Point::new(v[0], v[1])).collect();
        let spec = polygon("random", &pts, &kinds, "0");
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        let report = check_minimal(&spec);
        prop_assume!(report.is_ok());
        let report = report.unwrap();
        let brute = PolygonDomain { vertices: vs, kinds }.enumerate();
        prop_assert_eq!(report.polygons.len(), brute.len());
        for b in &brute {
            let p = report.polygons.iter().find(|p| canonical(&p.vertices) == b.vertices);
            prop_assert!(p.is_some(), "missing {:?}", b.vertices);
            let p = p.unwrap();
            prop_assert!(rel_close(p.alpha, b.alpha, 1e-8) && rel_close(p.beta, b.beta, 1e-8));
            prop_assert!(rel_close(p.perimeter, b.perimeter, 1e-8) && rel_close(p.area, b.area, 1e-8));
        }
        let has_c = spec.has_kind(ArcKind::C);
        prop_assert_eq!(report.passed(), minimal_verdict(&brute, has_c, report.slack.strict, report.slack.equality));
    }

    #[test]
    fn scaling_and_relabeling_are_exact((vs, kinds) in star_polygon(), k in -3i32..=3) {
        let pts: Vec<Point> = vs.iter().map(|v| Point::new(v[0], v[1])).collect();
        let spec = polygon("random", &pts, &kinds, "0");
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        let base = check_minimal(&spec);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let s = 2f64.powi(k);
        let scaled = check_minimal(&spec.scaled(s).unwrap()).unwrap();
        let swapped = check_minimal(&spec.swapped_blow_up()).unwrap();
        prop_assert_eq!(base.verdict, scaled.verdict);
        prop_assert_eq!(base.verdict, swapped.verdict);
        for p in &base.polygons {
            let q = scaled.polygons.iter().find(|q| q.vertices == p.vertices).unwrap();
            prop_assert_eq!((q.alpha, q.beta, q.perimeter, q.area), (s * p.alpha, s * p.beta, s * p.perimeter, s * s * p.area));
            let r = swapped.polygons.iter().find(|r| r.vertices == p.vertices).unwrap();
            prop_assert_eq!((r.alpha, r.beta), (p.beta, p.alpha));
        }
    }

    #[test]
    fn solutions_shift_with_their_data(tau in -3.0f64..3.0, a in -1.0f64..1.0, c in 0.2f64..2.0) {
        let mesh = mesh_of(1.0, 1.0, 0.25);
        let data = DirichletData::from_fn(&mesh, |p| a * (2.0 * p.x).sin() + p.y * p.y).unwrap();
        let cfg = SolverConfig::default();
        let metric = ConformalMetric::euclidean();
        for kind in [ProblemKind::Minimal, ProblemKind::Translator { c }, ProblemKind::Cmc { h0: 0.5 }] {
            let u = newton_solve(mesh.clone(), &metric, &data, kind, &cfg).unwrap();
            let v = newton_solve(mesh.clone(), &metric, &data.shifted(tau), kind, &cfg).unwrap();
            for (x, y) in u.u.iter().zip(&v.u) {
                prop_assert!((y - x - tau).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn larger_data_gives_larger_solutions(bump in 0.0f64..1.0, c in 0.2f64..2.0) {
        let mesh = mesh_of(1.0, 1.0, 0.25);
        let low = DirichletData::from_fn(&mesh, |p| p.x - p.y).unwrap();
        let high = DirichletData::from_fn(&mesh, |p| p.x - p.y + bump * (std::f64::consts::PI * p.x).sin()).unwrap();
        let cfg = SolverConfig::default();
        let metric = ConformalMetric::euclidean();
        for kind in [ProblemKind::Minimal, ProblemKind::Translator { c }] {
            let u = newton_solve(mesh.clone(), &metric, &low, kind, &cfg).unwrap();
            let v = newton_solve(mesh.clone(), &metric, &high, kind, &cfg).unwrap();
            prop_assert!(compare(&v, &u, 1e-10).unwrap().holds);
        }
    }

    #[test]
    fn weighted_area_scales_under_vertical_shift(tau in -5.0f64..5.0, c in 0.1f64..3.0) {
        let mesh = mesh_of(1.0, 0.5, 0.2);
        let u: Vec<f64> = mesh.vertices.iter().map(|p| p.x * p.y).collect();
        let s = GraphSurface::new(mesh, u.clone(), ConformalMetric::euclidean()).unwrap();
        let t = s.with_heights(u.iter().map(|x| x + tau).collect()).unwrap();
        let (a, b) = (weighted_area(&s, c).unwrap(), weighted_area(&t, c).unwrap());
        prop_assert!((b.log_value - a.log_value - c * tau).abs() < 1e-12);
    }

    #[test]
    fn jsmesh_round_trips(w in 0.5f64..2.0, h in 0.5f64..2.0, step in 0.15f64..0.5) {
        let mesh = mesh_of(w, h, step);
        let back = read_jsmesh(&write_jsmesh(&mesh)).unwrap();
        prop_assert_eq!(&mesh.vertices, &back.vertices);
        prop_assert_eq!(&mesh.triangles, &back.triangles);
        prop_assert_eq!(&mesh.boundary_edges, &back.boundary_edges);
        prop_assert_eq!(&mesh.markers, &back.markers);
        prop_assert_eq!(&mesh.arc_ids, &back.arc_ids);
    }

    #[test]
    fn oracle_gradients_match_differences(x in -1.1f64..1.1, y in -1.1f64..1.1) {
        let p = Point::new(x, y);
        for f in [OracleField::Scherk, OracleField::grim_reaper(1.0).unwrap(), OracleField::spherical_cap(2.0).unwrap()] {
            let g = f.gradient(p).unwrap();
            let e = 1e-5;
            let dx = (f.value(Point::new(x + e, y)).unwrap() - f.value(Point::new(x - e, y)).unwrap()) / (2.0 * e);
            let dy = (f.value(Point::new(x, y + e)).unwrap() - f.value(Point::new(x, y - e)).unwrap()) / (2.0 * e);
            prop_assert!((g.x - dx).abs() < 1e-7 * (1.0 + g.x.abs()) && (g.y - dy).abs() < 1e-7 * (1.0 + g.y.abs()));
        }
    }
}
