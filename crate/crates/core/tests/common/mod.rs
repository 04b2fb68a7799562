//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's polygon enumeration or measurement code.

#![allow(dead_code)]

use jsgraph::domain::ArcKind;

/// One polygon found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct BrutePolygon {
    /// Vertex indices, counterclockwise, smallest index first.
    pub vertices: Vec<usize>,
    pub whole_boundary: bool,
    pub alpha: f64,
    pub beta: f64,
    pub perimeter: f64,
    pub area: f64,
}

/// Straight-sided Euclidean domain: side `i` joins vertex `i` to `i + 1`.
#[derive(Debug, Clone)]
pub struct PolygonDomain {
    pub vertices: Vec<[f64; 2]>,
    pub kinds: Vec<ArcKind>,
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn len(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = sub(b, a);
    let t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1]);
    let t = t.clamp(0.0, 1.0);
    len(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Even-odd ray casting, with points within `tol` of an edge counted inside.
fn in_closed_polygon(p: [f64; 2], ring: &[[f64; 2]], tol: f64) -> bool {
    let n = ring.len();
    if (0..n).any(|i| seg_dist(p, ring[i], ring[(i + 1) % n]) <= tol) {
        return true;
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if x > p[0] {
                inside = !inside;
            }
        }
    }
    inside
}

/// Proper or touching intersection of closed segments `ab` and `cd`.
fn segments_meet(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| cross(sub(q, p), sub(r, p));
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| seg_dist(r, p, q) < 1e-12;
    on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d)
}

fn signed_area(ring: &[[f64; 2]]) -> f64 {
    let n = ring.len();
    0.5 * (0..n).map(|i| cross(ring[i], ring[(i + 1) % n])).sum::<f64>()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

impl PolygonDomain {
    /// Every simple counterclockwise polygon on the domain vertices whose
    /// sides stay in the closed domain, without straight angles.
    pub fn enumerate(&self) -> Vec<BrutePolygon> {
        let n = self.vertices.len();
        let scale = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| len(self.vertices[i], self.vertices[j]))
            .fold(0.0, f64::max);
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if set.len() < 3 {
                continue;
            }
            for rest in permutations(&set[1..]) {
                let mut order = vec![set[0]];
                order.extend(rest);
                let ring: Vec<[f64; 2]> = order.iter().map(|&i| self.vertices[i]).collect();
                if signed_area(&ring) <= 0.0 {
                    continue;
                }
                let k = ring.len();
                let straight = (0..k).any(|i| {
                    let (a, b, c) = (ring[(i + k - 1) % k], ring[i], ring[(i + 1) % k]);
                    cross(sub(b, a), sub(c, b)).abs() < 1e-12 * scale * scale
                });
                if straight {
                    continue;
                }
                let simple = (0..k).all(|i| {
                    (i + 1..k).all(|j| {
                        let adjacent = j == i + 1 || (i == 0 && j == k - 1);
                        adjacent || !segments_meet(ring[i], ring[(i + 1) % k], ring[j], ring[(j + 1) % k])
                    })
                });
                if !simple {
                    continue;
                }
                let contained = (0..k).all(|i| {
                    let (a, b) = (ring[i], ring[(i + 1) % k]);
                    (0..=400).all(|s| {
                        let t = s as f64 / 400.0;
                        in_closed_polygon([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], &self.vertices, 1e-12 * scale)
                    })
                });
                if !contained {
                    continue;
                }
                let (mut alpha, mut beta, mut perimeter) = (0.0, 0.0, 0.0);
                for i in 0..k {
                    let (from, to) = (order[i], order[(i + 1) % k]);
                    let l = len(self.vertices[from], self.vertices[to]);
                    perimeter += l;
                    // a side between consecutive domain vertices lies on that boundary side
                    if to == (from + 1) % n {
                        match self.kinds[from] {
                            ArcKind::A => alpha += l,
                            ArcKind::B => beta += l,
                            ArcKind::C => {}
                        }
                    }
                }
                out.push(BrutePolygon {
                    whole_boundary: k == n && order.iter().enumerate().all(|(i, &v)| v == i),
                    vertices: order,
                    alpha,
                    beta,
                    perimeter,
                    area: signed_area(&ring),
                });
            }
        }
        out
    }

    pub fn has_c(&self) -> bool {
        self.kinds.contains(&ArcKind::C)
    }
}

/// Verdict of the minimal-surface conditions from brute-force records.
pub fn minimal_verdict(polys: &[BrutePolygon], has_c: bool, strict: f64, equality: f64) -> bool {
    polys.iter().all(|p| {
        if p.whole_boundary && !has_c {
            (p.alpha - p.beta).abs() <= equality
        } else {
            2.0 * p.alpha - p.perimeter < -strict && 2.0 * p.beta - p.perimeter < -strict
        }
    })
}

/// Verdict of the translating conditions: strict `2α < ℓ` everywhere.
pub fn translating_verdict(polys: &[BrutePolygon], strict: f64) -> bool {
    polys.iter().all(|p| 2.0 * p.alpha - p.perimeter < -strict)
}

/// Rotation of a vertex cycle starting at its smallest entry.
pub fn canonical(cycle: &[usize]) -> Vec<usize> {
    let k = cycle.iter().enumerate().min_by_key(|(_, v)| **v).map_or(0, |(i, _)| i);
    cycle[k..].iter().chain(&cycle[..k]).copied().collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Closed-form measures of the lens bounded by two unit-curvature arcs
/// `H = 1/r` of radius `r` and half-angle `theta`: `(α, ℓ, Area)` with the
/// upper arc counted in α.
pub fn lens_measures(r: f64, theta: f64) -> (f64, f64, f64) {
    let arc = 2.0 * r * theta;
    let segment = r * r * (theta - theta.sin() * theta.cos());
    (arc, 2.0 * arc, 2.0 * segment)
}
