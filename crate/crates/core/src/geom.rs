//! Planar geometry primitives shared by the metric, domain and mesh code.

use std::ops::{Add, Mul, Neg, Sub};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A point (or vector) in the coordinate plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation by a right angle.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::new(p[0], p[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when counterclockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * orient(a, b, c)
}

/// Signed shoelace area of a closed polygon given by its vertex list.
pub fn polygon_area(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += points[i].cross(points[(i + 1) % n]);
    }
    0.5 * s
}

/// Closest point on segment `[a, b]` to `p`.
pub fn project_to_segment(p: Point, a: Point, b: Point) -> Point {
    let d = b - a;
    let len2 = d.norm_sq();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    a + d * t
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    p.dist(project_to_segment(p, a, b))
}

/// Distance from `p` to a polyline (open).
pub fn point_polyline_distance(p: Point, line: &[Point]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [q] => p.dist(*q),
        _ => line
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Proper or improper intersection test for closed segments `[a, b]` and `[c, d]`,
/// with a tolerance `eps` on the orientation tests.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    let s = |v: f64| {
        if v > eps {
            1
        } else if v < -eps {
            -1
        } else {
            0
        }
    };
    let (s1, s2, s3, s4) = (s(d1), s(d2), s(d3), s(d4));
    if s1 * s2 < 0 && s3 * s4 < 0 {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) - eps
            && r.x <= p.x.max(q.x) + eps
            && r.y >= p.y.min(q.y) - eps
            && r.y <= p.y.max(q.y) + eps
    };
    (s1 == 0 && on(c, d, a))
        || (s2 == 0 && on(c, d, b))
        || (s3 == 0 && on(a, b, c))
        || (s4 == 0 && on(a, b, d))
}

/// Winding number of the closed polyline `ring` around `p`.
pub fn winding_number(p: Point, ring: &[Point]) -> i32 {
    let n = ring.len();
    let mut wn = 0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Distance from `p` to the closed polyline `ring`.
pub fn point_ring_distance(p: Point, ring: &[Point]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| point_segment_distance(p, ring[i], ring[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Circle through three points, `None` when they are collinear.
pub fn circumcircle(a: Point, b: Point, c: Point) -> Option<(Point, f64)> {
    let d = 2.0 * orient(a, b, c);
    if d == 0.0 {
        return None;
    }
    let (ab, ac) = (b - a, c - a);
    let (b2, c2) = (ab.norm_sq(), ac.norm_sq());
    let ux = (ac.y * b2 - ab.y * c2) / d;
    let uy = (ab.x * c2 - ac.x * b2) / d;
    let off = Point::new(ux, uy);
    Some((a + off, off.norm()))
}

/// Smallest disk containing all `points` (Welzl's algorithm, iterative form).
///
/// Input order is shuffled with a fixed seed so the expected linear running
/// time holds for ordered boundary samples while the result stays reproducible.
pub fn smallest_enclosing_disk(points: &[Point]) -> Option<(Point, f64)> {
    if points.is_empty() {
        return None;
    }
    let mut pts = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ED);
    pts.shuffle(&mut rng);

    let inside = |c: Point, r: f64, p: Point| p.dist(c) <= r * (1.0 + 1e-12) + 1e-15;
    let disk2 = |a: Point, b: Point| ((a + b) * 0.5, a.dist(b) * 0.5);

    let mut c = pts[0];
    let mut r = 0.0;
    for i in 1..pts.len() {
        if inside(c, r, pts[i]) {
            continue;
        }
        c = pts[i];
        r = 0.0;
        for j in 0..i {
            if inside(c, r, pts[j]) {
                continue;
            }
            (c, r) = disk2(pts[i], pts[j]);
            for k in 0..j {
                if inside(c, r, pts[k]) {
                    continue;
                }
                (c, r) = match circumcircle(pts[i], pts[j], pts[k]) {
                    Some(d) => d,
                    // Collinear triple: the farthest pair spans the disk.
                    None => {
                        let cands = [
                            disk2(pts[i], pts[j]),
                            disk2(pts[i], pts[k]),
                            disk2(pts[j], pts[k]),
                        ];
                        cands
                            .into_iter()
                            .fold((c, 0.0), |acc, d| if d.1 > acc.1 { d } else { acc })
                    }
                };
            }
        }
    }
    Some((c, r))
}

/// Reflection of `p` across the line through `a` and `b`.
pub fn reflect_across_line(p: Point, a: Point, b: Point) -> Point {
    let d = b - a;
    let len2 = d.norm_sq();
    let t = (p - a).dot(d) / len2;
    let foot = a + d * t;
    foot * 2.0 - p
}

/// Largest pairwise distance among `points` (quadratic; used on modest samples).
pub fn diameter(points: &[Point]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(p.dist(*q));
        }
    }
    best
}
