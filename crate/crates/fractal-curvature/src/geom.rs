//! Planar geometry primitives: points, affine maps, convex polygons.
//!
//! Everything here is plain `f64` geometry with no tolerance policy of its
//! own; callers pass explicit tolerances where decisions are fuzzy.

use std::ops::{Add, Mul, Sub};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self x other`.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Affine map `x -> M x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub m: [[f64; 2]; 2],
    pub t: Point,
}

impl Affine {
    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y + self.t.x,
            self.m[1][0] * p.x + self.m[1][1] * p.y + self.t.y,
        )
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn of_points<I: IntoIterator<Item = Point>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Bounds { min: first, max: first };
        for p in it {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn merge(self, other: Bounds) -> Bounds {
        Bounds {
            min: Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }
}

/// A convex polygon stored as a counterclockwise vertex cycle.
///
/// Constructors normalize orientation; convexity itself is the caller's
/// responsibility (model validation checks it once at load time).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Builds a polygon from a vertex cycle, reversing it if given clockwise.
    pub fn new(vertices: Vec<Point>) -> Self {
        assert!(vertices.len() >= 3, "polygon needs at least 3 vertices");
        let mut vertices = vertices;
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(v[i].dist(v[j]));
            }
        }
        best
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::of_points(self.vertices.iter().copied()).expect("nonempty polygon")
    }

    pub fn transform(&self, map: &Affine) -> Polygon {
        // An orientation-reversing map flips the cycle; renormalize.
        Polygon::new(self.vertices.iter().map(|&p| map.apply(p)).collect())
    }

    /// Signed distance from `p` to the boundary: positive inside, negative
    /// outside. Exact for convex polygons while `p` is inside; outside it is
    /// the (negated) largest half-plane violation, a lower bound on the
    /// true distance that has the correct sign.
    pub fn interior_depth(&self, p: Point) -> f64 {
        let v = &self.vertices;
        let mut depth = f64::INFINITY;
        for i in 0..v.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            let edge = b - a;
            let len = edge.norm();
            if len == 0.0 {
                continue;
            }
            depth = depth.min(edge.cross(p - a) / len);
        }
        depth
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.interior_depth(p) >= -tol
    }

    /// Largest separation over the edge normals of both polygons (SAT).
    /// Nonnegative iff the interiors are disjoint; when they overlap the
    /// value is the negated penetration depth along the best axis.
    pub fn separation(&self, other: &Polygon) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for (a, b) in [(self, other), (other, self)] {
            let va = &a.vertices;
            for i in 0..va.len() {
                let p0 = va[i];
                let p1 = va[(i + 1) % va.len()];
                let edge = p1 - p0;
                let len = edge.norm();
                if len == 0.0 {
                    continue;
                }
                // Outward normal of a CCW edge.
                let n = Point::new(edge.y / len, -edge.x / len);
                let max_a = va.iter().map(|&v| n.dot(v)).fold(f64::NEG_INFINITY, f64::max);
                let min_b = b.vertices.iter().map(|&v| n.dot(v)).fold(f64::INFINITY, f64::min);
                best = best.max(min_b - max_a);
            }
        }
        best
    }

    /// Euclidean distance between two convex polygons (0 when they touch or
    /// overlap).
    pub fn distance(&self, other: &Polygon) -> f64 {
        if self.separation(other) < 0.0 {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for (a, b) in [(self, other), (other, self)] {
            for &p in &a.vertices {
                let vb = &b.vertices;
                for i in 0..vb.len() {
                    let s0 = vb[i];
                    let s1 = vb[(i + 1) % vb.len()];
                    best = best.min(point_segment_distance(p, s0, s1));
                }
            }
        }
        best
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let mut acc = 0.0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        acc += a.cross(b);
    }
    acc / 2.0
}

/// Distance from a point to a closed segment.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Convex hull of a point set (monotone chain). Returns the hull vertices in
/// counterclockwise order; collinear input degenerates to 1 or 2 points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let q = hull[hull.len() - 1];
                let r = hull[hull.len() - 2];
                if (q - r).cross(p - q) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.is_empty() {
        // All points collinear: keep the two extremes.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Distance from `x` to the convex hull of `points` (0 when `x` lies inside
/// or on the hull).
pub fn distance_to_hull(x: Point, points: &[Point]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 => f64::INFINITY,
        1 => x.dist(hull[0]),
        2 => point_segment_distance(x, hull[0], hull[1]),
        _ => {
            let poly = Polygon::new(hull);
            if poly.contains(x, 0.0) {
                0.0
            } else {
                let v = poly.vertices();
                let mut best = f64::INFINITY;
                for i in 0..v.len() {
                    best = best.min(point_segment_distance(x, v[i], v[(i + 1) % v.len()]));
                }
                best
            }
        }
    }
}
