//! Planar primitives used by the segmentation predicate.
//!
//! Coordinates are image pixels: origin top-left, x to the right, y downward.
//! "Counter-clockwise" always means positive shoelace area computed on the raw
//! `(x, y)` values, which is what every orientation test in this module uses.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on orientation tests.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cross(self, other: Point2D) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn distance(self, other: Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl Add for Point2D {
    type Output = Point2D;

    fn add(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2D {
    type Output = Point2D;

    fn sub(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Twice the signed area of triangle `(a, b, c)`; positive for a left turn.
#[inline]
pub fn orient(a: Point2D, b: Point2D, c: Point2D) -> f64 {
    (b - a).cross(c - a)
}

fn lex_cmp(a: &Point2D, b: &Point2D) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

/// A strictly convex polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2D>,
}

impl ConvexPolygon {
    /// Validates and wraps an explicit vertex list.
    pub fn new(vertices: Vec<Point2D>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateInput("polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateInput("non-finite polygon vertex"));
        }
        let n = vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::DegenerateInput("repeated polygon vertex"));
                }
            }
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if orient(a, b, c) <= 0.0 {
                return Err(Error::DegenerateInput(
                    "polygon is not strictly convex counter-clockwise",
                ));
            }
        }
        let poly = Self { vertices };
        if poly.signed_area() <= 0.0 {
            return Err(Error::DegenerateInput("polygon has non-positive area"));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point2D] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum();
        twice / 2.0
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2D, Point2D)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Boundary-inclusive membership (see [`point_in_convex_polygon`]).
    pub fn contains(&self, p: Point2D) -> bool {
        point_in_convex_polygon(p, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2D,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2D, radius: f64) -> Self {
        Self { center, radius }
    }
}

/// Half-open integer pixel rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelRect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl PixelRect {
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32) -> Self {
        debug_assert!(x0 <= x1 && y0 <= y1);
        Self { x0, y0, x1, y1 }
    }

    /// The whole image `[0, w) x [0, h)`.
    pub fn image(width: u32, height: u32) -> Self {
        Self::new(0, 0, width, height)
    }

    pub fn width(&self) -> u32 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> usize {
        self.width() as usize * self.height() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    pub fn contains_pixel(&self, x: u32, y: u32) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// True if `other` lies entirely within `self`. Empty rectangles are
    /// contained everywhere.
    pub fn contains_rect(&self, other: &PixelRect) -> bool {
        other.is_empty()
            || (other.x0 >= self.x0
                && other.x1 <= self.x1
                && other.y0 >= self.y0
                && other.y1 <= self.y1)
    }

    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> {
        let (x0, x1) = (self.x0, self.x1);
        (self.y0..self.y1).flat_map(move |y| (x0..x1).map(move |x| (x, y)))
    }
}

/// Centre of pixel `(px, py)`, where membership predicates are sampled.
#[inline]
pub fn pixel_center(px: u32, py: u32) -> Point2D {
    Point2D::new(px as f64 + 0.5, py as f64 + 0.5)
}

/// Convex hull by Andrew's monotone chain.
///
/// Exact duplicates are merged and collinear points are dropped, so the result
/// is strictly convex. Vertices start at the lexicographically smallest point
/// `(x, then y)` and run counter-clockwise.
pub fn convex_hull(points: &[Point2D]) -> Result<ConvexPolygon> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(
            "convex hull needs at least 3 points",
        ));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateInput("non-finite point"));
    }

    let mut sorted = points.to_vec();
    sorted.sort_by(lex_cmp);
    sorted.dedup();
    if sorted.len() < 3 {
        return Err(Error::DegenerateInput("fewer than 3 distinct points"));
    }

    let mut hull: Vec<Point2D> = Vec::with_capacity(sorted.len() + 1);
    for &p in &sorted {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    // last point repeats the first
    hull.pop();

    if hull.len() < 3 {
        return Err(Error::DegenerateInput("all points are collinear"));
    }
    Ok(ConvexPolygon { vertices: hull })
}

/// Boundary-inclusive test: every edge sees `p` on its left, up to `-EPS`.
pub fn point_in_convex_polygon(p: Point2D, poly: &ConvexPolygon) -> bool {
    poly.edges().all(|(a, b)| orient(a, b, p) >= -EPS)
}

/// Strict exterior test: `dist(p, center) > radius`.
pub fn point_outside_circle(p: Point2D, c: &Circle) -> bool {
    p.distance(c.center) > c.radius
}

/// Pixel rectangle covering `points`: `floor(min)` to `ceil(max) + 1`,
/// intersected with `clamp`.
pub fn bounding_rect(points: &[Point2D], clamp: PixelRect) -> Result<PixelRect> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (first.x, first.y, first.x, first.y);
    for p in points {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }

    let clamp_axis = |v: f64, lo: u32, hi: u32| -> u32 {
        // saturating float -> int cast, then into [lo, hi]
        (v as i64).clamp(lo as i64, hi as i64) as u32
    };
    let x0 = clamp_axis(min_x.floor(), clamp.x0, clamp.x1);
    let x1 = clamp_axis(max_x.ceil() + 1.0, clamp.x0, clamp.x1);
    let y0 = clamp_axis(min_y.floor(), clamp.y0, clamp.y1);
    let y1 = clamp_axis(max_y.ceil() + 1.0, clamp.y0, clamp.y1);
    Ok(PixelRect::new(x0, y0, x1.max(x0), y1.max(y0)))
}

/// Tolerance used by the enclosing-circle routines for a given point set.
pub fn circle_tolerance(points: &[Point2D]) -> f64 {
    let magnitude = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(1.0_f64, f64::max);
    EPS * magnitude
}

/// Smallest circle enclosing all `points`.
///
/// Incremental construction over the input order without shuffling, so the
/// result is a deterministic function of the input. Expected cost is O(n) on
/// unstructured input; worst case O(n^3), irrelevant for landmark-sized sets.
pub fn min_enclosing_circle(points: &[Point2D]) -> Result<Circle> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateInput("non-finite point"));
    }
    let tol = circle_tolerance(points);
    let mut circle = Circle::new(points[0], 0.0);
    for (i, &p) in points.iter().enumerate().skip(1) {
        if !encloses(&circle, p, tol) {
            circle = circle_with_one(&points[..i], p, tol);
        }
    }
    Ok(circle)
}

fn encloses(c: &Circle, p: Point2D, tol: f64) -> bool {
    p.distance(c.center) <= c.radius + tol
}

// `p` is known to lie on the boundary.
fn circle_with_one(points: &[Point2D], p: Point2D, tol: f64) -> Circle {
    let mut circle = Circle::new(p, 0.0);
    for (i, &q) in points.iter().enumerate() {
        if !encloses(&circle, q, tol) {
            circle = if circle.radius == 0.0 {
                diameter_circle(p, q)
            } else {
                circle_with_two(&points[..i], p, q, tol)
            };
        }
    }
    circle
}

// `p` and `q` are known to lie on the boundary.
fn circle_with_two(points: &[Point2D], p: Point2D, q: Point2D, tol: f64) -> Circle {
    let base = diameter_circle(p, q);
    let pq = q - p;
    let mut left: Option<Circle> = None;
    let mut right: Option<Circle> = None;

    for &r in points {
        if encloses(&base, r, tol) {
            continue;
        }
        let side = pq.cross(r - p);
        let Some(c) = circumcircle(p, q, r) else {
            continue;
        };
        let offset = pq.cross(c.center - p);
        if side > 0.0 {
            if left.is_none_or(|l| offset > pq.cross(l.center - p)) {
                left = Some(c);
            }
        } else if side < 0.0 && right.is_none_or(|rc| offset < pq.cross(rc.center - p)) {
            right = Some(c);
        }
    }

    match (left, right) {
        (None, None) => base,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

pub(crate) fn diameter_circle(a: Point2D, b: Point2D) -> Circle {
    let center = Point2D::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
    let radius = center.distance(a).max(center.distance(b));
    Circle::new(center, radius)
}

/// Circle through three points, `None` when they are collinear.
pub(crate) fn circumcircle(a: Point2D, b: Point2D, c: Point2D) -> Option<Circle> {
    // work relative to the bounding-box centre for precision
    let ox = (a.x.min(b.x).min(c.x) + a.x.max(b.x).max(c.x)) / 2.0;
    let oy = (a.y.min(b.y).min(c.y) + a.y.max(b.y).max(c.y)) / 2.0;
    let (ax, ay) = (a.x - ox, a.y - oy);
    let (bx, by) = (b.x - ox, b.y - oy);
    let (cx, cy) = (c.x - ox, c.y - oy);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if d == 0.0 {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let x = ox + (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let y = oy + (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = Point2D::new(x, y);
    let radius = center
        .distance(a)
        .max(center.distance(b))
        .max(center.distance(c));
    Some(Circle::new(center, radius))
}
