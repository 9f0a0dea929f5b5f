//! Shared test helpers: brute-force oracles and the fixture corpus.
//!
//! Nothing here calls into the library's geometry routines; the oracles are
//! deliberately naive re-derivations used to check them.
#![allow(dead_code)]

pub mod portrait;

use std::path::PathBuf;

use sclera_qc::{parse_landmarks, LandmarkFile, Point2D, RgbImage};

pub const ORACLE_EPS: f64 = 1e-9;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn portraits_dir() -> PathBuf {
    fixtures_dir().join("portraits")
}

pub fn eyes_dir() -> PathBuf {
    fixtures_dir().join("eyes")
}

/// Committed portrait fixtures as `(name, image, landmarks)`, sorted by name.
pub fn load_portraits() -> Vec<(String, RgbImage, LandmarkFile)> {
    portrait::PORTRAITS
        .iter()
        .map(|spec| {
            let dir = portraits_dir();
            let image = sclera_qc::load_image(dir.join(format!("{}.png", spec.name)))
                .expect("committed portrait png");
            let bytes = std::fs::read(dir.join(format!("{}.json", spec.name)))
                .expect("committed portrait landmarks");
            let lm = parse_landmarks(&bytes).expect("valid landmarks");
            (spec.name.to_string(), image, lm)
        })
        .collect()
}

/// Committed synthetic-eye landmark fixtures with their analytic parameters.
pub fn load_synthetic_eyes() -> Vec<(portrait::SyntheticEye, LandmarkFile)> {
    portrait::SYNTHETIC_EYES
        .iter()
        .map(|eye| {
            let bytes = std::fs::read(eyes_dir().join(format!("{}.json", eye.name)))
                .expect("committed synthetic eye landmarks");
            (*eye, parse_landmarks(&bytes).expect("valid landmarks"))
        })
        .collect()
}

fn cross(o: Point2D, a: Point2D, b: Point2D) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// O(n^3) hull: a pair `(i, j)` is a hull edge when no point lies strictly to
/// its right and every collinear point lies on the closed segment. Returns the
/// edges as counter-clockwise `(from, to)` pairs of distinct points.
pub fn brute_hull_edges(points: &[Point2D]) -> Vec<(Point2D, Point2D)> {
    let mut pts: Vec<Point2D> = Vec::new();
    for &p in points {
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut edges = Vec::new();
    for &a in &pts {
        for &b in &pts {
            if a == b {
                continue;
            }
            let supporting = pts.iter().all(|&c| {
                let s = cross(a, b, c);
                if s > 0.0 {
                    true
                } else if s < 0.0 {
                    false
                } else {
                    // collinear: must lie between a and b
                    let t = (c.x - a.x) * (b.x - a.x) + (c.y - a.y) * (b.y - a.y);
                    let len2 = (b.x - a.x).powi(2) + (b.y - a.y).powi(2);
                    (0.0..=len2).contains(&t)
                }
            });
            if supporting {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Hull vertices from [`brute_hull_edges`], sorted lexicographically.
pub fn brute_hull_vertices(points: &[Point2D]) -> Vec<Point2D> {
    let mut v: Vec<Point2D> = brute_hull_edges(points)
        .into_iter()
        .map(|(a, _)| a)
        .collect();
    v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    v.dedup();
    v
}

/// Boundary-inclusive membership against oracle edges.
pub fn brute_inside_hull(edges: &[(Point2D, Point2D)], p: Point2D) -> bool {
    edges.iter().all(|&(a, b)| cross(a, b, p) >= -ORACLE_EPS)
}

fn dist(a: Point2D, b: Point2D) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// O(n^4): smallest among all pair-diameter and triple-circumscribed circles
/// that enclose every point. Returns `(center, radius)`.
pub fn brute_min_circle(points: &[Point2D]) -> (Point2D, f64) {
    assert!(!points.is_empty());
    let scale = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let encloses = |c: Point2D, r: f64| points.iter().all(|&p| dist(p, c) <= r + tol);

    let mut best: Option<(Point2D, f64)> = None;
    let mut consider = |c: Point2D, r: f64| {
        if encloses(c, r) && best.is_none_or(|(_, br)| r < br) {
            best = Some((c, r));
        }
    };
    if points.len() == 1 {
        return (points[0], 0.0);
    }
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i], points[j]);
            let c = Point2D::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
            consider(c, dist(a, b) / 2.0);
            for k in j + 1..n {
                let c3 = points[k];
                let d = 2.0 * (a.x * (b.y - c3.y) + b.x * (c3.y - a.y) + c3.x * (a.y - b.y));
                if d.abs() < 1e-12 {
                    continue;
                }
                let a2 = a.x * a.x + a.y * a.y;
                let b2 = b.x * b.x + b.y * b.y;
                let c2 = c3.x * c3.x + c3.y * c3.y;
                let ux = (a2 * (b.y - c3.y) + b2 * (c3.y - a.y) + c2 * (a.y - b.y)) / d;
                let uy = (a2 * (c3.x - b.x) + b2 * (a.x - c3.x) + c2 * (b.x - a.x)) / d;
                let center = Point2D::new(ux, uy);
                consider(center, dist(center, a));
            }
        }
    }
    best.expect("the diameter of the farthest pair always encloses")
}

/// The segmentation predicate re-evaluated over the whole image with oracle
/// geometry. Row-major over `[0, w) x [0, h)`.
pub fn oracle_sclera_bits(eye: &[Point2D], iris: &[Point2D], w: u32, h: u32) -> Vec<bool> {
    let edges = brute_hull_edges(eye);
    let (center, radius) = brute_min_circle(iris);
    let mut bits = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let p = Point2D::new(x as f64 + 0.5, y as f64 + 0.5);
            bits.push(brute_inside_hull(&edges, p) && dist(p, center) > radius);
        }
    }
    bits
}

/// Expands a mask to a full-frame row-major bit vector.
pub fn full_frame_bits(mask: &sclera_qc::ScleraMask, w: u32, h: u32) -> Vec<bool> {
    let mut bits = vec![false; (w * h) as usize];
    for (x, y) in mask.pixels() {
        bits[(y * w + x) as usize] = true;
    }
    bits
}

/// Multiplies every channel of the pixels selected by `region` by `gain`.
pub fn scale_pixels(image: &RgbImage, gain: f64, region: impl Fn(u32, u32) -> bool) -> RgbImage {
    RgbImage::from_fn(image.width(), image.height(), |x, y| {
        let px = image.get(x, y);
        if region(x, y) {
            px.map(|c| (c as f64 * gain + 0.5).floor().clamp(0.0, 255.0) as u8)
        } else {
            px
        }
    })
}
