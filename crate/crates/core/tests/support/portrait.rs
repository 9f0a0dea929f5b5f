//! Procedural frontal portraits with exact landmarks.
//!
//! Each portrait is drawn from analytic shapes, so the landmark file is known
//! exactly rather than detected. The four presets vary skin tone and iris
//! colour while keeping the same sclera ground truth and symmetric lighting.
//! `left_eye` is the eye on the image-left side.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sclera_qc::landmarks::{LandmarkGroups, SCHEMA_VERSION};
use sclera_qc::{LandmarkFile, Point2D, RgbImage};

pub const SIZE: u32 = 256;

#[derive(Debug, Clone, Copy)]
pub struct PortraitSpec {
    pub name: &'static str,
    pub skin: [f64; 3],
    pub iris: [f64; 3],
    pub exposure: f64,
    /// Horizontal iris offset from the eye centre, same for both eyes.
    pub gaze: f64,
    pub seed: u64,
}

pub const PORTRAITS: [PortraitSpec; 4] = [
    PortraitSpec {
        name: "tone-deep",
        skin: [84.0, 56.0, 42.0],
        iris: [62.0, 40.0, 28.0],
        exposure: 1.0,
        gaze: 0.0,
        seed: 11,
    },
    PortraitSpec {
        name: "tone-brown",
        skin: [141.0, 97.0, 72.0],
        iris: [88.0, 58.0, 34.0],
        exposure: 1.0,
        gaze: 1.5,
        seed: 23,
    },
    PortraitSpec {
        name: "tone-light",
        skin: [236.0, 200.0, 178.0],
        iris: [78.0, 118.0, 158.0],
        exposure: 1.0,
        gaze: -1.0,
        seed: 37,
    },
    PortraitSpec {
        name: "tone-tan",
        skin: [198.0, 152.0, 118.0],
        iris: [104.0, 96.0, 52.0],
        exposure: 1.0,
        gaze: 0.5,
        seed: 41,
    },
];

/// Shared sclera albedo: bluish white, kept below the top of the range so
/// saturation can be raised without clipping.
const SCLERA: [f64; 3] = [186.0, 178.0, 194.0];
const PUPIL: [f64; 3] = [18.0, 16.0, 16.0];
const LASH: [f64; 3] = [34.0, 28.0, 26.0];
const BACKGROUND: [f64; 3] = [150.0, 160.0, 172.0];
const HAIR: [f64; 3] = [38.0, 30.0, 26.0];

const FACE_C: (f64, f64) = (128.0, 136.0);
const FACE_AX: (f64, f64) = (84.0, 106.0);
const EYE_Y: f64 = 118.0;
const EYE_X: [f64; 2] = [94.0, 162.0];
const EYE_A: f64 = 20.0;
const EYE_UP: f64 = 9.0;
const EYE_LOW: f64 = 7.0;
const IRIS_R: f64 = 7.6;
const IRIS_DY: f64 = 0.6;
const PUPIL_R: f64 = 3.0;
const EYE_POINTS: usize = 16;
const FACE_POINTS: usize = 36;

struct Eye {
    cx: f64,
    cy: f64,
    a: f64,
    up: f64,
    low: f64,
}

impl Eye {
    /// Normalised radius: `<= 1` inside the almond.
    fn rho(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.cx) / self.a;
        let v = y - self.cy;
        let w = if v < 0.0 { -v / self.up } else { v / self.low };
        ((u * u + w * w).sqrt(), u)
    }

    fn contour(&self) -> Vec<Point2D> {
        (0..EYE_POINTS)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / EYE_POINTS as f64;
                let s = t.sin();
                let h = if s > 0.0 { self.up } else { self.low };
                Point2D::new(self.cx + self.a * t.cos(), self.cy - h * s)
            })
            .collect()
    }
}

fn eyes(spec: &PortraitSpec) -> [(Eye, Point2D); 2] {
    EYE_X.map(|cx| {
        let eye = Eye {
            cx,
            cy: EYE_Y,
            a: EYE_A,
            up: EYE_UP,
            low: EYE_LOW,
        };
        let iris = Point2D::new(cx + spec.gaze, EYE_Y + IRIS_DY);
        (eye, iris)
    })
}

fn in_ellipse(x: f64, y: f64, c: (f64, f64), ax: (f64, f64)) -> f64 {
    ((x - c.0) / ax.0).powi(2) + ((y - c.1) / ax.1).powi(2)
}

fn scale(c: [f64; 3], k: f64) -> [f64; 3] {
    c.map(|v| v * k)
}

fn mix(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i] * (1.0 - t) + b[i] * t)
}

fn shade_pixel(spec: &PortraitSpec, eyes: &[(Eye, Point2D); 2], x: f64, y: f64) -> [f64; 3] {
    let face = in_ellipse(x, y, FACE_C, FACE_AX);
    if face > 1.0 {
        let hairline = in_ellipse(
            x,
            y,
            (FACE_C.0, FACE_C.1 - 12.0),
            (FACE_AX.0 + 14.0, FACE_AX.1 + 8.0),
        );
        return if hairline <= 1.0 && y < FACE_C.1 {
            HAIR
        } else {
            BACKGROUND
        };
    }

    // Symmetric frontal light with gentle fall-off towards the jaw and sides.
    let light = 0.80 + 0.20 * (1.0 - face).sqrt();
    let mut px = scale(spec.skin, light);

    // Nose shadow and mouth.
    if in_ellipse(x, y, (FACE_C.0, 162.0), (7.0, 16.0)) <= 1.0 {
        px = scale(px, 0.92);
    }
    if in_ellipse(x, y, (FACE_C.0, 198.0), (22.0, 6.5)) <= 1.0 {
        px = [px[0] * 0.86, px[1] * 0.62, px[2] * 0.66];
    }

    for (eye, iris) in eyes {
        // Brows.
        if in_ellipse(x, y, (eye.cx, eye.cy - 17.0), (23.0, 3.2)) <= 1.0 {
            px = mix(px, HAIR, 0.8);
        }

        let (rho, u) = eye.rho(x, y);
        if rho <= 1.0 {
            let d = ((x - iris.x).powi(2) + (y - iris.y).powi(2)).sqrt();
            px = if d <= PUPIL_R {
                PUPIL
            } else if d <= IRIS_R {
                let t = d / IRIS_R;
                let ring = if t > 0.85 { 0.7 } else { 1.0 };
                scale(spec.iris, (0.75 + 0.35 * t) * ring)
            } else {
                // Darker towards the corners and under the upper lid.
                let mut shade = 0.86 + 0.14 * (1.0 - u * u);
                if y < eye.cy && rho > 0.7 {
                    shade *= 1.0 - 0.35 * (rho - 0.7);
                }
                let pink = u.abs().powi(4);
                let base = [
                    SCLERA[0] + 8.0 * pink,
                    SCLERA[1] - 6.0 * pink,
                    SCLERA[2] - 4.0 * pink,
                ];
                scale(base, shade)
            };
        } else {
            // Lash line above the eye, shadowed lid below it.
            let grown = Eye {
                cx: eye.cx,
                cy: eye.cy,
                a: eye.a + 2.0,
                up: eye.up + 1.8,
                low: eye.low + 1.2,
            };
            if grown.rho(x, y).0 <= 1.0 {
                px = if y < eye.cy { LASH } else { scale(px, 0.8) };
            }
        }
    }
    px
}

pub fn render(spec: &PortraitSpec) -> (RgbImage, LandmarkFile) {
    let eyes = eyes(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let image = RgbImage::from_fn(SIZE, SIZE, |x, y| {
        let base = shade_pixel(spec, &eyes, x as f64 + 0.5, y as f64 + 0.5);
        let noise: f64 = rng.gen_range(-3.0..=3.0);
        base.map(|c| (c * spec.exposure + noise).round().clamp(0.0, 255.0) as u8)
    });

    let iris_points = |c: Point2D| -> Vec<Point2D> {
        let mut pts = vec![c];
        pts.extend((0..4).map(|k| {
            let t = 0.3 + k as f64 * PI / 2.0;
            Point2D::new(c.x + IRIS_R * t.cos(), c.y + IRIS_R * t.sin())
        }));
        pts
    };
    let face_oval = (0..FACE_POINTS)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / FACE_POINTS as f64;
            Point2D::new(
                FACE_C.0 + FACE_AX.0 * t.cos(),
                FACE_C.1 + FACE_AX.1 * t.sin(),
            )
        })
        .collect();

    let [(le, li), (re, ri)] = &eyes;
    let lm = LandmarkFile {
        schema_version: SCHEMA_VERSION,
        image_width: SIZE,
        image_height: SIZE,
        source_id: spec.name.to_string(),
        groups: LandmarkGroups {
            left_eye: le.contour(),
            right_eye: re.contour(),
            left_iris: iris_points(*li),
            right_iris: iris_points(*ri),
            face_oval: Some(face_oval),
        },
    };
    (image, lm)
}

/// An elliptical eye contour with a circular iris fully inside it. The sclera
/// area is `pi * (a * b - r * r)`.
#[derive(Debug, Clone, Copy)]
pub struct SyntheticEye {
    pub name: &'static str,
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub r: f64,
    /// Iris centre offset along x.
    pub dx: f64,
    pub points: usize,
    pub width: u32,
    pub height: u32,
}

impl SyntheticEye {
    pub fn analytic_area(&self) -> f64 {
        PI * (self.a * self.b - self.r * self.r)
    }

    fn contour(&self, cx: f64) -> Vec<Point2D> {
        (0..self.points)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / self.points as f64;
                Point2D::new(cx + self.a * t.cos(), self.cy + self.b * t.sin())
            })
            .collect()
    }

    fn iris(&self, cx: f64) -> Vec<Point2D> {
        let c = Point2D::new(cx + self.dx, self.cy);
        let mut pts = vec![c];
        pts.extend((0..4).map(|k| {
            let t = 0.45 + k as f64 * PI / 2.0;
            Point2D::new(c.x + self.r * t.cos(), c.y + self.r * t.sin())
        }));
        pts
    }

    /// Both eyes share the shape; the right one is shifted by half the width.
    pub fn landmarks(&self) -> LandmarkFile {
        let right_cx = self.cx + self.width as f64 / 2.0;
        LandmarkFile {
            schema_version: SCHEMA_VERSION,
            image_width: self.width,
            image_height: self.height,
            source_id: self.name.to_string(),
            groups: LandmarkGroups {
                left_eye: self.contour(self.cx),
                right_eye: self.contour(right_cx),
                left_iris: self.iris(self.cx),
                right_iris: self.iris(right_cx),
                face_oval: None,
            },
        }
    }
}

pub const SYNTHETIC_EYES: [SyntheticEye; 5] = [
    SyntheticEye {
        name: "ellipse-a",
        cx: 60.3,
        cy: 50.7,
        a: 40.0,
        b: 18.0,
        r: 8.0,
        dx: 0.0,
        points: 64,
        width: 240,
        height: 100,
    },
    SyntheticEye {
        name: "ellipse-b",
        cx: 40.6,
        cy: 30.2,
        a: 30.0,
        b: 12.0,
        r: 6.5,
        dx: 3.1,
        points: 48,
        width: 160,
        height: 60,
    },
    SyntheticEye {
        name: "ellipse-c",
        cx: 70.15,
        cy: 40.45,
        a: 55.0,
        b: 25.0,
        r: 12.0,
        dx: -4.2,
        points: 96,
        width: 280,
        height: 90,
    },
    SyntheticEye {
        name: "ellipse-d",
        cx: 30.9,
        cy: 25.35,
        a: 24.0,
        b: 14.0,
        r: 5.0,
        dx: 6.0,
        points: 64,
        width: 120,
        height: 60,
    },
    SyntheticEye {
        name: "ellipse-e",
        cx: 90.55,
        cy: 45.8,
        a: 70.0,
        b: 30.0,
        r: 15.0,
        dx: -10.0,
        points: 128,
        width: 360,
        height: 100,
    },
];
