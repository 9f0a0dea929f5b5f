//! Landmark-driven sclera segmentation.
//!
//! A pixel belongs to the sclera of an eye when its centre lies inside (or on)
//! the convex hull of the eye contour and strictly outside the smallest circle
//! enclosing the iris landmarks. Only pixels of the eye's bounding rectangle are
//! visited.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    bounding_rect, convex_hull, min_enclosing_circle, pixel_center, point_in_convex_polygon,
    point_outside_circle, Circle, ConvexPolygon, PixelRect,
};
use crate::landmarks::{EyeSide, LandmarkFile};
use crate::mask::{MaskExtent, PixelRegion, RegionMask};
use crate::raster::{encode_gray_png, Rgb, RgbImage};

#[derive(Debug, Clone, PartialEq)]
pub struct EyeGeometry {
    pub side: EyeSide,
    pub hull: ConvexPolygon,
    pub iris_circle: Circle,
    pub rect: PixelRect,
}

impl EyeGeometry {
    /// The membership predicate, evaluated at the centre of pixel `(x, y)`.
    #[inline]
    pub fn is_sclera(&self, x: u32, y: u32) -> bool {
        let p = pixel_center(x, y);
        point_in_convex_polygon(p, &self.hull) && point_outside_circle(p, &self.iris_circle)
    }

    /// A zero-radius circle means the iris landmarks collapsed to one point.
    pub fn iris_degenerate(&self) -> bool {
        self.iris_circle.radius <= 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScleraMask {
    pub side: EyeSide,
    mask: RegionMask,
}

impl ScleraMask {
    pub fn new(side: EyeSide, mask: RegionMask) -> Self {
        Self { side, mask }
    }

    pub fn rect(&self) -> PixelRect {
        self.mask.rect()
    }

    pub fn bits(&self) -> &[bool] {
        self.mask.bits()
    }

    pub fn pixel_count(&self) -> usize {
        self.mask.pixel_count()
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        self.mask.contains(x, y)
    }

    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.mask.pixels()
    }

    pub fn sidecar(&self) -> MaskSidecar {
        MaskSidecar {
            side: self.side,
            extent: MaskExtent {
                rect: self.rect(),
                pixel_count: self.pixel_count(),
            },
        }
    }
}

impl PixelRegion for ScleraMask {
    fn region_mask(&self) -> &RegionMask {
        &self.mask
    }
}

/// Structured companion of an exported mask image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskSidecar {
    pub side: EyeSide,
    #[serde(flatten)]
    pub extent: MaskExtent,
}

pub fn build_eye_geometry(
    lm: &LandmarkFile,
    side: EyeSide,
    image_w: u32,
    image_h: u32,
) -> Result<EyeGeometry> {
    let eye = lm.eye(side);
    let hull = convex_hull(eye).map_err(|e| match e {
        Error::DegenerateInput(_) => Error::DegenerateEye(side),
        other => other,
    })?;
    let iris_circle = min_enclosing_circle(lm.iris(side))?;
    let rect = bounding_rect(eye, PixelRect::image(image_w, image_h))?;
    Ok(EyeGeometry {
        side,
        hull,
        iris_circle,
        rect,
    })
}

pub fn segment_sclera(geom: &EyeGeometry) -> ScleraMask {
    ScleraMask::new(
        geom.side,
        RegionMask::from_fn(geom.rect, |x, y| geom.is_sclera(x, y)),
    )
}

/// Why one eye could not be segmented.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SideFailure {
    #[error("{0} eye is degenerate (collinear or closed contour)")]
    DegenerateEye(EyeSide),
    #[error("{side} eye: {reason}")]
    Geometry { side: EyeSide, reason: String },
}

impl SideFailure {
    fn from_error(side: EyeSide, e: Error) -> Self {
        match e {
            Error::DegenerateEye(s) => SideFailure::DegenerateEye(s),
            other => SideFailure::Geometry {
                side,
                reason: other.to_string(),
            },
        }
    }
}

/// Per-eye outcome; one side may fail independently of the other.
#[derive(Debug, Clone)]
pub struct EyePair<T> {
    pub left: Result<T, SideFailure>,
    pub right: Result<T, SideFailure>,
}

impl<T> EyePair<T> {
    pub fn get(&self, side: EyeSide) -> &Result<T, SideFailure> {
        match side {
            EyeSide::Left => &self.left,
            EyeSide::Right => &self.right,
        }
    }

    pub fn successes(&self) -> impl Iterator<Item = &T> {
        [&self.left, &self.right]
            .into_iter()
            .filter_map(|r| r.as_ref().ok())
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> EyePair<U> {
        EyePair {
            left: self.left.as_ref().map(&mut f).map_err(Clone::clone),
            right: self.right.as_ref().map(&mut f).map_err(Clone::clone),
        }
    }
}

/// Geometry for both eyes, or `BothEyesDegenerate` if neither side builds.
pub fn build_both(lm: &LandmarkFile, w: u32, h: u32) -> Result<EyePair<EyeGeometry>> {
    let side =
        |s: EyeSide| build_eye_geometry(lm, s, w, h).map_err(|e| SideFailure::from_error(s, e));
    match (side(EyeSide::Left), side(EyeSide::Right)) {
        (Err(l), Err(r)) => Err(Error::BothEyesDegenerate { left: l, right: r }),
        (left, right) => Ok(EyePair { left, right }),
    }
}

pub fn segment_both(lm: &LandmarkFile, w: u32, h: u32) -> Result<EyePair<ScleraMask>> {
    Ok(build_both(lm, w, h)?.map(segment_sclera))
}

/// Copy of `image` with every mask pixel set to `color`.
pub fn render_overlay(image: &RgbImage, masks: &[&ScleraMask], color: Rgb) -> RgbImage {
    let mut out = image.clone();
    for mask in masks {
        for (x, y) in mask.pixels() {
            if x < out.width() && y < out.height() {
                out.put(x, y, color);
            }
        }
    }
    out
}

/// Full-frame 8-bit mask: 255 on sclera pixels of any mask, 0 elsewhere.
pub fn mask_image_bytes(width: u32, height: u32, masks: &[&ScleraMask]) -> Vec<u8> {
    let mut data = vec![0u8; width as usize * height as usize];
    for mask in masks {
        for (x, y) in mask.pixels() {
            if x < width && y < height {
                data[y as usize * width as usize + x as usize] = 255;
            }
        }
    }
    data
}

pub fn encode_mask_png(width: u32, height: u32, masks: &[&ScleraMask]) -> Result<Vec<u8>> {
    encode_gray_png(width, height, mask_image_bytes(width, height, masks))
}
