use serde::{Deserialize, Serialize};

use crate::geometry::{pixel_center, point_in_convex_polygon, ConvexPolygon, PixelRect};

/// Binary pixel membership over a rectangle, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMask {
    rect: PixelRect,
    bits: Vec<bool>,
    pixel_count: usize,
}

impl RegionMask {
    pub fn from_fn(rect: PixelRect, mut member: impl FnMut(u32, u32) -> bool) -> Self {
        let bits: Vec<bool> = rect.pixels().map(|(x, y)| member(x, y)).collect();
        let pixel_count = bits.iter().filter(|&&b| b).count();
        Self {
            rect,
            bits,
            pixel_count,
        }
    }

    pub fn empty(rect: PixelRect) -> Self {
        Self::from_fn(rect, |_, _| false)
    }

    pub fn rect(&self) -> PixelRect {
        self.rect
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn pixel_count(&self) -> usize {
        self.pixel_count
    }

    /// Membership in absolute image coordinates; false outside the rectangle.
    pub fn contains(&self, x: u32, y: u32) -> bool {
        if !self.rect.contains_pixel(x, y) {
            return false;
        }
        let i =
            (y - self.rect.y0) as usize * self.rect.width() as usize + (x - self.rect.x0) as usize;
        self.bits[i]
    }

    /// Member pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.rect
            .pixels()
            .zip(self.bits.iter())
            .filter_map(|(p, &b)| b.then_some(p))
    }
}

/// A set of image pixels that statistics can be accumulated over.
pub trait PixelRegion {
    fn region_mask(&self) -> &RegionMask;
}

impl PixelRegion for RegionMask {
    fn region_mask(&self) -> &RegionMask {
        self
    }
}

/// Rasterizes `poly` by pixel-centre sampling, restricted to `clamp`.
pub fn rasterize_polygon(poly: &ConvexPolygon, clamp: PixelRect) -> RegionMask {
    let rect = crate::geometry::bounding_rect(poly.vertices(), clamp)
        .expect("polygon has at least three vertices");
    RegionMask::from_fn(rect, |x, y| {
        point_in_convex_polygon(pixel_center(x, y), poly)
    })
}

/// Serializable summary of where a mask lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskExtent {
    pub rect: PixelRect,
    pub pixel_count: usize,
}
