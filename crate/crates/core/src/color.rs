//! Synthetic saturation changes and the saturation sweep table.
//!
//! Two models are provided:
//!
//! * [`SaturationModel::Hsv`] multiplies the HSV saturation channel and clamps
//!   it to 1. Hue and value are kept, so every non-maximal channel can only
//!   fall: region means never rise under this model.
//! * [`SaturationModel::LumaBlend`] extrapolates each pixel away from its BT.601
//!   grey level, `Y + f (c - Y)`, clipped per channel. This is the usual
//!   "colour enhance" factor; channels above the grey level rise while those
//!   below it fall, and clipping makes the net effect on a region mean depend
//!   on the region's colour. The sweep uses this model by default.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::convex_hull;
use crate::landmarks::LandmarkFile;
use crate::mask::{rasterize_polygon, PixelRegion, RegionMask};
use crate::raster::{Rgb, RgbImage};
use crate::segmentation::build_both;
use crate::stats::{luma, region_stats};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SaturationFactor(f64);

impl SaturationFactor {
    pub const IDENTITY: SaturationFactor = SaturationFactor(1.0);

    pub fn new(f: f64) -> Result<Self> {
        if f.is_finite() && f > 0.0 {
            Ok(Self(f))
        } else {
            Err(Error::InvalidFactor(f))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_identity(self) -> bool {
        self.0 == 1.0
    }
}

impl fmt::Display for SaturationFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.fract() == 0.0 {
            write!(f, "{:.1}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for SaturationFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let f: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidFactor(f64::NAN))?;
        Self::new(f)
    }
}

/// Parses a comma-separated list such as `1,2,3.5`.
pub fn parse_factor_list(s: &str) -> Result<Vec<SaturationFactor>> {
    s.split(',').map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaturationModel {
    Hsv,
    #[default]
    LumaBlend,
}

impl FromStr for SaturationModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hsv" => Ok(SaturationModel::Hsv),
            "luma-blend" | "blend" => Ok(SaturationModel::LumaBlend),
            other => Err(format!(
                "unknown saturation model `{other}` (hsv, luma-blend)"
            )),
        }
    }
}

#[inline]
fn to_u8(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// `(h in [0, 360), s in [0, 1], v in [0, 1])`.
pub fn rgb_to_hsv([r, g, b]: Rgb) -> (f64, f64, f64) {
    let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    (h, s, max)
}

/// Inverse of [`rgb_to_hsv`], rounded half-up to 8 bits.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let sector = (h / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - (sector.rem_euclid(2.0) - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match sector as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    [
        to_u8((r + m) * 255.0),
        to_u8((g + m) * 255.0),
        to_u8((b + m) * 255.0),
    ]
}

pub fn saturate_pixel(px: Rgb, f: SaturationFactor, model: SaturationModel) -> Rgb {
    if f.is_identity() || (px[0] == px[1] && px[1] == px[2]) {
        return px;
    }
    match model {
        SaturationModel::Hsv => {
            let (h, s, v) = rgb_to_hsv(px);
            hsv_to_rgb(h, (s * f.get()).min(1.0), v)
        }
        SaturationModel::LumaBlend => {
            let y = luma(px);
            px.map(|c| to_u8(y + f.get() * (c as f64 - y)))
        }
    }
}

/// HSV saturation scaling: `S' = min(1, S f)`. `f = 1` returns the input.
pub fn adjust_saturation(image: &RgbImage, f: SaturationFactor) -> RgbImage {
    adjust_saturation_with(image, f, SaturationModel::Hsv)
}

pub fn adjust_saturation_with(
    image: &RgbImage,
    f: SaturationFactor,
    model: SaturationModel,
) -> RgbImage {
    if f.is_identity() {
        return image.clone();
    }
    image.map_pixels(|px| saturate_pixel(px, f, model))
}

/// One row of the sweep; `None` marks a region that could not be measured.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub factor: SaturationFactor,
    pub face_mean: Option<f64>,
    pub left_sclera_mean: Option<f64>,
    pub right_sclera_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub model: SaturationModel,
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str = "factor,face_mean,left_sclera_mean,right_sclera_mean";

impl SweepTable {
    pub fn to_csv(&self) -> Vec<u8> {
        let cell = |v: Option<f64>| v.map(|m| format!("{m:.2}")).unwrap_or_default();
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let label = if row.factor.is_identity() {
                "original".to_string()
            } else {
                row.factor.to_string()
            };
            out.push_str(&format!(
                "{label},{},{},{}\n",
                cell(row.face_mean),
                cell(row.left_sclera_mean),
                cell(row.right_sclera_mean)
            ));
        }
        out.into_bytes()
    }
}

/// Region means of the face oval and both sclerae for the original image and
/// each factor. Geometry is built once from the landmarks and reused.
///
/// The original (f = 1) row always comes first; `1.0` entries in `factors` are
/// folded into it.
pub fn saturation_sweep(
    image: &RgbImage,
    lm: &LandmarkFile,
    factors: &[SaturationFactor],
    model: SaturationModel,
) -> Result<SweepTable> {
    let (w, h) = (image.width(), image.height());
    let eyes = build_both(lm, w, h)?.map(crate::segmentation::segment_sclera);
    let face: Option<RegionMask> = match lm.face_oval() {
        Some(pts) => Some(rasterize_polygon(
            &convex_hull(pts)?,
            crate::geometry::PixelRect::image(w, h),
        )),
        None => None,
    };

    let mut schedule = vec![SaturationFactor::IDENTITY];
    schedule.extend(factors.iter().copied().filter(|f| !f.is_identity()));

    let rows = schedule
        .par_iter()
        .map(|&factor| {
            let adjusted = adjust_saturation_with(image, factor, model);
            let mean_of =
                |m: &RegionMask| region_stats(&adjusted, m).ok().map(|s| s.mean_all_channels);
            SweepRow {
                factor,
                face_mean: face.as_ref().and_then(mean_of),
                left_sclera_mean: eyes
                    .left
                    .as_ref()
                    .ok()
                    .and_then(|m| mean_of(m.region_mask())),
                right_sclera_mean: eyes
                    .right
                    .as_ref()
                    .ok()
                    .and_then(|m| mean_of(m.region_mask())),
            }
        })
        .collect();
    Ok(SweepTable { model, rows })
}
