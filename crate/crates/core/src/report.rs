//! Illumination indicators computed from sclera statistics.
//!
//! Darkness and left/right uniformity are judged on sclera luma only, never on
//! skin pixels. Every report echoes the thresholds it was computed with.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::convex_hull;
use crate::landmarks::{EyeSide, LandmarkFile};
use crate::raster::RgbImage;
use crate::segmentation::{build_both, segment_sclera, EyePair};
use crate::stats::{
    compare_sides, polygon_region_stats, region_stats, AsymmetryReport, RegionStats, RegionSummary,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityThresholds {
    /// Mean sclera luma below which an eye reads as dark.
    pub dark_luma_mean: f64,
    /// Luma below which a single sclera pixel counts as dark.
    pub dark_pixel_luma: f64,
    /// Fraction of dark pixels above which an eye reads as dark.
    pub dark_fraction: f64,
    /// Normalized left/right luma difference above which lighting is non-uniform.
    pub asymmetry_norm: f64,
    pub min_sclera_pixels: usize,
}

impl Default for QualityThresholds {
    fn default() -> Self {
        Self {
            dark_luma_mean: 64.0,
            dark_pixel_luma: 64.0,
            dark_fraction: 0.5,
            asymmetry_norm: 0.2,
            min_sclera_pixels: 10,
        }
    }
}

impl QualityThresholds {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidThresholds(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidThresholds(format!(
                    "{name} must lie in (0, 1), got {v}"
                )))
            }
        };
        positive("dark_luma_mean", self.dark_luma_mean)?;
        positive("dark_pixel_luma", self.dark_pixel_luma)?;
        unit("dark_fraction", self.dark_fraction)?;
        unit("asymmetry_norm", self.asymmetry_norm)?;
        if self.min_sclera_pixels == 0 {
            return Err(Error::InvalidThresholds(
                "min_sclera_pixels must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Reads a JSON thresholds file; omitted fields keep their defaults.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let th: Self = serde_json::from_slice(&bytes)
            .map_err(|e| Error::InvalidThresholds(format!("{}: {e}", path.display())))?;
        th.validate()?;
        Ok(th)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EyeFlags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dark_pixel_fraction: Option<f64>,
    pub insufficient: bool,
    pub dark: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EyeReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<RegionSummary>,
    pub flags: EyeFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indicators {
    pub illumination_dark: bool,
    pub illumination_nonuniform: bool,
    pub sclera_insufficient: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub schema_version: u32,
    pub source_id: String,
    pub thresholds: QualityThresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_oval: Option<RegionSummary>,
    pub left: EyeReport,
    pub right: EyeReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymmetry: Option<AsymmetryReport>,
    pub indicators: Indicators,
}

impl QualityReport {
    pub fn eye(&self, side: EyeSide) -> &EyeReport {
        match side {
            EyeSide::Left => &self.left,
            EyeSide::Right => &self.right,
        }
    }
}

/// A report together with the full statistics (histograms included) behind it.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub report: QualityReport,
    pub left: Option<RegionStats>,
    pub right: Option<RegionStats>,
    pub face_oval: Option<RegionStats>,
}

pub fn assess(
    image: &RgbImage,
    lm: &LandmarkFile,
    th: &QualityThresholds,
) -> Result<QualityReport> {
    assess_detailed(image, lm, th).map(|a| a.report)
}

pub fn assess_detailed(
    image: &RgbImage,
    lm: &LandmarkFile,
    th: &QualityThresholds,
) -> Result<Assessment> {
    th.validate()?;
    let geoms = build_both(lm, image.width(), image.height())?;
    let masks = geoms.map(segment_sclera);
    let stats: EyePair<Result<RegionStats>> = masks.map(|m| region_stats(image, m));

    let side_stats = |side: EyeSide| -> (Option<RegionStats>, Option<String>) {
        match stats.get(side) {
            Ok(Ok(s)) => (Some(s.clone()), None),
            Ok(Err(e)) => (None, Some(e.to_string())),
            Err(failure) => (None, Some(failure.to_string())),
        }
    };
    let (left, left_err) = side_stats(EyeSide::Left);
    let (right, right_err) = side_stats(EyeSide::Right);

    let face_oval = match lm.face_oval() {
        Some(pts) => convex_hull(pts)
            .ok()
            .and_then(|poly| polygon_region_stats(image, &poly).ok()),
        None => None,
    };

    let eye_report = |s: &Option<RegionStats>, error: Option<String>| {
        let count = s.as_ref().map_or(0, |s| s.pixel_count);
        let dark_pixel_fraction = s.as_ref().map(|s| s.dark_fraction(th.dark_pixel_luma));
        EyeReport {
            stats: s.as_ref().map(RegionStats::summary),
            flags: EyeFlags {
                error,
                dark_pixel_fraction,
                insufficient: count < th.min_sclera_pixels,
                dark: s.as_ref().is_some_and(|s| {
                    s.mean_luma < th.dark_luma_mean
                        || s.dark_fraction(th.dark_pixel_luma) > th.dark_fraction
                }),
            },
        }
    };
    let left_report = eye_report(&left, left_err);
    let right_report = eye_report(&right, right_err);

    let asymmetry = match (&left, &right) {
        (Some(l), Some(r)) => compare_sides(l, r).ok(),
        _ => None,
    };

    let usable: Vec<&RegionStats> = [&left, &right]
        .into_iter()
        .flatten()
        .filter(|s| s.pixel_count >= th.min_sclera_pixels)
        .collect();
    let illumination_dark = !usable.is_empty()
        && (usable.iter().all(|s| s.mean_luma < th.dark_luma_mean)
            || usable
                .iter()
                .all(|s| s.dark_fraction(th.dark_pixel_luma) > th.dark_fraction));
    let illumination_nonuniform = usable.len() == 2
        && asymmetry
            .as_ref()
            .is_some_and(|a| a.normalized_diff > th.asymmetry_norm);
    let sclera_insufficient = left_report.flags.insufficient || right_report.flags.insufficient;

    let report = QualityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        source_id: lm.source_id.clone(),
        thresholds: th.clone(),
        face_oval: face_oval.as_ref().map(RegionStats::summary),
        left: left_report,
        right: right_report,
        asymmetry,
        indicators: Indicators {
            illumination_dark,
            illumination_nonuniform,
            sclera_insufficient,
        },
    };
    Ok(Assessment {
        report,
        left,
        right,
        face_oval,
    })
}

/// Pretty-printed JSON with a fixed key order and a trailing newline.
pub fn serialize_report(r: &QualityReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(r).expect("report is always serializable");
    out.push(b'\n');
    out
}

pub fn parse_report(bytes: &[u8]) -> Result<QualityReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::Report(e.to_string()))
}
