//! Landmark-based sclera segmentation and skin-tone agnostic quality statistics
//! for face images.
//!
//! The sclera of each eye is the set of pixels whose centres fall inside the
//! convex hull of the eye-contour landmarks and strictly outside the minimum
//! enclosing circle of the iris landmarks. Because the sclera is whitish for
//! every subject, statistics over it respond to global colour and lighting
//! changes the same way regardless of skin tone:
//!
//! - [`color::saturation_sweep`] tabulates face-oval and sclera means under
//!   increasing saturation factors.
//! - [`report::assess`] turns per-sclera luma statistics into darkness and
//!   left/right uniformity indicators.
//!
//! Landmarks are read from a model-agnostic JSON file ([`landmarks`]).

pub mod cli;
pub mod color;
pub mod error;
pub mod geometry;
pub mod landmarks;
pub mod mask;
pub mod raster;
pub mod report;
pub mod segmentation;
pub mod stats;

pub use color::{
    adjust_saturation, adjust_saturation_with, saturation_sweep, SaturationFactor, SaturationModel,
    SweepRow, SweepTable,
};
pub use error::{Error, Result};
pub use geometry::{
    bounding_rect, convex_hull, min_enclosing_circle, point_in_convex_polygon,
    point_outside_circle, Circle, ConvexPolygon, PixelRect, Point2D,
};
pub use landmarks::{parse_landmarks, validate_against_image, EyeSide, LandmarkFile, Warning};
pub use mask::{PixelRegion, RegionMask};
pub use raster::{load_image, Rgb, RgbImage};
pub use report::{assess, serialize_report, QualityReport, QualityThresholds};
pub use segmentation::{
    build_eye_geometry, render_overlay, segment_both, segment_sclera, EyeGeometry, ScleraMask,
};
pub use stats::{compare_sides, polygon_region_stats, region_stats, AsymmetryReport, RegionStats};
