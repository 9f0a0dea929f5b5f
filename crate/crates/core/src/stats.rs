//! Pixel statistics over a region: means, BT.601 luma and 256-bin histograms.
//!
//! Luma is accumulated in integer thousandths (`299 R + 587 G + 114 B`), so
//! means, the half-up bin rounding and the variance are exact up to the final
//! division.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, PixelRect};
use crate::mask::{rasterize_polygon, PixelRegion};
use crate::raster::{Rgb, RgbImage};

pub const BINS: usize = 256;

pub type Histogram = [u64; BINS];

/// BT.601 luma scaled by 1000.
#[inline]
pub fn luma_milli([r, g, b]: Rgb) -> u32 {
    299 * r as u32 + 587 * g as u32 + 114 * b as u32
}

#[inline]
pub fn luma([r, g, b]: Rgb) -> f64 {
    0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64
}

/// Luma bin, rounded half-up.
#[inline]
pub fn luma_bin(px: Rgb) -> usize {
    ((luma_milli(px) + 500) / 1000) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionStats {
    pub pixel_count: usize,
    pub mean_all_channels: f64,
    pub mean_per_channel: [f64; 3],
    pub mean_luma: f64,
    pub std_luma: f64,
    pub histogram_luma: Histogram,
    pub histogram_per_channel: [Histogram; 3],
}

impl RegionStats {
    /// Fraction of pixels whose luma bin is below `threshold`.
    pub fn dark_fraction(&self, threshold: f64) -> f64 {
        if self.pixel_count == 0 {
            return 0.0;
        }
        let dark: u64 = self
            .histogram_luma
            .iter()
            .enumerate()
            .filter(|(bin, _)| (*bin as f64) < threshold)
            .map(|(_, &c)| c)
            .sum();
        dark as f64 / self.pixel_count as f64
    }

    pub fn summary(&self) -> RegionSummary {
        RegionSummary {
            pixel_count: self.pixel_count,
            mean_all_channels: self.mean_all_channels,
            mean_per_channel: self.mean_per_channel,
            mean_luma: self.mean_luma,
            std_luma: self.std_luma,
        }
    }
}

/// Histogram-free view of [`RegionStats`] carried inside reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub pixel_count: usize,
    pub mean_all_channels: f64,
    pub mean_per_channel: [f64; 3],
    pub mean_luma: f64,
    pub std_luma: f64,
}

#[derive(Default)]
struct Accumulator {
    count: u64,
    channel_sums: [u64; 3],
    luma_sum: u64,
    luma_sq_sum: u128,
    histogram_luma: Vec<u64>,
    histogram_per_channel: [Vec<u64>; 3],
}

impl Accumulator {
    fn new() -> Self {
        Self {
            histogram_luma: vec![0; BINS],
            histogram_per_channel: [vec![0; BINS], vec![0; BINS], vec![0; BINS]],
            ..Default::default()
        }
    }

    fn push(&mut self, px: Rgb) {
        self.count += 1;
        for ((sum, hist), v) in self
            .channel_sums
            .iter_mut()
            .zip(&mut self.histogram_per_channel)
            .zip(px)
        {
            *sum += v as u64;
            hist[v as usize] += 1;
        }
        let y = luma_milli(px) as u64;
        self.luma_sum += y;
        self.luma_sq_sum += (y as u128) * (y as u128);
        self.histogram_luma[luma_bin(px)] += 1;
    }

    fn finish(self) -> Result<RegionStats> {
        if self.count == 0 {
            return Err(Error::EmptyRegion);
        }
        let n = self.count as f64;
        let mean_per_channel = self.channel_sums.map(|s| s as f64 / n);
        let total: u64 = self.channel_sums.iter().sum();
        let mean_all_channels = total as f64 / (3.0 * n);
        let mean_luma = self.luma_sum as f64 / (1000.0 * n);
        // n * sum(y^2) - (sum y)^2 >= 0 exactly in integers
        let spread = self.count as u128 * self.luma_sq_sum - (self.luma_sum as u128).pow(2);
        let std_luma = (spread as f64).sqrt() / (n * 1000.0);

        let to_hist = |v: Vec<u64>| -> Histogram { v.try_into().expect("256 bins") };
        let [hr, hg, hb] = self.histogram_per_channel;
        Ok(RegionStats {
            pixel_count: self.count as usize,
            mean_all_channels,
            mean_per_channel,
            mean_luma,
            std_luma,
            histogram_luma: to_hist(self.histogram_luma),
            histogram_per_channel: [to_hist(hr), to_hist(hg), to_hist(hb)],
        })
    }
}

fn check_bounds(image: &RgbImage, rect: PixelRect) -> Result<()> {
    if PixelRect::image(image.width(), image.height()).contains_rect(&rect) {
        Ok(())
    } else {
        Err(Error::RegionOutOfBounds {
            x0: rect.x0,
            y0: rect.y0,
            x1: rect.x1,
            y1: rect.y1,
            width: image.width(),
            height: image.height(),
        })
    }
}

/// Statistics over the pixels of `region`.
pub fn region_stats(image: &RgbImage, region: &impl PixelRegion) -> Result<RegionStats> {
    let mask = region.region_mask();
    check_bounds(image, mask.rect())?;
    let mut acc = Accumulator::new();
    for (x, y) in mask.pixels() {
        acc.push(image.get(x, y));
    }
    acc.finish()
}

/// Statistics over the pixel-centre rasterization of `poly`, clipped to the image.
pub fn polygon_region_stats(image: &RgbImage, poly: &ConvexPolygon) -> Result<RegionStats> {
    let mask = rasterize_polygon(poly, PixelRect::image(image.width(), image.height()));
    region_stats(image, &mask)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryReport {
    pub left_mean_luma: f64,
    pub right_mean_luma: f64,
    pub abs_diff: f64,
    pub normalized_diff: f64,
    pub histogram_intersection: f64,
}

/// Left/right luma comparison.
pub fn compare_sides(left: &RegionStats, right: &RegionStats) -> Result<AsymmetryReport> {
    if left.pixel_count == 0 || right.pixel_count == 0 {
        return Err(Error::EmptyRegion);
    }
    let abs_diff = (left.mean_luma - right.mean_luma).abs();
    let normalized_diff = abs_diff / left.mean_luma.max(right.mean_luma).max(1e-6);
    Ok(AsymmetryReport {
        left_mean_luma: left.mean_luma,
        right_mean_luma: right.mean_luma,
        abs_diff,
        normalized_diff,
        histogram_intersection: histogram_intersection(
            &left.histogram_luma,
            left.pixel_count,
            &right.histogram_luma,
            right.pixel_count,
        ),
    })
}

/// `sum_b min(a_b / na, b_b / nb)`.
pub fn histogram_intersection(a: &Histogram, na: usize, b: &Histogram, nb: usize) -> f64 {
    // compare in integers to keep identical histograms at exactly 1
    let (na, nb) = (na as u128, nb as u128);
    let shared: u128 = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x as u128 * nb).min(y as u128 * na))
        .sum();
    (shared as f64 / (na * nb) as f64).clamp(0.0, 1.0)
}

pub const HISTOGRAM_CSV_HEADER: &str = "bin,luma,r,g,b";

/// Histogram table with one row per bin.
pub fn export_histogram_csv(stats: &RegionStats) -> Vec<u8> {
    let mut out = String::with_capacity(16 * BINS);
    out.push_str(HISTOGRAM_CSV_HEADER);
    out.push('\n');
    let [r, g, b] = &stats.histogram_per_channel;
    for bin in 0..BINS {
        writeln!(
            out,
            "{bin},{},{},{},{}",
            stats.histogram_luma[bin], r[bin], g[bin], b[bin]
        )
        .expect("writing to a String cannot fail");
    }
    out.into_bytes()
}

/// Parses a table written by [`export_histogram_csv`] into `[luma, r, g, b]`.
pub fn parse_histogram_csv(bytes: &[u8]) -> Result<[Histogram; 4]> {
    let bad = |msg: String| Error::Report(format!("histogram csv: {msg}"));
    let text = std::str::from_utf8(bytes).map_err(|e| bad(e.to_string()))?;
    let mut lines = text.lines();
    if lines.next() != Some(HISTOGRAM_CSV_HEADER) {
        return Err(bad("missing header".into()));
    }
    let mut out = [[0u64; BINS]; 4];
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 || fields[0] != i.to_string() || i >= BINS {
            return Err(bad(format!("unexpected row {i}: {line}")));
        }
        for (k, f) in fields[1..].iter().enumerate() {
            out[k][i] = f
                .parse()
                .map_err(|_| bad(format!("row {i}: bad count {f}")))?;
        }
        rows += 1;
    }
    if rows != BINS {
        return Err(bad(format!("expected {BINS} rows, got {rows}")));
    }
    Ok(out)
}
