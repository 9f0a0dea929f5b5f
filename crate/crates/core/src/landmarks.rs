//! Canonical landmark file: named point groups in pixel coordinates.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "image": {"width": 256, "height": 256, "source": "portrait-01"},
//!   "groups": {
//!     "left_eye":  [[x, y], ...],
//!     "right_eye": [[x, y], ...],
//!     "left_iris": [[x, y], ...],
//!     "right_iris":[[x, y], ...],
//!     "face_oval": [[x, y], ...]
//!   }
//! }
//! ```
//!
//! `face_oval` is optional. Unknown keys are ignored at every level.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::Point2D;

pub const SCHEMA_VERSION: u32 = 1;
pub const MIN_EYE_POINTS: usize = 6;
pub const MIN_IRIS_POINTS: usize = 3;
pub const MIN_FACE_OVAL_POINTS: usize = 8;

/// Producer-defined eye label. The core never flips these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EyeSide {
    Left,
    Right,
}

impl EyeSide {
    pub const BOTH: [EyeSide; 2] = [EyeSide::Left, EyeSide::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            EyeSide::Left => "left",
            EyeSide::Right => "right",
        }
    }
}

impl fmt::Display for EyeSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkGroups {
    pub left_eye: Vec<Point2D>,
    pub right_eye: Vec<Point2D>,
    pub left_iris: Vec<Point2D>,
    pub right_iris: Vec<Point2D>,
    pub face_oval: Option<Vec<Point2D>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFile {
    pub schema_version: u32,
    pub image_width: u32,
    pub image_height: u32,
    pub source_id: String,
    pub groups: LandmarkGroups,
}

/// Non-fatal findings from [`validate_against_image`].
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    OutOfBounds {
        group: &'static str,
        index: usize,
        point: Point2D,
    },
    DimensionMismatch {
        declared: (u32, u32),
        actual: (u32, u32),
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::OutOfBounds {
                group,
                index,
                point,
            } => write!(
                f,
                "{group}[{index}] = ({}, {}) lies outside the image",
                point.x, point.y
            ),
            Warning::DimensionMismatch { declared, actual } => write!(
                f,
                "declared image size {}x{} differs from actual {}x{}",
                declared.0, declared.1, actual.0, actual.1
            ),
        }
    }
}

impl LandmarkFile {
    pub fn eye(&self, side: EyeSide) -> &[Point2D] {
        match side {
            EyeSide::Left => &self.groups.left_eye,
            EyeSide::Right => &self.groups.right_eye,
        }
    }

    pub fn iris(&self, side: EyeSide) -> &[Point2D] {
        match side {
            EyeSide::Left => &self.groups.left_iris,
            EyeSide::Right => &self.groups.right_iris,
        }
    }

    pub fn face_oval(&self) -> Option<&[Point2D]> {
        self.groups.face_oval.as_deref()
    }

    /// Same file with the left and right labels exchanged.
    pub fn with_sides_swapped(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.groups.left_eye, &mut out.groups.right_eye);
        std::mem::swap(&mut out.groups.left_iris, &mut out.groups.right_iris);
        out
    }

    fn named_groups(&self) -> impl Iterator<Item = (&'static str, &[Point2D])> {
        let g = &self.groups;
        [
            ("left_eye", Some(g.left_eye.as_slice())),
            ("right_eye", Some(g.right_eye.as_slice())),
            ("left_iris", Some(g.left_iris.as_slice())),
            ("right_iris", Some(g.right_iris.as_slice())),
            ("face_oval", g.face_oval.as_deref()),
        ]
        .into_iter()
        .filter_map(|(name, pts)| pts.map(|p| (name, p)))
    }

    pub fn to_json_value(&self) -> Value {
        let mut groups = Map::new();
        for (name, pts) in self.named_groups() {
            let arr: Vec<Value> = pts.iter().map(|p| json!([p.x, p.y])).collect();
            groups.insert(name.to_string(), Value::Array(arr));
        }
        json!({
            "schema_version": self.schema_version,
            "image": {
                "width": self.image_width,
                "height": self.image_height,
                "source": self.source_id,
            },
            "groups": Value::Object(groups),
        })
    }

    /// Pretty-printed document in the canonical group order.
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(&self.to_json_value())
            .expect("landmark document is always serializable");
        out.push(b'\n');
        out
    }
}

/// Parses and validates a landmark document.
pub fn parse_landmarks(bytes: &[u8]) -> Result<LandmarkFile> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let root = root
        .as_object()
        .ok_or_else(|| Error::schema("$", "document must be an object"))?;

    let version = root
        .get("schema_version")
        .ok_or_else(|| Error::schema("schema_version", "missing"))?
        .as_u64()
        .ok_or_else(|| Error::schema("schema_version", "must be an unsigned integer"))?;
    if version != SCHEMA_VERSION as u64 {
        return Err(Error::schema(
            "schema_version",
            format!("unsupported version {version}, expected {SCHEMA_VERSION}"),
        ));
    }

    let image = root
        .get("image")
        .ok_or_else(|| Error::schema("image", "missing"))?
        .as_object()
        .ok_or_else(|| Error::schema("image", "must be an object"))?;
    let dim = |key: &str| -> Result<u32> {
        let field = format!("image.{key}");
        let v = image
            .get(key)
            .ok_or_else(|| Error::schema(&field, "missing"))?
            .as_u64()
            .ok_or_else(|| Error::schema(&field, "must be a positive integer"))?;
        match u32::try_from(v) {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::schema(&field, "must be a positive 32-bit integer")),
        }
    };
    let image_width = dim("width")?;
    let image_height = dim("height")?;
    let source_id = match image.get("source") {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::schema("image.source", "must be a string")),
    };

    let groups = root
        .get("groups")
        .ok_or_else(|| Error::schema("groups", "missing"))?
        .as_object()
        .ok_or_else(|| Error::schema("groups", "must be an object"))?;

    let left_eye = required_group(groups, "left_eye", MIN_EYE_POINTS)?;
    let right_eye = required_group(groups, "right_eye", MIN_EYE_POINTS)?;
    let left_iris = required_group(groups, "left_iris", MIN_IRIS_POINTS)?;
    let right_iris = required_group(groups, "right_iris", MIN_IRIS_POINTS)?;
    let face_oval = match groups.get("face_oval") {
        None => None,
        Some(v) => Some(parse_group(v, "face_oval", MIN_FACE_OVAL_POINTS)?),
    };

    Ok(LandmarkFile {
        schema_version: SCHEMA_VERSION,
        image_width,
        image_height,
        source_id,
        groups: LandmarkGroups {
            left_eye,
            right_eye,
            left_iris,
            right_iris,
            face_oval,
        },
    })
}

fn required_group(groups: &Map<String, Value>, name: &str, min: usize) -> Result<Vec<Point2D>> {
    let v = groups
        .get(name)
        .ok_or_else(|| Error::schema(name, "required group is missing"))?;
    parse_group(v, name, min)
}

fn parse_group(v: &Value, name: &str, min: usize) -> Result<Vec<Point2D>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(name, "must be an array of [x, y] pairs"))?;
    if arr.len() < min {
        return Err(Error::schema(
            name,
            format!("has {} points, needs at least {min}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(i, item)| {
            let field = || format!("{name}[{i}]");
            let pair = item
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::schema(field(), "must be an [x, y] pair"))?;
            let x = pair[0].as_f64();
            let y = pair[1].as_f64();
            match (x, y) {
                (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Ok(Point2D::new(x, y)),
                _ => Err(Error::schema(field(), "coordinates must be finite numbers")),
            }
        })
        .collect()
}

/// Checks a parsed file against the actual image size.
pub fn validate_against_image(lm: &LandmarkFile, width: u32, height: u32) -> Vec<Warning> {
    let mut warnings = Vec::new();
    if (lm.image_width, lm.image_height) != (width, height) {
        warnings.push(Warning::DimensionMismatch {
            declared: (lm.image_width, lm.image_height),
            actual: (width, height),
        });
    }
    let (w, h) = (width as f64, height as f64);
    for (group, pts) in lm.named_groups() {
        for (index, &point) in pts.iter().enumerate() {
            if !(point.x >= 0.0 && point.x < w && point.y >= 0.0 && point.y < h) {
                warnings.push(Warning::OutOfBounds {
                    group,
                    index,
                    point,
                });
            }
        }
    }
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize, cx: f64, cy: f64, r: f64) -> Value {
        let pts: Vec<Value> = (0..n)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / n as f64;
                json!([cx + r * t.cos(), cy + r * t.sin()])
            })
            .collect();
        Value::Array(pts)
    }

    fn minimal() -> Value {
        json!({
            "schema_version": 1,
            "image": {"width": 100, "height": 80, "source": "unit"},
            "groups": {
                "left_eye": ring(6, 30.0, 40.0, 8.0),
                "right_eye": ring(6, 70.0, 40.0, 8.0),
                "left_iris": ring(3, 30.0, 40.0, 3.0),
                "right_iris": ring(3, 70.0, 40.0, 3.0),
            },
            "extra": {"ignored": true}
        })
    }

    fn parse_value(v: &Value) -> Result<LandmarkFile> {
        parse_landmarks(&serde_json::to_vec(v).unwrap())
    }

    fn schema_field(err: Error) -> String {
        match err {
            Error::Schema { field, .. } => field,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn parses_minimal_document() {
        let lm = parse_value(&minimal()).unwrap();
        assert_eq!(lm.image_width, 100);
        assert_eq!(lm.image_height, 80);
        assert_eq!(lm.source_id, "unit");
        assert_eq!(lm.groups.left_eye.len(), 6);
        assert_eq!(lm.groups.right_iris.len(), 3);
        assert!(lm.face_oval().is_none());
    }

    #[test]
    fn missing_group_is_named() {
        let mut doc = minimal();
        doc["groups"].as_object_mut().unwrap().remove("right_iris");
        assert_eq!(schema_field(parse_value(&doc).unwrap_err()), "right_iris");
    }

    #[test]
    fn non_finite_coordinate_names_point_index() {
        let mut doc = minimal();
        doc["groups"]["left_eye"][3] = json!(["NaN", 4.0]);
        assert_eq!(schema_field(parse_value(&doc).unwrap_err()), "left_eye[3]");
    }

    #[test]
    fn cardinality_and_version_are_checked() {
        let mut doc = minimal();
        doc["groups"]["left_eye"] = ring(5, 30.0, 40.0, 8.0);
        assert_eq!(schema_field(parse_value(&doc).unwrap_err()), "left_eye");

        let mut doc = minimal();
        doc["groups"]["face_oval"] = ring(7, 50.0, 40.0, 30.0);
        assert_eq!(schema_field(parse_value(&doc).unwrap_err()), "face_oval");

        let mut doc = minimal();
        doc["schema_version"] = json!(2);
        assert_eq!(
            schema_field(parse_value(&doc).unwrap_err()),
            "schema_version"
        );

        let mut doc = minimal();
        doc["image"]["width"] = json!(0);
        assert_eq!(schema_field(parse_value(&doc).unwrap_err()), "image.width");
    }

    #[test]
    fn malformed_text_is_parse_error() {
        assert!(matches!(
            parse_landmarks(b"{\"schema_version\": 1,"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_landmarks(b"\xff\xfe"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_landmarks(b"[1, 2]"),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn serialization_round_trips() {
        let mut doc = minimal();
        doc["groups"]["face_oval"] = ring(12, 50.0, 40.0, 30.0);
        let lm = parse_value(&doc).unwrap();
        let again = parse_landmarks(&lm.to_json_bytes()).unwrap();
        assert_eq!(lm, again);
    }

    #[test]
    fn validation_warnings() {
        let lm = parse_value(&minimal()).unwrap();
        assert!(validate_against_image(&lm, 100, 80).is_empty());

        let mut shifted = lm.clone();
        shifted.groups.right_eye[2].x = 103.0;
        let w = validate_against_image(&shifted, 100, 80);
        assert_eq!(w.len(), 1);
        assert!(matches!(
            w[0],
            Warning::OutOfBounds {
                group: "right_eye",
                index: 2,
                ..
            }
        ));

        let w = validate_against_image(&lm, 120, 80);
        assert_eq!(
            w,
            vec![Warning::DimensionMismatch {
                declared: (100, 80),
                actual: (120, 80)
            }]
        );
    }

    #[test]
    fn swapping_sides_exchanges_groups() {
        let lm = parse_value(&minimal()).unwrap();
        let swapped = lm.with_sides_swapped();
        assert_eq!(swapped.eye(EyeSide::Left), lm.eye(EyeSide::Right));
        assert_eq!(swapped.iris(EyeSide::Right), lm.iris(EyeSide::Left));
        assert_eq!(swapped.with_sides_swapped(), lm);
    }
}
