//! Host symbols: the marks a pattern fills.

use serde::{Deserialize, Serialize};

use crate::error::PatternError;
use crate::geom::{self, BBox, Point};

const DISK_SEGMENTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HostKind {
    Area,
    Line,
    Point,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HostGeometry {
    /// Simple closed polygon.
    Area { polygon: Vec<Point> },
    /// Polyline stroked with `width`.
    Line { path: Vec<Point>, width: f64 },
    /// Disk.
    Point { center: Point, radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HostRaw", into = "HostRaw")]
pub struct HostSymbol {
    pub id: String,
    pub geometry: HostGeometry,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HostRaw {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    id: String,
    kind: HostKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polygon: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
}

impl TryFrom<HostRaw> for HostSymbol {
    type Error = PatternError;

    fn try_from(r: HostRaw) -> Result<Self, Self::Error> {
        let missing = |f: &str| PatternError::InvalidHost(format!("`{f}` is required"));
        let geometry = match r.kind {
            HostKind::Area => HostGeometry::Area {
                polygon: r.polygon.ok_or_else(|| missing("polygon"))?,
            },
            HostKind::Line => HostGeometry::Line {
                path: r.path.ok_or_else(|| missing("path"))?,
                width: r.width.ok_or_else(|| missing("width"))?,
            },
            HostKind::Point => HostGeometry::Point {
                center: r.center.ok_or_else(|| missing("center"))?,
                radius: r.radius.ok_or_else(|| missing("radius"))?,
            },
        };
        HostSymbol::new(r.id, geometry)
    }
}

impl From<HostSymbol> for HostRaw {
    fn from(h: HostSymbol) -> Self {
        let mut raw = HostRaw {
            id: h.id,
            kind: HostKind::Area,
            polygon: None,
            path: None,
            width: None,
            center: None,
            radius: None,
        };
        match h.geometry {
            HostGeometry::Area { polygon } => raw.polygon = Some(polygon),
            HostGeometry::Line { path, width } => {
                raw.kind = HostKind::Line;
                raw.path = Some(path);
                raw.width = Some(width);
            }
            HostGeometry::Point { center, radius } => {
                raw.kind = HostKind::Point;
                raw.center = Some(center);
                raw.radius = Some(radius);
            }
        }
        raw
    }
}

impl HostSymbol {
    pub fn new(id: impl Into<String>, geometry: HostGeometry) -> Result<Self, PatternError> {
        let bad = |m: &str| Err(PatternError::InvalidHost(m.to_string()));
        match &geometry {
            HostGeometry::Area { polygon } => {
                if polygon.iter().any(|p| !p.is_finite()) {
                    return bad("polygon coordinates must be finite");
                }
                if !geom::is_simple(polygon) {
                    return bad("area polygon must be simple with at least 3 vertices");
                }
            }
            HostGeometry::Line { path, width } => {
                if path.len() < 2 || path.iter().any(|p| !p.is_finite()) {
                    return bad("line path needs at least 2 finite points");
                }
                if path.windows(2).any(|w| w[0] == w[1]) {
                    return bad("line path has a zero-length segment");
                }
                if width.is_nan() || *width <= 0.0 {
                    return bad("line width must be > 0");
                }
            }
            HostGeometry::Point { center, radius } => {
                if !center.is_finite() || radius.is_nan() || *radius <= 0.0 || !radius.is_finite() {
                    return bad("point radius must be > 0");
                }
            }
        }
        Ok(HostSymbol {
            id: id.into(),
            geometry,
        })
    }

    /// Axis-aligned rectangle `[0, w] × [0, h]`.
    pub fn rect(w: f64, h: f64) -> Result<Self, PatternError> {
        HostSymbol::new(
            "rect",
            HostGeometry::Area {
                polygon: vec![
                    Point::new(0.0, 0.0),
                    Point::new(w, 0.0),
                    Point::new(w, h),
                    Point::new(0.0, h),
                ],
            },
        )
    }

    /// Parses the `rect:W×H` shorthand (`x` also accepted).
    pub fn parse_shorthand(s: &str) -> Option<Result<Self, PatternError>> {
        let dims = s.strip_prefix("rect:")?;
        let (w, h) = dims.split_once(['x', 'X', '×'])?;
        let (w, h) = (w.trim().parse().ok()?, h.trim().parse().ok()?);
        Some(HostSymbol::rect(w, h))
    }

    pub fn kind(&self) -> HostKind {
        match self.geometry {
            HostGeometry::Area { .. } => HostKind::Area,
            HostGeometry::Line { .. } => HostKind::Line,
            HostGeometry::Point { .. } => HostKind::Point,
        }
    }

    /// The filled region as a polygon: the area itself, the stroke ribbon of a
    /// line, or an inscribed polygon of the disk.
    pub fn outline(&self) -> Vec<Point> {
        match &self.geometry {
            HostGeometry::Area { polygon } => polygon.clone(),
            HostGeometry::Line { path, width } => geom::stroke_ribbon(path, *width),
            HostGeometry::Point { center, radius } => {
                geom::ellipse_polygon(*center, *radius, *radius, 0.0, DISK_SEGMENTS, false)
            }
        }
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_points(&self.outline()).expect("validated host is non-empty")
    }

    /// Lattice anchor: the bounding-box minimum corner.
    pub fn anchor(&self) -> Point {
        self.bbox().min
    }

    pub fn area(&self) -> f64 {
        geom::signed_area(&self.outline()).abs()
    }

    pub fn min_half_extent(&self) -> f64 {
        match &self.geometry {
            HostGeometry::Line { width, .. } => 0.5 * width,
            HostGeometry::Point { radius, .. } => *radius,
            HostGeometry::Area { .. } => {
                let b = self.bbox();
                0.5 * b.width().min(b.height())
            }
        }
    }
}
