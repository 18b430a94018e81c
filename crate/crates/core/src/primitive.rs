//! Resolved primitives and their world-space outlines.

use crate::color::Hsl;
use crate::fitting::ResolvedPattern;
use crate::geom::{self, BBox, Mat, Point};
use crate::spec::{ShapeKind, Size2};

const ELLIPSE_SEGMENTS: usize = 96;

/// One positioned, styled, group-tagged primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedPrimitive {
    pub position: Point,
    pub group: usize,
    pub shape: ShapeKind,
    /// Glyph outline in unit coordinates, for glyph-path shapes.
    pub glyph: Option<Vec<Point>>,
    /// For infinite lines the width is the span needed to cross the host.
    pub size: Size2,
    /// Degrees in `[0, 360)`.
    pub orientation: f64,
    pub color: Hsl,
    /// Extra linear map applied to the geometry (geometry stretch).
    pub deform: Option<Mat>,
    /// Inner pattern in the primitive's local frame.
    pub nested: Option<Box<ResolvedPattern>>,
}

/// Outline used for geometric predicates.
#[derive(Clone, Debug, PartialEq)]
pub enum Outline {
    Circle { center: Point, radius: f64 },
    Polygon(Vec<Point>),
}

impl Outline {
    pub fn bbox(&self) -> BBox {
        match self {
            Outline::Circle { center, radius } => BBox::new(*center, *center).expand(*radius),
            Outline::Polygon(p) => BBox::from_points(p).expect("non-empty outline"),
        }
    }
}

/// Where a primitive sits relative to a region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Relation {
    Outside,
    Straddling,
    /// Fully inside; `clearance` is the distance to the boundary (a lower
    /// bound once it exceeds the clearance asked for).
    Inside { clearance: f64 },
}

impl ResolvedPrimitive {
    /// Local (unit-size-free) frame: translate · deform · rotate.
    pub fn frame(&self) -> Mat {
        let mut m = Mat::translate(self.position);
        if let Some(d) = &self.deform {
            m = m.then_after(d);
        }
        m.then_after(&Mat::rotate(self.orientation))
    }

    fn is_round(&self) -> bool {
        self.shape == ShapeKind::Circle && self.size.width == self.size.height && self.deform.is_none()
    }

    /// Outline for fitting predicates. Curved shapes are approximated by
    /// circumscribed polygons so containment is never overstated.
    pub fn outline(&self) -> Outline {
        if self.is_round() {
            return Outline::Circle {
                center: self.position,
                radius: 0.5 * self.size.width,
            };
        }
        Outline::Polygon(self.polygon(true))
    }

    /// Local outline before the frame is applied.
    pub fn local_polygon(&self, circumscribed: bool) -> Vec<Point> {
        let Size2 { width: w, height: h } = self.size;
        match self.shape {
            ShapeKind::Circle => {
                let k = if circumscribed {
                    1.0
                } else {
                    // equal-area polygon
                    let n = ELLIPSE_SEGMENTS as f64;
                    (std::f64::consts::TAU / (n * (std::f64::consts::TAU / n).sin())).sqrt()
                };
                geom::ellipse_polygon(Point::ORIGIN, 0.5 * w * k, 0.5 * h * k, 0.0, ELLIPSE_SEGMENTS, circumscribed)
            }
            ShapeKind::Square => geom::rect_polygon(&Mat::IDENTITY, w, w),
            ShapeKind::Rectangle | ShapeKind::LineSegment | ShapeKind::InfiniteLine | ShapeKind::Nested => {
                geom::rect_polygon(&Mat::IDENTITY, w, h)
            }
            ShapeKind::GlyphPath => self
                .glyph
                .as_deref()
                .unwrap_or_default()
                .iter()
                .map(|p| Point::new(p.x * w, p.y * h))
                .collect(),
        }
    }

    /// World-space polygon.
    pub fn polygon(&self, circumscribed: bool) -> Vec<Point> {
        let m = self.frame();
        self.local_polygon(circumscribed).into_iter().map(|p| m.apply(p)).collect()
    }

    /// Largest distance from the position to the outline.
    pub fn radius(&self) -> f64 {
        match self.outline() {
            Outline::Circle { radius, .. } => radius,
            Outline::Polygon(p) => p.iter().map(|q| q.dist(self.position)).fold(0.0, f64::max),
        }
    }

    pub fn area(&self) -> f64 {
        if self.is_round() {
            let r = 0.5 * self.size.width;
            return std::f64::consts::PI * r * r;
        }
        geom::signed_area(&self.polygon(false)).abs()
    }
}

/// Classifies `outline` against the simple polygon `region`. Clearance is
/// computed exactly up to `need`; beyond that only a lower bound is given.
pub fn relate(outline: &Outline, region: &[Point], need: f64) -> Relation {
    match outline {
        Outline::Circle { center, radius } => {
            let inside = geom::contains(region, *center);
            let d = geom::boundary_dist(region, *center);
            if inside && d >= *radius {
                Relation::Inside { clearance: d - radius }
            } else if !inside && d > *radius {
                Relation::Outside
            } else {
                Relation::Straddling
            }
        }
        Outline::Polygon(poly) => {
            let bb = outline.bbox();
            let c = bb.center();
            let r = poly.iter().map(|p| p.dist(c)).fold(0.0, f64::max);
            let inside_c = geom::contains(region, c);
            let dc = geom::boundary_dist(region, c);
            if inside_c && dc > r + need {
                return Relation::Inside { clearance: dc - r };
            }
            if !inside_c && dc > r {
                return Relation::Outside;
            }
            for (a1, a2) in geom::edges(poly) {
                for (b1, b2) in geom::edges(region) {
                    if geom::segments_intersect(a1, a2, b1, b2) {
                        return Relation::Straddling;
                    }
                }
            }
            if geom::contains(region, poly[0]) {
                let mut clearance = f64::INFINITY;
                for (a1, a2) in geom::edges(poly) {
                    for (b1, b2) in geom::edges(region) {
                        clearance = clearance.min(geom::segment_segment_dist(a1, a2, b1, b2));
                    }
                }
                Relation::Inside { clearance }
            } else if geom::contains(poly, region[0]) {
                // region lies inside the primitive
                Relation::Straddling
            } else {
                Relation::Outside
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prim(shape: ShapeKind, w: f64, h: f64, at: Point, rot: f64) -> ResolvedPrimitive {
        ResolvedPrimitive {
            position: at,
            group: 0,
            shape,
            glyph: None,
            size: Size2::new(w, h),
            orientation: rot,
            color: Hsl::BLACK,
            deform: None,
            nested: None,
        }
    }

    fn square100() -> Vec<Point> {
        geom::rect_polygon(&Mat::translate(Point::new(50.0, 50.0)), 100.0, 100.0)
    }

    #[test]
    fn circle_relations() {
        let host = square100();
        let inside = prim(ShapeKind::Circle, 4.0, 4.0, Point::new(3.0, 50.0), 0.0);
        assert_eq!(relate(&inside.outline(), &host, 0.0), Relation::Inside { clearance: 1.0 });
        let edge = prim(ShapeKind::Circle, 4.0, 4.0, Point::new(1.0, 50.0), 0.0);
        assert_eq!(relate(&edge.outline(), &host, 0.0), Relation::Straddling);
        let out = prim(ShapeKind::Circle, 4.0, 4.0, Point::new(-3.0, 50.0), 0.0);
        assert_eq!(relate(&out.outline(), &host, 0.0), Relation::Outside);
    }

    #[test]
    fn rotated_square_relations() {
        let host = square100();
        // half-diagonal of a 4×4 square is 2.83
        let p = prim(ShapeKind::Square, 4.0, 4.0, Point::new(2.5, 50.0), 45.0);
        assert_eq!(relate(&p.outline(), &host, 0.0), Relation::Straddling);
        let p = prim(ShapeKind::Square, 4.0, 4.0, Point::new(2.5, 50.0), 0.0);
        match relate(&p.outline(), &host, 0.0) {
            Relation::Inside { clearance } => assert!((clearance - 0.5).abs() < 1e-12),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn host_inside_primitive() {
        let small = geom::rect_polygon(&Mat::translate(Point::new(5.0, 5.0)), 2.0, 2.0);
        let p = prim(ShapeKind::Square, 40.0, 40.0, Point::new(5.0, 5.0), 0.0);
        assert_eq!(relate(&p.outline(), &small, 0.0), Relation::Straddling);
    }

    #[test]
    fn equal_area_polygon() {
        let p = prim(ShapeKind::Circle, 4.0, 6.0, Point::ORIGIN, 30.0);
        let a = geom::signed_area(&p.polygon(false)).abs();
        assert!((a - std::f64::consts::PI * 6.0).abs() < 1e-9);
    }
}
