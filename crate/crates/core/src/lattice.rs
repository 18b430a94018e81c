//! Lattice point generation: unit cell basis, affine transform, coverage.

use crate::error::{PatternError, Result};
use crate::geom::{BBox, Mat, Point};
use crate::spec::{Affine2D, CellShape, UnitCell};

const MAX_POINTS: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticePoint {
    pub position: Point,
    pub i: i64,
    pub j: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoints {
    /// Row-major by `(j, i)`.
    pub points: Vec<LatticePoint>,
    /// Basis vectors after the transform's linear part; `v` is absent for 1D lattices.
    pub u: Point,
    pub v: Option<Point>,
    /// Region the set is guaranteed to cover (plus one cell diagonal).
    pub coverage: BBox,
    /// Cell-index space to world.
    pub matrix: Mat,
}

impl LatticePoints {
    pub fn dimensionality(&self) -> u8 {
        if self.v.is_some() {
            2
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest distance between distinct lattice points.
    pub fn min_spacing(&self) -> f64 {
        let u = self.u.norm();
        match self.v {
            None => u,
            Some(v) => u
                .min(v.norm())
                .min((self.u - v).norm())
                .min((self.u + v).norm()),
        }
    }

    /// Area of one transformed cell (`|u × v|`), or the cell length for 1D.
    pub fn cell_measure(&self) -> f64 {
        match self.v {
            None => self.u.norm(),
            Some(v) => self.u.cross(v).abs(),
        }
    }
}

/// Untransformed basis of a unit cell.
pub fn basis_vectors(cell: &UnitCell) -> (Point, Option<Point>) {
    let u = Point::new(cell.a, 0.0);
    let v = match cell.shape {
        CellShape::Segment => None,
        CellShape::Hexagonal => Some(Point::from_polar(cell.a, 120.0)),
        CellShape::Square | CellShape::Rectangular | CellShape::Oblique => {
            Some(Point::from_polar(cell.b_or_a(), cell.theta_or_default()))
        }
    };
    (u, v)
}

/// Where the untransformed lattice sits and what the transform pivots on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeFrame {
    /// A lattice point is placed here before the transform.
    pub anchor: Point,
    /// Center of the transform's linear part.
    pub center: Point,
}

impl LatticeFrame {
    pub fn for_region(region: &BBox) -> Self {
        LatticeFrame {
            anchor: region.min,
            center: region.center(),
        }
    }
}

/// Lattice over `region`, anchored at its min corner and transformed about its center.
pub fn generate_lattice(cell: &UnitCell, transform: &Affine2D, region: BBox) -> Result<LatticePoints> {
    generate_lattice_in(cell, transform, region, LatticeFrame::for_region(&region))
}

pub fn generate_lattice_in(
    cell: &UnitCell,
    transform: &Affine2D,
    region: BBox,
    frame: LatticeFrame,
) -> Result<LatticePoints> {
    let linear = transform.linear();
    let det = linear.det();
    if det.abs() < 1e-12 || !det.is_finite() {
        return Err(PatternError::DegenerateTransform { det });
    }
    let (u0, v0) = basis_vectors(cell);
    let world = transform.matrix_about(frame.center);
    // index space -> untransformed plane -> world
    let index_to_plane = Mat {
        a: u0.x,
        b: u0.y,
        c: v0.map_or(0.0, |v| v.x),
        d: v0.map_or(1.0, |v| v.y),
        e: frame.anchor.x,
        f: frame.anchor.y,
    };
    let matrix = world.then_after(&index_to_plane);
    let u = linear.apply_linear(u0);
    let v = v0.map(|v| linear.apply_linear(v));

    let diag = match v {
        Some(v) => (u + v).norm().max((u - v).norm()),
        None => u.norm(),
    };
    let expanded = region.expand(diag);
    let to_index = matrix.inverse().ok_or(PatternError::DegenerateTransform { det })?;
    let idx: Vec<Point> = expanded.corners().iter().map(|c| to_index.apply(*c)).collect();
    let lo = |f: fn(&Point) -> f64| idx.iter().map(f).fold(f64::INFINITY, f64::min).floor() as i64;
    let hi = |f: fn(&Point) -> f64| idx.iter().map(f).fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
    let (imin, imax) = (lo(|p| p.x), hi(|p| p.x));
    let (jmin, jmax) = if v.is_some() {
        (lo(|p| p.y), hi(|p| p.y))
    } else {
        (0, 0)
    };
    let count = (imax - imin + 1) as u128 * (jmax - jmin + 1) as u128;
    if count > MAX_POINTS {
        return Err(PatternError::LatticeTooLarge {
            count,
            limit: MAX_POINTS,
        });
    }

    let mut points = Vec::new();
    for j in jmin..=jmax {
        for i in imin..=imax {
            let position = matrix.apply(Point::new(i as f64, j as f64));
            if expanded.contains(position) {
                points.push(LatticePoint { position, i, j });
            }
        }
    }
    Ok(LatticePoints {
        points,
        u,
        v,
        coverage: region,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_region(s: f64) -> BBox {
        BBox::new(Point::new(0.0, 0.0), Point::new(s, s))
    }

    fn in_region(l: &LatticePoints, r: &BBox) -> Vec<Point> {
        l.points
            .iter()
            .map(|p| p.position)
            .filter(|p| r.expand(1e-9).contains(*p))
            .collect()
    }

    #[test]
    fn basis_examples() {
        let (u, v) = basis_vectors(&UnitCell::square(10.0));
        assert_eq!(u, Point::new(10.0, 0.0));
        let v = v.unwrap();
        assert!(v.x.abs() < 1e-12 && (v.y - 10.0).abs() < 1e-12);

        let (_, v) = basis_vectors(&UnitCell::hexagonal(10.0));
        let v = v.unwrap();
        assert!((v.x + 5.0).abs() < 1e-9 && (v.y - 8.6603).abs() < 1e-4);
        assert!((v.y - 75f64.sqrt()).abs() < 1e-9);

        let (_, v) = basis_vectors(&UnitCell::oblique(10.0, 6.0, 60.0));
        let v = v.unwrap();
        assert!((v.x - 3.0).abs() < 1e-9 && (v.y - 27f64.sqrt()).abs() < 1e-9);

        let (u, v) = basis_vectors(&UnitCell::segment(4.0));
        assert_eq!(u, Point::new(4.0, 0.0));
        assert!(v.is_none());
    }

    #[test]
    fn identity_square_grid_counts() {
        let r = square_region(100.0);
        let l = generate_lattice(&UnitCell::square(10.0), &Affine2D::IDENTITY, r).unwrap();
        assert_eq!(in_region(&l, &r).len(), 121);
        assert!(l.len() > 121);
        // row-major by (j, i)
        let keys: Vec<(i64, i64)> = l.points.iter().map(|p| (p.j, p.i)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // exact positions from indices
        for p in &l.points {
            assert_eq!(p.position, Point::new(10.0 * p.i as f64, 10.0 * p.j as f64));
        }
    }

    #[test]
    fn scale_composes_with_spacing() {
        let r = square_region(100.0);
        let a = generate_lattice(&UnitCell::square(5.0), &Affine2D::scale(2.0, 2.0), r).unwrap();
        let b = generate_lattice(&UnitCell::square(10.0), &Affine2D::IDENTITY, r).unwrap();
        let pa = in_region(&a, &r);
        let pb = in_region(&b, &r);
        assert_eq!(pa.len(), pb.len());
        for p in &pa {
            let d = pb.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9);
        }
    }

    fn nearest_neighbor_distances(pts: &[Point]) -> Vec<f64> {
        pts.iter()
            .enumerate()
            .map(|(i, p)| {
                pts.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| p.dist(*q))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn rotated_lattice_keeps_spacing() {
        let r = square_region(100.0);
        let l = generate_lattice(&UnitCell::square(10.0), &Affine2D::rotation(45.0), r).unwrap();
        let pts: Vec<Point> = l.points.iter().map(|p| p.position).collect();
        for d in nearest_neighbor_distances(&pts) {
            assert!((d - 10.0).abs() < 1e-9, "{d}");
        }
        // rotation center is the region center
        let c = r.center();
        let anchor_img = l.matrix.apply(Point::ORIGIN);
        assert!((anchor_img.dist(c) - Point::new(0.0, 0.0).dist(c)).abs() < 1e-9);
    }

    #[test]
    fn coverage_includes_margin() {
        let r = square_region(100.0);
        for rot in [0.0, 17.0, 45.0, 90.0] {
            let l = generate_lattice(&UnitCell::hexagonal(7.0), &Affine2D::rotation(rot), r).unwrap();
            // any point of the region is within one cell diagonal of a lattice point
            for probe in [Point::new(0.0, 0.0), Point::new(100.0, 100.0), Point::new(0.0, 100.0), Point::new(50.0, 3.0)] {
                let d = l.points.iter().map(|p| p.position.dist(probe)).fold(f64::INFINITY, f64::min);
                assert!(d <= 14.0, "rot {rot}: {d}");
            }
        }
    }

    #[test]
    fn degenerate_transform_rejected() {
        let t = Affine2D::scale(1e-7, 1e-7);
        let e = generate_lattice(&UnitCell::square(1.0), &t, square_region(1.0)).unwrap_err();
        assert!(matches!(e, PatternError::DegenerateTransform { .. }));
    }

    #[test]
    fn one_dimensional_row() {
        let r = square_region(100.0);
        let l = generate_lattice(&UnitCell::segment(10.0), &Affine2D::IDENTITY, r).unwrap();
        assert_eq!(l.dimensionality(), 1);
        assert!(l.points.iter().all(|p| p.j == 0 && p.position.y == 0.0));
        assert_eq!(in_region(&l, &r).len(), 11);
    }

    #[test]
    fn generation_is_stable() {
        let r = square_region(57.0);
        let t = Affine2D {
            rotation: 23.0,
            shear: 0.3,
            ..Affine2D::scale(1.2, 0.8)
        };
        let a = generate_lattice(&UnitCell::oblique(6.0, 4.0, 70.0), &t, r).unwrap();
        let b = generate_lattice(&UnitCell::oblique(6.0, 4.0, 70.0), &t, r).unwrap();
        assert_eq!(a, b);
    }
}
