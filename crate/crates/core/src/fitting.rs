//! Applying a pattern to its host: offset, stretch, clip / omit-incomplete /
//! overflow, halo, and path-following placement for line hosts.

use std::fmt;

use serde::Serialize;

use crate::geom::{Mat, Point};
use crate::host::HostSymbol;
use crate::primitive::{relate, Relation, ResolvedPrimitive};
use crate::spec::{FitMode, FitSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DropCounts {
    pub clipped_out: usize,
    pub incomplete: usize,
    pub halo: usize,
}

impl DropCounts {
    pub fn total(&self) -> usize {
        self.clipped_out + self.incomplete + self.halo
    }
}

/// Primitive × lattice × host extension dimensionality, e.g. `2×2×2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Composition {
    pub primitive: u8,
    pub lattice: u8,
    pub host: u8,
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{}×{}", self.primitive, self.lattice, self.host)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedPattern {
    pub host: HostSymbol,
    pub primitives: Vec<ResolvedPrimitive>,
    pub dropped: DropCounts,
    pub composition: Composition,
    pub mode: FitMode,
    /// Number of groups in the generating spec.
    pub group_count: usize,
    /// Per-group counts assigned before fitting.
    pub assigned: Vec<usize>,
    pub data: Option<DataSummary>,
}

/// Outcome of data-driven placement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DataSummary {
    pub records: usize,
    pub dropped_outside: usize,
    pub converged: bool,
    pub residual_violations: usize,
    pub iterations: usize,
}

impl ResolvedPattern {
    /// Surviving primitives per group.
    pub fn group_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.group_count];
        for p in &self.primitives {
            counts[p.group] += 1;
        }
        counts
    }

    pub fn pre_fit_count(&self) -> usize {
        self.primitives.len() + self.dropped.total()
    }

    /// Deepest chain of nested patterns below this one (0 when flat).
    pub fn nesting_depth(&self) -> usize {
        self.primitives
            .iter()
            .filter_map(|p| p.nested.as_deref())
            .map(|n| 1 + n.nesting_depth())
            .max()
            .unwrap_or(0)
    }
}

/// Position map of the fit stage: offset, then stretch about the host center.
pub fn fit_matrix(fit: &FitSpec, host: &HostSymbol) -> Mat {
    let offset = Mat::translate(fit.pattern_offset);
    match &fit.stretch {
        Some(s) => s.matrix_about(host.bbox().center()).then_after(&offset),
        None => offset,
    }
}

/// Maps positions through offset and stretch, then filters by mode and halo.
pub fn fit_pattern(
    primitives: Vec<ResolvedPrimitive>,
    host: &HostSymbol,
    fit: &FitSpec,
    composition: Composition,
    group_count: usize,
) -> ResolvedPattern {
    let m = fit_matrix(fit, host);
    let deform = match (&fit.stretch, fit.stretch_geometry) {
        (Some(s), true) => Some(s.linear()),
        _ => None,
    };
    let region = host.outline();
    let mut dropped = DropCounts::default();
    let mut kept = Vec::with_capacity(primitives.len());
    for mut p in primitives {
        p.position = m.apply(p.position);
        if let Some(d) = &deform {
            p.deform = Some(match &p.deform {
                Some(prev) => d.then_after(prev),
                None => *d,
            });
        }
        match relate(&p.outline(), &region, fit.halo) {
            Relation::Outside => dropped.clipped_out += 1,
            Relation::Straddling if fit.mode == FitMode::OmitIncomplete => dropped.incomplete += 1,
            Relation::Straddling if fit.halo > 0.0 => dropped.halo += 1,
            Relation::Inside { clearance } if clearance < fit.halo => dropped.halo += 1,
            _ => kept.push(p),
        }
    }
    ResolvedPattern {
        host: host.clone(),
        primitives: kept,
        dropped,
        composition,
        mode: fit.mode,
        group_count,
        assigned: Vec::new(),
        data: None,
    }
}

/// Positions at arc-length multiples of `spacing` from the start of `path`,
/// each with the local tangent angle in degrees. At an interior vertex the
/// tangent bisects the two segment directions. A final partial interval adds
/// the path end unless the mode omits incomplete primitives.
pub fn along_line_lattice(path: &[Point], spacing: f64, fit: &FitSpec) -> Vec<(Point, f64)> {
    let seg_len: Vec<f64> = path.windows(2).map(|w| w[0].dist(w[1])).collect();
    let total: f64 = seg_len.iter().sum();
    if total <= 0.0 || spacing <= 0.0 {
        return Vec::new();
    }
    let tol = 1e-9 * total.max(spacing);
    let n = ((total + tol) / spacing).floor() as usize;
    let mut stations: Vec<f64> = (0..=n).map(|k| k as f64 * spacing).collect();
    if total - n as f64 * spacing > tol && fit.mode != FitMode::OmitIncomplete {
        stations.push(total);
    }
    let dir = |i: usize| {
        let d = path[i + 1] - path[i];
        d * (1.0 / seg_len[i])
    };
    let angle = |d: Point| d.y.atan2(d.x).to_degrees();

    let mut out = Vec::with_capacity(stations.len());
    let mut seg = 0;
    let mut seg_start = 0.0;
    for s in stations {
        let s = s.min(total);
        while seg + 1 < seg_len.len() && s > seg_start + seg_len[seg] + tol {
            seg_start += seg_len[seg];
            seg += 1;
        }
        let local = (s - seg_start).clamp(0.0, seg_len[seg]);
        let at_end_vertex = (seg_len[seg] - local).abs() <= tol && seg + 1 < seg_len.len();
        let at_start_vertex = local.abs() <= tol && seg > 0;
        let (pos, tangent) = if at_end_vertex || at_start_vertex {
            let v = if at_end_vertex { seg + 1 } else { seg };
            let bis = dir(v - 1) + dir(v);
            let t = if bis.norm() < 1e-12 { dir(v - 1) } else { bis };
            (path[v], angle(t))
        } else {
            (path[seg] + dir(seg) * local, angle(dir(seg)))
        };
        out.push((pos, crate::color::wrap_degrees(tangent)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Hsl;
    use crate::spec::{ShapeKind, Size2};

    fn circle(at: Point, r: f64) -> ResolvedPrimitive {
        ResolvedPrimitive {
            position: at,
            group: 0,
            shape: ShapeKind::Circle,
            glyph: None,
            size: Size2::new(2.0 * r, 2.0 * r),
            orientation: 0.0,
            color: Hsl::BLACK,
            deform: None,
            nested: None,
        }
    }

    const C: Composition = Composition {
        primitive: 2,
        lattice: 2,
        host: 2,
    };

    fn fit(mode: FitMode, halo: f64) -> FitSpec {
        FitSpec {
            mode,
            halo,
            ..FitSpec::default()
        }
    }

    #[test]
    fn halo_drops_near_border() {
        let host = HostSymbol::rect(100.0, 100.0).unwrap();
        let out = fit_pattern(vec![circle(Point::new(3.0, 50.0), 2.0)], &host, &fit(FitMode::Clip, 5.0), C, 1);
        assert!(out.primitives.is_empty());
        assert_eq!(out.dropped.halo, 1);
    }

    #[test]
    fn omit_keeps_interior_circle_unchanged() {
        let host = HostSymbol::rect(100.0, 100.0).unwrap();
        let c = circle(Point::new(50.0, 50.0), 2.0);
        let out = fit_pattern(vec![c.clone()], &host, &fit(FitMode::OmitIncomplete, 0.0), C, 1);
        assert_eq!(out.primitives, vec![c]);
    }

    #[test]
    fn modes_on_a_straddler() {
        let host = HostSymbol::rect(100.0, 100.0).unwrap();
        let s = circle(Point::new(99.0, 50.0), 2.0);
        let clip = fit_pattern(vec![s.clone()], &host, &fit(FitMode::Clip, 0.0), C, 1);
        assert_eq!(clip.primitives.len(), 1);
        let omit = fit_pattern(vec![s.clone()], &host, &fit(FitMode::OmitIncomplete, 0.0), C, 1);
        assert_eq!(omit.dropped.incomplete, 1);
        let over = fit_pattern(vec![s.clone(), circle(Point::new(200.0, 0.0), 1.0)], &host, &fit(FitMode::Overflow, 0.0), C, 1);
        assert_eq!(over.primitives.len(), 1);
        assert_eq!(over.dropped.clipped_out, 1);
        assert_eq!(over.pre_fit_count(), 2);
    }

    #[test]
    fn offset_then_stretch() {
        let host = HostSymbol::rect(100.0, 100.0).unwrap();
        let f = FitSpec {
            pattern_offset: Point::new(10.0, 0.0),
            stretch: Some(crate::spec::Affine2D::scale(2.0, 1.0)),
            mode: FitMode::Overflow,
            ..FitSpec::default()
        };
        let out = fit_pattern(vec![circle(Point::new(40.0, 50.0), 1.0)], &host, &f, C, 1);
        // (40 + 10 - 50) * 2 + 50
        assert_eq!(out.primitives[0].position, Point::new(50.0, 50.0));
        assert!(out.primitives[0].deform.is_none());
    }

    #[test]
    fn straight_path_stations() {
        let path = [Point::new(0.0, 0.0), Point::new(100.0, 0.0)];
        let pts = along_line_lattice(&path, 10.0, &FitSpec::default());
        assert_eq!(pts.len(), 11);
        for (k, (p, t)) in pts.iter().enumerate() {
            assert!((p.x - 10.0 * k as f64).abs() < 1e-9);
            assert_eq!(*t, 0.0);
        }
    }

    #[test]
    fn corner_station_bisects() {
        let path = [Point::new(0.0, 0.0), Point::new(50.0, 0.0), Point::new(50.0, 50.0)];
        let pts = along_line_lattice(&path, 10.0, &FitSpec::default());
        assert_eq!(pts.len(), 11);
        let (corner, tangent) = pts[5];
        assert!(corner.dist(Point::new(50.0, 0.0)) < 1e-9);
        assert!((tangent - 45.0).abs() < 1e-9);
        assert!((pts[7].0.dist(Point::new(50.0, 20.0))) < 1e-9);
        assert!((pts[7].1 - 90.0).abs() < 1e-9);
    }

    #[test]
    fn short_path_partial_interval() {
        let path = [Point::new(0.0, 0.0), Point::new(5.0, 0.0)];
        let omit = along_line_lattice(&path, 10.0, &fit(FitMode::OmitIncomplete, 0.0));
        assert_eq!(omit.len(), 1);
        assert_eq!(omit[0].0, Point::new(0.0, 0.0));
        let keep = along_line_lattice(&path, 10.0, &fit(FitMode::Clip, 0.0));
        assert_eq!(keep.len(), 2);
        assert_eq!(keep[1].0, Point::new(5.0, 0.0));
    }
}
