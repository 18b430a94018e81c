//! Spec + host to resolved pattern: placement, grouping, styling, fit.

use std::collections::BTreeMap;

use crate::error::{PatternError, Result};
use crate::fitting::{fit_matrix, fit_pattern, along_line_lattice, Composition, DataSummary, ResolvedPattern};
use crate::geom::{BBox, Point};
use crate::grouping::assign_groups;
use crate::host::{HostGeometry, HostKind, HostSymbol};
use crate::lattice::{generate_lattice_in, LatticeFrame};
use crate::placement::{apply_jitter, jitter_directed, place_from_data, PlacedRecord};
use crate::rng::{self, Purpose};
use crate::spec::{
    ArrangementKind, GroupStyle, PatternSpec, ShapeKind, Size2, StyleVariable,
    DEFAULT_MAX_DEPTH,
};
use crate::styling::{resolve_styles_with, ChannelData, NestContext, Placed, StyleOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub max_depth: usize,
    pub parallel: bool,
    pub seed_override: Option<u64>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            max_depth: DEFAULT_MAX_DEPTH,
            parallel: false,
            seed_override: None,
        }
    }
}

/// Compiles a normalized spec against a host.
pub fn compile(spec: &PatternSpec, host: &HostSymbol, opts: &CompileOptions) -> Result<ResolvedPattern> {
    let seed = opts.seed_override.unwrap_or(spec.seed);
    compile_at(spec, host, 1, opts.max_depth, seed, opts.parallel)
}

/// Compiles the inner spec of a nested primitive of `size` in its local frame.
pub fn compile_nested(
    spec: &PatternSpec,
    size: Size2,
    depth: usize,
    max_depth: usize,
    seed: u64,
    parallel: bool,
) -> Result<ResolvedPattern> {
    let (hw, hh) = (0.5 * size.width, 0.5 * size.height);
    let host = HostSymbol::new(
        "nested",
        HostGeometry::Area {
            polygon: vec![
                Point::new(-hw, -hh),
                Point::new(hw, -hh),
                Point::new(hw, hh),
                Point::new(-hw, hh),
            ],
        },
    )?;
    compile_at(spec, &host, depth, max_depth, seed, parallel)
}

fn compile_at(
    spec: &PatternSpec,
    host: &HostSymbol,
    depth: usize,
    max_depth: usize,
    seed: u64,
    parallel: bool,
) -> Result<ResolvedPattern> {
    if depth > max_depth {
        return Err(PatternError::NestingDepthExceeded { depth, max: max_depth });
    }
    let limit = host.min_half_extent();
    if spec.fit.halo >= limit {
        return Err(PatternError::HaloTooLarge {
            halo: spec.fit.halo,
            limit,
        });
    }

    let follows_path = host.kind() == HostKind::Line && spec.lattice().is_some_and(|l| l.dim() == 1);
    let mut dropped_early = 0;
    let mut data_summary = None;
    let mut records: Vec<PlacedRecord> = Vec::new();
    let placed: Vec<Placed> = match spec.arrangement.kind {
        ArrangementKind::Lattice => {
            let lat = spec.lattice().ok_or_else(|| PatternError::InvalidHost("lattice arrangement without lattice".into()))?;
            let reach = max_reach(spec);
            let m = fit_matrix(&spec.fit, host);
            let hb = host.bbox();
            let stations = match (&host.geometry, lat.dim()) {
                (HostGeometry::Line { path, .. }, 1) => Some(path),
                _ => None,
            };
            if let Some(path) = stations {
                let spacing = lat.transform.linear().apply_linear(Point::new(lat.cell.a, 0.0)).norm();
                let stations = along_line_lattice(path, spacing, &spec.fit);
                let positions = match &lat.positional_regularity {
                    Some(reg) => jitter_directed(&stations, reg, seed),
                    None => stations.iter().map(|s| s.0).collect(),
                };
                positions
                    .into_iter()
                    .zip(&stations)
                    .enumerate()
                    .map(|(k, (p, s))| Placed {
                        position: p,
                        key: (k as i64, 0),
                        tangent: Some(s.1),
                        record: None,
                    })
                    .collect()
            } else {
                let inv = m.inverse().ok_or(PatternError::DegenerateTransform { det: m.det() })?;
                let pre: Vec<Point> = hb.corners().iter().map(|c| inv.apply(*c)).collect();
                let region = BBox::from_points(&pre).expect("four corners");
                let frame = LatticeFrame {
                    anchor: hb.min,
                    center: hb.center(),
                };
                let points = generate_lattice_in(&lat.cell, &lat.transform, region, frame)?;
                let positions = match &lat.positional_regularity {
                    Some(reg) => apply_jitter(&points, reg, seed)?,
                    None => points.points.iter().map(|p| p.position).collect(),
                };
                let mut out = Vec::with_capacity(positions.len());
                for (p, lp) in positions.into_iter().zip(&points.points) {
                    if bbox_dist(&hb, m.apply(p)) > reach {
                        dropped_early += 1;
                        continue;
                    }
                    out.push(Placed::at(p, (lp.i, lp.j)));
                }
                out
            }
        }
        ArrangementKind::DataDriven => {
            let data = spec
                .arrangement
                .data
                .as_ref()
                .ok_or_else(|| PatternError::Records("data-driven arrangement without data".into()))?;
            let placement = place_from_data(data, host, seed)?;
            data_summary = Some(DataSummary {
                records: data.records.len(),
                dropped_outside: placement.dropped_outside,
                converged: placement.converged,
                residual_violations: placement.residual_violations,
                iterations: placement.iterations,
            });
            records = placement.items;
            records
                .iter()
                .enumerate()
                .map(|(k, r)| Placed {
                    position: r.position,
                    key: (r.record as i64, 0),
                    tangent: None,
                    record: Some(k),
                })
                .collect()
        }
    };

    let n = placed.len();
    let assignment = assign_groups(n, &spec.grouping, seed);
    let variable_labels: BTreeMap<StyleVariable, (Vec<usize>, &[f64])> = spec
        .variable_groupings
        .iter()
        .map(|(var, vg)| {
            let s = rng::mix(seed, Purpose::VariableGrouping, *var as i64, 0);
            (*var, (assign_groups(n, &vg.grouping, s).labels, vg.values.as_slice()))
        })
        .collect();
    let hb = host.bbox();
    let channels = spec.arrangement.data.as_ref().map(|d| ChannelData {
        channels: &d.channel_map,
        records: &records,
    });
    let opts = StyleOptions {
        variable_labels,
        channels,
        line_span: 2.0 * hb.min.dist(hb.max) * stretch_gain(spec),
        nest: Some(NestContext { depth, max_depth }),
        parallel,
    };
    let styled = resolve_styles_with(&placed, &assignment.labels, &spec.groups, seed, &opts)?;

    let composition = Composition {
        primitive: spec.groups.iter().map(|g| g.shape.dimensionality()).max().unwrap_or(2),
        lattice: match spec.arrangement.kind {
            ArrangementKind::Lattice => spec.lattice().map_or(2, |l| l.dim()),
            ArrangementKind::DataDriven => 0,
        },
        host: if follows_path { 1 } else { 2 },
    };
    let mut out = fit_pattern(styled, host, &spec.fit, composition, spec.k());
    out.assigned = assignment.achieved_counts;
    out.dropped.clipped_out += dropped_early;
    out.data = data_summary;
    Ok(out)
}

fn bbox_dist(b: &BBox, p: Point) -> f64 {
    let dx = (b.min.x - p.x).max(p.x - b.max.x).max(0.0);
    let dy = (b.min.y - p.y).max(p.y - b.max.y).max(0.0);
    dx.hypot(dy)
}

/// Largest singular value of the geometry stretch, or 1.
fn stretch_gain(spec: &PatternSpec) -> f64 {
    match (&spec.fit.stretch, spec.fit.stretch_geometry) {
        (Some(s), true) => {
            let m = s.linear();
            let (a, b, c, d) = (m.a, m.b, m.c, m.d);
            let t = a * a + b * b + c * c + d * d;
            let det = a * d - b * c;
            (0.5 * (t + (t * t - 4.0 * det * det).max(0.0).sqrt())).sqrt().max(1.0)
        }
        _ => 1.0,
    }
}

/// Upper bound on how far any primitive's outline can reach from its position.
fn max_reach(spec: &PatternSpec) -> f64 {
    let mut widths: Vec<f64> = Vec::new();
    if let Some(vg) = spec.variable_groupings.get(&StyleVariable::Size) {
        widths.extend(vg.values.iter().copied());
    }
    let mut reach: f64 = 0.0;
    for g in &spec.groups {
        if g.shape == ShapeKind::InfiniteLine || g.alternatives.contains(&ShapeKind::InfiniteLine) {
            return f64::INFINITY;
        }
        let aspect = g.size.height / g.size.width;
        let mut sizes = vec![g.size];
        sizes.extend(widths.iter().map(|w| Size2::new(*w, w * aspect)));
        let grow = g
            .regularity
            .get(&StyleVariable::Size)
            .map_or(0.0, |r| r.range);
        for s in sizes {
            reach = reach.max(shape_reach(g, Size2::new(s.width + grow, s.height + grow)));
        }
    }
    reach * stretch_gain(spec) + 1e-9
}

fn shape_reach(g: &GroupStyle, s: Size2) -> f64 {
    // half-diagonal of the bounding square covers every non-glyph shape and alternative
    let side = s.width.max(s.height);
    let glyph = g
        .glyph
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max);
    side * (std::f64::consts::FRAC_1_SQRT_2).max(glyph * std::f64::consts::SQRT_2)
}
