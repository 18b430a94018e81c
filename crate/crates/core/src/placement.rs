//! Final primitive positions: seeded positional jitter of lattice points, or
//! direct placement from data records.

use std::collections::BTreeMap;
use std::io::Read;

use rand::Rng;

use crate::error::{PatternError, Result};
use crate::geom::Point;
use crate::host::HostSymbol;
use crate::lattice::LatticePoints;
use crate::rng::{self, Purpose};
use crate::spec::{AttrValue, Axes, DataPlacementSpec, DataRecord, PlacementMode, RegularitySpec};

const RELAX_ITERATIONS: usize = 100;
const RELAX_OVERSHOOT: f64 = 1.02;

/// Jitters each lattice point independently. The stream for a point is keyed
/// by its cell indices, so a point moves the same way whatever region is generated.
pub fn apply_jitter(points: &LatticePoints, reg: &RegularitySpec, seed: u64) -> Result<Vec<Point>> {
    let dim = points.dimensionality();
    if reg.axes == Axes::AlongLine && dim == 2 {
        return Err(PatternError::AxisMismatch {
            axes: reg.axes.name(),
            dimensionality: dim,
        });
    }
    if reg.range == 0.0 {
        return Ok(points.points.iter().map(|p| p.position).collect());
    }
    let unit = |p: Point| p * (1.0 / p.norm());
    let u = unit(points.u);
    let v = match points.v {
        Some(v) => unit(v),
        None => Point::new(-u.y, u.x),
    };
    let (first, second) = match reg.axes {
        Axes::Both => (Point::new(1.0, 0.0), Some(Point::new(0.0, 1.0))),
        Axes::UOnly | Axes::AlongLine => (u, None),
        Axes::VOnly => (v, None),
    };
    Ok(points
        .points
        .iter()
        .map(|p| jitter_one(p.position, (p.i, p.j), first, second, reg, seed))
        .collect())
}

/// Jitter for points carrying their own direction (e.g. along a path).
/// `along-line` and `u-only` move along the direction, `v-only` across it.
pub fn jitter_directed(
    points: &[(Point, f64)],
    reg: &RegularitySpec,
    seed: u64,
) -> Vec<Point> {
    points
        .iter()
        .enumerate()
        .map(|(k, &(p, angle))| {
            if reg.range == 0.0 {
                return p;
            }
            let t = Point::from_polar(1.0, angle);
            let n = Point::new(-t.y, t.x);
            let (first, second) = match reg.axes {
                Axes::Both => (Point::new(1.0, 0.0), Some(Point::new(0.0, 1.0))),
                Axes::UOnly | Axes::AlongLine => (t, None),
                Axes::VOnly => (n, None),
            };
            jitter_one(p, (k as i64, 0), first, second, reg, seed)
        })
        .collect()
}

fn jitter_one(
    p: Point,
    key: (i64, i64),
    first: Point,
    second: Option<Point>,
    reg: &RegularitySpec,
    seed: u64,
) -> Point {
    let mut r = rng::stream(seed, Purpose::Position, key.0, key.1);
    let mut out = p + first * rng::deviation(reg, &mut r);
    if let Some(s) = second {
        out = out + s * rng::deviation(reg, &mut r);
    }
    out
}

/// A placed data primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct PlacedRecord {
    pub position: Point,
    /// Index of the (first) source record.
    pub record: usize,
    /// Number of records merged into this primitive (gridded mode), else 1.
    pub count: usize,
    pub attributes: BTreeMap<String, AttrValue>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataPlacement {
    pub items: Vec<PlacedRecord>,
    /// Records whose projection fell outside the host bounds.
    pub dropped_outside: usize,
    /// Displaced mode: every pair ended at least `min_separation` apart.
    pub converged: bool,
    /// Displaced mode: pairs still closer than `min_separation`.
    pub residual_violations: usize,
    pub iterations: usize,
}

pub fn place_from_data(spec: &DataPlacementSpec, host: &HostSymbol, seed: u64) -> Result<DataPlacement> {
    let proj = spec.projection_matrix();
    let det = proj.det();
    if det.abs() < 1e-12 || !det.is_finite() {
        return Err(PatternError::ProjectionDegenerate { det });
    }
    let bounds = host.bbox().expand(1e-9);
    let mut dropped_outside = 0;
    let mut items = Vec::with_capacity(spec.records.len());
    for (idx, rec) in spec.records.iter().enumerate() {
        let position = proj.apply(Point::new(rec.x, rec.y));
        if !bounds.contains(position) {
            dropped_outside += 1;
            continue;
        }
        let mut attributes = rec.attributes.clone();
        attributes.insert("count".into(), AttrValue::Number(1.0));
        items.push(PlacedRecord {
            position,
            record: idx,
            count: 1,
            attributes,
        });
    }

    let mut out = DataPlacement {
        items,
        dropped_outside,
        converged: true,
        residual_violations: 0,
        iterations: 0,
    };
    match spec.mode {
        PlacementMode::Accurate => {}
        PlacementMode::Displaced => {
            let sep = spec.min_separation.unwrap_or(0.0);
            let mut pos: Vec<Point> = out.items.iter().map(|r| r.position).collect();
            out.iterations = relax(&mut pos, sep, seed);
            out.residual_violations = count_violations(&pos, sep);
            out.converged = out.residual_violations == 0;
            for (item, p) in out.items.iter_mut().zip(pos) {
                item.position = p;
            }
        }
        PlacementMode::Gridded => {
            let cell = spec.grid_cell.unwrap_or(1.0);
            out.items = aggregate_grid(out.items, host.anchor(), cell);
        }
    }
    Ok(out)
}

/// Pairwise repulsion: each violating pair is pushed apart symmetrically
/// until no pair is closer than `sep` or the iteration cap is hit.
fn relax(pos: &mut [Point], sep: f64, seed: u64) -> usize {
    let n = pos.len();
    for iter in 0..RELAX_ITERATIONS {
        let mut delta = vec![Point::ORIGIN; n];
        let mut moved = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = pos[j] - pos[i];
                let dist = d.norm();
                if dist >= sep {
                    continue;
                }
                moved = true;
                let dir = if dist > 1e-12 {
                    d * (1.0 / dist)
                } else {
                    let mut r = rng::stream(seed, Purpose::Displace, i as i64, j as i64);
                    Point::from_polar(1.0, r.random_range(0.0..360.0))
                };
                let push = dir * (0.5 * (sep - dist) * RELAX_OVERSHOOT);
                delta[i] = delta[i] - push;
                delta[j] = delta[j] + push;
            }
        }
        if !moved {
            return iter;
        }
        for (p, d) in pos.iter_mut().zip(delta) {
            *p = *p + d;
        }
    }
    RELAX_ITERATIONS
}

/// Brute-force count of pairs closer than `sep`.
pub fn count_violations(pos: &[Point], sep: f64) -> usize {
    let mut bad = 0;
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            if pos[i].dist(pos[j]) < sep {
                bad += 1;
            }
        }
    }
    bad
}

/// Snaps to grid-cell centers; records sharing a cell merge (numeric
/// attributes averaged, first text value kept, `count` summed).
fn aggregate_grid(items: Vec<PlacedRecord>, origin: Point, cell: f64) -> Vec<PlacedRecord> {
    let mut order: Vec<(i64, i64)> = Vec::new();
    let mut cells: BTreeMap<(i64, i64), Vec<PlacedRecord>> = BTreeMap::new();
    for item in items {
        let rel = item.position - origin;
        let key = ((rel.x / cell).floor() as i64, (rel.y / cell).floor() as i64);
        let bucket = cells.entry(key).or_default();
        if bucket.is_empty() {
            order.push(key);
        }
        bucket.push(item);
    }
    order
        .into_iter()
        .map(|key| {
            let members = cells.remove(&key).expect("bucket exists");
            let center = origin + Point::new((key.0 as f64 + 0.5) * cell, (key.1 as f64 + 0.5) * cell);
            let count = members.len();
            let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
            let mut attributes: BTreeMap<String, AttrValue> = BTreeMap::new();
            for m in &members {
                for (k, v) in &m.attributes {
                    match v {
                        AttrValue::Number(x) => {
                            let e = sums.entry(k.clone()).or_insert((0.0, 0));
                            e.0 += x;
                            e.1 += 1;
                        }
                        AttrValue::Text(_) => {
                            attributes.entry(k.clone()).or_insert_with(|| v.clone());
                        }
                    }
                }
            }
            for (k, (sum, n)) in sums {
                attributes.insert(k, AttrValue::Number(sum / n as f64));
            }
            attributes.insert("count".into(), AttrValue::Number(count as f64));
            PlacedRecord {
                position: center,
                record: members[0].record,
                count,
                attributes,
            }
        })
        .collect()
}

fn parse_attr(raw: &str) -> AttrValue {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => AttrValue::Number(v),
        _ => AttrValue::Text(raw.to_string()),
    }
}

/// Reads records from CSV with a header row. `x_col`/`y_col` name the
/// coordinate columns; every other column becomes an attribute.
pub fn load_records_csv<R: Read>(reader: R, x_col: &str, y_col: &str) -> Result<Vec<DataRecord>> {
    let err = |m: String| PatternError::Records(m);
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| err(format!("missing column `{name}`")))
    };
    let (xi, yi) = (find(x_col)?, find(y_col)?);
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| err(e.to_string()))?;
        let coord = |i: usize| {
            row.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("row {}: bad coordinate in column {}", line + 1, &headers[i])))
        };
        let (x, y) = (coord(xi)?, coord(yi)?);
        let attributes = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != xi && *i != yi)
            .filter_map(|(i, h)| row.get(i).map(|v| (h.trim().to_string(), parse_attr(v))))
            .collect();
        out.push(DataRecord { x, y, attributes });
    }
    Ok(out)
}

/// Reads records from a JSON array of flat objects (`x`, `y`, attributes...).
pub fn load_records_json(text: &str, x_key: &str, y_key: &str) -> Result<Vec<DataRecord>> {
    let err = |m: String| PatternError::Records(m);
    let rows: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    rows.into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            let mut coord = |k: &str| {
                row.remove(k)
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| err(format!("record {i}: missing numeric `{k}`")))
            };
            let (x, y) = (coord(x_key)?, coord(y_key)?);
            let attributes = row
                .into_iter()
                .filter_map(|(k, v)| match v {
                    serde_json::Value::Number(n) => n.as_f64().map(|f| (k, AttrValue::Number(f))),
                    serde_json::Value::String(s) => Some((k, AttrValue::Text(s))),
                    _ => None,
                })
                .collect();
            Ok(DataRecord { x, y, attributes })
        })
        .collect()
}
