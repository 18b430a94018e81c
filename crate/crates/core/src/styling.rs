//! Retinal appearance of each primitive: group base style, independent
//! per-variable groupings, data channels, seeded regularity perturbation,
//! and nested-pattern expansion. Also the covariation report over the result.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::color::{wrap_degrees, Hsl};
use crate::error::{PatternError, Result};
use crate::geom::Point;
use crate::placement::PlacedRecord;
use crate::primitive::ResolvedPrimitive;
use crate::rng::{self, Purpose};
use crate::spec::{AttrValue, ChannelSpec, GroupStyle, ShapeKind, Size2, StyleVariable};

const MIN_EXTENT: f64 = 1e-6;

/// A position ready for styling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placed {
    pub position: Point,
    /// Stream key: cell indices for lattices, record or station index otherwise.
    pub key: (i64, i64),
    /// Path tangent in degrees for along-line placement.
    pub tangent: Option<f64>,
    /// Index into the placed data records.
    pub record: Option<usize>,
}

impl Placed {
    pub fn at(position: Point, key: (i64, i64)) -> Self {
        Placed {
            position,
            key,
            tangent: None,
            record: None,
        }
    }
}

#[derive(Clone, Copy)]
pub struct ChannelData<'a> {
    pub channels: &'a BTreeMap<String, ChannelSpec>,
    pub records: &'a [PlacedRecord],
}

/// How nested specs are expanded during styling.
#[derive(Clone, Copy, Debug)]
pub struct NestContext {
    /// Depth of the spec being styled (1 at the root).
    pub depth: usize,
    pub max_depth: usize,
}

#[derive(Clone, Default)]
pub struct StyleOptions<'a> {
    /// Per-variable labels and the values they select.
    pub variable_labels: BTreeMap<StyleVariable, (Vec<usize>, &'a [f64])>,
    pub channels: Option<ChannelData<'a>>,
    /// Length given to infinite lines so they cross the whole host.
    pub line_span: f64,
    pub nest: Option<NestContext>,
    pub parallel: bool,
}

/// Styles every primitive from its group with no extra channels.
pub fn resolve_styles(
    placed: &[Placed],
    labels: &[usize],
    groups: &[GroupStyle],
    seed: u64,
) -> Result<Vec<ResolvedPrimitive>> {
    resolve_styles_with(placed, labels, groups, seed, &StyleOptions::default())
}

pub fn resolve_styles_with(
    placed: &[Placed],
    labels: &[usize],
    groups: &[GroupStyle],
    seed: u64,
    opts: &StyleOptions<'_>,
) -> Result<Vec<ResolvedPrimitive>> {
    assert_eq!(placed.len(), labels.len(), "labels must align with positions");
    let scales = opts.channels.map(channel_scales).unwrap_or_default();
    let one = |idx: usize| resolve_one(idx, &placed[idx], labels[idx], groups, seed, opts, &scales);
    if opts.parallel {
        (0..placed.len()).into_par_iter().map(one).collect()
    } else {
        (0..placed.len()).map(one).collect()
    }
}

fn resolve_one(
    idx: usize,
    placed: &Placed,
    label: usize,
    groups: &[GroupStyle],
    seed: u64,
    opts: &StyleOptions<'_>,
    scales: &[(StyleVariable, String, ChannelScale)],
) -> Result<ResolvedPrimitive> {
    let style = &groups[label];
    let mut size = style.size;
    let mut orientation = style.orientation;
    let mut color = style.color;
    let mut shape = style.shape;

    for (var, (var_labels, values)) in &opts.variable_labels {
        let v = values[var_labels[idx]];
        apply_value(*var, v, &mut size, &mut orientation, &mut color, style.size);
    }

    if let (Some(data), Some(rec)) = (opts.channels, placed.record) {
        let attrs = &data.records[rec].attributes;
        for (var, name, scale) in scales {
            if let Some(v) = attrs.get(name).and_then(|a| scale.map(a)) {
                if *var == StyleVariable::Size {
                    size = Size2::new(size.width * v, size.height * v);
                } else {
                    apply_value(*var, v, &mut size, &mut orientation, &mut color, style.size);
                }
            }
        }
    }

    if let Some(t) = placed.tangent {
        orientation = wrap_degrees(orientation + t);
    }

    let (i, j) = placed.key;
    for (var, reg) in &style.regularity {
        if reg.range == 0.0 {
            continue;
        }
        let purpose = match var {
            StyleVariable::Size => Purpose::Size,
            StyleVariable::Orientation => Purpose::Orientation,
            StyleVariable::Hue => Purpose::Hue,
            StyleVariable::Saturation => Purpose::Saturation,
            StyleVariable::Lightness => Purpose::Lightness,
            StyleVariable::Shape => Purpose::Shape,
        };
        let mut r = rng::stream(seed, purpose, i, j);
        match var {
            StyleVariable::Size => {
                let d = rng::deviation(reg, &mut r);
                size = Size2::new((size.width + d).max(MIN_EXTENT), (size.height + d).max(MIN_EXTENT));
            }
            StyleVariable::Orientation => orientation = wrap_degrees(orientation + rng::deviation(reg, &mut r)),
            StyleVariable::Hue => color.h = wrap_degrees(color.h + rng::deviation(reg, &mut r)),
            StyleVariable::Saturation => color.s = (color.s + rng::deviation(reg, &mut r)).clamp(0.0, 1.0),
            StyleVariable::Lightness => color.l = (color.l + rng::deviation(reg, &mut r)).clamp(0.0, 1.0),
            StyleVariable::Shape => {
                if r.random_bool(reg.range.clamp(0.0, 1.0)) {
                    shape = style.alternatives[r.random_range(0..style.alternatives.len())];
                }
            }
        }
    }

    if shape == ShapeKind::InfiniteLine {
        size.width = opts.line_span.max(size.width);
    }

    let nested = match (shape, style.nested_spec.as_deref()) {
        (ShapeKind::Nested, Some(inner)) => {
            let ctx = opts.nest.unwrap_or(NestContext {
                depth: 1,
                max_depth: crate::spec::DEFAULT_MAX_DEPTH,
            });
            let depth = ctx.depth + 1;
            if depth > ctx.max_depth {
                return Err(PatternError::NestingDepthExceeded {
                    depth,
                    max: ctx.max_depth,
                });
            }
            let inner_seed = rng::mix(seed ^ inner.seed.rotate_left(29), Purpose::Nested, i, j);
            Some(Box::new(crate::pipeline::compile_nested(
                inner,
                size,
                depth,
                ctx.max_depth,
                inner_seed,
                opts.parallel,
            )?))
        }
        _ => None,
    };

    Ok(ResolvedPrimitive {
        position: placed.position,
        group: label,
        shape,
        glyph: style.glyph.clone(),
        size,
        orientation,
        color,
        deform: None,
        nested,
    })
}

fn apply_value(
    var: StyleVariable,
    v: f64,
    size: &mut Size2,
    orientation: &mut f64,
    color: &mut Hsl,
    base: Size2,
) {
    match var {
        StyleVariable::Size => *size = Size2::new(v, v * base.height / base.width),
        StyleVariable::Orientation => *orientation = wrap_degrees(v),
        StyleVariable::Hue => color.h = wrap_degrees(v),
        StyleVariable::Saturation => color.s = v.clamp(0.0, 1.0),
        StyleVariable::Lightness => color.l = v.clamp(0.0, 1.0),
        StyleVariable::Shape => {}
    }
}

/// Attribute-to-range mapping fitted on the placed records.
#[derive(Clone, Debug)]
enum ChannelScale {
    Numeric { lo: f64, hi: f64, out: [f64; 2] },
    Categorical { categories: Vec<String>, out: [f64; 2] },
}

impl ChannelScale {
    fn map(&self, a: &AttrValue) -> Option<f64> {
        let lerp = |t: f64, out: [f64; 2]| out[0] + t * (out[1] - out[0]);
        match (self, a) {
            (ChannelScale::Numeric { lo, hi, out }, AttrValue::Number(x)) => {
                let t = if hi > lo { (x - lo) / (hi - lo) } else { 0.5 };
                Some(lerp(t, *out))
            }
            (ChannelScale::Categorical { categories, out }, AttrValue::Text(s)) => {
                let i = categories.iter().position(|c| c == s)?;
                let t = if categories.len() > 1 {
                    i as f64 / (categories.len() - 1) as f64
                } else {
                    0.5
                };
                Some(lerp(t, *out))
            }
            _ => None,
        }
    }
}

fn channel_scales(data: ChannelData<'_>) -> Vec<(StyleVariable, String, ChannelScale)> {
    data.channels
        .iter()
        .map(|(name, ch)| {
            let values: Vec<&AttrValue> = data.records.iter().filter_map(|r| r.attributes.get(name)).collect();
            let nums: Vec<f64> = values.iter().filter_map(|v| v.as_f64()).collect();
            let out = ch.effective_range();
            let scale = if !nums.is_empty() || values.is_empty() {
                ChannelScale::Numeric {
                    lo: nums.iter().copied().fold(f64::INFINITY, f64::min),
                    hi: nums.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    out,
                }
            } else {
                let mut categories: Vec<String> = values
                    .iter()
                    .filter_map(|v| match v {
                        AttrValue::Text(s) => Some(s.clone()),
                        AttrValue::Number(_) => None,
                    })
                    .collect();
                categories.sort();
                categories.dedup();
                ChannelScale::Categorical { categories, out }
            };
            (ch.variable, name.clone(), scale)
        })
        .collect()
}

// ---- covariation ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Numeric,
    Categorical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovariationReport {
    pub variables: Vec<&'static str>,
    pub kinds: Vec<VariableKind>,
    pub constant: Vec<bool>,
    /// Pearson r between numeric variables, Cramér's V when either is categorical.
    pub matrix: Vec<Vec<f64>>,
}

impl CovariationReport {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.variables.iter().position(|v| *v == a)?;
        let j = self.variables.iter().position(|v| *v == b)?;
        Some(self.matrix[i][j])
    }

    pub fn all_constant(&self) -> bool {
        self.constant.iter().all(|c| *c)
    }
}

const MAX_CATEGORIES: usize = 16;
const QUANTILE_BINS: usize = 8;

pub fn covariation_report(resolved: &[ResolvedPrimitive]) -> CovariationReport {
    let cols: Vec<(&'static str, VariableKind, Vec<f64>)> = vec![
        ("group", VariableKind::Categorical, resolved.iter().map(|p| p.group as f64).collect()),
        ("shape", VariableKind::Categorical, resolved.iter().map(|p| p.shape as u8 as f64).collect()),
        ("hue", VariableKind::Categorical, resolved.iter().map(|p| p.color.h).collect()),
        ("size", VariableKind::Numeric, resolved.iter().map(|p| p.size.width * p.size.height).collect()),
        ("orientation", VariableKind::Numeric, resolved.iter().map(|p| p.orientation).collect()),
        ("saturation", VariableKind::Numeric, resolved.iter().map(|p| p.color.s).collect()),
        ("lightness", VariableKind::Numeric, resolved.iter().map(|p| p.color.l).collect()),
    ];
    let m = cols.len();
    let constant: Vec<bool> = cols
        .iter()
        .map(|(_, _, v)| v.windows(2).all(|w| w[0] == w[1]))
        .collect();
    let mut matrix = vec![vec![0.0; m]; m];
    for a in 0..m {
        matrix[a][a] = 1.0;
        for b in (a + 1)..m {
            let value = if constant[a] || constant[b] {
                0.0
            } else if cols[a].1 == VariableKind::Numeric && cols[b].1 == VariableKind::Numeric {
                pearson(&cols[a].2, &cols[b].2)
            } else {
                cramers_v(&categorize(&cols[a].2), &categorize(&cols[b].2))
            };
            matrix[a][b] = value;
            matrix[b][a] = value;
        }
    }
    CovariationReport {
        variables: cols.iter().map(|c| c.0).collect(),
        kinds: cols.iter().map(|c| c.1).collect(),
        constant,
        matrix,
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Category codes: distinct values when few, otherwise quantile bins.
fn categorize(v: &[f64]) -> Vec<usize> {
    let mut distinct: Vec<f64> = v.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= MAX_CATEGORIES {
        return v
            .iter()
            .map(|x| distinct.binary_search_by(|d| d.total_cmp(x)).expect("present"))
            .collect();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cuts: Vec<f64> = (1..QUANTILE_BINS)
        .map(|q| sorted[q * sorted.len() / QUANTILE_BINS])
        .collect();
    v.iter().map(|x| cuts.iter().filter(|c| x >= c).count()).collect()
}

pub fn cramers_v(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let r = a.iter().max().map_or(0, |m| m + 1);
    let c = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0.0; c]; r];
    for (x, y) in a.iter().zip(b) {
        table[*x][*y] += 1.0;
    }
    let rows: Vec<f64> = table.iter().map(|row| row.iter().sum()).collect();
    let colsum: Vec<f64> = (0..c).map(|j| table.iter().map(|row| row[j]).sum()).collect();
    let rr = rows.iter().filter(|s| **s > 0.0).count();
    let cc = colsum.iter().filter(|s| **s > 0.0).count();
    let k = rr.min(cc);
    if k < 2 {
        return 0.0;
    }
    let mut chi2 = 0.0;
    for i in 0..r {
        for j in 0..c {
            let e = rows[i] * colsum[j] / n;
            if e > 0.0 {
                chi2 += (table[i][j] - e).powi(2) / e;
            }
        }
    }
    (chi2 / (n * (k - 1) as f64)).sqrt().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::RegularitySpec;

    fn grid_placed(n: usize) -> Vec<Placed> {
        (0..n)
            .map(|k| Placed::at(Point::new(k as f64, 0.0), (k as i64, 0)))
            .collect()
    }

    #[test]
    fn identical_mapping_without_regularity() {
        let g = GroupStyle::circle(4.0).with_color(Hsl::new(200.0, 0.5, 0.4));
        let out = resolve_styles(&grid_placed(20), &[0; 20], std::slice::from_ref(&g), 3).unwrap();
        for p in &out {
            assert_eq!(p.size, g.size);
            assert_eq!(p.color, g.color);
            assert_eq!(p.orientation, 0.0);
        }
        assert!(covariation_report(&out).all_constant());
    }

    #[test]
    fn orientation_regularity_bounded() {
        let mut g = GroupStyle::new(ShapeKind::LineSegment, 6.0, 1.0).with_orientation(30.0);
        g.regularity.insert(StyleVariable::Orientation, RegularitySpec::uniform(45.0));
        let out = resolve_styles(&grid_placed(500), &[0; 500], &[g], 8).unwrap();
        for p in &out {
            let d = (p.orientation - 30.0 + 180.0).rem_euclid(360.0) - 180.0;
            assert!(d.abs() <= 45.0 + 1e-9);
        }
        assert!(out.iter().any(|p| p.orientation != 30.0));
    }

    #[test]
    fn hue_wraps_and_lightness_clamps() {
        let mut g = GroupStyle::circle(2.0).with_color(Hsl::new(355.0, 0.5, 0.95));
        g.regularity.insert(StyleVariable::Hue, RegularitySpec::uniform(20.0));
        g.regularity.insert(StyleVariable::Lightness, RegularitySpec::uniform(0.2));
        let out = resolve_styles(&grid_placed(300), &[0; 300], &[g], 1).unwrap();
        assert!(out.iter().all(|p| (0.0..360.0).contains(&p.color.h)));
        assert!(out.iter().all(|p| p.color.l <= 1.0 && p.color.l >= 0.75));
        assert!(out.iter().any(|p| p.color.h < 20.0));
    }

    #[test]
    fn size_regularity_keeps_positive_extent() {
        let mut g = GroupStyle::circle(1.0);
        g.regularity.insert(StyleVariable::Size, RegularitySpec::uniform(3.0));
        let out = resolve_styles(&grid_placed(200), &[0; 200], &[g], 1).unwrap();
        assert!(out.iter().all(|p| p.size.width >= MIN_EXTENT && p.size.width <= 4.0));
    }

    #[test]
    fn shape_regularity_picks_alternatives() {
        let mut g = GroupStyle::new(ShapeKind::Square, 2.0, 2.0);
        g.alternatives = vec![ShapeKind::Circle];
        g.regularity.insert(StyleVariable::Shape, RegularitySpec::uniform(0.5));
        let out = resolve_styles(&grid_placed(400), &[0; 400], &[g], 1).unwrap();
        let circles = out.iter().filter(|p| p.shape == ShapeKind::Circle).count();
        assert!(circles > 150 && circles < 250, "{circles}");
    }

    #[test]
    fn shared_grouping_covaries() {
        let groups = [
            GroupStyle::circle(2.0).with_color(Hsl::new(240.0, 1.0, 0.5)),
            GroupStyle::circle(6.0).with_color(Hsl::new(60.0, 1.0, 0.5)),
        ];
        let labels: Vec<usize> = (0..100).map(|k| k % 2).collect();
        let out = resolve_styles(&grid_placed(100), &labels, &groups, 0).unwrap();
        let rep = covariation_report(&out);
        assert!((rep.get("hue", "size").unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.get("group", "hue").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rep.get("size", "size"), Some(1.0));
        assert_eq!(rep.get("hue", "orientation"), Some(0.0));
    }

    #[test]
    fn locality_between_groups() {
        let placed = grid_placed(50);
        let labels: Vec<usize> = (0..50).map(|k| k % 2).collect();
        let mut a = GroupStyle::circle(2.0);
        a.regularity.insert(StyleVariable::Size, RegularitySpec::uniform(0.5));
        let b = GroupStyle::new(ShapeKind::Square, 3.0, 3.0);
        let before = resolve_styles(&placed, &labels, &[a.clone(), b.clone()], 4).unwrap();
        let mut b2 = b.clone();
        b2.color = Hsl::new(120.0, 1.0, 0.5);
        b2.regularity.insert(StyleVariable::Orientation, RegularitySpec::uniform(10.0));
        let after = resolve_styles(&placed, &labels, &[a, b2], 4).unwrap();
        for (x, y) in before.iter().zip(&after) {
            if x.group == 0 {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut g = GroupStyle::circle(2.0);
        g.regularity.insert(StyleVariable::Size, RegularitySpec::uniform(0.5));
        g.regularity.insert(StyleVariable::Hue, RegularitySpec::uniform(30.0));
        let placed = grid_placed(1000);
        let labels = vec![0; 1000];
        let seq = resolve_styles(&placed, &labels, &[g.clone()], 9).unwrap();
        let par = resolve_styles_with(
            &placed,
            &labels,
            &[g],
            9,
            &StyleOptions {
                parallel: true,
                ..StyleOptions::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn cramers_v_extremes() {
        let a: Vec<usize> = (0..100).map(|k| k % 2).collect();
        assert!((cramers_v(&a, &a) - 1.0).abs() < 1e-12);
        let b: Vec<usize> = (0..100).map(|k| (k / 2) % 2).collect();
        assert!(cramers_v(&a, &b).abs() < 1e-12);
    }
}
