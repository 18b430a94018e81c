use serde_json::Value;

use super::*;
use crate::color::wrap_degrees;
use crate::error::{SpecError, SpecErrorKind};

const EQ_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    pub max_depth: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

pub fn parse_spec(bytes: &[u8]) -> Result<PatternSpec, SpecError> {
    parse_spec_with(bytes, &ParseOptions::default())
}

pub fn parse_spec_with(bytes: &[u8], opts: &ParseOptions) -> Result<PatternSpec, SpecError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SpecError {
        kind: SpecErrorKind::Syntax,
        path: String::new(),
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut de = serde_json::Deserializer::from_str(text);
    let mut spec: PatternSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let kind = match e.inner().classify() {
            serde_json::error::Category::Data => SpecErrorKind::Schema,
            _ => SpecErrorKind::Syntax,
        };
        let path = if kind == SpecErrorKind::Syntax {
            String::new()
        } else {
            pointer(e.path())
        };
        SpecError {
            kind,
            path,
            message: e.inner().to_string(),
        }
    })?;
    de.end().map_err(|e| SpecError {
        kind: SpecErrorKind::Syntax,
        path: String::new(),
        message: e.to_string(),
    })?;
    if spec.spec_version.is_none() {
        return Err(SpecError::schema("/spec_version", "missing field `spec_version`"));
    }
    normalize(&mut spec, "", 1, opts)?;
    Ok(spec)
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => {
                out.push('/');
                out.push_str(&index.to_string());
            }
            Segment::Map { key } => {
                out.push('/');
                out.push_str(&escape(key));
            }
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

/// Canonical text: sorted keys, no whitespace, shortest round-trip numbers.
pub fn to_canonical_json(spec: &PatternSpec) -> String {
    let value = serde_json::to_value(spec).expect("spec serializes");
    let mut out = String::new();
    write_canonical(&value, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

type Check = Result<(), SpecError>;

fn fail(path: impl Into<String>, msg: impl Into<String>) -> Check {
    Err(SpecError::invariant(path, msg))
}

fn positive(v: f64, path: String, what: &str) -> Check {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        fail(path, format!("{what} must be a finite number > 0, got {v}"))
    }
}

fn non_negative(v: f64, path: String, what: &str) -> Check {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        fail(path, format!("{what} must be a finite number >= 0, got {v}"))
    }
}

fn finite_point(p: Point, path: String) -> Check {
    if p.is_finite() {
        Ok(())
    } else {
        fail(path, "coordinates must be finite")
    }
}

/// Fills defaults in place and checks every invariant. `ptr` is the JSON
/// pointer of `spec`; `depth` is 1 at the document root.
pub(crate) fn normalize(spec: &mut PatternSpec, ptr: &str, depth: usize, opts: &ParseOptions) -> Check {
    if depth > opts.max_depth {
        return Err(SpecError {
            kind: SpecErrorKind::NestingDepthExceeded,
            path: ptr.to_string(),
            message: format!("nesting depth exceeded: depth {depth} > max {}", opts.max_depth),
        });
    }
    if let Some(v) = spec.spec_version {
        if v != SPEC_VERSION {
            return fail(format!("{ptr}/spec_version"), format!("unsupported spec_version {v}, expected 1"));
        }
    }
    let k = spec.groups.len();
    if k == 0 {
        return fail(format!("{ptr}/groups"), "at least one group is required");
    }

    check_arrangement(&mut spec.arrangement, &format!("{ptr}/arrangement"))?;
    check_grouping(&mut spec.grouping, k, &format!("{ptr}/grouping"))?;
    for (i, g) in spec.groups.iter_mut().enumerate() {
        check_group(g, &format!("{ptr}/groups/{i}"), depth, opts)?;
    }
    check_fit(&spec.fit, &format!("{ptr}/fit"))?;

    for (var, vg) in spec.variable_groupings.iter_mut() {
        let vptr = format!("{ptr}/variable_groupings/{}", var.name());
        if *var == StyleVariable::Shape {
            return fail(vptr, "shape cannot take an independent grouping; use group alternatives");
        }
        if vg.values.is_empty() {
            return fail(format!("{vptr}/values"), "at least one value is required");
        }
        check_grouping(&mut vg.grouping, vg.values.len(), &format!("{vptr}/grouping"))?;
        for (i, v) in vg.values.iter_mut().enumerate() {
            let p = format!("{vptr}/values/{i}");
            match var {
                StyleVariable::Size => positive(*v, p, "size value")?,
                StyleVariable::Saturation | StyleVariable::Lightness => {
                    if !(0.0..=1.0).contains(v) {
                        return fail(p, "value must lie in [0, 1]");
                    }
                }
                StyleVariable::Hue | StyleVariable::Orientation => {
                    if !v.is_finite() {
                        return fail(p, "angle must be finite");
                    }
                    *v = wrap_degrees(*v);
                }
                StyleVariable::Shape => unreachable!(),
            }
        }
    }
    Ok(())
}

fn check_affine(t: &Affine2D, ptr: &str) -> Check {
    positive(t.scale_x, format!("{ptr}/scale_x"), "scale_x")?;
    positive(t.scale_y, format!("{ptr}/scale_y"), "scale_y")?;
    if !t.rotation.is_finite() {
        return fail(format!("{ptr}/rotation"), "rotation must be finite");
    }
    if !t.shear.is_finite() {
        return fail(format!("{ptr}/shear"), "shear must be finite");
    }
    finite_point(t.translate, format!("{ptr}/translate"))?;
    if t.det().abs() < 1e-12 {
        return fail(ptr, format!("transform is degenerate: |det| = {:e}", t.det().abs()));
    }
    Ok(())
}

fn check_regularity(r: &RegularitySpec, ptr: &str) -> Check {
    non_negative(r.range, format!("{ptr}/range"), "range")?;
    if let Some(d) = r.dispersion {
        non_negative(d, format!("{ptr}/dispersion"), "dispersion")?;
        match r.distribution {
            Distribution::TruncatedNormal if d > r.range => {
                return fail(
                    format!("{ptr}/dispersion"),
                    format!("truncated-normal dispersion {d} exceeds range {}", r.range),
                );
            }
            Distribution::Uniform if (d - r.range / 3f64.sqrt()).abs() > EQ_TOL => {
                return fail(
                    format!("{ptr}/dispersion"),
                    "uniform dispersion is implied (range/√3); omit it or give that value",
                );
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_cell(cell: &mut UnitCell, ptr: &str) -> Check {
    positive(cell.a, format!("{ptr}/a"), "a")?;
    if let Some(b) = cell.b {
        positive(b, format!("{ptr}/b"), "b")?;
    }
    if let Some(t) = cell.theta {
        if !(t.is_finite() && t > 0.0 && t < 180.0) {
            return fail(format!("{ptr}/theta"), format!("theta must lie in (0°, 180°), got {t}"));
        }
    }
    let close = |x: f64, y: f64| (x - y).abs() <= EQ_TOL * y.abs().max(1.0);
    let bptr = format!("{ptr}/b");
    let tptr = format!("{ptr}/theta");
    match cell.shape {
        CellShape::Square => {
            if cell.b.is_some_and(|b| !close(b, cell.a)) {
                return fail(bptr, "square cells require b = a");
            }
            if cell.theta.is_some_and(|t| !close(t, 90.0)) {
                return fail(tptr, "square cells require theta = 90°");
            }
            cell.b = Some(cell.a);
            cell.theta = Some(90.0);
        }
        CellShape::Rectangular => {
            if cell.b.is_none() {
                return fail(bptr, "rectangular cells require b");
            }
            if cell.theta.is_some_and(|t| !close(t, 90.0)) {
                return fail(tptr, "rectangular cells require theta = 90°");
            }
            cell.theta = Some(90.0);
        }
        CellShape::Oblique => {
            if cell.b.is_none() {
                return fail(bptr, "oblique cells require b");
            }
            if cell.theta.is_none() {
                return fail(tptr, "oblique cells require theta");
            }
        }
        CellShape::Hexagonal => {
            if cell.b.is_some_and(|b| !close(b, cell.a)) {
                return fail(bptr, "hexagonal cells require b = a");
            }
            if cell.theta.is_some_and(|t| !close(t, 120.0)) {
                return fail(tptr, "hexagonal cells require theta = 120°");
            }
            cell.b = Some(cell.a);
            cell.theta = Some(120.0);
        }
        CellShape::Segment => {
            if cell.b.is_some() {
                return fail(bptr, "segment cells use only a");
            }
            if cell.theta.is_some() {
                return fail(tptr, "segment cells use only a");
            }
        }
    }
    Ok(())
}

fn check_arrangement(arr: &mut ArrangementSpec, ptr: &str) -> Check {
    match arr.kind {
        ArrangementKind::Lattice => {
            if arr.data.is_some() {
                return fail(format!("{ptr}/data"), "`data` is only valid for kind data-driven");
            }
            let Some(lat) = arr.lattice.as_mut() else {
                return fail(format!("{ptr}/lattice"), "kind lattice requires `lattice`");
            };
            let lptr = format!("{ptr}/lattice");
            check_cell(&mut lat.cell, &format!("{lptr}/cell"))?;
            let natural = if lat.cell.shape == CellShape::Segment { 1 } else { 2 };
            match lat.dimensionality {
                Some(d) if d != 1 && d != 2 => {
                    return fail(format!("{lptr}/dimensionality"), "dimensionality must be 1 or 2");
                }
                Some(d) if d != natural => {
                    return fail(
                        format!("{lptr}/dimensionality"),
                        "dimensionality 1 requires a segment cell and vice versa",
                    );
                }
                _ => lat.dimensionality = Some(natural),
            }
            check_affine(&lat.transform, &format!("{lptr}/transform"))?;
            if let Some(r) = &lat.positional_regularity {
                let rptr = format!("{lptr}/positional_regularity");
                check_regularity(r, &rptr)?;
                if r.axes == Axes::AlongLine && natural == 2 {
                    return fail(format!("{rptr}/axes"), "along-line jitter needs a 1D lattice");
                }
            }
        }
        ArrangementKind::DataDriven => {
            if arr.lattice.is_some() {
                return fail(format!("{ptr}/lattice"), "`lattice` is only valid for kind lattice");
            }
            let Some(data) = arr.data.as_ref() else {
                return fail(format!("{ptr}/data"), "kind data-driven requires `data`");
            };
            let dptr = format!("{ptr}/data");
            check_affine(&data.projection, &format!("{dptr}/projection"))?;
            match data.mode {
                PlacementMode::Displaced => match data.min_separation {
                    Some(s) => positive(s, format!("{dptr}/min_separation"), "min_separation")?,
                    None => return fail(format!("{dptr}/min_separation"), "displaced mode requires min_separation"),
                },
                PlacementMode::Gridded => match data.grid_cell {
                    Some(s) => positive(s, format!("{dptr}/grid_cell"), "grid_cell")?,
                    None => return fail(format!("{dptr}/grid_cell"), "gridded mode requires grid_cell"),
                },
                PlacementMode::Accurate => {}
            }
            for (i, r) in data.records.iter().enumerate() {
                if !(r.x.is_finite() && r.y.is_finite()) {
                    return fail(format!("{dptr}/records/{i}"), "record coordinates must be finite");
                }
            }
            for (name, ch) in &data.channel_map {
                if ch.variable == StyleVariable::Shape {
                    return fail(
                        format!("{dptr}/channel_map/{}", escape(name)),
                        "shape is not a data channel",
                    );
                }
                if let Some([lo, hi]) = ch.range {
                    if !(lo.is_finite() && hi.is_finite()) {
                        return fail(format!("{dptr}/channel_map/{}/range", escape(name)), "range must be finite");
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_grouping(g: &mut GroupingSpec, k: usize, ptr: &str) -> Check {
    match g.count {
        Some(c) if c != k => {
            return fail(format!("{ptr}/count"), format!("count {c} does not match {k} groups"));
        }
        _ => g.count = Some(k),
    }
    if g.ratios.is_empty() {
        g.ratios = vec![1.0; k];
    }
    if g.ratios.len() != k {
        return fail(
            format!("{ptr}/ratios"),
            format!("expected {k} ratios, got {}", g.ratios.len()),
        );
    }
    for (i, r) in g.ratios.iter().enumerate() {
        positive(*r, format!("{ptr}/ratios/{i}"), "ratio")?;
    }
    match (g.distribution_style, g.cluster_size) {
        (DistributionStyle::Clustered, None) => {
            return fail(format!("{ptr}/cluster_size"), "clustered style requires cluster_size");
        }
        (DistributionStyle::Clustered, Some(0)) => {
            return fail(format!("{ptr}/cluster_size"), "cluster_size must be >= 1");
        }
        (DistributionStyle::Clustered, Some(_)) | (_, None) => {}
        (_, Some(_)) => {
            return fail(format!("{ptr}/cluster_size"), "cluster_size is only valid for the clustered style");
        }
    }
    Ok(())
}

fn check_group(g: &mut GroupStyle, ptr: &str, depth: usize, opts: &ParseOptions) -> Check {
    positive(g.size.width, format!("{ptr}/size/0"), "width")?;
    positive(g.size.height, format!("{ptr}/size/1"), "height")?;
    if !g.orientation.is_finite() {
        return fail(format!("{ptr}/orientation"), "orientation must be finite");
    }
    g.orientation = wrap_degrees(g.orientation);

    for (var, r) in &g.regularity {
        let rptr = format!("{ptr}/regularity/{}", var.name());
        check_regularity(r, &rptr)?;
        if *var == StyleVariable::Shape {
            if r.range > 1.0 {
                return fail(format!("{rptr}/range"), "shape regularity range is a probability in [0, 1]");
            }
            if g.alternatives.is_empty() && r.range > 0.0 {
                return fail(format!("{ptr}/alternatives"), "shape regularity needs alternative shapes");
            }
        }
    }
    if let Some(i) = g.alternatives.iter().position(|s| *s == ShapeKind::Nested) {
        return fail(format!("{ptr}/alternatives/{i}"), "nested shapes cannot be alternatives");
    }

    let uses_glyph = g.shape == ShapeKind::GlyphPath || g.alternatives.contains(&ShapeKind::GlyphPath);
    match (&g.glyph, uses_glyph) {
        (None, true) => return fail(format!("{ptr}/glyph"), "glyph-path shapes require `glyph`"),
        (Some(_), false) => return fail(format!("{ptr}/glyph"), "`glyph` is only valid for glyph-path shapes"),
        (Some(pts), true) => {
            if pts.len() < 3 || pts.iter().any(|p| !p.is_finite()) {
                return fail(format!("{ptr}/glyph"), "glyph needs at least 3 finite points");
            }
        }
        (None, false) => {}
    }

    match (g.shape, g.nested_spec.as_deref_mut()) {
        (ShapeKind::Nested, None) => fail(format!("{ptr}/nested_spec"), "nested shapes require nested_spec"),
        (ShapeKind::Nested, Some(inner)) => {
            normalize(inner, &format!("{ptr}/nested_spec"), depth + 1, opts)
        }
        (_, Some(_)) => fail(format!("{ptr}/nested_spec"), "nested_spec is only valid for nested shapes"),
        (_, None) => Ok(()),
    }
}

fn check_fit(f: &FitSpec, ptr: &str) -> Check {
    non_negative(f.halo, format!("{ptr}/halo"), "halo")?;
    finite_point(f.pattern_offset, format!("{ptr}/pattern_offset"))?;
    if let Some(s) = &f.stretch {
        check_affine(s, &format!("{ptr}/stretch"))?;
    }
    Ok(())
}
