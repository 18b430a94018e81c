//! Scanline coverage rasterizer over a host. Samples sit at row centers with
//! a per-row horizontal phase from the golden ratio, which keeps regular
//! lattices from aliasing against the sample grid.

use crate::color::Hsl;
use crate::fitting::ResolvedPattern;
use crate::geom::{self, BBox, Mat, Point};
use crate::primitive::ResolvedPrimitive;
use crate::spec::{FitMode, ShapeKind};

const PHI: f64 = 0.618_033_988_749_894_9;
const MAX_SAMPLES: f64 = 64.0e6;
const BASE_PIXELS: f64 = 256.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterOptions {
    /// Samples per pixel along each axis: 1, 2, 4 or 8.
    pub supersample: u32,
    /// Pixels per host unit; by default the long side spans 256 pixels (at least 1 per unit).
    pub pixels_per_unit: Option<f64>,
}

impl Default for RasterOptions {
    fn default() -> Self {
        RasterOptions {
            supersample: 4,
            pixels_per_unit: None,
        }
    }
}

/// Top-most primitive per sample, in painter order.
#[derive(Clone, Debug)]
pub struct Coverage {
    pub cols: usize,
    pub rows: usize,
    pub origin: Point,
    /// Host units between samples.
    pub step: f64,
    /// 0 for none, else index + 1 into `colors`.
    pub top: Vec<u32>,
    pub colors: Vec<Hsl>,
    /// Per row, host interior spans as half-open column ranges.
    pub host_spans: Vec<Vec<(usize, usize)>>,
}

impl Coverage {
    pub fn host_samples(&self) -> usize {
        self.host_spans.iter().flatten().map(|(a, b)| b - a).sum()
    }

    /// Calls `f` with the top index of every sample inside the host.
    pub fn for_each_host_sample(&self, mut f: impl FnMut(u32)) {
        for (r, spans) in self.host_spans.iter().enumerate() {
            let row = &self.top[r * self.cols..(r + 1) * self.cols];
            for &(a, b) in spans {
                row[a..b].iter().for_each(|t| f(*t));
            }
        }
    }
}

/// A world-space fill and the clip regions (indices into the clip list) it lies within.
struct Fill {
    shape: FillShape,
    clips: Vec<usize>,
    color: usize,
}

enum FillShape {
    Circle { center: Point, radius: f64 },
    Polygon(Vec<Point>),
}

impl FillShape {
    fn bbox(&self) -> BBox {
        match self {
            FillShape::Circle { center, radius } => BBox::new(*center, *center).expand(*radius),
            FillShape::Polygon(p) => BBox::from_points(p).unwrap_or(BBox::new(Point::ORIGIN, Point::ORIGIN)),
        }
    }

    fn spans(&self, y: f64) -> Vec<(f64, f64)> {
        match self {
            FillShape::Circle { center, radius } => {
                let dy = y - center.y;
                if dy.abs() >= *radius {
                    Vec::new()
                } else {
                    let h = (radius * radius - dy * dy).sqrt();
                    vec![(center.x - h, center.x + h)]
                }
            }
            FillShape::Polygon(p) => polygon_spans(p, y),
        }
    }
}

/// Even-odd interior intervals of `poly` on the horizontal line at `y`.
pub fn polygon_spans(poly: &[Point], y: f64) -> Vec<(f64, f64)> {
    let mut xs = Vec::new();
    for (a, b) in geom::edges(poly) {
        if (a.y <= y) != (b.y <= y) {
            xs.push(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo < hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Flattens primitives (and nested patterns) in drawing order: groups in
/// index order, primitives in order within a group.
fn collect(
    pattern: &ResolvedPattern,
    frame: Mat,
    clip: &[usize],
    clips: &mut Vec<Vec<Point>>,
    colors: &mut Vec<Hsl>,
    out: &mut Vec<Fill>,
) {
    for g in 0..pattern.group_count {
        for p in pattern.primitives.iter().filter(|p| p.group == g) {
            match &p.nested {
                Some(inner) => {
                    let local = frame.then_after(&p.frame());
                    let mut inner_clip = clip.to_vec();
                    if inner.mode != FitMode::Overflow {
                        clips.push(inner.host.outline().into_iter().map(|q| local.apply(q)).collect());
                        inner_clip.push(clips.len() - 1);
                    }
                    collect(inner, local, &inner_clip, clips, colors, out);
                }
                None => {
                    colors.push(p.color);
                    out.push(Fill {
                        shape: fill_shape(p, &frame),
                        clips: clip.to_vec(),
                        color: colors.len() - 1,
                    });
                }
            }
        }
    }
}

fn fill_shape(p: &ResolvedPrimitive, frame: &Mat) -> FillShape {
    let round = p.shape == ShapeKind::Circle && p.size.width == p.size.height && p.deform.is_none();
    let lin = frame.linear();
    let conformal = (lin.a - lin.d).abs() < 1e-12 && (lin.b + lin.c).abs() < 1e-12;
    if round && conformal {
        let scale = lin.det().abs().sqrt();
        return FillShape::Circle {
            center: frame.apply(p.position),
            radius: 0.5 * p.size.width * scale,
        };
    }
    FillShape::Polygon(p.polygon(false).into_iter().map(|q| frame.apply(q)).collect())
}

pub fn rasterize(pattern: &ResolvedPattern, opts: &RasterOptions) -> Coverage {
    let host_outline = pattern.host.outline();
    let hb = pattern.host.bbox();
    let long = hb.width().max(hb.height());
    let ppu = opts.pixels_per_unit.unwrap_or((BASE_PIXELS / long).max(1.0));
    let mut per_unit = ppu * opts.supersample.max(1) as f64;
    let total = hb.width() * hb.height() * per_unit * per_unit;
    if total > MAX_SAMPLES {
        per_unit *= (MAX_SAMPLES / total).sqrt();
    }
    let step = 1.0 / per_unit;
    let cols = (hb.width() / step).ceil().max(1.0) as usize;
    let rows = (hb.height() / step).ceil().max(1.0) as usize;
    let origin = hb.min;
    let row_y = |r: usize| origin.y + (r as f64 + 0.5) * step;
    let phase = |r: usize| (r as f64 * PHI).fract();
    // columns c with lo <= x_c < hi
    let to_cols = |r: usize, lo: f64, hi: f64| -> (usize, usize) {
        let ph = phase(r);
        let a = ((lo - origin.x) / step - ph).ceil().max(0.0);
        let b = ((hi - origin.x) / step - ph).ceil().max(0.0);
        ((a as usize).min(cols), (b as usize).min(cols))
    };

    let host_spans: Vec<Vec<(usize, usize)>> = (0..rows)
        .map(|r| {
            polygon_spans(&host_outline, row_y(r))
                .into_iter()
                .map(|(lo, hi)| to_cols(r, lo, hi))
                .filter(|(a, b)| a < b)
                .collect()
        })
        .collect();

    let mut clips = Vec::new();
    let mut colors = Vec::new();
    let mut fills = Vec::new();
    collect(pattern, Mat::IDENTITY, &[], &mut clips, &mut colors, &mut fills);

    let mut top = vec![0u32; cols * rows];
    for f in &fills {
        let bb = f.shape.bbox();
        let r0 = ((bb.min.y - origin.y) / step - 0.5).ceil().max(0.0) as usize;
        let r1 = (((bb.max.y - origin.y) / step - 0.5).floor() + 1.0).clamp(0.0, rows as f64) as usize;
        for r in r0..r1 {
            let y = row_y(r);
            let mut spans = f.shape.spans(y);
            for c in &f.clips {
                spans = intersect(&spans, &polygon_spans(&clips[*c], y));
            }
            let row = &mut top[r * cols..(r + 1) * cols];
            for (lo, hi) in spans {
                let (a, b) = to_cols(r, lo, hi);
                if a < b {
                    row[a..b].fill(f.color as u32 + 1);
                }
            }
        }
    }

    Coverage {
        cols,
        rows,
        origin,
        step,
        top,
        colors,
        host_spans,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_of_square() {
        let sq = [Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(4.0, 4.0), Point::new(0.0, 4.0)];
        assert_eq!(polygon_spans(&sq, 2.0), vec![(0.0, 4.0)]);
        assert!(polygon_spans(&sq, 5.0).is_empty());
    }

    #[test]
    fn span_intersection() {
        let a = [(0.0, 5.0), (7.0, 9.0)];
        let b = [(3.0, 8.0)];
        assert_eq!(intersect(&a, &b), vec![(3.0, 5.0), (7.0, 8.0)]);
    }
}
