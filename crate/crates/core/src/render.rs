//! SVG output for a resolved pattern on its host.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::color::Hsl;
use crate::fitting::ResolvedPattern;
use crate::geom::{Mat, Point};
use crate::primitive::ResolvedPrimitive;
use crate::spec::{FitMode, ShapeKind};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    /// Extra space around the host bounding box.
    pub padding: f64,
    /// Fill of the host symbol.
    pub background: Hsl,
    /// Decimal places for coordinates.
    pub precision: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            padding: 0.0,
            background: Hsl::WHITE,
            precision: 3,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RenderStats {
    /// Element counts by SVG element name.
    pub elements: BTreeMap<String, usize>,
    pub primitives: usize,
    pub nested_patterns: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgDocument {
    pub text: String,
    pub stats: RenderStats,
}

impl SvgDocument {
    pub fn as_bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }
}

struct Writer {
    out: String,
    precision: usize,
    stats: RenderStats,
}

impl Writer {
    fn num(&self, v: f64) -> String {
        let mut s = format!("{:.*}", self.precision, v);
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        if s == "-0" {
            s = "0".into();
        }
        s
    }

    fn pt(&self, p: Point) -> String {
        format!("{} {}", self.num(p.x), self.num(p.y))
    }

    fn path_d(&self, poly: &[Point]) -> String {
        let mut d = String::new();
        for (k, p) in poly.iter().enumerate() {
            d.push(if k == 0 { 'M' } else { 'L' });
            d.push_str(&self.pt(*p));
        }
        d.push('Z');
        d
    }

    fn count(&mut self, element: &str) {
        *self.stats.elements.entry(element.to_string()).or_default() += 1;
    }

    fn color(c: Hsl) -> String {
        // fixed precision keeps the output byte-stable
        let f = |v: f64| {
            let s = format!("{v:.2}");
            let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
            if s == "-0" {
                "0".to_string()
            } else {
                s
            }
        };
        format!("hsl({}, {}%, {}%)", f(c.h), f(c.s * 100.0), f(c.l * 100.0))
    }

    fn rotate_attr(&self, deg: f64, at: Point) -> String {
        if deg == 0.0 {
            String::new()
        } else {
            format!(" transform=\"rotate({} {})\"", self.num(deg), self.pt(at))
        }
    }

    fn pattern(&mut self, p: &ResolvedPattern, clip_id: &str) {
        let clip_attr = if p.mode == FitMode::Clip {
            let d = self.path_d(&p.host.outline());
            let _ = write!(self.out, "<clipPath id=\"{clip_id}\"><path d=\"{d}\"/></clipPath>");
            self.count("clipPath");
            format!(" clip-path=\"url(#{clip_id})\"")
        } else {
            String::new()
        };
        for g in 0..p.group_count {
            let _ = write!(self.out, "<g class=\"group\" data-group=\"{g}\"{clip_attr}>");
            self.count("g");
            for (idx, prim) in p.primitives.iter().enumerate().filter(|(_, q)| q.group == g) {
                self.primitive(prim, &format!("{clip_id}-{idx}"));
            }
            self.out.push_str("</g>");
        }
    }

    fn primitive(&mut self, q: &ResolvedPrimitive, id: &str) {
        self.stats.primitives += 1;
        let fill = Self::color(q.color);
        if let Some(inner) = &q.nested {
            self.stats.nested_patterns += 1;
            let transform = match &q.deform {
                Some(_) => {
                    let m = q.frame();
                    format!(
                        "matrix({} {} {} {} {} {})",
                        self.num(m.a),
                        self.num(m.b),
                        self.num(m.c),
                        self.num(m.d),
                        self.num(m.e),
                        self.num(m.f)
                    )
                }
                None if q.orientation == 0.0 => format!("translate({})", self.pt(q.position)),
                None => format!("translate({}) rotate({})", self.pt(q.position), self.num(q.orientation)),
            };
            let _ = write!(self.out, "<g class=\"nested\" transform=\"{transform}\">");
            self.count("g");
            self.pattern(inner, id);
            self.out.push_str("</g>");
            return;
        }
        let (w, h) = (q.size.width, q.size.height);
        let c = q.position;
        if q.deform.is_some() || q.shape == ShapeKind::GlyphPath {
            let d = self.path_d(&q.polygon(false));
            let _ = write!(self.out, "<path d=\"{d}\" fill=\"{fill}\"/>");
            self.count("path");
            return;
        }
        match q.shape {
            ShapeKind::Circle if w == h => {
                let _ = write!(
                    self.out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
                    self.num(c.x),
                    self.num(c.y),
                    self.num(0.5 * w)
                );
                self.count("circle");
            }
            ShapeKind::Circle => {
                let rot = self.rotate_attr(q.orientation, c);
                let _ = write!(
                    self.out,
                    "<ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" fill=\"{fill}\"{rot}/>",
                    self.num(c.x),
                    self.num(c.y),
                    self.num(0.5 * w),
                    self.num(0.5 * h)
                );
                self.count("ellipse");
            }
            ShapeKind::Square | ShapeKind::Rectangle => {
                let h = if q.shape == ShapeKind::Square { w } else { h };
                let rot = self.rotate_attr(q.orientation, c);
                let _ = write!(
                    self.out,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"{rot}/>",
                    self.num(c.x - 0.5 * w),
                    self.num(c.y - 0.5 * h),
                    self.num(w),
                    self.num(h)
                );
                self.count("rect");
            }
            ShapeKind::LineSegment | ShapeKind::InfiniteLine => {
                let half = Mat::rotate(q.orientation).apply(Point::new(0.5 * w, 0.0));
                let (a, b) = (c - half, c + half);
                let _ = write!(
                    self.out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{fill}\" stroke-width=\"{}\"/>",
                    self.num(a.x),
                    self.num(a.y),
                    self.num(b.x),
                    self.num(b.y),
                    self.num(h)
                );
                self.count("line");
            }
            ShapeKind::GlyphPath | ShapeKind::Nested => unreachable!("handled above"),
        }
    }
}

pub fn render_svg(pattern: &ResolvedPattern, opts: &RenderOptions) -> SvgDocument {
    let mut w = Writer {
        out: String::new(),
        precision: opts.precision,
        stats: RenderStats::default(),
    };
    let vb = pattern.host.bbox().expand(opts.padding);
    let _ = write!(
        w.out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">",
        w.num(vb.min.x),
        w.num(vb.min.y),
        w.num(vb.width()),
        w.num(vb.height()),
        w.num(vb.width()),
        w.num(vb.height())
    );
    let d = w.path_d(&pattern.host.outline());
    let _ = write!(
        w.out,
        "<path class=\"host\" d=\"{d}\" fill=\"{}\"/>",
        Writer::color(opts.background)
    );
    w.count("path");
    w.pattern(pattern, "pf-clip");
    w.out.push_str("</svg>\n");
    SvgDocument {
        text: w.out,
        stats: w.stats,
    }
}
