//! Figure gallery: a manifest of fixture specs, each with a machine-checkable
//! property, rendered and checked in one pass.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fitting::ResolvedPattern;
use crate::grouping::{same_label_adjacency, target_counts};
use crate::host::HostSymbol;
use crate::metrics::{measure, MetricsOptions, PatternMetrics};
use crate::pipeline::{compile, CompileOptions};
use crate::render::{render_svg, RenderOptions};
use crate::spec::{parse_spec_with, ParseOptions, PatternSpec};
use crate::styling::covariation_report;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryManifest {
    pub entries: Vec<GalleryEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryEntry {
    pub name: String,
    pub figure: String,
    /// Default host for specs that do not name their own.
    pub host: HostRef,
    pub specs: Vec<SpecRef>,
    pub property: Property,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HostRef {
    Shorthand(String),
    Symbol(HostSymbol),
}

impl HostRef {
    pub fn resolve(&self) -> Result<HostSymbol, String> {
        match self {
            HostRef::Symbol(h) => Ok(h.clone()),
            HostRef::Shorthand(s) => match HostSymbol::parse_shorthand(s) {
                Some(Ok(h)) => Ok(h),
                Some(Err(e)) => Err(e.to_string()),
                None => Err(format!("unknown host shorthand `{s}`")),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecRef {
    Path(String),
    WithHost { spec: String, host: HostRef },
}

impl SpecRef {
    pub fn path(&self) -> &str {
        match self {
            SpecRef::Path(p) | SpecRef::WithHost { spec: p, .. } => p,
        }
    }
}

/// Checks applied to the compiled specs of an entry, in manifest order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Property {
    /// Every spec compiles and renders with at least this many primitives.
    Renders { min_primitives: usize },
    /// Every ink ratio lies in `[min, max]`.
    InkRange { min: f64, max: f64 },
    /// Neighbouring specs have ink ratios within `tolerance`.
    InkEqual { tolerance: f64 },
    /// Ink ratio strictly increases from spec to spec.
    InkIncreasing,
    /// Per-group counts before fitting equal the largest-remainder targets.
    RatioExact,
    /// Same per-group counts, same-label lattice adjacency strictly decreasing.
    AdjacencyOrder,
    /// Surviving primitive counts never increase from spec to spec.
    CountNonIncreasing,
    Composition { expected: Vec<String> },
    /// Depth of the resolved pattern tree, counting the root as 1.
    NestingDepth { depth: usize },
    /// Absolute association between two style variables.
    Covariation {
        a: String,
        b: String,
        #[serde(default)]
        min: Option<f64>,
        #[serde(default)]
        max: Option<f64>,
    },
    /// Regional shade hue lies on the shorter arc between `from` and `to`.
    ShadeHueBetween { from: f64, to: f64 },
    SolidFill { expected: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenderedSpec {
    pub spec: String,
    pub file: String,
    #[serde(skip)]
    pub svg: String,
    pub metrics: PatternMetrics,
    pub primitives: usize,
    pub group_counts: Vec<usize>,
    pub composition: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryResult {
    pub name: String,
    pub figure: String,
    pub passed: bool,
    pub detail: String,
    pub outputs: Vec<RenderedSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GalleryReport {
    pub entries: Vec<EntryResult>,
}

impl GalleryReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

const MANIFEST: &str = include_str!("../../../gallery/manifest.json");

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../../gallery/", $name)))),*]
    };
}

static BUNDLED: &[(&str, &str)] = bundled![
    "specs/fig6_grid.json",
    "specs/grain_s05.json",
    "specs/grain_s1.json",
    "specs/grain_s2.json",
    "specs/grain_s4.json",
    "specs/ratio_1_1.json",
    "specs/ratio_1_2.json",
    "specs/ratio_1_3.json",
    "specs/groups_2.json",
    "specs/groups_3.json",
    "specs/groups_4.json",
    "specs/dist_grouped.json",
    "specs/dist_clustered.json",
    "specs/dist_interspersed.json",
    "specs/dist_dispersed.json",
    "specs/orient_none.json",
    "specs/orient_lattice.json",
    "specs/orient_primitive.json",
    "specs/orient_both.json",
    "specs/comp_222.json",
    "specs/comp_112.json",
    "specs/comp_211.json",
    "specs/comp_111.json",
    "specs/cov_covarying.json",
    "specs/cov_independent.json",
    "specs/nest_lattice_lattice.json",
    "specs/nest_lattice_data.json",
    "specs/nest_data_lattice.json",
    "specs/nest_data_data.json",
    "specs/data_accurate.json",
    "specs/data_displaced.json",
    "specs/data_gridded.json",
    "specs/shade_blue_yellow.json",
    "specs/halo_0.json",
    "specs/halo_2.json",
    "specs/halo_5.json",
    "specs/halo_10.json",
    "specs/solid_fill.json",
    "specs/size_2.json",
    "specs/size_4.json",
    "specs/size_6.json",
];

/// The manifest compiled into the library.
pub fn bundled_manifest() -> GalleryManifest {
    serde_json::from_str(MANIFEST).expect("bundled manifest parses")
}

/// Contents of a bundled spec file by manifest path.
pub fn bundled_spec(path: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(p, _)| *p == path).map(|(_, s)| *s)
}

pub fn run_bundled(opts: &CompileOptions) -> GalleryReport {
    run_gallery(&bundled_manifest(), &|p| bundled_spec(p).map(|s| s.as_bytes().to_vec()).ok_or_else(|| format!("no bundled spec `{p}`")), opts)
}

/// Runs every entry in parallel; report order follows the manifest.
pub fn run_gallery(
    manifest: &GalleryManifest,
    load: &(dyn Fn(&str) -> Result<Vec<u8>, String> + Sync),
    opts: &CompileOptions,
) -> GalleryReport {
    GalleryReport {
        entries: manifest.entries.par_iter().map(|e| run_entry(e, load, opts)).collect(),
    }
}

fn run_entry(
    entry: &GalleryEntry,
    load: &(dyn Fn(&str) -> Result<Vec<u8>, String> + Sync),
    opts: &CompileOptions,
) -> EntryResult {
    let mut result = EntryResult {
        name: entry.name.clone(),
        figure: entry.figure.clone(),
        passed: false,
        detail: String::new(),
        outputs: Vec::new(),
    };
    let mut compiled: Vec<(PatternSpec, ResolvedPattern, PatternMetrics)> = Vec::new();
    for (k, sref) in entry.specs.iter().enumerate() {
        let step = || -> Result<(PatternSpec, ResolvedPattern, PatternMetrics, String), String> {
            let bytes = load(sref.path())?;
            let spec = parse_spec_with(&bytes, &ParseOptions { max_depth: opts.max_depth }).map_err(|e| e.to_json())?;
            let host = match sref {
                SpecRef::Path(_) => entry.host.resolve()?,
                SpecRef::WithHost { host, .. } => host.resolve()?,
            };
            let pattern = compile(&spec, &host, opts).map_err(|e| e.to_string())?;
            let metrics = measure(&pattern, &MetricsOptions::default());
            let svg = render_svg(&pattern, &RenderOptions::default()).text;
            Ok((spec, pattern, metrics, svg))
        };
        match step() {
            Ok((spec, pattern, metrics, svg)) => {
                result.outputs.push(RenderedSpec {
                    spec: sref.path().to_string(),
                    file: format!("{}-{}.svg", entry.name, k),
                    svg,
                    metrics,
                    primitives: pattern.primitives.len(),
                    group_counts: pattern.group_counts(),
                    composition: pattern.composition.to_string(),
                });
                compiled.push((spec, pattern, metrics));
            }
            Err(e) => {
                result.detail = format!("{}: {e}", sref.path());
                return result;
            }
        }
    }
    match check(&entry.property, &compiled) {
        Ok(detail) => {
            result.passed = true;
            result.detail = detail;
        }
        Err(detail) => result.detail = detail,
    }
    result
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn check(prop: &Property, items: &[(PatternSpec, ResolvedPattern, PatternMetrics)]) -> Result<String, String> {
    let inks: Vec<f64> = items.iter().map(|i| i.2.ink_ratio).collect();
    let verdict = |ok: bool, msg: String| if ok { Ok(msg) } else { Err(msg) };
    match prop {
        Property::Renders { min_primitives } => {
            let counts: Vec<usize> = items.iter().map(|i| i.1.primitives.len()).collect();
            verdict(counts.iter().all(|c| c >= min_primitives), format!("primitives {counts:?} (min {min_primitives})"))
        }
        Property::InkRange { min, max } => verdict(
            inks.iter().all(|i| (min..=max).contains(&i)),
            format!("ink [{}] in [{min}, {max}]", fmt_list(&inks)),
        ),
        Property::InkEqual { tolerance } => {
            let worst = inks.windows(2).map(|w| (w[0] - w[1]).abs()).fold(0.0, f64::max);
            verdict(worst <= *tolerance, format!("ink [{}], max neighbour gap {worst:.5} (tol {tolerance})", fmt_list(&inks)))
        }
        Property::InkIncreasing => verdict(inks.windows(2).all(|w| w[1] > w[0]), format!("ink [{}]", fmt_list(&inks))),
        Property::RatioExact => {
            for (spec, pattern, _) in items {
                let n: usize = pattern.assigned.iter().sum();
                let want = target_counts(n, &spec.grouping.normalized_ratios());
                if pattern.assigned != want {
                    return Err(format!("assigned {:?} != targets {want:?}", pattern.assigned));
                }
            }
            Ok(format!(
                "assigned {:?}",
                items.iter().map(|i| i.1.assigned.clone()).collect::<Vec<_>>()
            ))
        }
        Property::AdjacencyOrder => {
            let first = &items[0].1.group_counts();
            if items.iter().any(|i| &i.1.group_counts() != first) {
                return Err("group counts differ between specs".into());
            }
            let adj: Vec<f64> = items.iter().map(|i| lattice_adjacency(&i.1)).collect();
            verdict(
                adj.windows(2).all(|w| w[0] > w[1]),
                format!("same-label adjacency [{}], counts {first:?}", fmt_list(&adj)),
            )
        }
        Property::CountNonIncreasing => {
            let counts: Vec<usize> = items.iter().map(|i| i.1.primitives.len()).collect();
            let conserved = items.iter().all(|i| i.1.pre_fit_count() == items[0].1.pre_fit_count());
            verdict(
                counts.windows(2).all(|w| w[1] <= w[0]) && conserved,
                format!("surviving {counts:?}, pre-fit {}", items[0].1.pre_fit_count()),
            )
        }
        Property::Composition { expected } => {
            let got: Vec<String> = items.iter().map(|i| i.1.composition.to_string()).collect();
            verdict(&got == expected, format!("compositions {got:?}"))
        }
        Property::NestingDepth { depth } => {
            let got: Vec<usize> = items.iter().map(|i| i.1.nesting_depth() + 1).collect();
            verdict(got.iter().all(|d| d == depth), format!("depths {got:?}"))
        }
        Property::Covariation { a, b, min, max } => {
            let vals: Vec<f64> = items
                .iter()
                .map(|i| covariation_report(&i.1.primitives).get(a, b).map_or(f64::NAN, f64::abs))
                .collect();
            let ok = vals
                .iter()
                .all(|v| v.is_finite() && min.is_none_or(|m| *v >= m) && max.is_none_or(|m| *v <= m));
            verdict(ok, format!("|assoc({a}, {b})| = [{}]", fmt_list(&vals)))
        }
        Property::ShadeHueBetween { from, to } => {
            let hues: Vec<f64> = items.iter().map(|i| i.2.regional_shade.h).collect();
            let ok = items.iter().all(|i| {
                let s = i.2.regional_shade;
                s.s > 0.0 && on_short_arc(s.h, *from, *to)
            });
            verdict(ok, format!("shade hues [{}] between {from} and {to}", fmt_list(&hues)))
        }
        Property::SolidFill { expected } => {
            let flags: Vec<bool> = items.iter().map(|i| i.2.solid_fill).collect();
            verdict(flags.iter().all(|f| f == expected), format!("solid fill {flags:?}, ink [{}]", fmt_list(&inks)))
        }
    }
}

/// True when `h` lies strictly inside the shorter arc from `a` to `b`.
pub fn on_short_arc(h: f64, a: f64, b: f64) -> bool {
    let span = (b - a).rem_euclid(360.0);
    let (start, len) = if span <= 180.0 { (a, span) } else { (b, 360.0 - span) };
    let off = (h - start).rem_euclid(360.0);
    off > 0.0 && off < len
}

/// Fraction of nearest-neighbour pairs sharing a group label. Neighbours are
/// primitives at the smallest spacing present (within 1%).
pub fn lattice_adjacency(p: &ResolvedPattern) -> f64 {
    let pos: Vec<_> = p.primitives.iter().map(|q| q.position).collect();
    let mut min = f64::INFINITY;
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            min = min.min(pos[i].dist(pos[j]));
        }
    }
    let mut pairs = Vec::new();
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            if pos[i].dist(pos[j]) <= min * 1.01 {
                pairs.push((i, j));
            }
        }
    }
    let labels: Vec<usize> = p.primitives.iter().map(|q| q.group).collect();
    same_label_adjacency(&labels, &pairs)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Static HTML overview linking every rendered SVG.
pub fn index_html(report: &GalleryReport) -> String {
    let passed = report.entries.iter().filter(|e| e.passed).count();
    let mut out = String::new();
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>pattern-forge gallery</title>\n\
         <style>body{{font-family:sans-serif;margin:2em}}section{{margin-bottom:2em}}img{{width:180px;height:180px;border:1px solid #ccc;margin-right:8px;object-fit:contain}}\
         .pass{{color:#1a7f37}}.fail{{color:#cf222e}}code{{font-size:90%}}</style>\n</head>\n<body>\n\
         <h1>pattern-forge gallery</h1>\n<p>{passed} of {} entries pass.</p>\n",
        report.entries.len()
    );
    for e in &report.entries {
        let (cls, word) = if e.passed { ("pass", "PASS") } else { ("fail", "FAIL") };
        let _ = writeln!(
            out,
            "<section>\n<h2>{} <span class=\"{cls}\">{word}</span></h2>\n<p>{}</p>\n<p><code>{}</code></p>\n<div>",
            escape(&e.name),
            escape(&e.figure),
            escape(&e.detail)
        );
        for o in &e.outputs {
            let _ = writeln!(
                out,
                "<figure style=\"display:inline-block\"><img src=\"{}\" alt=\"{}\"><figcaption>ink {:.4}</figcaption></figure>",
                escape(&o.file),
                escape(&o.spec),
                o.metrics.ink_ratio
            );
        }
        out.push_str("</div>\n</section>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcs() {
        assert!(on_short_arc(120.0, 55.0, 210.0));
        assert!(!on_short_arc(300.0, 55.0, 210.0));
        assert!(on_short_arc(10.0, 350.0, 30.0));
        assert!(!on_short_arc(180.0, 350.0, 30.0));
    }

    #[test]
    fn bundled_gallery_passes() {
        let report = run_bundled(&CompileOptions::default());
        for e in &report.entries {
            assert!(e.passed, "{}: {}", e.name, e.detail);
        }
        assert!(index_html(&report).contains("entries pass"));
    }

    #[test]
    fn every_manifest_spec_is_bundled() {
        for e in bundled_manifest().entries {
            for s in &e.specs {
                assert!(bundled_spec(s.path()).is_some(), "{}", s.path());
            }
        }
    }
}
