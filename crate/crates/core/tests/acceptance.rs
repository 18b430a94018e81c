//! One line per acceptance criterion; exits non-zero if any fails.

use std::time::{Duration, Instant};

use pattern_forge::gallery::{bundled_manifest, bundled_spec, run_bundled, SpecRef};
use pattern_forge::geom::{self, BBox, Point};
use pattern_forge::grouping::{assign_groups, target_counts};
use pattern_forge::lattice::generate_lattice;
use pattern_forge::metrics::ink_ratio;
use pattern_forge::placement::apply_jitter;
use pattern_forge::spec::{
    parse_spec, parse_spec_with, Affine2D, DistributionStyle, FitMode, GroupingSpec, ParseOptions, RegularitySpec,
    UnitCell,
};
use pattern_forge::{compile, render_svg, CompileOptions, HostSymbol, PatternError, PatternSpec, RenderOptions, SpecErrorKind};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn spec(text: &str) -> PatternSpec {
    parse_spec(text.as_bytes()).unwrap()
}

fn grid(a: f64, group: &str, fit: &str) -> PatternSpec {
    spec(&format!(
        r#"{{"spec_version":1,"arrangement":{{"kind":"lattice","lattice":{{"cell":{{"shape":"square","a":{a}}}}}}},
        "groups":[{group}],"fit":{fit}}}"#
    ))
}

fn rect(w: f64, h: f64) -> HostSymbol {
    HostSymbol::rect(w, h).unwrap()
}

fn granularity() -> Outcome {
    let mut inks = Vec::new();
    for s in [0.5, 1.0, 2.0] {
        let t = Instant::now();
        let p = compile(
            &grid(10.0 * s, &format!(r#"{{"shape":"circle","size":{}}}"#, 4.0 * s), "{}"),
            &rect(400.0, 400.0),
            &CompileOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let ink = ink_ratio(&p, 4);
        let dt = t.elapsed();
        if dt > Duration::from_secs(1) {
            return Err(format!("s={s} took {dt:?}"));
        }
        inks.push(ink);
    }
    let spread = inks.iter().cloned().fold(f64::MIN, f64::max) - inks.iter().cloned().fold(f64::MAX, f64::min);
    if spread < 0.005 {
        Ok(format!("ink {inks:.4?}, spread {spread:.5}"))
    } else {
        Err(format!("ink {inks:.4?}, spread {spread:.5}"))
    }
}

fn orientation() -> Outcome {
    let host = rect(400.0, 400.0);
    let mut inks = Vec::new();
    for (lat, prim) in [(0.0, 0.0), (30.0, 0.0), (0.0, 45.0), (30.0, 45.0)] {
        let s = spec(&format!(
            r#"{{"spec_version":1,"arrangement":{{"kind":"lattice","lattice":{{"cell":{{"shape":"square","a":10}},"transform":{{"rotation":{lat}}}}}}},
            "groups":[{{"shape":"square","size":4,"orientation":{prim}}}]}}"#
        ));
        inks.push(ink_ratio(&compile(&s, &host, &CompileOptions::default()).map_err(|e| e.to_string())?, 4));
    }
    let spread = inks.iter().cloned().fold(f64::MIN, f64::max) - inks.iter().cloned().fold(f64::MAX, f64::min);
    let msg = format!("none/lattice/primitive/both {inks:.4?}");
    if spread < 0.005 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn analytic() -> Outcome {
    let p = compile(&grid(10.0, r#"{"shape":"circle","size":4}"#, "{}"), &rect(100.0, 100.0), &CompileOptions::default())
        .map_err(|e| e.to_string())?;
    let ink = ink_ratio(&p, 8);
    let expect = std::f64::consts::PI * 4.0 / 100.0;
    let msg = format!("ink {ink:.5} vs {expect:.5}");
    if (ink - expect).abs() <= 0.002 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ratios() -> Outcome {
    let styles = [
        DistributionStyle::Grouped,
        DistributionStyle::Interspersed,
        DistributionStyle::Dispersed,
        DistributionStyle::Clustered,
    ];
    let mut cases = 0;
    for n in [10usize, 100, 1000] {
        for r in [vec![1.0, 1.0], vec![1.0, 3.0], vec![2.0, 3.0, 5.0]] {
            for st in styles {
                let mut g = GroupingSpec::new(r.clone(), st);
                if st == DistributionStyle::Clustered {
                    g.cluster_size = Some(4);
                }
                let a = assign_groups(n, &g, 17);
                let target = target_counts(n, &r);
                if a.achieved_counts != target || a.labels.len() != n {
                    return Err(format!("n={n} ratios={r:?} {st:?}: {:?} != {target:?}", a.achieved_counts));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases exact"))
}

fn jitter() -> Outcome {
    let lat = generate_lattice(&UnitCell::square(10.0), &Affine2D::IDENTITY, BBox::new(Point::ORIGIN, Point::new(995.0, 995.0)))
        .map_err(|e| e.to_string())?;
    let mut lat = lat;
    lat.points.truncate(10_000);
    let moved = apply_jitter(&lat, &RegularitySpec::uniform(3.0), 11).map_err(|e| e.to_string())?;
    let n = moved.len() as f64;
    let std = |f: &dyn Fn(usize) -> f64| {
        let mean = (0..moved.len()).map(f).sum::<f64>() / n;
        ((0..moved.len()).map(|k| (f(k) - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let sx = std(&|k| moved[k].x - lat.points[k].position.x);
    let sy = std(&|k| moved[k].y - lat.points[k].position.y);
    let expect = 3.0 / 3f64.sqrt();
    let still = apply_jitter(&lat, &RegularitySpec::uniform(0.0), 11).map_err(|e| e.to_string())?;
    let identical = still
        .iter()
        .zip(&lat.points)
        .all(|(a, b)| a.x.to_bits() == b.position.x.to_bits() && a.y.to_bits() == b.position.y.to_bits());
    let msg = format!("std ({sx:.4}, {sy:.4}) vs {expect:.4}, range 0 identical: {identical}");
    if (sx / expect - 1.0).abs() < 0.02 && (sy / expect - 1.0).abs() < 0.02 && identical {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Outcome {
    let manifest = bundled_manifest();
    let mut checked = 0;
    for entry in &manifest.entries {
        for sref in &entry.specs {
            let s = parse_spec(bundled_spec(sref.path()).unwrap().as_bytes()).map_err(|e| e.to_string())?;
            let host = match sref {
                SpecRef::Path(_) => entry.host.resolve()?,
                SpecRef::WithHost { host, .. } => host.resolve()?,
            };
            let run = |parallel: bool| -> Result<String, String> {
                let p = compile(&s, &host, &CompileOptions { parallel, ..CompileOptions::default() }).map_err(|e| e.to_string())?;
                Ok(render_svg(&p, &RenderOptions::default()).text)
            };
            let (a, b, c) = (run(false)?, run(false)?, run(true)?);
            if a != b || a != c {
                return Err(format!("{} differs", sref.path()));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} gallery specs byte-identical across runs and sequential/parallel"))
}

fn fit() -> Outcome {
    let host = rect(100.0, 100.0);
    let mut counts = Vec::new();
    for h in [0.0, 2.0, 5.0, 10.0] {
        let p = compile(
            &grid(10.0, r#"{"shape":"circle","size":4}"#, &format!(r#"{{"halo":{h}}}"#)),
            &host,
            &CompileOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        counts.push(p.primitives.len());
    }
    if counts.windows(2).any(|w| w[1] > w[0]) {
        return Err(format!("halo counts {counts:?}"));
    }
    let outline = rect(73.0, 61.0).outline();
    let mut scanned = 0;
    for (k, mode) in [FitMode::Clip, FitMode::OmitIncomplete, FitMode::Overflow].into_iter().enumerate() {
        for rot in [0.0, 15.0, 45.0, 80.0] {
            let fit = format!(
                r#"{{"mode":"{}","pattern_offset":[{},{}]}}"#,
                serde_json::to_value(mode).unwrap().as_str().unwrap(),
                1.5 * k as f64,
                rot / 10.0
            );
            let p = compile(
                &grid(9.0, &format!(r#"{{"shape":"rectangle","size":[7,3],"orientation":{rot}}}"#), &fit),
                &rect(73.0, 61.0),
                &CompileOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            if p.primitives.len() + p.dropped.total() != p.pre_fit_count() {
                return Err(format!("{mode:?} rot {rot}: counts not conserved"));
            }
            if mode != FitMode::OmitIncomplete {
                continue;
            }
            for q in &p.primitives {
                let poly = q.polygon(true);
                let crosses = geom::edges(&poly)
                    .any(|(a1, a2)| geom::edges(&outline).any(|(b1, b2)| geom::segments_intersect(a1, a2, b1, b2)));
                if crosses || !geom::contains(&outline, q.position) {
                    return Err(format!("rot {rot}: primitive at {:?} meets the boundary", q.position));
                }
                scanned += 1;
            }
        }
    }
    Ok(format!("halo counts {counts:?}, {scanned} omit-incomplete primitives clear of boundary, counts conserved"))
}

fn nest(depth: usize) -> String {
    let mut inner = r#"{"spec_version":1,"arrangement":{"kind":"lattice","lattice":{"cell":{"shape":"square","a":2}}},"groups":[{"shape":"circle","size":1}]}"#.to_string();
    for _ in 1..depth {
        inner = format!(
            r#"{{"spec_version":1,"arrangement":{{"kind":"lattice","lattice":{{"cell":{{"shape":"square","a":20}}}}}},"groups":[{{"shape":"nested","size":12,"nested_spec":{inner}}}]}}"#
        );
    }
    inner
}

fn nesting() -> Outcome {
    let host = rect(100.0, 100.0);
    let mut depths = Vec::new();
    for name in ["nest_lattice_lattice", "nest_lattice_data", "nest_data_lattice", "nest_data_data"] {
        let s = parse_spec(bundled_spec(&format!("specs/{name}.json")).unwrap().as_bytes()).map_err(|e| e.to_string())?;
        let p = compile(&s, &host, &CompileOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let doc = render_svg(&p, &RenderOptions::default());
        let depth = p.nesting_depth() + 1;
        if depth != 2 || doc.stats.nested_patterns == 0 {
            return Err(format!("{name}: depth {depth}"));
        }
        depths.push(depth);
    }
    let deep = nest(4);
    let parsed = match parse_spec(deep.as_bytes()) {
        Err(e) if e.kind == SpecErrorKind::NestingDepthExceeded => true,
        other => return Err(format!("depth-4 parse: {other:?}")),
    };
    let relaxed = parse_spec_with(deep.as_bytes(), &ParseOptions { max_depth: 4 }).map_err(|e| e.to_string())?;
    match compile(&relaxed, &host, &CompileOptions::default()) {
        Err(PatternError::NestingDepthExceeded { .. }) => {}
        Err(e) => return Err(format!("depth-4 compile: {e}")),
        Ok(_) => return Err("depth-4 compile accepted".into()),
    }
    Ok(format!("four configurations at depth {depths:?}; depth 4 rejected by parse ({parsed}) and compile"))
}

fn gallery() -> Outcome {
    let t = Instant::now();
    let report = run_bundled(&CompileOptions::default());
    let dt = t.elapsed();
    let failed: Vec<String> = report.entries.iter().filter(|e| !e.passed).map(|e| format!("{}: {}", e.name, e.detail)).collect();
    let find = |n: &str| report.entries.iter().find(|e| e.name == n).map(|e| e.detail.clone()).unwrap_or_default();
    let msg = format!(
        "{} entries in {:.2?}; grain-palette {}; triptych {}",
        report.entries.len(),
        dt,
        find("grain-palette"),
        find("distribution-triptych")
    );
    if !failed.is_empty() {
        Err(format!("{msg}; failed {failed:?}"))
    } else if dt > Duration::from_secs(30) {
        Err(msg)
    } else {
        Ok(msg)
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("granularity invariance", granularity),
        ("orientation invariance", orientation),
        ("analytic ink oracle", analytic),
        ("ratio exactness", ratios),
        ("jitter statistics", jitter),
        ("determinism", determinism),
        ("fit correctness", fit),
        ("nesting", nesting),
        ("gallery suite", gallery),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
