//! Commands behind the `pattern-forge` binary, callable without a process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pattern_forge::gallery::{self, GalleryManifest, GalleryReport, HostRef};
use pattern_forge::placement::{load_records_csv, load_records_json};
use pattern_forge::spec::{validate_spec, AdviceOptions, ArrangementKind, Warning};
use pattern_forge::{
    check_value_preservation, compile, measure, parse_spec, render_svg, CompileOptions, HostSymbol, MetricsOptions,
    PatternError, PatternMetrics, PatternSpec, PreservationReport, RasterOptions, RenderOptions, SpecError,
};
use serde::{Deserialize, Serialize};

pub mod serve;

pub const SCHEMA: &str = include_str!("../../../schema/pattern-spec.schema.json");
pub const SUPERSAMPLE_LEVELS: [u32; 4] = [1, 2, 4, 8];

/// A command failure and its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Rejected input; exit 1 with the error JSON on stderr.
    Spec(SpecError),
    /// Unreadable input or unwritable output; exit 2.
    Io(String),
    /// The command ran but its check failed; exit 1 with a report on stderr.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) | CliError::Failed(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    /// Text written to stderr.
    pub fn report(&self) -> String {
        match self {
            CliError::Spec(e) => e.to_json(),
            CliError::Io(m) => serde_json::json!({ "error": "io", "message": m }).to_string(),
            CliError::Failed(r) => r.clone(),
        }
    }
}

impl From<PatternError> for CliError {
    fn from(e: PatternError) -> Self {
        CliError::Spec(spec_error(e))
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Spec(e)
    }
}

/// Engine errors in the shape of a spec error, so every rejection carries `path` and `message`.
pub fn spec_error(e: PatternError) -> SpecError {
    match e {
        PatternError::Spec(s) => s,
        PatternError::NestingDepthExceeded { .. } => SpecError {
            kind: pattern_forge::SpecErrorKind::NestingDepthExceeded,
            path: String::new(),
            message: e.to_string(),
        },
        other => SpecError::invariant("", other.to_string()),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

pub fn load_spec(path: &Path) -> Result<PatternSpec, CliError> {
    Ok(parse_spec(&read(path)?)?)
}

/// `rect:W×H` shorthand, or a path to a host JSON file.
pub fn load_host(arg: &str) -> Result<HostSymbol, CliError> {
    if let Some(parsed) = HostSymbol::parse_shorthand(arg) {
        return parsed.map_err(|e| CliError::Spec(SpecError::invariant("/host", e.to_string())));
    }
    if arg.starts_with("rect:") {
        return Err(CliError::Spec(SpecError::schema("/host", format!("bad host shorthand `{arg}`"))));
    }
    let bytes = read(Path::new(arg))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Spec(SpecError::schema("/host", e.to_string())))
}

/// Replaces the records of a data-driven spec with those read from `path`
/// (CSV with a header row, or a JSON array of objects).
pub fn attach_data(spec: &mut PatternSpec, path: &Path, x: &str, y: &str) -> Result<(), CliError> {
    let bytes = read(path)?;
    let records = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = String::from_utf8(bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        load_records_json(&text, x, y)?
    } else {
        load_records_csv(bytes.as_slice(), x, y)?
    };
    match (&spec.arrangement.kind, spec.arrangement.data.as_mut()) {
        (ArrangementKind::DataDriven, Some(data)) => {
            data.records = records;
            Ok(())
        }
        _ => Err(CliError::Spec(SpecError::invariant(
            "/arrangement/kind",
            "--data needs a data-driven arrangement",
        ))),
    }
}

pub fn compile_options(seed: Option<u64>) -> CompileOptions {
    CompileOptions {
        seed_override: seed,
        ..CompileOptions::default()
    }
}

pub fn metrics_options(supersample: u32) -> Result<MetricsOptions, CliError> {
    if !SUPERSAMPLE_LEVELS.contains(&supersample) {
        return Err(CliError::Spec(SpecError::invariant(
            "/supersample",
            format!("supersample must be one of {SUPERSAMPLE_LEVELS:?}"),
        )));
    }
    Ok(MetricsOptions {
        raster: RasterOptions {
            supersample,
            ..RasterOptions::default()
        },
        ..MetricsOptions::default()
    })
}

pub fn render(spec: &PatternSpec, host: &HostSymbol, seed: Option<u64>, opts: &RenderOptions) -> Result<String, CliError> {
    let pattern = compile(spec, host, &compile_options(seed))?;
    Ok(render_svg(&pattern, opts).text)
}

pub fn metrics(spec: &PatternSpec, host: &HostSymbol, seed: Option<u64>, supersample: u32) -> Result<PatternMetrics, CliError> {
    let opts = metrics_options(supersample)?;
    let pattern = compile(spec, host, &compile_options(seed))?;
    Ok(measure(&pattern, &opts))
}

#[derive(Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub depth: usize,
    pub warnings: Vec<Warning>,
}

pub fn validate(spec: &PatternSpec, host: Option<&HostSymbol>) -> ValidationReport {
    ValidationReport {
        valid: true,
        depth: spec.depth(),
        warnings: host.map(|h| validate_spec(spec, h, &AdviceOptions::default())).unwrap_or_default(),
    }
}

pub fn check_preserve(
    a: &PatternSpec,
    b: &PatternSpec,
    host: &HostSymbol,
    tol: f64,
    seed: Option<u64>,
    supersample: u32,
) -> Result<PreservationReport, CliError> {
    Ok(check_value_preservation(a, b, host, tol, &compile_options(seed), &metrics_options(supersample)?)?)
}

/// Runs the bundled gallery, or the manifest at `manifest` with spec paths
/// relative to its directory, and writes SVGs, `report.json` and `index.html`
/// into `out`.
pub fn gallery(out: &Path, manifest: Option<&Path>, seed: Option<u64>) -> Result<GalleryReport, CliError> {
    let opts = compile_options(seed);
    let report = match manifest {
        None => gallery::run_bundled(&opts),
        Some(path) => {
            let m: GalleryManifest = serde_json::from_slice(&read(path)?)
                .map_err(|e| CliError::Spec(SpecError::schema("", format!("{}: {e}", path.display()))))?;
            let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let load = |p: &str| fs::read(base.join(p)).map_err(|e| format!("{p}: {e}"));
            gallery::run_gallery(&m, &load, &opts)
        }
    };
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let put = |name: &str, bytes: &[u8]| {
        let p = out.join(name);
        fs::write(&p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
    };
    for entry in &report.entries {
        for o in &entry.outputs {
            put(&o.file, o.svg.as_bytes())?;
        }
    }
    put("report.json", serde_json::to_string_pretty(&report).expect("report serializes").as_bytes())?;
    put("index.html", gallery::index_html(&report).as_bytes())?;
    Ok(report)
}

/// Per-entry failure lines for a gallery run, one JSON object per line.
pub fn gallery_failures(report: &GalleryReport) -> String {
    report
        .entries
        .iter()
        .filter(|e| !e.passed)
        .map(|e| serde_json::json!({ "entry": e.name, "detail": e.detail }).to_string() + "\n")
        .collect()
}

/// Request body for the `serve` endpoints.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub spec: serde_json::Value,
    pub host: HostRef,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub supersample: Option<u32>,
    #[serde(default)]
    pub padding: Option<f64>,
    #[serde(default)]
    pub precision: Option<usize>,
}

impl Request {
    pub fn parse(body: &[u8]) -> Result<(Request, PatternSpec, HostSymbol), SpecError> {
        let req: Request = serde_json::from_slice(body).map_err(|e| SpecError::schema("", e.to_string()))?;
        let spec_bytes = serde_json::to_vec(&req.spec).expect("value serializes");
        let spec = parse_spec(&spec_bytes).map_err(|mut e| {
            e.path = format!("/spec{}", e.path);
            e
        })?;
        let host = req.host.resolve().map_err(|m| SpecError::invariant("/host", m))?;
        Ok((req, spec, host))
    }
}
