//! Emergent measures of a resolved pattern: ink ratio, regional shade,
//! solid-fill flag, and value-preservation checks between two specs.

use serde::Serialize;

use crate::color::Hsl;
use crate::error::Result;
use crate::fitting::ResolvedPattern;
use crate::host::HostSymbol;
use crate::pipeline::{compile, CompileOptions};
use crate::raster::{rasterize, RasterOptions};
use crate::spec::PatternSpec;

pub const SOLID_FILL_THRESHOLD: f64 = 0.98;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsOptions {
    pub raster: RasterOptions,
    pub background: Hsl,
    pub solid_fill_threshold: f64,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            raster: RasterOptions::default(),
            background: Hsl::WHITE,
            solid_fill_threshold: SOLID_FILL_THRESHOLD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PatternMetrics {
    pub ink_ratio: f64,
    pub regional_shade: Hsl,
    pub solid_fill: bool,
    /// Supersampling factor used.
    pub resolution: u32,
}

impl PatternMetrics {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("metrics serialize")
    }
}

pub fn measure(pattern: &ResolvedPattern, opts: &MetricsOptions) -> PatternMetrics {
    let cov = rasterize(pattern, &opts.raster);
    let total = cov.host_samples();
    let linear: Vec<[f64; 3]> = cov.colors.iter().map(|c| c.to_linear()).collect();
    let mut inked = 0usize;
    let mut sum = [0.0f64; 3];
    cov.for_each_host_sample(|t| {
        if t > 0 {
            inked += 1;
            let c = linear[t as usize - 1];
            for k in 0..3 {
                sum[k] += c[k];
            }
        }
    });
    let ink_ratio = if total == 0 { 0.0 } else { inked as f64 / total as f64 };
    let regional_shade = if inked == 0 || total == 0 {
        opts.background
    } else {
        let bg = opts.background.to_linear();
        let blank = (total - inked) as f64;
        let mixed: [f64; 3] = std::array::from_fn(|k| ((sum[k] + blank * bg[k]) / total as f64).clamp(0.0, 1.0));
        Hsl::from_linear(mixed)
    };
    PatternMetrics {
        ink_ratio,
        regional_shade,
        solid_fill: ink_ratio > opts.solid_fill_threshold,
        resolution: opts.raster.supersample,
    }
}

pub fn ink_ratio(pattern: &ResolvedPattern, supersample: u32) -> f64 {
    let opts = MetricsOptions {
        raster: RasterOptions {
            supersample,
            ..RasterOptions::default()
        },
        ..MetricsOptions::default()
    };
    measure(pattern, &opts).ink_ratio
}

pub fn regional_shade(pattern: &ResolvedPattern, background: Hsl) -> Hsl {
    measure(
        pattern,
        &MetricsOptions {
            background,
            ..MetricsOptions::default()
        },
    )
    .regional_shade
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PreservationReport {
    pub preserved: bool,
    pub ink_ratio_a: f64,
    pub ink_ratio_b: f64,
    pub difference: f64,
    pub tolerance: f64,
}

/// Whether two specs produce the same ink ratio on `host` within `tol`.
pub fn check_value_preservation(
    a: &PatternSpec,
    b: &PatternSpec,
    host: &HostSymbol,
    tol: f64,
    compile_opts: &CompileOptions,
    metrics_opts: &MetricsOptions,
) -> Result<PreservationReport> {
    let ia = measure(&compile(a, host, compile_opts)?, metrics_opts).ink_ratio;
    let ib = measure(&compile(b, host, compile_opts)?, metrics_opts).ink_ratio;
    let difference = (ia - ib).abs();
    Ok(PreservationReport {
        preserved: difference <= tol,
        ink_ratio_a: ia,
        ink_ratio_b: ib,
        difference,
        tolerance: tol,
    })
}
