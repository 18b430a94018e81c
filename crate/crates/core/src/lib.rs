//! Graphic pattern specification, compilation, metrics and SVG rendering.
//!
//! A [`PatternSpec`] describes primitives, their arrangement, grouping,
//! styling and fit. [`compile`] resolves it against a [`HostSymbol`] into a
//! [`ResolvedPattern`], which [`render_svg`] draws and [`measure`] analyses.

pub mod color;
pub mod error;
pub mod fitting;
pub mod gallery;
pub mod geom;
pub mod grouping;
pub mod host;
pub mod lattice;
pub mod metrics;
pub mod pipeline;
pub mod placement;
pub mod primitive;
pub mod raster;
pub mod render;
pub mod rng;
pub mod spec;
pub mod styling;

pub use color::Hsl;
pub use error::{PatternError, Result, SpecError, SpecErrorKind};
pub use fitting::{Composition, DropCounts, ResolvedPattern};
pub use host::{HostGeometry, HostKind, HostSymbol};
pub use metrics::{check_value_preservation, measure, MetricsOptions, PatternMetrics, PreservationReport};
pub use pipeline::{compile, CompileOptions};
pub use primitive::ResolvedPrimitive;
pub use raster::RasterOptions;
pub use render::{render_svg, RenderOptions, SvgDocument};
pub use spec::{parse_spec, parse_spec_with, to_canonical_json, validate_spec, ParseOptions, PatternSpec};
