//! Domain model of a pattern document and its canonical JSON form.
//!
//! A document is parsed in two passes: serde maps the JSON onto these types
//! (schema errors), then [`parse::normalize`] fills defaults and checks every
//! cross-field invariant (invariant errors). Both report JSON pointers.

mod advice;
mod parse;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::color::Hsl;
use crate::geom::{Mat, Point};

pub use advice::{validate_spec, AdviceOptions, Warning, WarningKind};
pub use parse::{parse_spec, parse_spec_with, to_canonical_json, ParseOptions};

pub const SPEC_VERSION: u32 = 1;
pub const DEFAULT_MAX_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_version: Option<u32>,
    pub arrangement: ArrangementSpec,
    #[serde(default)]
    pub grouping: GroupingSpec,
    pub groups: Vec<GroupStyle>,
    #[serde(default)]
    pub fit: FitSpec,
    #[serde(default)]
    pub seed: u64,
    /// Per-variable groupings independent of the primary one. A variable with
    /// no entry follows the primary grouping (covarying design).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub variable_groupings: BTreeMap<StyleVariable, VariableGrouping>,
}

impl PatternSpec {
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    /// 1 for a flat spec; each level of nested specs adds one.
    pub fn depth(&self) -> usize {
        1 + self
            .groups
            .iter()
            .filter_map(|g| g.nested_spec.as_deref())
            .map(PatternSpec::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn lattice(&self) -> Option<&LatticeSpec> {
        self.arrangement.lattice.as_ref()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrangementKind {
    Lattice,
    DataDriven,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementSpec {
    pub kind: ArrangementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataPlacementSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    /// 1 or 2; defaults from the cell shape.
    #[serde(default)]
    pub dimensionality: Option<u8>,
    pub cell: UnitCell,
    #[serde(default, skip_serializing_if = "Affine2D::is_identity")]
    pub transform: Affine2D,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positional_regularity: Option<RegularitySpec>,
}

impl LatticeSpec {
    pub fn dim(&self) -> u8 {
        self.dimensionality
            .unwrap_or(if self.cell.shape == CellShape::Segment { 1 } else { 2 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellShape {
    Square,
    Rectangular,
    Oblique,
    Hexagonal,
    Segment,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitCell {
    pub shape: CellShape,
    pub a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl UnitCell {
    pub fn square(a: f64) -> Self {
        UnitCell {
            shape: CellShape::Square,
            a,
            b: Some(a),
            theta: Some(90.0),
        }
    }

    pub fn rectangular(a: f64, b: f64) -> Self {
        UnitCell {
            shape: CellShape::Rectangular,
            a,
            b: Some(b),
            theta: Some(90.0),
        }
    }

    pub fn oblique(a: f64, b: f64, theta: f64) -> Self {
        UnitCell {
            shape: CellShape::Oblique,
            a,
            b: Some(b),
            theta: Some(theta),
        }
    }

    pub fn hexagonal(a: f64) -> Self {
        UnitCell {
            shape: CellShape::Hexagonal,
            a,
            b: Some(a),
            theta: Some(120.0),
        }
    }

    pub fn segment(a: f64) -> Self {
        UnitCell {
            shape: CellShape::Segment,
            a,
            b: None,
            theta: None,
        }
    }

    pub fn b_or_a(&self) -> f64 {
        self.b.unwrap_or(self.a)
    }

    pub fn theta_or_default(&self) -> f64 {
        self.theta.unwrap_or(match self.shape {
            CellShape::Hexagonal => 120.0,
            _ => 90.0,
        })
    }
}

/// Scale, shear, rotation and translation: `T(translate) · R(rotation) · H(shear) · S(scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Affine2D {
    pub scale_x: f64,
    pub scale_y: f64,
    /// Degrees, counter-clockwise in a y-up frame.
    pub rotation: f64,
    pub shear: f64,
    pub translate: Point,
}

impl Default for Affine2D {
    fn default() -> Self {
        Affine2D::IDENTITY
    }
}

impl Affine2D {
    pub const IDENTITY: Affine2D = Affine2D {
        scale_x: 1.0,
        scale_y: 1.0,
        rotation: 0.0,
        shear: 0.0,
        translate: Point::ORIGIN,
    };

    pub fn rotation(deg: f64) -> Self {
        Affine2D {
            rotation: deg,
            ..Affine2D::IDENTITY
        }
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Affine2D {
            scale_x: sx,
            scale_y: sy,
            ..Affine2D::IDENTITY
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Affine2D::IDENTITY
    }

    pub fn linear(&self) -> Mat {
        let shear = Mat {
            c: self.shear,
            ..Mat::IDENTITY
        };
        Mat::rotate(self.rotation)
            .then_after(&shear)
            .then_after(&Mat::scale(self.scale_x, self.scale_y))
    }

    /// The full matrix with its linear part acting about `center`.
    pub fn matrix_about(&self, center: Point) -> Mat {
        Mat::translate(self.translate).then_after(&self.linear().about(center))
    }

    pub fn det(&self) -> f64 {
        self.scale_x * self.scale_y
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    #[default]
    Uniform,
    TruncatedNormal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axes {
    #[default]
    Both,
    UOnly,
    VOnly,
    AlongLine,
}

impl Axes {
    pub fn name(self) -> &'static str {
        match self {
            Axes::Both => "both",
            Axes::UOnly => "u-only",
            Axes::VOnly => "v-only",
            Axes::AlongLine => "along-line",
        }
    }
}

/// How far values may deviate from their regular value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularitySpec {
    /// Maximum absolute deviation.
    pub range: f64,
    /// Standard deviation of deviations. For uniform draws this is implied
    /// (`range/√3`) and may be omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<f64>,
    #[serde(default)]
    pub distribution: Distribution,
    #[serde(default)]
    pub axes: Axes,
}

impl RegularitySpec {
    pub fn uniform(range: f64) -> Self {
        RegularitySpec {
            range,
            dispersion: None,
            distribution: Distribution::Uniform,
            axes: Axes::Both,
        }
    }

    pub fn sigma(&self) -> f64 {
        match self.distribution {
            Distribution::Uniform => self.range / 3f64.sqrt(),
            Distribution::TruncatedNormal => self.dispersion.unwrap_or(self.range),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionStyle {
    Grouped,
    #[default]
    Interspersed,
    Dispersed,
    Clustered,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default)]
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub distribution_style: DistributionStyle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_size: Option<usize>,
}

impl GroupingSpec {
    pub fn new(ratios: Vec<f64>, style: DistributionStyle) -> Self {
        GroupingSpec {
            count: Some(ratios.len()),
            ratios,
            distribution_style: style,
            cluster_size: None,
        }
    }

    pub fn clustered(ratios: Vec<f64>, cluster_size: usize) -> Self {
        GroupingSpec {
            cluster_size: Some(cluster_size),
            ..GroupingSpec::new(ratios, DistributionStyle::Clustered)
        }
    }

    pub fn k(&self) -> usize {
        self.count.unwrap_or(self.ratios.len())
    }

    /// Ratios scaled to sum to 1 (uniform when none were given).
    pub fn normalized_ratios(&self) -> Vec<f64> {
        let k = self.k();
        if self.ratios.is_empty() {
            return vec![1.0 / k as f64; k];
        }
        let total: f64 = self.ratios.iter().sum();
        self.ratios.iter().map(|r| r / total).collect()
    }
}

/// Retinal variables that can carry regularity, data channels, or their own grouping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StyleVariable {
    Size,
    Orientation,
    Hue,
    Saturation,
    Lightness,
    Shape,
}

impl StyleVariable {
    pub const ALL: [StyleVariable; 6] = [
        StyleVariable::Size,
        StyleVariable::Orientation,
        StyleVariable::Hue,
        StyleVariable::Saturation,
        StyleVariable::Lightness,
        StyleVariable::Shape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StyleVariable::Size => "size",
            StyleVariable::Orientation => "orientation",
            StyleVariable::Hue => "hue",
            StyleVariable::Saturation => "saturation",
            StyleVariable::Lightness => "lightness",
            StyleVariable::Shape => "shape",
        }
    }
}

/// An independent labeling for one variable: `values[g]` replaces that
/// variable for primitives the grouping puts in group `g`.
/// Size values are widths (height follows each group's aspect); hue and
/// orientation are degrees; saturation and lightness are in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableGrouping {
    pub grouping: GroupingSpec,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    Circle,
    Square,
    Rectangle,
    LineSegment,
    InfiniteLine,
    GlyphPath,
    Nested,
}

impl ShapeKind {
    /// Line primitives extend in one direction; everything else in two.
    pub fn dimensionality(self) -> u8 {
        match self {
            ShapeKind::LineSegment | ShapeKind::InfiniteLine => 1,
            _ => 2,
        }
    }
}

/// Width and height in user units. Accepts `[w, h]` or a single number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "SizeInput", into = "[f64; 2]")]
pub struct Size2 {
    pub width: f64,
    pub height: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SizeInput {
    Pair([f64; 2]),
    Single(f64),
}

impl From<SizeInput> for Size2 {
    fn from(s: SizeInput) -> Self {
        match s {
            SizeInput::Pair([width, height]) => Size2 { width, height },
            SizeInput::Single(v) => Size2 {
                width: v,
                height: v,
            },
        }
    }
}

impl From<Size2> for [f64; 2] {
    fn from(s: Size2) -> Self {
        [s.width, s.height]
    }
}

impl Size2 {
    pub fn new(width: f64, height: f64) -> Self {
        Size2 { width, height }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupStyle {
    pub shape: ShapeKind,
    /// Circle: diameters; square/rectangle: sides; line-segment: length ×
    /// thickness; infinite-line: thickness is the height.
    pub size: Size2,
    #[serde(default)]
    pub orientation: f64,
    #[serde(default)]
    pub color: Hsl,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub regularity: BTreeMap<StyleVariable, RegularitySpec>,
    /// Shapes substituted under shape regularity.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<ShapeKind>,
    /// Outline in unit coordinates (`[-0.5, 0.5]²`) scaled by `size`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glyph: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nested_spec: Option<Box<PatternSpec>>,
}

impl GroupStyle {
    pub fn new(shape: ShapeKind, width: f64, height: f64) -> Self {
        GroupStyle {
            shape,
            size: Size2::new(width, height),
            orientation: 0.0,
            color: Hsl::BLACK,
            regularity: BTreeMap::new(),
            alternatives: Vec::new(),
            glyph: None,
            nested_spec: None,
        }
    }

    pub fn circle(diameter: f64) -> Self {
        GroupStyle::new(ShapeKind::Circle, diameter, diameter)
    }

    pub fn with_color(mut self, color: Hsl) -> Self {
        self.color = color;
        self
    }

    pub fn with_orientation(mut self, deg: f64) -> Self {
        self.orientation = deg;
        self
    }

    pub fn is_round(&self) -> bool {
        self.shape == ShapeKind::Circle && self.size.width == self.size.height
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    #[default]
    Clip,
    OmitIncomplete,
    Overflow,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    #[serde(default)]
    pub mode: FitMode,
    #[serde(default)]
    pub halo: f64,
    #[serde(default)]
    pub pattern_offset: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stretch: Option<Affine2D>,
    /// Apply `stretch` to primitive geometry as well as positions.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stretch_geometry: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementMode {
    Accurate,
    Displaced,
    Gridded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Number(f64),
    Text(String),
}

impl AttrValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Number(v) => Some(*v),
            AttrValue::Text(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataRecord {
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, AttrValue>,
}

/// Maps a record attribute onto a retinal variable. Numeric attributes are
/// scaled linearly from their observed extent onto `range`; categorical ones
/// are spread evenly over it in sorted order. Size ranges are multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ChannelInput")]
pub struct ChannelSpec {
    pub variable: StyleVariable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChannelInput {
    Bare(StyleVariable),
    Full {
        variable: StyleVariable,
        #[serde(default)]
        range: Option<[f64; 2]>,
    },
}

impl From<ChannelInput> for ChannelSpec {
    fn from(c: ChannelInput) -> Self {
        match c {
            ChannelInput::Bare(variable) => ChannelSpec {
                variable,
                range: None,
            },
            ChannelInput::Full { variable, range } => ChannelSpec { variable, range },
        }
    }
}

impl ChannelSpec {
    pub fn effective_range(&self) -> [f64; 2] {
        self.range.unwrap_or(match self.variable {
            StyleVariable::Size => [0.5, 1.5],
            StyleVariable::Orientation => [0.0, 180.0],
            StyleVariable::Hue => [0.0, 240.0],
            StyleVariable::Saturation => [0.0, 1.0],
            StyleVariable::Lightness => [0.8, 0.2],
            StyleVariable::Shape => [0.0, 1.0],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPlacementSpec {
    pub mode: PlacementMode,
    #[serde(default)]
    pub records: Vec<DataRecord>,
    #[serde(default, skip_serializing_if = "Affine2D::is_identity")]
    pub projection: Affine2D,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_cell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub channel_map: BTreeMap<String, ChannelSpec>,
}

impl DataPlacementSpec {
    /// Projection from data coordinates to host units. Its linear part acts about the data origin.
    pub fn projection_matrix(&self) -> Mat {
        self.projection.matrix_about(Point::ORIGIN)
    }
}
