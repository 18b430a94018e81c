//! Non-fatal design warnings for a valid spec on a given host.

use serde::Serialize;

use super::{ArrangementKind, PatternSpec, StyleVariable};
use crate::host::HostSymbol;
use crate::lattice::generate_lattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WarningKind {
    /// Primitives at least as large as the lattice spacing merge into a solid fill.
    SolidFillRisk,
    /// Orientation varies on a primitive with no visible orientation.
    OrientationOnRoundPrimitive,
    /// Fewer lattice points fall inside the host than needed to read as a pattern.
    Sparse { expected: usize, min: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Warning {
    #[serde(flatten)]
    pub kind: WarningKind,
    pub path: String,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdviceOptions {
    /// Smallest number of primitives a host should receive.
    pub min_count: usize,
}

impl Default for AdviceOptions {
    fn default() -> Self {
        AdviceOptions { min_count: 4 }
    }
}

pub fn validate_spec(spec: &PatternSpec, host: &HostSymbol, opts: &AdviceOptions) -> Vec<Warning> {
    let mut out = Vec::new();
    for (g, style) in spec.groups.iter().enumerate() {
        let round = style.shape == super::ShapeKind::Circle && style.size.width == style.size.height;
        let varies = style
            .regularity
            .get(&StyleVariable::Orientation)
            .is_some_and(|r| r.range > 0.0)
            || spec.variable_groupings.contains_key(&StyleVariable::Orientation)
            || style.orientation != 0.0;
        if round && varies && style.alternatives.is_empty() {
            out.push(Warning {
                kind: WarningKind::OrientationOnRoundPrimitive,
                path: format!("/groups/{g}/orientation"),
                message: "orientation has no visible effect on a circle".into(),
            });
        }
    }

    if spec.arrangement.kind != ArrangementKind::Lattice {
        return out;
    }
    let Some(lat) = spec.lattice() else { return out };
    let Ok(points) = generate_lattice(&lat.cell, &lat.transform, host.bbox()) else {
        return out;
    };
    let spacing = points.min_spacing();
    for (g, style) in spec.groups.iter().enumerate() {
        if style.size.width.max(style.size.height) >= spacing && style.nested_spec.is_none() {
            out.push(Warning {
                kind: WarningKind::SolidFillRisk,
                path: format!("/groups/{g}/size"),
                message: format!("primitive extent reaches the lattice spacing {spacing:.3}"),
            });
        }
    }
    let outline = host.outline();
    let expected = points
        .points
        .iter()
        .filter(|p| crate::geom::contains(&outline, p.position))
        .count();
    if expected < opts.min_count {
        out.push(Warning {
            kind: WarningKind::Sparse {
                expected,
                min: opts.min_count,
            },
            path: "/arrangement/lattice/cell/a".into(),
            message: format!("only {expected} lattice points fall inside the host"),
        });
    }
    out
}
