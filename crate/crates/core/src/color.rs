//! HSL colors and the sRGB / linear-light conversions used for mixing.

use serde::{Deserialize, Serialize};

/// Hue in degrees `[0, 360)`, saturation and lightness in `[0, 1]`.
/// An achromatic value `v` is `Hsl { h: 0, s: 0, l: v }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ColorInput")]
pub struct Hsl {
    pub h: f64,
    pub s: f64,
    pub l: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ColorInput {
    Hsl {
        h: f64,
        s: f64,
        l: f64,
    },
    Value {
        value: f64,
    },
}

impl TryFrom<ColorInput> for Hsl {
    type Error = String;

    fn try_from(c: ColorInput) -> Result<Self, Self::Error> {
        match c {
            ColorInput::Hsl { h, s, l } => {
                if !h.is_finite() {
                    return Err("hue must be finite".into());
                }
                if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&l) {
                    return Err("saturation and lightness must lie in [0, 1]".into());
                }
                Ok(Hsl::new(h, s, l))
            }
            ColorInput::Value { value } => {
                if !(0.0..=1.0).contains(&value) {
                    return Err("achromatic value must lie in [0, 1]".into());
                }
                Ok(Hsl::gray(value))
            }
        }
    }
}

impl Default for Hsl {
    fn default() -> Self {
        Hsl::BLACK
    }
}

pub fn wrap_degrees(d: f64) -> f64 {
    let w = d.rem_euclid(360.0);
    // rem_euclid can return 360.0 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_to_srgb(c: f64) -> f64 {
    if c <= 0.003_130_8 {
        c * 12.92
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

impl Hsl {
    pub const BLACK: Hsl = Hsl {
        h: 0.0,
        s: 0.0,
        l: 0.0,
    };
    pub const WHITE: Hsl = Hsl {
        h: 0.0,
        s: 0.0,
        l: 1.0,
    };

    pub fn new(h: f64, s: f64, l: f64) -> Self {
        Hsl {
            h: wrap_degrees(h),
            s,
            l,
        }
    }

    pub fn gray(value: f64) -> Self {
        Hsl {
            h: 0.0,
            s: 0.0,
            l: value,
        }
    }

    /// Gamma-encoded sRGB components in `[0, 1]`.
    pub fn to_srgb(self) -> [f64; 3] {
        let c = (1.0 - (2.0 * self.l - 1.0).abs()) * self.s;
        let hp = self.h / 60.0;
        let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
        let (r, g, b) = match hp as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = self.l - 0.5 * c;
        [r + m, g + m, b + m]
    }

    pub fn from_srgb([r, g, b]: [f64; 3]) -> Self {
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        let l = 0.5 * (max + min);
        let d = max - min;
        if d < 1e-12 {
            return Hsl::gray(l);
        }
        let s = d / (1.0 - (2.0 * l - 1.0).abs());
        let h = if max == r {
            60.0 * ((g - b) / d).rem_euclid(6.0)
        } else if max == g {
            60.0 * ((b - r) / d + 2.0)
        } else {
            60.0 * ((r - g) / d + 4.0)
        };
        Hsl::new(h, s.clamp(0.0, 1.0), l.clamp(0.0, 1.0))
    }

    pub fn to_linear(self) -> [f64; 3] {
        self.to_srgb().map(srgb_to_linear)
    }

    pub fn from_linear(rgb: [f64; 3]) -> Self {
        Hsl::from_srgb(rgb.map(|c| linear_to_srgb(c.clamp(0.0, 1.0))))
    }

    /// Relative luminance of the linear-light color.
    pub fn linear_luminance(self) -> f64 {
        let [r, g, b] = self.to_linear();
        0.2126 * r + 0.7152 * g + 0.0722 * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primaries_roundtrip() {
        for h in [0.0, 60.0, 120.0, 180.0, 240.0, 300.0, 17.0, 211.0] {
            let c = Hsl::new(h, 0.8, 0.4);
            let back = Hsl::from_srgb(c.to_srgb());
            assert!((back.h - c.h).abs() < 1e-9, "{h}");
            assert!((back.s - c.s).abs() < 1e-9);
            assert!((back.l - c.l).abs() < 1e-9);
        }
    }

    #[test]
    fn blue_is_blue() {
        let rgb = Hsl::new(240.0, 1.0, 0.5).to_srgb();
        assert_eq!(rgb, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn linear_roundtrip_gray() {
        let g = Hsl::from_linear([0.5, 0.5, 0.5]);
        assert!((g.linear_luminance() - 0.5).abs() < 1e-9);
        assert_eq!(g.s, 0.0);
    }

    #[test]
    fn value_form_parses() {
        let c: Hsl = serde_json::from_str(r#"{"value": 0.25}"#).unwrap();
        assert_eq!(c, Hsl::gray(0.25));
        assert!(serde_json::from_str::<Hsl>(r#"{"h": 10, "s": 2, "l": 0.5}"#).is_err());
    }
}
