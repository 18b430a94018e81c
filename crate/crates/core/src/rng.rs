//! Keyed random streams. Every stochastic choice draws from a stream keyed by
//! `(seed, purpose, i, j)` so that a point's draws never depend on how many
//! other points exist.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spec::{Distribution, RegularitySpec};

/// Purpose tags separating independent streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Position = 1,
    Size = 2,
    Orientation = 3,
    Hue = 4,
    Saturation = 5,
    Lightness = 6,
    Shape = 7,
    Dispersed = 8,
    Displace = 9,
    Nested = 10,
    VariableGrouping = 11,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix(seed: u64, purpose: Purpose, i: i64, j: i64) -> u64 {
    let mut h = splitmix(seed);
    h = splitmix(h ^ purpose as u64);
    h = splitmix(h ^ i as u64);
    splitmix(h ^ (j as u64).rotate_left(32))
}

pub fn stream(seed: u64, purpose: Purpose, i: i64, j: i64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, purpose, i, j))
}

const TRUNC_NORMAL_ATTEMPTS: usize = 64;

/// One signed deviation drawn per the regularity spec, bounded by its range.
pub fn deviation<R: Rng>(reg: &RegularitySpec, rng: &mut R) -> f64 {
    let range = reg.range;
    if range == 0.0 {
        return 0.0;
    }
    match reg.distribution {
        Distribution::Uniform => rng.random_range(-range..=range),
        Distribution::TruncatedNormal => {
            let sigma = reg.sigma();
            if sigma == 0.0 {
                return 0.0;
            }
            let mut z = 0.0;
            for _ in 0..TRUNC_NORMAL_ATTEMPTS {
                let n: f64 = rng.sample(StandardNormal);
                z = n * sigma;
                if z.abs() <= range {
                    return z;
                }
            }
            z.clamp(-range, range)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_keyed() {
        assert_eq!(mix(1, Purpose::Position, 3, 4), mix(1, Purpose::Position, 3, 4));
        assert_ne!(mix(1, Purpose::Position, 3, 4), mix(1, Purpose::Position, 4, 3));
        assert_ne!(mix(1, Purpose::Position, 3, 4), mix(1, Purpose::Size, 3, 4));
        assert_ne!(mix(1, Purpose::Position, 3, 4), mix(2, Purpose::Position, 3, 4));
    }

    #[test]
    fn truncated_normal_stays_in_range() {
        let reg = RegularitySpec {
            range: 1.0,
            dispersion: Some(1.0),
            distribution: Distribution::TruncatedNormal,
            axes: Default::default(),
        };
        let mut rng = stream(7, Purpose::Position, 0, 0);
        for _ in 0..10_000 {
            let d = deviation(&reg, &mut rng);
            assert!(d.abs() <= 1.0);
        }
    }
}
