//! Chaotic carrier generation.
//!
//! Carrier segments are orbits of the degree-2 Chebyshev map
//! `x_{k+1} = 1 - 2 x_k^2` on (-1, 1), the standard DCSK choice. Each
//! segment is affinely normalized to exactly zero sample mean and unit
//! sample mean-square, so frame energy accounting downstream is exact
//! rather than statistical.

use crate::error::{Error, Result};

const WARMUP_ITERATIONS: usize = 64;
const MAX_SEED_ATTEMPTS: usize = 8;
const SEED_PERTURB: u64 = 0x9E37_79B9_7F4A_7C15;

/// A normalized chaotic carrier segment.
///
/// Invariant: sample mean is 0 and sample mean-square is 1, both to within
/// floating-point rounding (well inside 1e-9).
#[derive(Debug, Clone, PartialEq)]
pub struct Carrier {
    chips: Vec<f64>,
}

impl Carrier {
    /// Generates a `beta`-chip carrier, deterministically from `(beta, seed)`.
    ///
    /// The map's fixed points (0.5 and -1) produce constant orbits that
    /// cannot be normalized; those regenerate from a perturbed seed, failing
    /// after [`MAX_SEED_ATTEMPTS`] tries.
    pub fn generate(beta: usize, seed: u64) -> Result<Carrier> {
        if beta < 2 {
            return Err(Error::Config(format!(
                "carrier length must be at least 2 chips, got {beta}"
            )));
        }
        let mut s = seed;
        for _ in 0..MAX_SEED_ATTEMPTS {
            let orbit = chebyshev_orbit(initial_state(s), beta);
            if let Some(chips) = normalize(orbit) {
                return Ok(Carrier { chips });
            }
            s = s.wrapping_add(SEED_PERTURB);
        }
        Err(Error::DegenerateOrbit(MAX_SEED_ATTEMPTS))
    }

    pub fn chips(&self) -> &[f64] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps a 64-bit seed to an initial condition in the open interval (-1, 1).
fn initial_state(seed: u64) -> f64 {
    let z = splitmix64(seed);
    // 53 high bits to (0, 1), offset so neither endpoint is reachable.
    let u = ((z >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0);
    2.0 * u - 1.0
}

/// Iterates the Chebyshev map, discarding the warm-up prefix.
pub(crate) fn chebyshev_orbit(x0: f64, beta: usize) -> Vec<f64> {
    let mut x = x0;
    for _ in 0..WARMUP_ITERATIONS {
        x = 1.0 - 2.0 * x * x;
    }
    let mut chips = Vec::with_capacity(beta);
    for _ in 0..beta {
        chips.push(x);
        x = 1.0 - 2.0 * x * x;
    }
    chips
}

/// Removes the sample mean and scales to unit mean-square. Returns `None`
/// for orbits with (numerically) no variance.
fn normalize(mut chips: Vec<f64>) -> Option<Vec<f64>> {
    let n = chips.len() as f64;
    let mean = chips.iter().sum::<f64>() / n;
    for c in &mut chips {
        *c -= mean;
    }
    let power = chips.iter().map(|c| c * c).sum::<f64>() / n;
    if !(power.is_finite() && power > 1e-24) {
        return None;
    }
    let scale = 1.0 / power.sqrt();
    for c in &mut chips {
        *c *= scale;
    }
    Some(chips)
}
