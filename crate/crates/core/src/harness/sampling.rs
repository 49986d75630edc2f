//! Deterministic point sampling by rejection against a chart.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::geometry::Chart;

/// Rejection budget per requested point.
pub const DRAWS_PER_POINT: usize = 1000;

/// Uniform value in `[0, 1)` from the top 53 bits of the next output.
fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` points of `chart`, drawn coordinate by coordinate from a SplitMix64
/// stream seeded with `seed` and filtered by [`Chart::admits`].
///
/// The sequence depends only on `(chart, n, seed)`. Sampling gives up with
/// [`Error::SamplingExhausted`] after `1000 n` draws.
pub fn sample_points(chart: &Chart, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::Usage(
            "the number of sample points must be at least 1".into(),
        ));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let budget = DRAWS_PER_POINT.saturating_mul(n);
    let mut out = Vec::with_capacity(n);
    let mut draws = 0;
    while out.len() < n && draws < budget {
        draws += 1;
        let p: Vec<f64> = chart
            .bounds
            .iter()
            .map(|&(lo, hi)| lo + unit(&mut rng) * (hi - lo))
            .collect();
        if chart.admits(&p) {
            out.push(p);
        }
    }
    if out.len() < n {
        return Err(Error::SamplingExhausted {
            requested: n,
            accepted: out.len(),
            draws,
        });
    }
    Ok(out)
}
