//! Parallel estimator drivers. Every trial and sample owns a counter-
//! derived RNG stream and the partial results are merged with
//! commutative monoids, so the numbers are bit-identical for any
//! thread count or work partition.

use hexcov_core::montecarlo::{
    sample_link_power, sample_truncated_shot_noise, Counts, OutageEstimate, Simulation, TailCurve,
};
use hexcov_core::netmodel::{MobileMode, SimParams};
use hexcov_core::rng::SplitMix64;
use hexcov_core::stats::TailCounts;
use hexcov_core::theory;
use rayon::prelude::*;

use crate::CliError;

const CHUNK: u64 = 4096;

fn chunks(n: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    (0..n.div_ceil(CHUNK)).into_par_iter().map(move |c| (c * CHUNK, ((c + 1) * CHUNK).min(n)))
}

/// Outage estimate over trials `[0, n)` of `stream`, split across the
/// current rayon pool.
pub fn estimate_outage(
    sim: &Simulation,
    mode: MobileMode,
    n: u64,
    stream: u64,
) -> Result<OutageEstimate, CliError> {
    let counts = chunks(n)
        .map(|(lo, hi)| {
            let mut c = Counts::default();
            for t in lo..hi {
                c.record(&sim.run_trial(mode, stream, t));
            }
            c
        })
        .reduce(Counts::default, Counts::merge);
    OutageEstimate::from_counts(counts).map_err(CliError::engine)
}

/// K sweep mirroring `hexcov_core::montecarlo::sweep_k`, parallel over
/// trials within each point. Stream ids are the K indices.
pub fn sweep_k(
    params: &SimParams,
    k_values: &[f64],
    n_per_point: u64,
    mode: MobileMode,
) -> Result<Vec<(f64, OutageEstimate)>, CliError> {
    let mut out = Vec::with_capacity(k_values.len());
    for (idx, &k) in k_values.iter().enumerate() {
        if !(k > 0.0) {
            return Err(CliError::Validation(format!("k_values: cluster size must be positive, got {k}")));
        }
        let sim = Simulation::new(params.with_k(k)).map_err(CliError::engine)?;
        out.push((k, estimate_outage(&sim, mode, n_per_point, idx as u64)?));
    }
    Ok(out)
}

fn tail_with(
    params: &SimParams,
    x_grid: &[f64],
    n: u64,
    stream: u64,
    sample: impl Fn(&mut SplitMix64) -> f64 + Sync,
) -> TailCurve {
    let counts = chunks(n)
        .map(|(lo, hi)| {
            let mut c = TailCounts::new(x_grid.to_vec());
            for t in lo..hi {
                let mut rng = SplitMix64::for_trial(params.seed, stream, t);
                c.record(sample(&mut rng));
            }
            c
        })
        .reduce(
            || TailCounts::new(x_grid.to_vec()),
            |mut a, b| {
                a.merge(&b);
                a
            },
        );
    TailCurve::from_counts(&counts)
}

/// Parallel link-power tail estimate; same contract as the serial
/// `estimate_link_power_tail`.
pub fn link_power_tail(
    params: &SimParams,
    x_grid: &[f64],
    n: u64,
    stream: u64,
) -> Result<TailCurve, CliError> {
    // Serial call at n = 0 reuses the core validation of params/grid.
    hexcov_core::montecarlo::estimate_link_power_tail(params, x_grid, 0, stream)
        .map_err(CliError::engine)?;
    Ok(tail_with(params, x_grid, n, stream, |rng| sample_link_power(params, rng)))
}

/// Parallel truncated-shot-noise tail estimate.
pub fn shot_noise_tail(
    params: &SimParams,
    r: f64,
    r_out: f64,
    x_grid: &[f64],
    n: u64,
    stream: u64,
) -> Result<TailCurve, CliError> {
    hexcov_core::montecarlo::estimate_shot_noise_tail(params, r, r_out, x_grid, 0, stream)
        .map_err(CliError::engine)?;
    Ok(tail_with(params, x_grid, n, stream, |rng| {
        sample_truncated_shot_noise(params, r, r_out, rng)
    }))
}

/// Theory-side sweep columns for a K list.
pub fn theory_rows(params: &SimParams, k: f64) -> (f64, theory::TypicalExponentBounds) {
    (theory::exponent_center(params, k), theory::exponent_typical_bounds(params, k))
}
