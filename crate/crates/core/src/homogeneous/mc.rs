//! Monte Carlo estimates of the irreducible integrals
//! `(1/n!) ∫ D_{n+1}(0, x_1, .., x_n) dx`.
//!
//! Points are drawn uniformly from a ball around the origin large enough to
//! contain the support of the biconnected integrand. Work is split into a
//! fixed number of batches, each with its own ChaCha8 stream, so the result
//! depends only on the seed and never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{d_with, pair_index, MAX_D_ORDER};
use crate::scalar::factorial;

use super::geometry::ball_volume;

pub const MC_BATCHES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Graph radius bound: every vertex of a biconnected graph on `m` vertices
/// lies within `floor(m/2)` edges of vertex 0.
fn hop_bound(n: usize) -> usize {
    n.div_ceil(2).max(1)
}

fn sample_ball(rng: &mut ChaCha8Rng, radius: f64, out: &mut [f64]) {
    loop {
        let mut r2 = 0.0;
        for c in out.iter_mut() {
            *c = rng.gen_range(-1.0..1.0);
            r2 += *c * *c;
        }
        if r2 < 1.0 {
            out.iter_mut().for_each(|c| *c *= radius);
            return;
        }
    }
}

/// Estimates `(1/n!) ∫ D_{n+1}(0, x) dx` in `R^d` for a pair function
/// `f(i, j, x_j - x_i)` on vertices `0..=n` that vanishes once
/// `|x_j - x_i| >= reach`.
pub fn cluster_integral_mc(
    d: usize,
    n: usize,
    f: &(dyn Fn(usize, usize, &[f64]) -> f64 + Sync),
    reach: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !(1..=3).contains(&d) {
        return Err(Error::Capability(format!("sampling is implemented for d in 1..=3, got {d}")));
    }
    if n == 0 || n + 1 > MAX_D_ORDER {
        return Err(Error::Capability(format!("irreducible integrals need 1 <= n <= {}", MAX_D_ORDER - 1)));
    }
    if !(reach.is_finite() && reach > 0.0) {
        return Err(Error::Domain("interaction range must be finite and positive".into()));
    }
    if samples < MC_BATCHES as u64 {
        return Err(Error::Input(format!("at least {MC_BATCHES} samples are required")));
    }
    let per_batch = samples.div_ceil(MC_BATCHES as u64);
    let radius = reach * hop_bound(n) as f64;
    let scale = ball_volume(d, radius).powi(n as i32) / factorial(n) as f64;

    let batch_means: Vec<f64> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch as u64);
            let mut pos = vec![0.0; (n + 1) * d];
            let mut delta = vec![0.0; d];
            let mut sum = 0.0;
            for _ in 0..per_batch {
                for v in 1..=n {
                    sample_ball(&mut rng, radius, &mut pos[v * d..(v + 1) * d]);
                }
                let edges: Vec<f64> = crate::graphs::pairs(n + 1)
                    .into_iter()
                    .map(|(i, j)| {
                        for c in 0..d {
                            delta[c] = pos[j * d + c] - pos[i * d + c];
                        }
                        f(i, j, &delta)
                    })
                    .collect();
                sum += d_with::<f64>(n + 1, |i, j| edges[pair_index(n + 1, i, j)]).expect("order checked above");
            }
            sum / per_batch as f64 * scale
        })
        .collect();

    let b = MC_BATCHES as f64;
    let mean = batch_means.iter().sum::<f64>() / b;
    let var = batch_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    Ok(McEstimate { mean, stderr: (var / b).sqrt(), samples: per_batch * MC_BATCHES as u64 })
}

/// Euclidean length of a displacement.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}
