//! Randomised baselines: Lightweight importance sampling, a D²-sensitivity
//! sampler standing in for BFL16/ONESHOT, and uniform sampling.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng;

use super::{lightweight_distribution, sq_dist, Coreset, CoresetMethod, WeightedPoint};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seeds;

/// Which published construction the D² baseline is labelled after. Both
/// variants run the same sensitivity sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2Variant {
    BflStyle,
    OneshotStyle,
}

fn check_size(data: &Dataset, m: usize) -> Result<()> {
    if m == 0 || m > data.len() {
        return Err(Error::invalid(format!(
            "coreset size {m} must be in 1..={}",
            data.len()
        )));
    }
    Ok(())
}

/// Draws `m` indices with replacement from `probs` and weights each by
/// `1 / (m · p)`.
fn importance_sample<R: Rng>(
    data: &Dataset,
    probs: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<Vec<WeightedPoint>> {
    let dist = WeightedIndex::new(probs)
        .map_err(|e| Error::Construction(format!("bad sampling distribution: {e}")))?;
    Ok((0..m)
        .map(|_| {
            let i = dist.sample(rng);
            WeightedPoint {
                position: data.row(i).to_vec(),
                weight: 1.0 / (m as f64 * probs[i]),
                source_index: i,
            }
        })
        .collect())
}

pub fn build_lightweight_coreset(data: &Dataset, m: usize, seed: u64) -> Result<Coreset> {
    let start = Instant::now();
    check_size(data, m)?;
    let q = lightweight_distribution(data);
    let mut rng = seeds::rng(seed);
    let points = importance_sample(data, &q, m, &mut rng)?;
    Ok(Coreset {
        points,
        method: CoresetMethod::Lightweight,
        regions: None,
        construct_seconds: start.elapsed().as_secs_f64(),
    })
}

/// k-means++ seeding of `m` centers, then sampling proportional to
/// `d²(x, C) / Σ d² + 1/n` (normalised).
pub fn build_d2_coreset(
    data: &Dataset,
    m: usize,
    seed: u64,
    variant: D2Variant,
) -> Result<Coreset> {
    let start = Instant::now();
    check_size(data, m)?;
    let n = data.len();
    let mut rng = seeds::rng(seed);

    let mut nearest = vec![f64::INFINITY; n];
    let mut center = rng.random_range(0..n);
    for _ in 0..m {
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(data.row(i), data.row(center)));
        }
        let total: f64 = nearest.iter().sum();
        if total <= 0.0 {
            break;
        }
        center = WeightedIndex::new(&nearest)
            .map_err(|e| Error::Construction(e.to_string()))?
            .sample(&mut rng);
    }

    let total: f64 = nearest.iter().sum();
    let sens: Vec<f64> = if total > 0.0 {
        let raw: Vec<f64> = nearest.iter().map(|d| d / total + 1.0 / n as f64).collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|s| s / z).collect()
    } else {
        vec![1.0 / n as f64; n]
    };
    let points = importance_sample(data, &sens, m, &mut rng)?;
    Ok(Coreset {
        points,
        method: match variant {
            D2Variant::BflStyle => CoresetMethod::D2BflStyle,
            D2Variant::OneshotStyle => CoresetMethod::D2OneshotStyle,
        },
        regions: None,
        construct_seconds: start.elapsed().as_secs_f64(),
    })
}

/// `m` distinct rows, each weighted `n / m`.
pub fn build_uniform_coreset(data: &Dataset, m: usize, seed: u64) -> Result<Coreset> {
    let start = Instant::now();
    check_size(data, m)?;
    let n = data.len();
    let weight = n as f64 / m as f64;
    let mut picked = index::sample(&mut seeds::rng(seed), n, m).into_vec();
    if m == n {
        picked.sort_unstable();
    }
    let points = picked
        .into_iter()
        .map(|i| WeightedPoint {
            position: data.row(i).to_vec(),
            weight,
            source_index: i,
        })
        .collect();
    Ok(Coreset {
        points,
        method: CoresetMethod::Uniform,
        regions: None,
        construct_seconds: start.elapsed().as_secs_f64(),
    })
}
