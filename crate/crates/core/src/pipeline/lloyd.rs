use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand_chacha::ChaCha8Rng;

use crate::coreset::sq_dist;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seeds;

const MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct LloydResult {
    pub labels: Vec<u8>,
    pub centroids: [Vec<f64>; 2],
    /// Weighted quantization error `Σ w · min_q ‖x − q‖²`.
    pub error: f64,
}

/// Best of `restarts` Lloyd runs with k-means++ seeding. Restart `r` uses
/// the same random stream whatever the total number of restarts.
pub fn lloyd_2means(
    data: &Dataset,
    weights: Option<&[f64]>,
    restarts: usize,
    seed: u64,
) -> Result<LloydResult> {
    let n = data.len();
    if n < 2 {
        return Err(Error::invalid("Lloyd needs at least two points"));
    }
    if restarts == 0 {
        return Err(Error::invalid("restarts must be at least 1"));
    }
    let unit;
    let w = match weights {
        Some(w) => {
            if w.len() != n || w.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(Error::invalid("weights must be positive, one per point"));
            }
            w
        }
        None => {
            unit = vec![1.0; n];
            &unit
        }
    };

    let mut best: Option<LloydResult> = None;
    for r in 0..restarts {
        let mut rng = seeds::rng(seeds::derive(seed, r as u64));
        let res = single_run(data, w, &mut rng)?;
        if best.as_ref().is_none_or(|b| res.error < b.error) {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn nearest(x: &[f64], c: &[Vec<f64>; 2]) -> (u8, f64) {
    let d0 = sq_dist(x, &c[0]);
    let d1 = sq_dist(x, &c[1]);
    if d1 < d0 {
        (1, d1)
    } else {
        (0, d0)
    }
}

fn single_run(data: &Dataset, w: &[f64], rng: &mut ChaCha8Rng) -> Result<LloydResult> {
    let n = data.len();
    let first = WeightedIndex::new(w)
        .map_err(|e| Error::invalid(e.to_string()))?
        .sample(rng);
    let d2: Vec<f64> = (0..n)
        .map(|i| w[i] * sq_dist(data.row(i), data.row(first)))
        .collect();
    let second = if d2.iter().sum::<f64>() > 0.0 {
        WeightedIndex::new(&d2)
            .map_err(|e| Error::invalid(e.to_string()))?
            .sample(rng)
    } else {
        // every point coincides with the first center
        first
    };
    let mut centroids = [data.row(first).to_vec(), data.row(second).to_vec()];
    let mut labels: Vec<u8> = vec![u8::MAX; n];

    for _ in 0..MAX_ITER {
        let mut changed = false;
        for (i, l) in labels.iter_mut().enumerate() {
            let (new, _) = nearest(data.row(i), &centroids);
            if *l != new {
                *l = new;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let d = data.dims();
        let mut sums = [vec![0.0; d], vec![0.0; d]];
        let mut mass = [0.0; 2];
        for i in 0..n {
            let c = labels[i] as usize;
            mass[c] += w[i];
            for (s, x) in sums[c].iter_mut().zip(data.row(i)) {
                *s += w[i] * x;
            }
        }
        for c in 0..2 {
            if mass[c] > 0.0 {
                centroids[c] = sums[c].iter().map(|s| s / mass[c]).collect();
            } else {
                // empty cluster: move it to the point worst served by the other
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = w[a] * sq_dist(data.row(a), &centroids[1 - c]);
                        let db = w[b] * sq_dist(data.row(b), &centroids[1 - c]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("n >= 2");
                centroids[c] = data.row(far).to_vec();
            }
        }
    }
    let error = (0..n)
        .map(|i| w[i] * nearest(data.row(i), &centroids).1)
        .sum();
    Ok(LloydResult {
        labels,
        centroids,
        error,
    })
}
