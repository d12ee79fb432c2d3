use rand::Rng;
use serde::Serialize;

use super::{sq_dist, Coreset};
use crate::dataset::{compute_stats, Dataset};
use crate::error::{Error, Result};
use crate::seeds;

/// Distribution of `|φ_X(Q) − φ_C(Q)| / φ_X(Q)` over random center pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualitySummary {
    pub mean: f64,
    pub max: f64,
    pub trials_used: usize,
    /// Trials where the full-data cost was zero.
    pub skipped: usize,
}

fn cost<'a>(points: impl Iterator<Item = (&'a [f64], f64)>, centers: &[Vec<f64>]) -> f64 {
    points
        .map(|(x, w)| {
            w * centers
                .iter()
                .map(|c| sq_dist(x, c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Empirical check of the (ε, 2)-coreset property: samples `trials` pairs of
/// centers uniformly from the data bounding box.
pub fn coreset_relative_error(
    data: &Dataset,
    cs: &Coreset,
    trials: usize,
    seed: u64,
) -> Result<QualitySummary> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if cs.dims() != data.dims() {
        return Err(Error::invalid("coreset and dataset dimensions differ"));
    }
    let stats = compute_stats(data);
    let mut rng = seeds::rng(seed);
    let mut errors = Vec::with_capacity(trials);
    let mut skipped = 0;
    for _ in 0..trials {
        let centers: Vec<Vec<f64>> = (0..2)
            .map(|_| {
                stats
                    .dim_min
                    .iter()
                    .zip(&stats.dim_max)
                    .map(|(&lo, &hi)| {
                        if hi > lo {
                            rng.random_range(lo..=hi)
                        } else {
                            lo
                        }
                    })
                    .collect()
            })
            .collect();
        let phi_x = cost(data.rows().map(|r| (r, 1.0)), &centers);
        if phi_x == 0.0 {
            skipped += 1;
            continue;
        }
        let phi_c = cost(
            cs.points.iter().map(|p| (p.position.as_slice(), p.weight)),
            &centers,
        );
        errors.push((phi_x - phi_c).abs() / phi_x);
    }
    let used = errors.len();
    Ok(QualitySummary {
        mean: if used > 0 {
            errors.iter().sum::<f64>() / used as f64
        } else {
            f64::NAN
        },
        max: errors.iter().copied().fold(0.0, f64::max),
        trials_used: used,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreset::CoresetMethod;

    #[test]
    fn identity_coreset_has_zero_error() {
        let rows = (0..40)
            .map(|i| vec![i as f64 % 7.0, (i * i) as f64 % 5.0])
            .collect();
        let data = Dataset::from_rows(rows, "t").unwrap();
        let q = coreset_relative_error(&data, &Coreset::identity(&data), 50, 1).unwrap();
        assert_eq!(q.max, 0.0);
        assert_eq!(q.trials_used, 50);
    }

    #[test]
    fn doubling_weights_doubles_coreset_cost() {
        let rows = (0..20).map(|i| vec![i as f64]).collect();
        let data = Dataset::from_rows(rows, "t").unwrap();
        let mut cs = Coreset::identity(&data);
        for p in &mut cs.points {
            p.weight = 2.0;
        }
        cs.method = CoresetMethod::Uniform;
        // φ_C = 2 φ_X, so the relative error is exactly 1
        let q = coreset_relative_error(&data, &cs, 10, 4).unwrap();
        assert!((q.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_data_skips_trials() {
        let data = Dataset::from_rows(vec![vec![3.0]; 5], "t").unwrap();
        let q = coreset_relative_error(&data, &Coreset::identity(&data), 3, 0).unwrap();
        assert_eq!(q.skipped, 3);
        assert_eq!(q.trials_used, 0);
    }
}
