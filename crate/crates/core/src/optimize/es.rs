use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{OptResult, OptimizerSpec, Recorder};
use crate::error::Result;
use crate::seeds;

const INITIAL_STEP: f64 = 0.15;
const DIFF_STEP: f64 = 0.85;
const RESAMPLE: usize = 10;

struct Individual {
    x: Vec<f64>,
    sigma: Vec<f64>,
}

pub(super) fn run<F>(objective: &F, dim: usize, spec: &OptimizerSpec) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let (lo, hi) = spec.bounds;
    let width = hi - lo;
    let lambda = spec.population;
    let mu = (lambda / 4).max(1);
    let n = dim as f64;
    let tau = 1.0 / (2.0 * n.sqrt()).sqrt();
    let tau_global = 1.0 / (2.0 * n).sqrt();

    let mut rng = seeds::rng(spec.seed);
    let mut rec = Recorder::new(objective, spec.max_evals);

    let mut population: Vec<Individual> = (0..lambda)
        .map(|_| Individual {
            x: (0..dim).map(|_| rng.random_range(lo..=hi)).collect(),
            sigma: vec![INITIAL_STEP * width; dim],
        })
        .collect();

    let mut history: Vec<f64> = Vec::new();
    while rec.remaining() > 0 {
        population.truncate(rec.remaining());
        let xs: Vec<Vec<f64>> = population.iter().map(|ind| ind.x.clone()).collect();
        let values = rec.eval_batch(&xs)?;

        let best_now = rec.best.as_ref().map(|(_, v)| *v).unwrap_or(f64::INFINITY);
        history.push(best_now);
        if history.len() > spec.patience {
            let before = history[history.len() - 1 - spec.patience];
            if before - best_now < spec.tolerance {
                break;
            }
        }
        if rec.remaining() == 0 {
            break;
        }

        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let parents: Vec<&Individual> = order.iter().take(mu).map(|&i| &population[i]).collect();

        let mut next = Vec::with_capacity(lambda);
        for k in 0..lambda {
            let parent = parents[k % parents.len()];
            if k + 1 < parents.len() {
                // differential variation toward the best parent
                let x: Vec<f64> = (0..dim)
                    .map(|j| parent.x[j] + DIFF_STEP * (parents[0].x[j] - parents[k + 1].x[j]))
                    .collect();
                if x.iter().all(|v| (lo..=hi).contains(v)) {
                    next.push(Individual {
                        x,
                        sigma: parent.sigma.clone(),
                    });
                    continue;
                }
            }
            let global: f64 = StandardNormal.sample(&mut rng);
            let sigma: Vec<f64> = parent
                .sigma
                .iter()
                .map(|s| {
                    let local: f64 = StandardNormal.sample(&mut rng);
                    (s * (tau_global * global + tau * local).exp()).min(width)
                })
                .collect();
            let mut x = parent.x.clone();
            for (j, xj) in x.iter_mut().enumerate() {
                let mut candidate = f64::NAN;
                for _ in 0..RESAMPLE {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    candidate = parent.x[j] + sigma[j] * z;
                    if (lo..=hi).contains(&candidate) {
                        break;
                    }
                }
                *xj = candidate.clamp(lo, hi);
            }
            next.push(Individual { x, sigma });
        }
        population = next;
    }
    Ok(rec.finish())
}
