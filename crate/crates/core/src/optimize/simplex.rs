use super::{OptResult, OptimizerSpec, Recorder};
use crate::error::Result;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const MIN_DIAMETER: f64 = 1e-10;

pub(super) fn run<F>(objective: &F, dim: usize, spec: &OptimizerSpec) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let (lo, hi) = spec.bounds;
    let clamp = |x: Vec<f64>| -> Vec<f64> { x.into_iter().map(|v| v.clamp(lo, hi)).collect() };
    let mut rec = Recorder::new(objective, spec.max_evals);

    let origin = clamp(vec![0.0; dim]);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    for k in 0..=dim {
        if rec.remaining() == 0 {
            return Ok(rec.finish());
        }
        let mut x = origin.clone();
        if k > 0 {
            let j = k - 1;
            x[j] = if x[j] + 1.0 <= hi {
                x[j] + 1.0
            } else {
                x[j] - 1.0
            };
        }
        let x = clamp(x);
        let v = rec.eval(&x)?;
        simplex.push((x, v));
    }

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        clamp(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect())
    };

    while rec.remaining() > 0 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        let diameter = simplex
            .iter()
            .skip(1)
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= spec.tolerance && diameter <= MIN_DIAMETER.max(spec.tolerance) {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();

        let reflected = combine(&centroid, &worst.0, -REFLECT);
        let fr = rec.eval(&reflected)?;
        if fr < simplex[0].1 {
            if rec.remaining() == 0 {
                simplex[dim] = (reflected, fr);
                break;
            }
            let expanded = combine(&centroid, &worst.0, -EXPAND);
            let fe = rec.eval(&expanded)?;
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        if rec.remaining() == 0 {
            break;
        }
        let (toward, f_toward) = if fr < worst.1 {
            (reflected.clone(), fr)
        } else {
            (worst.0.clone(), worst.1)
        };
        let contracted = combine(&centroid, &toward, CONTRACT);
        let fc = rec.eval(&contracted)?;
        if fc < f_toward {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if rec.remaining() == 0 {
                break;
            }
            let x = combine(&best, &vertex.0, SHRINK);
            let v = rec.eval(&x)?;
            *vertex = (x, v);
        }
    }
    Ok(rec.finish())
}
