//! Bounded derivative-free minimisers for circuit parameters.
//!
//! [`OptimizerKind::EvolutionStrategy`] is an ISRES-style (μ, λ) evolution
//! strategy: without constraints stochastic ranking reduces to sorting by
//! objective, leaving self-adaptive log-normal step sizes plus differential
//! variation of the best parents.
//! [`OptimizerKind::Simplex`] is a bounded Nelder–Mead.

mod es;
mod simplex;

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::write_atomic;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    EvolutionStrategy,
    Simplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSpec {
    pub kind: OptimizerKind,
    pub max_evals: usize,
    /// Offspring per generation (ES only).
    pub population: usize,
    pub seed: u64,
    /// Closed interval applied to every parameter.
    pub bounds: (f64, f64),
    /// Minimum improvement of the best value over `patience` generations
    /// (ES), or the value spread at which the simplex counts as collapsed.
    pub tolerance: f64,
    pub patience: usize,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        OptimizerSpec {
            kind: OptimizerKind::EvolutionStrategy,
            max_evals: 2000,
            population: 20,
            seed: 0,
            bounds: (-2.0 * PI, 2.0 * PI),
            tolerance: 1e-10,
            patience: 50,
        }
    }
}

impl OptimizerSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("bad bounds [{lo}, {hi}]")));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::invalid("tolerance must be non-negative"));
        }
        if self.max_evals == 0 {
            return Err(Error::invalid("max_evals must be at least 1"));
        }
        if self.kind == OptimizerKind::EvolutionStrategy
            && (self.population < 4 || self.max_evals < self.population)
        {
            return Err(Error::invalid(format!(
                "evolution strategy needs max_evals >= population >= 4, got {} and {}",
                self.max_evals, self.population
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evals_used: usize,
    /// `(evaluation index, value)` for every evaluation, in order.
    pub trace: Vec<(usize, f64)>,
}

impl OptResult {
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("eval_index,value\n");
        for (i, v) in &self.trace {
            out.push_str(&format!("{i},{v}\n"));
        }
        write_atomic(path, out.as_bytes())
    }

    /// Best-so-far value after each checkpoint (evaluation count). Points
    /// past the end report the final best.
    pub fn best_so_far_at(&self, checkpoints: &[usize]) -> Vec<f64> {
        let mut running = Vec::with_capacity(self.trace.len());
        let mut best = f64::INFINITY;
        for &(_, v) in &self.trace {
            best = best.min(v);
            running.push(best);
        }
        checkpoints
            .iter()
            .map(|&c| {
                if c == 0 || running.is_empty() {
                    f64::INFINITY
                } else {
                    running[c.min(running.len()) - 1]
                }
            })
            .collect()
    }
}

/// Book-keeping shared by both optimizers: counts evaluations, keeps the
/// trace and rejects non-finite values.
pub(crate) struct Recorder<'a, F> {
    objective: &'a F,
    pub trace: Vec<(usize, f64)>,
    pub best: Option<(Vec<f64>, f64)>,
    pub budget: usize,
}

impl<'a, F> Recorder<'a, F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(objective: &'a F, budget: usize) -> Self {
        Recorder {
            objective,
            trace: Vec::new(),
            best: None,
            budget,
        }
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.trace.len()
    }

    fn record(&mut self, x: &[f64], v: f64) -> Result<f64> {
        if !v.is_finite() {
            return Err(Error::Optimization {
                params: x.to_vec(),
                value: v,
            });
        }
        self.trace.push((self.trace.len(), v));
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        Ok(v)
    }

    pub fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.objective)(x);
        self.record(x, v)
    }

    /// Evaluates a batch concurrently; results are recorded in batch order.
    pub fn eval_batch(&mut self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        use rayon::prelude::*;
        let f = self.objective;
        let values: Vec<f64> = xs.par_iter().map(|x| f(x)).collect();
        for (x, &v) in xs.iter().zip(&values) {
            self.record(x, v)?;
        }
        Ok(values)
    }

    pub fn finish(self) -> OptResult {
        let (best_params, best_value) = self.best.unwrap_or((Vec::new(), f64::INFINITY));
        OptResult {
            best_params,
            best_value,
            evals_used: self.trace.len(),
            trace: self.trace,
        }
    }
}

/// Minimises `objective` over the bound box. The objective must be pure: ES
/// candidates within a generation are evaluated concurrently.
pub fn minimize<F>(objective: F, dim: usize, spec: &OptimizerSpec) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    spec.validate()?;
    match spec.kind {
        OptimizerKind::EvolutionStrategy => es::run(&objective, dim, spec),
        OptimizerKind::Simplex => simplex::run(&objective, dim, spec),
    }
}

/// Best-so-far values of a [`minimize`] run at the given evaluation counts.
pub fn evaluate_budget_curve<F>(
    objective: F,
    dim: usize,
    spec: &OptimizerSpec,
    checkpoints: &[usize],
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(minimize(objective, dim, spec)?.best_so_far_at(checkpoints))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn validation() {
        let mut spec = OptimizerSpec {
            population: 3,
            ..Default::default()
        };
        assert!(spec.validate().is_err());
        spec.population = 20;
        spec.max_evals = 10;
        assert!(spec.validate().is_err());
        spec.max_evals = 100;
        spec.bounds = (1.0, -1.0);
        assert!(spec.validate().is_err());
        assert!(minimize(sphere, 0, &OptimizerSpec::default()).is_err());
    }

    #[test]
    fn non_finite_objective_reports_params() {
        let err = minimize(|_: &[f64]| f64::NAN, 2, &OptimizerSpec::default()).unwrap_err();
        match err {
            Error::Optimization { params, .. } => assert_eq!(params.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn curve_is_monotone_and_ends_at_best() {
        let spec = OptimizerSpec {
            max_evals: 600,
            seed: 5,
            ..Default::default()
        };
        let res = minimize(sphere, 3, &spec).unwrap();
        let checkpoints: Vec<usize> = (1..=12).map(|i| i * 50).collect();
        let curve = evaluate_budget_curve(sphere, 3, &spec, &checkpoints).unwrap();
        assert!(curve.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*curve.last().unwrap(), res.best_value);
    }
}
