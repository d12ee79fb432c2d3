use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accuracy, assign_labels, lloyd_2means, partition_to_centroids};
use super::{DatasetSource, ExperimentConfig, Solver};
use crate::coreset::build_coreset;
use crate::dataset::{generate_uneven_blobs, load_csv, Dataset, FeatureColumns};
use crate::error::{Error, Result};
use crate::hamiltonian::{argmin, build_hamiltonian, PartitionBits};
use crate::optimize::minimize;
use crate::quantum::{
    apply_depolarizing, expectation_with_diagonal, measure_probs, most_probable,
    most_probable_counts, param_count, prepare_ansatz_state, prepare_qaoa_state_with_diagonal,
    sample_counts, AnsatzSpec, ProbDist,
};
use crate::seeds;

pub const ENERGY_CONVENTION: &str =
    "energies are the Hamiltonian H = -approx_objective; lower is better, the ground state maximises the objective";

const TAG_CORESET: u64 = 1;
const TAG_OPTIMIZER: u64 = 2;
const TAG_SHOTS: u64 = 3;
const TAG_GROUND_TRUTH: u64 = 4;
const TAG_CLASSICAL: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeatStatus {
    Ok,
    Failed,
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub dataset: f64,
    pub ground_truth: f64,
    pub coreset: f64,
    pub hamiltonian: f64,
    pub solve: f64,
    pub labelling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub repeat: usize,
    pub seed: u64,
    pub status: RepeatStatus,
    pub failure: Option<String>,
    pub accuracy: Option<f64>,
    /// Optimised expectation for vqe/qaoa, otherwise the energy of the
    /// returned partition.
    pub solver_energy: Option<f64>,
    pub partition_energy: Option<f64>,
    pub ground_energy: Option<f64>,
    /// `solver_energy − ground_energy`, never negative beyond rounding.
    pub ground_gap: Option<f64>,
    /// MSB-first; bit `i` is coreset point `i`.
    pub partition: Option<String>,
    pub evals_used: usize,
    pub times: StageTimes,
}

impl RepeatRecord {
    fn failed(repeat: usize, seed: u64, reason: String, times: StageTimes) -> Self {
        RepeatRecord {
            repeat,
            seed,
            status: RepeatStatus::Failed,
            failure: Some(reason),
            accuracy: None,
            solver_energy: None,
            partition_energy: None,
            ground_energy: None,
            ground_gap: None,
            partition: None,
            evals_used: 0,
            times,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == RepeatStatus::Ok
    }
}

/// Aggregates over successful repeats. Standard deviations are population
/// (divide by the count); everything is NaN when no repeat succeeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub repeats: usize,
    pub successes: usize,
    pub failures: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_ground_gap: f64,
    pub mean_coreset_seconds: f64,
    pub mean_solve_seconds: f64,
}

impl Aggregate {
    fn from_records(records: &[RepeatRecord]) -> Self {
        let ok: Vec<&RepeatRecord> = records.iter().filter(|r| r.is_ok()).collect();
        let mean = |f: &dyn Fn(&RepeatRecord) -> f64| -> f64 {
            if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
            }
        };
        let mean_accuracy = mean(&|r| r.accuracy.unwrap_or(f64::NAN));
        let std_accuracy =
            mean(&|r| (r.accuracy.unwrap_or(f64::NAN) - mean_accuracy).powi(2)).sqrt();
        Aggregate {
            repeats: records.len(),
            successes: ok.len(),
            failures: records.len() - ok.len(),
            mean_accuracy,
            std_accuracy,
            mean_ground_gap: mean(&|r| r.ground_gap.unwrap_or(f64::NAN)),
            mean_coreset_seconds: mean(&|r| r.times.coreset),
            mean_solve_seconds: mean(&|r| r.times.solve),
        }
    }
}

/// One aggregate row for tabulating many configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub config_id: String,
    pub dataset: String,
    pub method: String,
    pub order: u8,
    pub solver: String,
    pub lambda: f64,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_ground_gap: f64,
    pub coreset_seconds: f64,
    pub solve_seconds: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Fully resolved configuration; enough to reproduce the run.
    pub config: ExperimentConfig,
    pub energy_convention: String,
    pub repeats: Vec<RepeatRecord>,
    pub aggregate: Aggregate,
}

impl RunResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn summary_row(&self, config_id: impl Into<String>) -> SummaryRow {
        let c = &self.config;
        SummaryRow {
            config_id: config_id.into(),
            dataset: c.dataset.label(),
            method: c.coreset.method.as_str().to_owned(),
            order: c.taylor_order.as_u8(),
            solver: c.solver.as_str().to_owned(),
            lambda: c.noise.lambda,
            mean_accuracy: self.aggregate.mean_accuracy,
            std_accuracy: self.aggregate.std_accuracy,
            mean_ground_gap: self.aggregate.mean_ground_gap,
            coreset_seconds: self.aggregate.mean_coreset_seconds,
            solve_seconds: self.aggregate.mean_solve_seconds,
            failures: self.aggregate.failures,
        }
    }

    /// Copy with every wall-clock field zeroed, for determinism checks.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.repeats {
            r.times = StageTimes::default();
        }
        out.aggregate.mean_coreset_seconds = 0.0;
        out.aggregate.mean_solve_seconds = 0.0;
        out
    }
}

fn load_dataset(cfg: &ExperimentConfig, seed: u64) -> Result<Dataset> {
    let data = match &cfg.dataset {
        DatasetSource::Blobs { .. } => {
            generate_uneven_blobs(&cfg.dataset.blob_spec(seed).expect("blob source"))?
        }
        DatasetSource::Csv {
            path,
            feature_columns,
            has_header,
        } => {
            let cols = match feature_columns {
                Some(c) => FeatureColumns::Indices(c.clone()),
                None => FeatureColumns::All,
            };
            load_csv(path, &cols, *has_header)?
        }
    };
    Ok(if cfg.normalize {
        data.normalized()
    } else {
        data
    })
}

struct Solution {
    partition: PartitionBits,
    solver_energy: f64,
    evals_used: usize,
}

fn final_readout(cfg: &ExperimentConfig, dist: ProbDist, seed: u64) -> Result<PartitionBits> {
    let noisy = apply_depolarizing(&dist, cfg.noise)?;
    if cfg.shots > 0 {
        let counts = sample_counts(&noisy, cfg.shots, seeds::derive(seed, TAG_SHOTS))?;
        Ok(most_probable_counts(&counts))
    } else {
        Ok(most_probable(&noisy))
    }
}

fn solve(
    cfg: &ExperimentConfig,
    cs: &crate::coreset::Coreset,
    diagonal: &[f64],
    ground: (usize, f64),
    seed: u64,
) -> Result<Solution> {
    let m = cs.len();
    let spec = cfg.optimizer.with_seed(seeds::derive(seed, TAG_OPTIMIZER));
    match cfg.solver {
        Solver::Vqe => {
            let ansatz = AnsatzSpec {
                num_qubits: m,
                reps: cfg.ansatz.reps,
                entanglement: cfg.ansatz.entanglement,
            };
            let dist_at = |theta: &[f64]| -> Result<ProbDist> {
                apply_depolarizing(
                    &measure_probs(&prepare_ansatz_state(&ansatz, theta)?),
                    cfg.noise,
                )
            };
            let res = minimize(
                |theta: &[f64]| {
                    dist_at(theta)
                        .map(|d| expectation_with_diagonal(&d, diagonal))
                        .unwrap_or(f64::NAN)
                },
                param_count(&ansatz),
                &spec,
            )?;
            let dist = measure_probs(&prepare_ansatz_state(&ansatz, &res.best_params)?);
            Ok(Solution {
                partition: final_readout(cfg, dist, seed)?,
                solver_energy: res.best_value,
                evals_used: res.evals_used,
            })
        }
        Solver::Qaoa => {
            let p = cfg.qaoa.layers;
            let dist_at = |x: &[f64]| -> Result<ProbDist> {
                let state = prepare_qaoa_state_with_diagonal(m, diagonal, &x[..p], &x[p..])?;
                apply_depolarizing(&measure_probs(&state), cfg.noise)
            };
            let res = minimize(
                |x: &[f64]| {
                    dist_at(x)
                        .map(|d| expectation_with_diagonal(&d, diagonal))
                        .unwrap_or(f64::NAN)
                },
                2 * p,
                &spec,
            )?;
            let x = &res.best_params;
            let dist = measure_probs(&prepare_qaoa_state_with_diagonal(
                m,
                diagonal,
                &x[..p],
                &x[p..],
            )?);
            Ok(Solution {
                partition: final_readout(cfg, dist, seed)?,
                solver_energy: res.best_value,
                evals_used: res.evals_used,
            })
        }
        Solver::BruteForce => Ok(Solution {
            partition: PartitionBits::from_index(ground.0 as u64, m),
            solver_energy: ground.1,
            evals_used: 0,
        }),
        Solver::ClassicalOnCoreset => {
            let points = cs.to_dataset()?;
            let weights = cs.weights();
            let fit = lloyd_2means(
                &points,
                Some(&weights),
                cfg.ground_truth_restarts,
                seeds::derive(seed, TAG_CLASSICAL),
            )?;
            let partition = PartitionBits::from_bits(&fit.labels);
            Ok(Solution {
                solver_energy: diagonal[partition.index() as usize],
                partition,
                evals_used: 0,
            })
        }
    }
}

/// Runs repeat `r` of `cfg` with seed `master_seed + r`. Degenerate
/// partitions and coreset construction failures are returned as failed
/// records; other errors abort.
pub fn run_repeat(cfg: &ExperimentConfig, r: usize) -> Result<RepeatRecord> {
    let seed = cfg.master_seed.wrapping_add(r as u64);
    let mut times = StageTimes::default();

    let t = Instant::now();
    let data = load_dataset(cfg, seed)?;
    times.dataset = t.elapsed().as_secs_f64();
    if data.len() < cfg.coreset.size {
        return Err(Error::Config(format!(
            "dataset has {} points, fewer than coreset.size {}",
            data.len(),
            cfg.coreset.size
        )));
    }

    let t = Instant::now();
    let truth = lloyd_2means(
        &data,
        None,
        cfg.ground_truth_restarts,
        seeds::derive(seed, TAG_GROUND_TRUTH),
    )?;
    times.ground_truth = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let built = build_coreset(
        &data,
        cfg.coreset.method,
        cfg.coreset.size,
        cfg.coreset.regions,
        seeds::derive(seed, TAG_CORESET),
    );
    times.coreset = t.elapsed().as_secs_f64();
    let cs = match built {
        Ok(cs) => cs,
        Err(e @ Error::Construction(_)) => {
            return Ok(RepeatRecord::failed(r, seed, e.to_string(), times))
        }
        Err(e) => return Err(e),
    };

    let t = Instant::now();
    let h = build_hamiltonian(&cs, cfg.taylor_order)?;
    let diagonal = h.diagonal()?;
    let ground = argmin(&diagonal);
    times.hamiltonian = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let sol = solve(cfg, &cs, &diagonal, ground, seed);
    times.solve = t.elapsed().as_secs_f64();
    let sol = match sol {
        Ok(s) => s,
        Err(e @ Error::Optimization { .. }) => {
            return Ok(RepeatRecord::failed(r, seed, e.to_string(), times))
        }
        Err(e) => return Err(e),
    };

    let partition_energy = diagonal[sol.partition.index() as usize];
    let mut record = RepeatRecord {
        repeat: r,
        seed,
        status: RepeatStatus::Ok,
        failure: None,
        accuracy: None,
        solver_energy: Some(sol.solver_energy),
        partition_energy: Some(partition_energy),
        ground_energy: Some(ground.1),
        ground_gap: Some(sol.solver_energy - ground.1),
        partition: Some(sol.partition.to_bitstring()),
        evals_used: sol.evals_used,
        times,
    };

    let t = Instant::now();
    let centroids = match partition_to_centroids(&cs, &sol.partition) {
        Ok(c) => c,
        Err(Error::DegeneratePartition) => {
            record.status = RepeatStatus::Failed;
            record.failure = Some(Error::DegeneratePartition.to_string());
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    let labels = assign_labels(&data, &centroids)?;
    record.accuracy = Some(accuracy(&labels, &truth.labels)?);
    record.times.labelling = t.elapsed().as_secs_f64();
    Ok(record)
}

/// Runs every repeat (in parallel) and aggregates. Failed repeats are
/// reported, never retried.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult> {
    cfg.validate()?;
    let repeats = (0..cfg.repeats)
        .into_par_iter()
        .map(|r| run_repeat(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunResult {
        config: cfg.clone(),
        energy_convention: ENERGY_CONVENTION.to_owned(),
        aggregate: Aggregate::from_records(&repeats),
        repeats,
    })
}

/// Outcome of the best-of-n protocol. The value is optimistically biased.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegacyResult {
    /// Running maximum; `None` if every iteration failed.
    pub accuracy: Option<f64>,
    /// Pipeline runs consumed; iteration `i` uses the seed of repeat `i`.
    pub iterations: usize,
    pub biased: bool,
}

/// Re-runs the pipeline keeping the best accuracy, stopping once it
/// exceeds `threshold` or after `max_iter` runs.
pub fn legacy_best_of_n_accuracy(
    cfg: &ExperimentConfig,
    threshold: f64,
    max_iter: usize,
) -> Result<LegacyResult> {
    if !(threshold >= 0.0) {
        return Err(Error::invalid(format!(
            "threshold must be non-negative, got {threshold}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    cfg.validate()?;
    let mut best: Option<f64> = None;
    let mut iterations = 0;
    while iterations < max_iter {
        let rec = run_repeat(cfg, iterations)?;
        iterations += 1;
        if let Some(a) = rec.accuracy {
            best = Some(best.map_or(a, |b| b.max(a)));
        }
        if best.is_some_and(|b| b > threshold) {
            break;
        }
    }
    Ok(LegacyResult {
        accuracy: best,
        iterations,
        biased: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreset::CoresetMethod;

    fn quick(solver: Solver) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            solver,
            repeats: 3,
            ..Default::default()
        };
        cfg.dataset = DatasetSource::blobs(120, crate::dataset::Ratio { a: 1, b: 2 });
        cfg.optimizer.max_evals = 200;
        cfg
    }

    #[test]
    fn brute_force_has_zero_gap() {
        let res = run_experiment(&quick(Solver::BruteForce)).unwrap();
        assert_eq!(res.aggregate.repeats, 3);
        assert_eq!(res.aggregate.mean_ground_gap, 0.0);
        assert!(res.aggregate.mean_accuracy >= 0.9);
    }

    #[test]
    fn seeded_runs_repeat_exactly() {
        let cfg = quick(Solver::Vqe);
        let a = run_experiment(&cfg).unwrap().without_timings();
        let b = run_experiment(&cfg).unwrap().without_timings();
        assert_eq!(a, b);
        for r in &a.repeats {
            assert!(r.ground_gap.unwrap() >= -1e-9);
        }
    }

    #[test]
    fn classical_on_full_dataset_matches_truth() {
        let mut cfg = quick(Solver::ClassicalOnCoreset);
        cfg.dataset = DatasetSource::blobs(16, crate::dataset::Ratio { a: 1, b: 1 });
        cfg.coreset.method = CoresetMethod::Uniform;
        cfg.coreset.size = 16;
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.aggregate.mean_accuracy, 1.0);
    }

    #[test]
    fn legacy_stops() {
        let cfg = quick(Solver::BruteForce);
        let once = legacy_best_of_n_accuracy(&cfg, 0.0, 5).unwrap();
        assert_eq!(once.iterations, 1);
        assert_eq!(once.accuracy, run_repeat(&cfg, 0).unwrap().accuracy);
        let all = legacy_best_of_n_accuracy(&cfg, 1.0, 3).unwrap();
        assert_eq!(all.iterations, 3);
        assert!(all.biased);
    }
}
