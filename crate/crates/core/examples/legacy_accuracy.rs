//! Best-of-n reporting keeps re-running until one run looks good. Its number
//! is never below the honest mean over the same seeds.

use contour_kmeans::pipeline::{legacy_best_of_n_accuracy, run_experiment, ExperimentConfig};

fn main() -> contour_kmeans::Result<()> {
    let cfg = ExperimentConfig::default()
        .with_override("method=lightweight")?
        .with_override("dataset.ratio=\"1:10\"")?
        .with_override("dataset.n_total=550")?;

    let legacy = legacy_best_of_n_accuracy(&cfg, 0.9, 10)?;
    let honest = run_experiment(&ExperimentConfig {
        repeats: legacy.iterations,
        ..cfg
    })?;
    println!(
        "best of {} runs: {:?}; mean over the same runs: {:.4}",
        legacy.iterations, legacy.accuracy, honest.aggregate.mean_accuracy
    );
    Ok(())
}
