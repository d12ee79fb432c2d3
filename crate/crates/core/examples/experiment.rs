//! Runs the full pipeline from a JSON configuration: dataset, coreset,
//! Hamiltonian, solver, labelling and scoring against Lloyd 2-means.
//!
//!     cargo run --release --example experiment -- solver=qaoa order=2 lambda=0.1

use contour_kmeans::pipeline::{run_experiment, ExperimentConfig};

fn main() -> contour_kmeans::Result<()> {
    let mut cfg = ExperimentConfig::from_json(
        r#"{
            "dataset": {"kind": "blobs", "n_total": 550, "ratio": "1:10"},
            "coreset": {"method": "contour", "size": 5, "regions": 3},
            "taylor_order": 1,
            "solver": "vqe",
            "repeats": 5,
            "master_seed": 100
        }"#,
    )?;
    for arg in std::env::args().skip(1) {
        cfg = cfg.with_override(&arg)?;
    }

    let result = run_experiment(&cfg)?;
    for r in &result.repeats {
        println!(
            "repeat {} seed {:>4} {:<6} accuracy {:?} partition {:?}",
            r.repeat,
            r.seed,
            format!("{:?}", r.status),
            r.accuracy,
            r.partition
        );
    }
    let a = &result.aggregate;
    println!(
        "mean accuracy {:.4} ± {:.4}, {} failed of {}",
        a.mean_accuracy, a.std_accuracy, a.failures, a.repeats
    );
    Ok(())
}
