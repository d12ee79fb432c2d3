//! Minimises the energy of a linear-entanglement RY ansatz with the
//! evolution strategy, then reads out the most probable partition.

use contour_kmeans::coreset::build_contour_coreset;
use contour_kmeans::dataset::{generate_uneven_blobs, BlobSpec, Ratio};
use contour_kmeans::hamiltonian::{build_hamiltonian, TaylorOrder};
use contour_kmeans::optimize::{minimize, OptimizerSpec};
use contour_kmeans::quantum::{
    expectation_with_diagonal, measure_probs, most_probable, param_count, prepare_ansatz_state,
    AnsatzSpec, Entanglement,
};

fn main() -> contour_kmeans::Result<()> {
    let data = generate_uneven_blobs(&BlobSpec::new(750, Ratio::new(1, 2)?, 11))?;
    let cs = build_contour_coreset(&data, 3, 5)?;
    let h = build_hamiltonian(&cs, TaylorOrder::First)?;
    let diagonal = h.diagonal()?;

    let ansatz = AnsatzSpec {
        num_qubits: cs.len(),
        reps: 2,
        entanglement: Entanglement::Linear,
    };
    let energy = |theta: &[f64]| {
        let state = prepare_ansatz_state(&ansatz, theta).expect("parameter count checked");
        expectation_with_diagonal(&measure_probs(&state), &diagonal)
    };
    let spec = OptimizerSpec {
        seed: 4,
        ..Default::default()
    };
    let res = minimize(energy, param_count(&ansatz), &spec)?;

    let probs = measure_probs(&prepare_ansatz_state(&ansatz, &res.best_params)?);
    let found = most_probable(&probs);
    let (ground, ground_energy) = h.brute_force_ground()?;
    println!(
        "{} evaluations, best energy {:.4}",
        res.evals_used, res.best_value
    );
    println!(
        "read out {} (ground {} at {ground_energy:.4})",
        found.to_bitstring(),
        ground.to_bitstring()
    );
    Ok(())
}
