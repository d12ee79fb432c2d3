//! Terminal depolarizing noise mixes the output distribution with the
//! uniform one, so the expectation moves linearly toward the constant term.

use contour_kmeans::hamiltonian::{PartitionBits, ZPolynomial};
use contour_kmeans::quantum::{
    apply_depolarizing, expectation, measure_probs, most_probable, most_probable_counts,
    prepare_ansatz_state, sample_counts, AnsatzSpec, Entanglement, NoiseSpec,
};

fn main() -> contour_kmeans::Result<()> {
    let mut h = ZPolynomial::constant(3, 1.5);
    h.add_term(0b011, -2.0);
    h.add_term(0b110, 0.75);
    h.add_term(0b100, -0.5);

    let ansatz = AnsatzSpec {
        num_qubits: 3,
        reps: 1,
        entanglement: Entanglement::Linear,
    };
    let params = [0.3, 1.1, -0.4, 0.9, 0.2, 2.5];
    let clean = measure_probs(&prepare_ansatz_state(&ansatz, &params)?);
    let e0 = expectation(&clean, &h)?;

    for lambda in [0.0, 0.05, 0.1, 0.2, 1.0] {
        let noisy = apply_depolarizing(&clean, NoiseSpec { lambda })?;
        let e = expectation(&noisy, &h)?;
        let predicted = (1.0 - lambda) * e0 + lambda * h.constant_term();
        println!(
            "λ = {lambda:<4}  ⟨H⟩ = {e:+.6}  (1−λ)⟨H⟩₀ + λc = {predicted:+.6}  argmax {}",
            most_probable(&noisy).to_bitstring()
        );
    }

    let counts = sample_counts(&clean, 1024, 17)?;
    let top: PartitionBits = most_probable_counts(&counts);
    println!("1024 shots, most frequent {}", top.to_bitstring());
    Ok(())
}
