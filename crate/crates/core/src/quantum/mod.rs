//! Dense statevector simulation of the two variational circuits, plus
//! probability-space helpers: terminal depolarizing noise, diagonal
//! expectations and shot sampling.

mod circuits;
mod dist;

pub(crate) use circuits::prepare_qaoa_state_with_diagonal;
pub use circuits::{
    entangler_pairs, param_count, prepare_ansatz_state, prepare_qaoa_state, AnsatzSpec,
    Entanglement, QaoaSpec, StateVector,
};
pub use dist::{
    apply_depolarizing, expectation, expectation_with_diagonal, measure_probs, most_probable,
    most_probable_counts, sample_counts, Counts, NoiseSpec, ProbDist,
};
