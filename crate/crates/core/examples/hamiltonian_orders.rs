//! Compiles a coreset into Pauli-Z Hamiltonians of each Taylor order and
//! compares their ground states with the exact best partition.

use contour_kmeans::coreset::build_contour_coreset;
use contour_kmeans::dataset::{generate_uneven_blobs, BlobSpec, Ratio};
use contour_kmeans::hamiltonian::{
    approx_objective, brute_force_best_partition, build_hamiltonian, exact_objective, TaylorOrder,
};

fn main() -> contour_kmeans::Result<()> {
    let data = generate_uneven_blobs(&BlobSpec::new(750, Ratio::new(1, 2)?, 5))?;
    let cs = build_contour_coreset(&data, 3, 5)?;

    let (best, value) = brute_force_best_partition(&cs)?;
    println!(
        "exact best partition {} objective {value:.3}",
        best.to_bitstring()
    );

    for order in [TaylorOrder::Zeroth, TaylorOrder::First, TaylorOrder::Second] {
        let h = build_hamiltonian(&cs, order)?;
        let (ground, energy) = h.brute_force_ground()?;
        println!(
            "order {}: {} terms, max degree {}, ground {} energy {energy:.3}",
            order.as_u8(),
            h.len(),
            h.max_degree(),
            ground.to_bitstring()
        );
        // energies are the negated approximate objective
        let gap = energy + approx_objective(&cs, &ground, order);
        println!(
            "  identity residual {gap:.1e}, exact objective there {:.3}",
            exact_objective(&cs, &ground)
        );
    }
    Ok(())
}
