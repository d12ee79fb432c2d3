//! Depth-5 QAOA on the same kind of Hamiltonian; the optimised expectation
//! always sits below the uniform-state value.

use contour_kmeans::coreset::build_contour_coreset;
use contour_kmeans::dataset::{generate_uneven_blobs, BlobSpec, Ratio};
use contour_kmeans::hamiltonian::{build_hamiltonian, TaylorOrder};
use contour_kmeans::optimize::{minimize, OptimizerSpec};
use contour_kmeans::quantum::{expectation, measure_probs, most_probable, prepare_qaoa_state};

fn main() -> contour_kmeans::Result<()> {
    let data = generate_uneven_blobs(&BlobSpec::new(750, Ratio::new(1, 2)?, 12))?;
    let cs = build_contour_coreset(&data, 3, 5)?;
    let h = build_hamiltonian(&cs, TaylorOrder::First)?;
    // a common scale keeps γ in a sensible range
    let scale = h.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max);
    let h = h.scaled(1.0 / scale);

    let p = 5;
    let energy = |x: &[f64]| {
        let state = prepare_qaoa_state(&h, &x[..p], &x[p..]).expect("valid angles");
        expectation(&measure_probs(&state), &h).expect("matching sizes")
    };
    let spec = OptimizerSpec {
        seed: 2,
        bounds: (-std::f64::consts::PI, std::f64::consts::PI),
        ..Default::default()
    };
    let res = minimize(energy, 2 * p, &spec)?;
    let state = prepare_qaoa_state(&h, &res.best_params[..p], &res.best_params[p..])?;

    println!("uniform expectation {:.4}", h.constant_term());
    println!("qaoa expectation    {:.4}", res.best_value);
    println!(
        "most probable       {}",
        most_probable(&measure_probs(&state)).to_bitstring()
    );
    println!(
        "ground              {}",
        h.brute_force_ground()?.0.to_bitstring()
    );
    Ok(())
}
