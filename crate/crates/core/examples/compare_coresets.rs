//! Empirical coreset quality of every construction on one dataset: the
//! relative k-means cost error over random pairs of centers.

use contour_kmeans::coreset::{build_coreset, coreset_relative_error, Coreset, CoresetMethod};
use contour_kmeans::dataset::{generate_uneven_blobs, BlobSpec, Ratio};

fn main() -> contour_kmeans::Result<()> {
    let data = generate_uneven_blobs(&BlobSpec::new(900, Ratio::new(4, 5)?, 1))?;

    let identity = Coreset::identity(&data);
    let q = coreset_relative_error(&data, &identity, 200, 9)?;
    println!("{:<16} max error {:.2e}", "identity", q.max);

    for method in [
        CoresetMethod::Contour,
        CoresetMethod::Lightweight,
        CoresetMethod::D2BflStyle,
        CoresetMethod::D2OneshotStyle,
        CoresetMethod::Uniform,
    ] {
        let cs = build_coreset(&data, method, 5, 3, 7)?;
        let q = coreset_relative_error(&data, &cs, 200, 9)?;
        println!(
            "{:<16} mean error {:.3}  max error {:.3}",
            method.as_str(),
            q.mean,
            q.max
        );
    }
    Ok(())
}
