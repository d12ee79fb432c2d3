//! Classical references: Lloyd 2-means on the full data, and weighted Lloyd
//! on the coreset whose centroids label the full data.

use contour_kmeans::coreset::build_contour_coreset;
use contour_kmeans::dataset::{generate_uneven_blobs, BlobSpec, Ratio};
use contour_kmeans::pipeline::{accuracy, assign_labels, lloyd_2means, CentroidPair};

fn main() -> contour_kmeans::Result<()> {
    let data = generate_uneven_blobs(&BlobSpec::new(750, Ratio::new(1, 2)?, 8))?;
    let full = lloyd_2means(&data, None, 10, 1)?;
    println!("full-data quantization error {:.2}", full.error);
    if let Some(truth) = data.labels() {
        println!(
            "agreement with generating labels {:.4}",
            accuracy(&full.labels, truth)?
        );
    }

    let cs = build_contour_coreset(&data, 3, 5)?;
    let on_coreset = lloyd_2means(&cs.to_dataset()?, Some(&cs.weights()), 10, 1)?;
    let [a, b] = on_coreset.centroids;
    let labels = assign_labels(
        &data,
        &CentroidPair {
            mu_minus: a,
            mu_plus: b,
        },
    )?;
    println!(
        "coreset Lloyd accuracy {:.4}",
        accuracy(&labels, &full.labels)?
    );
    Ok(())
}
