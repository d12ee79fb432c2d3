//! Builds a Contour coreset and shows how the data splits into regions.

use contour_kmeans::coreset::{build_contour_coreset, plan_region_counts, sort_data_in_regions};
use contour_kmeans::dataset::{generate_uneven_blobs, BlobSpec, Ratio};

fn main() -> contour_kmeans::Result<()> {
    let data = generate_uneven_blobs(&BlobSpec::new(550, Ratio::new(1, 10)?, 3))?;
    let (k, m) = (3, 5);

    let regions = sort_data_in_regions(&data, k)?;
    let plan = plan_region_counts(&regions, m)?;
    println!("region sizes (inner to outer): {:?}", regions.counts());
    println!("plan: {plan:?}");

    let cs = build_contour_coreset(&data, k, m)?;
    for p in &cs.points {
        println!(
            "row {:>4}  weight {:>9.3}  at {:?}",
            p.source_index, p.weight, p.position
        );
    }
    // no randomness: a second build is identical
    assert_eq!(cs.points, build_contour_coreset(&data, k, m)?.points);
    Ok(())
}
