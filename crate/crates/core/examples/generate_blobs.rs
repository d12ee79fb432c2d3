//! Generates an uneven two-cluster dataset and prints its summary statistics.
//!
//!     cargo run --example generate_blobs -- 550 1 10

use contour_kmeans::dataset::{compute_stats, generate_uneven_blobs, BlobSpec, Ratio};

fn main() -> contour_kmeans::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("arguments are integers"))
        .collect();
    let n = args.first().copied().unwrap_or(750);
    let a = args.get(1).copied().unwrap_or(1) as u32;
    let b = args.get(2).copied().unwrap_or(2) as u32;

    let spec = BlobSpec::new(n, Ratio::new(a, b)?, 42);
    let data = generate_uneven_blobs(&spec)?;
    let (minority, majority) = spec.cluster_sizes();
    let stats = compute_stats(&data);

    println!("{}: {} rows, {} dims", data.name(), data.len(), data.dims());
    println!("cluster sizes {minority} / {majority}");
    println!("mean {:?}", stats.mean);
    println!("range {:?}", stats.dim_range);
    Ok(())
}
