//! End-to-end experiment driver: coreset, Hamiltonian, solver, centroids,
//! full-data labels and agreement with classical Lloyd 2-means.

mod config;
mod experiment;
mod lloyd;

use serde::{Deserialize, Serialize};

use crate::coreset::{sq_dist, Coreset};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hamiltonian::PartitionBits;

pub use config::{
    resolve_key, AnsatzConfig, CoresetConfig, DatasetSource, ExperimentConfig, OptimizerConfig,
    OutputConfig, QaoaConfig, Solver,
};
pub use experiment::{
    legacy_best_of_n_accuracy, run_experiment, run_repeat, Aggregate, LegacyResult, RepeatRecord,
    RepeatStatus, RunResult, StageTimes, SummaryRow, ENERGY_CONVENTION,
};
pub use lloyd::{lloyd_2means, LloydResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidPair {
    /// Weighted mean of the points with bit 0.
    pub mu_minus: Vec<f64>,
    /// Weighted mean of the points with bit 1.
    pub mu_plus: Vec<f64>,
}

pub fn partition_to_centroids(cs: &Coreset, p: &PartitionBits) -> Result<CentroidPair> {
    if p.len() != cs.len() {
        return Err(Error::invalid(format!(
            "partition has {} bits for {} coreset points",
            p.len(),
            cs.len()
        )));
    }
    let d = cs.dims();
    let mut sums = [vec![0.0; d], vec![0.0; d]];
    let mut mass = [0.0; 2];
    for (i, pt) in cs.points.iter().enumerate() {
        let side = p.bit(i) as usize;
        mass[side] += pt.weight;
        for (s, x) in sums[side].iter_mut().zip(&pt.position) {
            *s += pt.weight * x;
        }
    }
    if mass[0] <= 0.0 || mass[1] <= 0.0 {
        return Err(Error::DegeneratePartition);
    }
    let [minus, plus] = sums;
    Ok(CentroidPair {
        mu_minus: minus.into_iter().map(|s| s / mass[0]).collect(),
        mu_plus: plus.into_iter().map(|s| s / mass[1]).collect(),
    })
}

/// Nearest-centroid labels; 0 for `mu_minus`, exact ties go to 0.
pub fn assign_labels(data: &Dataset, c: &CentroidPair) -> Result<Vec<u8>> {
    if c.mu_minus.len() != data.dims() || c.mu_plus.len() != data.dims() {
        return Err(Error::invalid(format!(
            "centroids have {} dims, data has {}",
            c.mu_minus.len(),
            data.dims()
        )));
    }
    Ok(data
        .rows()
        .map(|x| u8::from(sq_dist(x, &c.mu_plus) < sq_dist(x, &c.mu_minus)))
        .collect())
}

/// Fraction of points on which two binary labellings agree, maximised over
/// swapping the labels of one of them. Always in `[0.5, 1]`.
pub fn accuracy(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "label vectors differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::invalid("accuracy of empty labellings"));
    }
    if a.iter().chain(b).any(|&l| l > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    let n = a.len();
    Ok(same.max(n - same) as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreset::{CoresetMethod, WeightedPoint};

    fn cs(points: &[(f64, f64)]) -> Coreset {
        let pts = points
            .iter()
            .enumerate()
            .map(|(i, &(x, w))| WeightedPoint {
                position: vec![x],
                weight: w,
                source_index: i,
            })
            .collect();
        Coreset::from_points(pts, CoresetMethod::Contour).unwrap()
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap(), 0.75);
        assert_eq!(accuracy(&[0, 1, 1], &[1, 0, 0]).unwrap(), 1.0);
        assert!(accuracy(&[0, 1], &[0]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn centroids() {
        let c = partition_to_centroids(
            &cs(&[(0.0, 1.0), (5.0, 1.0)]),
            &PartitionBits::from_bits(&[0, 1]),
        )
        .unwrap();
        assert_eq!(c.mu_minus, vec![0.0]);
        assert_eq!(c.mu_plus, vec![5.0]);

        let c = partition_to_centroids(
            &cs(&[(0.0, 1.0), (4.0, 3.0), (9.0, 1.0)]),
            &PartitionBits::from_bits(&[0, 0, 1]),
        )
        .unwrap();
        assert_eq!(c.mu_minus, vec![3.0]);

        let doubled = partition_to_centroids(
            &cs(&[(0.0, 2.0), (4.0, 6.0), (9.0, 2.0)]),
            &PartitionBits::from_bits(&[0, 0, 1]),
        )
        .unwrap();
        assert_eq!(doubled, c);

        assert!(matches!(
            partition_to_centroids(
                &cs(&[(0.0, 1.0), (1.0, 1.0)]),
                &PartitionBits::from_bits(&[1, 1])
            ),
            Err(Error::DegeneratePartition)
        ));
    }

    #[test]
    fn labels_tie_to_zero() {
        let data = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], "t").unwrap();
        let c = CentroidPair {
            mu_minus: vec![0.0],
            mu_plus: vec![2.0],
        };
        assert_eq!(assign_labels(&data, &c).unwrap(), vec![0, 0, 1]);
    }
}
