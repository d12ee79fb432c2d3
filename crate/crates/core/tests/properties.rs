use proptest::prelude::*;

use contour_kmeans::coreset::{sort_data_in_regions, Coreset, CoresetMethod, WeightedPoint};
use contour_kmeans::dataset::{read_dataset_csv, Dataset};
use contour_kmeans::hamiltonian::{
    approx_objective, build_hamiltonian, exact_objective, PartitionBits, TaylorOrder,
};
use contour_kmeans::pipeline::{accuracy, assign_labels, partition_to_centroids};
use contour_kmeans::quantum::{
    apply_depolarizing, measure_probs, prepare_ansatz_state, AnsatzSpec, Entanglement, NoiseSpec,
};

fn coreset_strategy() -> impl Strategy<Value = Coreset> {
    (2usize..=6, 1usize..=3).prop_flat_map(|(m, d)| {
        prop::collection::vec((prop::collection::vec(-5.0f64..5.0, d), 0.1f64..10.0), m).prop_map(
            |pts| {
                let points = pts
                    .into_iter()
                    .enumerate()
                    .map(|(i, (position, weight))| WeightedPoint {
                        position,
                        weight,
                        source_index: i,
                    })
                    .collect();
                Coreset::from_points(points, CoresetMethod::Uniform).unwrap()
            },
        )
    })
}

fn order_strategy() -> impl Strategy<Value = TaylorOrder> {
    prop_oneof![
        Just(TaylorOrder::Zeroth),
        Just(TaylorOrder::First),
        Just(TaylorOrder::Second)
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn energy_is_negated_objective(cs in coreset_strategy(), order in order_strategy()) {
        let h = build_hamiltonian(&cs, order).unwrap();
        for idx in 0..(1u64 << cs.len()) {
            let p = PartitionBits::from_index(idx, cs.len());
            prop_assert!(close(h.energy(&p), -approx_objective(&cs, &p, order), 1e-9));
        }
    }

    #[test]
    fn complement_has_same_energy(cs in coreset_strategy(), order in order_strategy(), seed in any::<u64>()) {
        let h = build_hamiltonian(&cs, order).unwrap();
        let p = PartitionBits::from_index(seed % (1 << cs.len()), cs.len());
        prop_assert!(close(h.energy(&p), h.energy(&p.complement()), 1e-12));
        prop_assert!(close(exact_objective(&cs, &p), exact_objective(&cs, &p.complement()), 1e-12));
    }

    #[test]
    fn exact_objective_ignores_translation(cs in coreset_strategy(), shift in -20.0f64..20.0, seed in any::<u64>()) {
        let p = PartitionBits::from_index(seed % (1 << cs.len()), cs.len());
        let moved = Coreset::from_points(
            cs.points
                .iter()
                .map(|pt| WeightedPoint {
                    position: pt.position.iter().map(|v| v + shift).collect(),
                    ..pt.clone()
                })
                .collect(),
            CoresetMethod::Uniform,
        )
        .unwrap();
        prop_assert!(close(exact_objective(&cs, &p), exact_objective(&moved, &p), 1e-8));
    }

    #[test]
    fn exact_objective_is_nonnegative(cs in coreset_strategy(), seed in any::<u64>()) {
        let p = PartitionBits::from_index(seed % (1 << cs.len()), cs.len());
        prop_assert!(exact_objective(&cs, &p) >= 0.0);
    }

    #[test]
    fn regions_ignore_translation(
        rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 4..60),
        k in 1usize..5,
        shift in prop::collection::vec(-100.0f64..100.0, 2),
    ) {
        let moved: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] + shift[0], r[1] + shift[1]]).collect();
        let a = sort_data_in_regions(&Dataset::from_rows(rows.clone(), "a").unwrap(), k).unwrap();
        let b = sort_data_in_regions(&Dataset::from_rows(moved, "b").unwrap(), k).unwrap();
        for (i, row) in rows.iter().enumerate() {
            if a.region_of[i] == b.region_of[i] {
                continue;
            }
            // rounding may only move points sitting on a shell boundary
            let t = row
                .iter()
                .zip(&a.center)
                .zip(&a.region_radii)
                .map(|((x, c), r)| (x - c).abs() / r)
                .fold(0.0, f64::max);
            prop_assert!((t - t.round()).abs() < 1e-9, "point {} at {} moved", i, t);
        }
    }

    #[test]
    fn dataset_csv_round_trip(
        rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..30),
        with_labels in any::<bool>(),
    ) {
        let labels: Vec<u8> = (0..rows.len()).map(|i| (i % 2) as u8).collect();
        let data = Dataset::from_rows(rows, "rt").unwrap().with_labels(labels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        data.write_csv(&path, with_labels).unwrap();
        let back = read_dataset_csv(&path).unwrap();
        prop_assert_eq!(back.as_flat(), data.as_flat());
        prop_assert_eq!(back.dims(), 3);
        if with_labels {
            prop_assert_eq!(back.labels(), data.labels());
        } else {
            prop_assert!(back.labels().is_none());
        }
    }

    #[test]
    fn ansatz_preserves_norm(
        m in 1usize..=6,
        reps in 0usize..=3,
        ent in prop_oneof![Just(Entanglement::Linear), Just(Entanglement::Full), Just(Entanglement::Circular)],
        seed in any::<u64>(),
    ) {
        let spec = AnsatzSpec { num_qubits: m, reps, entanglement: ent };
        let params: Vec<f64> = (0..(reps + 1) * m)
            .map(|i| ((seed.wrapping_mul(i as u64 + 7) % 1000) as f64 / 100.0) - 5.0)
            .collect();
        let state = prepare_ansatz_state(&spec, &params).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        let probs = measure_probs(&state);
        prop_assert!((probs.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_keeps_a_distribution(raw in prop::collection::vec(0.0f64..1.0, 8), lambda in 0.0f64..=1.0) {
        let total: f64 = raw.iter().sum::<f64>() + 1e-9;
        let probs: Vec<f64> = raw.iter().map(|v| (v + 1e-9 / 8.0) / total).collect();
        let d = contour_kmeans::quantum::ProbDist::new(probs).unwrap();
        let noisy = apply_depolarizing(&d, NoiseSpec { lambda }).unwrap();
        prop_assert!((noisy.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(noisy.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn accuracy_bounds_and_symmetry(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..50)) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let flipped: Vec<u8> = b.iter().map(|x| 1 - x).collect();
        let acc = accuracy(&a, &b).unwrap();
        prop_assert!((0.5..=1.0).contains(&acc));
        prop_assert_eq!(acc, accuracy(&b, &a).unwrap());
        prop_assert_eq!(acc, accuracy(&a, &flipped).unwrap());
        prop_assert_eq!(accuracy(&a, &a).unwrap(), 1.0);
    }

    // flipping the solver output swaps the centroids and leaves the score alone
    #[test]
    fn complement_partition_scores_the_same(cs in coreset_strategy(), seed in any::<u64>()) {
        let m = cs.len();
        let p = PartitionBits::from_index(1 + seed % ((1 << m) - 2), m);
        let data = cs.to_dataset().unwrap();
        let reference: Vec<u8> = (0..m).map(|i| (i % 2) as u8).collect();
        let score = |p: &PartitionBits| {
            let c = partition_to_centroids(&cs, p).unwrap();
            let labels = assign_labels(&data, &c).unwrap();
            accuracy(&labels, &reference).unwrap()
        };
        let (a, b) = (score(&p), score(&p.complement()));
        // exact ties go to label 0 on both sides, which can break the mirror
        let ties = {
            let c = partition_to_centroids(&cs, &p).unwrap();
            data.rows().any(|r| {
                let d = |q: &[f64]| r.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
                d(&c.mu_minus) == d(&c.mu_plus)
            })
        };
        prop_assume!(!ties);
        prop_assert_eq!(a, b);
    }
}
