//! Weighted 2-means on a coreset as a diagonal Ising problem.
//!
//! For a cut `(S₋₁, S₊₁)` of weighted points the 2-means cost is minimised by
//! maximising `W₊₁ W₋₁ ‖μ₊₁ − μ₋₁‖²`. Expanding the norm leaves the two weight
//! ratios `W₊₁/W₋₁` and `W₋₁/W₊₁`, which are replaced by Taylor polynomials
//! around the balanced point so the objective becomes a polynomial in the
//! spins `Z_i`. [`build_hamiltonian`] returns the negated polynomial,
//! constant included, so the best cut is the ground state.

mod zpoly;

use crate::coreset::Coreset;
use crate::error::{Error, Result};

pub(crate) use zpoly::argmin;
pub use zpoly::{bitstring, check_capacity, PartitionBits, TaylorOrder, ZPolynomial, MAX_QUBITS};

/// Terms smaller than this fraction of the total coefficient mass are
/// cancellation residue and get dropped.
const PRUNE_REL: f64 = 1e-13;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_len(cs: &Coreset, p: &PartitionBits) {
    assert_eq!(
        cs.len(),
        p.len(),
        "partition length must equal coreset size"
    );
}

/// `W₊₁ W₋₁ ‖μ₊₁ − μ₋₁‖²`, or 0 when one side is empty.
pub fn exact_objective(cs: &Coreset, p: &PartitionBits) -> f64 {
    check_len(cs, p);
    let d = cs.dims();
    let mut w = [0.0f64; 2];
    let mut sums = [vec![0.0; d], vec![0.0; d]];
    for (i, pt) in cs.points.iter().enumerate() {
        let side = p.bit(i) as usize;
        w[side] += pt.weight;
        for (s, x) in sums[side].iter_mut().zip(&pt.position) {
            *s += pt.weight * x;
        }
    }
    if w[0] == 0.0 || w[1] == 0.0 {
        return 0.0;
    }
    let gap: f64 = (0..d)
        .map(|j| {
            let diff = sums[1][j] / w[1] - sums[0][j] / w[0];
            diff * diff
        })
        .sum();
    w[0] * w[1] * gap
}

/// The expanded objective with the weight ratios replaced by their Taylor
/// approximation, evaluated directly from the partition.
pub fn approx_objective(cs: &Coreset, p: &PartitionBits, order: TaylorOrder) -> f64 {
    check_len(cs, p);
    let total = cs.total_weight();
    let w_minus: f64 = cs
        .points
        .iter()
        .enumerate()
        .filter(|&(i, _)| p.bit(i) == 0)
        .map(|(_, pt)| pt.weight)
        .sum();
    let w_plus = total - w_minus;
    // ratio applied inside S₋₁ approximates W₊₁/W₋₁ and vice versa
    let r_minus = order.ratio(w_minus / total);
    let r_plus = order.ratio(w_plus / total);
    let side_ratio = |i: usize| if p.bit(i) == 0 { r_minus } else { r_plus };

    let pts = &cs.points;
    let mut value = 0.0;
    for (i, a) in pts.iter().enumerate() {
        value += side_ratio(i) * a.weight * a.weight * dot(&a.position, &a.position);
        for (j, b) in pts.iter().enumerate().skip(i + 1) {
            let coeff = if p.bit(i) == p.bit(j) {
                side_ratio(i)
            } else {
                -1.0
            };
            value += 2.0 * coeff * a.weight * b.weight * dot(&a.position, &b.position);
        }
    }
    value
}

/// Builds `H` with `energy(H, p) = −approx_objective(cs, p, order)` for
/// every partition `p`.
pub fn build_hamiltonian(cs: &Coreset, order: TaylorOrder) -> Result<ZPolynomial> {
    let m = cs.len();
    if m < 2 {
        return Err(Error::invalid(
            "a Hamiltonian needs at least two coreset points",
        ));
    }
    if m > 64 {
        return Err(Error::Capacity { qubits: m, max: 64 });
    }
    let total = cs.total_weight();
    let one = ZPolynomial::constant(m, 1.0);

    // t = Σ w_l Z_l / W, so W₋₁/W = (1 + t)/2 and W₊₁/W = (1 − t)/2
    let mut t = ZPolynomial::zero(m);
    for (l, pt) in cs.points.iter().enumerate() {
        t.add_term(1 << l, pt.weight / total);
    }
    let frac_minus = &(&one + &t) * 0.5;
    let frac_plus = &(&one - &t) * 0.5;
    let r_minus = compose(order.ratio_coefficients(), &frac_minus);
    let r_plus = compose(order.ratio_coefficients(), &frac_plus);

    let in_minus: Vec<ZPolynomial> = (0..m)
        .map(|i| &(&one + &ZPolynomial::z(m, i, 1.0)) * 0.5)
        .collect();
    let in_plus: Vec<ZPolynomial> = (0..m)
        .map(|i| &(&one - &ZPolynomial::z(m, i, 1.0)) * 0.5)
        .collect();

    let mut objective = ZPolynomial::zero(m);
    for (i, a) in cs.points.iter().enumerate() {
        let self_term = a.weight * a.weight * dot(&a.position, &a.position);
        let factor = &(&in_minus[i] * &r_minus) + &(&in_plus[i] * &r_plus);
        objective = &objective + &(&factor * self_term);

        for (j, b) in cs.points.iter().enumerate().skip(i + 1) {
            let pair = 2.0 * a.weight * b.weight * dot(&a.position, &b.position);
            let both_minus = &in_minus[i] * &in_minus[j];
            let both_plus = &in_plus[i] * &in_plus[j];
            let across = &(&one - &both_minus) - &both_plus;
            let factor = &(&(&both_minus * &r_minus) + &(&both_plus * &r_plus)) - &across;
            objective = &objective + &(&factor * pair);
        }
    }
    Ok((-&objective).pruned(PRUNE_REL).with_order(order))
}

/// Horner evaluation of a polynomial (ascending coefficients) at a
/// Z-polynomial argument.
fn compose(coeffs: &[f64], x: &ZPolynomial) -> ZPolynomial {
    let m = x.num_qubits();
    coeffs.iter().rev().fold(ZPolynomial::zero(m), |acc, &c| {
        &(&acc * x) + &ZPolynomial::constant(m, c)
    })
}

/// Exhaustive argmax of [`exact_objective`] over proper cuts; ties go to the
/// lowest bitstring.
pub fn brute_force_best_partition(cs: &Coreset) -> Result<(PartitionBits, f64)> {
    let m = cs.len();
    if m < 2 {
        return Err(Error::invalid("need at least two coreset points"));
    }
    check_capacity(m)?;
    let mut best = (PartitionBits::from_index(1, m), f64::NEG_INFINITY);
    for idx in 1..(1u64 << m) - 1 {
        let p = PartitionBits::from_index(idx, m);
        let v = exact_objective(cs, &p);
        if v > best.1 {
            best = (p, v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreset::{CoresetMethod, WeightedPoint};

    fn coreset(points: &[(&[f64], f64)]) -> Coreset {
        Coreset::from_points(
            points
                .iter()
                .enumerate()
                .map(|(i, (x, w))| WeightedPoint {
                    position: x.to_vec(),
                    weight: *w,
                    source_index: i,
                })
                .collect(),
            CoresetMethod::Uniform,
        )
        .unwrap()
    }

    #[test]
    fn symmetric_pair_closed_form() {
        let cs = coreset(&[(&[-1.5, 2.0], 1.0), (&[1.5, -2.0], 1.0)]);
        let v = exact_objective(&cs, &PartitionBits::from_bits(&[0, 1]));
        // W₊W₋‖2a‖² = 4‖a‖²
        assert!((v - 4.0 * (1.5 * 1.5 + 4.0)).abs() < 1e-12);
        assert_eq!(
            exact_objective(&cs, &PartitionBits::from_bits(&[1, 1])),
            0.0
        );
    }

    #[test]
    fn order_zero_two_point_energy_gap() {
        // x₁·x₂ = 1 with unit weights: the cut loses 4·x₁·x₂ of objective
        // relative to keeping both together, so its energy is 4 higher.
        let cs = coreset(&[(&[1.0, 0.0], 1.0), (&[1.0, 1.0], 1.0)]);
        let h = build_hamiltonian(&cs, TaylorOrder::Zeroth).unwrap();
        let e00 = h.energy(&PartitionBits::from_bits(&[0, 0]));
        let e01 = h.energy(&PartitionBits::from_bits(&[0, 1]));
        assert!((e01 - e00 - 4.0).abs() < 1e-12);
        assert!(h.terms().all(|(m, _)| m == 0 || m.count_ones() == 2));
        let (ground, _) = h.brute_force_ground().unwrap();
        assert_eq!(ground.index(), 0);
    }

    #[test]
    fn order_zero_matches_equal_weight_expansion() {
        let pts: [(&[f64], f64); 4] = [
            (&[0.3, -1.0], 2.0),
            (&[1.1, 0.4], 0.5),
            (&[-2.0, 0.7], 1.5),
            (&[0.9, 2.2], 3.0),
        ];
        let cs = coreset(&pts);
        for idx in 0..16 {
            let p = PartitionBits::from_index(idx, 4);
            let mut expected = 0.0;
            for i in 0..4 {
                let (xi, wi) = pts[i];
                expected += wi * wi * dot(xi, xi);
                for j in i + 1..4 {
                    let (xj, wj) = pts[j];
                    let ij = wi * wj * dot(xi, xj);
                    expected += 2.0 * ij;
                    if p.bit(i) != p.bit(j) {
                        expected -= 4.0 * ij;
                    }
                }
            }
            let got = approx_objective(&cs, &p, TaylorOrder::Zeroth);
            assert!((got - expected).abs() < 1e-9, "{idx}: {got} vs {expected}");
        }
    }

    #[test]
    fn mask_census_by_order() {
        let cs3 = coreset(&[(&[0.2, 1.0], 1.0), (&[1.0, -0.5], 2.0), (&[-0.7, 0.3], 0.5)]);
        for order in TaylorOrder::ALL {
            let h = build_hamiltonian(&cs3, order).unwrap();
            assert!(h.terms().all(|(m, _)| m.count_ones() % 2 == 0));
            assert!(h.max_degree() <= 2);
        }
        let cs4 = coreset(&[
            (&[0.2, 1.0], 1.0),
            (&[1.0, -0.5], 2.0),
            (&[-0.7, 0.3], 0.5),
            (&[1.4, 0.9], 1.2),
        ]);
        assert_eq!(
            build_hamiltonian(&cs4, TaylorOrder::Zeroth)
                .unwrap()
                .max_degree(),
            2
        );
        assert_eq!(
            build_hamiltonian(&cs4, TaylorOrder::First)
                .unwrap()
                .max_degree(),
            2
        );
        assert_eq!(
            build_hamiltonian(&cs4, TaylorOrder::Second)
                .unwrap()
                .max_degree(),
            4
        );
    }

    #[test]
    fn outlier_is_isolated() {
        let cs = coreset(&[
            (&[0.0, 0.0], 1.0),
            (&[0.1, 0.0], 1.0),
            (&[0.0, 0.1], 1.0),
            (&[20.0, 20.0], 1.0),
        ]);
        let (p, _) = brute_force_best_partition(&cs).unwrap();
        let side = p.bit(3);
        assert!((0..3).all(|i| p.bit(i) != side));
    }

    #[test]
    fn best_partition_needs_two_points() {
        let cs = coreset(&[(&[1.0], 1.0)]);
        assert!(brute_force_best_partition(&cs).is_err());
        assert!(build_hamiltonian(&cs, TaylorOrder::First).is_err());
    }
}
