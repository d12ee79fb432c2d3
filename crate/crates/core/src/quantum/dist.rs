use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::error::{Error, Result};
use crate::hamiltonian::{bitstring, PartitionBits, ZPolynomial};
use crate::seeds;

/// Measurement probabilities over the `2^m` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    probs: Vec<f64>,
    num_qubits: usize,
}

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let size = probs.len();
        if size == 0 || !size.is_power_of_two() {
            return Err(Error::invalid("distribution length must be a power of two"));
        }
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid(
                "probabilities must be finite and non-negative",
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        Ok(ProbDist {
            num_qubits: size.trailing_zeros() as usize,
            probs,
        })
    }

    pub fn uniform(num_qubits: usize) -> Self {
        let size = 1usize << num_qubits;
        ProbDist {
            probs: vec![1.0 / size as f64; size],
            num_qubits,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// `{bitstring: probability}` with the highest qubit first; zero entries
    /// are omitted.
    pub fn to_json_map(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(b, &p)| (bitstring(b as u64, self.num_qubits), p))
            .collect()
    }
}

pub fn measure_probs(s: &StateVector) -> ProbDist {
    ProbDist {
        probs: s.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
        num_qubits: s.num_qubits(),
    }
}

/// Global depolarizing channel strength `λ`, valid in `[0, 4^n/(4^n − 1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub lambda: f64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        NoiseSpec { lambda: 0.0 }
    }

    pub fn max_lambda(num_qubits: usize) -> f64 {
        let four_n = 4f64.powi(num_qubits as i32);
        four_n / (four_n - 1.0)
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let max = Self::max_lambda(num_qubits);
        if !(self.lambda >= 0.0 && self.lambda <= max) {
            return Err(Error::invalid(format!(
                "depolarizing lambda {} outside [0, {max}] for {num_qubits} qubits",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// `p'_b = (1 − λ) p_b + λ / 2^m`, applied once to the final distribution.
pub fn apply_depolarizing(d: &ProbDist, noise: NoiseSpec) -> Result<ProbDist> {
    noise.validate(d.num_qubits)?;
    let lambda = noise.lambda;
    if lambda == 0.0 {
        return Ok(d.clone());
    }
    let mixed = lambda / d.probs.len() as f64;
    let mut probs: Vec<f64> = d
        .probs
        .iter()
        .map(|p| ((1.0 - lambda) * p + mixed).max(0.0))
        .collect();
    if lambda > 1.0 {
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
    }
    Ok(ProbDist {
        probs,
        num_qubits: d.num_qubits,
    })
}

pub fn expectation(d: &ProbDist, h: &ZPolynomial) -> Result<f64> {
    if d.num_qubits != h.num_qubits() {
        return Err(Error::invalid(format!(
            "distribution has {} qubits, Hamiltonian {}",
            d.num_qubits,
            h.num_qubits()
        )));
    }
    Ok(expectation_with_diagonal(d, &h.diagonal()?))
}

/// Expectation against a precomputed diagonal.
pub fn expectation_with_diagonal(d: &ProbDist, diagonal: &[f64]) -> f64 {
    debug_assert_eq!(d.probs.len(), diagonal.len());
    d.probs.iter().zip(diagonal).map(|(p, e)| p * e).sum()
}

/// Shot histogram, one slot per basis state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    counts: Vec<u64>,
    num_qubits: usize,
}

impl Counts {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn to_json_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(b, &c)| (bitstring(b as u64, self.num_qubits), c))
            .collect()
    }
}

pub fn sample_counts(d: &ProbDist, shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let mut cdf = Vec::with_capacity(d.probs.len());
    let mut acc = 0.0;
    for p in &d.probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = seeds::rng(seed);
    let mut counts = vec![0u64; d.probs.len()];
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let mut b = cdf.partition_point(|&c| c <= u);
        // never land on a zero-probability tail entry
        if b >= counts.len() {
            b = d.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        }
        counts[b] += 1;
    }
    Ok(Counts {
        counts,
        num_qubits: d.num_qubits,
    })
}

/// Most likely outcome; exact ties go to the lowest bitstring.
pub fn most_probable(d: &ProbDist) -> PartitionBits {
    let (b, _) = d
        .probs
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bp), (i, &p)| {
            if p > bp {
                (i, p)
            } else {
                (bi, bp)
            }
        });
    PartitionBits::from_index(b as u64, d.num_qubits)
}

pub fn most_probable_counts(c: &Counts) -> PartitionBits {
    let (b, _) =
        c.counts.iter().enumerate().fold(
            (0, 0u64),
            |(bi, bc), (i, &n)| if n > bc { (i, n) } else { (bi, bc) },
        );
    PartitionBits::from_index(b as u64, c.num_qubits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot(m: usize, b: usize) -> ProbDist {
        let mut p = vec![0.0; 1 << m];
        p[b] = 1.0;
        ProbDist::new(p).unwrap()
    }

    #[test]
    fn basis_state_measures_one_hot() {
        let s = StateVector::zero_state(3).unwrap();
        assert_eq!(measure_probs(&s), one_hot(3, 0));
        let u = measure_probs(&StateVector::uniform(2).unwrap());
        assert!(u.probs().iter().all(|&p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn depolarizing_endpoints() {
        let d = one_hot(2, 3);
        assert_eq!(
            apply_depolarizing(&d, NoiseSpec { lambda: 0.0 }).unwrap(),
            d
        );
        let full = apply_depolarizing(&d, NoiseSpec { lambda: 1.0 }).unwrap();
        assert_eq!(full.probs(), &[0.25; 4]);
        let partial = apply_depolarizing(&d, NoiseSpec { lambda: 0.3 }).unwrap();
        assert!((partial.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_range_checked() {
        let d = one_hot(1, 0);
        assert!(apply_depolarizing(&d, NoiseSpec { lambda: -0.01 }).is_err());
        assert!(apply_depolarizing(&d, NoiseSpec { lambda: 4.0 / 3.0 }).is_ok());
        assert!(apply_depolarizing(&d, NoiseSpec { lambda: 1.34 }).is_err());
        let over = apply_depolarizing(&d, NoiseSpec { lambda: 4.0 / 3.0 }).unwrap();
        assert!(over.probs().iter().all(|&p| p >= 0.0));
        assert!((over.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let h = ZPolynomial::from_terms(2, [(0, 0.5), (0b01, 2.0), (0b11, -1.0)]).unwrap();
        let d = one_hot(2, 1);
        let e = expectation(&d, &h).unwrap();
        assert!((e - h.energy(&PartitionBits::from_index(1, 2))).abs() < 1e-15);
        assert!((expectation(&ProbDist::uniform(2), &h).unwrap() - 0.5).abs() < 1e-15);
        assert!(expectation(&ProbDist::uniform(3), &h).is_err());
    }

    #[test]
    fn counts_behave() {
        let d = one_hot(3, 5);
        let c = sample_counts(&d, 1000, 1).unwrap();
        assert_eq!(c.counts()[5], 1000);
        assert_eq!(most_probable_counts(&c).index(), 5);
        let u = ProbDist::uniform(2);
        assert_eq!(
            sample_counts(&u, 50, 3).unwrap(),
            sample_counts(&u, 50, 3).unwrap()
        );
        assert!(sample_counts(&u, 0, 3).is_err());
    }

    #[test]
    fn argmax_tie_goes_low() {
        let d = ProbDist::new(vec![0.1, 0.4, 0.1, 0.4]).unwrap();
        assert_eq!(most_probable(&d).index(), 1);
        assert_eq!(most_probable(&one_hot(2, 2)).index(), 2);
    }

    #[test]
    fn json_map_is_msb_first() {
        let map = one_hot(3, 1).to_json_map();
        assert_eq!(map.keys().collect::<Vec<_>>(), vec!["001"]);
    }
}
