use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{check_capacity, ZPolynomial};

/// `2^m` complex amplitudes; basis index bit `i` is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            amplitudes,
            num_qubits,
        })
    }

    pub fn uniform(num_qubits: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let size = 1usize << num_qubits;
        let a = Complex64::new((size as f64).sqrt().recip(), 0.0);
        Ok(StateVector {
            amplitudes: vec![a; size],
            num_qubits,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a 2×2 unitary `[[a, b], [c, d]]` to qubit `q`.
    fn apply_single(&mut self, q: usize, u: [Complex64; 4]) {
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a0, a1) = (*x0, *x1);
                *x0 = u[0] * a0 + u[1] * a1;
                *x1 = u[2] * a0 + u[3] * a1;
            }
        }
    }

    pub fn ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
        self.apply_single(q, [c, -s, s, c]);
    }

    pub fn rx(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        let ms = Complex64::new(0.0, -s);
        self.apply_single(q, [c, ms, ms, c]);
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        debug_assert_ne!(control, target);
        let (cm, tm) = (1usize << control, 1usize << target);
        for b in 0..self.amplitudes.len() {
            if b & cm != 0 && b & tm == 0 {
                self.amplitudes.swap(b, b | tm);
            }
        }
    }

    /// Multiplies amplitude `b` by `exp(−i·γ·E_b)`.
    pub fn phase_by_diagonal(&mut self, diagonal: &[f64], gamma: f64) {
        for (a, e) in self.amplitudes.iter_mut().zip(diagonal) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    Linear,
    Full,
    Circular,
    Pairwise,
    Sca,
}

impl Entanglement {
    pub const ALL: [Entanglement; 5] = [
        Entanglement::Linear,
        Entanglement::Full,
        Entanglement::Circular,
        Entanglement::Pairwise,
        Entanglement::Sca,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Entanglement::Linear => "linear",
            Entanglement::Full => "full",
            Entanglement::Circular => "circular",
            Entanglement::Pairwise => "pairwise",
            Entanglement::Sca => "sca",
        }
    }
}

impl fmt::Display for Entanglement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Entanglement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Entanglement::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown entanglement {s:?}")))
    }
}

/// `(control, target)` pairs of the CNOT block in repetition `rep`.
pub fn entangler_pairs(strategy: Entanglement, m: usize, rep: usize) -> Vec<(usize, usize)> {
    let linear = || (0..m.saturating_sub(1)).map(|i| (i, i + 1));
    let circular = || {
        let mut v: Vec<_> = linear().collect();
        if m > 2 {
            v.push((m - 1, 0));
        }
        v
    };
    match strategy {
        Entanglement::Linear => linear().collect(),
        Entanglement::Circular => circular(),
        Entanglement::Full => (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .collect(),
        Entanglement::Pairwise => {
            let even = (0..m.saturating_sub(1)).step_by(2).map(|i| (i, i + 1));
            let odd = (1..m.saturating_sub(1)).step_by(2).map(|i| (i, i + 1));
            even.chain(odd).collect()
        }
        Entanglement::Sca => {
            let mut v = circular();
            if v.is_empty() {
                return v;
            }
            let shift = rep % v.len();
            v.rotate_left(shift);
            if rep % 2 == 1 {
                for p in &mut v {
                    *p = (p.1, p.0);
                }
            }
            v
        }
    }
}

/// Hardware-efficient ansatz: `reps` blocks of (RY layer, CNOT layer)
/// followed by a final RY layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub num_qubits: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
}

pub fn param_count(spec: &AnsatzSpec) -> usize {
    (spec.reps + 1) * spec.num_qubits
}

pub fn prepare_ansatz_state(spec: &AnsatzSpec, params: &[f64]) -> Result<StateVector> {
    let m = spec.num_qubits;
    if m == 0 {
        return Err(Error::invalid("ansatz needs at least one qubit"));
    }
    let expected = param_count(spec);
    if params.len() != expected {
        return Err(Error::invalid(format!(
            "ansatz takes {expected} parameters, got {}",
            params.len()
        )));
    }
    let mut state = StateVector::zero_state(m)?;
    for (layer, angles) in params.chunks_exact(m).enumerate() {
        for (q, &theta) in angles.iter().enumerate() {
            state.ry(q, theta);
        }
        if layer < spec.reps {
            for (c, t) in entangler_pairs(spec.entanglement, m, layer) {
                state.cx(c, t);
            }
        }
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaoaSpec {
    pub num_qubits: usize,
    pub layers: usize,
}

impl QaoaSpec {
    pub fn param_count(&self) -> usize {
        2 * self.layers
    }
}

/// Uniform superposition followed by `p` rounds of cost phase
/// `exp(−iγH)` and mixer `RX(2β)` on every qubit.
pub fn prepare_qaoa_state(h: &ZPolynomial, gammas: &[f64], betas: &[f64]) -> Result<StateVector> {
    let diagonal = h.diagonal()?;
    prepare_qaoa_state_with_diagonal(h.num_qubits(), &diagonal, gammas, betas)
}

pub(crate) fn prepare_qaoa_state_with_diagonal(
    m: usize,
    diagonal: &[f64],
    gammas: &[f64],
    betas: &[f64],
) -> Result<StateVector> {
    if gammas.is_empty() || gammas.len() != betas.len() {
        return Err(Error::invalid(format!(
            "QAOA needs matching non-empty angle lists, got {} gammas and {} betas",
            gammas.len(),
            betas.len()
        )));
    }
    let mut state = StateVector::uniform(m)?;
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        state.phase_by_diagonal(diagonal, gamma);
        for q in 0..m {
            state.rx(q, 2.0 * beta);
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_counts() {
        let spec = |m, reps| AnsatzSpec {
            num_qubits: m,
            reps,
            entanglement: Entanglement::Linear,
        };
        assert_eq!(param_count(&spec(5, 2)), 15);
        assert_eq!(param_count(&spec(4, 0)), 4);
        assert_eq!(param_count(&spec(1, 3)), 4);
    }

    #[test]
    fn zero_params_stay_in_ground() {
        for ent in Entanglement::ALL {
            let spec = AnsatzSpec {
                num_qubits: 4,
                reps: 3,
                entanglement: ent,
            };
            let s = prepare_ansatz_state(&spec, &vec![0.0; 16]).unwrap();
            assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_rotation_amplitudes() {
        let spec = AnsatzSpec {
            num_qubits: 1,
            reps: 0,
            entanglement: Entanglement::Linear,
        };
        let theta = 1.234;
        let s = prepare_ansatz_state(&spec, &[theta]).unwrap();
        assert!((s.amplitudes()[0].re - (theta / 2.0).cos()).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - (theta / 2.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn wrong_param_length() {
        let spec = AnsatzSpec {
            num_qubits: 3,
            reps: 1,
            entanglement: Entanglement::Full,
        };
        assert!(matches!(
            prepare_ansatz_state(&spec, &[0.0; 5]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn wiring() {
        assert_eq!(
            entangler_pairs(Entanglement::Linear, 4, 0),
            vec![(0, 1), (1, 2), (2, 3)]
        );
        assert_eq!(
            entangler_pairs(Entanglement::Circular, 4, 0),
            vec![(0, 1), (1, 2), (2, 3), (3, 0)]
        );
        assert_eq!(
            entangler_pairs(Entanglement::Full, 3, 0),
            vec![(0, 1), (0, 2), (1, 2)]
        );
        assert_eq!(
            entangler_pairs(Entanglement::Pairwise, 5, 0),
            vec![(0, 1), (2, 3), (1, 2), (3, 4)]
        );
        assert_eq!(
            entangler_pairs(Entanglement::Sca, 3, 1),
            vec![(2, 1), (0, 2), (1, 0)]
        );
        assert!(entangler_pairs(Entanglement::Sca, 1, 0).is_empty());
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let mut s = StateVector::zero_state(2).unwrap();
        s.rx(0, std::f64::consts::PI);
        s.cx(0, 1);
        assert!((s.amplitudes()[3].norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qaoa_zero_angles_uniform() {
        let h = ZPolynomial::from_terms(3, [(0b011, 1.0)]).unwrap();
        let s = prepare_qaoa_state(&h, &[0.0], &[0.0]).unwrap();
        for a in s.amplitudes() {
            assert!((a.norm_sqr() - 0.125).abs() < 1e-15);
        }
        assert!(prepare_qaoa_state(&h, &[], &[]).is_err());
        assert!(prepare_qaoa_state(&h, &[0.1, 0.2], &[0.3]).is_err());
    }
}
