use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register the dense routines will allocate for.
pub const MAX_QUBITS: usize = 24;

/// Taylor order used to approximate the cluster-weight ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaylorOrder {
    Zeroth,
    First,
    Second,
}

impl TaylorOrder {
    pub const ALL: [TaylorOrder; 3] =
        [TaylorOrder::Zeroth, TaylorOrder::First, TaylorOrder::Second];

    pub fn as_u8(self) -> u8 {
        match self {
            TaylorOrder::Zeroth => 0,
            TaylorOrder::First => 1,
            TaylorOrder::Second => 2,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(TaylorOrder::Zeroth),
            1 => Ok(TaylorOrder::First),
            2 => Ok(TaylorOrder::Second),
            _ => Err(Error::invalid(format!(
                "Taylor order must be 0, 1 or 2, got {v}"
            ))),
        }
    }

    /// Approximation of `1/x − 1` around `x = 1/2`, as polynomial
    /// coefficients in ascending powers of `x`.
    pub fn ratio_coefficients(self) -> &'static [f64] {
        match self {
            TaylorOrder::Zeroth => &[1.0],
            TaylorOrder::First => &[3.0, -4.0],
            TaylorOrder::Second => &[5.0, -12.0, 8.0],
        }
    }

    /// Evaluates the approximated ratio at weight fraction `x`.
    pub fn ratio(self, x: f64) -> f64 {
        self.ratio_coefficients()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }
}

impl fmt::Display for TaylorOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl FromStr for TaylorOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" | "zeroth" => Ok(TaylorOrder::Zeroth),
            "1" | "first" => Ok(TaylorOrder::First),
            "2" | "second" => Ok(TaylorOrder::Second),
            other => Err(Error::invalid(format!("unknown Taylor order {other:?}"))),
        }
    }
}

impl Serialize for TaylorOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for TaylorOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let parsed = match &v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|x| u8::try_from(x).ok())
                .ok_or_else(|| Error::invalid(format!("bad Taylor order {v}")))
                .and_then(TaylorOrder::from_u8),
            serde_json::Value::String(s) => s.parse(),
            _ => Err(Error::invalid(format!("bad Taylor order {v}"))),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Cut of the coreset into two sides. Bit `i` is 0 when point `i` is in
/// S₋₁ (Z = +1) and 1 when it is in S₊₁ (Z = −1). As a basis index, qubit
/// `i` is bit `i` of the integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartitionBits {
    bits: u64,
    len: usize,
}

impl PartitionBits {
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        PartitionBits {
            bits: index & mask,
            len,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let index = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i));
        Self::from_index(index, bits.len())
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    /// Spin value of qubit `i`: +1 for bit 0, −1 for bit 1.
    pub fn z(&self, i: usize) -> f64 {
        1.0 - 2.0 * f64::from(self.bit(i))
    }

    pub fn complement(&self) -> Self {
        Self::from_index(!self.bits, self.len)
    }

    /// Both sides non-empty.
    pub fn is_proper_cut(&self) -> bool {
        let full = Self::from_index(u64::MAX, self.len).bits;
        self.bits != 0 && self.bits != full
    }

    /// Rendered most-significant qubit first.
    pub fn to_bitstring(&self) -> String {
        bitstring(self.bits, self.len)
    }
}

pub fn bitstring(index: u64, len: usize) -> String {
    (0..len)
        .rev()
        .map(|i| if (index >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for PartitionBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// A real linear combination of Pauli-Z products, keyed by qubit bitmask.
/// `Z_i² = 1` is applied on multiplication, so masks are canonical subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPolynomial {
    num_qubits: usize,
    terms: BTreeMap<u64, f64>,
    order: Option<TaylorOrder>,
}

impl ZPolynomial {
    pub fn zero(num_qubits: usize) -> Self {
        assert!(num_qubits <= 64);
        ZPolynomial {
            num_qubits,
            terms: BTreeMap::new(),
            order: None,
        }
    }

    pub fn constant(num_qubits: usize, c: f64) -> Self {
        let mut p = Self::zero(num_qubits);
        p.add_term(0, c);
        p
    }

    /// `c · Z_i`
    pub fn z(num_qubits: usize, i: usize, c: f64) -> Self {
        assert!(i < num_qubits);
        let mut p = Self::zero(num_qubits);
        p.add_term(1 << i, c);
        p
    }

    pub fn from_terms(
        num_qubits: usize,
        terms: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(num_qubits);
        for (mask, c) in terms {
            if num_qubits < 64 && mask >> num_qubits != 0 {
                return Err(Error::invalid(format!(
                    "mask {mask:#b} touches qubits beyond {num_qubits}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::invalid("non-finite coefficient"));
            }
            p.add_term(mask, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, mask: u64, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(mask).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&mask);
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn order(&self) -> Option<TaylorOrder> {
        self.order
    }

    pub fn with_order(mut self, order: TaylorOrder) -> Self {
        self.order = Some(order);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> f64 {
        self.terms.get(&0).copied().unwrap_or(0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&m| m == 0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero(self.num_qubits);
        for (m, c) in self.terms() {
            out.add_term(m, c * s);
        }
        out.order = self.order;
        out
    }

    /// Drops terms whose magnitude is at most `rel` times the total
    /// coefficient mass.
    pub fn pruned(mut self, rel: f64) -> Self {
        let mass: f64 = self.terms.values().map(|c| c.abs()).sum();
        let cut = rel * mass;
        self.terms.retain(|_, c| c.abs() > cut);
        self
    }

    pub fn energy(&self, p: &PartitionBits) -> f64 {
        assert_eq!(p.len(), self.num_qubits, "partition length mismatch");
        self.terms()
            .map(|(m, c)| {
                if (m & p.index()).count_ones() % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .sum()
    }

    /// Energies of every basis state, via a Walsh–Hadamard transform of the
    /// coefficient table.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        check_capacity(self.num_qubits)?;
        let size = 1usize << self.num_qubits;
        let mut v = vec![0.0; size];
        for (m, c) in self.terms() {
            v[m as usize] += c;
        }
        let mut h = 1;
        while h < size {
            for block in v.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            }
            h *= 2;
        }
        Ok(v)
    }

    /// Exhaustive minimum; ties go to the lowest basis index.
    pub fn brute_force_ground(&self) -> Result<(PartitionBits, f64)> {
        let diag = self.diagonal()?;
        let (idx, e) = argmin(&diag);
        Ok((PartitionBits::from_index(idx as u64, self.num_qubits), e))
    }
}

pub(crate) fn argmin(values: &[f64]) -> (usize, f64) {
    values.iter().enumerate().fold(
        (0, f64::INFINITY),
        |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
    )
}

pub fn check_capacity(qubits: usize) -> Result<()> {
    if qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl Add for &ZPolynomial {
    type Output = ZPolynomial;

    fn add(self, rhs: &ZPolynomial) -> ZPolynomial {
        assert_eq!(self.num_qubits, rhs.num_qubits);
        let mut out = self.clone();
        out.order = None;
        for (m, c) in rhs.terms() {
            out.add_term(m, c);
        }
        out
    }
}

impl Sub for &ZPolynomial {
    type Output = ZPolynomial;

    fn sub(self, rhs: &ZPolynomial) -> ZPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &ZPolynomial {
    type Output = ZPolynomial;

    fn neg(self) -> ZPolynomial {
        self.scaled(-1.0)
    }
}

impl Mul for &ZPolynomial {
    type Output = ZPolynomial;

    fn mul(self, rhs: &ZPolynomial) -> ZPolynomial {
        assert_eq!(self.num_qubits, rhs.num_qubits);
        let mut out = ZPolynomial::zero(self.num_qubits);
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                out.add_term(ma ^ mb, ca * cb);
            }
        }
        out
    }
}

impl Mul<f64> for &ZPolynomial {
    type Output = ZPolynomial;

    fn mul(self, rhs: f64) -> ZPolynomial {
        self.scaled(rhs)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    mask_bits: Vec<usize>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyDoc {
    num_qubits: usize,
    order: Option<TaylorOrder>,
    terms: Vec<TermDoc>,
}

impl ZPolynomial {
    /// `{num_qubits, order, terms: [{mask_bits, coeff}]}` with sorted qubit
    /// index lists.
    pub fn to_json(&self) -> Result<String> {
        let doc = PolyDoc {
            num_qubits: self.num_qubits,
            order: self.order,
            terms: self
                .terms()
                .map(|(m, coeff)| TermDoc {
                    mask_bits: (0..64).filter(|i| (m >> i) & 1 == 1).collect(),
                    coeff,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PolyDoc = serde_json::from_str(s)?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let mut mask = 0u64;
            for q in t.mask_bits {
                if q >= doc.num_qubits {
                    return Err(Error::invalid(format!(
                        "qubit {q} out of range for {} qubits",
                        doc.num_qubits
                    )));
                }
                if mask & (1 << q) != 0 {
                    return Err(Error::invalid(format!("qubit {q} repeated in a term")));
                }
                mask |= 1 << q;
            }
            terms.push((mask, t.coeff));
        }
        let mut p = Self::from_terms(doc.num_qubits, terms)?;
        p.order = doc.order;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_energy_everywhere() {
        let h = ZPolynomial::constant(3, 2.5);
        for b in 0..8 {
            assert_eq!(h.energy(&PartitionBits::from_index(b, 3)), 2.5);
        }
        assert_eq!(
            ZPolynomial::constant(1, 1.5).diagonal().unwrap(),
            vec![1.5, 1.5]
        );
    }

    #[test]
    fn pair_term_sign() {
        let h = ZPolynomial::from_terms(2, [(0b11, 1.75)]).unwrap();
        assert_eq!(h.energy(&PartitionBits::from_bits(&[0, 0])), 1.75);
        assert_eq!(h.energy(&PartitionBits::from_bits(&[0, 1])), -1.75);
    }

    #[test]
    fn z_squared_is_identity() {
        let z0 = ZPolynomial::z(2, 0, 1.0);
        let sq = &z0 * &z0;
        assert!(sq.is_constant());
        assert_eq!(sq.constant_term(), 1.0);
    }

    #[test]
    fn diagonal_trace_is_scaled_constant() {
        let h = ZPolynomial::from_terms(3, [(0, 0.7), (0b101, -2.0), (0b010, 3.0)]).unwrap();
        let s: f64 = h.diagonal().unwrap().iter().sum();
        assert!((s - 8.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn ground_ties_take_lowest_index() {
        let h = ZPolynomial::from_terms(2, [(0b11, 1.0)]).unwrap();
        let (p, e) = h.brute_force_ground().unwrap();
        assert_eq!(p.index(), 1);
        assert_eq!(e, -1.0);
    }

    #[test]
    fn shift_does_not_move_ground() {
        let h = ZPolynomial::from_terms(3, [(0b011, 0.3), (0b110, -1.2), (0b101, 0.4)]).unwrap();
        let shifted = &h + &ZPolynomial::constant(3, 10.0);
        let (p1, e1) = h.brute_force_ground().unwrap();
        let (p2, e2) = shifted.brute_force_ground().unwrap();
        assert_eq!(p1, p2);
        assert!((e2 - e1 - 10.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(
            ZPolynomial::zero(25).diagonal(),
            Err(Error::Capacity { qubits: 25, .. })
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let h = ZPolynomial::from_terms(4, [(0, -1.0), (0b1001, 0.25), (0b0110, 3.0)])
            .unwrap()
            .with_order(TaylorOrder::First);
        let back = ZPolynomial::from_json(&h.to_json().unwrap()).unwrap();
        assert_eq!(back, h);
        assert!(ZPolynomial::from_json(
            r#"{"num_qubits":2,"order":null,"terms":[{"mask_bits":[3],"coeff":1.0}]}"#
        )
        .is_err());
        assert!(
            ZPolynomial::from_json(r#"{"num_qubits":2,"order":1,"terms":[],"extra":1}"#).is_err()
        );
    }

    #[test]
    fn partition_helpers() {
        let p = PartitionBits::from_bits(&[1, 0, 1]);
        assert_eq!(p.index(), 0b101);
        assert_eq!(p.to_bitstring(), "101");
        assert_eq!(p.complement().index(), 0b010);
        assert!(p.is_proper_cut());
        assert!(!PartitionBits::from_index(0b111, 3).is_proper_cut());
        assert_eq!(PartitionBits::from_bits(&[1, 0, 0]).to_bitstring(), "001");
    }

    #[test]
    fn ratio_values_at_expansion_point() {
        for o in TaylorOrder::ALL {
            assert!((o.ratio(0.5) - 1.0).abs() < 1e-15);
        }
        assert_eq!(TaylorOrder::First.ratio(0.25), 2.0);
        assert_eq!(TaylorOrder::Second.ratio(0.25), 0.5 - 3.0 + 5.0);
    }
}
