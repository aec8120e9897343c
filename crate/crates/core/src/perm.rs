//! Permutations of qubit labels.
//!
//! A [`QubitPermutation`] moves the content of qubit `j` to qubit `image(j)`.
//! With that convention the leftward row cycle `(n, n-1, ..., 1)` multiplies
//! `Σ_j x^{j-1} |(j)_n⟩` by `x = e^{2πi/n}`, which is the phase the encoding
//! relies on.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::state::{BasisState, SparseState};

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct QubitPermutation {
    // 0-based images
    image: Vec<usize>,
}

impl QubitPermutation {
    pub fn identity(n: usize) -> Self {
        QubitPermutation {
            image: (0..n).collect(),
        }
    }

    /// From a 1-based image array: qubit `j` goes to `image[j - 1]`.
    pub fn from_image(image: &[usize]) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &t in image {
            if t == 0 || t > n {
                return Err(Error::LabelOutOfRange { label: t, n });
            }
            if std::mem::replace(&mut seen[t - 1], true) {
                return Err(Error::DuplicateLabel(t));
            }
            out.push(t - 1);
        }
        Ok(QubitPermutation { image: out })
    }

    /// Builds a permutation from disjoint 1-based cycles; `(a, b, c)` sends
    /// `a → b → c → a`.
    pub fn from_cycles<C: AsRef<[usize]>>(n: usize, cycles: &[C]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            let cycle = cycle.as_ref();
            for &l in cycle {
                if l == 0 || l > n {
                    return Err(Error::LabelOutOfRange { label: l, n });
                }
                if std::mem::replace(&mut used[l - 1], true) {
                    return Err(Error::DuplicateLabel(l));
                }
            }
            for (i, &l) in cycle.iter().enumerate() {
                image[l - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Ok(QubitPermutation { image })
    }

    /// Parses cycle notation such as `(1,6)(2,5)` or `()`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| Error::Invalid(format!("malformed cycle notation {text:?}")))?;
            let labels = body
                .0
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|e| Error::Invalid(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if !labels.is_empty() {
                cycles.push(labels);
            }
            rest = body.1.trim_start();
        }
        Self::from_cycles(n, &cycles)
    }

    pub fn num_qubits(&self) -> usize {
        self.image.len()
    }

    /// 1-based destination of 1-based qubit `j`.
    pub fn image(&self, j: usize) -> usize {
        self.image[j - 1] + 1
    }

    /// Nontrivial cycles, 1-based, each starting at its smallest label.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.all_cycles().into_iter().filter(|c| c.len() > 1).collect()
    }

    /// Every cycle including fixed points, 1-based.
    pub fn all_cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for start in 0..self.image.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.image[j];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.all_cycles().iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &QubitPermutation) -> Result<QubitPermutation> {
        self.check_size(other.num_qubits())?;
        Ok(QubitPermutation {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        })
    }

    pub fn inverse(&self) -> QubitPermutation {
        let mut inv = vec![0; self.image.len()];
        for (j, &t) in self.image.iter().enumerate() {
            inv[t] = j;
        }
        QubitPermutation { image: inv }
    }

    pub fn power(&self, k: i64) -> QubitPermutation {
        let n = self.image.len();
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = QubitPermutation::identity(n);
        for _ in 0..k.unsigned_abs() {
            out = base.compose(&out).expect("same size");
        }
        out
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.all_cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn is_involution(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &t)| self.image[t] == i)
    }

    /// `self` on the first qubits, `other` on the following ones.
    pub fn tensor(&self, other: &QubitPermutation) -> QubitPermutation {
        let n = self.image.len();
        let mut image = self.image.clone();
        image.extend(other.image.iter().map(|&t| t + n));
        QubitPermutation { image }
    }

    /// Acts as `self` on qubits `offset + 1 ..= offset + self.n` of an
    /// `total`-qubit system and fixes the rest.
    pub fn embed(&self, total: usize, offset: usize) -> Result<QubitPermutation> {
        if offset + self.image.len() > total {
            return Err(Error::LabelOutOfRange {
                label: offset + self.image.len(),
                n: total,
            });
        }
        let mut image: Vec<usize> = (0..total).collect();
        for (j, &t) in self.image.iter().enumerate() {
            image[offset + j] = offset + t;
        }
        Ok(QubitPermutation { image })
    }

    /// `σ ∘ self ∘ σ⁻¹`, the same permutation on relabeled qubits.
    pub fn conjugate_by(&self, sigma: &QubitPermutation) -> Result<QubitPermutation> {
        sigma.compose(self)?.compose(&sigma.inverse())
    }

    pub fn apply_basis(&self, key: &BasisState) -> BasisState {
        let mut out = BasisState::vacuum(self.image.len());
        for q in key.ones() {
            out.set(self.image[q], true);
        }
        out
    }

    pub fn apply(&self, state: &SparseState) -> Result<SparseState> {
        self.check_size(state.num_qubits())?;
        Ok(state.map_terms(|k, a, out| out.push((self.apply_basis(k), a))))
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n != self.image.len() {
            return Err(Error::QubitCountMismatch {
                left: self.image.len(),
                right: n,
            });
        }
        Ok(())
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Display for QubitPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let labels: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", labels.join(","))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PermRepr {
    n: usize,
    cycles: Vec<Vec<usize>>,
}

impl Serialize for QubitPermutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PermRepr {
            n: self.num_qubits(),
            cycles: self.cycles(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QubitPermutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PermRepr::deserialize(deserializer)?;
        QubitPermutation::from_cycles(repr.n, &repr.cycles).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn cycles_round_trip() {
        let u = QubitPermutation::from_cycles(8, &[vec![1, 6], vec![2, 5], vec![3, 4], vec![7, 8]]).unwrap();
        assert_eq!(u.to_string(), "(1,6)(2,5)(3,4)(7,8)");
        assert!(u.is_involution());
        assert_eq!(u.order(), 2);
        assert!(u.compose(&u.inverse()).unwrap().is_identity());
        assert_eq!(QubitPermutation::parse(8, "(1,6)(2,5)(3,4)(7,8)").unwrap(), u);
    }

    #[test]
    fn leftward_cycle_has_order_n() {
        for n in 2..10 {
            let cyc: Vec<usize> = (1..=n).rev().collect();
            let p = QubitPermutation::from_cycles(n, &[cyc]).unwrap();
            assert_eq!(p.order(), n as u64);
            assert_eq!(p.image(1), n);
            assert_eq!(p.image(2), 1);
        }
    }

    #[test]
    fn bad_cycles_rejected() {
        assert_eq!(
            QubitPermutation::from_cycles(4, &[vec![1, 2], vec![2, 3]]),
            Err(Error::DuplicateLabel(2))
        );
        assert_eq!(
            QubitPermutation::from_cycles(4, &[vec![1, 5]]),
            Err(Error::LabelOutOfRange { label: 5, n: 4 })
        );
        assert!(QubitPermutation::parse(4, "(1,2").is_err());
    }

    #[test]
    fn swap_moves_excitation() {
        let swap = QubitPermutation::from_cycles(2, &[vec![1, 2]]).unwrap();
        let s = SparseState::make_excited(2, &[2]).unwrap();
        let out = swap.apply(&s).unwrap();
        assert_eq!(out.terms()[0].0.bit_string(2), "10");
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let p = QubitPermutation::from_cycles(3, &[vec![1, 2]]).unwrap();
        let q = QubitPermutation::from_cycles(3, &[vec![2, 3]]).unwrap();
        let pq = p.compose(&q).unwrap();
        // 2 -> 3 under q, then 3 fixed by p
        assert_eq!(pq.image(2), 3);
        assert_eq!(pq.image(3), 1);
    }

    #[test]
    fn row_cycle_phase_convention() {
        let n = 4;
        let x = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
        let row: Vec<SparseState> = (1..=n).map(|j| SparseState::make_excited(n, &[j]).unwrap()).collect();
        let psi = SparseState::superpose(
            row.iter()
                .enumerate()
                .map(|(j, s)| (x.powu(j as u32) / (n as f64).sqrt(), s)),
        )
        .unwrap();
        let cyc: Vec<usize> = (1..=n).rev().collect();
        let p = QubitPermutation::from_cycles(n, &[cyc]).unwrap();
        let out = p.apply(&psi).unwrap();
        assert!(out.max_deviation(&psi.scale(x)).unwrap() < 1e-15);
    }

    #[test]
    fn size_mismatch() {
        let p = QubitPermutation::identity(3);
        let s = SparseState::make_excited(2, &[1]).unwrap();
        assert!(matches!(p.apply(&s), Err(Error::QubitCountMismatch { .. })));
    }
}
