//! Sparse amplitude maps over computational basis states.
//!
//! Every gate in this crate conserves the number of excited qubits, so states
//! are stored as a sorted list of `(basis string, amplitude)` pairs and never
//! as dense `2^N` vectors. Qubit labels in the public API are 1-based.
//!
//! The term list is kept canonical: sorted lexicographically on the bit
//! string (qubit 1 is the leftmost character), no repeated keys and no
//! amplitude with modulus below [`PRUNE_TOL`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Amplitudes below this modulus are dropped.
pub const PRUNE_TOL: f64 = 1e-12;
/// Physical states must have norm `1 ± NORM_TOL`.
pub const NORM_TOL: f64 = 1e-10;

/// Occupation bit vector. Qubit `q` (0-based) lives in word `q / 64` at bit
/// `63 - q % 64`, so the derived ordering is lexicographic on the bit string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BasisState {
    words: SmallVec<[u64; 2]>,
}

impl BasisState {
    pub fn vacuum(n: usize) -> Self {
        BasisState {
            words: smallvec![0; n.div_ceil(64).max(1)],
        }
    }

    /// Basis string with ones exactly at the given 1-based labels.
    pub fn from_positions(n: usize, positions: &[usize]) -> Result<Self> {
        let mut out = Self::vacuum(n);
        for &p in positions {
            if p == 0 || p > n {
                return Err(Error::LabelOutOfRange { label: p, n });
            }
            if out.get(p - 1) {
                return Err(Error::DuplicateLabel(p));
            }
            out.set(p - 1, true);
        }
        Ok(out)
    }

    pub fn from_bit_string(bits: &str) -> Result<Self> {
        let mut out = Self::vacuum(bits.len());
        for (q, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(q, true),
                _ => return Err(Error::Invalid(format!("bad bit character {c:?}"))),
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        (self.words[q >> 6] >> (63 - (q & 63))) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, bit: bool) {
        let mask = 1u64 << (63 - (q & 63));
        if bit {
            self.words[q >> 6] |= mask;
        } else {
            self.words[q >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn swap_bits(&mut self, a: usize, b: usize) {
        let (x, y) = (self.get(a), self.get(b));
        if x != y {
            self.set(a, y);
            self.set(b, x);
        }
    }

    /// First 128 bits as one integer; orders like the full key when the
    /// state has at most 128 qubits.
    fn packed(&self) -> u128 {
        let hi = self.words.first().copied().unwrap_or(0) as u128;
        let lo = self.words.get(1).copied().unwrap_or(0) as u128;
        (hi << 64) | lo
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 0-based indices of excited qubits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let lead = rest.leading_zeros() as usize;
                rest &= !(1u64 << (63 - lead));
                Some(wi * 64 + lead)
            })
        })
    }

    pub fn bit_string(&self, n: usize) -> String {
        (0..n).map(|q| if self.get(q) { '1' } else { '0' }).collect()
    }

    /// `self` (on `n` qubits) followed by `other` (on `m` qubits).
    pub fn concat(&self, n: usize, other: &BasisState, m: usize) -> BasisState {
        let mut out = Self::vacuum(n + m);
        for q in self.ones() {
            out.set(q, true);
        }
        for q in other.ones() {
            debug_assert!(q < m);
            out.set(n + q, true);
        }
        out
    }

    /// Bits `start .. start + len` (0-based) as a basis string on `len` qubits.
    pub fn window(&self, start: usize, len: usize) -> BasisState {
        let mut out = Self::vacuum(len);
        for q in 0..len {
            if self.get(start + q) {
                out.set(q, true);
            }
        }
        out
    }
}

/// Sparse superposition of basis states on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    n: usize,
    terms: Vec<(BasisState, Complex64)>,
}

impl SparseState {
    /// The zero vector.
    pub fn zero(n: usize) -> Self {
        SparseState { n, terms: Vec::new() }
    }

    pub fn basis(n: usize, key: BasisState) -> Self {
        SparseState {
            n,
            terms: vec![(key, Complex64::new(1.0, 0.0))],
        }
    }

    /// `X_{p1} X_{p2} ... |0...0⟩` for 1-based labels `positions`.
    pub fn make_excited(n: usize, positions: &[usize]) -> Result<Self> {
        Ok(Self::basis(n, BasisState::from_positions(n, positions)?))
    }

    /// Builds a state from arbitrary terms; repeated keys are summed.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (BasisState, Complex64)>) -> Self {
        Self::canonical(n, terms.into_iter().collect())
    }

    fn canonical(n: usize, mut terms: Vec<(BasisState, Complex64)>) -> Self {
        if n <= 128 {
            terms.sort_unstable_by_key(|t| t.0.packed());
        } else {
            terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        }
        // Merge equal keys in place, dropping negligible sums.
        let tol = PRUNE_TOL * PRUNE_TOL;
        let mut w = 0;
        for r in 0..terms.len() {
            if w > 0 && terms[w - 1].0 == terms[r].0 {
                let a = terms[r].1;
                terms[w - 1].1 += a;
                continue;
            }
            if w > 0 && terms[w - 1].1.norm_sqr() < tol {
                w -= 1;
            }
            terms.swap(w, r);
            w += 1;
        }
        if w > 0 && terms[w - 1].1.norm_sqr() < tol {
            w -= 1;
        }
        terms.truncate(w);
        let out = terms;
        SparseState { n, terms: out }
    }

    /// Linear combination `Σ c_i |s_i⟩`. Not normalized.
    pub fn superpose<'a>(pairs: impl IntoIterator<Item = (Complex64, &'a SparseState)>) -> Result<Self> {
        let mut n = None;
        let mut terms = Vec::new();
        for (c, s) in pairs {
            match n {
                None => n = Some(s.n),
                Some(m) if m != s.n => return Err(Error::QubitCountMismatch { left: m, right: s.n }),
                _ => {}
            }
            terms.extend(s.terms.iter().map(|(k, a)| (k.clone(), c * a)));
        }
        let n = n.ok_or_else(|| Error::Invalid("superpose of an empty list".into()))?;
        Ok(Self::canonical(n, terms))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(BasisState, Complex64)] {
        &self.terms
    }

    pub fn amplitude(&self, key: &BasisState) -> Complex64 {
        self.terms
            .binary_search_by(|(k, _)| k.cmp(key))
            .map(|i| self.terms[i].1)
            .unwrap_or_default()
    }

    /// Common Hamming weight of all terms, if there is one.
    pub fn weight(&self) -> Option<usize> {
        let w = self.terms.first()?.0.weight();
        self.terms.iter().all(|(k, _)| k.weight() == w).then_some(w)
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().fold(0.0, |acc, (_, a)| acc + a.norm_sqr()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> SparseState {
        Self::canonical(self.n, self.terms.iter().map(|(k, a)| (k.clone(), c * a)).collect())
    }

    pub fn normalized(&self) -> Result<SparseState> {
        let nrm = self.norm();
        if nrm < PRUNE_TOL {
            return Err(Error::NotNormalized(nrm));
        }
        Ok(self.scale(Complex64::new(1.0 / nrm, 0.0)))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &SparseState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::QubitCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex64::default();
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.terms[i].1.conj() * other.terms[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(acc)
    }

    /// `|self⟩ ⊗ |other⟩`; the qubits of `other` follow those of `self`.
    pub fn tensor(&self, other: &SparseState) -> SparseState {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                terms.push((ka.concat(self.n, kb, other.n), a * b));
            }
        }
        // Concatenation preserves lexicographic order.
        SparseState {
            n: self.n + other.n,
            terms,
        }
    }

    /// `|⟨a|b⟩|` for normalized states; blind to a global phase.
    pub fn fidelity_mod_phase(&self, other: &SparseState) -> Result<f64> {
        for s in [self, other] {
            let nrm = s.norm();
            if (nrm - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized(nrm));
            }
        }
        Ok(self.inner_product(other)?.norm().min(1.0))
    }

    /// Largest entrywise amplitude difference.
    pub fn max_deviation(&self, other: &SparseState) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::QubitCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let diff = SparseState::superpose([(Complex64::new(1.0, 0.0), self), (Complex64::new(-1.0, 0.0), other)])?;
        // Pruned entries are below PRUNE_TOL anyway.
        Ok(diff.terms.iter().map(|(_, a)| a.norm()).fold(0.0, f64::max))
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &SparseState) -> Result<f64> {
        let diff = SparseState::superpose([(Complex64::new(1.0, 0.0), self), (Complex64::new(-1.0, 0.0), other)])?;
        Ok(diff.norm())
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.iter().any(|(_, a)| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let nrm = self.norm();
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(nrm));
        }
        Ok(())
    }

    /// Applies a term-wise linear map. `f` pushes the image of one basis
    /// term (already multiplied by its amplitude) into the buffer.
    pub(crate) fn map_terms<F>(&self, mut f: F) -> SparseState
    where
        F: FnMut(&BasisState, Complex64, &mut Vec<(BasisState, Complex64)>),
    {
        let mut out = Vec::with_capacity(self.terms.len());
        for (k, a) in &self.terms {
            f(k, *a, &mut out);
        }
        Self::canonical(self.n, out)
    }
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{}⟩", a.re, a.im, k.bit_string(self.n))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    bits: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    n: usize,
    weight: Option<usize>,
    terms: Vec<TermRepr>,
}

impl Serialize for SparseState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr {
            n: self.n,
            weight: self.weight(),
            terms: self
                .terms
                .iter()
                .map(|(k, a)| TermRepr {
                    bits: k.bit_string(self.n),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = StateRepr::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            if t.bits.len() != repr.n {
                return Err(D::Error::custom(format!(
                    "bit string {:?} is not {} long",
                    t.bits, repr.n
                )));
            }
            let key = BasisState::from_bit_string(&t.bits).map_err(D::Error::custom)?;
            terms.push((key, Complex64::new(t.re, t.im)));
        }
        Ok(SparseState::from_terms(repr.n, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_excited_sets_bits() {
        let s = SparseState::make_excited(4, &[1]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].0.bit_string(4), "1000");
        assert_eq!(s.terms()[0].1, c(1.0, 0.0));

        let vac = SparseState::make_excited(4, &[]).unwrap();
        assert_eq!(vac.terms()[0].0.bit_string(4), "0000");

        let s = SparseState::make_excited(8, &[3]).unwrap();
        assert_eq!(s.terms()[0].0.bit_string(8), "00100000");
    }

    #[test]
    fn make_excited_rejects_bad_positions() {
        assert_eq!(SparseState::make_excited(4, &[2, 2]), Err(Error::DuplicateLabel(2)));
        assert_eq!(
            SparseState::make_excited(4, &[5]),
            Err(Error::LabelOutOfRange { label: 5, n: 4 })
        );
        assert!(SparseState::make_excited(4, &[0]).is_err());
    }

    #[test]
    fn superpose_and_cancel() {
        let a = SparseState::make_excited(2, &[1]).unwrap();
        let b = SparseState::make_excited(2, &[2]).unwrap();
        let bell = SparseState::superpose([(c(FRAC_1_SQRT_2, 0.0), &a), (c(FRAC_1_SQRT_2, 0.0), &b)]).unwrap();
        assert_eq!(bell.len(), 2);
        assert!((bell.norm() - 1.0).abs() < 1e-15);

        let zero = SparseState::superpose([(c(1.0, 0.0), &a), (c(-1.0, 0.0), &a)]).unwrap();
        assert!(zero.is_empty());
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn psi_formula_at_two_rows() {
        // x = e^{2πi/2} = -1
        let x = Complex64::from_polar(1.0, 2.0 * PI / 2.0);
        let s1 = SparseState::make_excited(2, &[1]).unwrap();
        let s2 = SparseState::make_excited(2, &[2]).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let psi = SparseState::superpose([(c(r, 0.0), &s1), (x * r, &s2)]).unwrap();
        let b10 = BasisState::from_bit_string("10").unwrap();
        let b01 = BasisState::from_bit_string("01").unwrap();
        assert!((psi.amplitude(&b10) - c(r, 0.0)).norm() < 1e-15);
        assert!((psi.amplitude(&b01) - c(-r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn superpose_rejects_mismatch() {
        let a = SparseState::make_excited(2, &[1]).unwrap();
        let b = SparseState::make_excited(3, &[1]).unwrap();
        assert!(matches!(
            SparseState::superpose([(c(1.0, 0.0), &a), (c(1.0, 0.0), &b)]),
            Err(Error::QubitCountMismatch { .. })
        ));
        assert!(a.inner_product(&b).is_err());
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let a = SparseState::make_excited(3, &[2]).unwrap();
        let b = a.scale(Complex64::from_polar(1.0, PI / 4.0));
        assert!((a.fidelity_mod_phase(&b).unwrap() - 1.0).abs() < 1e-15);
        let unnormalized = a.scale(c(2.0, 0.0));
        assert!(matches!(
            a.fidelity_mod_phase(&unnormalized),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn tensor_concatenates() {
        let a = SparseState::make_excited(2, &[1]).unwrap();
        let b = SparseState::make_excited(3, &[3]).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.num_qubits(), 5);
        assert_eq!(t.terms()[0].0.bit_string(5), "10001");
    }

    #[test]
    fn terms_are_sorted_lexicographically() {
        let keys = ["0110", "1001", "0011", "1100"];
        let s = SparseState::from_terms(
            4,
            keys.iter()
                .map(|k| (BasisState::from_bit_string(k).unwrap(), c(0.5, 0.0))),
        );
        let order: Vec<String> = s.terms().iter().map(|(k, _)| k.bit_string(4)).collect();
        assert_eq!(order, ["0011", "0110", "1001", "1100"]);
    }

    #[test]
    fn wide_states_keep_order_across_words() {
        let a = BasisState::from_positions(130, &[1]).unwrap();
        let b = BasisState::from_positions(130, &[129]).unwrap();
        assert!(a > b);
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![128]);
    }

    #[test]
    fn json_shape() {
        let s = SparseState::make_excited(3, &[2]).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"n": 3, "weight": 1, "terms": [{"bits": "010", "re": 1.0, "im": 0.0}]})
        );
        let back: SparseState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
