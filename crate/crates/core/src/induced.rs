//! The action a qubit permutation induces on the weight-`k` basis strings,
//! its orbits, and the eigenvectors built from them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{gcd, QubitPermutation};
use crate::state::{BasisState, SparseState};

/// Largest weight-`k` block the crate will enumerate.
pub const MAX_BLOCK_DIM: usize = 1 << 22;

/// `e^{2πi num/den}` in lowest terms with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };
    pub const I: RootOfUnity = RootOfUnity { num: 1, den: 4 };

    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let num = num.rem_euclid(den as i64) as u64;
        let g = gcd(num, den).max(1);
        RootOfUnity {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    /// Multiplicative order.
    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.num as f64 / self.den as f64)
    }

    pub fn mul(&self, other: RootOfUnity) -> RootOfUnity {
        let den = self.den * other.den;
        RootOfUnity::new((self.num * other.den + other.num * self.den) as i64, den)
    }

    pub fn neg(&self) -> RootOfUnity {
        self.mul(RootOfUnity::new(1, 2))
    }

    pub fn is_root_of(&self, c: u64) -> bool {
        c.is_multiple_of(self.den)
    }
}

impl Ord for RootOfUnity {
    fn cmp(&self, other: &Self) -> Ordering {
        ((self.num as u128) * other.den as u128).cmp(&((other.num as u128) * self.den as u128))
    }
}

impl PartialOrd for RootOfUnity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for RootOfUnity {
    type Err = Error;

    /// Parses `p/q` as `e^{2πi p/q}`.
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| Error::Invalid(format!("expected p/q, got {s:?}")))?;
        let p: i64 = p.trim().parse().map_err(|e| Error::Invalid(format!("{s:?}: {e}")))?;
        let q: u64 = q.trim().parse().map_err(|e| Error::Invalid(format!("{s:?}: {e}")))?;
        if q == 0 {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(RootOfUnity::new(p, q))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(usize::MAX as u128) as usize
}

/// All weight-`k` strings on `n` qubits in lexicographic bit-string order.
pub fn weight_basis(n: usize, k: usize) -> Result<Vec<BasisState>> {
    if k > n {
        return Err(Error::WeightOutOfRange { k, n });
    }
    let dim = binomial(n, k);
    if dim > MAX_BLOCK_DIM {
        return Err(Error::DimensionOverflow(dim));
    }
    let mut out = Vec::with_capacity(dim);
    // Combinations of 0-based positions, then sorted as bit strings.
    let mut pos: Vec<usize> = (0..k).collect();
    loop {
        let mut b = BasisState::vacuum(n);
        for &p in &pos {
            b.set(p, true);
        }
        out.push(b);
        let mut i = k;
        loop {
            if i == 0 {
                out.sort_unstable();
                return Ok(out);
            }
            i -= 1;
            if pos[i] < n - k + i {
                pos[i] += 1;
                for t in i + 1..k {
                    pos[t] = pos[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Permutation of the `C(N, k)` weight-`k` strings induced by a qubit
/// permutation. Indices refer to positions in [`InducedAction::basis`].
#[derive(Clone, Debug)]
pub struct InducedAction {
    n: usize,
    k: usize,
    basis: Vec<BasisState>,
    image: Vec<usize>,
}

impl InducedAction {
    pub fn new(perm: &QubitPermutation, k: usize) -> Result<Self> {
        let n = perm.num_qubits();
        let basis = weight_basis(n, k)?;
        let image = basis
            .iter()
            .map(|b| {
                let t = perm.apply_basis(b);
                basis.binary_search(&t).expect("weight is conserved")
            })
            .collect();
        Ok(InducedAction { n, k, basis, image })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn weight(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn index_of(&self, key: &BasisState) -> Option<usize> {
        self.basis.binary_search(key).ok()
    }

    /// Orbits listed in action order, each starting at its smallest index.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for start in 0..self.image.len() {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                orbit.push(j);
                j = self.image[j];
            }
            out.push(orbit);
        }
        out
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.orbits().iter().map(Vec::len).collect()
    }

    /// Eigenvalues with multiplicities; an orbit of length `c` contributes
    /// each `c`-th root of unity once.
    pub fn spectrum(&self) -> BTreeMap<RootOfUnity, usize> {
        let mut out = BTreeMap::new();
        for c in self.orbit_lengths() {
            for m in 0..c {
                *out.entry(RootOfUnity::new(m as i64, c as u64)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Orthonormal eigenvectors for eigenvalue `lambda` as sparse
    /// `(index, amplitude)` lists, one per orbit whose length `c` has
    /// `lambda^c = 1`.
    pub fn eigenvectors(&self, lambda: Complex64) -> Vec<Vec<(usize, Complex64)>> {
        self.orbits()
            .into_iter()
            .filter(|o| (lambda.powu(o.len() as u32) - 1.0).norm() < 1e-9)
            .map(|o| {
                let c = o.len();
                let scale = 1.0 / (c as f64).sqrt();
                let inv = lambda.inv();
                let mut coeff = Complex64::new(scale, 0.0);
                let mut v = Vec::with_capacity(c);
                for &idx in &o {
                    v.push((idx, coeff));
                    coeff *= inv;
                }
                v
            })
            .collect()
    }

    pub fn to_state(&self, coords: &[(usize, Complex64)]) -> SparseState {
        SparseState::from_terms(self.n, coords.iter().map(|&(i, a)| (self.basis[i].clone(), a)))
    }

    pub fn eigenspace_basis(&self, lambda: Complex64) -> Vec<SparseState> {
        self.eigenvectors(lambda).iter().map(|v| self.to_state(v)).collect()
    }
}

pub fn induced_weight_action(perm: &QubitPermutation, k: usize) -> Result<InducedAction> {
    InducedAction::new(perm, k)
}

pub fn eigenspace_basis(perm: &QubitPermutation, k: usize, lambda: Complex64) -> Result<Vec<SparseState>> {
    Ok(InducedAction::new(perm, k)?.eigenspace_basis(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_basis_is_sorted_and_complete() {
        let b = weight_basis(4, 2).unwrap();
        let s: Vec<String> = b.iter().map(|k| k.bit_string(4)).collect();
        assert_eq!(s, ["0011", "0101", "0110", "1001", "1010", "1100"]);
        assert_eq!(weight_basis(5, 0).unwrap().len(), 1);
        assert_eq!(weight_basis(5, 5).unwrap().len(), 1);
        assert!(matches!(weight_basis(3, 4), Err(Error::WeightOutOfRange { .. })));
    }

    #[test]
    fn full_cycle_on_single_excitations() {
        let n = 6;
        let p = QubitPermutation::from_cycles(n, &[(1..=n).collect::<Vec<_>>()]).unwrap();
        let act = induced_weight_action(&p, 1).unwrap();
        assert_eq!(act.orbit_lengths(), vec![n]);
        let spec = act.spectrum();
        assert_eq!(spec.len(), n);
        assert!(spec.values().all(|&m| m == 1));
    }

    #[test]
    fn identity_gives_n_fixed_vectors() {
        let act = induced_weight_action(&QubitPermutation::identity(5), 1).unwrap();
        let vs = act.eigenspace_basis(Complex64::new(1.0, 0.0));
        assert_eq!(vs.len(), 5);
        for (i, a) in vs.iter().enumerate() {
            for (j, b) in vs.iter().enumerate() {
                let ip = a.inner_product(b).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn root_of_unity_arithmetic() {
        let a = RootOfUnity::new(3, 12);
        assert_eq!(a, RootOfUnity::new(1, 4));
        assert_eq!(a.mul(RootOfUnity::I), RootOfUnity::new(1, 2));
        assert_eq!(RootOfUnity::new(-1, 4), RootOfUnity::new(3, 4));
        assert_eq!(RootOfUnity::ONE.neg(), RootOfUnity::new(1, 2));
        assert!(RootOfUnity::new(1, 4) < RootOfUnity::new(1, 2));
        assert_eq!("2/8".parse::<RootOfUnity>().unwrap(), RootOfUnity::I);
        assert!((RootOfUnity::I.value() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_eigenspace_for_missing_eigenvalue() {
        let p = QubitPermutation::from_cycles(3, &[vec![1, 2]]).unwrap();
        assert!(eigenspace_basis(&p, 1, Complex64::new(0.0, 1.0)).unwrap().is_empty());
        assert!(matches!(
            eigenspace_basis(&p, 4, Complex64::new(1.0, 0.0)),
            Err(Error::WeightOutOfRange { .. })
        ));
    }
}
