//! Resonant-coupling gates: exchange exponentials `e^{iθ(i,j)}`, Fredkin
//! (controlled swap) gates, and parallel layers of them.
//!
//! Exchange is modeled directly as the transposition of two qubits, so
//! `e^{iθ π_ij} = cos θ · I + i sin θ · π_ij`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::QubitPermutation;
use crate::state::{BasisState, SparseState};

/// One operation of a schedule. Qubit labels are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GateOp {
    Perm(QubitPermutation),
    Exchange { i: usize, j: usize, theta: f64 },
    Fredkin { control: usize, a: usize, b: usize },
    Phase { phi: f64 },
}

impl GateOp {
    /// Qubits an op touches; permutations report none (they are relabelings).
    pub fn support(&self) -> Vec<usize> {
        match self {
            GateOp::Perm(_) | GateOp::Phase { .. } => Vec::new(),
            GateOp::Exchange { i, j, .. } => vec![*i, *j],
            GateOp::Fredkin { control, a, b } => vec![*control, *a, *b],
        }
    }

    /// True for the ops that occupy a timestep.
    pub fn is_resonant(&self) -> bool {
        matches!(self, GateOp::Exchange { .. } | GateOp::Fredkin { .. })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            GateOp::Perm(p) => {
                if p.num_qubits() != n {
                    return Err(Error::QubitCountMismatch {
                        left: n,
                        right: p.num_qubits(),
                    });
                }
            }
            GateOp::Phase { phi } => {
                if !phi.is_finite() {
                    return Err(Error::NonFinite);
                }
            }
            GateOp::Exchange { theta, .. } if !theta.is_finite() => return Err(Error::NonFinite),
            _ => {}
        }
        let support = self.support();
        for (idx, &q) in support.iter().enumerate() {
            if q == 0 || q > n {
                return Err(Error::LabelOutOfRange { label: q, n });
            }
            if support[..idx].contains(&q) {
                return Err(Error::IndexClash(q));
            }
        }
        Ok(())
    }

    /// Pushes the image of `amp · |key⟩` into `out`.
    fn apply_term(&self, key: BasisState, amp: Complex64, out: &mut Vec<(BasisState, Complex64)>) {
        match self {
            GateOp::Perm(p) => out.push((p.apply_basis(&key), amp)),
            GateOp::Phase { phi } => out.push((key, amp * Complex64::from_polar(1.0, *phi))),
            GateOp::Exchange { i, j, theta } => {
                let (a, b) = (i - 1, j - 1);
                if key.get(a) == key.get(b) {
                    out.push((key, amp * Complex64::from_polar(1.0, *theta)));
                } else {
                    let mut swapped = key.clone();
                    swapped.swap_bits(a, b);
                    out.push((key, amp * theta.cos()));
                    out.push((swapped, amp * Complex64::new(0.0, theta.sin())));
                }
            }
            GateOp::Fredkin { control, a, b } => {
                let mut key = key;
                if key.get(control - 1) {
                    key.swap_bits(a - 1, b - 1);
                }
                out.push((key, amp));
            }
        }
    }

    pub fn apply(&self, state: &SparseState) -> Result<SparseState> {
        self.validate(state.num_qubits())?;
        Ok(state.map_terms(|k, a, out| self.apply_term(k.clone(), a, out)))
    }

    /// Updates a single term in place; returns the second branch when the op
    /// splits it.
    fn apply_single(&self, key: &mut BasisState, amp: &mut Complex64) -> Option<(BasisState, Complex64)> {
        match self {
            GateOp::Perm(p) => *key = p.apply_basis(key),
            GateOp::Phase { phi } => *amp *= Complex64::from_polar(1.0, *phi),
            GateOp::Exchange { i, j, theta } => {
                let (a, b) = (i - 1, j - 1);
                if key.get(a) == key.get(b) {
                    *amp *= Complex64::from_polar(1.0, *theta);
                } else {
                    let mut swapped = key.clone();
                    swapped.swap_bits(a, b);
                    let other = *amp * Complex64::new(0.0, theta.sin());
                    *amp *= theta.cos();
                    return Some((swapped, other));
                }
            }
            GateOp::Fredkin { control, a, b } => {
                if key.get(control - 1) {
                    key.swap_bits(a - 1, b - 1);
                }
            }
        }
        None
    }

    /// Same op with every qubit label `q` replaced by `relabel(q)`.
    pub fn relabeled(&self, relabel: impl Fn(usize) -> usize) -> GateOp {
        match self {
            GateOp::Exchange { i, j, theta } => GateOp::Exchange {
                i: relabel(*i),
                j: relabel(*j),
                theta: *theta,
            },
            GateOp::Fredkin { control, a, b } => GateOp::Fredkin {
                control: relabel(*control),
                a: relabel(*a),
                b: relabel(*b),
            },
            other => other.clone(),
        }
    }
}

/// Ops executed in one timestep. Resonant ops must act on disjoint qubits.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub tag: String,
    pub ops: Vec<GateOp>,
}

impl Layer {
    pub fn new(ops: Vec<GateOp>) -> Self {
        Layer {
            tag: String::new(),
            ops,
        }
    }

    pub fn tagged(tag: impl Into<String>, ops: Vec<GateOp>) -> Self {
        Layer { tag: tag.into(), ops }
    }

    pub fn is_resonant(&self) -> bool {
        self.ops.iter().any(GateOp::is_resonant)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut used = vec![false; n];
        for op in &self.ops {
            op.validate(n)?;
            for q in op.support() {
                if std::mem::replace(&mut used[q - 1], true) {
                    return Err(Error::OverlappingSupport(q));
                }
            }
        }
        Ok(())
    }

    /// Applies the ops in listed order. Each term is pushed through every op
    /// before the result is merged, so a whole layer costs one sort.
    pub fn apply(&self, state: &SparseState) -> Result<SparseState> {
        self.validate(state.num_qubits())?;
        let mut branches = Vec::new();
        let mut next = Vec::new();
        Ok(state.map_terms(|k, a, out| {
            let mut key = k.clone();
            let mut amp = a;
            let mut ops = self.ops.iter();
            for op in ops.by_ref() {
                if let Some(split) = op.apply_single(&mut key, &mut amp) {
                    branches.push((key, amp));
                    branches.push(split);
                    for op in ops {
                        for (bk, ba) in branches.drain(..) {
                            op.apply_term(bk, ba, &mut next);
                        }
                        std::mem::swap(&mut branches, &mut next);
                    }
                    out.append(&mut branches);
                    return;
                }
            }
            out.push((key, amp));
        }))
    }
}

pub fn apply_exchange(state: &SparseState, i: usize, j: usize, theta: f64) -> Result<SparseState> {
    GateOp::Exchange { i, j, theta }.apply(state)
}

pub fn apply_fredkin(state: &SparseState, control: usize, a: usize, b: usize) -> Result<SparseState> {
    GateOp::Fredkin { control, a, b }.apply(state)
}

pub fn apply_layer(state: &SparseState, layer: &Layer) -> Result<SparseState> {
    layer.apply(state)
}

/// `(cos θ · I + i sin θ · perm)|state⟩`, valid because `perm² = I`.
pub fn apply_involution_exponential(state: &SparseState, perm: &QubitPermutation, theta: f64) -> Result<SparseState> {
    if !perm.is_involution() {
        return Err(Error::NotInvolution);
    }
    let moved = perm.apply(state)?;
    SparseState::superpose([
        (Complex64::new(theta.cos(), 0.0), state),
        (Complex64::new(0.0, theta.sin()), &moved),
    ])
}

/// Product of disjoint transpositions `(1,2)(3,4)...(2n-1,2n)`.
pub fn adjacent_pairing(n: usize) -> QubitPermutation {
    let cycles: Vec<[usize; 2]> = (1..=n).map(|k| [2 * k - 1, 2 * k]).collect();
    QubitPermutation::from_cycles(2 * n, &cycles).expect("disjoint pairs")
}

/// Normalized state with independent complex Gaussian amplitudes on `support`.
pub fn random_state<R: Rng>(n: usize, support: &[BasisState], rng: &mut R) -> SparseState {
    loop {
        let terms: Vec<(BasisState, Complex64)> = support
            .iter()
            .map(|k| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (k.clone(), Complex64::new(re, im))
            })
            .collect();
        if let Ok(s) = SparseState::from_terms(n, terms).normalized() {
            return s;
        }
    }
}

/// States `X_j |0⟩^{⊗n}` for `j = 1..=n`.
pub fn single_excitations(n: usize) -> Vec<BasisState> {
    (1..=n)
        .map(|j| BasisState::from_positions(n, &[j]).expect("in range"))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem1Report {
    pub n: usize,
    pub trials: usize,
    /// Fixed angle, or `None` when each trial drew its own.
    pub theta: Option<f64>,
    pub max_deviation: f64,
    /// `e^{(n-1)iθ}` for the fixed angle.
    pub prefactor: Option<[f64; 2]>,
}

/// Compares `Π_k e^{iθ π_(2k-1)(2k)} |ψ⟩` with
/// `e^{(n-1)iθ} e^{iθ Π_k π_(2k-1)(2k)} |ψ⟩` on random single-excitation
/// states of `2n` qubits.
pub fn verify_theorem1(n: usize, theta: Option<f64>, trials: usize, seed: u64) -> Result<Theorem1Report> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = single_excitations(2 * n);
    let pairing = adjacent_pairing(n);
    let mut max_dev: f64 = 0.0;
    for _ in 0..trials {
        let th = theta.unwrap_or_else(|| rng.random_range(0.0..2.0 * PI));
        let psi = random_state(2 * n, &support, &mut rng);
        let layer = Layer::new(
            (1..=n)
                .map(|k| GateOp::Exchange {
                    i: 2 * k - 1,
                    j: 2 * k,
                    theta: th,
                })
                .collect(),
        );
        let sequential = layer.apply(&psi)?;
        let parallel =
            apply_involution_exponential(&psi, &pairing, th)?.scale(Complex64::from_polar(1.0, (n as f64 - 1.0) * th));
        max_dev = max_dev.max(sequential.max_deviation(&parallel)?);
    }
    Ok(Theorem1Report {
        n,
        trials,
        theta,
        max_deviation: max_dev,
        prefactor: theta.map(|t| {
            let z = Complex64::from_polar(1.0, (n as f64 - 1.0) * t);
            [z.re, z.im]
        }),
    })
}

/// Row-swap permutation matrix `P_ij` (1-based) of size `dim`.
pub fn row_swap(dim: usize, i: usize, j: usize) -> DMatrix<i64> {
    let mut m = DMatrix::<i64>::identity(dim, dim);
    m.swap_rows(i - 1, j - 1);
    m
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityReport {
    pub dim: usize,
    pub commute: bool,
    pub max_entry_difference: i64,
    pub holds: bool,
}

/// Checks `Π_{left} P + P_right = (Π_{left} P) P_right + I` entrywise.
pub fn verify_pair_identity(dim: usize, left: &[(usize, usize)], right: (usize, usize)) -> IdentityReport {
    let id = DMatrix::<i64>::identity(dim, dim);
    let prod = left.iter().fold(id.clone(), |acc, &(i, j)| acc * row_swap(dim, i, j));
    let last = row_swap(dim, right.0, right.1);
    let commute = &prod * &last == &last * &prod;
    let lhs = &prod + &last;
    let rhs = &prod * &last + &id;
    let diff = (lhs - rhs).abs().max();
    IdentityReport {
        dim,
        commute,
        max_entry_difference: diff,
        holds: diff == 0,
    }
}

/// `P_12 P_34 ... P_(2n-3)(2n-2) + P_(2n-1)(2n) = P_12 ... P_(2n-1)(2n) + I_{2n}`.
pub fn verify_lemma_identity(n: usize) -> Result<IdentityReport> {
    if n < 2 {
        return Err(Error::Invalid("the composition identity needs n >= 2".into()));
    }
    let left: Vec<(usize, usize)> = (1..n).map(|k| (2 * k - 1, 2 * k)).collect();
    Ok(verify_pair_identity(2 * n, &left, (2 * n - 1, 2 * n)))
}

/// The parallel layer for `e^{iβπ/4}` on the first `2n` qubits after
/// `offset`: exchanges `(j, n+j)` at `θ = π/4`, plus the phase
/// `e^{-(n-1)iπ/4}` that cancels the pairing prefactor. Exact on states with
/// at most one excitation in those `2n` qubits.
pub fn u_beta(n: usize, offset: usize) -> (Layer, GateOp) {
    let theta = PI / 4.0;
    let ops = (1..=n)
        .map(|j| GateOp::Exchange {
            i: offset + j,
            j: offset + n + j,
            theta,
        })
        .collect();
    (
        Layer::tagged("U_beta", ops),
        GateOp::Phase {
            phi: -(n as f64 - 1.0) * theta,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(bits: &str) -> SparseState {
        SparseState::basis(bits.len(), BasisState::from_bit_string(bits).unwrap())
    }

    #[test]
    fn exchange_quarter_turn() {
        let out = apply_exchange(&ket("01"), 1, 2, PI / 4.0).unwrap();
        let want = SparseState::superpose([
            (Complex64::new(FRAC_1_SQRT_2, 0.0), &ket("01")),
            (Complex64::new(0.0, FRAC_1_SQRT_2), &ket("10")),
        ])
        .unwrap();
        assert!(out.max_deviation(&want).unwrap() < 1e-15);

        let out = apply_exchange(&ket("00"), 1, 2, PI / 4.0).unwrap();
        assert!(
            out.max_deviation(&ket("00").scale(Complex64::from_polar(1.0, PI / 4.0)))
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn exchange_half_turn_is_minus_one() {
        let s = SparseState::superpose([
            (Complex64::new(0.6, 0.0), &ket("0110")),
            (Complex64::new(0.0, 0.8), &ket("1001")),
        ])
        .unwrap();
        let out = apply_exchange(&s, 2, 4, PI).unwrap();
        assert!(out.max_deviation(&s.scale(Complex64::new(-1.0, 0.0))).unwrap() < 1e-15);
    }

    #[test]
    fn exchange_errors() {
        assert_eq!(apply_exchange(&ket("01"), 1, 1, 0.3), Err(Error::IndexClash(1)));
        assert!(matches!(
            apply_exchange(&ket("01"), 1, 3, 0.3),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn fredkin_truth_table() {
        assert_eq!(apply_fredkin(&ket("101"), 1, 2, 3).unwrap(), ket("110"));
        assert_eq!(apply_fredkin(&ket("001"), 1, 2, 3).unwrap(), ket("001"));
        assert_eq!(apply_fredkin(&ket("111"), 1, 2, 3).unwrap(), ket("111"));
        assert_eq!(apply_fredkin(&ket("111"), 1, 2, 1), Err(Error::IndexClash(1)));
    }

    #[test]
    fn involution_exponential_edge_cases() {
        let s = ket("0110");
        let id = QubitPermutation::identity(4);
        let out = apply_involution_exponential(&s, &id, 0.7).unwrap();
        assert!(out.max_deviation(&s.scale(Complex64::from_polar(1.0, 0.7))).unwrap() < 1e-15);
        let p = QubitPermutation::from_cycles(4, &[vec![1, 3], vec![2, 4]]).unwrap();
        assert!(
            apply_involution_exponential(&s, &p, 0.0)
                .unwrap()
                .max_deviation(&s)
                .unwrap()
                < 1e-15
        );
        let cyc = QubitPermutation::from_cycles(4, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(apply_involution_exponential(&s, &cyc, 0.1), Err(Error::NotInvolution));
    }

    #[test]
    fn layer_rejects_overlap() {
        let layer = Layer::new(vec![
            GateOp::Fredkin { control: 1, a: 2, b: 3 },
            GateOp::Exchange { i: 3, j: 4, theta: 0.1 },
        ]);
        assert_eq!(layer.apply(&ket("0000")), Err(Error::OverlappingSupport(3)));
        assert!(Layer::default().apply(&ket("0101")).unwrap() == ket("0101"));
    }

    #[test]
    fn lemma_identity_and_negative_control() {
        for n in 2..=6 {
            let r = verify_lemma_identity(n).unwrap();
            assert!(r.holds && r.commute, "n = {n}");
        }
        let bad = verify_pair_identity(4, &[(1, 2)], (2, 3));
        assert!(!bad.holds);
        assert!(bad.max_entry_difference > 0);
    }

    #[test]
    fn theorem1_single_pair_is_trivial() {
        let r = verify_theorem1(1, Some(0.4), 5, 1).unwrap();
        assert!(r.max_deviation < 1e-15);
        assert_eq!(r.prefactor, Some([1.0, 0.0]));
    }

    #[test]
    fn theorem1_fails_off_the_single_excitation_subspace() {
        // |1010⟩ has one excitation in each pair.
        let psi = ket("1010");
        let th = 0.3;
        let layer = Layer::new(vec![
            GateOp::Exchange { i: 1, j: 2, theta: th },
            GateOp::Exchange { i: 3, j: 4, theta: th },
        ]);
        let seq = layer.apply(&psi).unwrap();
        let par = apply_involution_exponential(&psi, &adjacent_pairing(2), th)
            .unwrap()
            .scale(Complex64::from_polar(1.0, th));
        assert!(seq.max_deviation(&par).unwrap() > 1e-3);
    }

    #[test]
    fn gate_json_shape() {
        let op = GateOp::Exchange { i: 1, j: 3, theta: 0.5 };
        assert_eq!(
            serde_json::to_value(&op).unwrap(),
            serde_json::json!({"kind": "exchange", "i": 1, "j": 3, "theta": 0.5})
        );
        let perm = GateOp::Perm(QubitPermutation::from_cycles(3, &[vec![1, 2]]).unwrap());
        let v = serde_json::to_value(&perm).unwrap();
        assert_eq!(v, serde_json::json!({"kind": "perm", "n": 3, "cycles": [[1, 2]]}));
        assert_eq!(serde_json::from_value::<GateOp>(v).unwrap(), perm);
    }
}
