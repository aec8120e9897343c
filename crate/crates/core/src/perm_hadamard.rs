//! Hadamard and phase flip realized by qubit permutations alone, on a
//! 16-qubit code made of two 8-qubit single-excitation factors.
//!
//! With `w = e^{iπ/4}`:
//!
//! ```text
//! |x_k⟩ = w^{5k}/√8 Σ_j w^{±(j-1)} |(j)⟩     (+ for k = 0, - for k = 1)
//! |y_0⟩ = 1/√8 Σ_j (-w)^{j-1} |(j)⟩,   |y_1⟩ = w |x_0⟩
//! |0^H⟩ = (|x_0 y_0⟩ + |x_1 y_1⟩)/√2,   |1^H⟩ = i(|x_0 y_0⟩ - |x_1 y_1⟩)/√2
//! ```
//!
//! The first factor lives on qubits 1–8 and the second on 9–16.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::{
    self, canonicalize, eq_mod_phase, fidelity_mod_phase, mat_to_array, CliffordIndex, Mat2, TableId,
};
use crate::error::Result;
use crate::perm::QubitPermutation;
use crate::state::{BasisState, SparseState};

pub const FACTOR_QUBITS: usize = 8;
pub const CODE_QUBITS: usize = 16;

fn w_pow(k: i64) -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0 * k.rem_euclid(8) as f64)
}

fn single_excitation(coeffs: impl Fn(usize) -> Complex64) -> SparseState {
    let scale = 1.0 / (FACTOR_QUBITS as f64).sqrt();
    SparseState::from_terms(
        FACTOR_QUBITS,
        (1..=FACTOR_QUBITS).map(|j| {
            let key = BasisState::from_positions(FACTOR_QUBITS, &[j]).expect("label in range");
            (key, coeffs(j) * scale)
        }),
    )
}

#[derive(Clone, Debug)]
pub struct PermHBasis {
    pub x0: SparseState,
    pub x1: SparseState,
    pub y0: SparseState,
    pub y1: SparseState,
    pub basis0: SparseState,
    pub basis1: SparseState,
}

impl PermHBasis {
    pub fn logical(&self, b: usize) -> &SparseState {
        if b == 0 {
            &self.basis0
        } else {
            &self.basis1
        }
    }
}

pub fn build_basis() -> PermHBasis {
    let x0 = single_excitation(|j| w_pow(j as i64 - 1));
    let x1 = single_excitation(|j| w_pow(5 - (j as i64 - 1)));
    // (-w) = w^5
    let y0 = single_excitation(|j| w_pow(5 * (j as i64 - 1)));
    let y1 = x0.scale(w_pow(1));
    let a = x0.tensor(&y0);
    let b = x1.tensor(&y1);
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let basis0 = SparseState::superpose([(r, &a), (r, &b)]).expect("same width");
    let ri = Complex64::new(0.0, FRAC_1_SQRT_2);
    let basis1 = SparseState::superpose([(ri, &a), (-ri, &b)]).expect("same width");
    PermHBasis {
        x0,
        x1,
        y0,
        y1,
        basis0,
        basis1,
    }
}

fn perm8(text: &str) -> QubitPermutation {
    QubitPermutation::parse(FACTOR_QUBITS, text).expect("fixed cycle text")
}

/// `U = (1,6)(2,5)(3,4)(7,8)`.
pub fn perm_u() -> QubitPermutation {
    perm8("(1,6)(2,5)(3,4)(7,8)")
}

/// `Q = (2,6)(4,8)`.
pub fn perm_q() -> QubitPermutation {
    perm8("(2,6)(4,8)")
}

/// `R = (1,7)(2,6)(3,5)`.
pub fn perm_r() -> QubitPermutation {
    perm8("(1,7)(2,6)(3,5)")
}

fn product(perms: &[&QubitPermutation]) -> QubitPermutation {
    perms.iter().fold(QubitPermutation::identity(FACTOR_QUBITS), |acc, p| {
        acc.compose(p).expect("same width")
    })
}

pub fn op_h() -> QubitPermutation {
    perm_u().tensor(&perm_q())
}

pub fn op_z() -> QubitPermutation {
    perm_r().tensor(&perm_q())
}

/// `URU ⊗ Q`.
pub fn op_x() -> QubitPermutation {
    let (u, r) = (perm_u(), perm_r());
    product(&[&u, &r, &u]).tensor(&perm_q())
}

/// `URUR ⊗ I`.
pub fn op_y() -> QubitPermutation {
    let (u, r) = (perm_u(), perm_r());
    product(&[&u, &r, &u, &r]).tensor(&QubitPermutation::identity(FACTOR_QUBITS))
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SufficientConditions {
    /// `max |U x_0 - x_1|`
    pub u_x0_to_x1: f64,
    /// `max |Q y_0 - w^{-1} y_1|`
    pub q_y0_to_y1: f64,
    pub orthogonality: f64,
}

pub fn sufficient_conditions(basis: &PermHBasis) -> Result<SufficientConditions> {
    let ux0 = perm_u().apply(&basis.x0)?;
    let qy0 = perm_q().apply(&basis.y0)?;
    let orth = [
        basis.x0.inner_product(&basis.x1)?.norm(),
        basis.y0.inner_product(&basis.y1)?.norm(),
        basis.basis0.inner_product(&basis.basis1)?.norm(),
    ];
    Ok(SufficientConditions {
        u_x0_to_x1: ux0.max_deviation(&basis.x1)?,
        q_y0_to_y1: qy0.max_deviation(&basis.y1.scale(w_pow(-1)))?,
        orthogonality: orth.into_iter().fold(0.0, f64::max),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LogicalActionReport {
    pub permutation: String,
    pub matrix: [[[f64; 2]; 2]; 2],
    /// Largest norm of an image's component outside the code space.
    pub residual: f64,
    pub fidelity: f64,
    pub clifford: Option<CliffordIndex>,
    pub matches: bool,
}

/// Induced 2×2 matrix in the `{|0^H⟩, |1^H⟩}` frame and the leakage norm.
pub fn logical_matrix(basis: &PermHBasis, perm: &QubitPermutation) -> Result<(Mat2, f64)> {
    let mut m = Mat2::zeros();
    let mut residual: f64 = 0.0;
    for col in 0..2 {
        let image = perm.apply(basis.logical(col))?;
        let a0 = basis.basis0.inner_product(&image)?;
        let a1 = basis.basis1.inner_product(&image)?;
        m[(0, col)] = a0;
        m[(1, col)] = a1;
        let proj = SparseState::superpose([(a0, &basis.basis0), (a1, &basis.basis1)])?;
        residual = residual.max(image.distance(&proj)?);
    }
    Ok((m, residual))
}

pub fn verify_logical_action(
    basis: &PermHBasis,
    perm: &QubitPermutation,
    target: &Mat2,
) -> Result<LogicalActionReport> {
    let (m, residual) = logical_matrix(basis, perm)?;
    Ok(LogicalActionReport {
        permutation: perm.to_string(),
        matrix: mat_to_array(&m),
        residual,
        fidelity: fidelity_mod_phase(&m, target),
        clifford: canonicalize(&m).ok(),
        matches: residual < 1e-12 && eq_mod_phase(&m, target),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupReport {
    pub permutation_group_order: usize,
    pub logical_elements: Vec<CliffordIndex>,
    pub max_residual: f64,
    /// Some product leaves the code space or is not Clifford.
    pub leaves_span: bool,
    pub matches_table: bool,
}

/// Closes `perms` under composition and reduces every element to its
/// logical action mod phase.
pub fn generated_group(basis: &PermHBasis, perms: &[QubitPermutation]) -> Result<GroupReport> {
    let id = QubitPermutation::identity(CODE_QUBITS);
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for p in perms {
            let next = g.compose(p)?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut logical = BTreeSet::new();
    let mut max_residual: f64 = 0.0;
    let mut leaves_span = false;
    for g in &seen {
        let (m, residual) = logical_matrix(basis, g)?;
        max_residual = max_residual.max(residual);
        match canonicalize(&m) {
            Ok(idx) if residual < 1e-12 => {
                logical.insert(idx);
            }
            _ => leaves_span = true,
        }
    }
    let table: BTreeSet<CliffordIndex> = clifford::verify_table(TableId::HadamardPhaseFlip)
        .generated
        .into_iter()
        .collect();
    Ok(GroupReport {
        permutation_group_order: seen.len(),
        matches_table: !leaves_span && logical == table,
        logical_elements: logical.into_iter().collect(),
        max_residual,
        leaves_span,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PermHadamardReport {
    pub conditions: SufficientConditions,
    pub hadamard: LogicalActionReport,
    pub phase_flip: LogicalActionReport,
    pub bit_flip: LogicalActionReport,
    pub xz_product: LogicalActionReport,
    pub group: GroupReport,
}

impl PermHadamardReport {
    pub fn passed(&self) -> bool {
        self.conditions.u_x0_to_x1 < 1e-12
            && self.conditions.q_y0_to_y1 < 1e-12
            && self.conditions.orthogonality < 1e-12
            && self.hadamard.matches
            && self.phase_flip.matches
            && self.bit_flip.matches
            && self.xz_product.matches
            && self.group.matches_table
    }
}

pub fn run_report() -> Result<PermHadamardReport> {
    let basis = build_basis();
    let x = *clifford::pauli_x().matrix();
    let z = *clifford::pauli_z().matrix();
    Ok(PermHadamardReport {
        conditions: sufficient_conditions(&basis)?,
        hadamard: verify_logical_action(&basis, &op_h(), clifford::hadamard().matrix())?,
        phase_flip: verify_logical_action(&basis, &op_z(), &z)?,
        bit_flip: verify_logical_action(&basis, &op_x(), &x)?,
        xz_product: verify_logical_action(&basis, &op_y(), &(x * z))?,
        group: generated_group(&basis, &[op_h(), op_z()])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_vectors() {
        let b = build_basis();
        for s in [&b.x0, &b.x1, &b.y0, &b.y1, &b.basis0, &b.basis1] {
            assert!((s.norm() - 1.0).abs() < 1e-14);
        }
        let key = BasisState::from_positions(8, &[1]).unwrap();
        assert!((b.y1.amplitude(&key) - w_pow(1) / 8f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn involutions() {
        assert!(perm_u().is_involution());
        assert!(perm_q().is_involution());
        assert!(perm_r().is_involution());
        assert_eq!(op_y().order(), 4);
    }

    #[test]
    fn z_alone_gives_two_elements() {
        let b = build_basis();
        let g = generated_group(&b, &[op_z()]).unwrap();
        assert_eq!(g.logical_elements.len(), 2);
        assert!(!g.matches_table);
    }
}
