//! The 24 single-qubit Clifford gates modulo global phase.
//!
//! Elements are indexed `(i, j)` with `i ∈ 1..=6`, `j ∈ 1..=4`:
//!
//! * `A_1j = [[1, 0], [0, i^j]]`, `A_2j = [[0, 1], [i^j, 0]]`
//! * `A_5j = (A_1j + i A_2j)/√2`, `A_6j = (A_1j - i A_2j)/√2`
//! * rows 3 and 4 pair a diagonal with an antidiagonal element, e.g.
//!   `A_31 = (A_12 + A_24)/√2 = H` and `A_41 = (A_12 - A_24)/√2`.
//!
//! Matrices are compared after fixing the phase so that the first nonzero
//! entry (row-major) is real and positive.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;

/// Tolerance for matching a matrix against the table.
pub const MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CliffordIndex {
    pub i: u8,
    pub j: u8,
}

impl CliffordIndex {
    pub const IDENTITY: CliffordIndex = CliffordIndex { i: 1, j: 4 };

    pub fn new(i: usize, j: usize) -> Result<Self> {
        if !(1..=6).contains(&i) || !(1..=4).contains(&j) {
            return Err(Error::CliffordIndex(i, j));
        }
        Ok(CliffordIndex { i: i as u8, j: j as u8 })
    }
}

impl fmt::Display for CliffordIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}{}", self.i, self.j)
    }
}

impl Serialize for CliffordIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    index: CliffordIndex,
    matrix: Mat2,
}

impl CliffordElement {
    pub fn index(&self) -> CliffordIndex {
        self.index
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn from_matrix(m: &Mat2) -> Result<Self> {
        Ok(table()[slot(canonicalize(m)?)].clone())
    }
}

impl Serialize for CliffordElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            index: CliffordIndex,
            matrix: [[[f64; 2]; 2]; 2],
        }
        Repr {
            index: self.index,
            matrix: mat_to_array(&self.matrix),
        }
        .serialize(serializer)
    }
}

pub fn mat_to_array(m: &Mat2) -> [[[f64; 2]; 2]; 2] {
    let e = |r: usize, c: usize| [m[(r, c)].re, m[(r, c)].im];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn i_pow(j: u8) -> Complex64 {
    [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(j % 4) as usize]
}

fn raw(i: u8, j: u8) -> Mat2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match i {
        1 => Mat2::new(one, zero, zero, i_pow(j)),
        2 => Mat2::new(zero, one, i_pow(j), zero),
        5 => (raw(1, j) + raw(2, j) * c(0.0, 1.0)) * c(r, 0.0),
        6 => (raw(1, j) - raw(2, j) * c(0.0, 1.0)) * c(r, 0.0),
        3 | 4 => {
            let (d, a) = [(2, 4), (4, 2), (1, 3), (3, 1)][(j - 1) as usize];
            let sign = if i == 3 { 1.0 } else { -1.0 };
            (raw(1, d) + raw(2, a) * c(sign, 0.0)) * c(r, 0.0)
        }
        _ => unreachable!("index checked by caller"),
    }
}

fn slot(idx: CliffordIndex) -> usize {
    (idx.i as usize - 1) * 4 + idx.j as usize - 1
}

fn table() -> &'static [CliffordElement] {
    static TABLE: OnceLock<Vec<CliffordElement>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(24);
        for i in 1..=6u8 {
            for j in 1..=4u8 {
                out.push(CliffordElement {
                    index: CliffordIndex { i, j },
                    matrix: raw(i, j),
                });
            }
        }
        out
    })
}

pub fn a_matrix(i: usize, j: usize) -> Result<CliffordElement> {
    Ok(table()[slot(CliffordIndex::new(i, j)?)].clone())
}

pub fn all_elements() -> &'static [CliffordElement] {
    table()
}

pub fn hadamard() -> CliffordElement {
    table()[slot(CliffordIndex { i: 3, j: 1 })].clone()
}

pub fn phase() -> CliffordElement {
    table()[slot(CliffordIndex { i: 1, j: 1 })].clone()
}

pub fn pauli_x() -> CliffordElement {
    table()[slot(CliffordIndex { i: 2, j: 4 })].clone()
}

pub fn pauli_z() -> CliffordElement {
    table()[slot(CliffordIndex { i: 1, j: 2 })].clone()
}

pub fn identity() -> CliffordElement {
    table()[slot(CliffordIndex::IDENTITY)].clone()
}

/// Scales `m` so its first nonzero entry (row-major) is real positive.
pub fn phase_normalize(m: &Mat2) -> Mat2 {
    let lead = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
        .into_iter()
        .find(|z| z.norm() > MATCH_TOL);
    match lead {
        Some(z) => m * (z.conj() / z.norm()),
        None => *m,
    }
}

/// True iff `a = e^{iφ} b` for some real `φ`, within [`MATCH_TOL`].
pub fn eq_mod_phase(a: &Mat2, b: &Mat2) -> bool {
    (phase_normalize(a) - phase_normalize(b))
        .iter()
        .all(|z| z.norm() < MATCH_TOL)
}

/// `|Tr(a† b)| / 2`; equals 1 exactly when two unitaries agree up to phase.
pub fn fidelity_mod_phase(a: &Mat2, b: &Mat2) -> f64 {
    (a.adjoint() * b).trace().norm() / 2.0
}

pub fn canonicalize(m: &Mat2) -> Result<CliffordIndex> {
    table()
        .iter()
        .find(|e| eq_mod_phase(&e.matrix, m))
        .map(|e| e.index)
        .ok_or(Error::NotClifford)
}

pub fn mul_mod_phase(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    CliffordElement::from_matrix(&(a.matrix * b.matrix))
}

/// Closure of `generators` under multiplication, sorted by index.
pub fn generate(generators: &[CliffordElement]) -> Vec<CliffordElement> {
    let mut seen = BTreeSet::from([CliffordIndex::IDENTITY]);
    let mut queue = VecDeque::from([identity()]);
    while let Some(g) = queue.pop_front() {
        for h in generators {
            let prod = mul_mod_phase(&g, h).expect("closed group");
            if seen.insert(prod.index) {
                queue.push_back(prod);
            }
        }
    }
    seen.into_iter().map(|idx| table()[slot(idx)].clone()).collect()
}

/// Smallest `k >= 1` with `g^k ∝ I`.
pub fn element_order(g: &CliffordElement) -> usize {
    let mut acc = g.clone();
    let mut k = 1;
    while acc.index != CliffordIndex::IDENTITY {
        acc = mul_mod_phase(&acc, g).expect("closed group");
        k += 1;
    }
    k
}

/// `table[a][b]` is the index of `A_a · A_b`, slots in row-major index order.
pub fn multiplication_table() -> Vec<Vec<CliffordIndex>> {
    let all = table();
    all.iter()
        .map(|a| all.iter().map(|b| mul_mod_phase(a, b).expect("closed").index).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct S4Report {
    pub group_order: usize,
    pub pairwise_distinct: bool,
    /// element order → count
    pub order_profile: BTreeMap<usize, usize>,
    pub matches_s4: bool,
}

pub fn verify_s4_profile() -> S4Report {
    let group = generate(&[hadamard(), phase()]);
    let mut profile = BTreeMap::new();
    for g in &group {
        *profile.entry(element_order(g)).or_insert(0) += 1;
    }
    let all = table();
    let pairwise_distinct = all
        .iter()
        .enumerate()
        .all(|(a, x)| all[a + 1..].iter().all(|y| !eq_mod_phase(&x.matrix, &y.matrix)));
    let s4 = BTreeMap::from([(1, 1), (2, 9), (3, 8), (4, 6)]);
    S4Report {
        group_order: group.len(),
        pairwise_distinct,
        matches_s4: profile == s4 && group.len() == 24,
        order_profile: profile,
    }
}

/// A product of powers of generator words, e.g. `[("PX", 2)]` is `(PX)^2`.
pub type Word = &'static [(&'static str, u32)];

fn letter(ch: char) -> Mat2 {
    match ch {
        'H' => hadamard().matrix,
        'P' | 'S' => phase().matrix,
        'X' => pauli_x().matrix,
        'Z' => pauli_z().matrix,
        _ => panic!("unknown gate letter {ch}"),
    }
}

pub fn eval_word(word: Word) -> Mat2 {
    let mut acc = Mat2::identity();
    for &(factor, power) in word {
        let m = factor.chars().fold(Mat2::identity(), |a, ch| a * letter(ch));
        for _ in 0..power {
            acc *= m;
        }
    }
    acc
}

pub fn word_to_string(word: Word) -> String {
    word.iter()
        .map(|&(f, p)| match (f.len(), p) {
            (_, 1) => f.to_string(),
            (1, _) => format!("{f}^{p}"),
            _ => format!("({f})^{p}"),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableId {
    /// Generated by `P` and `X`.
    PhaseBitFlip,
    /// Generated by `H` and `Z`.
    HadamardPhaseFlip,
}

struct Cell {
    i: u8,
    j: u8,
    printed: Word,
    /// Reading that makes the cell agree with its index, where the printed
    /// word does not.
    corrected: Option<Word>,
}

const TABLE_PX: &[Cell] = &[
    Cell {
        i: 1,
        j: 1,
        printed: &[("P", 1)],
        corrected: None,
    },
    Cell {
        i: 1,
        j: 2,
        printed: &[("P", 2)],
        corrected: None,
    },
    Cell {
        i: 1,
        j: 3,
        printed: &[("P", 3)],
        corrected: None,
    },
    Cell {
        i: 1,
        j: 4,
        printed: &[("P", 4)],
        corrected: None,
    },
    Cell {
        i: 2,
        j: 1,
        printed: &[("PX", 1)],
        corrected: None,
    },
    Cell {
        i: 2,
        j: 2,
        printed: &[("PX", 2)],
        corrected: Some(&[("P", 2), ("X", 1)]),
    },
    Cell {
        i: 2,
        j: 3,
        printed: &[("PX", 3)],
        corrected: Some(&[("P", 3), ("X", 1)]),
    },
    Cell {
        i: 2,
        j: 4,
        printed: &[("PX", 4)],
        corrected: Some(&[("P", 4), ("X", 1)]),
    },
];

const TABLE_HZ: &[Cell] = &[
    Cell {
        i: 1,
        j: 2,
        printed: &[("Z", 1)],
        corrected: None,
    },
    Cell {
        i: 1,
        j: 4,
        printed: &[("Z", 2)],
        corrected: None,
    },
    Cell {
        i: 2,
        j: 2,
        printed: &[("ZHZH", 1)],
        corrected: None,
    },
    Cell {
        i: 2,
        j: 4,
        printed: &[("Z", 2), ("HZH", 1)],
        corrected: None,
    },
    Cell {
        i: 3,
        j: 1,
        printed: &[("H", 1)],
        corrected: None,
    },
    Cell {
        i: 3,
        j: 2,
        printed: &[("H", 2), ("ZH", 1)],
        corrected: None,
    },
    Cell {
        i: 4,
        j: 1,
        printed: &[("H", 2), ("Z", 1), ("H", 2)],
        corrected: Some(&[("ZHZ", 1)]),
    },
    Cell {
        i: 4,
        j: 2,
        printed: &[("HZ", 1)],
        corrected: None,
    },
];

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CellReport {
    pub cell: CliffordIndex,
    pub printed_word: String,
    pub printed_value: CliffordIndex,
    pub printed_matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_matches: Option<bool>,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TableReport {
    pub table: TableId,
    pub cells: Vec<CellReport>,
    pub generated: Vec<CliffordIndex>,
    /// The generated subgroup is exactly the set of cell indices.
    pub subgroup_matches_cells: bool,
    pub all_cells_verified: bool,
    /// Cells whose printed word evaluates to a different element.
    pub errata: Vec<CliffordIndex>,
}

pub fn table_generators(id: TableId) -> Vec<CliffordElement> {
    match id {
        TableId::PhaseBitFlip => vec![phase(), pauli_x()],
        TableId::HadamardPhaseFlip => vec![hadamard(), pauli_z()],
    }
}

pub fn verify_table(id: TableId) -> TableReport {
    let cells = match id {
        TableId::PhaseBitFlip => TABLE_PX,
        TableId::HadamardPhaseFlip => TABLE_HZ,
    };
    let generated: Vec<CliffordIndex> = generate(&table_generators(id)).iter().map(|e| e.index).collect();
    let reports: Vec<CellReport> = cells
        .iter()
        .map(|cell| {
            let idx = CliffordIndex { i: cell.i, j: cell.j };
            let printed_value = canonicalize(&eval_word(cell.printed)).expect("words stay in the group");
            let printed_matches = printed_value == idx;
            let corrected_matches = cell
                .corrected
                .map(|w| canonicalize(&eval_word(w)).expect("words stay in the group") == idx);
            CellReport {
                cell: idx,
                printed_word: word_to_string(cell.printed),
                printed_value,
                printed_matches,
                corrected_word: cell.corrected.map(word_to_string),
                corrected_matches,
                verified: printed_matches || corrected_matches == Some(true),
            }
        })
        .collect();
    let cell_set: BTreeSet<CliffordIndex> = reports.iter().map(|r| r.cell).collect();
    let gen_set: BTreeSet<CliffordIndex> = generated.iter().copied().collect();
    TableReport {
        table: id,
        subgroup_matches_cells: cell_set == gen_set,
        all_cells_verified: reports.iter().all(|r| r.verified),
        errata: reports.iter().filter(|r| !r.printed_matches).map(|r| r.cell).collect(),
        cells: reports,
        generated,
    }
}

/// Elements common to the two 8-element subgroups.
pub fn table_intersection() -> Vec<CliffordIndex> {
    let a: BTreeSet<CliffordIndex> = generate(&table_generators(TableId::PhaseBitFlip))
        .iter()
        .map(|e| e.index)
        .collect();
    generate(&table_generators(TableId::HadamardPhaseFlip))
        .iter()
        .map(|e| e.index)
        .filter(|i| a.contains(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: &Mat2, b: &Mat2) -> bool {
        (a - b).iter().all(|z| z.norm() < 1e-14)
    }

    #[test]
    fn named_entries() {
        let p = a_matrix(1, 1).unwrap();
        assert!(close(
            p.matrix(),
            &Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))
        ));
        let h = a_matrix(3, 1).unwrap();
        let r = FRAC_1_SQRT_2;
        assert!(close(
            h.matrix(),
            &Mat2::new(c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0))
        ));
        assert!(close(a_matrix(1, 4).unwrap().matrix(), &Mat2::identity()));
        assert_eq!(a_matrix(7, 1), Err(Error::CliffordIndex(7, 1)));
        assert_eq!(a_matrix(1, 0), Err(Error::CliffordIndex(1, 0)));
    }

    #[test]
    fn every_entry_is_unitary() {
        for e in all_elements() {
            let u = e.matrix().adjoint() * e.matrix();
            assert!(close(&u, &Mat2::identity()), "{}", e.index());
        }
    }

    #[test]
    fn products_mod_phase() {
        let hh = mul_mod_phase(&hadamard(), &hadamard()).unwrap();
        assert_eq!(hh.index(), CliffordIndex::IDENTITY);
        let pp = mul_mod_phase(&phase(), &phase()).unwrap();
        assert_eq!(pp.index(), CliffordIndex { i: 1, j: 2 });
        let shifted = hadamard().matrix() * Complex64::from_polar(1.0, PI / 7.0);
        assert_eq!(canonicalize(&shifted).unwrap(), CliffordIndex { i: 3, j: 1 });
    }

    #[test]
    fn non_clifford_rejected() {
        let t = Mat2::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, PI / 4.0),
        );
        assert_eq!(canonicalize(&t), Err(Error::NotClifford));
    }

    #[test]
    fn small_generated_groups() {
        assert_eq!(generate(&[hadamard(), phase()]).len(), 24);
        assert_eq!(generate(&[phase(), pauli_x()]).len(), 8);
        assert_eq!(generate(&[pauli_z()]).len(), 2);
        let once = generate(&[phase(), pauli_x()]);
        assert_eq!(generate(&once), once);
    }

    #[test]
    fn orders() {
        assert_eq!(element_order(&hadamard()), 2);
        assert_eq!(element_order(&phase()), 4);
        let hp = mul_mod_phase(&hadamard(), &phase()).unwrap();
        assert_eq!(element_order(&hp), 3);
    }

    #[test]
    fn word_rendering() {
        assert_eq!(word_to_string(&[("PX", 2)]), "(PX)^2");
        assert_eq!(word_to_string(&[("H", 2), ("Z", 1), ("H", 1)]), "H^2ZH");
    }

    #[test]
    fn h2zh_is_a32() {
        let m = eval_word(&[("H", 2), ("Z", 1), ("H", 1)]);
        assert_eq!(canonicalize(&m).unwrap(), CliffordIndex { i: 3, j: 2 });
    }
}
