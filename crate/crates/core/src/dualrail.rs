//! Extended dual-rail encoding.
//!
//! A logical qubit occupies a block of `4n` physical qubits laid out as four
//! rows of `n`. With `x = e^{2πi/n}`,
//!
//! ```text
//! |ψ0⟩ = Σ_j x^{j-1} |(j)⟩ ⊗ |0…0⟩ / √n      (2n qubits, row 1 excited)
//! |ψ1⟩ = |0…0⟩ ⊗ Σ_j x^{j-1} |(j)⟩ / √n      (row 2 excited)
//! |0_L⟩ = |ψ0⟩|ψ1⟩,  |1_L⟩ = |ψ1⟩|ψ0⟩
//! ```
//!
//! Register `q` (1-based) owns physical qubits `4n(q-1)+1 ..= 4nq`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::clifford::{self, eq_mod_phase, fidelity_mod_phase, mat_to_array, Mat2};
use crate::error::{Error, Result};
use crate::gates::{u_beta, GateOp, Layer};
use crate::perm::QubitPermutation;
use crate::schedule::Schedule;
use crate::state::{BasisState, SparseState, PRUNE_TOL};

/// Largest logical register simulated through [`LogicalRegister::logical_operator`].
pub const MAX_LOGICAL_QUBITS: usize = 12;

fn check_width(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::IncompatibleRowWidth(n, "row width must be at least 2"));
    }
    Ok(())
}

fn root(n: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

/// Row `row` (0 or 1) of a 2n-qubit pair carries the excitation.
fn psi(n: usize, row: usize) -> Result<SparseState> {
    check_width(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let terms = (0..n)
        .map(|j| {
            let key = BasisState::from_positions(2 * n, &[row * n + j + 1])?;
            Ok((key, root(n, j) * scale))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseState::from_terms(2 * n, terms))
}

pub fn psi0(n: usize) -> Result<SparseState> {
    psi(n, 0)
}

pub fn psi1(n: usize) -> Result<SparseState> {
    psi(n, 1)
}

/// `(|0_L⟩, |1_L⟩)` on `4n` qubits.
pub fn logical_basis(n: usize) -> Result<(SparseState, SparseState)> {
    let (a, b) = (psi0(n)?, psi1(n)?);
    Ok((a.tensor(&b), b.tensor(&a)))
}

/// `Π_j (j, n+j)(2n+j, 3n+j)`: the logical bit flip.
pub fn alpha_perm(n: usize) -> Result<QubitPermutation> {
    LogicalRegister::new(n, 1)?.alpha(1)
}

/// The leftward cycle on row 3; multiplies `|1_L⟩` by `x`.
pub fn gamma_perm(n: usize) -> Result<QubitPermutation> {
    LogicalRegister::new(n, 1)?.gamma(1, 1)
}

pub fn c_beta_schedule(n: usize) -> Result<Schedule> {
    LogicalRegister::new(n, 1)?.c_beta(1)
}

pub fn calibrate_hadamard(n: usize) -> Result<(HadamardCalibration, Schedule)> {
    let reg = LogicalRegister::new(n, 1)?;
    let cal = reg.calibrate_hadamard()?;
    let sched = reg.hadamard(1, &cal)?;
    Ok((cal, sched))
}

/// CNOT on a fresh register holding `max(control, target)` logical qubits.
pub fn cnot_schedule(n: usize, control: usize, target: usize) -> Result<Schedule> {
    LogicalRegister::new(n, control.max(target).max(1))?.cnot(control, target)
}

/// `count` logical qubits of row width `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LogicalRegister {
    n: usize,
    count: usize,
}

impl LogicalRegister {
    pub fn new(n: usize, count: usize) -> Result<Self> {
        check_width(n)?;
        if count == 0 {
            return Err(Error::Invalid("a register needs at least one logical qubit".into()));
        }
        Ok(LogicalRegister { n, count })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn num_qubits(&self) -> usize {
        4 * self.n * self.count
    }

    fn offset(&self, q: usize) -> Result<usize> {
        if q == 0 || q > self.count {
            return Err(Error::RegisterOutOfRange { q, count: self.count });
        }
        Ok(4 * self.n * (q - 1))
    }

    /// 1-based physical labels of logical qubit `q`.
    pub fn block(&self, q: usize) -> Result<std::ops::RangeInclusive<usize>> {
        let o = self.offset(q)?;
        Ok(o + 1..=o + 4 * self.n)
    }

    /// Physical label of position `j` (1-based) in `row` (1..=4) of block `q`.
    pub fn label(&self, q: usize, row: usize, j: usize) -> Result<usize> {
        if !(1..=4).contains(&row) || j == 0 || j > self.n {
            return Err(Error::Invalid(format!(
                "row {row}, column {j} outside a width-{} block",
                self.n
            )));
        }
        Ok(self.offset(q)? + (row - 1) * self.n + j)
    }

    /// Product of logical basis states; `bits[0]` is register 1.
    pub fn basis_state(&self, bits: &[bool]) -> Result<SparseState> {
        if bits.len() != self.count {
            return Err(Error::Invalid(format!(
                "expected {} logical bits, got {}",
                self.count,
                bits.len()
            )));
        }
        let (zero, one) = logical_basis(self.n)?;
        let mut acc: Option<SparseState> = None;
        for &b in bits {
            let s = if b { &one } else { &zero };
            acc = Some(match acc {
                None => s.clone(),
                Some(a) => a.tensor(s),
            });
        }
        Ok(acc.expect("count >= 1"))
    }

    /// Basis state for the integer `index`, register 1 most significant.
    pub fn basis_index(&self, index: usize) -> Result<SparseState> {
        self.basis_state(&index_bits(index, self.count))
    }

    pub fn alpha(&self, q: usize) -> Result<QubitPermutation> {
        let mut cycles = Vec::with_capacity(2 * self.n);
        for j in 1..=self.n {
            cycles.push(vec![self.label(q, 1, j)?, self.label(q, 2, j)?]);
            cycles.push(vec![self.label(q, 3, j)?, self.label(q, 4, j)?]);
        }
        QubitPermutation::from_cycles(self.num_qubits(), &cycles)
    }

    /// `γ^k` on block `q`; `k` is taken mod `n`.
    pub fn gamma(&self, q: usize, k: i64) -> Result<QubitPermutation> {
        let cycle = (1..=self.n)
            .rev()
            .map(|j| self.label(q, 3, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(QubitPermutation::from_cycles(self.num_qubits(), &[cycle])?.power(k))
    }

    fn perm_schedule(&self, tag: &str, perm: QubitPermutation) -> Schedule {
        let mut s = Schedule::new(self.num_qubits());
        s.push_perm(tag, perm);
        s
    }

    /// Logical X.
    pub fn bit_flip(&self, q: usize) -> Result<Schedule> {
        Ok(self.perm_schedule("X", self.alpha(q)?))
    }

    /// `diag(1, x^k)` on logical qubit `q`.
    pub fn phase_power(&self, q: usize, k: i64, tag: &str) -> Result<Schedule> {
        Ok(self.perm_schedule(tag, self.gamma(q, k)?))
    }

    fn gamma_fraction(&self, q: usize, divisor: usize, tag: &str) -> Result<Schedule> {
        if !self.n.is_multiple_of(divisor) {
            return Err(Error::IncompatibleRowWidth(
                self.n,
                "phase gate needs a finer root of unity",
            ));
        }
        self.phase_power(q, (self.n / divisor) as i64, tag)
    }

    pub fn z(&self, q: usize) -> Result<Schedule> {
        self.gamma_fraction(q, 2, "Z")
    }

    /// The phase gate `P = S = diag(1, i)`.
    pub fn s(&self, q: usize) -> Result<Schedule> {
        self.gamma_fraction(q, 4, "S")
    }

    pub fn t(&self, q: usize) -> Result<Schedule> {
        self.gamma_fraction(q, 8, "T")
    }

    pub fn t_dagger(&self, q: usize) -> Result<Schedule> {
        if !self.n.is_multiple_of(8) {
            return Err(Error::IncompatibleRowWidth(
                self.n,
                "phase gate needs a finer root of unity",
            ));
        }
        self.phase_power(q, -((self.n / 8) as i64), "Tdg")
    }

    /// Fredkins controlled by row 2 swapping rows 3 and 4 of block `q`:
    /// control `(2, j)` with swap column `t` sits in layer `(j + t) mod n`.
    pub fn c_beta(&self, q: usize) -> Result<Schedule> {
        let n = self.n;
        let mut s = Schedule::new(self.num_qubits());
        for layer in 0..n {
            let mut ops = Vec::with_capacity(n);
            for j in 1..=n {
                let t = (layer + 2 * n - j % n) % n;
                let t = if t == 0 { n } else { t };
                ops.push(GateOp::Fredkin {
                    control: self.label(q, 2, j)?,
                    a: self.label(q, 3, t)?,
                    b: self.label(q, 4, t)?,
                });
            }
            s.push(Layer::tagged("C_beta", ops));
        }
        Ok(s)
    }

    /// `C_β U_β C_β` without phase correction.
    pub fn hadamard_core(&self, q: usize) -> Result<Schedule> {
        let mut s = self.c_beta(q)?;
        let (mut layer, phase) = u_beta(self.n, self.offset(q)?);
        layer.ops.push(phase);
        s.push(layer);
        s.append(self.c_beta(q)?)?;
        Ok(s)
    }

    /// Finds `γ` powers around the core that make it a Hadamard.
    pub fn calibrate_hadamard(&self) -> Result<HadamardCalibration> {
        let n = self.n;
        let single = LogicalRegister::new(n, 1)?;
        let core = single.logical_operator(&single.hadamard_core(1)?)?;
        let core = Mat2::new(
            core.matrix[(0, 0)],
            core.matrix[(0, 1)],
            core.matrix[(1, 0)],
            core.matrix[(1, 1)],
        );
        let h = *clifford::hadamard().matrix();
        let d = |k: usize| {
            Mat2::new(
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                root(n, k),
            )
        };
        let left_only_power = (0..n).find(|&k| eq_mod_phase(&(d(k) * core), &h));
        let (pre, post) = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .find(|&(a, b)| eq_mod_phase(&(d(b) * core * d(a)), &h))
            .ok_or(Error::NoCalibration(n))?;
        let calibrated = d(post) * core * d(pre);
        Ok(HadamardCalibration {
            n,
            pre_power: pre,
            post_power: post,
            left_only_power,
            core: mat_to_array(&core),
            calibrated: mat_to_array(&calibrated),
            global_phase: calibrated[(0, 0)].arg(),
            fidelity: fidelity_mod_phase(&calibrated, &h),
        })
    }

    /// `γ^post C_β U_β C_β γ^pre` on block `q`; `2n+1` timesteps.
    pub fn hadamard(&self, q: usize, cal: &HadamardCalibration) -> Result<Schedule> {
        if cal.n != self.n {
            return Err(Error::QubitCountMismatch {
                left: self.n,
                right: cal.n,
            });
        }
        let mut s = Schedule::new(self.num_qubits());
        if cal.pre_power != 0 {
            s.push_perm("H_pre", self.gamma(q, cal.pre_power as i64)?);
        }
        s.append(self.hadamard_core(q)?)?;
        if cal.post_power != 0 {
            s.push_perm("H_post", self.gamma(q, cal.post_power as i64)?);
        }
        Ok(s)
    }

    /// `2n²` Fredkins in `n` layers. Control row 2 swaps target rows 1↔2,
    /// control row 3 swaps target rows 3↔4; column `i` of the control is
    /// paired with column `j = (layer - i) mod n` of the target.
    pub fn cnot(&self, control: usize, target: usize) -> Result<Schedule> {
        self.offset(control)?;
        self.offset(target)?;
        if control == target {
            return Err(Error::RegisterOverlap);
        }
        let n = self.n;
        let mut s = Schedule::new(self.num_qubits());
        for layer in 0..n {
            let mut ops = Vec::with_capacity(2 * n);
            for i in 1..=n {
                let j = (layer + 2 * n - i % n) % n;
                let j = if j == 0 { n } else { j };
                ops.push(GateOp::Fredkin {
                    control: self.label(control, 2, i)?,
                    a: self.label(target, 1, j)?,
                    b: self.label(target, 2, j)?,
                });
                ops.push(GateOp::Fredkin {
                    control: self.label(control, 3, i)?,
                    a: self.label(target, 3, j)?,
                    b: self.label(target, 4, j)?,
                });
            }
            s.push(Layer::tagged("CNOT", ops));
        }
        Ok(s)
    }

    /// Logical amplitude table of `state` plus the norm of what lies outside
    /// the logical span.
    pub fn decode(&self, state: &SparseState) -> Result<DecodeTable> {
        if state.num_qubits() != self.num_qubits() {
            return Err(Error::QubitCountMismatch {
                left: self.num_qubits(),
                right: state.num_qubits(),
            });
        }
        let expected = 2 * self.count;
        if state.terms().iter().any(|(k, _)| k.weight() != expected) {
            return Err(Error::WrongWeight { expected });
        }
        let dim = 1usize << self.count;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        let mut present = vec![0usize; dim];
        let mut leak = 0.0;
        let mut classified = Vec::with_capacity(state.len());
        for (key, a) in state.terms() {
            match self.classify(key) {
                Some((b, coef)) => {
                    amps[b] += coef.conj() * a;
                    present[b] += 1;
                    classified.push(Some((b, coef)));
                }
                None => {
                    leak += a.norm_sqr();
                    classified.push(None);
                }
            }
        }
        // Every logical product state spreads evenly over n^(2·count) keys,
        // so the part of the projection missing from `state` is counted
        // exactly instead of subtracted.
        let support = (self.n as f64).powi(2 * self.count as i32);
        let mut residual_sq = leak;
        for ((_, a), c) in state.terms().iter().zip(&classified) {
            if let Some((b, coef)) = c {
                residual_sq += (a - amps[*b] * coef).norm_sqr();
            }
        }
        for b in 0..dim {
            residual_sq += amps[b].norm_sqr() * (support - present[b] as f64) / support;
        }
        Ok(DecodeTable {
            count: self.count,
            amplitudes: amps,
            residual: residual_sq.sqrt(),
        })
    }

    /// Logical bit string of `key` (register 1 most significant) and the
    /// amplitude the matching product state gives it.
    fn classify(&self, key: &BasisState) -> Option<(usize, Complex64)> {
        let n = self.n;
        let width = 4 * n;
        let mut per_block: Vec<[usize; 2]> = vec![[usize::MAX; 2]; self.count];
        let mut fill = vec![0usize; self.count];
        for q in key.ones() {
            let blk = q / width;
            if blk >= self.count || fill[blk] == 2 {
                return None;
            }
            per_block[blk][fill[blk]] = q % width;
            fill[blk] += 1;
        }
        let mut index = 0;
        let mut phase = 0usize;
        for (slots, f) in per_block.iter().zip(&fill) {
            if *f != 2 {
                return None;
            }
            let (p, r) = (slots[0], slots[1]);
            let bit = match (p / n, r / n) {
                (0, 3) => 0,
                (1, 2) => 1,
                _ => return None,
            };
            index = (index << 1) | bit;
            phase += p % n + r % n;
        }
        let scale = (n as f64).powi(-(self.count as i32));
        Some((index, root(n, phase) * scale))
    }

    /// Columns are the decoded images of the logical basis states.
    pub fn logical_operator(&self, schedule: &Schedule) -> Result<LogicalOperator> {
        if self.count > MAX_LOGICAL_QUBITS {
            return Err(Error::DimensionOverflow(1 << self.count));
        }
        let dim = 1usize << self.count;
        let tables = (0..dim)
            .into_par_iter()
            .map(|col| self.decode(&schedule.apply(&self.basis_index(col)?)?))
            .collect::<Result<Vec<_>>>()?;
        let matrix = DMatrix::from_fn(dim, dim, |row, col| tables[col].amplitudes[row]);
        let max_residual = tables.iter().map(|t| t.residual).fold(0.0, f64::max);
        Ok(LogicalOperator { matrix, max_residual })
    }
}

/// Bits of `index` with the most significant first.
pub fn index_bits(index: usize, count: usize) -> Vec<bool> {
    (0..count).rev().map(|s| (index >> s) & 1 == 1).collect()
}

pub fn bits_to_string(index: usize, count: usize) -> String {
    index_bits(index, count)
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeTable {
    pub count: usize,
    /// Indexed by logical bit string, register 1 most significant.
    pub amplitudes: Vec<Complex64>,
    pub residual: f64,
}

impl DecodeTable {
    pub fn amplitude(&self, bits: &str) -> Option<Complex64> {
        if bits.len() != self.count {
            return None;
        }
        usize::from_str_radix(bits, 2).ok().map(|i| self.amplitudes[i])
    }

    pub fn max_deviation(&self, other: &DecodeTable) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold((self.residual - other.residual).abs(), f64::max)
    }
}

impl Serialize for DecodeTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Amps<'a>(&'a DecodeTable);
        impl Serialize for Amps<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(None)?;
                for (i, a) in self.0.amplitudes.iter().enumerate() {
                    if a.norm() > PRUNE_TOL {
                        map.serialize_entry(&bits_to_string(i, self.0.count), &[a.re, a.im])?;
                    }
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("amplitudes", &Amps(self))?;
        map.serialize_entry("residual", &self.residual)?;
        map.end()
    }
}

#[derive(Clone, Debug)]
pub struct LogicalOperator {
    pub matrix: DMatrix<Complex64>,
    pub max_residual: f64,
}

impl LogicalOperator {
    /// `|Tr(A† B)| / dim`, equal to 1 iff the two agree up to global phase
    /// (for unitary `A` and `B`).
    pub fn fidelity_mod_phase(&self, target: &DMatrix<Complex64>) -> f64 {
        (self.matrix.adjoint() * target).trace().norm() / self.matrix.nrows() as f64
    }

    /// Largest entry difference after aligning the global phase on the
    /// largest entry of `target`.
    pub fn deviation_mod_phase(&self, target: &DMatrix<Complex64>) -> f64 {
        let (idx, _) = target
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("non-empty");
        let (a, t) = (self.matrix.as_slice()[idx], target.as_slice()[idx]);
        if a.norm() < PRUNE_TOL {
            return f64::INFINITY;
        }
        let phase = t / a * (a.norm() / t.norm());
        (self.matrix.map(|z| z * phase) - target)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HadamardCalibration {
    pub n: usize,
    /// `γ` power applied before the core.
    pub pre_power: usize,
    /// `γ` power applied after the core.
    pub post_power: usize,
    /// A single left correction, when one exists.
    pub left_only_power: Option<usize>,
    pub core: [[[f64; 2]; 2]; 2],
    pub calibrated: [[[f64; 2]; 2]; 2],
    pub global_phase: f64,
    pub fidelity: f64,
}

/// Logical CNOT on `count` bits, register `control` and `target` 1-based.
pub fn cnot_truth_table(count: usize, control: usize, target: usize) -> BTreeMap<usize, usize> {
    (0..1usize << count)
        .map(|b| {
            let c = (b >> (count - control)) & 1;
            (b, b ^ (c << (count - target)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn psi0_small() {
        let p = psi0(2).unwrap();
        let want = SparseState::from_terms(
            4,
            [
                (BasisState::from_bit_string("1000").unwrap(), c(FRAC_1_SQRT_2, 0.0)),
                (BasisState::from_bit_string("0100").unwrap(), c(-FRAC_1_SQRT_2, 0.0)),
            ],
        );
        assert!(p.max_deviation(&want).unwrap() < 1e-15);
        let p4 = psi0(4).unwrap();
        for (j, z) in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
            .iter()
            .enumerate()
        {
            let key = BasisState::from_positions(8, &[j + 1]).unwrap();
            assert!((p4.amplitude(&key) - z * 0.5).norm() < 1e-15);
        }
        assert!(psi0(1).is_err());
    }

    #[test]
    fn logical_basis_is_orthonormal() {
        for n in [2, 3, 4] {
            let (z, o) = logical_basis(n).unwrap();
            assert!(z.inner_product(&o).unwrap().norm() < 1e-15);
            assert!((z.norm() - 1.0).abs() < 1e-14);
            assert_eq!(z.weight(), Some(2));
            assert_eq!(z.len(), n * n);
        }
    }

    #[test]
    fn labels_and_blocks() {
        let r = LogicalRegister::new(3, 2).unwrap();
        assert_eq!(r.num_qubits(), 24);
        assert_eq!(r.block(2).unwrap(), 13..=24);
        assert_eq!(r.label(2, 3, 1).unwrap(), 19);
        assert!(matches!(r.block(3), Err(Error::RegisterOutOfRange { .. })));
    }

    #[test]
    fn c_beta_layers_are_latin() {
        let n = 5;
        let s = c_beta_schedule(n).unwrap();
        s.validate().unwrap();
        assert_eq!(s.timesteps(), n);
        assert_eq!(s.fredkin_count(), n * n);
    }

    #[test]
    fn decode_product() {
        let r = LogicalRegister::new(2, 2).unwrap();
        let t = r.decode(&r.basis_state(&[false, true]).unwrap()).unwrap();
        assert!((t.amplitude("01").unwrap() - 1.0).norm() < 1e-14);
        assert!(t.residual < 1e-12);
        assert_eq!(t.amplitude("0"), None);
    }

    #[test]
    fn decode_counts_missing_support() {
        // Dropping one term of |0_L⟩ leaves a state whose projection is not
        // itself.
        let r = LogicalRegister::new(2, 1).unwrap();
        let (z, _) = logical_basis(2).unwrap();
        let partial = SparseState::from_terms(8, z.terms()[1..].iter().cloned());
        let t = r.decode(&partial).unwrap();
        // ⟨0_L|partial⟩ = 3/4; residual² = 3/4 - (3/4)² = 3/16.
        assert!((t.amplitudes[0] - 0.75).norm() < 1e-14);
        assert!((t.residual - (3.0f64 / 16.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn decode_rejects_wrong_weight() {
        let r = LogicalRegister::new(2, 1).unwrap();
        let s = SparseState::make_excited(8, &[1]).unwrap();
        assert_eq!(r.decode(&s), Err(Error::WrongWeight { expected: 2 }));
    }

    #[test]
    fn hadamard_calibration_small() {
        for n in [4, 8] {
            let (cal, s) = calibrate_hadamard(n).unwrap();
            assert_eq!(s.timesteps(), 2 * n + 1);
            assert!((cal.fidelity - 1.0).abs() < 1e-12);
        }
        assert_eq!(calibrate_hadamard(6).unwrap_err(), Error::NoCalibration(6));
    }

    #[test]
    fn cnot_rejects_same_register() {
        assert_eq!(cnot_schedule(2, 1, 1).unwrap_err(), Error::RegisterOverlap);
    }

    #[test]
    fn truth_table_indexing() {
        let t = cnot_truth_table(2, 1, 2);
        assert_eq!(t[&0b10], 0b11);
        assert_eq!(t[&0b01], 0b01);
        let t = cnot_truth_table(2, 2, 1);
        assert_eq!(t[&0b01], 0b11);
    }
}
