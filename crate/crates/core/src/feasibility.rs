//! Can a pair of qubit permutations realize the generators `P` and `H` of
//! the single-qubit Clifford group on some encoded qubit?
//!
//! A code basis `(u, v)` must satisfy
//!
//! ```text
//! P u = z1 u,   P v = i z1 v,   H u = z2 (u + v)/√2,   H v = z2 (u - v)/√2
//! ```
//!
//! for unit scalars `z1`, `z2`. Qubit permutations preserve Hamming weight,
//! so everything is solved inside one weight-`k` block of dimension
//! `D = C(M, k)`.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{self, canonicalize, CliffordIndex, Mat2};
use crate::error::{Error, Result};
use crate::induced::{binomial, InducedAction, RootOfUnity};
use crate::perm::QubitPermutation;
use crate::schedule::SCHEMA_VERSION;
use crate::state::SparseState;

/// Singular values below this count as zero.
pub const SINGULAR_TOL: f64 = 1e-9;
/// Generator equations must hold to this for a reported solution.
pub const EQUATION_TOL: f64 = 1e-10;
/// Largest block dimension `D` accepted by the dense rank check.
pub const MAX_DENSE_DIM: usize = 1024;
/// Largest `M` for exhaustive search.
pub const MAX_EXHAUSTIVE_M: usize = 5;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityProblem {
    pub m: usize,
    pub k: usize,
    pub perm_p: QubitPermutation,
    pub perm_h: QubitPermutation,
    pub z1: Complex64,
    pub z2: Complex64,
}

impl FeasibilityProblem {
    pub fn new(
        k: usize,
        perm_p: QubitPermutation,
        perm_h: QubitPermutation,
        z1: Complex64,
        z2: Complex64,
    ) -> Result<Self> {
        let m = perm_p.num_qubits();
        if perm_h.num_qubits() != m {
            return Err(Error::QubitCountMismatch {
                left: m,
                right: perm_h.num_qubits(),
            });
        }
        if k > m {
            return Err(Error::WeightOutOfRange { k, n: m });
        }
        for z in [z1, z2] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite);
            }
            if (z.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnitModulus(z.norm()));
            }
        }
        Ok(FeasibilityProblem {
            m,
            k,
            perm_p,
            perm_h,
            z1,
            z2,
        })
    }

    pub fn from_roots(
        k: usize,
        perm_p: QubitPermutation,
        perm_h: QubitPermutation,
        z1: RootOfUnity,
        z2: RootOfUnity,
    ) -> Result<Self> {
        Self::new(k, perm_p, perm_h, z1.value(), z2.value())
    }
}

/// Orthonormal basis of the null space of `m`, as columns.
pub fn nullspace(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // The thin SVD only returns all right singular vectors when rows >= cols.
    let padded;
    let m = if m.nrows() < cols {
        padded = m.clone().resize_vertically(cols, Complex64::new(0.0, 0.0));
        &padded
    } else {
        m
    };
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let picks: Vec<usize> = (0..cols).filter(|&i| svd.singular_values[i] < SINGULAR_TOL).collect();
    DMatrix::from_fn(cols, picks.len(), |r, c| v_t[(picks[c], r)].conj())
}

pub fn numerical_rank(m: &DMatrix<Complex64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    m.clone()
        .singular_values()
        .iter()
        .filter(|&&s| s >= SINGULAR_TOL)
        .count()
}

/// Solves the `H` equations for `u = U a`, `v = V b`, given `hu = H U`
/// and `hv = H V`. Returns the stacked coefficient null space.
fn solve_core(
    u: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
    hu: &DMatrix<Complex64>,
    hv: &DMatrix<Complex64>,
    z2: Complex64,
) -> DMatrix<Complex64> {
    let (d, r, s) = (u.nrows(), u.ncols(), v.ncols());
    if r + s == 0 {
        return DMatrix::zeros(0, 0);
    }
    let root2 = std::f64::consts::SQRT_2;
    let mut b = DMatrix::zeros(2 * d, r + s);
    // Row block 1: √2 H u - z2 u - z2 v; row block 2: -z2 u + √2 H v + z2 v.
    b.view_mut((0, 0), (d, r)).copy_from(&(hu * cz(root2, 0.0) - u * z2));
    b.view_mut((0, r), (d, s)).copy_from(&(v * -z2));
    b.view_mut((d, 0), (d, r)).copy_from(&(u * -z2));
    b.view_mut((d, r), (d, s)).copy_from(&(hv * cz(root2, 0.0) + v * z2));
    nullspace(&b)
}

/// Solutions found for dense matrices `P` and `H`, not necessarily
/// permutations.
#[derive(Clone, Debug)]
pub struct DenseSolution {
    pub u_dim: usize,
    pub v_dim: usize,
    pub pairs: Vec<(DVector<Complex64>, DVector<Complex64>)>,
}

/// Kernel intersection for arbitrary square `P`, `H`.
pub fn kernel_intersection_dense(
    p: &DMatrix<Complex64>,
    h: &DMatrix<Complex64>,
    z1: Complex64,
    z2: Complex64,
) -> DenseSolution {
    let d = p.nrows();
    let eye = DMatrix::<Complex64>::identity(d, d);
    let u = nullspace(&(p - &eye * z1));
    let v = nullspace(&(p - &eye * (I * z1)));
    let u = if u.ncols() == 0 { DMatrix::zeros(d, 0) } else { u };
    let v = if v.ncols() == 0 { DMatrix::zeros(d, 0) } else { v };
    let coeffs = solve_core(&u, &v, &(h * &u), &(h * &v), z2);
    DenseSolution {
        u_dim: u.ncols(),
        v_dim: v.ncols(),
        pairs: split_pairs(&u, &v, &coeffs),
    }
}

fn split_pairs(
    u: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
    coeffs: &DMatrix<Complex64>,
) -> Vec<(DVector<Complex64>, DVector<Complex64>)> {
    let r = u.ncols();
    (0..coeffs.ncols())
        .map(|c| {
            let col = coeffs.column(c);
            let a = col.rows(0, r).into_owned();
            let b = col.rows(r, v.ncols()).into_owned();
            (u * a, v * b)
        })
        .collect()
}

fn eigen_matrix(act: &InducedAction, lambda: Complex64) -> DMatrix<Complex64> {
    let vecs = act.eigenvectors(lambda);
    let mut m = DMatrix::zeros(act.dim(), vecs.len());
    for (c, vec) in vecs.iter().enumerate() {
        for &(i, a) in vec {
            m[(i, c)] = a;
        }
    }
    m
}

/// `H X` for the permutation matrix of `act`.
fn permute_rows(act: &InducedAction, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for (i, &img) in act.image().iter().enumerate() {
        out.row_mut(img).copy_from(&x.row(i));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionPair {
    pub u: SparseState,
    pub v: SparseState,
    pub equation_residual: f64,
    pub logical_p: Option<CliffordIndex>,
    pub logical_h: Option<CliffordIndex>,
    /// The pair reproduces `P` and `H` mod phase on `span{u, v}`.
    pub reproduces_generators: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FeasibilityDiagnostics {
    pub block_dim: usize,
    /// Dimension of the `z1` eigenspace of `P`.
    pub u_dim: usize,
    /// Dimension of the `i·z1` eigenspace of `P`.
    pub v_dim: usize,
    /// Sum of all eigenspace multiplicities of `P` on the block.
    pub spectrum_total: usize,
    pub nullity: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub diagnostics: FeasibilityDiagnostics,
    pub solutions: Vec<SolutionPair>,
}

pub fn kernel_intersection(problem: &FeasibilityProblem) -> Result<FeasibilityReport> {
    let act_p = InducedAction::new(&problem.perm_p, problem.k)?;
    let act_h = InducedAction::new(&problem.perm_h, problem.k)?;
    let u = eigen_matrix(&act_p, problem.z1);
    let v = eigen_matrix(&act_p, I * problem.z1);
    let coeffs = solve_core(&u, &v, &permute_rows(&act_h, &u), &permute_rows(&act_h, &v), problem.z2);
    let nullity = coeffs.ncols();
    let solutions = split_pairs(&u, &v, &coeffs)
        .into_iter()
        .map(|(uv, vv)| {
            let to_state = |x: &DVector<Complex64>| {
                let coords: Vec<(usize, Complex64)> = x.iter().copied().enumerate().collect();
                act_p.to_state(&coords)
            };
            check_solution(problem, &to_state(&uv), &to_state(&vv))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeasibilityReport {
        feasible: nullity > 0,
        diagnostics: FeasibilityDiagnostics {
            block_dim: act_p.dim(),
            u_dim: u.ncols(),
            v_dim: v.ncols(),
            spectrum_total: act_p.spectrum().values().sum(),
            nullity,
        },
        solutions,
    })
}

fn logical_2x2(perm: &QubitPermutation, e0: &SparseState, e1: &SparseState) -> Result<Mat2> {
    let mut m = Mat2::zeros();
    for (c, col) in [e0, e1].into_iter().enumerate() {
        let img = perm.apply(col)?;
        m[(0, c)] = e0.inner_product(&img)?;
        m[(1, c)] = e1.inner_product(&img)?;
    }
    Ok(m)
}

/// Checks the four generator equations and the induced logical matrices.
pub fn check_solution(problem: &FeasibilityProblem, u: &SparseState, v: &SparseState) -> Result<SolutionPair> {
    let (nu, nv) = (u.norm(), v.norm());
    if nu < SINGULAR_TOL || nv < SINGULAR_TOL {
        return Err(Error::Invalid("solution has a zero component".into()));
    }
    let u = u.scale(cz(1.0 / nu, 0.0));
    let v = v.scale(cz(1.0 / nv, 0.0));
    let (p, h, z1, z2) = (&problem.perm_p, &problem.perm_h, problem.z1, problem.z2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sum = SparseState::superpose([(z2 * r, &u), (z2 * r, &v)])?;
    let diff = SparseState::superpose([(z2 * r, &u), (-z2 * r, &v)])?;
    let residual = [
        p.apply(&u)?.distance(&u.scale(z1))?,
        p.apply(&v)?.distance(&v.scale(I * z1))?,
        h.apply(&u)?.distance(&sum)?,
        h.apply(&v)?.distance(&diff)?,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let logical_p = canonicalize(&logical_2x2(p, &u, &v)?).ok();
    let logical_h = canonicalize(&logical_2x2(h, &u, &v)?).ok();
    Ok(SolutionPair {
        reproduces_generators: residual < EQUATION_TOL
            && logical_p == Some(clifford::phase().index())
            && logical_h == Some(clifford::hadamard().index()),
        u,
        v,
        equation_residual: residual,
        logical_p,
        logical_h,
    })
}

fn permutation_matrix(act: &InducedAction) -> DMatrix<Complex64> {
    let d = act.dim();
    let mut m = DMatrix::zeros(d, d);
    for (i, &img) in act.image().iter().enumerate() {
        m[(img, i)] = cz(1.0, 0.0);
    }
    m
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RankReport {
    pub block_dim: usize,
    /// Rank of the stacked `4D × 2D` matrix `[A; A']`.
    pub rank: usize,
    pub nullity: usize,
    /// `rank < 2D`.
    pub deficient: bool,
    /// Nullity of `A` alone; equals the two eigenspace dimensions combined.
    pub nullity_a: usize,
    /// Nullity with `A` replaced by `diag(P - z1, P - i z1)`.
    pub variant_nullity: usize,
}

/// Dense rank test of `[A; A']` on the weight-`k` block.
pub fn rank_check(problem: &FeasibilityProblem) -> Result<RankReport> {
    let d = binomial(problem.m, problem.k);
    if d > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow(d));
    }
    let p = permutation_matrix(&InducedAction::new(&problem.perm_p, problem.k)?);
    let h = permutation_matrix(&InducedAction::new(&problem.perm_h, problem.k)?);
    let eye = DMatrix::<Complex64>::identity(d, d);
    let (z1, z2) = (problem.z1, problem.z2);
    let root2 = cz(std::f64::consts::SQRT_2, 0.0);

    let block_diag = |a: DMatrix<Complex64>, b: DMatrix<Complex64>| {
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&a);
        m.view_mut((d, d), (d, d)).copy_from(&b);
        m
    };
    let a = block_diag(&p - &eye * z1, &p * -I - &eye * z1);
    let a_variant = block_diag(&p - &eye * z1, &p - &eye * (I * z1));
    let mut a_prime = DMatrix::zeros(2 * d, 2 * d);
    a_prime.view_mut((0, 0), (d, d)).copy_from(&(&h * root2 - &eye * z2));
    a_prime.view_mut((0, d), (d, d)).copy_from(&(&eye * -z2));
    a_prime.view_mut((d, 0), (d, d)).copy_from(&(&eye * -z2));
    a_prime.view_mut((d, d), (d, d)).copy_from(&(&h * root2 + &eye * z2));

    let stack = |top: &DMatrix<Complex64>| {
        let mut m = DMatrix::zeros(4 * d, 2 * d);
        m.view_mut((0, 0), (2 * d, 2 * d)).copy_from(top);
        m.view_mut((2 * d, 0), (2 * d, 2 * d)).copy_from(&a_prime);
        m
    };
    let rank = numerical_rank(&stack(&a));
    let variant_rank = numerical_rank(&stack(&a_variant));
    Ok(RankReport {
        block_dim: d,
        rank,
        nullity: 2 * d - rank,
        deficient: rank < 2 * d,
        nullity_a: 2 * d - numerical_rank(&a),
        variant_nullity: 2 * d - variant_rank,
    })
}

/// Every `c`-th root of unity for each orbit length `c` of the induced
/// weight-`k` action.
pub fn z_candidates(perm: &QubitPermutation, k: usize) -> Result<Vec<RootOfUnity>> {
    Ok(InducedAction::new(perm, k)?.spectrum().into_keys().collect())
}

/// `z1` values with both `z1` and `i·z1` in the spectrum of `P`.
pub fn z1_candidates(spectrum_p: &BTreeSet<RootOfUnity>) -> Vec<RootOfUnity> {
    spectrum_p
        .iter()
        .copied()
        .filter(|z| spectrum_p.contains(&z.mul(RootOfUnity::I)))
        .collect()
}

/// `z2` values with both `z2` and `-z2` in the spectrum of `H`.
pub fn z2_candidates(spectrum_h: &BTreeSet<RootOfUnity>) -> Vec<RootOfUnity> {
    spectrum_h
        .iter()
        .copied()
        .filter(|z| spectrum_h.contains(&z.neg()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitFilter {
    pub passed: bool,
    /// Orbit lengths of `P` divisible by 4.
    pub p_orbits_div4: Vec<usize>,
    /// Orbit lengths of `HP` divisible by 3.
    pub hp_orbits_div3: Vec<usize>,
}

/// Necessary condition only: `P` needs an orbit length divisible by 4 and
/// the product `HP` one divisible by 3.
pub fn orbit_filter(perm_p: &QubitPermutation, perm_hp: &QubitPermutation, k: usize) -> Result<OrbitFilter> {
    let pick = |perm: &QubitPermutation, d: usize| -> Result<Vec<usize>> {
        let set: BTreeSet<usize> = InducedAction::new(perm, k)?
            .orbit_lengths()
            .into_iter()
            .filter(|c| c % d == 0)
            .collect();
        Ok(set.into_iter().collect())
    };
    let p4 = pick(perm_p, 4)?;
    let hp3 = pick(perm_hp, 3)?;
    Ok(OrbitFilter {
        passed: !p4.is_empty() && !hp3.is_empty(),
        p_orbits_div4: p4,
        hp_orbits_div3: hp3,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Structured,
    Random,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "structured" => Ok(Strategy::Structured),
            "random" => Ok(Strategy::Random),
            other => Err(Error::Invalid(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchConfig {
    pub m: usize,
    /// `None` scans every weight.
    pub k: Option<usize>,
    pub strategy: Strategy,
    pub seed: u64,
    /// Largest candidate index evaluated.
    pub budget: Option<u64>,
}

/// Partitions of `m` in descending order, largest parts first.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

/// One permutation per cycle type, cycles on consecutive labels.
pub fn class_representatives(m: usize) -> Vec<QubitPermutation> {
    partitions(m)
        .into_iter()
        .map(|parts| {
            let mut start = 1;
            let cycles: Vec<Vec<usize>> = parts
                .iter()
                .map(|&len| {
                    let c = (start..start + len).collect();
                    start += len;
                    c
                })
                .collect();
            QubitPermutation::from_cycles(m, &cycles).expect("disjoint cycles")
        })
        .collect()
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// Permutation of rank `index` in lexicographic order of images.
pub fn nth_permutation(m: usize, mut index: u64) -> QubitPermutation {
    let mut pool: Vec<usize> = (1..=m).collect();
    let mut image = Vec::with_capacity(m);
    for i in (0..m).rev() {
        let f = factorial(i);
        let pos = (index / f) as usize;
        index %= f;
        image.push(pool.remove(pos));
    }
    QubitPermutation::from_image(&image).expect("bijection")
}

fn candidate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_permutation<R: Rng>(m: usize, rng: &mut R) -> QubitPermutation {
    let mut image: Vec<usize> = (1..=m).collect();
    image.shuffle(rng);
    QubitPermutation::from_image(&image).expect("bijection")
}

fn random_involution<R: Rng>(m: usize, rng: &mut R) -> QubitPermutation {
    let mut labels: Vec<usize> = (1..=m).collect();
    labels.shuffle(rng);
    let pairs = rng.random_range(1..=(m / 2).max(1)).min(m / 2);
    let cycles: Vec<Vec<usize>> = labels.chunks(2).take(pairs).map(|c| c.to_vec()).collect();
    QubitPermutation::from_cycles(m, &cycles).expect("disjoint pairs")
}

/// Candidate enumeration shared by every strategy.
struct Space {
    m: usize,
    weights: Vec<usize>,
    reps: Vec<QubitPermutation>,
    strategy: Strategy,
    seed: u64,
}

impl Space {
    fn new(cfg: &SearchConfig) -> Result<Self> {
        if let Some(k) = cfg.k {
            if k > cfg.m {
                return Err(Error::WeightOutOfRange { k, n: cfg.m });
            }
        }
        if cfg.m == 0 {
            return Err(Error::Invalid("M must be positive".into()));
        }
        if cfg.strategy == Strategy::Exhaustive && cfg.m > MAX_EXHAUSTIVE_M {
            return Err(Error::Invalid(format!(
                "exhaustive search supports M <= {MAX_EXHAUSTIVE_M}"
            )));
        }
        let weights = match cfg.k {
            Some(k) => vec![k],
            None => (0..=cfg.m).collect(),
        };
        let mut reps = class_representatives(cfg.m);
        if cfg.strategy == Strategy::Structured {
            reps.retain(|p| p.cycle_type().iter().any(|c| c % 4 == 0));
        }
        Ok(Space {
            m: cfg.m,
            weights,
            reps,
            strategy: cfg.strategy,
            seed: cfg.seed,
        })
    }

    /// Number of candidates, if finite.
    fn size(&self) -> Option<u64> {
        match self.strategy {
            Strategy::Exhaustive => Some(self.weights.len() as u64 * self.reps.len() as u64 * factorial(self.m)),
            _ => None,
        }
    }

    fn candidate(&self, index: u64) -> (usize, QubitPermutation, QubitPermutation) {
        let nw = self.weights.len() as u64;
        match self.strategy {
            Strategy::Exhaustive => {
                let per_weight = self.reps.len() as u64 * factorial(self.m);
                let k = self.weights[(index / per_weight) as usize];
                let rest = index % per_weight;
                let f = factorial(self.m);
                let p = self.reps[(rest / f) as usize].clone();
                (k, p, nth_permutation(self.m, rest % f))
            }
            Strategy::Structured => {
                let k = self.weights[(index % nw) as usize];
                let mut rng = candidate_rng(self.seed, index);
                let p = if self.reps.is_empty() {
                    random_permutation(self.m, &mut rng)
                } else {
                    self.reps[((index / nw) % self.reps.len() as u64) as usize].clone()
                };
                (k, p, random_involution(self.m, &mut rng))
            }
            Strategy::Random => {
                let k = self.weights[(index % nw) as usize];
                let mut rng = candidate_rng(self.seed, index);
                let p = random_permutation(self.m, &mut rng);
                (k, p, random_permutation(self.m, &mut rng))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZHit {
    pub z1: RootOfUnity,
    pub z2: RootOfUnity,
    pub nullity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateRecord {
    pub index: u64,
    pub k: usize,
    pub perm_p: String,
    pub perm_h: String,
    pub filter_passed: bool,
    pub z_pairs_tried: usize,
    pub feasible: bool,
    pub hits: Vec<ZHit>,
}

/// Evaluates one pair over every admissible `(z1, z2)`.
pub fn evaluate_pair(
    k: usize,
    perm_p: &QubitPermutation,
    perm_h: &QubitPermutation,
) -> Result<(bool, usize, Vec<ZHit>)> {
    let filter = orbit_filter(perm_p, &perm_h.compose(perm_p)?, k)?;
    if !filter.passed {
        return Ok((false, 0, Vec::new()));
    }
    let spec_p: BTreeSet<RootOfUnity> = z_candidates(perm_p, k)?.into_iter().collect();
    let spec_h: BTreeSet<RootOfUnity> = z_candidates(perm_h, k)?.into_iter().collect();
    let mut tried = 0;
    let mut hits = Vec::new();
    for z1 in z1_candidates(&spec_p) {
        for z2 in z2_candidates(&spec_h) {
            tried += 1;
            let problem = FeasibilityProblem::from_roots(k, perm_p.clone(), perm_h.clone(), z1, z2)?;
            let report = kernel_intersection(&problem)?;
            if report.feasible {
                hits.push(ZHit {
                    z1,
                    z2,
                    nullity: report.diagnostics.nullity,
                });
            }
        }
    }
    Ok((true, tried, hits))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchSummary {
    pub schema_version: u32,
    pub config: SearchConfig,
    /// Size of the candidate space, when finite.
    pub space_size: Option<u64>,
    pub evaluated: u64,
    pub filter_passed: u64,
    pub z_pairs_tried: u64,
    pub feasible_count: u64,
    pub feasible: Vec<CandidateRecord>,
    /// The budget stopped the search before the space was covered.
    pub budget_exhausted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Checkpoint {
    config: SearchConfig,
    next_index: u64,
    summary: SearchSummary,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutput<'a> {
    /// One JSON line per evaluated candidate.
    pub jsonl: Option<&'a Path>,
    /// Progress file; an existing one for the same config is resumed.
    pub checkpoint: Option<&'a Path>,
    pub timing: bool,
    /// Candidates evaluated between checkpoint writes.
    pub chunk: Option<u64>,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Invalid(format!("i/o: {e}"))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Drops JSON lines past `next_index` left by an interrupted run.
fn truncate_jsonl(path: &Path, next_index: u64) -> Result<()> {
    if !path.exists() {
        return Ok(());
    }
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut keep = String::new();
    for line in reader.lines() {
        let line = line.map_err(io_err)?;
        let rec: CandidateRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(_) => break,
        };
        if rec.index >= next_index {
            break;
        }
        keep.push_str(&line);
        keep.push('\n');
    }
    write_atomic(path, &keep)
}

pub fn search(cfg: &SearchConfig, out: &SearchOutput<'_>) -> Result<SearchSummary> {
    let start = Instant::now();
    let space = Space::new(cfg)?;
    let size = space.size();
    let limit = match (size, cfg.budget) {
        (Some(s), Some(b)) => s.min(b),
        (Some(s), None) => s,
        (None, Some(b)) => b,
        (None, None) => return Err(Error::Invalid("sampling strategies need a budget".into())),
    };
    let mut summary = SearchSummary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        space_size: size,
        evaluated: 0,
        filter_passed: 0,
        z_pairs_tried: 0,
        feasible_count: 0,
        feasible: Vec::new(),
        budget_exhausted: false,
        elapsed_seconds: None,
    };
    let mut next = 0;
    if let Some(cp) = out.checkpoint.filter(|p| p.exists()) {
        let text = std::fs::read_to_string(cp).map_err(io_err)?;
        let saved: Checkpoint = serde_json::from_str(&text).map_err(io_err)?;
        if saved.config != *cfg {
            return Err(Error::Invalid("checkpoint belongs to a different search".into()));
        }
        next = saved.next_index;
        summary = saved.summary;
    }
    let mut sink = match out.jsonl {
        Some(path) => {
            if next == 0 {
                File::create(path).map_err(io_err)?;
            } else {
                truncate_jsonl(path, next)?;
            }
            Some(OpenOptions::new().append(true).open(path).map_err(io_err)?)
        }
        None => None,
    };
    let chunk = out.chunk.unwrap_or(4096).max(1);
    while next < limit {
        let end = (next + chunk).min(limit);
        let records = (next..end)
            .into_par_iter()
            .map(|index| {
                let (k, p, h) = space.candidate(index);
                let (filter_passed, tried, hits) = evaluate_pair(k, &p, &h)?;
                Ok(CandidateRecord {
                    index,
                    k,
                    perm_p: p.to_string(),
                    perm_h: h.to_string(),
                    filter_passed,
                    z_pairs_tried: tried,
                    feasible: !hits.is_empty(),
                    hits,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut lines = String::new();
        for rec in records {
            summary.evaluated += 1;
            summary.filter_passed += rec.filter_passed as u64;
            summary.z_pairs_tried += rec.z_pairs_tried as u64;
            if sink.is_some() {
                lines.push_str(&serde_json::to_string(&rec).map_err(io_err)?);
                lines.push('\n');
            }
            if rec.feasible {
                summary.feasible_count += 1;
                summary.feasible.push(rec);
            }
        }
        if let Some(f) = sink.as_mut() {
            f.write_all(lines.as_bytes()).map_err(io_err)?;
            f.flush().map_err(io_err)?;
        }
        next = end;
        if let Some(cp) = out.checkpoint {
            let saved = Checkpoint {
                config: cfg.clone(),
                next_index: next,
                summary: summary.clone(),
            };
            write_atomic(cp, &serde_json::to_string(&saved).map_err(io_err)?)?;
        }
    }
    summary.budget_exhausted = size.is_none_or(|s| limit < s);
    if out.timing {
        summary.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(summary)
}
