//! Expectation vectors and correlation matrices over partition trees.
//!
//! Three constructions are provided for trees with three or more leaves.
//! They agree on fully product states and differ otherwise:
//!
//! * [`Mode::BlockDiag`]: blocks indexed by a leaf's measurement outcome, each
//!   block built from the conditional operator `Tr_k[(E_i ⊗ I)ρ]`.
//! * [`Mode::MarginalKron`]: Kronecker product of the children's matrices,
//!   each on its own reduced state, with a lone leaf entering as `diag(e)`.
//! * [`Mode::Unfolding`]: the full correlation tensor of all leaves laid out
//!   with the tree's Kronecker row/column pattern (a lone leaf is a column).
//!
//! Operators are always placed in the subsystem order of the state; a tree
//! only decides how the resulting tensor is indexed.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, kron, strides, DenseMatrix};
use crate::partition::PartitionTree;
use crate::povm::Povm;
use crate::states::DensityState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    BlockDiag,
    MarginalKron,
    Unfolding,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::BlockDiag, Mode::MarginalKron, Mode::Unfolding];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::BlockDiag => "blockdiag",
            Mode::MarginalKron => "marginal",
            Mode::Unfolding => "unfolding",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "blockdiag" | "block_diag" | "block" => Ok(Mode::BlockDiag),
            "marginal" | "marginal_kron" | "kron" => Ok(Mode::MarginalKron),
            "unfolding" | "unfold" => Ok(Mode::Unfolding),
            other => Err(Error::Parse {
                column: 1,
                message: format!("unknown mode '{other}' (blockdiag, marginal, unfolding)"),
            }),
        }
    }
}

/// `values[i] = Tr(ρ_sub E_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationVector {
    pub values: Vec<f64>,
    pub imag_residue: f64,
}

impl ExpectationVector {
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub matrix: DenseMatrix,
    /// Diagonal blocks when the matrix is block-diagonal by construction.
    pub blocks: Option<Vec<DenseMatrix>>,
    /// `None` for two-leaf trees, where all modes coincide.
    pub mode: Option<Mode>,
    pub partition: PartitionTree,
    /// Largest discarded imaginary part over all entries.
    pub imag_residue: f64,
}

impl CorrelationMatrix {
    /// Sum of singular values; block-diagonal matrices are handled per block.
    pub fn trace_norm(&self) -> Result<f64> {
        match &self.blocks {
            Some(blocks) => blocks.iter().map(linalg::trace_norm).sum(),
            None => linalg::trace_norm(&self.matrix),
        }
    }

    pub fn column_norm_sum(&self) -> f64 {
        linalg::column_norm_sum(&self.matrix)
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
}

/// A (possibly unnormalized) operator on a subset of the original subsystems.
#[derive(Debug, Clone)]
struct Operator {
    m: DenseMatrix,
    subs: Vec<usize>,
    dims: Vec<usize>,
}

impl Operator {
    fn of_state(rho: &DensityState) -> Self {
        Operator {
            m: rho.matrix().clone(),
            subs: (0..rho.num_subsystems()).collect(),
            dims: rho.dims().to_vec(),
        }
    }

    fn position(&self, sub: usize) -> usize {
        self.subs
            .iter()
            .position(|&s| s == sub)
            .expect("subsystem present in operator")
    }

    /// Partial trace down to `keep` (original labels, ascending).
    fn reduce(&self, keep: &[usize]) -> Result<Operator> {
        if keep == self.subs.as_slice() {
            return Ok(self.clone());
        }
        let pos: Vec<usize> = keep.iter().map(|&s| self.position(s)).collect();
        Ok(Operator {
            m: linalg::partial_trace(&self.m, &self.dims, &pos)?,
            subs: keep.to_vec(),
            dims: pos.iter().map(|&p| self.dims[p]).collect(),
        })
    }

    /// `Tr_sub[(E ⊗ I) X]` on the remaining subsystems.
    fn conditional(&self, sub: usize, e: &DenseMatrix) -> Operator {
        let p = self.position(sub);
        let d = self.dims[p];
        let s = strides(&self.dims)[p];
        let rest = self.m.rows() / d;
        let full = |r: usize, digit: usize| (r / s) * d * s + digit * s + r % s;
        let mut out = DenseMatrix::zeros(rest, rest);
        for r in 0..rest {
            for c in 0..rest {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in 0..d {
                    for a in 0..d {
                        let w = e[(x, a)];
                        if w != Complex64::new(0.0, 0.0) {
                            acc += w * self.m[(full(r, a), full(c, x))];
                        }
                    }
                }
                out[(r, c)] = acc;
            }
        }
        let mut subs = self.subs.clone();
        let mut dims = self.dims.clone();
        subs.remove(p);
        dims.remove(p);
        Operator { m: out, subs, dims }
    }

    /// `T[i_1..i_n] = Tr(X · E_{i_1} ⊗ … ⊗ E_{i_n})`, first subsystem most significant.
    fn tensor(&self, povms: &[Povm], residue: &mut f64) -> Vec<f64> {
        let first = self.subs[0];
        let elements = povms[first].elements();
        if self.subs.len() == 1 {
            return elements
                .iter()
                .map(|e| {
                    let z = self.m.trace_product(e);
                    *residue = residue.max(z.im.abs());
                    z.re
                })
                .collect();
        }
        elements
            .iter()
            .flat_map(|e| self.conditional(first, e).tensor(povms, residue))
            .collect()
    }
}

fn check_povms(rho: &DensityState, povms: &[Povm], subs: &[usize]) -> Result<()> {
    if povms.len() != rho.num_subsystems() {
        return Err(Error::DimensionMismatch(format!(
            "{} POVMs for a {}-partite state",
            povms.len(),
            rho.num_subsystems()
        )));
    }
    for &s in subs {
        if povms[s].dim() != rho.dims()[s] {
            return Err(Error::DimensionMismatch(format!(
                "POVM of dimension {} on subsystem {s} of dimension {}",
                povms[s].dim(),
                rho.dims()[s]
            )));
        }
    }
    Ok(())
}

fn check_subsystem(rho: &DensityState, sub: usize) -> Result<()> {
    if sub >= rho.num_subsystems() {
        return Err(Error::InvalidSubsystem {
            index: sub,
            count: rho.num_subsystems(),
        });
    }
    Ok(())
}

fn real_matrix(rows: usize, cols: usize, values: &[f64]) -> DenseMatrix {
    DenseMatrix::from_real(rows, cols, values).expect("shape computed from tensor size")
}

pub fn expectation_vector(
    rho: &DensityState,
    sub: usize,
    povm: &Povm,
) -> Result<ExpectationVector> {
    check_subsystem(rho, sub)?;
    if povm.dim() != rho.dims()[sub] {
        return Err(Error::DimensionMismatch(format!(
            "POVM of dimension {} on subsystem of dimension {}",
            povm.dim(),
            rho.dims()[sub]
        )));
    }
    let red = linalg::partial_trace(rho.matrix(), rho.dims(), &[sub])?;
    let mut residue = 0.0f64;
    let values = povm
        .elements()
        .iter()
        .map(|e| {
            let z = red.trace_product(e);
            residue = residue.max(z.im.abs());
            z.re
        })
        .collect();
    Ok(ExpectationVector {
        values,
        imag_residue: residue,
    })
}

/// `[P]_{ij} = Tr(ρ_{ab} E_i^a ⊗ E_j^b)`, rows indexed by `sub_a`.
pub fn bipartite_correlation(
    rho: &DensityState,
    sub_a: usize,
    sub_b: usize,
    povm_a: &Povm,
    povm_b: &Povm,
) -> Result<CorrelationMatrix> {
    check_subsystem(rho, sub_a)?;
    check_subsystem(rho, sub_b)?;
    if sub_a == sub_b {
        return Err(Error::InvalidKeepSet);
    }
    for (s, p) in [(sub_a, povm_a), (sub_b, povm_b)] {
        if p.dim() != rho.dims()[s] {
            return Err(Error::DimensionMismatch(format!(
                "POVM of dimension {} on subsystem of dimension {}",
                p.dim(),
                rho.dims()[s]
            )));
        }
    }
    let (lo, hi) = (sub_a.min(sub_b), sub_a.max(sub_b));
    let red = linalg::partial_trace(rho.matrix(), rho.dims(), &[lo, hi])?;
    let (pl, ph) = if sub_a < sub_b {
        (povm_a, povm_b)
    } else {
        (povm_b, povm_a)
    };
    let (nl, nh) = (pl.elements().len(), ph.elements().len());
    let mut residue = 0.0f64;
    let mut m = DenseMatrix::zeros(nl, nh);
    for (i, ei) in pl.elements().iter().enumerate() {
        for (j, ej) in ph.elements().iter().enumerate() {
            let z = red.trace_product(&kron(ei, ej));
            residue = residue.max(z.im.abs());
            m[(i, j)] = Complex64::new(z.re, 0.0);
        }
    }
    if sub_a > sub_b {
        m = m.transpose();
    }
    Ok(CorrelationMatrix {
        matrix: m,
        blocks: None,
        mode: None,
        partition: PartitionTree::split(PartitionTree::Leaf(sub_a), PartitionTree::Leaf(sub_b)),
        imag_residue: residue,
    })
}

/// Tripartite constructions computed directly from the three-body tensor.
///
/// `povms` is indexed by subsystem. The two remaining subsystems index rows
/// and columns in ascending order.
pub fn tripartite_correlation(
    rho: &DensityState,
    distinguished: usize,
    povms: &[Povm],
    mode: Mode,
) -> Result<CorrelationMatrix> {
    if rho.num_subsystems() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "tripartite construction needs 3 subsystems, got {} (reduce the state first)",
            rho.num_subsystems()
        )));
    }
    check_subsystem(rho, distinguished)?;
    check_povms(rho, povms, &[0, 1, 2])?;
    let others: Vec<usize> = (0..3).filter(|&k| k != distinguished).collect();
    let (p, q) = (others[0], others[1]);
    let n: Vec<usize> = povms.iter().map(|x| x.elements().len()).collect();

    let mut residue = 0.0f64;
    let mut t = vec![0.0; n[0] * n[1] * n[2]];
    for (i, e0) in povms[0].elements().iter().enumerate() {
        for (j, e1) in povms[1].elements().iter().enumerate() {
            let e01 = kron(e0, e1);
            for (k, e2) in povms[2].elements().iter().enumerate() {
                let z = rho.matrix().trace_product(&kron(&e01, e2));
                residue = residue.max(z.im.abs());
                t[(i * n[1] + j) * n[2] + k] = z.re;
            }
        }
    }
    let at = |idx: [usize; 3]| t[(idx[0] * n[1] + idx[1]) * n[2] + idx[2]];
    let pick = |x: usize, y: usize, z: usize| {
        let mut idx = [0; 3];
        idx[distinguished] = x;
        idx[p] = y;
        idx[q] = z;
        at(idx)
    };
    let partition = PartitionTree::split(
        PartitionTree::Leaf(distinguished),
        PartitionTree::split(PartitionTree::Leaf(p), PartitionTree::Leaf(q)),
    );
    let (nd, np, nq) = (n[distinguished], n[p], n[q]);

    let (matrix, blocks) = match mode {
        Mode::BlockDiag => {
            let blocks: Vec<DenseMatrix> = (0..nd)
                .map(|x| DenseMatrix::from_fn(np, nq, |y, z| Complex64::new(pick(x, y, z), 0.0)))
                .collect();
            (DenseMatrix::block_diag(&blocks), Some(blocks))
        }
        Mode::MarginalKron => {
            let e = expectation_vector(rho, distinguished, &povms[distinguished])?;
            let pair = bipartite_correlation(rho, p, q, &povms[p], &povms[q])?;
            residue = residue.max(e.imag_residue).max(pair.imag_residue);
            (kron(&DenseMatrix::diag_real(&e.values), &pair.matrix), None)
        }
        Mode::Unfolding => (
            DenseMatrix::from_fn(nd * np, nq, |r, z| {
                Complex64::new(pick(r / np, r % np, z), 0.0)
            }),
            None,
        ),
    };
    Ok(CorrelationMatrix {
        matrix,
        blocks,
        mode: Some(mode),
        partition,
        imag_residue: residue,
    })
}

/// Correlation matrix of an arbitrary partition tree.
///
/// A two-leaf tree gives the bipartite matrix in every mode. For three leaves
/// the result equals [`tripartite_correlation`] with the root leaf
/// distinguished (and the pair ordered as in the tree).
pub fn npartite_correlation(
    rho: &DensityState,
    tree: &PartitionTree,
    povms: &[Povm],
    mode: Mode,
) -> Result<CorrelationMatrix> {
    tree.validate(rho.num_subsystems())?;
    let leaves = tree.sorted_leaves();
    check_povms(rho, povms, &leaves)?;
    let op = Operator::of_state(rho).reduce(&leaves)?;
    let mut residue = 0.0f64;
    let (matrix, blocks) = match mode {
        Mode::MarginalKron => (marginal(&op, tree, povms, &mut residue)?, None),
        Mode::BlockDiag => blockdiag_top(&op, tree, povms, &mut residue)?,
        Mode::Unfolding => (unfolding(&op, tree, povms, &mut residue), None),
    };
    Ok(CorrelationMatrix {
        matrix,
        blocks,
        mode: (tree.leaf_count() > 2).then_some(mode),
        partition: tree.clone(),
        imag_residue: residue,
    })
}

fn pair_matrix(
    op: &Operator,
    a: usize,
    b: usize,
    povms: &[Povm],
    residue: &mut f64,
) -> Result<DenseMatrix> {
    let (lo, hi) = (a.min(b), a.max(b));
    let red = op.reduce(&[lo, hi])?;
    let t = red.tensor(povms, residue);
    let m = real_matrix(povms[lo].elements().len(), povms[hi].elements().len(), &t);
    Ok(if a < b { m } else { m.transpose() })
}

fn marginal(
    op: &Operator,
    tree: &PartitionTree,
    povms: &[Povm],
    residue: &mut f64,
) -> Result<DenseMatrix> {
    match tree {
        PartitionTree::Leaf(k) => {
            let v = op.reduce(&[*k])?.tensor(povms, residue);
            Ok(DenseMatrix::diag_real(&v))
        }
        PartitionTree::Split(l, r) => match (&**l, &**r) {
            (PartitionTree::Leaf(a), PartitionTree::Leaf(b)) => {
                pair_matrix(op, *a, *b, povms, residue)
            }
            _ => {
                let lm = marginal(&op.reduce(&l.sorted_leaves())?, l, povms, residue)?;
                let rm = marginal(&op.reduce(&r.sorted_leaves())?, r, povms, residue)?;
                Ok(kron(&lm, &rm))
            }
        },
    }
}

type Blocked = (DenseMatrix, Option<Vec<DenseMatrix>>);

fn blockdiag_top(
    op: &Operator,
    tree: &PartitionTree,
    povms: &[Povm],
    residue: &mut f64,
) -> Result<Blocked> {
    if let PartitionTree::Split(l, r) = tree {
        let leaf_and_rest = match (&**l, &**r) {
            (PartitionTree::Leaf(_), PartitionTree::Leaf(_)) => None,
            (PartitionTree::Leaf(k), rest) | (rest, PartitionTree::Leaf(k)) => Some((*k, rest)),
            _ => None,
        };
        if let Some((k, rest)) = leaf_and_rest {
            let blocks = povms[k]
                .elements()
                .iter()
                .map(|e| blockdiag(&op.conditional(k, e), rest, povms, residue))
                .collect::<Result<Vec<_>>>()?;
            return Ok((DenseMatrix::block_diag(&blocks), Some(blocks)));
        }
    }
    Ok((blockdiag(op, tree, povms, residue)?, None))
}

fn blockdiag(
    op: &Operator,
    tree: &PartitionTree,
    povms: &[Povm],
    residue: &mut f64,
) -> Result<DenseMatrix> {
    match tree {
        PartitionTree::Leaf(k) => {
            let v = op.reduce(&[*k])?.tensor(povms, residue);
            Ok(DenseMatrix::diag_real(&v))
        }
        PartitionTree::Split(l, r) => match (&**l, &**r) {
            (PartitionTree::Leaf(a), PartitionTree::Leaf(b)) => {
                pair_matrix(op, *a, *b, povms, residue)
            }
            (PartitionTree::Leaf(_), _) | (_, PartitionTree::Leaf(_)) => {
                Ok(blockdiag_top(op, tree, povms, residue)?.0)
            }
            _ => {
                let lm = blockdiag(&op.reduce(&l.sorted_leaves())?, l, povms, residue)?;
                let rm = blockdiag(&op.reduce(&r.sorted_leaves())?, r, povms, residue)?;
                Ok(kron(&lm, &rm))
            }
        },
    }
}

/// Row and column subsystem lists of the unfolding layout.
pub fn unfolding_layout(tree: &PartitionTree) -> (Vec<usize>, Vec<usize>) {
    match tree {
        PartitionTree::Leaf(k) => (vec![*k], vec![]),
        PartitionTree::Split(l, r) => match (&**l, &**r) {
            (PartitionTree::Leaf(a), PartitionTree::Leaf(b)) => (vec![*a], vec![*b]),
            _ => {
                let (mut rows, mut cols) = unfolding_layout(l);
                let (r2, c2) = unfolding_layout(r);
                rows.extend(r2);
                cols.extend(c2);
                (rows, cols)
            }
        },
    }
}

fn unfolding(
    op: &Operator,
    tree: &PartitionTree,
    povms: &[Povm],
    residue: &mut f64,
) -> DenseMatrix {
    let t = op.tensor(povms, residue);
    let sorted = &op.subs;
    let counts: Vec<usize> = sorted.iter().map(|&s| povms[s].elements().len()).collect();
    let st = strides(&counts);
    let stride_of = |sub: usize| {
        st[sorted
            .iter()
            .position(|&s| s == sub)
            .expect("leaf in tensor")]
    };
    let (rows, cols) = unfolding_layout(tree);

    let offsets = |subs: &[usize]| -> Vec<usize> {
        let n: Vec<usize> = subs.iter().map(|&s| povms[s].elements().len()).collect();
        let total: usize = n.iter().product();
        let local = strides(&n);
        (0..total)
            .map(|idx| {
                subs.iter()
                    .enumerate()
                    .map(|(pos, &s)| (idx / local[pos]) % n[pos] * stride_of(s))
                    .sum()
            })
            .collect()
    };
    let ro = offsets(&rows);
    let co = offsets(&cols);
    DenseMatrix::from_fn(ro.len(), co.len(), |i, j| {
        Complex64::new(t[ro[i] + co[j]], 0.0)
    })
}
