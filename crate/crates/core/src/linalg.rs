//! Dense complex linear algebra: Kronecker products, partial traces and
//! transposes, Hermitian eigenvalues, singular values and the trace norm.
//!
//! Every routine here works on small matrices (a few hundred rows at most),
//! so everything is a plain row-major `Vec<Complex64>` and operations return
//! fresh values.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;

/// Complex dense matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must have positive size, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Column vector with the given entries.
    pub fn column(values: &[Complex64]) -> Self {
        DenseMatrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    /// `|v⟩⟨v|`.
    pub fn outer(ket: &[Complex64]) -> Self {
        let n = ket.len();
        Self::from_fn(n, n, |i, j| ket[i] * ket[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &DenseMatrix) -> Complex64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`. Shapes must agree.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m_ij - conj(m_ji)|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Largest imaginary part in modulus.
    pub fn imag_residue(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Block-diagonal matrix with the given blocks in order.
    pub fn block_diag(blocks: &[DenseMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    fn column_slice(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Kronecker product: entry `a[i,j]·b[k,l]` lands at row `i·rb+k`, column `j·cb+l`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (rb, cb) = (b.rows, b.cols);
    let mut out = DenseMatrix::zeros(a.rows * rb, a.cols * cb);
    let out_cols = out.cols;
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..rb {
                let row = (i * rb + k) * out_cols + j * cb;
                for l in 0..cb {
                    out.data[row + l] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a DenseMatrix>) -> Option<DenseMatrix> {
    let mut it = factors.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, m| kron(&acc, m)))
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let scale = m.max_abs().max(1.0);
    let dev = m.hermitian_deviation();
    if dev > 1e-12 * scale {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows;
    // symmetrize so rounding in the input never feeds the rotations
    let mut a = DenseMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let total = a.frobenius_norm();
    if total == 0.0 {
        return Ok(vec![0.0; n]);
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
            eig.sort_by(f64::total_cmp);
            return Ok(eig);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // U = [[c, s], [-s·conj(phase), c·conj(phase)]] on the (p, q) plane;
                // A <- U† A U
                let ph_c = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ph_c * s;
                    a[(k, q)] = akp * s + akq * ph_c * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    Err(Error::NonConvergence {
        routine: "hermitian Jacobi eigensolver",
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

pub fn min_eigenvalue(m: &DenseMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// True iff `m` is Hermitian within `tol` and its smallest eigenvalue is at least `-tol`.
pub fn is_psd(m: &DenseMatrix, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let dev = m.hermitian_deviation();
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(min_eigenvalue(m)? >= -tol)
}

/// Singular values, descending, by one-sided (Hestenes) Jacobi orthogonalization.
///
/// Working on the columns of `m` directly keeps the absolute error of every
/// singular value near `eps·‖m‖`, including the zero ones.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    let work = if m.cols > m.rows {
        m.adjoint()
    } else {
        m.clone()
    };
    let n = work.cols;
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| work.column_slice(j)).collect();

    let rel = (work.rows.max(n) as f64) * f64::EPSILON;
    let floor = (work.frobenius_norm() * f64::EPSILON).powi(2);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(u, v)| u.conj() * v)
                    .sum();
                let g = gamma.norm();
                if g <= rel * (alpha * beta).sqrt() || g <= floor.max(f64::MIN_POSITIVE) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = (gamma / g).conj();
                let (left, right) = cols.split_at_mut(q);
                let (u, v) = (&mut left[p], &mut right[0]);
                for (x, y) in u.iter_mut().zip(v.iter_mut()) {
                    let yv = *y * ph;
                    let xn = *x * c - yv * s;
                    let yn = *x * s + yv * c;
                    *x = xn;
                    *y = yn;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            routine: "one-sided Jacobi SVD",
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Sum of singular values.
pub fn trace_norm(m: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

/// `Σ_k ‖m[:,k]‖₂`, the trace of the entrywise square root of `m†m`.
///
/// This upper-bounds the trace norm and coincides with it only when the
/// columns are mutually orthogonal.
pub fn column_norm_sum(m: &DenseMatrix) -> f64 {
    (0..m.cols)
        .map(|j| {
            (0..m.rows)
                .map(|i| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .sum()
}

/// Row-major strides for a subsystem dimension list (first subsystem most significant).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_operator_dims(m: &DenseMatrix, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "invalid dimension list {dims:?}"
        )));
    }
    if m.rows != total || m.cols != total {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} need a {total}x{total} matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(total)
}

/// Traces out every subsystem not listed in `keep` (strictly increasing indices).
pub fn partial_trace(m: &DenseMatrix, dims: &[usize], keep: &[usize]) -> Result<DenseMatrix> {
    let total = check_operator_dims(m, dims)?;
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidKeepSet);
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidSubsystem {
            index: bad,
            count: dims.len(),
        });
    }
    let st = strides(dims);
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kept_st = strides(&kept_dims);
    let out_dim: usize = kept_dims.iter().product();
    let traced_count = total / out_dim;

    // full index for every (traced block, kept index) pair
    let mut groups: Vec<Vec<usize>> = vec![Vec::with_capacity(out_dim); traced_count];
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let traced_st = strides(&traced_dims);
    let mut slots = vec![(0usize, 0usize); total];
    for (idx, slot) in slots.iter_mut().enumerate() {
        let mut k_idx = 0;
        let mut t_idx = 0;
        for (pos, &sub) in keep.iter().enumerate() {
            k_idx += (idx / st[sub]) % dims[sub] * kept_st[pos];
        }
        for (pos, &sub) in traced.iter().enumerate() {
            t_idx += (idx / st[sub]) % dims[sub] * traced_st[pos];
        }
        *slot = (t_idx, k_idx);
    }
    for g in groups.iter_mut() {
        g.resize(out_dim, 0);
    }
    for (idx, &(t, k)) in slots.iter().enumerate() {
        groups[t][k] = idx;
    }

    let mut out = DenseMatrix::zeros(out_dim, out_dim);
    for g in &groups {
        for a in 0..out_dim {
            for b in 0..out_dim {
                out[(a, b)] += m[(g[a], g[b])];
            }
        }
    }
    Ok(out)
}

/// Transposes the indices of one subsystem.
pub fn partial_transpose(m: &DenseMatrix, dims: &[usize], subsystem: usize) -> Result<DenseMatrix> {
    let total = check_operator_dims(m, dims)?;
    if subsystem >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: subsystem,
            count: dims.len(),
        });
    }
    let s = strides(dims)[subsystem];
    let d = dims[subsystem];
    Ok(DenseMatrix::from_fn(total, total, |i, j| {
        let di = (i / s) % d;
        let dj = (j / s) % d;
        let i2 = i - di * s + dj * s;
        let j2 = j - dj * s + di * s;
        m[(i2, j2)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> DenseMatrix {
        DenseMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> DenseMatrix {
        DenseMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn kron_identities_and_scalars() {
        let i4 = kron(&DenseMatrix::identity(2), &DenseMatrix::identity(2));
        assert_eq!(i4, DenseMatrix::identity(4));
        let six = kron(
            &DenseMatrix::diag_real(&[2.0]),
            &DenseMatrix::diag_real(&[3.0]),
        );
        assert_eq!(six, DenseMatrix::diag_real(&[6.0]));
    }

    #[test]
    fn kron_matches_nested_loop_formula() {
        let a = pauli_x();
        let b = pauli_z();
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(2 * i + p, 2 * j + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_rectangular_shape() {
        let a = DenseMatrix::from_real(1, 3, &[1.0, 2.0, 3.0]).unwrap();
        let b = DenseMatrix::from_real(2, 1, &[1.0, -1.0]).unwrap();
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (2, 3));
        assert_eq!(k[(1, 2)], c(-3.0, 0.0));
    }

    #[test]
    fn new_rejects_wrong_entry_count() {
        assert!(DenseMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn trace_norm_simple_cases() {
        assert!((trace_norm(&DenseMatrix::identity(4)).unwrap() - 4.0).abs() < 1e-14);
        let d = DenseMatrix::diag_real(&[1.0, -2.0]);
        assert!((trace_norm(&d).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_of_rank_one_keeps_zero_singular_values_small() {
        let u = [c(0.3, 0.1), c(-0.2, 0.0), c(0.5, -0.4), c(0.1, 0.2)];
        let v = [c(1.0, 0.0), c(0.25, 0.5), c(-0.75, 0.0), c(0.0, 0.1)];
        let m = DenseMatrix::from_fn(4, 4, |i, j| u[i] * v[j].conj());
        let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - nu * nv).abs() < 1e-14);
        assert!(sv[1..].iter().all(|&s| s < 1e-15));
    }

    #[test]
    fn trace_norm_wide_matrix() {
        let m = DenseMatrix::from_real(1, 3, &[3.0, 0.0, 4.0]).unwrap();
        assert!((trace_norm(&m).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn column_norm_sum_bounds_trace_norm() {
        let m = DenseMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-14);
        assert!((column_norm_sum(&m) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&DenseMatrix::identity(3), 1e-10).unwrap());
        assert!(!is_psd(&DenseMatrix::diag_real(&[1.0, -0.01]), 1e-10).unwrap());
        let skew = DenseMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(matches!(is_psd(&skew, 1e-10), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigenvalues_of_complex_hermitian() {
        // σ_y has eigenvalues ±1
        let y = DenseMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        )
        .unwrap();
        let e = hermitian_eigenvalues(&y).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let ra = DenseMatrix::diag_real(&[0.7, 0.3]);
        let rb = DenseMatrix::from_real(2, 2, &[0.5, 0.2, 0.2, 0.5]).unwrap();
        let prod = kron(&ra, &rb);
        let got = partial_trace(&prod, &[2, 2], &[0]).unwrap();
        assert!(got.max_abs_diff(&ra) < 1e-15);
        let got_b = partial_trace(&prod, &[2, 2], &[1]).unwrap();
        assert!(got_b.max_abs_diff(&rb) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DenseMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let half = partial_trace(&bell, &[2, 2], &[0]).unwrap();
        assert!(half.max_abs_diff(&DenseMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let m = DenseMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[]),
            Err(Error::InvalidKeepSet)
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[1, 0]),
            Err(Error::InvalidKeepSet)
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[2]),
            Err(Error::InvalidSubsystem { .. })
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn partial_transpose_of_product() {
        let ra = DenseMatrix::diag_real(&[0.6, 0.4]);
        let rb = DenseMatrix::new(
            2,
            2,
            vec![c(0.5, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.5, 0.0)],
        )
        .unwrap();
        let pt = partial_transpose(&kron(&ra, &rb), &[2, 2], 1).unwrap();
        assert!(pt.max_abs_diff(&kron(&ra, &rb.transpose())) < 1e-15);
        let twice = partial_transpose(&pt, &[2, 2], 1).unwrap();
        assert!(twice.max_abs_diff(&kron(&ra, &rb)) < 1e-15);
        assert!(partial_transpose(&pt, &[2, 2], 2).is_err());
    }
}
