//! Random inputs and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sicorr::linalg::{kron, DenseMatrix};
use sicorr::states::DensityState;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_ket(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Mixed state `G G† / Tr(G G†)` with a `d × k` Ginibre factor.
pub fn random_density(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> DenseMatrix {
    let g = ginibre(rng, d, rank);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let m = m.scale(1.0 / tr);
    // remove rounding asymmetry so state validation at 1e-12 is exact
    DenseMatrix::from_fn(d, d, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

pub fn random_state(rng: &mut ChaCha8Rng, dims: &[usize]) -> DensityState {
    let d: usize = dims.iter().product();
    let rank = rng.random_range(1..=d);
    DensityState::new(dims.to_vec(), random_density(rng, d, rank)).expect("valid random state")
}

/// Random product of the given local dimensions; mixed local factors when `mixed`.
pub fn random_product(rng: &mut ChaCha8Rng, dims: &[usize], mixed: bool) -> DensityState {
    let m = dims
        .iter()
        .map(|&d| {
            if mixed {
                let rank = rng.random_range(1..=d);
                random_density(rng, d, rank)
            } else {
                DenseMatrix::outer(&random_ket(rng, d))
            }
        })
        .reduce(|a, b| kron(&a, &b))
        .expect("non-empty dims");
    let n = m.rows();
    let m = DenseMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    DensityState::new(dims.to_vec(), m).expect("valid product state")
}

/// Convex mixture of `k` random product states.
pub fn random_separable(rng: &mut ChaCha8Rng, dims: &[usize], k: usize) -> DensityState {
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let d: usize = dims.iter().product();
    let mut m = DenseMatrix::zeros(d, d);
    for wi in w {
        let mixed = rng.random::<bool>();
        let p = random_product(rng, dims, mixed);
        m = &m + &p.matrix().scale(wi / total);
    }
    let m = DenseMatrix::from_fn(d, d, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    DensityState::new(dims.to_vec(), m).expect("valid mixture")
}

/// Haar-ish unitary from Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let g = ginibre(rng, n, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| g[(i, j)]).collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    DenseMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Four nested loops over `a[i,j]·b[k,l]`.
pub fn kron_oracle(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Characteristic polynomial coefficients `[1, c1, …, cn]` of `det(λI − A)` by
/// Faddeev–LeVerrier.
pub fn char_poly(a: &DenseMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = vec![c(1.0, 0.0)];
    let mut m = DenseMatrix::zeros(n, n);
    for k in 1..=n {
        let prev = *coeffs.last().unwrap();
        m = &(a * &m) + &DenseMatrix::identity(n).scale_c(prev);
        let am = a * &m;
        coeffs.push(-am.trace() / k as f64);
    }
    coeffs
}

trait ScaleC {
    fn scale_c(&self, z: Complex64) -> DenseMatrix;
}

impl ScaleC for DenseMatrix {
    fn scale_c(&self, z: Complex64) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] * z)
    }
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().fold(c(0.0, 0.0), |acc, &k| acc * z + k);
    let seed = c(0.4, 0.9);
    let scale = 1.0 + coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * scale).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Eigenvalues of a Hermitian matrix (n ≤ 4) from its characteristic polynomial.
pub fn eigen_oracle(a: &DenseMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = poly_roots(&char_poly(a)).iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values from the eigenvalues of `M†M`, descending.
pub fn singular_oracle(m: &DenseMatrix) -> Vec<f64> {
    let g = &m.adjoint() * m;
    let mut sv: Vec<f64> = eigen_oracle(&g)
        .into_iter()
        .map(|e| e.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
