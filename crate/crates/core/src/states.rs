//! Density matrices on ordered subsystems, named example families and the
//! state document format.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, kron, DenseMatrix};
use crate::tolerance;

/// Hermitian, unit-trace, PSD matrix with its subsystem dimensions
/// (first subsystem is the most significant tensor factor).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    dims: Vec<usize>,
    matrix: DenseMatrix,
    label: String,
}

pub type Params = BTreeMap<String, f64>;

/// Convenience constructor for parameter maps.
pub fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

impl DensityState {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity (1e-10).
    pub fn new(dims: Vec<usize>, matrix: DenseMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || dims.contains(&1) {
            return Err(Error::DimensionMismatch(format!(
                "invalid subsystem dimensions {dims:?}"
            )));
        }
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need a {total}x{total} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermitian_deviation();
        if herm > tolerance::ALGEBRAIC {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tolerance::ALGEBRAIC {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = linalg::min_eigenvalue(&matrix)?;
        if min < -tolerance::NUMERIC {
            return Err(Error::NotPsd(min));
        }
        Ok(DensityState {
            dims,
            matrix,
            label: "matrix".into(),
        })
    }

    pub(crate) fn trusted(dims: Vec<usize>, matrix: DenseMatrix, label: String) -> Self {
        DensityState {
            dims,
            matrix,
            label,
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn from_pure(dims: Vec<usize>, ket: &[Complex64]) -> Result<Self> {
        Self::new(dims, DenseMatrix::outer(ket))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Reduced state on the kept subsystems (strictly increasing indices).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityState> {
        let m = linalg::partial_trace(&self.matrix, &self.dims, keep)?;
        let name = keep
            .iter()
            .map(|&k| subsystem_letter(k))
            .collect::<String>();
        Ok(DensityState::trusted(
            keep.iter().map(|&k| self.dims[k]).collect(),
            m,
            format!("{}[{name}]", self.label),
        ))
    }

    pub fn partial_transpose(&self, subsystem: usize) -> Result<DenseMatrix> {
        linalg::partial_transpose(&self.matrix, &self.dims, subsystem)
    }

    /// `(1−p)·I/D + p·ρ`.
    pub fn mix_white_noise(&self, p: f64) -> Result<DensityState> {
        check_unit_interval("p", p)?;
        let d = self.total_dim();
        let noise = DenseMatrix::identity(d).scale((1.0 - p) / d as f64);
        Ok(DensityState::trusted(
            self.dims.clone(),
            &noise + &self.matrix.scale(p),
            format!("{}+noise(p={p})", self.label),
        ))
    }

    /// Tensor product in the given order.
    pub fn product(parts: &[&DensityState]) -> Result<DensityState> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::DimensionMismatch("empty product".into()))?;
        let mut dims = first.dims.clone();
        let mut m = first.matrix.clone();
        for p in rest {
            dims.extend_from_slice(&p.dims);
            m = kron(&m, &p.matrix);
        }
        let label = parts
            .iter()
            .map(|p| p.label.as_str())
            .collect::<Vec<_>>()
            .join("⊗");
        Ok(DensityState::trusted(dims, m, label))
    }
}

impl fmt::Display for DensityState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dims={:?}", self.label, self.dims)
    }
}

/// Letter used for subsystem `k` when no other label is available.
pub fn subsystem_letter(k: usize) -> String {
    if k < 26 {
        ((b'A' + k as u8) as char).to_string()
    } else {
        k.to_string()
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange {
            name: name.into(),
            value: v,
            reason: "must lie in [0, 1]".into(),
        });
    }
    Ok(())
}

/// Computational basis ket for the digit string (one digit per subsystem).
pub fn basis_ket(dims: &[usize], digits: &[usize]) -> Vec<Complex64> {
    assert_eq!(dims.len(), digits.len());
    let total: usize = dims.iter().product();
    let idx = digits.iter().zip(dims).fold(0, |acc, (&dg, &d)| {
        assert!(dg < d, "digit {dg} exceeds dimension {d}");
        acc * d + dg
    });
    let mut v = vec![Complex64::new(0.0, 0.0); total];
    v[idx] = Complex64::new(1.0, 0.0);
    v
}

/// `Σ coef · |digits⟩`.
pub fn ket(dims: &[usize], terms: &[(Complex64, &[usize])]) -> Vec<Complex64> {
    let total: usize = dims.iter().product();
    let mut v = vec![Complex64::new(0.0, 0.0); total];
    for (coef, digits) in terms {
        for (x, b) in v.iter_mut().zip(basis_ket(dims, digits)) {
            *x += coef * b;
        }
    }
    v
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn tensor_ket(parts: &[&[Complex64]]) -> Vec<Complex64> {
    parts.iter().skip(1).fold(parts[0].to_vec(), |acc, p| {
        acc.iter()
            .flat_map(|a| p.iter().map(move |b| a * b))
            .collect()
    })
}

fn mixture(dims: Vec<usize>, terms: &[(f64, Vec<Complex64>)]) -> DenseMatrix {
    let total: usize = dims.iter().product();
    terms
        .iter()
        .fold(DenseMatrix::zeros(total, total), |acc, (w, k)| {
            &acc + &DenseMatrix::outer(k).scale(*w)
        })
}

struct ParamReader<'a> {
    family: &'a str,
    params: &'a Params,
    used: Vec<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn new(family: &'a str, params: &'a Params) -> Self {
        ParamReader {
            family,
            params,
            used: Vec::new(),
        }
    }

    fn get(&mut self, name: &'static str) -> Option<f64> {
        self.used.push(name);
        self.params.get(name).copied()
    }

    fn require(&mut self, name: &'static str) -> Result<f64> {
        self.get(name).ok_or_else(|| {
            Error::ParamConstraint(format!("family '{}' needs parameter '{name}'", self.family))
        })
    }

    fn finish(self) -> Result<()> {
        if let Some(extra) = self
            .params
            .keys()
            .find(|k| !self.used.contains(&k.as_str()))
        {
            return Err(Error::ParamConstraint(format!(
                "family '{}' has no parameter '{extra}'",
                self.family
            )));
        }
        Ok(())
    }

    /// Three simplex weights; at most one may be omitted and is then derived.
    fn simplex(&mut self, names: [&'static str; 3]) -> Result<[f64; 3]> {
        let vals: Vec<Option<f64>> = names.iter().map(|n| self.get(n)).collect();
        let missing = vals.iter().filter(|v| v.is_none()).count();
        if missing > 1 {
            return Err(Error::ParamConstraint(format!(
                "family '{}' needs at least two of {names:?}",
                self.family
            )));
        }
        let known: f64 = vals.iter().flatten().sum();
        let w: Vec<f64> = vals.iter().map(|v| v.unwrap_or(1.0 - known)).collect();
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > tolerance::ALGEBRAIC {
            return Err(Error::ParamConstraint(format!(
                "{} + {} + {} = {total}, must equal 1",
                names[0], names[1], names[2]
            )));
        }
        if let Some((n, v)) = names
            .iter()
            .zip(&w)
            .find(|(_, &v)| v < -tolerance::ALGEBRAIC)
        {
            return Err(Error::ParamConstraint(format!("{n} = {v} is negative")));
        }
        Ok([w[0].max(0.0), w[1].max(0.0), w[2].max(0.0)])
    }
}

/// Names accepted by [`build_named_state`].
pub const STATE_FAMILIES: &[&str] = &[
    "varrho",
    "varrho_prime",
    "rho_abcd",
    "shifts_upb",
    "sigma",
    "noisy_phi",
    "maximally_mixed",
];

/// Builds one of the example families.
///
/// * `varrho`: equal mixture of |ψ⁺⟩ on AB, AC and BC with |0⟩ on the rest.
/// * `varrho_prime` (a, b, c): the same with simplex weights.
/// * `rho_abcd` (x, y, z): |ψ⁺⟩ on AB, AC, AD with |00⟩ on the rest.
/// * `shifts_upb`: `(I − Σ|φ_k⟩⟨φ_k|)/4` for the Shifts product basis.
/// * `sigma` (b ∈ (0, 1]): the three-qubit PPT family.
/// * `noisy_phi` (p ∈ [0, 1]): a 3⊗3⊗2 pure state mixed with white noise.
/// * `maximally_mixed` (qubits, default 3).
pub fn build_named_state(name: &str, p: &Params) -> Result<DensityState> {
    let mut rd = ParamReader::new(name, p);
    let state = match name {
        "varrho" => varrho_prime(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)?,
        "varrho_prime" => {
            let [a, b, c] = rd.simplex(["a", "b", "c"])?;
            varrho_prime(a, b, c)?
        }
        "rho_abcd" => {
            let [x, y, z] = rd.simplex(["x", "y", "z"])?;
            rho_abcd(x, y, z)?
        }
        "shifts_upb" => shifts_upb()?,
        "sigma" => sigma(rd.require("b")?)?,
        "noisy_phi" => noisy_phi(rd.require("p")?)?,
        "maximally_mixed" => {
            let q = rd.get("qubits").unwrap_or(3.0);
            if q.fract() != 0.0 || !(1.0..=8.0).contains(&q) {
                return Err(Error::ParamConstraint(format!(
                    "qubits = {q} must be an integer in 1..=8"
                )));
            }
            maximally_mixed(&vec![2; q as usize])?
        }
        other => return Err(Error::UnknownState(other.into())),
    };
    rd.finish()?;
    Ok(state)
}

fn psi_plus_pair(n: usize, first: usize, second: usize) -> Vec<Complex64> {
    let dims = vec![2; n];
    let zero = vec![0; n];
    let mut one = zero.clone();
    one[first] = 1;
    one[second] = 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ket(&dims, &[(r(s), &zero), (r(s), &one)])
}

pub fn varrho_prime(a: f64, b: f64, c: f64) -> Result<DensityState> {
    let m = mixture(
        vec![2, 2, 2],
        &[
            (a, psi_plus_pair(3, 0, 1)),
            (b, psi_plus_pair(3, 0, 2)),
            (c, psi_plus_pair(3, 1, 2)),
        ],
    );
    Ok(DensityState::new(vec![2, 2, 2], m)?.with_label(format!("varrho_prime(a={a},b={b},c={c})")))
}

pub fn rho_abcd(x: f64, y: f64, z: f64) -> Result<DensityState> {
    let m = mixture(
        vec![2, 2, 2, 2],
        &[
            (x, psi_plus_pair(4, 0, 1)),
            (y, psi_plus_pair(4, 0, 2)),
            (z, psi_plus_pair(4, 0, 3)),
        ],
    );
    Ok(DensityState::new(vec![2, 2, 2, 2], m)?.with_label(format!("rho_abcd(x={x},y={y},z={z})")))
}

/// The four product vectors |0,1,+⟩, |1,+,0⟩, |+,0,1⟩, |−,−,−⟩.
pub fn shifts_vectors() -> [Vec<Complex64>; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let k0 = [r(1.0), r(0.0)];
    let k1 = [r(0.0), r(1.0)];
    let plus = [r(s), r(s)];
    let minus = [r(s), r(-s)];
    [
        tensor_ket(&[&k0, &k1, &plus]),
        tensor_ket(&[&k1, &plus, &k0]),
        tensor_ket(&[&plus, &k0, &k1]),
        tensor_ket(&[&minus, &minus, &minus]),
    ]
}

pub fn shifts_upb() -> Result<DensityState> {
    let proj = mixture(vec![2, 2, 2], &shifts_vectors().map(|v| (1.0, v)));
    let m = (&DenseMatrix::identity(8) - &proj).scale(0.25);
    Ok(DensityState::new(vec![2, 2, 2], m)?.with_label("shifts_upb"))
}

pub fn sigma(b: f64) -> Result<DensityState> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::OutOfRange {
            name: "b".into(),
            value: b,
            reason: "must satisfy 0 < b ≤ 1".into(),
        });
    }
    let dims = [2, 2, 2];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [
        ket(&dims, &[(r(s), &[0, 0, 0]), (r(s), &[1, 0, 1])]),
        ket(&dims, &[(r(s), &[0, 0, 1]), (r(s), &[1, 1, 0])]),
        ket(&dims, &[(r(s), &[0, 1, 0]), (r(s), &[1, 1, 1])]),
    ];
    let phi_b = ket(
        &dims,
        &[
            (r(((1.0 + b) / 2.0).sqrt()), &[1, 0, 0]),
            (r(((1.0 - b) / 2.0).sqrt()), &[1, 1, 0]),
        ],
    );
    let w = 7.0 * b / (7.0 * b + 1.0);
    let mut terms: Vec<(f64, Vec<Complex64>)> =
        psi.into_iter().map(|k| (w * 2.0 / 7.0, k)).collect();
    terms.push((w / 7.0, basis_ket(&dims, &[0, 1, 1])));
    terms.push((1.0 / (7.0 * b + 1.0), phi_b));
    Ok(
        DensityState::new(vec![2, 2, 2], mixture(vec![2, 2, 2], &terms))?
            .with_label(format!("sigma(b={b})")),
    )
}

/// `(|100⟩ + |210⟩ + |001⟩ + |111⟩ + |221⟩)/√5` on 3⊗3⊗2.
pub fn phi_332() -> Vec<Complex64> {
    let dims = [3, 3, 2];
    let w = r(1.0 / 5f64.sqrt());
    ket(
        &dims,
        &[
            (w, &[1, 0, 0]),
            (w, &[2, 1, 0]),
            (w, &[0, 0, 1]),
            (w, &[1, 1, 1]),
            (w, &[2, 2, 1]),
        ],
    )
}

pub fn noisy_phi(p: f64) -> Result<DensityState> {
    check_unit_interval("p", p)?;
    let pure = DensityState::from_pure(vec![3, 3, 2], &phi_332())?.with_label("phi");
    Ok(pure
        .mix_white_noise(p)?
        .with_label(format!("noisy_phi(p={p})")))
}

pub fn maximally_mixed(dims: &[usize]) -> Result<DensityState> {
    let total: usize = dims.iter().product();
    Ok(DensityState::new(
        dims.to_vec(),
        DenseMatrix::identity(total).scale(1.0 / total as f64),
    )?
    .with_label("maximally_mixed"))
}

/// JSON state document: either a named family with parameters or an explicit
/// row-major matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
}

impl StateDocument {
    pub fn from_state(s: &DensityState) -> Self {
        StateDocument {
            dims: Some(s.dims.clone()),
            name: None,
            params: Params::new(),
            matrix: Some(s.matrix.entries().iter().map(|z| [z.re, z.im]).collect()),
        }
    }

    pub fn named(name: &str, params: Params) -> Self {
        StateDocument {
            dims: None,
            name: Some(name.into()),
            params,
            matrix: None,
        }
    }

    /// Builds and validates the state.
    pub fn to_state(&self) -> Result<DensityState> {
        match (&self.name, &self.matrix) {
            (Some(_), Some(_)) => Err(Error::Document(
                "give either 'name' or 'matrix', not both".into(),
            )),
            (None, None) => Err(Error::Document("state needs 'name' or 'matrix'".into())),
            (Some(name), None) => {
                let s = build_named_state(name, &self.params)?;
                if let Some(d) = &self.dims {
                    if d != s.dims() {
                        return Err(Error::Document(format!(
                            "dims {d:?} do not match family '{name}' dims {:?}",
                            s.dims()
                        )));
                    }
                }
                Ok(s)
            }
            (None, Some(entries)) => {
                let dims = self
                    .dims
                    .clone()
                    .ok_or_else(|| Error::Document("matrix state needs 'dims'".into()))?;
                let total: usize = dims.iter().product();
                let m = DenseMatrix::new(
                    total,
                    total,
                    entries
                        .iter()
                        .map(|&[re, im]| Complex64::new(re, im))
                        .collect(),
                )?;
                DensityState::new(dims, m)
            }
        }
    }
}

pub fn state_to_json(s: &DensityState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&StateDocument::from_state(s))?)
}

pub fn state_from_json(text: &str) -> Result<DensityState> {
    serde_json::from_str::<StateDocument>(text)?.to_state()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn varrho_reduces_and_marginal() {
        let v = build_named_state("varrho", &Params::new()).unwrap();
        let third = 1.0 / 3.0;
        let vp = varrho_prime(third, third, third).unwrap();
        assert!(v.matrix().max_abs_diff(vp.matrix()) < 1e-15);
        let ra = v.partial_trace(&[0]).unwrap();
        assert!(
            ra.matrix()
                .max_abs_diff(&DenseMatrix::diag_real(&[2.0 / 3.0, 1.0 / 3.0]))
                < 1e-15
        );
    }

    #[test]
    fn simplex_derivation_and_errors() {
        let s = build_named_state("varrho_prime", &params(&[("a", 0.2), ("b", 0.3)])).unwrap();
        let full = varrho_prime(0.2, 0.3, 0.5).unwrap();
        assert!(s.matrix().max_abs_diff(full.matrix()) < 1e-15);
        assert!(matches!(
            build_named_state(
                "varrho_prime",
                &params(&[("a", 0.5), ("b", 0.3), ("c", 0.3)])
            ),
            Err(Error::ParamConstraint(_))
        ));
        assert!(build_named_state("varrho_prime", &params(&[("a", 0.5)])).is_err());
        assert!(build_named_state("varrho_prime", &params(&[("a", 1.2), ("b", 0.0)])).is_err());
        assert!(build_named_state("sigma", &params(&[("b", 0.5), ("q", 1.0)])).is_err());
        assert!(matches!(
            build_named_state("nope", &Params::new()),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn sigma_domain() {
        assert!(sigma(0.0).is_err());
        assert!(sigma(1.0).is_ok());
        assert!(sigma(1.5).is_err());
        // mixture weights sum to one
        let b: f64 = 0.37;
        let total =
            (7.0 * b / (7.0 * b + 1.0)) * (2.0 / 7.0 * 3.0 + 1.0 / 7.0) + 1.0 / (7.0 * b + 1.0);
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shifts_state_rank_four() {
        let v = shifts_vectors();
        for i in 0..4 {
            for j in 0..4 {
                let g: Complex64 = v[i].iter().zip(&v[j]).map(|(a, b)| a.conj() * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - r(want)).norm() < 1e-15);
            }
        }
        let s = shifts_upb().unwrap();
        let eig = linalg::hermitian_eigenvalues(s.matrix()).unwrap();
        let rank = eig.iter().filter(|&&e| e > 1e-10).count();
        assert_eq!(rank, 4);
    }

    #[test]
    fn noisy_phi_limits() {
        let pure = noisy_phi(1.0).unwrap();
        let tr2 = pure.matrix().trace_product(pure.matrix()).re;
        assert!((tr2 - 1.0).abs() < 1e-14);
        assert_eq!(pure.dims(), &[3, 3, 2]);
        let mixed = noisy_phi(0.0).unwrap();
        assert!(
            mixed
                .matrix()
                .max_abs_diff(&DenseMatrix::identity(18).scale(1.0 / 18.0))
                < 1e-16
        );
        assert!(noisy_phi(-0.1).is_err());
    }

    #[test]
    fn raw_matrices_are_validated() {
        let bad = DenseMatrix::diag_real(&[0.6, 0.6]);
        assert!(matches!(
            DensityState::new(vec![2], bad),
            Err(Error::InvalidTrace(_))
        ));
        let neg = DenseMatrix::diag_real(&[1.1, -0.1]);
        assert!(matches!(
            DensityState::new(vec![2], neg),
            Err(Error::NotPsd(_))
        ));
        let ok = DenseMatrix::diag_real(&[0.5, 0.5]);
        assert!(DensityState::new(vec![3], ok).is_err());
    }

    #[test]
    fn document_round_trip() {
        let s = sigma(0.3).unwrap();
        let back = state_from_json(&state_to_json(&s).unwrap()).unwrap();
        assert_eq!(back.matrix().entries(), s.matrix().entries());
        let named: StateDocument =
            serde_json::from_str(r#"{"name":"noisy_phi","params":{"p":0.5}}"#).unwrap();
        assert_eq!(named.to_state().unwrap().dims(), &[3, 3, 2]);
        let wrong: StateDocument =
            serde_json::from_str(r#"{"name":"sigma","dims":[2,2],"params":{"b":0.5}}"#).unwrap();
        assert!(wrong.to_state().is_err());
    }
}
