//! SIC and GSIC measurements: construction, renormalization, conjugation,
//! validation and a JSON document format.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PovmKind {
    Sic,
    Gsic { a: f64 },
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Povm,
    Renormalized,
}

/// Allowed magnitude of the GSIC family parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GsicRange {
    /// |t| ≤ 0.068 for d = 2 and |t| ≤ 0.012 for d = 3.
    #[default]
    Nominal,
    /// Any `t` for which every element stays positive semidefinite.
    PsdBoundary,
}

impl GsicRange {
    pub fn limit(self, d: usize) -> Option<f64> {
        match (self, d) {
            (GsicRange::Nominal, 2) => Some(0.068),
            (GsicRange::Nominal, 3) => Some(0.012),
            _ => None,
        }
    }
}

/// An ordered set of `d²` operators on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<DenseMatrix>,
    kind: PovmKind,
    normalization: Normalization,
    descriptor: String,
}

/// `√(d(d+1)/2)`.
pub fn renormalization_factor(d: usize) -> f64 {
    ((d * (d + 1)) as f64 / 2.0).sqrt()
}

impl Povm {
    /// Checks shapes only; algebraic conditions are reported by [`validate`].
    pub fn new(
        dim: usize,
        elements: Vec<DenseMatrix>,
        kind: PovmKind,
        normalization: Normalization,
        descriptor: impl Into<String>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "POVM dimension {dim} < 2"
            )));
        }
        if elements.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} elements for dimension {dim}, expected {}",
                elements.len(),
                dim * dim
            )));
        }
        if let Some(e) = elements.iter().find(|e| e.rows() != dim || e.cols() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "element of size {}x{} in a dimension-{dim} POVM",
                e.rows(),
                e.cols()
            )));
        }
        Ok(Povm {
            dim,
            elements,
            kind,
            normalization,
            descriptor: descriptor.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[DenseMatrix] {
        &self.elements
    }

    pub fn kind(&self) -> PovmKind {
        self.kind
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Factor the elements carry relative to a plain POVM.
    pub fn scale(&self) -> f64 {
        match self.normalization {
            Normalization::Povm => 1.0,
            Normalization::Renormalized => renormalization_factor(self.dim),
        }
    }

    /// Elements divided by [`Povm::scale`].
    fn unscaled(&self) -> Vec<DenseMatrix> {
        let s = self.scale();
        self.elements.iter().map(|e| e.scale(1.0 / s)).collect()
    }
}

impl fmt::Display for Povm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat(d: usize, entries: &[Complex64]) -> DenseMatrix {
    DenseMatrix::new(d, d, entries.to_vec()).expect("literal matrix shape")
}

/// The four qubit SIC vectors, in order.
pub fn sic_qubit_vectors() -> [[Complex64; 2]; 4] {
    let r3 = 3f64.sqrt();
    let r2 = 2f64.sqrt();
    let w = Complex64::from_polar(1.0, -std::f64::consts::PI / 3.0);
    let i = c(0.0, 1.0);
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(1.0 / r3, 0.0), c(r2 / r3, 0.0)],
        [i * w / r3, -i * r2 / r3],
        [c(1.0 / r3, 0.0), -w * r2 / r3],
    ]
}

/// `Π_k = |φ_k⟩⟨φ_k| / 2` for the qubit SIC vectors.
pub fn build_sic_qubit() -> Povm {
    let elements = sic_qubit_vectors()
        .iter()
        .map(|v| DenseMatrix::outer(v).scale(0.5))
        .collect();
    Povm::new(2, elements, PovmKind::Sic, Normalization::Povm, "sic2").expect("qubit SIC shape")
}

/// Scales every element by `√(d(d+1)/2)`.
pub fn renormalize(p: &Povm) -> Result<Povm> {
    if p.normalization == Normalization::Renormalized {
        return Err(Error::AlreadyRenormalized);
    }
    let f = renormalization_factor(p.dim);
    Ok(Povm {
        dim: p.dim,
        elements: p.elements.iter().map(|e| e.scale(f)).collect(),
        kind: p.kind,
        normalization: Normalization::Renormalized,
        descriptor: p.descriptor.clone(),
    })
}

/// Entrywise complex conjugate of every element.
pub fn conjugate(p: &Povm) -> Povm {
    let descriptor = match p
        .descriptor
        .strip_prefix("conj(")
        .and_then(|s| s.strip_suffix(')'))
    {
        Some(inner) => inner.to_string(),
        None => format!("conj({})", p.descriptor),
    };
    Povm {
        dim: p.dim,
        elements: p.elements.iter().map(DenseMatrix::conj).collect(),
        kind: p.kind,
        normalization: p.normalization,
        descriptor,
    }
}

/// The `d² − 1` trace-orthonormal generators of the GSIC families (d = 2, 3).
pub fn gsic_generators(d: usize) -> Result<Vec<DenseMatrix>> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    match d {
        2 => Ok(vec![
            mat(2, &[z, c(s2, 0.0), c(s2, 0.0), z]),
            mat(2, &[z, c(0.0, s2), c(0.0, -s2), z]),
            mat(2, &[c(s2, 0.0), z, z, c(-s2, 0.0)]),
        ]),
        3 => {
            let s6 = 1.0 / 6f64.sqrt();
            let r = c(s2, 0.0);
            let pi = c(0.0, s2);
            Ok(vec![
                mat(3, &[r, z, z, z, -r, z, z, z, z]),
                mat(3, &[z, r, z, r, z, z, z, z, z]),
                mat(3, &[z, z, r, z, z, z, r, z, z]),
                mat(3, &[z, -pi, z, pi, z, z, z, z, z]),
                mat(
                    3,
                    &[c(s6, 0.0), z, z, z, c(s6, 0.0), z, z, z, c(-2.0 * s6, 0.0)],
                ),
                mat(3, &[z, z, z, z, z, r, z, r, z]),
                mat(3, &[z, z, -pi, z, z, z, pi, z, z]),
                mat(3, &[z, z, z, z, z, -pi, z, pi, z]),
            ])
        }
        _ => Err(Error::OutOfRange {
            name: "d".into(),
            value: d as f64,
            reason: "GSIC families exist here only for d = 2 and d = 3".into(),
        }),
    }
}

/// The distinguished qubit generator in its commonly quoted form,
/// `(1/√2)[[1, 1+i], [1−i, 1]]`. It differs from the generator sum in
/// entry (2,2), so a family built on it is not complete.
pub fn incomplete_qubit_distinguished() -> DenseMatrix {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    mat(2, &[c(s2, 0.0), c(s2, s2), c(s2, -s2), c(s2, 0.0)])
}

/// Family `M_α = I/d² + t(S − d(d+1)·g_α)`, `M_last = I/d² + (d+1)t·S` for an
/// arbitrary distinguished operator `S`. No positivity or completeness check.
pub fn gsic_family_unchecked(
    d: usize,
    t: f64,
    generators: &[DenseMatrix],
    distinguished: &DenseMatrix,
) -> Result<Povm> {
    if generators.len() + 1 != d * d {
        return Err(Error::DimensionMismatch(format!(
            "{} generators for d = {d}",
            generators.len()
        )));
    }
    let base = DenseMatrix::identity(d).scale(1.0 / (d * d) as f64);
    let k = (d * (d + 1)) as f64;
    let mut elements: Vec<DenseMatrix> = generators
        .iter()
        .map(|g| &base + &(distinguished - &g.scale(k)).scale(t))
        .collect();
    elements.push(&base + &distinguished.scale((d + 1) as f64 * t));
    Povm::new(
        d,
        elements,
        PovmKind::Generic,
        Normalization::Povm,
        format!("gsic{d}-custom:{t}"),
    )
}

/// GSIC family for d ∈ {2, 3} within the nominal parameter range.
pub fn build_gsic(d: usize, t: f64) -> Result<Povm> {
    build_gsic_with_range(d, t, GsicRange::Nominal)
}

pub fn build_gsic_with_range(d: usize, t: f64, range: GsicRange) -> Result<Povm> {
    let generators = gsic_generators(d)?;
    if !t.is_finite() || t == 0.0 {
        return Err(Error::OutOfRange {
            name: "t".into(),
            value: t,
            reason: "t must be finite and non-zero".into(),
        });
    }
    if let Some(limit) = range.limit(d) {
        if t.abs() > limit {
            return Err(Error::OutOfRange {
                name: "t".into(),
                value: t,
                reason: format!("|t| must not exceed {limit} for d = {d}"),
            });
        }
    }
    let sum = generators
        .iter()
        .skip(1)
        .fold(generators[0].clone(), |acc, g| &acc + g);
    let family = gsic_family_unchecked(d, t, &generators, &sum)?;
    for e in family.elements() {
        let min = linalg::min_eigenvalue(e)?;
        if min < -tolerance::NUMERIC {
            return Err(Error::OutOfRange {
                name: "t".into(),
                value: t,
                reason: format!("element not positive semidefinite (min eigenvalue {min:.3e})"),
            });
        }
    }
    let a = uniform_purity(family.elements())?;
    Ok(Povm {
        kind: PovmKind::Gsic { a },
        descriptor: format!("gsic{d}:{t}"),
        ..family
    })
}

/// Largest `t > 0` keeping every element of the d-dimensional family PSD, by bisection.
pub fn gsic_psd_boundary(d: usize) -> Result<f64> {
    let ok = |t: f64| build_gsic_with_range(d, t, GsicRange::PsdBoundary).is_ok();
    let (mut lo, mut hi) = (1e-6, 1.0);
    if !ok(lo) {
        return Err(Error::NotGsic(format!("no PSD family for d = {d}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(lo)
}

fn purities(elements: &[DenseMatrix]) -> Vec<f64> {
    elements.iter().map(|e| e.trace_product(e).re).collect()
}

fn uniform_purity(elements: &[DenseMatrix]) -> Result<f64> {
    let p = purities(elements);
    let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo >= tolerance::NUMERIC {
        return Err(Error::NotGsic(format!(
            "element purities spread by {:.3e}",
            hi - lo
        )));
    }
    Ok(p.iter().sum::<f64>() / p.len() as f64)
}

/// Common purity `a = Tr(M_α²)` of the underlying (un-renormalized) elements.
pub fn gsic_parameter(p: &Povm) -> Result<f64> {
    uniform_purity(&p.unscaled())
}

/// One validation condition with its measured deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub descriptor: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "povm {}", self.descriptor)?;
        for c in &self.checks {
            write!(
                f,
                "  {:<14} {} deviation={:.3e} tol={:.0e}",
                c.name,
                if c.passed { "ok  " } else { "FAIL" },
                c.deviation,
                c.tolerance
            )?;
            if !c.detail.is_empty() {
                write!(f, " ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

fn push(checks: &mut Vec<Check>, name: &'static str, deviation: f64, tol: f64, detail: String) {
    checks.push(Check {
        name,
        deviation,
        tolerance: tol,
        passed: deviation <= tol,
        detail,
    });
}

/// Checks completeness, Hermiticity, positivity and the kind-specific overlap
/// conditions at 1e-10. Failures are report entries, never errors.
pub fn validate(p: &Povm) -> ValidationReport {
    let tol = tolerance::NUMERIC;
    let d = p.dim;
    let df = d as f64;
    let el = p.unscaled();
    let mut checks = Vec::new();

    let herm = el
        .iter()
        .map(DenseMatrix::hermitian_deviation)
        .fold(0.0, f64::max);
    push(&mut checks, "hermitian", herm, tol, String::new());

    let min_eig = el
        .iter()
        .map(|e| linalg::min_eigenvalue(e).unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    push(
        &mut checks,
        "psd",
        (-min_eig).max(0.0),
        tol,
        format!("min eigenvalue {min_eig:.3e}"),
    );

    let sum = el.iter().skip(1).fold(el[0].clone(), |acc, e| &acc + e);
    let diff = &sum - &DenseMatrix::identity(d);
    let (mut worst, mut at) = (0.0, (0, 0));
    for i in 0..d {
        for j in 0..d {
            if diff[(i, j)].norm() > worst {
                worst = diff[(i, j)].norm();
                at = (i + 1, j + 1);
            }
        }
    }
    let detail = if worst > tol {
        format!("largest at entry ({},{})", at.0, at.1)
    } else {
        String::new()
    };
    push(&mut checks, "completeness", worst, tol, detail);

    let cross_dev = |target_diag: f64, target_off: f64| {
        let mut diag = 0.0f64;
        let mut off = 0.0f64;
        for (i, a) in el.iter().enumerate() {
            for (j, b) in el.iter().enumerate() {
                let v = a.trace_product(b);
                if i == j {
                    diag = diag.max((v - target_diag).norm());
                } else {
                    off = off.max((v - target_off).norm());
                }
            }
        }
        (diag, off)
    };

    match p.kind {
        PovmKind::Sic => {
            // Tr(Π_kΠ_l) = (dδ_kl + 1) / (d²(d+1))
            let (diag, off) = cross_dev(1.0 / (df * df), 1.0 / (df * df * (df + 1.0)));
            push(
                &mut checks,
                "sic overlaps",
                diag.max(off),
                tol,
                String::new(),
            );
        }
        PovmKind::Gsic { a } => {
            let (diag, off) = cross_dev(a, (1.0 - df * a) / (df * (df * df - 1.0)));
            push(&mut checks, "gsic purity", diag, tol, format!("a = {a}"));
            push(&mut checks, "gsic cross", off, tol, String::new());
            let lo = 1.0 / (df * df * df);
            let hi = 1.0 / (df * df);
            let out = (lo - a).max(a - hi).max(0.0);
            push(
                &mut checks,
                "gsic range",
                out,
                tol,
                format!("[{lo:.6}, {hi:.6}]"),
            );
        }
        PovmKind::Generic => {}
    }

    ValidationReport {
        descriptor: p.descriptor.clone(),
        checks,
    }
}

/// JSON form of a POVM; each element is a row-major list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmDocument {
    pub dim: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    #[serde(default = "default_normalization")]
    pub normalization: String,
    pub elements: Vec<Vec<[f64; 2]>>,
}

fn default_normalization() -> String {
    "povm".into()
}

impl PovmDocument {
    pub fn from_povm(p: &Povm) -> Self {
        let (kind, parameter) = match p.kind {
            PovmKind::Sic => ("sic", None),
            PovmKind::Gsic { a } => ("gsic", Some(a)),
            PovmKind::Generic => ("generic", None),
        };
        PovmDocument {
            dim: p.dim,
            kind: kind.into(),
            parameter,
            normalization: match p.normalization {
                Normalization::Povm => "povm".into(),
                Normalization::Renormalized => "renormalized".into(),
            },
            elements: p
                .elements
                .iter()
                .map(|e| e.entries().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        let kind = match (self.kind.as_str(), self.parameter) {
            ("sic", _) => PovmKind::Sic,
            ("gsic", Some(a)) => PovmKind::Gsic { a },
            ("gsic", None) => return Err(Error::Document("gsic POVM needs a parameter".into())),
            ("generic", _) => PovmKind::Generic,
            (other, _) => return Err(Error::Document(format!("unknown POVM kind '{other}'"))),
        };
        let normalization = match self.normalization.as_str() {
            "povm" => Normalization::Povm,
            "renormalized" => Normalization::Renormalized,
            other => return Err(Error::Document(format!("unknown normalization '{other}'"))),
        };
        let elements = self
            .elements
            .iter()
            .map(|e| {
                DenseMatrix::new(
                    self.dim,
                    self.dim,
                    e.iter().map(|&[re, im]| c(re, im)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::new(
            self.dim,
            elements,
            kind,
            normalization,
            format!("file:{}", self.kind),
        )
    }
}

pub fn to_json(p: &Povm) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PovmDocument::from_povm(p))?)
}

pub fn from_json(text: &str) -> Result<Povm> {
    serde_json::from_str::<PovmDocument>(text)?.to_povm()
}
