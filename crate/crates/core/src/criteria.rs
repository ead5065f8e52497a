//! Separable bounds, single evaluations and full scans over partitions.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{npartite_correlation, CorrelationMatrix, Mode};
use crate::error::{Error, Result};
use crate::partition::{preset_nc1, preset_nc2, preset_nc3, PartitionTree};
use crate::povm::{gsic_parameter, Povm, PovmKind};
use crate::states::DensityState;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BoundProvenance {
    /// All factors are renormalized SICs.
    SicUnit,
    /// Product over `(a, d, scale)` of `scale·√((a d² + 1)/(d(d+1)))`.
    GsicProduct(Vec<(f64, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionBound {
    pub value: f64,
    pub provenance: BoundProvenance,
}

/// `√((a d² + 1)/(d(d+1)))`.
pub fn gsic_factor(a: f64, d: usize) -> f64 {
    let df = d as f64;
    ((a * df * df + 1.0) / (df * (df + 1.0))).sqrt()
}

fn purity_parameter(p: &Povm) -> Result<f64> {
    match p.kind() {
        PovmKind::Sic => Ok(1.0 / (p.dim() * p.dim()) as f64),
        PovmKind::Gsic { a } => Ok(a),
        PovmKind::Generic => gsic_parameter(p),
    }
}

/// Product bound satisfied by every fully separable state.
pub fn separable_bound(povms: &[&Povm]) -> Result<CriterionBound> {
    if povms.is_empty() {
        return Err(Error::DimensionMismatch(
            "bound over zero subsystems".into(),
        ));
    }
    let all_sic = povms
        .iter()
        .all(|p| p.kind() == PovmKind::Sic && p.scale() != 1.0);
    if all_sic {
        return Ok(CriterionBound {
            value: 1.0,
            provenance: BoundProvenance::SicUnit,
        });
    }
    let mut factors = Vec::with_capacity(povms.len());
    let mut value = 1.0;
    for p in povms {
        let a = purity_parameter(p)?;
        value *= p.scale() * gsic_factor(a, p.dim());
        factors.push((a, p.dim(), p.scale()));
    }
    Ok(CriterionBound {
        value,
        provenance: BoundProvenance::GsicProduct(factors),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Entangled,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "ENTANGLED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub state: String,
    #[serde(serialize_with = "as_display")]
    pub partition: PartitionTree,
    pub mode: Option<Mode>,
    pub povm_descriptor: String,
    pub trace_norm: f64,
    /// `Σ_k ‖column_k‖₂` of the same matrix; an upper bound on `trace_norm`.
    pub column_norm_sum: f64,
    pub bound: CriterionBound,
    pub margin: f64,
    pub verdict: Verdict,
}

fn as_display<S: serde::Serializer, T: fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl CriterionReport {
    pub const FIELDS: [&'static str; 9] = [
        "state",
        "partition",
        "mode",
        "povm",
        "trace_norm",
        "bound",
        "margin",
        "verdict",
        "column_norm_sum",
    ];

    pub fn mode_str(&self) -> &'static str {
        self.mode.map_or("pair", Mode::as_str)
    }

    /// Fields in [`CriterionReport::FIELDS`] order.
    pub fn record(&self) -> Vec<String> {
        vec![
            self.state.clone(),
            self.partition.to_string(),
            self.mode_str().to_string(),
            self.povm_descriptor.clone(),
            fmt_float(self.trace_norm),
            fmt_float(self.bound.value),
            fmt_float(self.margin),
            self.verdict.to_string(),
            fmt_float(self.column_norm_sum),
        ]
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:<10} trace_norm={:.10} bound={:.10} margin={:+.3e} {}",
            self.partition.to_string(),
            self.mode_str(),
            self.trace_norm,
            self.bound.value,
            self.margin,
            self.verdict
        )
    }
}

/// Report for a precomputed correlation matrix.
pub fn report_for(
    rho: &DensityState,
    corr: &CorrelationMatrix,
    povms: &[Povm],
    tol: &Tolerances,
) -> Result<CriterionReport> {
    let leaves = corr.partition.sorted_leaves();
    let used: Vec<&Povm> = leaves.iter().map(|&k| &povms[k]).collect();
    let bound = separable_bound(&used)?;
    let trace_norm = corr.trace_norm()?;
    let margin = trace_norm - bound.value;
    Ok(CriterionReport {
        state: rho.label().to_string(),
        partition: corr.partition.clone(),
        mode: corr.mode,
        povm_descriptor: used
            .iter()
            .map(|p| p.descriptor())
            .collect::<Vec<_>>()
            .join(","),
        trace_norm,
        column_norm_sum: corr.column_norm_sum(),
        bound,
        margin,
        verdict: if margin > tol.verdict {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        },
    })
}

pub fn evaluate(
    rho: &DensityState,
    povms: &[Povm],
    partition: &PartitionTree,
    mode: Mode,
    tol: &Tolerances,
) -> Result<CriterionReport> {
    let corr = npartite_correlation(rho, partition, povms, mode)?;
    report_for(rho, &corr, povms, tol)
}

/// Puts a tree in a representative form: a lone leaf first, otherwise the
/// child with the smaller leaf set first. Reordering children only permutes
/// rows and columns, so the trace norm is unchanged.
pub fn canonical(tree: &PartitionTree) -> PartitionTree {
    match tree {
        PartitionTree::Leaf(_) => tree.clone(),
        PartitionTree::Split(l, r) => {
            let (l, r) = (canonical(l), canonical(r));
            let swap = match (l.is_leaf(), r.is_leaf()) {
                (false, true) => true,
                (true, false) => false,
                _ => r.sorted_leaves() < l.sorted_leaves(),
            };
            if swap {
                PartitionTree::split(r, l)
            } else {
                PartitionTree::split(l, r)
            }
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Largest subsystem count [`scan`] accepts (it enumerates permutations).
pub const MAX_SCAN_SUBSYSTEMS: usize = 6;

/// Every tree [`scan`] evaluates: all reduced pairs, all reduced triples with
/// each distinguished subsystem, and for every larger subset the chain,
/// pair-first and half-split shapes over all orderings, deduplicated.
pub fn scan_trees(n: usize) -> Result<Vec<PartitionTree>> {
    if n < 2 {
        return Err(Error::DimensionMismatch(
            "scan needs at least two subsystems".into(),
        ));
    }
    if n > MAX_SCAN_SUBSYSTEMS {
        return Err(Error::DimensionMismatch(format!(
            "scan supports at most {MAX_SCAN_SUBSYSTEMS} subsystems, got {n}"
        )));
    }
    let mut trees = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
        let m = subset.len();
        if m < 2 {
            continue;
        }
        let shapes: Vec<PartitionTree> = [preset_nc1(m), preset_nc2(m), preset_nc3(m)]
            .into_iter()
            .flatten()
            .collect();
        for perm in permutations(&subset) {
            for shape in &shapes {
                trees.insert(canonical(&shape.relabel(&perm)));
            }
        }
    }
    Ok(trees.into_iter().collect())
}

/// Evaluates every tree from [`scan_trees`], sorted by partition string.
pub fn scan(
    rho: &DensityState,
    povms: &[Povm],
    mode: Mode,
    tol: &Tolerances,
) -> Result<Vec<CriterionReport>> {
    let trees = scan_trees(rho.num_subsystems())?;
    let mut reports = trees
        .par_iter()
        .map(|t| evaluate(rho, povms, t, mode, tol))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by_key(|r| r.partition.to_string());
    Ok(reports)
}

/// ENTANGLED if any report is.
pub fn overall(reports: &[CriterionReport]) -> Verdict {
    if reports.iter().any(|r| r.verdict == Verdict::Entangled) {
        Verdict::Entangled
    } else {
        Verdict::Inconclusive
    }
}

/// The report with the largest margin.
pub fn best(reports: &[CriterionReport]) -> Option<&CriterionReport> {
    reports.iter().max_by(|a, b| a.margin.total_cmp(&b.margin))
}

fn check_simplex(b: f64, c: f64) -> Result<()> {
    let eps = 1e-12;
    if b < -eps || c < -eps || b + c > 1.0 + eps {
        return Err(Error::OutOfRange {
            name: "b, c".into(),
            value: b + c,
            reason: format!("need b, c ≥ 0 and b + c ≤ 1 (b = {b}, c = {c})"),
        });
    }
    Ok(())
}

/// `(3√3/4)√(b²+c²+b+c+1) + (3/4)√(2+(b+c−1)²−b−c)` for the weighted
/// three-qubit |ψ⁺⟩ mixture with weights `(1−b−c, b, c)`.
pub fn closed_form_example1(b: f64, c: f64) -> Result<f64> {
    check_simplex(b, c)?;
    let s3 = 3f64.sqrt();
    Ok(0.75 * s3 * (b * b + c * c + b + c + 1.0).sqrt()
        + 0.75 * (2.0 + (b + c - 1.0).powi(2) - b - c).sqrt())
}

/// Reference closed form for the four-qubit mixture, in its own variables
/// `(a, b)`; evaluated here with `a = x`, `b = y`.
pub fn closed_form_four_partite(a: f64, b: f64) -> Result<f64> {
    check_simplex(a, b)?;
    let left = (3.0 * (a * a + a + 1.0)).sqrt() + (a * a - 3.0 * a + 3.0).sqrt();
    let right = (a * a + a * b + 2.0 * a + b * b + b + 1.0).sqrt()
        + (a * a + 3.0 * a * b - 6.0 * a + 3.0 * b * b - 9.0 * b + 9.0).sqrt();
    Ok(3.0 / 16.0 * left * right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{build_gsic, build_sic_qubit, renormalize};
    use crate::states::{build_named_state, Params};

    #[test]
    fn bound_values() {
        let e = renormalize(&build_sic_qubit()).unwrap();
        let b = separable_bound(&[&e, &e, &e]).unwrap();
        assert_eq!(b.value, 1.0);
        assert_eq!(b.provenance, BoundProvenance::SicUnit);

        let s = build_sic_qubit();
        let raw = separable_bound(&[&s, &s, &s]).unwrap();
        assert!((raw.value - (1.0f64 / 3.0).powf(1.5)).abs() < 1e-15);

        let g3 = build_gsic(3, 0.01).unwrap();
        let g2 = build_gsic(2, 0.05).unwrap();
        let a3 = gsic_parameter(&g3).unwrap();
        let a2 = gsic_parameter(&g2).unwrap();
        let want = ((9.0 * a3 + 1.0) / 12.0).sqrt().powi(2) * ((4.0 * a2 + 1.0) / 6.0).sqrt();
        let got = separable_bound(&[&g3, &g3, &g2]).unwrap().value;
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn closed_form_points() {
        let third = 1.0 / 3.0;
        assert!((closed_form_example1(third, third).unwrap() - 2.6867).abs() < 1e-4);
        let at0 = closed_form_example1(0.0, 0.0).unwrap();
        assert!((at0 - 1.5 * 3f64.sqrt()).abs() < 1e-15);
        assert!(closed_form_example1(0.7, 0.7).is_err());
    }

    #[test]
    fn canonical_dedupes_mirror_trees() {
        let a = canonical(&PartitionTree::parse("(C|B)|A").unwrap());
        assert_eq!(a.to_string(), "A|(B|C)");
        let b = canonical(&PartitionTree::parse("(C|D)|(A|B)").unwrap());
        assert_eq!(b.to_string(), "(A|B)|(C|D)");
    }

    #[test]
    fn scan_tree_counts() {
        assert_eq!(scan_trees(2).unwrap().len(), 1);
        // 3 pairs + 3 distinguished forms
        assert_eq!(scan_trees(3).unwrap().len(), 6);
        // 6 pairs + 4·3 triples + 12 chains + 3 pair splits
        assert_eq!(scan_trees(4).unwrap().len(), 33);
        assert!(scan_trees(7).is_err());
    }

    #[test]
    fn maximally_mixed_is_inconclusive_when_unfolded() {
        let rho = build_named_state("maximally_mixed", &Params::new()).unwrap();
        let e = renormalize(&build_sic_qubit()).unwrap();
        let povms = vec![e.clone(), e.clone(), e];
        let reports = scan(&rho, &povms, Mode::Unfolding, &Tolerances::default()).unwrap();
        assert_eq!(overall(&reports), Verdict::Inconclusive);
        let t = PartitionTree::parse("A|BC").unwrap();
        let m = evaluate(&rho, &povms, &t, Mode::MarginalKron, &Tolerances::default()).unwrap();
        assert!((m.trace_norm - 0.75 * 3f64.sqrt()).abs() < 1e-12);
    }
}
