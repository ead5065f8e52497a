//! Ready-made computations over the example families: parameter grids,
//! detection thresholds and the data behind each figure.

use rayon::prelude::*;

use crate::correlations::{npartite_correlation, CorrelationMatrix, Mode};
use crate::criteria::{
    self, closed_form_example1, closed_form_four_partite, report_for, CriterionReport,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::partition::PartitionTree;
use crate::povm::{
    build_gsic_with_range, build_sic_qubit, conjugate, gsic_parameter, renormalize, GsicRange, Povm,
};
use crate::states::{self, DensityState};
use crate::tolerance::Tolerances;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Grid with zero removed (the GSIC families need t ≠ 0).
pub fn nonzero_grid(limit: f64, n: usize) -> Vec<f64> {
    linspace(-limit, limit, n)
        .into_iter()
        .filter(|t| t.abs() > 1e-15)
        .collect()
}

/// `(b, c)` pairs on the simplex `b, c ≥ 0, b + c ≤ 1` with the given step.
pub fn simplex_grid(step: f64) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::OutOfRange {
            name: "step".into(),
            value: step,
            reason: "must lie in (0, 1]".into(),
        });
    }
    let n = (1.0 / step).round() as usize;
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=(n - i) {
            let b = (i as f64 * step).min(1.0);
            let c = (j as f64 * step).min(1.0 - b);
            out.push((b, c));
        }
    }
    Ok(out)
}

pub fn renormalized_sic() -> Povm {
    renormalize(&build_sic_qubit()).expect("fresh POVM")
}

fn sic_set(n: usize) -> Vec<Povm> {
    vec![renormalized_sic(); n]
}

fn tree(text: &str) -> PartitionTree {
    PartitionTree::parse(text).expect("literal tree")
}

/// Marginal-Kronecker report for `A|(B|C)` on the equal-weight three-qubit mixture.
pub fn example1_headline() -> Result<CriterionReport> {
    let rho = states::build_named_state("varrho", &states::Params::new())?;
    criteria::evaluate(
        &rho,
        &sic_set(3),
        &tree("A|(B|C)"),
        Mode::MarginalKron,
        &Tolerances::default(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    /// Weight of the first term.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub trace_norm: f64,
    pub column_norm_sum: f64,
    pub closed_form: f64,
}

/// `A|(B|C)` in the given mode over the `(b, c)` simplex.
pub fn example1_grid(step: f64, mode: Mode) -> Result<Vec<SimplexPoint>> {
    let povms = sic_set(3);
    let t = tree("A|(B|C)");
    simplex_grid(step)?
        .into_par_iter()
        .map(|(b, c)| {
            let a = (1.0 - b - c).max(0.0);
            let rho = states::varrho_prime(a, b, c)?;
            let corr = npartite_correlation(&rho, &t, &povms, mode)?;
            Ok(SimplexPoint {
                a,
                b,
                c,
                trace_norm: corr.trace_norm()?,
                column_norm_sum: corr.column_norm_sum(),
                closed_form: closed_form_example1(b, c)?,
            })
        })
        .collect()
}

/// Marginal-Kronecker `AB|CD` over the `(x, y)` simplex of the four-qubit
/// mixture. Fields `b, c` hold `x, y` and `a` holds `z`; the closed form is
/// evaluated with its variables set to `(x, y)`.
pub fn four_partite_grid(step: f64) -> Result<Vec<SimplexPoint>> {
    let povms = sic_set(4);
    let t = tree("AB|CD");
    simplex_grid(step)?
        .into_par_iter()
        .map(|(x, y)| {
            let z = (1.0 - x - y).max(0.0);
            let rho = states::rho_abcd(x, y, z)?;
            let corr = npartite_correlation(&rho, &t, &povms, Mode::MarginalKron)?;
            Ok(SimplexPoint {
                a: z,
                b: x,
                c: y,
                trace_norm: corr.trace_norm()?,
                column_norm_sum: corr.column_norm_sum(),
                closed_form: closed_form_four_partite(x, y)?,
            })
        })
        .collect()
}

/// Per-subsystem pattern of plain (`N`) and conjugated (`C`) POVMs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn parse(text: &str) -> Result<Self> {
        text.chars()
            .enumerate()
            .map(|(i, ch)| match ch.to_ascii_uppercase() {
                'N' => Ok(false),
                'C' => Ok(true),
                other => Err(Error::Parse {
                    column: i + 1,
                    message: format!("assignment uses N or C, found '{other}'"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }

    pub fn apply(&self, base: &[Povm]) -> Result<Vec<Povm>> {
        if self.0.len() != base.len() {
            return Err(Error::DimensionMismatch(format!(
                "assignment of length {} for {} subsystems",
                self.0.len(),
                base.len()
            )));
        }
        Ok(base
            .iter()
            .zip(&self.0)
            .map(|(p, &c)| if c { conjugate(p) } else { p.clone() })
            .collect())
    }
}

impl Default for Assignment {
    fn default() -> Self {
        Assignment(vec![false, true, false])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsicPoint {
    pub t: f64,
    pub a: f64,
    pub bound: f64,
    /// Trace norm per mode, in [`Mode::ALL`] order.
    pub trace_norms: [f64; 3],
}

impl GsicPoint {
    pub fn margin(&self, mode: Mode) -> f64 {
        let i = Mode::ALL
            .iter()
            .position(|&m| m == mode)
            .expect("mode listed");
        self.trace_norms[i] - self.bound
    }
}

/// Distinguished-A constructions on the Shifts bound-entangled state with the
/// qubit GSIC family (un-renormalized) assigned per `assignment`.
pub fn example2_grid(ts: &[f64], assignment: &Assignment) -> Result<Vec<GsicPoint>> {
    let rho = states::shifts_upb()?;
    let t = tree("A|(B|C)");
    ts.par_iter()
        .map(|&tv| {
            let g = build_gsic_with_range(2, tv, GsicRange::Nominal)?;
            let povms = assignment.apply(&[g.clone(), g.clone(), g.clone()])?;
            let bound = criteria::separable_bound(&povms.iter().collect::<Vec<_>>())?.value;
            let mut trace_norms = [0.0; 3];
            for (slot, mode) in trace_norms.iter_mut().zip(Mode::ALL) {
                *slot = npartite_correlation(&rho, &t, &povms, mode)?.trace_norm()?;
            }
            Ok(GsicPoint {
                t: tv,
                a: gsic_parameter(&g)?,
                bound,
                trace_norms,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPoint {
    pub b: f64,
    /// Trace norm of `A|(B|C)` per mode, in [`Mode::ALL`] order.
    pub trace_norms: [f64; 3],
    /// Smallest eigenvalue of the partial transpose on A, B, C.
    pub min_pt: [f64; 3],
}

impl SigmaPoint {
    pub fn trace_norm(&self, mode: Mode) -> f64 {
        self.trace_norms[Mode::ALL
            .iter()
            .position(|&m| m == mode)
            .expect("mode listed")]
    }

    pub fn is_ppt(&self, tol: f64) -> bool {
        self.min_pt.iter().all(|&e| e >= -tol)
    }
}

pub fn example3_grid(bs: &[f64]) -> Result<Vec<SigmaPoint>> {
    let povms = sic_set(3);
    let t = tree("A|(B|C)");
    bs.par_iter()
        .map(|&b| {
            let rho = states::sigma(b)?;
            let mut trace_norms = [0.0; 3];
            for (slot, mode) in trace_norms.iter_mut().zip(Mode::ALL) {
                *slot = npartite_correlation(&rho, &t, &povms, mode)?.trace_norm()?;
            }
            let mut min_pt = [0.0; 3];
            for (k, slot) in min_pt.iter_mut().enumerate() {
                *slot = linalg::min_eigenvalue(&rho.partial_transpose(k)?)?;
            }
            Ok(SigmaPoint {
                b,
                trace_norms,
                min_pt,
            })
        })
        .collect()
}

/// Search settings for the white-noise threshold of the 3⊗3⊗2 state.
#[derive(Debug, Clone)]
pub struct Example4Config {
    pub t3_grid: Vec<f64>,
    pub t2_grid: Vec<f64>,
    pub assignment: Assignment,
    pub mode: Mode,
    pub range: GsicRange,
    /// Bisection stops when the bracket is narrower than this.
    pub p_resolution: f64,
}

impl Default for Example4Config {
    fn default() -> Self {
        Example4Config {
            t3_grid: nonzero_grid(0.012, 49),
            t2_grid: nonzero_grid(0.068, 49),
            assignment: Assignment::default(),
            mode: Mode::Unfolding,
            range: GsicRange::Nominal,
            p_resolution: 1e-7,
        }
    }
}

pub fn example4_povms(
    t3: f64,
    t2: f64,
    assignment: &Assignment,
    range: GsicRange,
) -> Result<Vec<Povm>> {
    let g3 = build_gsic_with_range(3, t3, range)?;
    let g2 = build_gsic_with_range(2, t2, range)?;
    assignment.apply(&[g3.clone(), g3, g2])
}

enum Piece {
    /// Correlation matrix linear in ρ: values at p = 0 and p = 1.
    Linear(CorrelationMatrix, CorrelationMatrix, f64),
    /// Evaluated directly at each p.
    Direct(PartitionTree),
}

/// Best scan margin of the noisy state as a function of `p` for fixed POVMs.
pub struct NoisyMargin {
    povms: Vec<Povm>,
    mode: Mode,
    pieces: Vec<Piece>,
}

fn lerp(a: &linalg::DenseMatrix, b: &linalg::DenseMatrix, p: f64) -> linalg::DenseMatrix {
    &a.scale(1.0 - p) + &b.scale(p)
}

impl NoisyMargin {
    pub fn new(povms: Vec<Povm>, mode: Mode) -> Result<Self> {
        let trees = criteria::scan_trees(3)?;
        let pieces = match mode {
            Mode::MarginalKron => trees.into_iter().map(Piece::Direct).collect(),
            Mode::BlockDiag | Mode::Unfolding => {
                let noise = states::noisy_phi(0.0)?;
                let pure = states::noisy_phi(1.0)?;
                trees
                    .iter()
                    .map(|t| {
                        let c0 = npartite_correlation(&noise, t, &povms, mode)?;
                        let c1 = npartite_correlation(&pure, t, &povms, mode)?;
                        let bound = report_for(&pure, &c1, &povms, &Tolerances::default())?
                            .bound
                            .value;
                        Ok(Piece::Linear(c0, c1, bound))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(NoisyMargin {
            povms,
            mode,
            pieces,
        })
    }

    /// Largest margin over the scanned partitions at visibility `p`.
    pub fn at(&self, p: f64) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        let mut state: Option<DensityState> = None;
        for piece in &self.pieces {
            let margin = match piece {
                Piece::Linear(c0, c1, bound) => {
                    let norm = match (&c0.blocks, &c1.blocks) {
                        (Some(b0), Some(b1)) => b0
                            .iter()
                            .zip(b1)
                            .map(|(x, y)| linalg::trace_norm(&lerp(x, y, p)))
                            .sum::<Result<f64>>()?,
                        _ => linalg::trace_norm(&lerp(&c0.matrix, &c1.matrix, p))?,
                    };
                    norm - bound
                }
                Piece::Direct(t) => {
                    if state.is_none() {
                        state = Some(states::noisy_phi(p)?);
                    }
                    let rho = state.as_ref().expect("just built");
                    criteria::evaluate(rho, &self.povms, t, self.mode, &Tolerances::default())?
                        .margin
                }
            };
            best = best.max(margin);
        }
        Ok(best)
    }

    /// Smallest `p` with positive margin, assuming the margin is convex in `p`
    /// (true for the linear modes). `None` if even `p = 1` is not detected.
    pub fn threshold(&self, resolution: f64) -> Result<Option<f64>> {
        if self.at(1.0)? <= 0.0 {
            return Ok(None);
        }
        if self.at(0.0)? > 0.0 {
            return Ok(Some(0.0));
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > resolution {
            let mid = 0.5 * (lo + hi);
            if self.at(mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPoint {
    pub t3: f64,
    pub t2: f64,
    pub p_star: Option<f64>,
    pub margin_at_one: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example4Result {
    /// Smallest threshold over the grid, with the parameters achieving it.
    pub p_star: Option<f64>,
    pub best_t3: f64,
    pub best_t2: f64,
    pub points: Vec<ThresholdPoint>,
}

/// Threshold for every `(t3, t2)` pair; deterministic order (t3 major).
pub fn example4_thresholds(cfg: &Example4Config) -> Result<Example4Result> {
    let pairs: Vec<(f64, f64)> = cfg
        .t3_grid
        .iter()
        .flat_map(|&a| cfg.t2_grid.iter().map(move |&b| (a, b)))
        .collect();
    let points = pairs
        .par_iter()
        .map(|&(t3, t2)| {
            let m = NoisyMargin::new(
                example4_povms(t3, t2, &cfg.assignment, cfg.range)?,
                cfg.mode,
            )?;
            Ok(ThresholdPoint {
                t3,
                t2,
                p_star: m.threshold(cfg.p_resolution)?,
                margin_at_one: m.at(1.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = points
        .iter()
        .filter_map(|pt| pt.p_star.map(|p| (p, pt)))
        .min_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Example4Result {
        p_star: best.map(|b| b.0),
        best_t3: best.map_or(f64::NAN, |b| b.1.t3),
        best_t2: best.map_or(f64::NAN, |b| b.1.t2),
        points,
    })
}

/// Margin at `p` maximized over the configured grid.
pub fn example4_best_margin(cfg: &Example4Config, p: f64) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = cfg
        .t3_grid
        .iter()
        .flat_map(|&a| cfg.t2_grid.iter().map(move |&b| (a, b)))
        .collect();
    let margins = pairs
        .par_iter()
        .map(|&(t3, t2)| {
            NoisyMargin::new(
                example4_povms(t3, t2, &cfg.assignment, cfg.range)?,
                cfg.mode,
            )?
            .at(p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(margins.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
