use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use sicorr::criteria::{self, fmt_float, CriterionReport, Verdict};
use sicorr::partition::resolve;
use sicorr::povm::validate;
use sicorr::states::{build_named_state, DensityState, Params};
use sicorr::Error;

use crate::settings::{parse_povm, CommonOpts, Settings};
use crate::table;
use crate::{CliError, Outcome};

/// Largest number of grid points a sweep may evaluate.
const GRID_LIMIT: usize = 1_000_000;

pub fn validate_povm(spec: &str) -> Result<Outcome, CliError> {
    let p = parse_povm(spec)?;
    let report = validate(&p);
    println!("{report}");
    if report.passed() {
        Ok(Outcome::Clear)
    } else {
        Err(CliError::Usage(format!(
            "POVM '{}' failed validation",
            p.descriptor()
        )))
    }
}

fn reports_for(rho: &DensityState, s: &Settings) -> Result<Vec<CriterionReport>, CliError> {
    let povms = s.povms_for(rho.dims())?;
    match &s.partition {
        Some(text) => {
            let tree = resolve(text, rho.num_subsystems())?;
            tree.validate(rho.num_subsystems())?;
            Ok(vec![criteria::evaluate(
                rho,
                &povms,
                &tree,
                s.mode,
                &s.tolerances,
            )?])
        }
        None => Ok(criteria::scan(rho, &povms, s.mode, &s.tolerances)?),
    }
}

pub fn detect(state: &Path, opts: &CommonOpts) -> Result<Outcome, CliError> {
    let s = Settings::resolve(opts)?;
    let rho = load(state)?;
    let reports = reports_for(&rho, &s)?;
    for r in &reports {
        println!("{r}");
    }
    let verdict = criteria::overall(&reports);
    if let Some(top) = criteria::best(&reports) {
        println!(
            "overall: {verdict} (largest margin {} at {})",
            fmt_float(top.margin),
            top.partition
        );
    }
    if let Some(path) = &s.out {
        let mut w = table::sink(Some(path))?;
        w.write_record(CriterionReport::FIELDS)?;
        for r in &reports {
            w.write_record(r.record())?;
        }
        w.flush()?;
    }
    Ok(match verdict {
        Verdict::Entangled => Outcome::Entangled,
        Verdict::Inconclusive => Outcome::Clear,
    })
}

fn load(path: &Path) -> Result<DensityState, CliError> {
    crate::settings::load_state(path)
}

#[derive(Debug, Clone, PartialEq)]
struct Axis {
    name: String,
    values: Vec<f64>,
}

fn parse_axis(text: &str) -> Result<Axis, CliError> {
    let bad = || CliError::Usage(format!("expected name=lo:hi:step, got '{text}'"));
    let (name, range) = text.split_once('=').ok_or_else(bad)?;
    let parts: Vec<f64> = range
        .split(':')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(CliError::Usage(format!(
            "range for '{name}' needs lo ≤ hi and a positive step"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() + 1.0;
    if count > GRID_LIMIT as f64 {
        return Err(CliError::Usage(format!(
            "'{name}' has {count} points, limit is {GRID_LIMIT}"
        )));
    }
    // snap to 12 decimals so a 0.05 step lands on 0.3 rather than 0.30000000000000004
    let values = (0..count as usize)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .map(|v| v.clamp(lo, hi))
        .collect();
    Ok(Axis {
        name: name.trim().to_string(),
        values,
    })
}

fn parse_fixed(text: &str) -> Result<(String, f64), CliError> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected name=value, got '{text}'")))?;
    let v = value
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("bad value in '{text}'")))?;
    Ok((name.trim().to_string(), v))
}

/// Errors that mean "this grid point is outside the family", not "the run is broken".
fn infeasible(e: &CliError) -> bool {
    matches!(
        e,
        CliError::Core(
            Error::ParamConstraint(_)
                | Error::OutOfRange { .. }
                | Error::NotPsd(_)
                | Error::InvalidTrace(_)
        )
    )
}

pub fn sweep(
    family: &str,
    params: &[String],
    fixed: &[String],
    opts: &CommonOpts,
) -> Result<Outcome, CliError> {
    let s = Settings::resolve(opts)?;
    let axes = params
        .iter()
        .map(|p| parse_axis(p))
        .collect::<Result<Vec<_>, _>>()?;
    let fixed = fixed
        .iter()
        .map(|f| parse_fixed(f))
        .collect::<Result<Vec<_>, _>>()?;
    let mut seen = BTreeSet::new();
    for name in axes
        .iter()
        .map(|a| &a.name)
        .chain(fixed.iter().map(|f| &f.0))
    {
        if !seen.insert(name.clone()) {
            return Err(CliError::Usage(format!("parameter '{name}' given twice")));
        }
    }
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()));
    match total {
        Some(n) if n <= GRID_LIMIT => {}
        _ => return Err(CliError::Usage(format!("grid exceeds {GRID_LIMIT} points"))),
    }
    let total = total.unwrap_or(0);

    let in_povm = |name: &str| s.povms.iter().any(|p| p.contains(&format!("{{{name}}}")));
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            let mut row = vec![0.0; axes.len()];
            for (k, a) in axes.iter().enumerate().rev() {
                row[k] = a.values[idx % a.values.len()];
                idx /= a.values.len();
            }
            row
        })
        .collect();

    let rows: Vec<Result<Option<CriterionReport>, CliError>> = points
        .par_iter()
        .map(|row| {
            let mut state_params = Params::new();
            let mut local = s.clone();
            let named = axes
                .iter()
                .map(|a| a.name.as_str())
                .zip(row.iter().copied());
            for (name, v) in named.chain(fixed.iter().map(|(n, v)| (n.as_str(), *v))) {
                if in_povm(name) {
                    let tag = format!("{{{name}}}");
                    for p in &mut local.povms {
                        *p = p.replace(&tag, &v.to_string());
                    }
                } else {
                    state_params.insert(name.to_string(), v);
                }
            }
            let attempt = || -> Result<CriterionReport, CliError> {
                let rho = build_named_state(family, &state_params)?;
                let reports = reports_for(&rho, &local)?;
                Ok(criteria::best(&reports)
                    .expect("at least one partition")
                    .clone())
            };
            match attempt() {
                Ok(r) => Ok(Some(r)),
                Err(e) if infeasible(&e) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut w = table::sink(s.out.as_deref())?;
    let mut header: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    header.extend(
        [
            "partition",
            "mode",
            "trace_norm",
            "bound",
            "margin",
            "verdict",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    let (mut kept, mut skipped) = (0usize, 0usize);
    let mut any_entangled = false;
    let mut margin_range = (f64::INFINITY, f64::NEG_INFINITY);
    for (row, result) in points.iter().zip(rows) {
        let Some(r) = result? else {
            skipped += 1;
            continue;
        };
        kept += 1;
        any_entangled |= r.verdict == Verdict::Entangled;
        margin_range = (margin_range.0.min(r.margin), margin_range.1.max(r.margin));
        let mut rec = table::floats(row);
        rec.push(r.partition.to_string());
        rec.push(r.mode_str().to_string());
        rec.extend(table::floats(&[r.trace_norm, r.bound.value, r.margin]));
        rec.push(r.verdict.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    if kept == 0 {
        return Err(CliError::Usage(format!(
            "no feasible grid points ({skipped} skipped)"
        )));
    }
    eprintln!(
        "{kept} points, {skipped} infeasible skipped, margin in [{}, {}]",
        fmt_float(margin_range.0),
        fmt_float(margin_range.1)
    );
    Ok(if any_entangled {
        Outcome::Entangled
    } else {
        Outcome::Clear
    })
}
