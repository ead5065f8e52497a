//! `reproduce-example`: figure-ready CSV plus a summary of the headline claims.

use std::fs;
use std::path::Path;

use sicorr::correlations::Mode;
use sicorr::criteria::fmt_float;
use sicorr::scenarios::{self, Assignment, Example4Config, NoisyMargin};

use crate::table::{self, floats};
use crate::{CliError, Outcome};

struct Claim {
    name: &'static str,
    value: f64,
    target: String,
    passed: bool,
}

impl Claim {
    fn new(name: &'static str, value: f64, target: impl Into<String>, passed: bool) -> Self {
        Claim {
            name,
            value,
            target: target.into(),
            passed,
        }
    }
}

fn min(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn max(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

pub fn run(example: u8, dir: &Path, points: Option<usize>) -> Result<Outcome, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::at(dir, e))?;
    if points.is_some_and(|n| n < 2) {
        return Err(CliError::Usage("--points needs at least 2".into()));
    }
    let claims = match example {
        1 => example1(dir)?,
        2 => example2(dir, points.unwrap_or(25))?,
        3 => example3(dir)?,
        4 => example4(dir, points.unwrap_or(49))?,
        n => return Err(CliError::Usage(format!("no example {n}"))),
    };

    let summary = dir.join(format!("example{example}_summary.csv"));
    let mut w = table::sink(Some(&summary))?;
    w.write_record(["claim", "value", "target", "status"])?;
    let mut failed = Vec::new();
    for c in &claims {
        let status = if c.passed { "PASS" } else { "FAIL" };
        w.write_record([c.name, &fmt_float(c.value), &c.target, status])?;
        println!(
            "{status} {}: {} (target {})",
            c.name,
            fmt_float(c.value),
            c.target
        );
        if !c.passed {
            failed.push(format!(
                "{},{},{},FAIL",
                c.name,
                fmt_float(c.value),
                c.target
            ));
        }
    }
    w.flush()?;
    if failed.is_empty() {
        Ok(Outcome::Clear)
    } else {
        Err(CliError::Claims(failed))
    }
}

fn example1(dir: &Path) -> Result<Vec<Claim>, CliError> {
    let head = scenarios::example1_headline()?;
    let grid = scenarios::example1_grid(0.05, Mode::MarginalKron)?;
    let mut w = table::sink(Some(&dir.join("example1_simplex.csv")))?;
    w.write_record([
        "a",
        "b",
        "c",
        "trace_norm",
        "column_norm_sum",
        "closed_form",
    ])?;
    for p in &grid {
        w.write_record(floats(&[
            p.a,
            p.b,
            p.c,
            p.trace_norm,
            p.column_norm_sum,
            p.closed_form,
        ]))?;
    }
    w.flush()?;

    let four = scenarios::four_partite_grid(0.05)?;
    let mut w = table::sink(Some(&dir.join("example1_four_partite.csv")))?;
    w.write_record([
        "x",
        "y",
        "z",
        "trace_norm",
        "column_norm_sum",
        "closed_form",
    ])?;
    for p in &four {
        w.write_record(floats(&[
            p.b,
            p.c,
            p.a,
            p.trace_norm,
            p.column_norm_sum,
            p.closed_form,
        ]))?;
    }
    w.flush()?;

    let worst = max(grid.iter().map(|p| (p.trace_norm - p.closed_form).abs()));
    let grid_min = min(grid.iter().map(|p| p.trace_norm));
    let four_min = min(four.iter().map(|p| p.trace_norm));
    Ok(vec![
        Claim::new(
            "headline trace_norm",
            head.trace_norm,
            "2.687±0.005",
            (head.trace_norm - 2.687).abs() <= 0.005,
        ),
        Claim::new(
            "headline column_norm_sum",
            head.column_norm_sum,
            "recorded",
            true,
        ),
        Claim::new(
            "max |trace_norm - closed_form|",
            worst,
            "≤1e-8",
            worst <= 1e-8,
        ),
        Claim::new("simplex min trace_norm", grid_min, ">1", grid_min > 1.0),
        Claim::new(
            "four-partite min trace_norm",
            four_min,
            ">1",
            four_min > 1.0,
        ),
    ])
}

fn example2(dir: &Path, n: usize) -> Result<Vec<Claim>, CliError> {
    let ts = scenarios::nonzero_grid(0.068, n);
    let pts = scenarios::example2_grid(&ts, &Assignment::default())?;
    let mut w = table::sink(Some(&dir.join("example2.csv")))?;
    w.write_record([
        "t",
        "a",
        "bound",
        "trace_norm_blockdiag",
        "trace_norm_marginal",
        "trace_norm_unfolding",
    ])?;
    for p in &pts {
        let [x, y, z] = p.trace_norms;
        w.write_record(floats(&[p.t, p.a, p.bound, x, y, z]))?;
    }
    w.flush()?;
    let m = min(pts.iter().map(|p| p.margin(Mode::MarginalKron)));
    Ok(vec![Claim::new("min margin (marginal)", m, ">0", m > 0.0)])
}

fn example3(dir: &Path) -> Result<Vec<Claim>, CliError> {
    let bs: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let pts = scenarios::example3_grid(&bs)?;
    let mut w = table::sink(Some(&dir.join("example3.csv")))?;
    w.write_record([
        "b",
        "trace_norm_blockdiag",
        "trace_norm_marginal",
        "trace_norm_unfolding",
        "min_pt_a",
        "min_pt_b",
        "min_pt_c",
    ])?;
    for p in &pts {
        let [x, y, z] = p.trace_norms;
        let [u, v, s] = p.min_pt;
        w.write_record(floats(&[p.b, x, y, z, u, v, s]))?;
    }
    w.flush()?;
    let tn = min(pts.iter().map(|p| p.trace_norm(Mode::MarginalKron)));
    let pt = min(pts.iter().flat_map(|p| p.min_pt));
    Ok(vec![
        Claim::new("min trace_norm (marginal)", tn, ">1", tn > 1.0),
        Claim::new(
            "min partial-transpose eigenvalue",
            pt,
            "≥-1e-10",
            pt >= -1e-10,
        ),
    ])
}

fn example4(dir: &Path, n: usize) -> Result<Vec<Claim>, CliError> {
    let cfg = Example4Config {
        t3_grid: scenarios::nonzero_grid(0.012, n),
        t2_grid: scenarios::nonzero_grid(0.068, n),
        ..Example4Config::default()
    };
    let res = scenarios::example4_thresholds(&cfg)?;
    let mut w = table::sink(Some(&dir.join("example4_thresholds.csv")))?;
    w.write_record(["t3", "t2", "p_star", "margin_at_one"])?;
    for p in &res.points {
        w.write_record(floats(&[
            p.t3,
            p.t2,
            p.p_star.unwrap_or(f64::NAN),
            p.margin_at_one,
        ]))?;
    }
    w.flush()?;

    let p_star = res.p_star.unwrap_or(f64::NAN);
    let mut claims = vec![Claim::new(
        "p_star",
        p_star,
        "[0.30,0.40]",
        (0.30..=0.40).contains(&p_star),
    )];
    if res.p_star.is_some() {
        let best = NoisyMargin::new(
            scenarios::example4_povms(res.best_t3, res.best_t2, &cfg.assignment, cfg.range)?,
            cfg.mode,
        )?;
        let mut w = table::sink(Some(&dir.join("example4_margin.csv")))?;
        w.write_record(["p", "margin"])?;
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            w.write_record(floats(&[p, best.at(p)?]))?;
        }
        w.flush()?;
        claims.push(Claim::new("best t3", res.best_t3, "recorded", true));
        claims.push(Claim::new("best t2", res.best_t2, "recorded", true));
    }
    let at_one = scenarios::example4_best_margin(&cfg, 1.0)?;
    let at_tenth = scenarios::example4_best_margin(&cfg, 0.1)?;
    claims.push(Claim::new("margin at p=1", at_one, ">0", at_one > 0.0));
    claims.push(Claim::new(
        "margin at p=0.1",
        at_tenth,
        "≤0",
        at_tenth <= 0.0,
    ));
    Ok(claims)
}
