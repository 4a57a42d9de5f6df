use std::io::Write;

use serde::Serialize;
use wedge_eof::xi::{check_spectrum, simplex_grid, ProbabilityTriple};

use crate::config::{ConfigError, RunConfig};
use crate::output::{csv_writer, open, sci, write_json};
use crate::Format;

#[derive(Debug, Serialize)]
struct Row {
    p23: f64,
    p31: f64,
    p12: f64,
    theta: f64,
    lambdas: [f64; 9],
    entropy: f64,
    max_deviation: f64,
    max_residual: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    rows: usize,
    grid_step: f64,
    tol: f64,
    max_deviation: f64,
    argmax: [f64; 3],
    max_residual: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    command: &'static str,
    rows: Vec<Row>,
    summary: Summary,
}

const HEADER: [&str; 17] = [
    "p23",
    "p31",
    "p12",
    "theta",
    "l1",
    "l2",
    "l3",
    "l4",
    "l5",
    "l6",
    "l7",
    "l8",
    "l9",
    "entropy",
    "max_deviation",
    "max_residual",
    "within_tol",
];

pub fn run(cfg: &RunConfig) -> Result<bool, ConfigError> {
    let mut rows = Vec::new();
    for (i, j, k) in simplex_grid(cfg.divisions) {
        let p = ProbabilityTriple::from_composition(i, j, k);
        let check = check_spectrum(&p)?;
        rows.push(Row {
            p23: p.p23(),
            p31: p.p31(),
            p12: p.p12(),
            theta: check.analytic.theta,
            lambdas: check.analytic.values,
            entropy: check.analytic.entropy_bits(cfg.tolerances.clip),
            max_deviation: check.max_deviation,
            max_residual: check.max_residual,
        });
    }
    let worst = rows
        .iter()
        .max_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation))
        .expect("grid is never empty");
    let summary = Summary {
        rows: rows.len(),
        grid_step: cfg.grid_step,
        tol: cfg.tol,
        max_deviation: worst.max_deviation,
        argmax: [worst.p23, worst.p31, worst.p12],
        max_residual: rows.iter().map(|r| r.max_residual).fold(0.0, f64::max),
        passed: worst.max_deviation <= cfg.tol,
    };
    let (passed, max_deviation) = (summary.passed, summary.max_deviation);
    let out = open(cfg.out.as_deref())?;
    match cfg.format {
        Format::Json => write_json(
            out,
            &Report {
                command: "scan-spectrum",
                rows,
                summary,
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(HEADER)?;
            for r in &rows {
                let mut rec: Vec<String> = [r.p23, r.p31, r.p12, r.theta].iter().map(|&x| sci(x)).collect();
                rec.extend(r.lambdas.iter().map(|&x| sci(x)));
                rec.extend([r.entropy, r.max_deviation, r.max_residual].iter().map(|&x| sci(x)));
                rec.push((r.max_deviation <= cfg.tol).to_string());
                w.write_record(&rec)?;
            }
            let mut out = w.into_inner().map_err(|e| e.into_error())?;
            writeln!(
                out,
                "# rows={} max_deviation={} argmax=({};{};{}) max_residual={} tol={} passed={}",
                summary.rows,
                sci(summary.max_deviation),
                sci(summary.argmax[0]),
                sci(summary.argmax[1]),
                sci(summary.argmax[2]),
                sci(summary.max_residual),
                sci(summary.tol),
                summary.passed
            )?;
            out.flush()?;
        }
    }
    if !passed {
        eprintln!("spectrum deviation {max_deviation} exceeds tolerance {}", cfg.tol);
    }
    Ok(passed)
}
