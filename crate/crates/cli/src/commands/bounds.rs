use std::fs;
use std::io::Write;

use serde::Serialize;
use wedge_eof::bounds::{bound_curve, bound_report_unchecked, scan_simplex, BoundPiece, CurveRow};
use wedge_eof::xi::{simplex_grid, ProbabilityTriple};

use crate::config::{ConfigError, RunConfig};
use crate::output::{csv_writer, open, sci, write_json};
use crate::Format;

#[derive(Debug, Serialize)]
struct ZRow {
    z: f64,
    entropy: f64,
    bound: f64,
    piece: &'static str,
    slack: f64,
}

#[derive(Debug, Serialize)]
struct SimplexRow {
    p23: f64,
    p31: f64,
    p12: f64,
    lambdas: [f64; 3],
    sum_first3: f64,
    sum_last6: f64,
    total: f64,
    certificate: f64,
    min_slack: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    z_points: usize,
    simplex_points: usize,
    tol: f64,
    min_curve_slack: f64,
    argmin_curve_slack: f64,
    min_chain_slack: f64,
    min_first3: f64,
    min_last6: f64,
    min_total: f64,
    argmin_total: [f64; 3],
    min_certificate: f64,
    min_certificate_gap: f64,
    equality_points: Vec<[f64; 3]>,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    command: &'static str,
    curve: &'a [ZRow],
    simplex: &'a [SimplexRow],
    summary: &'a Summary,
}

const CURVE_HEADER: [&str; 5] = ["z", "entropy", "bound", "piece", "slack"];
const SIMPLEX_HEADER: [&str; 11] = [
    "p23",
    "p31",
    "p12",
    "l1",
    "l2",
    "l3",
    "sum_first3",
    "sum_last6",
    "total",
    "certificate",
    "min_slack",
];

fn triple(p: &ProbabilityTriple) -> [f64; 3] {
    [p.p23(), p.p31(), p.p12()]
}

fn z_row(r: &CurveRow) -> ZRow {
    ZRow {
        z: r.z,
        entropy: r.entropy,
        bound: r.bound,
        piece: match r.piece {
            BoundPiece::Linear => "linear",
            BoundPiece::Quadratic => "quadratic",
        },
        slack: r.slack,
    }
}

pub fn run(cfg: &RunConfig, z_divisions: usize) -> Result<bool, ConfigError> {
    if z_divisions < 12 {
        return Err(ConfigError::Usage(format!(
            "--z-divisions must be at least 12, got {z_divisions}"
        )));
    }
    let curve: Vec<ZRow> = bound_curve(z_divisions).iter().map(z_row).collect();
    let mut simplex = Vec::new();
    for (i, j, k) in simplex_grid(cfg.divisions) {
        let p = ProbabilityTriple::from_composition(i, j, k);
        let r = bound_report_unchecked(&p)?;
        simplex.push(SimplexRow {
            p23: p.p23(),
            p31: p.p31(),
            p12: p.p12(),
            lambdas: [r.lambdas[0], r.lambdas[1], r.lambdas[2]],
            sum_first3: r.sum_first3,
            sum_last6: r.sum_last6,
            total: r.total,
            certificate: r.certificate,
            min_slack: r.slacks.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }
    let scan = scan_simplex(cfg.divisions)?;
    let min_curve = curve
        .iter()
        .min_by(|a, b| a.slack.total_cmp(&b.slack))
        .expect("curve is never empty");
    let summary = Summary {
        z_points: curve.len(),
        simplex_points: scan.points,
        tol: cfg.tol,
        min_curve_slack: min_curve.slack,
        argmin_curve_slack: min_curve.z,
        min_chain_slack: scan.min_pointwise_slack.0,
        min_first3: scan.min_first3.0,
        min_last6: scan.min_last6.0,
        min_total: scan.min_total.0,
        argmin_total: triple(&scan.min_total.1),
        min_certificate: scan.min_certificate.0,
        min_certificate_gap: scan.min_certificate_gap.0,
        equality_points: scan.equality_points.iter().map(triple).collect(),
        passed: min_curve.slack >= -cfg.tol
            && scan.min_pointwise_slack.0 >= -cfg.tol
            && scan.min_total.0 >= 2.0 - cfg.tol
            && scan.min_certificate.0 >= 1.0 - cfg.tol
            && scan.min_certificate_gap.0 >= -cfg.tol,
    };
    match (cfg.format, cfg.out.as_deref()) {
        (Format::Json, None) => write_json(
            open(None)?,
            &Report {
                command: "scan-bounds",
                curve: &curve,
                simplex: &simplex,
                summary: &summary,
            },
        )?,
        (Format::Json, Some(dir)) => {
            fs::create_dir_all(dir)?;
            write_json(open(Some(&dir.join("curve.json")))?, &curve)?;
            write_json(
                open(Some(&dir.join("simplex.json")))?,
                &Report {
                    command: "scan-bounds",
                    curve: &[],
                    simplex: &simplex,
                    summary: &summary,
                },
            )?;
        }
        (Format::Csv, None) => {
            let mut out = open(None)?;
            writeln!(out, "# curve")?;
            out = write_curve_csv(out, &curve)?;
            writeln!(out, "# simplex")?;
            out = write_simplex_csv(out, &simplex)?;
            write_summary(&mut out, &summary)?;
        }
        (Format::Csv, Some(dir)) => {
            fs::create_dir_all(dir)?;
            let mut out = write_curve_csv(open(Some(&dir.join("curve.csv")))?, &curve)?;
            out.flush()?;
            let mut out = write_simplex_csv(open(Some(&dir.join("simplex.csv")))?, &simplex)?;
            write_summary(&mut out, &summary)?;
        }
    }
    if !summary.passed {
        eprintln!(
            "bound chain violated: min curve slack {} at z={}, min total {} at p=({}, {}, {})",
            summary.min_curve_slack,
            summary.argmin_curve_slack,
            summary.min_total,
            summary.argmin_total[0],
            summary.argmin_total[1],
            summary.argmin_total[2]
        );
    }
    Ok(summary.passed)
}

fn write_curve_csv<W: Write>(out: W, curve: &[ZRow]) -> Result<W, ConfigError> {
    let mut w = csv_writer(out);
    w.write_record(CURVE_HEADER)?;
    for r in curve {
        w.write_record([
            sci(r.z),
            sci(r.entropy),
            sci(r.bound),
            r.piece.to_string(),
            sci(r.slack),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn write_simplex_csv<W: Write>(out: W, rows: &[SimplexRow]) -> Result<W, ConfigError> {
    let mut w = csv_writer(out);
    w.write_record(SIMPLEX_HEADER)?;
    for r in rows {
        let mut rec = vec![r.p23, r.p31, r.p12];
        rec.extend(r.lambdas);
        rec.extend([r.sum_first3, r.sum_last6, r.total, r.certificate, r.min_slack]);
        w.write_record(rec.iter().map(|&x| sci(x)))?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn write_summary<W: Write>(out: &mut W, s: &Summary) -> Result<(), ConfigError> {
    writeln!(
        out,
        "# z_points={} simplex_points={} min_curve_slack={} min_chain_slack={} min_total={} min_certificate={} equality_points={} passed={}",
        s.z_points,
        s.simplex_points,
        sci(s.min_curve_slack),
        sci(s.min_chain_slack),
        sci(s.min_total),
        sci(s.min_certificate),
        s.equality_points.len(),
        s.passed
    )?;
    out.flush()?;
    Ok(())
}
