use serde::Serialize;
use wedge_eof::eof::{verify_additivity, AdditivityConfig, AdditivityReport, OptimizerConfig, Verdict};
use wedge_eof::sample::{derive_seed, random_antisym_density, rng_for};
use wedge_eof::tensor::DensityMatrix;

use crate::config::{ConfigError, RunConfig};
use crate::output::{matrix_pairs, open, write_json, Pair};
use crate::BudgetArgs;

/// Stream tag for drawing the density pairs.
const PAIR_STREAM: u64 = 100;

#[derive(Debug, Serialize)]
struct Instance {
    index: usize,
    verdict: &'static str,
    upper: f64,
    upper_rho1: f64,
    upper_rho2: f64,
    lower_range: f64,
    lower_evidence: f64,
    samples: usize,
    min_sample_entropy: f64,
    max_sample_discrepancy: f64,
    seed: u64,
    budget: usize,
    evaluations: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho1: Option<Vec<Vec<Pair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho2: Option<Vec<Vec<Pair>>>,
}

#[derive(Debug, Serialize)]
struct Report {
    command: &'static str,
    seed: u64,
    samples: usize,
    tol: f64,
    budget: usize,
    starts: usize,
    evals_per_start: usize,
    range_samples: usize,
    max_upper_deviation: f64,
    max_single_deviation: f64,
    min_lower_evidence: f64,
    passed: bool,
    instances: Vec<Instance>,
}

fn instance(index: usize, r: &AdditivityReport, rho1: &DensityMatrix, rho2: &DensityMatrix) -> Instance {
    let failed = r.verdict == Verdict::Fail;
    Instance {
        index,
        verdict: if failed { "FAIL" } else { "PASS" },
        upper: r.upper,
        upper_rho1: r.upper_rho1,
        upper_rho2: r.upper_rho2,
        lower_range: r.lower_range,
        lower_evidence: r.lower_evidence,
        samples: r.samples,
        min_sample_entropy: r.min_sample_entropy,
        max_sample_discrepancy: r.max_sample_discrepancy,
        seed: r.seed,
        budget: r.budget,
        evaluations: r.evaluations,
        converged: r.converged,
        rho1: failed.then(|| matrix_pairs(rho1.entries())),
        rho2: failed.then(|| matrix_pairs(rho2.entries())),
    }
}

pub fn run(cfg: &RunConfig, budget: &BudgetArgs, range_samples: usize) -> Result<bool, ConfigError> {
    if budget.budget == 0 || budget.evals_per_start == 0 {
        return Err(ConfigError::Usage(
            "--budget and --evals-per-start must be at least 1".into(),
        ));
    }
    let mut instances = Vec::with_capacity(cfg.samples);
    let (mut max_upper, mut max_single, mut min_lower) = (0.0f64, 0.0f64, f64::INFINITY);
    for i in 0..cfg.samples {
        let mut rng = rng_for(derive_seed(cfg.seed, PAIR_STREAM), i as u64);
        let rho1 = random_antisym_density(&mut rng);
        let rho2 = random_antisym_density(&mut rng);
        let acfg = AdditivityConfig {
            optimizer: OptimizerConfig {
                starts: budget.starts,
                evals_per_start: budget.evals_per_start,
                budget: budget.budget,
                seed: derive_seed(cfg.seed, i as u64),
                tol: cfg.tolerances,
                ..OptimizerConfig::default()
            },
            samples: range_samples,
            tol: cfg.tol,
            ..AdditivityConfig::default()
        };
        let r = verify_additivity(&rho1, &rho2, &acfg)?;
        max_upper = max_upper.max((r.upper - 2.0).abs());
        max_single = max_single
            .max((r.upper_rho1 - 1.0).abs())
            .max((r.upper_rho2 - 1.0).abs());
        min_lower = min_lower.min(r.lower_evidence);
        instances.push(instance(i, &r, &rho1, &rho2));
    }
    let passed = instances.iter().all(|x| x.verdict == "PASS");
    let report = Report {
        command: "verify-additivity",
        seed: cfg.seed,
        samples: cfg.samples,
        tol: cfg.tol,
        budget: budget.budget,
        starts: budget.starts,
        evals_per_start: budget.evals_per_start,
        range_samples,
        max_upper_deviation: max_upper,
        max_single_deviation: max_single,
        min_lower_evidence: min_lower,
        passed,
        instances,
    };
    write_json(open(cfg.out.as_deref())?, &report)?;
    Ok(passed)
}
