use nalgebra::Matrix3;
use serde::Serialize;
use wedge_eof::antisym::{
    alignment_error, alignment_residual, lemma1_unitary, states_from_columns, theta_map, unitarity_residual3,
    wedge_action,
};
use wedge_eof::sample::{derive_seed, rng_for};
use wedge_eof::tensor::{complex_gaussian, haar_unitary};
use wedge_eof::{Error, C64};

use super::to_matrix3;
use crate::config::{ConfigError, RunConfig};
use crate::output::{matrix_pairs, open, write_json, Pair};

pub const COFACTOR_TOL: f64 = 1e-12;

#[derive(Debug, Default, Serialize)]
struct Worst {
    cofactor_transpose: f64,
    cofactor_conjugate: f64,
    wedge_action: f64,
    unitarity: f64,
    alignment: f64,
    alignment_exact: f64,
}

#[derive(Debug, Serialize)]
struct Counterexample {
    index: usize,
    check: &'static str,
    residual: f64,
    matrix: Vec<Vec<Pair>>,
}

#[derive(Debug, Serialize)]
struct Report {
    command: &'static str,
    seed: u64,
    samples: usize,
    tol: f64,
    cofactor_tol: f64,
    passed: bool,
    worst: Worst,
    counterexample: Option<Counterexample>,
}

pub fn run(cfg: &RunConfig, inject_nonorthonormal: bool) -> Result<bool, ConfigError> {
    let mut worst = Worst::default();
    let mut counterexample = None;
    let mut fail = |index: usize, check: &'static str, residual: f64, limit: f64, m: &Matrix3<C64>| {
        if (residual.is_nan() || residual > limit) && counterexample.is_none() {
            counterexample = Some(Counterexample {
                index,
                check,
                residual,
                matrix: matrix_pairs(m),
            });
        }
    };
    for i in 0..cfg.samples {
        let u = to_matrix3(&haar_unitary(3, &mut rng_for(derive_seed(cfg.seed, 0), i as u64)));
        let det = u.determinant();
        let t = theta_map(&u);
        let r_transpose = (t * u.transpose() - Matrix3::identity() * det).norm();
        let r_conjugate = (t - u.conjugate() * det).norm();
        let r_action = (wedge_action(&u, cfg.tol)? - t).norm();
        worst.cofactor_transpose = worst.cofactor_transpose.max(r_transpose);
        worst.cofactor_conjugate = worst.cofactor_conjugate.max(r_conjugate);
        worst.wedge_action = worst.wedge_action.max(r_action);
        fail(i, "cofactor transpose identity", r_transpose, COFACTOR_TOL, &u);
        fail(i, "cofactor conjugate identity", r_conjugate, COFACTOR_TOL, &u);
        fail(i, "wedge action equals cofactor", r_action, COFACTOR_TOL, &u);

        let mut rng = rng_for(derive_seed(cfg.seed, 1), i as u64);
        let c = if inject_nonorthonormal && i == 0 {
            let g = to_matrix3(&complex_gaussian(3, 3, &mut rng));
            Matrix3::from_columns(&[
                g.column(0).normalize(),
                g.column(1).normalize(),
                g.column(2).normalize(),
            ])
        } else {
            to_matrix3(&haar_unitary(3, &mut rng))
        };
        let basis = states_from_columns(&c);
        match lemma1_unitary(&basis, cfg.tol) {
            Ok(v) => {
                let unitarity = unitarity_residual3(&v);
                let alignment = alignment_residual(&v, &basis);
                worst.unitarity = worst.unitarity.max(unitarity);
                worst.alignment = worst.alignment.max(alignment);
                worst.alignment_exact = worst.alignment_exact.max(alignment_error(&v, &basis));
                fail(i, "aligning unitary is unitary", unitarity, cfg.tol, &c);
                fail(i, "aligning unitary maps basis to targets", alignment, cfg.tol, &c);
            }
            Err(Error::NotOrthonormal { residual }) => fail(i, "basis is orthonormal", residual, cfg.tol, &c),
            Err(e) => return Err(e.into()),
        }
    }
    let passed = counterexample.is_none();
    let report = Report {
        command: "verify-lemma1",
        seed: cfg.seed,
        samples: cfg.samples,
        tol: cfg.tol,
        cofactor_tol: COFACTOR_TOL,
        passed,
        worst,
        counterexample,
    };
    write_json(open(cfg.out.as_deref())?, &report)?;
    Ok(passed)
}
