use serde::Serialize;
use wedge_eof::antisym::pure_antisym_entanglement;
use wedge_eof::eof::two_copy_ab_cut;
use wedge_eof::sample::{random_antisym_density, random_antisym_state, random_two_copy_state, rng_for};

use crate::config::{ConfigError, RunConfig};
use crate::output::{csv_writer, matrix_pairs, open, sci, vector_pairs, write_json, Pair};
use crate::{Format, StateKind};

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Data {
    Vector(Vec<Pair>),
    Matrix(Vec<Vec<Pair>>),
}

#[derive(Debug, Serialize)]
struct Sample {
    index: usize,
    dims: Vec<usize>,
    /// Entanglement in bits across `A:B` (one copy) or `A1 A2 : B1 B2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    entanglement: Option<f64>,
    data: Data,
}

#[derive(Debug, Serialize)]
struct Report {
    command: &'static str,
    kind: &'static str,
    seed: u64,
    samples: Vec<Sample>,
}

fn kind_name(kind: StateKind) -> &'static str {
    match kind {
        StateKind::AntisymState => "antisym-state",
        StateKind::TwoCopyState => "two-copy-state",
        StateKind::AntisymDensity => "antisym-density",
    }
}

pub fn run(cfg: &RunConfig, kind: StateKind) -> Result<bool, ConfigError> {
    let clip = cfg.tolerances.clip;
    let samples: Vec<Sample> = (0..cfg.samples)
        .map(|index| {
            let mut rng = rng_for(cfg.seed, index as u64);
            match kind {
                StateKind::AntisymState => {
                    let a = random_antisym_state(&mut rng);
                    let v = a.embed();
                    Sample {
                        index,
                        dims: v.shape().dims().to_vec(),
                        entanglement: Some(pure_antisym_entanglement(&a)),
                        data: Data::Vector(vector_pairs(v.as_slice())),
                    }
                }
                StateKind::TwoCopyState => {
                    let psi = random_two_copy_state(&mut rng);
                    Sample {
                        index,
                        dims: psi.shape().dims().to_vec(),
                        entanglement: Some(two_copy_ab_cut().entropy(psi.as_slice(), clip)),
                        data: Data::Vector(vector_pairs(psi.as_slice())),
                    }
                }
                StateKind::AntisymDensity => {
                    let rho = random_antisym_density(&mut rng);
                    Sample {
                        index,
                        dims: rho.shape().dims().to_vec(),
                        entanglement: None,
                        data: Data::Matrix(matrix_pairs(rho.entries())),
                    }
                }
            }
        })
        .collect();
    let out = open(cfg.out.as_deref())?;
    match cfg.format {
        Format::Json => write_json(
            out,
            &Report {
                command: "sample-states",
                kind: kind_name(kind),
                seed: cfg.seed,
                samples,
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["index", "row", "col", "re", "im"])?;
            for s in &samples {
                let cells: Vec<(usize, usize, Pair)> = match &s.data {
                    Data::Vector(v) => v.iter().enumerate().map(|(r, &z)| (r, 0, z)).collect(),
                    Data::Matrix(m) => m
                        .iter()
                        .enumerate()
                        .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &z)| (r, c, z)))
                        .collect(),
                };
                for (r, c, z) in cells {
                    w.write_record([s.index.to_string(), r.to_string(), c.to_string(), sci(z[0]), sci(z[1])])?;
                }
            }
            w.flush()?;
        }
    }
    Ok(true)
}
