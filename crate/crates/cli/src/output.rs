use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use nalgebra::{Dim, Matrix, RawStorage};
use serde::Serialize;
use wedge_eof::C64;

/// Fixed 17-significant-digit scientific notation used in every CSV cell.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn open(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

pub type Pair = [f64; 2];

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

/// Row-major `[re, im]` pairs.
pub fn matrix_pairs<R: Dim, C: Dim, S: RawStorage<C64, R, C>>(m: &Matrix<C64, R, C, S>) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

pub fn vector_pairs(v: &[C64]) -> Vec<Pair> {
    v.iter().copied().map(pair).collect()
}
