pub mod additivity;
pub mod bounds;
pub mod lemma1;
pub mod sample;
pub mod spectrum;

use nalgebra::{DMatrix, Matrix3};
use wedge_eof::C64;

pub fn to_matrix3(m: &DMatrix<C64>) -> Matrix3<C64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}
