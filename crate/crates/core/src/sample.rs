//! Seeded random states on the antisymmetric subspace and its two-copy
//! tensor square.

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antisym::{embed_two_copy, wedge_isometry, AntisymState};
use crate::tensor::{complex_gaussian, DensityMatrix, FactorShape, StateVector};
use crate::C64;

/// ChaCha8 generator for `seed` on an independent `stream`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 step; decorrelates seeds handed to independent sub-tasks.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed.wrapping_add(tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly random unit vector of `H-`.
pub fn random_antisym_state<R: Rng + ?Sized>(rng: &mut R) -> AntisymState {
    let g = complex_gaussian(3, 1, rng);
    AntisymState::from_vector(Vector3::new(g[0], g[1], g[2])).normalized()
}

/// Uniformly random unit vector of `H- (x) H-`, factor order `A1, B1, A2, B2`.
pub fn random_two_copy_state<R: Rng + ?Sized>(rng: &mut R) -> StateVector {
    let g = complex_gaussian(3, 3, rng);
    let c = Matrix3::from_fn(|i, j| g[(i, j)]);
    embed_two_copy(&c.unscale(c.norm()))
}

/// Normalized Gram matrix of three Gaussian vectors in wedge coordinates,
/// embedded into `C^3 (x) C^3`. Full rank on `H-` almost surely.
pub fn random_antisym_density<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let g = complex_gaussian(3, 3, rng);
    let gram = &g * g.adjoint();
    let gram = gram.unscale(gram.trace().re);
    let w = wedge_isometry();
    let rho = &w * gram * w.adjoint();
    DensityMatrix::from_parts_unchecked(rho, FactorShape::new([3usize, 3]).unwrap()).expect("9x9")
}

/// Rank-`rank` density matrix `G G^dagger / tr` with Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> DensityMatrix {
    let shape = FactorShape::new(dims).expect("valid dims");
    let g = complex_gaussian(shape.total(), rank, rng);
    let rho: DMatrix<C64> = &g * g.adjoint();
    let tr = rho.trace().re;
    DensityMatrix::from_parts_unchecked(rho.unscale(tr), shape).expect("square")
}

/// Uniformly random unit vector with the given factor shape.
pub fn random_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> StateVector {
    let shape = FactorShape::new(dims).expect("valid dims");
    let g = complex_gaussian(shape.total(), 1, rng);
    StateVector::new(g.column(0).into_owned(), shape)
        .expect("sized")
        .normalized()
}
