//! The antisymmetric subspace `H-` of `C^3 (x) C^3`.
//!
//! Wedge basis order is fixed to `|2,3>, |3,1>, |1,2>` (1-based labels),
//! where `|i,j> = (|i>|j> - |j>|i>)/sqrt 2`. Every 3x3 matrix in this module
//! acting on `H-` is written in that order.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

use crate::tensor::{Cut, FactorShape, StateVector};
use crate::{Error, Result, C64};

/// Zero-based `(i, j)` of the wedge basis vectors, in basis order.
pub const WEDGE_PAIRS: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// The 9x3 isometry whose columns are the wedge basis vectors.
pub fn wedge_isometry() -> DMatrix<C64> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut w = DMatrix::zeros(9, 3);
    for (k, &(i, j)) in WEDGE_PAIRS.iter().enumerate() {
        w[(3 * i + j, k)] = C64::new(h, 0.0);
        w[(3 * j + i, k)] = C64::new(-h, 0.0);
    }
    w
}

/// `W (x) W`: columns are `|w_a> (x) |w_b>` (index `3a + b`) in the factor
/// order `A1, B1, A2, B2`.
pub fn two_copy_isometry() -> DMatrix<C64> {
    let w = wedge_isometry();
    w.kronecker(&w)
}

/// Wedge basis vector `k` (0, 1, 2) as a `(3, 3)` state.
pub fn wedge_vector(k: usize) -> StateVector {
    AntisymState::basis(k).embed()
}

/// A vector of `H-` in wedge coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntisymState {
    coeffs: Vector3<C64>,
}

impl AntisymState {
    pub fn new(coeffs: [C64; 3]) -> Self {
        AntisymState {
            coeffs: Vector3::from(coeffs),
        }
    }

    pub fn from_vector(coeffs: Vector3<C64>) -> Self {
        AntisymState { coeffs }
    }

    pub fn basis(k: usize) -> Self {
        let mut c = [zero(); 3];
        c[k] = C64::new(1.0, 0.0);
        AntisymState::new(c)
    }

    pub fn coeffs(&self) -> &Vector3<C64> {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn normalized(&self) -> Self {
        AntisymState {
            coeffs: self.coeffs.unscale(self.norm()),
        }
    }

    /// The 9-dimensional vector `sum_k c_k |w_k>` with shape `(3, 3)`.
    pub fn embed(&self) -> StateVector {
        let v = wedge_isometry() * DVector::from_column_slice(self.coeffs.as_slice());
        StateVector::new(v, shape_3x3()).expect("9 amplitudes for a (3, 3) shape")
    }

    /// Wedge coordinates of `v`; rejected if `v` leaves `H-` by more than
    /// `tol` in norm.
    pub fn project(v: &StateVector, tol: f64) -> Result<Self> {
        if v.shape().dims() != [3, 3] {
            return Err(Error::DimensionMismatch {
                expected: 9,
                found: v.dim(),
            });
        }
        let (coeffs, residual) = project_onto_wedges(v.amplitudes());
        if residual > tol {
            return Err(Error::OutsideAntisymmetric { residual });
        }
        Ok(AntisymState { coeffs })
    }
}

fn shape_3x3() -> FactorShape {
    FactorShape::new([3usize, 3]).expect("valid shape")
}

fn project_onto_wedges(v: &DVector<C64>) -> (Vector3<C64>, f64) {
    let w = wedge_isometry();
    let c = w.adjoint() * v;
    let residual = (v - &w * &c).norm();
    (Vector3::new(c[0], c[1], c[2]), residual)
}

/// Norm of the component of a `(3, 3)` vector outside `H-`.
pub fn antisym_residual(v: &StateVector) -> f64 {
    project_onto_wedges(v.amplitudes()).1
}

/// Frobenius norm of `rho - P rho P` for the projector `P` onto `H-`.
pub fn density_support_residual(rho: &DMatrix<C64>) -> f64 {
    let w = wedge_isometry();
    let p = &w * w.adjoint();
    (rho - &p * rho * &p).norm()
}

/// Frobenius norm of `rho - P rho P` for `P` onto `H- (x) H-` (factor order
/// `A1, B1, A2, B2`).
pub fn two_copy_support_residual(rho: &DMatrix<C64>) -> f64 {
    let w = two_copy_isometry();
    let p = &w * w.adjoint();
    (rho - &p * rho * &p).norm()
}

/// The `(3, 3, 3, 3)` state `sum_ab C[a, b] |w_a> (x) |w_b>` in factor order
/// `A1, B1, A2, B2`.
pub fn embed_two_copy(c: &Matrix3<C64>) -> StateVector {
    let coeffs = DVector::from_fn(9, |k, _| c[(k / 3, k % 3)]);
    StateVector::new(
        two_copy_isometry() * coeffs,
        FactorShape::new([3usize, 3, 3, 3]).unwrap(),
    )
    .expect("81 amplitudes")
}

/// Coefficient matrix of a two-copy state over wedge pairs; rejected if the
/// state leaves `H- (x) H-` by more than `tol`.
pub fn project_two_copy(psi: &StateVector, tol: f64) -> Result<Matrix3<C64>> {
    if psi.shape().dims() != [3, 3, 3, 3] {
        return Err(Error::DimensionMismatch {
            expected: 81,
            found: psi.dim(),
        });
    }
    let w = two_copy_isometry();
    let c = w.adjoint() * psi.amplitudes();
    let residual = (psi.amplitudes() - &w * &c).norm();
    if residual > tol {
        return Err(Error::OutsideAntisymmetric { residual });
    }
    Ok(Matrix3::from_fn(|a, b| c[3 * a + b]))
}

/// The cofactor matrix `U^Theta`, entry for entry.
#[rustfmt::skip]
pub fn theta_map(u: &Matrix3<C64>) -> Matrix3<C64> {
    // 1-based accessor so the entries read like the textbook cofactors.
    let e = |i: usize, j: usize| u[(i - 1, j - 1)];
    Matrix3::new(
        e(2,2)*e(3,3) - e(2,3)*e(3,2), e(2,3)*e(3,1) - e(2,1)*e(3,3), e(2,1)*e(3,2) - e(2,2)*e(3,1),
        e(3,2)*e(1,3) - e(3,3)*e(1,2), e(3,3)*e(1,1) - e(3,1)*e(1,3), e(3,1)*e(1,2) - e(3,2)*e(1,1),
        e(1,2)*e(2,3) - e(1,3)*e(2,2), e(1,3)*e(2,1) - e(1,1)*e(2,3), e(1,1)*e(2,2) - e(1,2)*e(2,1),
    )
}

pub fn unitarity_residual3(u: &Matrix3<C64>) -> f64 {
    (u.adjoint() * u - Matrix3::identity()).norm()
}

/// Matrix of `U (x) U` restricted to `H-`, in wedge coordinates, computed by
/// conjugating the 9x9 operator with the wedge isometry.
pub fn wedge_action(u: &Matrix3<C64>, tol: f64) -> Result<Matrix3<C64>> {
    let residual = unitarity_residual3(u);
    if residual > tol {
        return Err(Error::NotUnitary { residual });
    }
    Ok(wedge_action_unchecked(u))
}

fn wedge_action_unchecked(u: &Matrix3<C64>) -> Matrix3<C64> {
    let ud = DMatrix::from_column_slice(3, 3, u.as_slice());
    let w = wedge_isometry();
    let m = w.adjoint() * ud.kronecker(&ud) * w;
    Matrix3::from_fn(|i, j| m[(i, j)])
}

/// Which square root of `det Theta_psi` enters the aligning unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootBranch {
    #[default]
    Principal,
    Negated,
}

/// `Theta_psi`: the unitary on `H-` (wedge coordinates) sending the
/// coefficient vector of `basis[k]` to `e_k`. With `C` the matrix whose
/// columns are those coefficient vectors, `Theta_psi = C^dagger`.
pub fn theta_psi(basis: &[AntisymState; 3], tol: f64) -> Result<Matrix3<C64>> {
    let c = Matrix3::from_columns(&[basis[0].coeffs, basis[1].coeffs, basis[2].coeffs]);
    let residual = unitarity_residual3(&c);
    if residual > tol {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(c.adjoint())
}

/// The local unitary `U_psi = (det Theta_psi)^(1/2) conj(Theta_psi)` such
/// that `U_psi (x) U_psi` maps `basis[0..3]` onto `|2,3>, |3,1>, |1,2>`.
pub fn lemma1_unitary(basis: &[AntisymState; 3], tol: f64) -> Result<Matrix3<C64>> {
    lemma1_unitary_with_branch(basis, tol, RootBranch::Principal)
}

pub fn lemma1_unitary_with_branch(basis: &[AntisymState; 3], tol: f64, branch: RootBranch) -> Result<Matrix3<C64>> {
    let theta = theta_psi(basis, tol)?;
    Ok(aligning_unitary(&theta, branch))
}

pub(crate) fn aligning_unitary(theta: &Matrix3<C64>, branch: RootBranch) -> Matrix3<C64> {
    let mut root = theta.determinant().sqrt();
    if branch == RootBranch::Negated {
        root = -root;
    }
    theta.conjugate() * root
}

/// A:B entanglement (bits) of the embedded state; equal to 1 on all of `H-`.
pub fn pure_antisym_entanglement(a: &AntisymState) -> f64 {
    let v = a.embed();
    let cut = Cut::new(v.shape(), &[0]).expect("(3, 3) has a proper cut");
    cut.entropy(v.as_slice(), crate::Tolerances::default().clip)
}

/// Columns of `m` as antisymmetric states.
pub fn states_from_columns(m: &Matrix3<C64>) -> [AntisymState; 3] {
    let col = |k: usize| AntisymState::from_vector(m.column(k).into_owned());
    [col(0), col(1), col(2)]
}

/// Maximum over `k` of `| |<target_k| (U (x) U) |basis_k>| - 1 |`, with the
/// targets `|2,3>, |3,1>, |1,2>`. Phase-insensitive.
pub fn alignment_residual(u: &Matrix3<C64>, basis: &[AntisymState; 3]) -> f64 {
    let ud = DMatrix::from_column_slice(3, 3, u.as_slice());
    let uu = ud.kronecker(&ud);
    basis
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let mapped = &uu * b.embed().amplitudes();
            let target = wedge_vector(k);
            (target.amplitudes().dotc(&mapped).norm() - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Maximum over `k` of `|| (U (x) U)|basis_k> - |target_k> ||`. Phase-exact.
pub fn alignment_error(u: &Matrix3<C64>, basis: &[AntisymState; 3]) -> f64 {
    let ud = DMatrix::from_column_slice(3, 3, u.as_slice());
    let uu = ud.kronecker(&ud);
    basis
        .iter()
        .enumerate()
        .map(|(k, b)| (&uu * b.embed().amplitudes() - wedge_vector(k).amplitudes()).norm())
        .fold(0.0, f64::max)
}
