//! Dense complex linear algebra over explicitly factored tensor-product spaces.
//!
//! Flattened indices are row-major over the factor list: the leftmost factor
//! is the most significant digit, so [`tensor_product`] is a plain Kronecker
//! product.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, Tolerances, C64};

/// Upper bound on the flattened dimension of any factored object.
pub const MAX_TOTAL_DIM: usize = 10_000;

const LN_2: f64 = core::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl FactorShape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidShape("no factors".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidShape(format!("zero dimension in {dims:?}")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| t <= MAX_TOTAL_DIM)
            .ok_or_else(|| Error::InvalidShape(format!("total dimension of {dims:?} too large")))?;
        debug_assert!(total >= 1);
        Ok(FactorShape { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &FactorShape) -> Result<FactorShape> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        FactorShape::new(dims)
    }

    /// Dimension of the product of the listed factors.
    pub fn subset_dim(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&k| self.dims[k]).product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    fn check_permutation(&self, perm: &[usize]) -> Result<()> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation(perm.to_vec()));
            }
            seen[p] = true;
        }
        Ok(())
    }

    fn permuted(&self, perm: &[usize]) -> FactorShape {
        FactorShape {
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
        }
    }

    /// `map[o]` is the input flat index feeding output flat index `o` when
    /// output factor `k` is input factor `perm[k]`.
    fn permutation_map(&self, perm: &[usize]) -> Vec<usize> {
        let in_strides = self.strides();
        let out_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let strides: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
        let total = self.total();
        let mut map = Vec::with_capacity(total);
        let mut digits = vec![0usize; perm.len()];
        let mut offset = 0usize;
        for _ in 0..total {
            map.push(offset);
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                offset += strides[k];
                if digits[k] < out_dims[k] {
                    break;
                }
                offset -= strides[k] * out_dims[k];
                digits[k] = 0;
            }
        }
        map
    }
}

/// A bipartition of the factors of a shape into a left and right block.
///
/// Precomputes the reindexing that turns an amplitude vector into the
/// `left_dim x right_dim` coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    shape: FactorShape,
    left: Vec<usize>,
    right: Vec<usize>,
    left_dim: usize,
    right_dim: usize,
    map: Vec<usize>,
}

impl Cut {
    /// `left` lists the factors on the left side; the rest form the right.
    /// Both sides keep their original relative factor order.
    pub fn new(shape: &FactorShape, left: &[usize]) -> Result<Cut> {
        let left = normalize_subset(shape, left)?;
        let right: Vec<usize> = (0..shape.num_factors()).filter(|k| !left.contains(k)).collect();
        let mut perm = left.clone();
        perm.extend_from_slice(&right);
        Ok(Cut {
            left_dim: shape.subset_dim(&left),
            right_dim: shape.subset_dim(&right),
            map: shape.permutation_map(&perm),
            shape: shape.clone(),
            left,
            right,
        })
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    /// Coefficient matrix `M[l, r]` of `amps` across the cut.
    pub fn matrix(&self, amps: &[C64]) -> DMatrix<C64> {
        assert_eq!(amps.len(), self.map.len(), "amplitude length does not match cut shape");
        let rd = self.right_dim;
        DMatrix::from_fn(self.left_dim, rd, |l, r| amps[self.map[l * rd + r]])
    }

    /// Inverse of [`Cut::matrix`].
    pub fn unmatrix(&self, m: &DMatrix<C64>) -> Vec<C64> {
        let rd = self.right_dim;
        let mut amps = vec![C64::new(0.0, 0.0); self.map.len()];
        for l in 0..self.left_dim {
            for r in 0..rd {
                amps[self.map[l * rd + r]] = m[(l, r)];
            }
        }
        amps
    }

    /// Reduced density matrix of the smaller side, normalized to unit trace.
    /// Returns `None` for the zero vector.
    fn smaller_reduced(&self, amps: &[C64]) -> Option<DMatrix<C64>> {
        let m = self.matrix(amps);
        let reduced = if self.left_dim <= self.right_dim {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        let tr = reduced.trace().re;
        (tr > 0.0).then(|| reduced.unscale(tr))
    }

    /// Entanglement entropy in bits of the (not necessarily normalized) pure
    /// state `amps` across this cut. The zero vector has entropy 0.
    pub fn entropy(&self, amps: &[C64], clip: f64) -> f64 {
        match self.smaller_reduced(amps) {
            Some(r) => entropy_bits_clipped(&eigenvalues_unchecked(r), clip),
            None => 0.0,
        }
    }
}

fn normalize_subset(shape: &FactorShape, subset: &[usize]) -> Result<Vec<usize>> {
    let n = shape.num_factors();
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != subset.len() || s.iter().any(|&k| k >= n) {
        return Err(Error::InvalidSubset(format!("{subset:?} for {n} factors")));
    }
    if s.is_empty() || s.len() == n {
        return Err(Error::InvalidSubset(format!(
            "{subset:?} is not a nonempty proper subset of {n} factors"
        )));
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    shape: FactorShape,
}

impl StateVector {
    pub fn new(amplitudes: impl Into<DVector<C64>>, shape: FactorShape) -> Result<Self> {
        let amplitudes = amplitudes.into();
        if amplitudes.len() != shape.total() {
            return Err(Error::DimensionMismatch {
                expected: shape.total(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { amplitudes, shape })
    }

    pub fn from_vec(amplitudes: Vec<C64>, dims: &[usize]) -> Result<Self> {
        StateVector::new(DVector::from_vec(amplitudes), FactorShape::new(dims)?)
    }

    /// Computational basis state `|levels[0], levels[1], ...>`.
    pub fn basis(dims: &[usize], levels: &[usize]) -> Result<Self> {
        let shape = FactorShape::new(dims)?;
        if levels.len() != dims.len() || levels.iter().zip(dims).any(|(l, d)| l >= d) {
            return Err(Error::InvalidShape(format!("levels {levels:?} for dims {dims:?}")));
        }
        let index = levels.iter().zip(shape.strides()).map(|(l, s)| l * s).sum::<usize>();
        let mut amps = DVector::zeros(shape.total());
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector {
            amplitudes: amps,
            shape,
        })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn as_slice(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn require_normalized(&self, tol: f64) -> Result<()> {
        if self.is_normalized(tol) {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: self.norm() })
        }
    }

    /// Returns the state scaled to unit norm. Panics on the zero vector.
    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        StateVector {
            amplitudes: self.amplitudes.unscale(n),
            shape: self.shape.clone(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|<self|other>|`, equal to 1 for normalized states that agree up to a
    /// global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    /// Applies `op` (acting on the full space) to the state.
    pub fn apply(&self, op: &DMatrix<C64>) -> Result<StateVector> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.nrows(),
            });
        }
        Ok(StateVector {
            amplitudes: op * &self.amplitudes,
            shape: self.shape.clone(),
        })
    }

    /// Applies `op` to factor `factor` only (identity elsewhere).
    pub fn apply_local(&self, factor: usize, op: &DMatrix<C64>) -> Result<StateVector> {
        let dims = self.shape.dims();
        if factor >= dims.len() {
            return Err(Error::InvalidSubset(format!("factor {factor} of {}", dims.len())));
        }
        let d = dims[factor];
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.nrows(),
            });
        }
        let outer: usize = dims[..factor].iter().product();
        let inner: usize = dims[factor + 1..].iter().product();
        let src = self.amplitudes.as_slice();
        let mut out = DVector::zeros(self.dim());
        for o in 0..outer {
            for i in 0..inner {
                let base = o * d * inner + i;
                for a in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for b in 0..d {
                        acc += op[(a, b)] * src[base + b * inner];
                    }
                    out[base + a * inner] = acc;
                }
            }
        }
        Ok(StateVector {
            amplitudes: out,
            shape: self.shape.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
    shape: FactorShape,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at `tol.validity`.
    pub fn new(entries: DMatrix<C64>, shape: FactorShape, tol: &Tolerances) -> Result<Self> {
        let rho = DensityMatrix::from_parts_unchecked(entries, shape)?;
        rho.validate(tol)?;
        Ok(rho)
    }

    /// Checks only that the matrix is square and matches the shape.
    pub fn from_parts_unchecked(entries: DMatrix<C64>, shape: FactorShape) -> Result<Self> {
        if entries.nrows() != shape.total() || entries.ncols() != shape.total() {
            return Err(Error::DimensionMismatch {
                expected: shape.total(),
                found: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(DensityMatrix { entries, shape })
    }

    /// `|psi><psi|` for the normalized copy of `psi`.
    pub fn from_pure(psi: &StateVector) -> DensityMatrix {
        let v = psi.normalized();
        DensityMatrix {
            entries: &v.amplitudes * v.amplitudes.adjoint(),
            shape: v.shape,
        }
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let shape = FactorShape::new(dims)?;
        let n = shape.total();
        Ok(DensityMatrix {
            entries: DMatrix::identity(n, n).unscale(n as f64),
            shape,
        })
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let herm = hermiticity_residual(&self.entries);
        if herm > tol.validity {
            return Err(Error::NotHermitian { residual: herm });
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > tol.validity {
            return Err(Error::NotUnitTrace { trace });
        }
        let min = eigenvalues_unchecked(self.entries.clone())
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -tol.validity {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(())
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }
}

/// Objects carrying a [`FactorShape`] that support `(x)` and factor
/// reordering.
pub trait Factored: Sized {
    fn shape(&self) -> &FactorShape;
    fn kron(&self, other: &Self) -> Result<Self>;
    fn reindex(&self, map: &[usize], shape: FactorShape) -> Self;
}

impl Factored for StateVector {
    fn shape(&self) -> &FactorShape {
        &self.shape
    }

    fn kron(&self, other: &Self) -> Result<Self> {
        Ok(StateVector {
            shape: self.shape.concat(&other.shape)?,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    fn reindex(&self, map: &[usize], shape: FactorShape) -> Self {
        StateVector {
            amplitudes: DVector::from_fn(map.len(), |o, _| self.amplitudes[map[o]]),
            shape,
        }
    }
}

impl Factored for DensityMatrix {
    fn shape(&self) -> &FactorShape {
        &self.shape
    }

    fn kron(&self, other: &Self) -> Result<Self> {
        Ok(DensityMatrix {
            shape: self.shape.concat(&other.shape)?,
            entries: self.entries.kronecker(&other.entries),
        })
    }

    fn reindex(&self, map: &[usize], shape: FactorShape) -> Self {
        DensityMatrix {
            entries: DMatrix::from_fn(map.len(), map.len(), |a, b| self.entries[(map[a], map[b])]),
            shape,
        }
    }
}

/// Kronecker product; the left operand's indices are most significant.
pub fn tensor_product<T: Factored>(a: &T, b: &T) -> Result<T> {
    a.kron(b)
}

/// Output factor `k` is input factor `perm[k]`.
pub fn permute_factors<T: Factored>(x: &T, perm: &[usize]) -> Result<T> {
    let shape = x.shape();
    shape.check_permutation(perm)?;
    let map = shape.permutation_map(perm);
    Ok(x.reindex(&map, shape.permuted(perm)))
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let cut = Cut::new(&rho.shape, keep)?;
    let (dk, dt) = (cut.left_dim, cut.right_dim);
    let m = &rho.entries;
    let out = DMatrix::from_fn(dk, dk, |a, b| {
        (0..dt).fold(C64::new(0.0, 0.0), |acc, t| {
            acc + m[(cut.map[a * dt + t], cut.map[b * dt + t])]
        })
    });
    Ok(DensityMatrix {
        entries: out,
        shape: FactorShape {
            dims: cut.left.iter().map(|&k| rho.shape.dims[k]).collect(),
        },
    })
}

/// Largest entry of `|M - M^dagger|`.
pub fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Frobenius norm of `U^dagger U - I`.
pub fn unitarity_residual(u: &DMatrix<C64>) -> f64 {
    isometry_residual(u)
}

/// Frobenius norm of `V^dagger V - I` for a tall matrix `V`.
pub fn isometry_residual(v: &DMatrix<C64>) -> f64 {
    let g = v.adjoint() * v;
    (g - DMatrix::identity(v.ncols(), v.ncols())).norm()
}

/// Eigenvalues of a Hermitian matrix in descending order; no validation.
pub(crate) fn eigenvalues_unchecked(m: DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_unstable_by(|a, b| b.total_cmp(a));
    ev
}

/// Descending real eigenvalues of a Hermitian matrix.
pub fn hermitian_spectrum(m: &DMatrix<C64>, tol: f64) -> Result<Vec<f64>> {
    check_hermitian(m, tol)?;
    Ok(eigenvalues_unchecked(m.clone()))
}

/// Descending eigenvalues with eigenvectors as the matching columns.
pub fn hermitian_eigen(m: &DMatrix<C64>, tol: f64) -> Result<(Vec<f64>, DMatrix<C64>)> {
    check_hermitian(m, tol)?;
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_unstable_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

fn check_hermitian(m: &DMatrix<C64>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let residual = hermiticity_residual(m);
    if residual > tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// `-sum lambda log2 lambda` with every `lambda <= clip` counted as zero.
pub fn entropy_bits_clipped(spectrum: &[f64], clip: f64) -> f64 {
    let nats: f64 = spectrum.iter().filter(|&&l| l > clip).map(|&l| -l * l.ln()).sum();
    nats / LN_2
}

/// Entropy of a spectrum in bits, rejecting eigenvalues below
/// `-tol.validity`.
pub fn entropy_bits(spectrum: &[f64], tol: &Tolerances) -> Result<f64> {
    if let Some(&min) = spectrum.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -tol.validity {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
    }
    Ok(entropy_bits_clipped(spectrum, tol.clip))
}

pub fn von_neumann_entropy(rho: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    entropy_bits(&hermitian_spectrum(&rho.entries, tol.validity)?, tol)
}

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    left_basis: DMatrix<C64>,
    right_basis: DMatrix<C64>,
    cut: Cut,
}

impl SchmidtDecomposition {
    /// Descending, nonnegative.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Squared coefficients (Schmidt weights).
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    /// Columns are the left Schmidt vectors.
    pub fn left_basis(&self) -> &DMatrix<C64> {
        &self.left_basis
    }

    /// Columns are the right Schmidt vectors.
    pub fn right_basis(&self) -> &DMatrix<C64> {
        &self.right_basis
    }

    pub fn cut(&self) -> &Cut {
        &self.cut
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    pub fn entropy(&self, clip: f64) -> f64 {
        entropy_bits_clipped(&self.weights(), clip)
    }

    /// `sum_i c_i |l_i> (x) |r_i>` mapped back to the original factor order.
    pub fn reconstruct(&self) -> StateVector {
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            self.coefficients.len(),
            self.coefficients.iter().map(|&c| C64::new(c, 0.0)),
        ));
        let m = &self.left_basis * diag * self.right_basis.transpose();
        StateVector {
            amplitudes: DVector::from_vec(self.cut.unmatrix(&m)),
            shape: self.cut.shape.clone(),
        }
    }
}

/// Schmidt decomposition of a normalized state across the cut whose left
/// block is `left`.
pub fn schmidt(psi: &StateVector, left: &[usize], tol: &Tolerances) -> Result<SchmidtDecomposition> {
    psi.require_normalized(tol.validity)?;
    let cut = Cut::new(&psi.shape, left)?;
    let svd = cut.matrix(psi.as_slice()).svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("SVD computed with both factors"),
    };
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_unstable_by(|&a, &b| s[b].total_cmp(&s[a]));
    Ok(SchmidtDecomposition {
        coefficients: order.iter().map(|&k| s[k].max(0.0)).collect(),
        left_basis: DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]),
        right_basis: DMatrix::from_fn(v_t.ncols(), order.len(), |i, j| v_t[(order[j], i)]),
        cut,
    })
}

/// Complex Gaussian matrix with `E|z|^2 = 1` entries.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Haar-distributed `n x n` unitary: QR of a complex Gaussian matrix with
/// the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    assert!(n >= 1, "unitary dimension must be positive");
    let qr = complex_gaussian(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Deterministic Haar unitary for a fixed seed.
pub fn haar_random_unitary(n: usize, seed: u64) -> DMatrix<C64> {
    haar_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// First `cols` columns of a Haar unitary: a Haar-random isometry.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    assert!(cols <= rows, "isometry needs rows >= cols");
    haar_unitary(rows, rng).columns(0, cols).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> StateVector {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)], &[2, 2]).unwrap()
    }

    #[test]
    fn shape_rejects_zero_and_empty() {
        assert!(FactorShape::new(vec![]).is_err());
        assert!(FactorShape::new(vec![3, 0]).is_err());
        assert!(FactorShape::new(vec![100, 101]).is_err());
        assert_eq!(FactorShape::new(vec![3, 3, 3, 3]).unwrap().total(), 81);
    }

    #[test]
    fn kron_of_basis_states() {
        let zero = StateVector::basis(&[2], &[0]).unwrap();
        let one = StateVector::basis(&[2], &[1]).unwrap();
        let k = tensor_product(&zero, &one).unwrap();
        assert_eq!(k.shape().dims(), &[2, 2]);
        assert_eq!(k, StateVector::basis(&[2, 2], &[0, 1]).unwrap());
        assert_eq!(k.as_slice()[1], c(1.0));
    }

    #[test]
    fn kron_of_maximally_mixed() {
        let half = DensityMatrix::maximally_mixed(&[2]).unwrap();
        let k = tensor_product(&half, &half).unwrap();
        assert_abs_diff_eq!((k.entries() - DMatrix::identity(4, 4).unscale(4.0)).norm(), 0.0);
    }

    #[test]
    fn swap_and_identity_permutations() {
        let s = StateVector::basis(&[2, 3], &[0, 2]).unwrap();
        assert_eq!(permute_factors(&s, &[0, 1]).unwrap(), s);
        let swapped = permute_factors(&s, &[1, 0]).unwrap();
        assert_eq!(swapped, StateVector::basis(&[3, 2], &[2, 0]).unwrap());
    }

    #[test]
    fn invalid_permutations_are_rejected() {
        let s = StateVector::basis(&[2, 2, 2], &[0, 0, 0]).unwrap();
        for bad in [&[0, 1][..], &[0, 0, 1], &[0, 1, 3]] {
            assert!(matches!(permute_factors(&s, bad), Err(Error::InvalidPermutation(_))));
        }
    }

    #[test]
    fn three_factor_permutation_moves_digits() {
        // |a b c> with dims (2,3,4); perm [2,0,1] gives |c a b>.
        let s = StateVector::basis(&[2, 3, 4], &[1, 2, 3]).unwrap();
        let p = permute_factors(&s, &[2, 0, 1]).unwrap();
        assert_eq!(p, StateVector::basis(&[4, 2, 3], &[3, 1, 2]).unwrap());
        let back = permute_factors(&p, &inverse_permutation(&[2, 0, 1])).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn bell_state_reduces_to_half_identity() {
        let rho = DensityMatrix::from_pure(&bell());
        let r = partial_trace(&rho, &[0]).unwrap();
        assert_abs_diff_eq!(
            (r.entries() - DMatrix::identity(2, 2).unscale(2.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            von_neumann_entropy(&r, &Tolerances::default()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn product_state_partial_trace() {
        let psi = StateVector::basis(&[2, 2], &[0, 1]).unwrap();
        let r = partial_trace(&DensityMatrix::from_pure(&psi), &[0]).unwrap();
        assert_eq!(r.entries()[(0, 0)], c(1.0));
        assert_eq!(r.entries()[(1, 1)], c(0.0));
        let r = partial_trace(&DensityMatrix::from_pure(&psi), &[1]).unwrap();
        assert_eq!(r.entries()[(1, 1)], c(1.0));
    }

    #[test]
    fn partial_trace_rejects_trivial_subsets() {
        let rho = DensityMatrix::from_pure(&bell());
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::InvalidSubset(_))));
        assert!(matches!(partial_trace(&rho, &[0, 1]), Err(Error::InvalidSubset(_))));
        assert!(matches!(partial_trace(&rho, &[2]), Err(Error::InvalidSubset(_))));
    }

    #[test]
    fn spectra_of_simple_matrices() {
        let third = DMatrix::<C64>::identity(3, 3).unscale(3.0);
        let s = hermitian_spectrum(&third, 1e-10).unwrap();
        for v in s {
            assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-15);
        }
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.2), c(0.5), c(0.3)]));
        let s = hermitian_spectrum(&d, 1e-10).unwrap();
        assert_abs_diff_eq!(s[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s[1], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(s[2], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = DMatrix::<C64>::identity(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(hermitian_spectrum(&m, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigenvectors_have_small_residuals() {
        let u = haar_random_unitary(5, 3);
        let d = DMatrix::from_diagonal(&DVector::from_vec((1..=5).map(|k| c(k as f64)).collect()));
        let h = &u * d * u.adjoint();
        let (vals, vecs) = hermitian_eigen(&h, 1e-10).unwrap();
        assert_abs_diff_eq!(vals[0], 5.0, epsilon = 1e-12);
        for (k, &l) in vals.iter().enumerate() {
            let v = vecs.column(k);
            assert!((&h * v - v * c(l)).norm() < 1e-12);
        }
    }

    #[test]
    fn entropy_values() {
        let tol = Tolerances::default();
        let psi = StateVector::basis(&[3], &[1]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&DensityMatrix::from_pure(&psi), &tol).unwrap(), 0.0);
        let half = DensityMatrix::maximally_mixed(&[2]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&half, &tol).unwrap(), 1.0, epsilon = 1e-14);
        // 1/3 log2 3 + 8/12 log2 12, summed directly.
        let mut spec = vec![1.0 / 12.0; 8];
        spec.push(1.0 / 3.0);
        let direct = (1.0f64 / 3.0) * 3f64.log2() + (8.0 / 12.0) * 12f64.log2();
        assert_abs_diff_eq!(entropy_bits(&spec, &tol).unwrap(), direct, epsilon = 1e-14);
        assert_abs_diff_eq!(direct, 2.918_295_834, epsilon = 1e-9);
        assert!(matches!(
            entropy_bits(&[1.1, -0.1], &tol),
            Err(Error::NotPositive { .. })
        ));
        // Roundoff negatives are clipped, not rejected.
        assert_abs_diff_eq!(entropy_bits(&[1.0, -1e-16], &tol).unwrap(), 0.0);
    }

    #[test]
    fn schmidt_of_product_and_bell() {
        let tol = Tolerances::default();
        let prod = StateVector::basis(&[2, 2], &[0, 1]).unwrap();
        let s = schmidt(&prod, &[0], &tol).unwrap();
        assert_abs_diff_eq!(s.coefficients()[0], 1.0, epsilon = 1e-15);
        assert_eq!(s.rank(1e-12), 1);
        let s = schmidt(&bell(), &[0], &tol).unwrap();
        for w in s.weights() {
            assert_abs_diff_eq!(w, 0.5, epsilon = 1e-15);
        }
        assert!((s.reconstruct().as_slice().iter().zip(bell().as_slice())).all(|(a, b)| (a - b).norm() < 1e-14));
        assert!(matches!(schmidt(&bell(), &[0, 1], &tol), Err(Error::InvalidSubset(_))));
        let unnormalized = StateVector::from_vec(vec![c(1.0), c(1.0), c(0.0), c(0.0)], &[2, 2]).unwrap();
        assert!(matches!(
            schmidt(&unnormalized, &[0], &tol),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn apply_local_matches_kronecker_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = StateVector::new(
            complex_gaussian(24, 1, &mut rng).column(0).into_owned(),
            FactorShape::new(vec![2, 3, 4]).unwrap(),
        )
        .unwrap();
        let u = haar_unitary(3, &mut rng);
        let full = DMatrix::<C64>::identity(2, 2)
            .kronecker(&u)
            .kronecker(&DMatrix::identity(4, 4));
        let a = psi.apply_local(1, &u).unwrap();
        let b = psi.apply(&full).unwrap();
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-13);
    }

    #[test]
    fn haar_unitary_basics() {
        let one = haar_random_unitary(1, 5);
        assert_abs_diff_eq!(one[(0, 0)].norm(), 1.0, epsilon = 1e-14);
        assert_eq!(haar_random_unitary(4, 9), haar_random_unitary(4, 9));
        assert_ne!(haar_random_unitary(4, 9), haar_random_unitary(4, 10));
        let u = haar_random_unitary(3, 1);
        for j in 0..3 {
            assert_abs_diff_eq!(u.column(j).norm(), 1.0, epsilon = 1e-12);
        }
        assert!(unitarity_residual(&u) < 1e-13);
        let v = random_isometry(9, 3, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(isometry_residual(&v) < 1e-13);
    }

    #[test]
    fn cut_entropy_handles_zero_vector() {
        let shape = FactorShape::new(vec![2, 2]).unwrap();
        let cut = Cut::new(&shape, &[1]).unwrap();
        assert_eq!(cut.entropy(&[C64::new(0.0, 0.0); 4], 1e-14), 0.0);
        assert_abs_diff_eq!(cut.entropy(bell().as_slice(), 1e-14), 1.0, epsilon = 1e-14);
    }
}
