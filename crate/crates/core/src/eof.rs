//! Entanglement of formation: ensembles, optimizer-based upper estimates,
//! range-based lower evidence, the reduction of two-copy antisymmetric
//! states to normal form, and the two-copy additivity check.
//!
//! `eof_upper` searches over ensembles `{(|v_i|^2, v_i/|v_i|)}` where
//! `v_i = sum_j V_ij sqrt(l_j) |e_j>` for an isometry `V` of size `m x r`
//! (`r` the rank, `m = r^2`). Mixing two members by a 2x2 unitary keeps
//! `sum_i |v_i><v_i| = rho`, so the search moves are Givens rotations on
//! member pairs, and each move re-evaluates only the two members it touches.
//! Every evaluated point is a valid ensemble, so the returned value is an
//! upper bound on `E_f` by construction.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix3};
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::antisym::{density_support_residual, lemma1_unitary, project_two_copy, states_from_columns, AntisymState};
use crate::bounds::{entanglement_of_psi_prime, BoundReport};
use crate::sample::{derive_seed, rng_for};
use crate::tensor::{
    complex_gaussian, hermitian_eigen, isometry_residual, permute_factors, random_isometry, tensor_product, Cut,
    DensityMatrix, FactorShape, StateVector,
};
use crate::xi::{build_psi_prime, ProbabilityTriple, TWO_COPY_TO_AB};
use crate::{Error, Result, Tolerances, C64};

const IMPROVEMENT: f64 = 1e-13;
const SWEEP_PAIRS: usize = 64;

/// A finite pure-state decomposition of `target`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, StateVector)>,
    target: DensityMatrix,
}

impl Ensemble {
    /// Validates every ensemble invariant at `tol`.
    pub fn new(members: Vec<(f64, StateVector)>, target: DensityMatrix, tol: &Tolerances) -> Result<Self> {
        let e = Ensemble { members, target };
        e.validate(tol)?;
        Ok(e)
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `sum_i p_i |psi_i><psi_i|`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let n = self.target.dim();
        self.members.iter().fold(DMatrix::zeros(n, n), |acc, (p, psi)| {
            acc + (psi.amplitudes() * psi.amplitudes().adjoint()).scale(*p)
        })
    }

    /// Frobenius norm of `reconstruct() - target` (bounds the operator norm).
    pub fn reconstruction_residual(&self) -> f64 {
        (self.reconstruct() - self.target.entries()).norm()
    }

    /// Largest norm of a member's component outside `Range(target)`.
    pub fn range_residual(&self, tol: &Tolerances) -> Result<f64> {
        let range = RangeBasis::of(&self.target, tol)?;
        let proj = &range.vectors * range.vectors.adjoint();
        Ok(self
            .members
            .iter()
            .map(|(_, psi)| (psi.amplitudes() - &proj * psi.amplitudes()).norm())
            .fold(0.0, f64::max))
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let dim = self.target.dim();
        let mut total = 0.0;
        for (p, psi) in &self.members {
            if p.is_nan() || *p <= 0.0 {
                return Err(Error::OutOfRange {
                    value: *p,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: psi.dim(),
                });
            }
            psi.require_normalized(tol.validity)?;
            total += p;
        }
        if (total - 1.0).abs() > tol.validity {
            return Err(Error::NotUnitTrace { trace: total });
        }
        let residual = self.reconstruction_residual();
        if residual > tol.validity {
            return Err(Error::NotIsometry { residual });
        }
        Ok(())
    }

    /// `sum_i p_i E(psi_i)` across `cut`.
    pub fn average_entanglement(&self, cut: &Cut, clip: f64) -> f64 {
        self.members
            .iter()
            .map(|(p, psi)| p * cut.entropy(psi.as_slice(), clip))
            .sum()
    }

    /// Product ensemble `{(p_i q_j, psi_i (x) phi_j)}` of `target (x) other.target`.
    pub fn tensor(&self, other: &Ensemble) -> Result<Ensemble> {
        let mut members = Vec::with_capacity(self.len() * other.len());
        for (p, a) in &self.members {
            for (q, b) in &other.members {
                members.push((p * q, tensor_product(a, b)?));
            }
        }
        Ok(Ensemble {
            members,
            target: tensor_product(&self.target, &other.target)?,
        })
    }

    fn from_vectors(vectors: &[DVector<C64>], target: &DensityMatrix) -> Ensemble {
        let shape = target.shape().clone();
        let members = vectors
            .iter()
            .filter_map(|v| {
                let w = v.norm_squared();
                (w > 0.0).then(|| (w, StateVector::new(v.unscale(w.sqrt()), shape.clone()).expect("sized")))
            })
            .collect();
        Ensemble {
            members,
            target: target.clone(),
        }
    }
}

/// Eigenvectors of `rho` with eigenvalue above `tol.validity`.
#[derive(Debug, Clone)]
pub struct RangeBasis {
    pub values: Vec<f64>,
    /// `dim x rank`, orthonormal columns.
    pub vectors: DMatrix<C64>,
}

impl RangeBasis {
    pub fn of(rho: &DensityMatrix, tol: &Tolerances) -> Result<Self> {
        let (values, vectors) = hermitian_eigen(rho.entries(), tol.validity)?;
        let rank = values.iter().take_while(|&&l| l > tol.validity).count();
        if rank == 0 {
            return Err(Error::RankZero);
        }
        Ok(RangeBasis {
            values: values[..rank].to_vec(),
            vectors: vectors.columns(0, rank).into_owned(),
        })
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Columns `sqrt(l_j) |e_j>`.
    fn weighted(&self) -> DMatrix<C64> {
        let mut a = self.vectors.clone();
        for (j, l) in self.values.iter().enumerate() {
            a.column_mut(j).scale_mut(l.sqrt());
        }
        a
    }
}

/// The ensemble `{(|v_i|^2, v_i / |v_i|)}` with `v_i = sum_j V_ij sqrt(l_j) |e_j>`
/// over the eigendecomposition of `rho`. Zero rows of `V` produce no member.
pub fn ensemble_from_isometry(rho: &DensityMatrix, v: &DMatrix<C64>, tol: &Tolerances) -> Result<Ensemble> {
    let range = RangeBasis::of(rho, tol)?;
    if v.ncols() != range.rank() || v.nrows() < v.ncols() {
        return Err(Error::DimensionMismatch {
            expected: range.rank(),
            found: v.ncols(),
        });
    }
    let residual = isometry_residual(v);
    if residual > tol.validity {
        return Err(Error::NotIsometry { residual });
    }
    Ok(Ensemble::from_vectors(&member_vectors(&range.weighted(), v), rho))
}

fn member_vectors(weighted: &DMatrix<C64>, v: &DMatrix<C64>) -> Vec<DVector<C64>> {
    let all = weighted * v.transpose();
    all.column_iter().map(|c| c.into_owned()).collect()
}

/// Multi-start derivative-free search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Random starts after the deterministic ones.
    pub starts: usize,
    /// Objective evaluations allowed per start.
    pub evals_per_start: usize,
    /// Objective evaluations allowed in total.
    pub budget: usize,
    pub seed: u64,
    pub initial_step: f64,
    /// A start has converged once its rotation step falls below this.
    pub min_step: f64,
    pub tol: Tolerances,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            starts: 32,
            evals_per_start: 4_000,
            budget: 128_000,
            seed: 0,
            initial_step: core::f64::consts::FRAC_PI_4,
            min_step: 1e-6,
            tol: Tolerances::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        OptimizerConfig { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy)]
struct Rotation {
    cos: f64,
    sin: C64,
}

impl Rotation {
    /// `[[c, -s e^{-i phi}], [s e^{i phi}, c]]` with `phi` in `{0, pi/2}`.
    fn new(angle: f64, imaginary: bool) -> Self {
        let s = angle.sin();
        Rotation {
            cos: angle.cos(),
            sin: if imaginary { C64::new(0.0, s) } else { C64::new(s, 0.0) },
        }
    }

    fn apply(&self, a: &DVector<C64>, b: &DVector<C64>) -> (DVector<C64>, DVector<C64>) {
        let a2 = a.scale(self.cos) - b * self.sin.conj();
        let b2 = a * self.sin + b.scale(self.cos);
        (a2, b2)
    }
}

/// Something optimized by rotating pairs of slots.
trait PairSearch {
    fn slots(&self) -> usize;
    fn value(&self) -> f64;
    /// Objective after rotating slots `i`, `j`; remembered for `accept`.
    fn trial(&mut self, i: usize, j: usize, rot: Rotation) -> f64;
    fn accept(&mut self);
}

struct Counter {
    used: usize,
    budget: usize,
}

impl Counter {
    fn take(&mut self) -> bool {
        if self.used < self.budget {
            self.used += 1;
            true
        } else {
            false
        }
    }
}

/// Coordinate search with a shrinking rotation step. Returns whether the
/// step fell below `min_step` before a cap was hit.
fn refine<S: PairSearch>(state: &mut S, cfg: &OptimizerConfig, rng: &mut ChaCha8Rng, counter: &mut Counter) -> bool {
    let n = state.slots();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    if pairs.is_empty() {
        return true;
    }
    let mut local = 0usize;
    let mut step = cfg.initial_step;
    while step >= cfg.min_step {
        pairs.shuffle(rng);
        let mut improved = false;
        for &(i, j) in pairs.iter().take(SWEEP_PAIRS) {
            for imaginary in [false, true] {
                for sign in [1.0, -1.0] {
                    if local >= cfg.evals_per_start || !counter.take() {
                        return false;
                    }
                    local += 1;
                    let candidate = state.trial(i, j, Rotation::new(sign * step, imaginary));
                    if candidate < state.value() - IMPROVEMENT {
                        state.accept();
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    true
}

/// Members `i, j` after a trial rotation, with their entanglement.
type PendingPair = (usize, usize, DVector<C64>, DVector<C64>, f64, f64);

struct EnsembleSearch<'a> {
    cut: &'a Cut,
    clip: f64,
    vectors: Vec<DVector<C64>>,
    contrib: Vec<f64>,
    total: f64,
    pending: Option<PendingPair>,
}

impl<'a> EnsembleSearch<'a> {
    fn new(cut: &'a Cut, clip: f64, vectors: Vec<DVector<C64>>) -> Self {
        let contrib: Vec<f64> = vectors.iter().map(|v| Self::contribution(cut, clip, v)).collect();
        EnsembleSearch {
            cut,
            clip,
            total: contrib.iter().sum(),
            vectors,
            contrib,
            pending: None,
        }
    }

    fn contribution(cut: &Cut, clip: f64, v: &DVector<C64>) -> f64 {
        let w = v.norm_squared();
        if w > 0.0 {
            w * cut.entropy(v.as_slice(), clip)
        } else {
            0.0
        }
    }
}

impl PairSearch for EnsembleSearch<'_> {
    fn slots(&self) -> usize {
        self.vectors.len()
    }

    fn value(&self) -> f64 {
        self.total
    }

    fn trial(&mut self, i: usize, j: usize, rot: Rotation) -> f64 {
        let (a, b) = rot.apply(&self.vectors[i], &self.vectors[j]);
        let ca = Self::contribution(self.cut, self.clip, &a);
        let cb = Self::contribution(self.cut, self.clip, &b);
        let value = self.total - self.contrib[i] - self.contrib[j] + ca + cb;
        self.pending = Some((i, j, a, b, ca, cb));
        value
    }

    fn accept(&mut self) {
        if let Some((i, j, a, b, ca, cb)) = self.pending.take() {
            self.vectors[i] = a;
            self.vectors[j] = b;
            self.contrib[i] = ca;
            self.contrib[j] = cb;
            // Re-summing avoids drift from repeated incremental updates.
            self.total = self.contrib.iter().sum();
        }
    }
}

/// Upper estimate of `E_f` with its witness ensemble.
#[derive(Debug, Clone)]
pub struct UpperEstimate {
    pub value: f64,
    pub witness: Ensemble,
    pub evaluations: usize,
    pub seed: u64,
    pub converged: bool,
    pub starts_run: usize,
}

/// `eof_upper_with_starts` with only the built-in starts.
pub fn eof_upper(rho: &DensityMatrix, cut: &Cut, cfg: &OptimizerConfig) -> Result<UpperEstimate> {
    eof_upper_with_starts(rho, cut, cfg, &[])
}

/// Minimizes the average entanglement over ensembles of `rho`.
///
/// Starts, in order: each ensemble in `warm` (members padded with zero
/// vectors to `m = r^2` slots), the eigen-ensemble, then `cfg.starts` Haar
/// random isometries on ChaCha streams `0, 1, ...` of `cfg.seed`. Starts run
/// sequentially against one global evaluation counter, so raising
/// `cfg.budget` only extends the same sequence and never raises the result.
pub fn eof_upper_with_starts(
    rho: &DensityMatrix,
    cut: &Cut,
    cfg: &OptimizerConfig,
    warm: &[Ensemble],
) -> Result<UpperEstimate> {
    if cut.shape() != rho.shape() {
        return Err(Error::InvalidShape(
            "cut does not match the density matrix shape".into(),
        ));
    }
    let range = RangeBasis::of(rho, &cfg.tol)?;
    let r = range.rank();
    let m = r * r;
    let weighted = range.weighted();

    let mut starts: Vec<Vec<DVector<C64>>> = Vec::new();
    for e in warm {
        if e.target.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: e.target.dim(),
            });
        }
        let mut vs: Vec<DVector<C64>> = e
            .members
            .iter()
            .map(|(p, psi)| psi.amplitudes().scale(p.sqrt()))
            .collect();
        vs.resize(vs.len().max(m), DVector::zeros(rho.dim()));
        starts.push(vs);
    }
    let mut eigen = DMatrix::zeros(m, r);
    for j in 0..r {
        eigen[(j, j)] = C64::new(1.0, 0.0);
    }
    starts.push(member_vectors(&weighted, &eigen));
    let deterministic = starts.len();

    let mut counter = Counter {
        used: 0,
        budget: cfg.budget,
    };
    let mut best: Option<(f64, Vec<DVector<C64>>, bool)> = None;
    let mut starts_run = 0;
    for k in 0..deterministic + cfg.starts {
        let mut rng = rng_for(cfg.seed, k as u64);
        let vectors = if k < deterministic {
            core::mem::take(&mut starts[k])
        } else {
            member_vectors(&weighted, &random_isometry(m, r, &mut rng))
        };
        if !counter.take() {
            break;
        }
        starts_run += 1;
        let mut search = EnsembleSearch::new(cut, cfg.tol.clip, vectors);
        let converged = refine(&mut search, cfg, &mut rng, &mut counter);
        if best.as_ref().is_none_or(|(v, _, _)| search.total < *v) {
            best = Some((search.total, search.vectors, converged));
        }
    }
    let (value, vectors, converged) = best.ok_or(Error::BudgetExhausted)?;
    Ok(UpperEstimate {
        value,
        witness: Ensemble::from_vectors(&vectors, rho),
        evaluations: counter.used,
        seed: cfg.seed,
        converged,
        starts_run,
    })
}

struct RangeSearch<'a> {
    cut: &'a Cut,
    clip: f64,
    basis: &'a DMatrix<C64>,
    coeffs: DVector<C64>,
    value: f64,
    pending: Option<(DVector<C64>, f64)>,
}

impl<'a> RangeSearch<'a> {
    fn new(cut: &'a Cut, clip: f64, basis: &'a DMatrix<C64>, coeffs: DVector<C64>) -> Self {
        let coeffs = coeffs.unscale(coeffs.norm());
        let value = Self::eval(cut, clip, basis, &coeffs);
        RangeSearch {
            cut,
            clip,
            basis,
            coeffs,
            value,
            pending: None,
        }
    }

    fn eval(cut: &Cut, clip: f64, basis: &DMatrix<C64>, c: &DVector<C64>) -> f64 {
        cut.entropy((basis * c).as_slice(), clip)
    }
}

impl PairSearch for RangeSearch<'_> {
    fn slots(&self) -> usize {
        self.coeffs.len()
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn trial(&mut self, i: usize, j: usize, rot: Rotation) -> f64 {
        let mut c = self.coeffs.clone();
        let (a, b) = (self.coeffs[i], self.coeffs[j]);
        c[i] = a * rot.cos - b * rot.sin.conj();
        c[j] = a * rot.sin + b * rot.cos;
        let v = Self::eval(self.cut, self.clip, self.basis, &c);
        self.pending = Some((c, v));
        v
    }

    fn accept(&mut self) {
        if let Some((c, v)) = self.pending.take() {
            self.coeffs = c;
            self.value = v;
        }
    }
}

/// Smallest pure-state entanglement found over unit vectors of `Range(rho)`.
#[derive(Debug, Clone)]
pub struct RangeEstimate {
    pub value: f64,
    pub state: StateVector,
    pub evaluations: usize,
    pub converged: bool,
}

/// Searches `Range(rho)` for its least entangled unit vector across `cut`.
///
/// This is heuristic evidence for the range lower bound on `E_f`: the value
/// found is an upper estimate of the infimum over the range. Starts are the
/// range eigenvectors followed by `cfg.starts` random unit coefficient
/// vectors.
pub fn eof_lower_range(rho: &DensityMatrix, cut: &Cut, cfg: &OptimizerConfig) -> Result<RangeEstimate> {
    if cut.shape() != rho.shape() {
        return Err(Error::InvalidShape(
            "cut does not match the density matrix shape".into(),
        ));
    }
    let range = RangeBasis::of(rho, &cfg.tol)?;
    let r = range.rank();
    let mut counter = Counter {
        used: 0,
        budget: cfg.budget,
    };
    let mut best: Option<(f64, DVector<C64>, bool)> = None;
    for k in 0..r + cfg.starts {
        let mut rng = rng_for(cfg.seed, k as u64);
        let coeffs = if k < r {
            let mut e = DVector::zeros(r);
            e[k] = C64::new(1.0, 0.0);
            e
        } else {
            complex_gaussian(r, 1, &mut rng).column(0).into_owned()
        };
        if !counter.take() {
            break;
        }
        let mut search = RangeSearch::new(cut, cfg.tol.clip, &range.vectors, coeffs);
        let converged = refine(&mut search, cfg, &mut rng, &mut counter);
        if best.as_ref().is_none_or(|(v, _, _)| search.value < *v) {
            best = Some((search.value, search.coeffs, converged));
        }
    }
    let (value, coeffs, converged) = best.ok_or(Error::BudgetExhausted)?;
    Ok(RangeEstimate {
        value,
        state: StateVector::new(&range.vectors * coeffs, rho.shape().clone())?,
        evaluations: counter.used,
        converged,
    })
}

/// Upper and lower estimates of `E_f` for one density matrix.
#[derive(Debug, Clone)]
pub struct EofEstimate {
    pub upper: f64,
    pub lower: f64,
    pub witness: Ensemble,
    pub iterations: usize,
    pub seed: u64,
    pub converged: bool,
}

pub fn estimate_eof(rho: &DensityMatrix, cut: &Cut, cfg: &OptimizerConfig) -> Result<EofEstimate> {
    let upper = eof_upper(rho, cut, cfg)?;
    let lower = eof_lower_range(rho, cut, &cfg.with_seed(derive_seed(cfg.seed, 1)))?;
    Ok(EofEstimate {
        upper: upper.value,
        lower: lower.value,
        witness: upper.witness,
        iterations: upper.evaluations + lower.evaluations,
        seed: cfg.seed,
        converged: upper.converged && lower.converged,
    })
}

/// The `A1 A2 : B1 B2` cut of a two-copy state in factor order
/// `A1, B1, A2, B2`.
pub fn two_copy_ab_cut() -> Cut {
    Cut::new(&FactorShape::new([3usize, 3, 3, 3]).unwrap(), &[0, 2]).expect("proper cut")
}

/// The `A : B` cut of a single copy on `C^3 (x) C^3`.
pub fn single_copy_cut() -> Cut {
    Cut::new(&FactorShape::new([3usize, 3]).unwrap(), &[0]).expect("proper cut")
}

/// Normal form of a two-copy antisymmetric state.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiPrimeReduction {
    pub triple: ProbabilityTriple,
    /// Acts on `A1` and `B1`.
    pub u1: Matrix3<C64>,
    /// Acts on `A2` and `B2`.
    pub u2: Matrix3<C64>,
    /// `|<psi'|(u1 (x) u1 (x) u2 (x) u2)|psi>|` after reordering factors.
    pub overlap: f64,
}

/// Schmidt-decomposes `psi in H- (x) H-` (factor order `A1, B1, A2, B2`)
/// across the copy cut and aligns both Schmidt bases with the wedge basis.
pub fn reduce_to_psi_prime(psi: &StateVector, tol: &Tolerances) -> Result<PsiPrimeReduction> {
    psi.require_normalized(tol.validity)?;
    let c = project_two_copy(psi, tol.validity)?;
    let svd = DMatrix::from_column_slice(3, 3, c.as_slice()).svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("SVD computed with both factors"),
    };
    let s = svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_unstable_by(|&a, &b| s[b].total_cmp(&s[a]));

    let left = Matrix3::from_fn(|a, k| u[(a, order[k])]);
    let right = Matrix3::from_fn(|b, k| v_t[(order[k], b)]);
    let weights = order.map(|k| s[k] * s[k]);
    let total: f64 = weights.iter().sum();
    let triple = ProbabilityTriple::new(weights[0] / total, weights[1] / total, weights[2] / total)?;

    let u1 = lemma1_unitary(&states_from_columns(&left), tol.validity)?;
    let u2 = lemma1_unitary(&states_from_columns(&right), tol.validity)?;
    let mapped = apply_two_copy_local(psi, &u1, &u2)?;
    let overlap = permute_factors(&mapped, &TWO_COPY_TO_AB)?.overlap(&build_psi_prime(&triple));
    Ok(PsiPrimeReduction {
        triple,
        u1,
        u2,
        overlap,
    })
}

/// `(u1 (x) u1 (x) u2 (x) u2) |psi>` on factor order `A1, B1, A2, B2`.
pub fn apply_two_copy_local(psi: &StateVector, u1: &Matrix3<C64>, u2: &Matrix3<C64>) -> Result<StateVector> {
    let d1 = DMatrix::from_column_slice(3, 3, u1.as_slice());
    let d2 = DMatrix::from_column_slice(3, 3, u2.as_slice());
    psi.apply_local(0, &d1)?
        .apply_local(1, &d1)?
        .apply_local(2, &d2)?
        .apply_local(3, &d2)
}

/// A:B entanglement of a two-copy state through its normal form and the
/// bound chain.
pub fn two_copy_entanglement_via_bounds(
    psi: &StateVector,
    tol: &Tolerances,
) -> Result<(PsiPrimeReduction, BoundReport)> {
    let red = reduce_to_psi_prime(psi, tol)?;
    let report = entanglement_of_psi_prime(&red.triple)?;
    Ok((red, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityConfig {
    pub optimizer: OptimizerConfig,
    /// Random pure states of `Range(rho1 (x) rho2)` pushed through the bound
    /// chain.
    pub samples: usize,
    /// Verdict tolerance around 2.
    pub tol: f64,
    /// Largest allowed `|rho - P rho P|` for `P` onto `H-`.
    pub support_tol: f64,
}

impl Default for AdditivityConfig {
    fn default() -> Self {
        AdditivityConfig {
            optimizer: OptimizerConfig::default(),
            samples: 64,
            tol: 1e-6,
            support_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct AdditivityReport {
    /// `eof_upper(rho1 (x) rho2)` across `A1 A2 : B1 B2`.
    pub upper: f64,
    pub upper_rho1: f64,
    pub upper_rho2: f64,
    /// `eof_lower_range(rho1 (x) rho2)`.
    pub lower_range: f64,
    pub samples: usize,
    /// Smallest directly computed entanglement among the samples.
    pub min_sample_entropy: f64,
    /// Largest `|direct - bound chain total|` among the samples.
    pub max_sample_discrepancy: f64,
    /// Minimum of every lower-side quantity.
    pub lower_evidence: f64,
    pub verdict: Verdict,
    pub seed: u64,
    pub budget: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Upper and lower evidence for `E_f(rho1 (x) rho2) = 2` with both inputs on
/// `H-`. `Pass` iff `|upper - 2| <= tol`, both single-copy estimates are
/// within `tol` of 1 and all lower evidence is `>= 2 - tol`.
pub fn verify_additivity(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    cfg: &AdditivityConfig,
) -> Result<AdditivityReport> {
    let tol = &cfg.optimizer.tol;
    for rho in [rho1, rho2] {
        if rho.shape().dims() != [3, 3] {
            return Err(Error::InvalidShape("inputs must live on C^3 (x) C^3".into()));
        }
        rho.validate(tol)?;
        let residual = density_support_residual(rho.entries());
        if residual > cfg.support_tol {
            return Err(Error::OutsideAntisymmetric { residual });
        }
    }
    let seed = cfg.optimizer.seed;
    let sub = |tag| cfg.optimizer.with_seed(derive_seed(seed, tag));
    let single = single_copy_cut();
    let e1 = eof_upper(rho1, &single, &sub(1))?;
    let e2 = eof_upper(rho2, &single, &sub(2))?;

    let product = tensor_product(rho1, rho2)?;
    let cut = two_copy_ab_cut();
    let warm = e1.witness.tensor(&e2.witness)?;
    let upper = eof_upper_with_starts(&product, &cut, &sub(3), &[warm])?;
    let lower = eof_lower_range(&product, &cut, &sub(4))?;

    let range = RangeBasis::of(&product, tol)?;
    let mut rng = rng_for(derive_seed(seed, 5), 0);
    let mut min_sample_entropy = f64::INFINITY;
    let mut min_chain_total = f64::INFINITY;
    let mut max_sample_discrepancy = 0.0f64;
    for _ in 0..cfg.samples {
        let psi = sample_range_state(&range, product.shape(), &mut rng);
        let direct = cut.entropy(psi.as_slice(), tol.clip);
        let (_, report) = two_copy_entanglement_via_bounds(&psi, tol)?;
        min_sample_entropy = min_sample_entropy.min(direct);
        min_chain_total = min_chain_total.min(report.total);
        max_sample_discrepancy = max_sample_discrepancy.max((direct - report.total).abs());
    }
    let lower_evidence = lower.value.min(min_sample_entropy).min(min_chain_total);
    let singles_ok = [e1.value, e2.value].iter().all(|v| (v - 1.0).abs() <= cfg.tol);
    let verdict = if singles_ok && (upper.value - 2.0).abs() <= cfg.tol && lower_evidence >= 2.0 - cfg.tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(AdditivityReport {
        upper: upper.value,
        upper_rho1: e1.value,
        upper_rho2: e2.value,
        lower_range: lower.value,
        samples: cfg.samples,
        min_sample_entropy,
        max_sample_discrepancy,
        lower_evidence,
        verdict,
        seed,
        budget: cfg.optimizer.budget,
        evaluations: e1.evaluations + e2.evaluations + upper.evaluations + lower.evaluations,
        converged: upper.converged,
    })
}

fn sample_range_state<R: Rng + ?Sized>(range: &RangeBasis, shape: &FactorShape, rng: &mut R) -> StateVector {
    let c = complex_gaussian(range.rank(), 1, rng);
    StateVector::new(&range.vectors * c.column(0), shape.clone())
        .expect("sized")
        .normalized()
}

/// The antisymmetric states spanned by the columns of `m`, each normalized.
pub fn antisym_columns(m: &Matrix3<C64>) -> [AntisymState; 3] {
    let [a, b, c] = states_from_columns(m);
    [a.normalized(), b.normalized(), c.normalized()]
}
