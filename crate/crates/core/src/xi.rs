//! The normal-form two-copy state `psi' = sum sqrt(p_ij) |i,j> (x) |i,j>`,
//! its reduced matrix `Xi` on `A1 (x) A2`, and the analytic spectrum of `Xi`.
//!
//! Four-factor states here use the factor order `A1, A2, B1, B2` unless a
//! function says otherwise.

use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix3};
#[allow(unused_imports)]
use num_traits::Float;

use crate::antisym::embed_two_copy;
use crate::tensor::{self, DensityMatrix, FactorShape, StateVector};
use crate::{Error, Result, C64};

/// Reorders `A1, B1, A2, B2` into `A1, A2, B1, B2` (and back: it is an
/// involution).
pub const TWO_COPY_TO_AB: [usize; 4] = [0, 2, 1, 3];

const SUM_TOL: f64 = 1e-12;
const ZERO_CUTOFF: f64 = 1e-15;

/// Schmidt weights `(p23, p31, p12)` of the normal-form state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityTriple {
    p23: f64,
    p31: f64,
    p12: f64,
}

impl ProbabilityTriple {
    /// Entries must be nonnegative (values in `[-1e-15, 0)` are snapped to
    /// 0) and sum to 1 within `1e-12`.
    pub fn new(p23: f64, p31: f64, p12: f64) -> Result<Self> {
        let bad = || Error::InvalidTriple { p23, p31, p12 };
        let snap = |p: f64| {
            if !p.is_finite() || p < -ZERO_CUTOFF {
                Err(bad())
            } else {
                Ok(p.max(0.0))
            }
        };
        let t = ProbabilityTriple {
            p23: snap(p23)?,
            p31: snap(p31)?,
            p12: snap(p12)?,
        };
        if (t.p23 + t.p31 + t.p12 - 1.0).abs() > SUM_TOL {
            return Err(bad());
        }
        Ok(t)
    }

    /// `(i/n, j/n, k/n)` with `n = i + j + k > 0`.
    pub fn from_composition(i: usize, j: usize, k: usize) -> Self {
        let n = (i + j + k) as f64;
        assert!(n > 0.0, "empty composition");
        ProbabilityTriple {
            p23: i as f64 / n,
            p31: j as f64 / n,
            p12: k as f64 / n,
        }
    }

    pub fn p23(&self) -> f64 {
        self.p23
    }

    pub fn p31(&self) -> f64 {
        self.p31
    }

    pub fn p12(&self) -> f64 {
        self.p12
    }

    /// `p13 = p31`.
    pub fn p13(&self) -> f64 {
        self.p31
    }

    /// `[p23, p31, p12]`, the wedge basis order.
    pub fn as_array(&self) -> [f64; 3] {
        [self.p23, self.p31, self.p12]
    }

    /// `p_ij` for zero-based `i != j`, symmetric in its arguments.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (1, 2) => self.p23,
            (0, 2) => self.p31,
            (0, 1) => self.p12,
            _ => panic!("pair({i}, {j}) is not an off-diagonal index pair"),
        }
    }

    /// Shannon entropy of the triple in bits.
    pub fn shannon_bits(&self) -> f64 {
        tensor::entropy_bits_clipped(&self.as_array(), 0.0)
    }

    pub fn is_vertex(&self) -> bool {
        self.as_array().contains(&1.0)
    }
}

/// Integer compositions `(i, j, k)` of `n`, i.e. the simplex grid of step
/// `1/n`, in lexicographic order of `(i, j)`.
pub fn simplex_grid(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..=n).flat_map(move |i| (0..=n - i).map(move |j| (i, j, n - i - j)))
}

/// Number of points of [`simplex_grid`].
pub fn simplex_grid_len(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Converts a grid step into an integer division count, rejecting steps
/// outside `(0, 0.1]` or whose reciprocal is not an integer (within `1e-9`).
pub fn grid_divisions(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::OutOfRange {
            value: step,
            lo: 0.0,
            hi: 0.1,
        });
    }
    let n = (1.0 / step).round();
    if ((1.0 / step) - n).abs() > 1e-9 * n {
        return Err(Error::OutOfRange {
            value: step,
            lo: 1.0 / n,
            hi: 1.0 / n,
        });
    }
    Ok(n as usize)
}

fn sqrt_product(a: f64, b: f64) -> f64 {
    if a < ZERO_CUTOFF || b < ZERO_CUTOFF {
        0.0
    } else {
        (a * b).sqrt()
    }
}

fn abcd_index(a: usize, b: usize, c: usize, d: usize) -> usize {
    27 * a + 9 * b + 3 * c + d
}

/// The normal-form state on `A1, A2, B1, B2`, from the expansion
/// `(1/2) sum_{i != j} sqrt(p_ij) (|ii;jj> - |ij;ji>)`.
pub fn build_psi_prime(p: &ProbabilityTriple) -> StateVector {
    let mut amps = alloc::vec![C64::new(0.0, 0.0); 81];
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            let a = 0.5 * p.pair(i, j).sqrt();
            amps[abcd_index(i, i, j, j)] += a;
            amps[abcd_index(i, j, j, i)] -= a;
        }
    }
    StateVector::from_vec(amps, &[3, 3, 3, 3]).expect("81 amplitudes")
}

/// The normal-form state as `sum_k sqrt(p_k) |w_k> (x) |w_k>` on
/// `A1, B1, A2, B2`.
pub fn psi_prime_two_copy(p: &ProbabilityTriple) -> StateVector {
    let [a, b, c] = p.as_array().map(|x| C64::new(x.sqrt(), 0.0));
    let zero = C64::new(0.0, 0.0);
    embed_two_copy(&Matrix3::new(a, zero, zero, zero, b, zero, zero, zero, c))
}

/// The 3x3 block of `Xi` on `span{|11>, |22>, |33>}`.
#[rustfmt::skip]
pub fn xi_block(p: &ProbabilityTriple) -> Matrix3<f64> {
    let (p12, p13, p23) = (p.p12, p.p31, p.p23);
    let off12 = sqrt_product(p13, p23);
    let off13 = sqrt_product(p12, p23);
    let off23 = sqrt_product(p12, p13);
    Matrix3::new(
        p12 + p13, off12, off13,
        off12, p12 + p23, off23,
        off13, off23, p13 + p23,
    ) * 0.25
}

/// `Xi` on `A1 (x) A2` assembled from the direct-sum form: the 3x3 block on
/// `|ii>` plus `p_ij / 4` on each `|ij>`, `i != j`.
pub fn build_xi(p: &ProbabilityTriple) -> DensityMatrix {
    let block = xi_block(p);
    let mut m = DMatrix::<C64>::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            m[(4 * i, 4 * j)] = C64::new(block[(i, j)], 0.0);
            if i != j {
                m[(3 * i + j, 3 * i + j)] = C64::new(p.pair(i, j) / 4.0, 0.0);
            }
        }
    }
    DensityMatrix::from_parts_unchecked(m, FactorShape::new([3usize, 3]).unwrap()).expect("9x9")
}

/// `Xi` by the generic route: `|psi'><psi'|` traced over `B1, B2`.
pub fn xi_by_partial_trace(p: &ProbabilityTriple) -> DensityMatrix {
    let rho = DensityMatrix::from_pure(&build_psi_prime(p));
    tensor::partial_trace(&rho, &[0, 1]).expect("keep A1, A2")
}

/// Monic cubic `l^3 + a1 l^2 + a2 l + a3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicForm {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl CubicForm {
    pub fn eval(&self, x: f64) -> f64 {
        ((x + self.a1) * x + self.a2) * x + self.a3
    }
}

/// Characteristic polynomial of the `Xi` block:
/// `g(l) = l^3 - l^2/2 + l/16 - p12 p13 p23 / 16`.
pub fn characteristic_cubic(p: &ProbabilityTriple) -> CubicForm {
    CubicForm {
        a1: -0.5,
        a2: 1.0 / 16.0,
        a3: -(p.p12 * p.p31 * p.p23) / 16.0,
    }
}

/// Roots `alpha + beta cos(theta + 2 pi k / 3)`, `k = 0, 1, 2`, with
/// `theta` in `[0, pi/3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardanRoots {
    pub roots: [f64; 3],
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Trigonometric solution of a cubic with three real roots.
///
/// With `l = alpha + y`, `alpha = -a1/3`, the depressed cubic is
/// `y^3 + P y + Q`. Writing `y = beta cos(theta)`, `beta = -2 sqrt(-P/3)`,
/// turns it into `cos(3 theta) = Q / (2 (-P/3)^(3/2))`.
pub fn cardan_roots(c: &CubicForm) -> Result<CardanRoots> {
    let alpha = -c.a1 / 3.0;
    let p = c.a2 - c.a1 * c.a1 / 3.0;
    let q = 2.0 * c.a1 * c.a1 * c.a1 / 27.0 - c.a1 * c.a2 / 3.0 + c.a3;
    if p > 0.0 {
        return Err(Error::NotIrreducible { cos3theta: f64::NAN });
    }
    let m = (-p / 3.0).sqrt();
    let cos3 = if m == 0.0 {
        if q.abs() > 1e-15 {
            return Err(Error::NotIrreducible {
                cos3theta: f64::INFINITY,
            });
        }
        1.0
    } else {
        q / (2.0 * m * m * m)
    };
    if cos3.is_nan() || cos3.abs() > 1.0 + 1e-9 {
        return Err(Error::NotIrreducible { cos3theta: cos3 });
    }
    let theta = cos3.clamp(-1.0, 1.0).acos() / 3.0;
    let beta = -2.0 * m;
    let third = 2.0 * core::f64::consts::FRAC_PI_3;
    let roots = [0.0, 1.0, 2.0].map(|k| alpha + beta * (theta + k * third).cos());
    Ok(CardanRoots {
        roots,
        theta,
        alpha,
        beta,
    })
}

/// The nine eigenvalues of `Xi` in the order
/// `(l1, l2, l3, p12/4, p12/4, p13/4, p13/4, p23/4, p23/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumResult {
    pub values: [f64; 9],
    pub theta: f64,
    pub cubic: CubicForm,
    pub cardan: CardanRoots,
}

impl SpectrumResult {
    /// Values sorted in descending order.
    pub fn sorted(&self) -> [f64; 9] {
        let mut v = self.values;
        v.sort_unstable_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn entropy_bits(&self, clip: f64) -> f64 {
        tensor::entropy_bits_clipped(&self.values, clip)
    }

    pub fn cubic_block(&self) -> [f64; 3] {
        self.cardan.roots
    }
}

pub fn analytic_spectrum(p: &ProbabilityTriple) -> Result<SpectrumResult> {
    let cubic = characteristic_cubic(p);
    let cardan = cardan_roots(&cubic)?;
    let [l1, l2, l3] = cardan.roots;
    let (q12, q13, q23) = (p.p12 / 4.0, p.p31 / 4.0, p.p23 / 4.0);
    Ok(SpectrumResult {
        values: [l1, l2, l3, q12, q12, q13, q13, q23, q23],
        theta: cardan.theta,
        cubic,
        cardan,
    })
}

/// Largest `|a_i - b_i|` after sorting both lists descending.
pub fn multiset_deviation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets of different size");
    let sort = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_unstable_by(|x, y| y.total_cmp(x));
        v
    };
    sort(a)
        .iter()
        .zip(sort(b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Analytic spectrum checked against the numeric spectrum of the
/// partial-trace route.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCheck {
    pub triple: ProbabilityTriple,
    pub analytic: SpectrumResult,
    pub numeric: Vec<f64>,
    pub max_deviation: f64,
    /// `max_k |g(l_k)|`.
    pub max_residual: f64,
}

pub fn check_spectrum(p: &ProbabilityTriple) -> Result<SpectrumCheck> {
    let analytic = analytic_spectrum(p)?;
    let numeric = tensor::hermitian_spectrum(xi_by_partial_trace(p).entries(), 1e-10)?;
    let max_deviation = multiset_deviation(&analytic.values, &numeric);
    let max_residual = analytic
        .cardan
        .roots
        .iter()
        .map(|&l| analytic.cubic.eval(l).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumCheck {
        triple: *p,
        analytic,
        numeric,
        max_deviation,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{hermitian_spectrum, permute_factors};
    use approx::assert_abs_diff_eq;

    fn third() -> ProbabilityTriple {
        ProbabilityTriple::from_composition(1, 1, 1)
    }

    fn vertex() -> ProbabilityTriple {
        ProbabilityTriple::new(1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn triple_validation() {
        assert!(ProbabilityTriple::new(0.5, 0.5, 0.0).is_ok());
        assert!(ProbabilityTriple::new(0.5, 0.6, 0.0).is_err());
        assert!(ProbabilityTriple::new(1.1, -0.1, 0.0).is_err());
        assert!(ProbabilityTriple::new(f64::NAN, 0.5, 0.5).is_err());
        let snapped = ProbabilityTriple::new(1.0, -1e-16, 0.0).unwrap();
        assert_eq!(snapped.p31(), 0.0);
    }

    #[test]
    fn grid_counts() {
        assert_eq!(simplex_grid(20).count(), 231);
        assert_eq!(simplex_grid_len(200), 20_301);
        assert_eq!(simplex_grid(200).count(), 20_301);
        assert_eq!(grid_divisions(0.05).unwrap(), 20);
        assert_eq!(grid_divisions(0.005).unwrap(), 200);
        assert!(grid_divisions(0.0).is_err());
        assert!(grid_divisions(0.2).is_err());
        assert!(grid_divisions(0.03).is_err());
        assert!(simplex_grid(7).all(|(i, j, k)| i + j + k == 7));
    }

    #[test]
    fn psi_prime_at_vertex() {
        let psi = build_psi_prime(&vertex());
        // (1/2)(|22;33> - |23;32> - |32;23> + |33;22>), zero-based digits.
        let expect = [
            (abcd_index(1, 1, 2, 2), 0.5),
            (abcd_index(1, 2, 2, 1), -0.5),
            (abcd_index(2, 1, 1, 2), -0.5),
            (abcd_index(2, 2, 1, 1), 0.5),
        ];
        let nonzero: Vec<_> = psi
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .collect();
        assert_eq!(nonzero.len(), 4);
        for (idx, v) in expect {
            assert_abs_diff_eq!(psi.as_slice()[idx].re, v, epsilon = 1e-15);
        }
    }

    #[test]
    fn psi_prime_uniform_has_12_equal_amplitudes() {
        let psi = build_psi_prime(&third());
        let nonzero: Vec<f64> = psi.as_slice().iter().map(|a| a.norm()).filter(|&a| a > 1e-15).collect();
        assert_eq!(nonzero.len(), 12);
        let expected = 1.0 / (2.0 * 3f64.sqrt());
        assert!(nonzero.iter().all(|a| (a - expected).abs() < 1e-15));
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn psi_prime_matches_wedge_route_and_is_antisymmetric() {
        for (i, j, k) in simplex_grid(6) {
            let p = ProbabilityTriple::from_composition(i, j, k);
            let direct = build_psi_prime(&p);
            let via = permute_factors(&psi_prime_two_copy(&p), &TWO_COPY_TO_AB).unwrap();
            assert!((direct.amplitudes() - via.amplitudes()).norm() < 1e-14);
            // Swap A1 <-> B1 (factors 0 and 2 in A1 A2 B1 B2 order).
            let swapped = permute_factors(&direct, &[2, 1, 0, 3]).unwrap();
            assert!((swapped.amplitudes() + direct.amplitudes()).norm() < 1e-15);
        }
    }

    #[test]
    fn xi_matches_partial_trace() {
        for (i, j, k) in simplex_grid(10) {
            let p = ProbabilityTriple::from_composition(i, j, k);
            let a = build_xi(&p);
            let b = xi_by_partial_trace(&p);
            assert!((a.entries() - b.entries()).camax() < 1e-12);
            a.validate(&crate::Tolerances::default()).unwrap();
        }
    }

    #[test]
    fn xi_spectra_of_reference_triples() {
        let s = hermitian_spectrum(build_xi(&vertex()).entries(), 1e-12).unwrap();
        let expected = [0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!(multiset_deviation(&s, &expected) < 1e-14);

        // Block = (1/12) J_3 + (1/12) I_3 at p uniform: eigenvalues 1/3, 1/12, 1/12.
        let block = hermitian_spectrum(
            &DMatrix::from_fn(3, 3, |i, j| C64::new(xi_block(&third())[(i, j)], 0.0)),
            1e-12,
        )
        .unwrap();
        assert!(multiset_deviation(&block, &[1.0 / 3.0, 1.0 / 12.0, 1.0 / 12.0]) < 1e-14);
    }

    #[test]
    fn cubic_coefficients_and_roots() {
        let g = characteristic_cubic(&vertex());
        assert_eq!((g.a1, g.a2, g.a3), (-0.5, 1.0 / 16.0, 0.0));
        let r = cardan_roots(&g).unwrap();
        assert_abs_diff_eq!(r.theta, 0.0, epsilon = 1e-15);
        assert!(multiset_deviation(&r.roots, &[0.0, 0.25, 0.25]) < 1e-15);

        let g = characteristic_cubic(&third());
        assert_abs_diff_eq!(g.a3, -1.0 / 432.0, epsilon = 1e-18);
        for l in [1.0 / 3.0, 1.0 / 12.0] {
            assert!(g.eval(l).abs() < 1e-16);
        }
        let r = cardan_roots(&g).unwrap();
        assert_abs_diff_eq!(r.theta, core::f64::consts::FRAC_PI_3, epsilon = 1e-7);
        assert_abs_diff_eq!(r.roots[0], 1.0 / 12.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.roots[1], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.roots[2], 1.0 / 12.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.alpha, 1.0 / 6.0, epsilon = 1e-16);
        assert_abs_diff_eq!(r.beta, -1.0 / 6.0, epsilon = 1e-16);
    }

    #[test]
    fn cardan_rejects_complex_roots() {
        // l^3 + l has a complex pair.
        let c = CubicForm {
            a1: 0.0,
            a2: 1.0,
            a3: 0.0,
        };
        assert!(matches!(cardan_roots(&c), Err(Error::NotIrreducible { .. })));
        // (l - 1)^3 + 1 = l^3 - 3l^2 + 3l: one real root.
        let c = CubicForm {
            a1: -3.0,
            a2: 3.0,
            a3: 0.0,
        };
        assert!(matches!(cardan_roots(&c), Err(Error::NotIrreducible { .. })));
    }

    #[test]
    fn cardan_on_generic_cubic() {
        // (l - 1)(l - 2)(l + 4) = l^3 + l^2 - 10 l + 8.
        let c = CubicForm {
            a1: 1.0,
            a2: -10.0,
            a3: 8.0,
        };
        let r = cardan_roots(&c).unwrap();
        assert!(multiset_deviation(&r.roots, &[1.0, 2.0, -4.0]) < 1e-12);
    }

    #[test]
    fn analytic_spectrum_reference_values() {
        let s = analytic_spectrum(&vertex()).unwrap();
        let expected = [0.0, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25, 0.25];
        for (a, b) in s.values.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let s = analytic_spectrum(&third()).unwrap();
        let t = 1.0 / 12.0;
        let expected = [t, 1.0 / 3.0, t, t, t, t, t, t, t];
        for (a, b) in s.values.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(s.values.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn spectrum_check_on_coarse_grid() {
        for (i, j, k) in simplex_grid(12) {
            let c = check_spectrum(&ProbabilityTriple::from_composition(i, j, k)).unwrap();
            assert!(c.max_deviation < 1e-10, "{c:?}");
            assert!(c.max_residual < 1e-12);
            let [l1, l2, l3] = c.analytic.cardan.roots;
            assert!(l1 <= 1.0 / 12.0 + 1e-12);
            assert!((1.0 / 12.0 - 1e-12..=1.0 / 3.0 + 1e-12).contains(&l2));
            assert!((1.0 / 12.0 - 1e-12..=1.0 / 3.0 + 1e-12).contains(&l3));
        }
    }
}
