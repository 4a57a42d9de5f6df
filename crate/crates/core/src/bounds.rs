//! Polynomial lower bounds on `-z log2 z` and the entropy inequality
//! `E(psi') >= 2`, split as `sum_{1..3} >= 1` and `sum_{4..9} >= 1`.
//!
//! Logarithms are taken in nats and converted to bits once per quantity.
//!
//! The two bounds are
//!
//! * `-z log2 z >= log2(12) z` on `[0, 1/12]` (chord, tight at both ends);
//! * `-z log2 z >= 1/2 + ((ln 4 - 1)/ln 2)(z - 1/4) - 4 (z - 1/4)^2` on
//!   `[1/12, 1/3]` (tangent at `z = 1/4`).
//!
//! Applying the first to `l1 in [0, 1/12]` and the second to `l2, l3` and
//! using `l2 + l3 = 1/2 - l1`, `l2^2 + l3^2 = 1/8 - l1^2` gives
//!
//! ```text
//! sum_{1..3} -l log2 l >= 1 + ((ln 3 + 1)/ln 2 - 2) l1 + 4 l1^2 >= 1.
//! ```
//!
//! The last six eigenvalues are `p_ij / 4`, each twice, so
//! `sum_{4..9} -l log2 l = sum_ij (p_ij / 2)(2 - log2 p_ij) = 1 + H(p)/2`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::xi::{analytic_spectrum, simplex_grid, ProbabilityTriple};
use crate::{Error, Result};

const LN_2: f64 = core::f64::consts::LN_2;
const LN_3: f64 = 1.098_612_288_668_109_8;

/// Slack allowed on interval endpoints for arguments produced by roundoff.
pub const RANGE_SLACK: f64 = 1e-12;
/// Slack allowed on every inequality of the bound chain.
pub const CHAIN_SLACK: f64 = 1e-9;

pub const LINEAR_END: f64 = 1.0 / 12.0;
pub const QUADRATIC_END: f64 = 1.0 / 3.0;
pub const TANGENT_POINT: f64 = 0.25;

/// `log2 12`.
pub fn linear_slope() -> f64 {
    (LN_3 + 2.0 * LN_2) / LN_2
}

/// `(ln 4 - 1) / ln 2`.
pub fn quadratic_slope() -> f64 {
    (2.0 * LN_2 - 1.0) / LN_2
}

/// `1 / (8 ln 2)`, where `f''` vanishes.
pub fn inflection_point() -> f64 {
    1.0 / (8.0 * LN_2)
}

/// Coefficient of `l1` in the combined certificate, `(ln 3 + 1)/ln 2 - 2`.
pub fn certificate_slope() -> f64 {
    (LN_3 + 1.0) / LN_2 - 2.0
}

/// The variant coefficient `(ln 3 + 2)/ln 2 - 2`. The polynomial built
/// with it overshoots the true sum (for example at the uniform triple), so
/// it is not a lower bound; kept only for comparison.
pub fn overshooting_certificate_slope() -> f64 {
    (LN_3 + 2.0) / LN_2 - 2.0
}

/// `-z log2 z`, with `0 log 0 = 0`.
pub fn entropy_term(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        -z * z.ln() / LN_2
    }
}

fn check_range(z: f64, lo: f64, hi: f64) -> Result<()> {
    if z.is_finite() && z >= lo - RANGE_SLACK && z <= hi + RANGE_SLACK {
        Ok(())
    } else {
        Err(Error::OutOfRange { value: z, lo, hi })
    }
}

/// `log2(12) z` on `[0, 1/12]`.
pub fn linear_bound(z: f64) -> Result<f64> {
    check_range(z, 0.0, LINEAR_END)?;
    Ok(linear_slope() * z)
}

fn quadratic_unchecked(z: f64) -> f64 {
    let d = z - TANGENT_POINT;
    0.5 + quadratic_slope() * d - 4.0 * d * d
}

/// `1/2 + ((ln 4 - 1)/ln 2)(z - 1/4) - 4(z - 1/4)^2` on `[1/12, 1/3]`.
pub fn quadratic_bound(z: f64) -> Result<f64> {
    check_range(z, LINEAR_END, QUADRATIC_END)?;
    Ok(quadratic_unchecked(z))
}

/// `f(z) = -z log2 z - quadratic(z)`.
pub fn f(z: f64) -> f64 {
    entropy_term(z) - quadratic_unchecked(z)
}

pub fn f_prime(z: f64) -> f64 {
    -(z.ln() + 1.0) / LN_2 - quadratic_slope() + 8.0 * (z - TANGENT_POINT)
}

pub fn f_second(z: f64) -> f64 {
    8.0 - 1.0 / (z * LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FTableCheck {
    /// `f >= 0` on `[1/12, 1/3]`.
    Nonnegative,
    /// `f'' < 0` before the inflection point.
    ConcaveBeforeInflection,
    /// `f'' > 0` after the inflection point.
    ConvexAfterInflection,
    /// `f' <= 0` between the inflection point and `1/4`.
    DecreasingToTangent,
    /// `f' >= 0` on `(1/4, 1/3]`.
    IncreasingAfterTangent,
    /// `f(1/4) = f'(1/4) = 0`.
    Tangency,
    /// Located sign change of `f''` agrees with `1/(8 ln 2)`.
    InflectionLocation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FTableViolation {
    pub z: f64,
    pub check: FTableCheck,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FTableReport {
    pub points: usize,
    pub f_at_tangent: f64,
    pub f_prime_at_tangent: f64,
    /// Sign change of `f''` located by bisection.
    pub inflection_found: f64,
    pub inflection_expected: f64,
    pub min_f: f64,
    pub argmin_f: f64,
    pub violations: Vec<FTableViolation>,
}

impl FTableReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn bisect_sign_change(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) < 0.0) == (g_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Checks every cell of the increase/decrease table of `f` on a grid of
/// step `grid_step` over `[1/12, 1/3]` (right endpoint included).
pub fn verify_f_table(grid_step: f64) -> Result<FTableReport> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::OutOfRange {
            value: grid_step,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    const CELL_TOL: f64 = 1e-12;
    const TANGENCY_TOL: f64 = 1e-10;
    const INFLECTION_TOL: f64 = 1e-8;

    let z0 = inflection_point();
    let mut violations = Vec::new();
    let mut flag = |z: f64, check: FTableCheck, value: f64| {
        violations.push(FTableViolation { z, check, value });
    };

    let f_at_tangent = f(TANGENT_POINT);
    let f_prime_at_tangent = f_prime(TANGENT_POINT);
    if f_at_tangent.abs() > TANGENCY_TOL || f_prime_at_tangent.abs() > TANGENCY_TOL {
        flag(
            TANGENT_POINT,
            FTableCheck::Tangency,
            f_at_tangent.abs().max(f_prime_at_tangent.abs()),
        );
    }
    let inflection_found = bisect_sign_change(f_second, LINEAR_END, QUADRATIC_END);
    if (inflection_found - z0).abs() > INFLECTION_TOL || f_second(LINEAR_END) >= 0.0 || f_second(QUADRATIC_END) <= 0.0 {
        flag(inflection_found, FTableCheck::InflectionLocation, inflection_found - z0);
    }

    let steps = ((QUADRATIC_END - LINEAR_END) / grid_step).floor() as usize;
    let mut min_f = f64::INFINITY;
    let mut argmin_f = LINEAR_END;
    let mut points = 0;
    let grid = (0..=steps)
        .map(|k| LINEAR_END + k as f64 * grid_step)
        .filter(|&z| z < QUADRATIC_END)
        .chain(core::iter::once(QUADRATIC_END));
    for z in grid {
        points += 1;
        let fz = f(z);
        if fz < min_f {
            min_f = fz;
            argmin_f = z;
        }
        if fz < -CELL_TOL {
            flag(z, FTableCheck::Nonnegative, fz);
        }
        let f2 = f_second(z);
        if z < z0 - CELL_TOL && f2 >= 0.0 {
            flag(z, FTableCheck::ConcaveBeforeInflection, f2);
        }
        if z > z0 + CELL_TOL && f2 <= 0.0 {
            flag(z, FTableCheck::ConvexAfterInflection, f2);
        }
        let f1 = f_prime(z);
        if z > z0 && z < TANGENT_POINT && f1 > CELL_TOL {
            flag(z, FTableCheck::DecreasingToTangent, f1);
        }
        if z > TANGENT_POINT && f1 < -CELL_TOL {
            flag(z, FTableCheck::IncreasingAfterTangent, f1);
        }
    }
    Ok(FTableReport {
        points,
        f_at_tangent,
        f_prime_at_tangent,
        inflection_found,
        inflection_expected: z0,
        min_f,
        argmin_f,
        violations,
    })
}

/// `sum_{i=4..9} -l_i log2 l_i` for the eigenvalues `p_ij / 4` (each twice);
/// rejected if below 1 by more than [`CHAIN_SLACK`].
pub fn last6_bound(p: &ProbabilityTriple) -> Result<f64> {
    let sum = last6_sum(p);
    if sum < 1.0 - CHAIN_SLACK {
        return Err(Error::BoundViolated {
            what: "last-six entropy sum >= 1",
            margin: sum - 1.0,
        });
    }
    Ok(sum)
}

fn last6_sum(p: &ProbabilityTriple) -> f64 {
    p.as_array().iter().map(|&q| 2.0 * entropy_term(q / 4.0)).sum()
}

/// True sum of the cubic-block terms together with its polynomial lower
/// certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct First3Certificate {
    pub lambdas: [f64; 3],
    pub sum: f64,
    /// `1 + ((ln 3 + 1)/ln 2 - 2) l1 + 4 l1^2`.
    pub certificate: f64,
    /// `entropy_term(l_k) - bound(l_k)` per root.
    pub slacks: [f64; 3],
}

impl First3Certificate {
    /// The same polynomial with the variant coefficient; see
    /// [`overshooting_certificate_slope`].
    pub fn overshooting_certificate(&self) -> f64 {
        let l1 = self.lambdas[0];
        1.0 + overshooting_certificate_slope() * l1 + 4.0 * l1 * l1
    }
}

pub fn first3_bound(p: &ProbabilityTriple) -> Result<First3Certificate> {
    let c = first3_unchecked(p)?;
    if c.sum < c.certificate - CHAIN_SLACK {
        return Err(Error::BoundViolated {
            what: "first-three sum >= certificate",
            margin: c.sum - c.certificate,
        });
    }
    if c.certificate < 1.0 - CHAIN_SLACK {
        return Err(Error::BoundViolated {
            what: "certificate >= 1",
            margin: c.certificate - 1.0,
        });
    }
    Ok(c)
}

fn first3_unchecked(p: &ProbabilityTriple) -> Result<First3Certificate> {
    let lambdas = analytic_spectrum(p)?.cardan.roots;
    let [l1, l2, l3] = lambdas;
    let sum = lambdas.iter().map(|&l| entropy_term(l)).sum();
    let certificate = 1.0 + certificate_slope() * l1 + 4.0 * l1 * l1;
    let slacks = [
        entropy_term(l1) - linear_bound(l1)?,
        entropy_term(l2) - quadratic_bound(l2)?,
        entropy_term(l3) - quadratic_bound(l3)?,
    ];
    Ok(First3Certificate {
        lambdas,
        sum,
        certificate,
        slacks,
    })
}

/// Entropy of `psi'` with the split sums and every intermediate quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub p: ProbabilityTriple,
    pub lambdas: [f64; 9],
    pub sum_first3: f64,
    pub sum_last6: f64,
    pub total: f64,
    pub margin_first3: f64,
    pub margin_last6: f64,
    pub certificate: f64,
    pub slacks: [f64; 3],
}

/// `E(|psi'><psi'|) = sum_{i=1..9} -l_i log2 l_i`, rejected if any link of
/// the chain fails by more than [`CHAIN_SLACK`].
pub fn entanglement_of_psi_prime(p: &ProbabilityTriple) -> Result<BoundReport> {
    let report = bound_report_unchecked(p)?;
    if report.slacks.iter().any(|&s| s < -CHAIN_SLACK) {
        return Err(Error::BoundViolated {
            what: "pointwise polynomial bound",
            margin: report.slacks.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }
    first3_bound(p)?;
    last6_bound(p)?;
    if report.total < 2.0 - CHAIN_SLACK {
        return Err(Error::BoundViolated {
            what: "total entropy >= 2",
            margin: report.total - 2.0,
        });
    }
    Ok(report)
}

/// Same quantities as [`entanglement_of_psi_prime`] without asserting the
/// chain; used by scans that report margins instead of failing.
pub fn bound_report_unchecked(p: &ProbabilityTriple) -> Result<BoundReport> {
    let spectrum = analytic_spectrum(p)?;
    let first = first3_unchecked(p)?;
    let sum_last6 = last6_sum(p);
    Ok(BoundReport {
        p: *p,
        lambdas: spectrum.values,
        sum_first3: first.sum,
        sum_last6,
        total: first.sum + sum_last6,
        margin_first3: first.sum - 1.0,
        margin_last6: sum_last6 - 1.0,
        certificate: first.certificate,
        slacks: first.slacks,
    })
}

/// Which bound applies at `z` on `[0, 1/3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundPiece {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub z: f64,
    pub entropy: f64,
    pub bound: f64,
    pub slack: f64,
    pub piece: BoundPiece,
}

/// The curve `-z log2 z` against its bound at `z = k / n`, `k = 0..=n/3`.
/// The linear piece is used while `12 k <= n`.
pub fn bound_curve(n: usize) -> Vec<CurveRow> {
    (0..=n / 3)
        .map(|k| {
            let z = k as f64 / n as f64;
            let (piece, bound) = if 12 * k <= n {
                (BoundPiece::Linear, linear_slope() * z)
            } else {
                (BoundPiece::Quadratic, quadratic_unchecked(z))
            };
            let entropy = entropy_term(z);
            CurveRow {
                z,
                entropy,
                bound,
                slack: entropy - bound,
                piece,
            }
        })
        .collect()
}

/// Minimum of the pointwise slacks of one bound over `[lo, hi]` at `step`
/// (both endpoints included). Returns `(min_slack, argmin, points)`.
pub fn min_slack_on(piece: BoundPiece, step: f64) -> Result<(f64, f64, usize)> {
    let (lo, hi, bound): (f64, f64, fn(f64) -> Result<f64>) = match piece {
        BoundPiece::Linear => (0.0, LINEAR_END, linear_bound),
        BoundPiece::Quadratic => (LINEAR_END, QUADRATIC_END, quadratic_bound),
    };
    let steps = ((hi - lo) / step).floor() as usize;
    let mut best = (f64::INFINITY, lo, 0);
    let grid = (0..=steps)
        .map(|k| lo + k as f64 * step)
        .filter(|&z| z < hi)
        .chain(core::iter::once(hi));
    for z in grid {
        let slack = entropy_term(z) - bound(z)?;
        best.2 += 1;
        if slack < best.0 {
            best.0 = slack;
            best.1 = z;
        }
    }
    Ok(best)
}

/// Min-reductions of the bound chain over the simplex grid of step `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexScan {
    pub points: usize,
    pub min_first3: (f64, ProbabilityTriple),
    pub min_last6: (f64, ProbabilityTriple),
    pub min_total: (f64, ProbabilityTriple),
    pub min_certificate: (f64, ProbabilityTriple),
    /// Smallest `sum_first3 - certificate`.
    pub min_certificate_gap: (f64, ProbabilityTriple),
    pub min_pointwise_slack: (f64, ProbabilityTriple),
    /// Grid points with `total <= 2 + CHAIN_SLACK`.
    pub equality_points: Vec<ProbabilityTriple>,
}

impl SimplexScan {
    /// Every link of the chain holds and equality occurs exactly at the
    /// three vertices.
    pub fn passed(&self) -> bool {
        self.min_first3.0 >= 1.0 - CHAIN_SLACK
            && self.min_last6.0 >= 1.0 - CHAIN_SLACK
            && self.min_total.0 >= 2.0 - CHAIN_SLACK
            && self.min_certificate.0 >= 1.0 - CHAIN_SLACK
            && self.min_certificate_gap.0 >= -CHAIN_SLACK
            && self.min_pointwise_slack.0 >= -CHAIN_SLACK
            && self.equality_points.len() == 3
            && self.equality_points.iter().all(ProbabilityTriple::is_vertex)
    }
}

pub fn scan_simplex(n: usize) -> Result<SimplexScan> {
    let first = ProbabilityTriple::from_composition(n, 0, 0);
    let init = (f64::INFINITY, first);
    let mut scan = SimplexScan {
        points: 0,
        min_first3: init,
        min_last6: init,
        min_total: init,
        min_certificate: init,
        min_certificate_gap: init,
        min_pointwise_slack: init,
        equality_points: Vec::new(),
    };
    let update = |slot: &mut (f64, ProbabilityTriple), v: f64, p: ProbabilityTriple| {
        if v < slot.0 {
            *slot = (v, p);
        }
    };
    for (i, j, k) in simplex_grid(n) {
        let p = ProbabilityTriple::from_composition(i, j, k);
        let r = bound_report_unchecked(&p)?;
        scan.points += 1;
        update(&mut scan.min_first3, r.sum_first3, p);
        update(&mut scan.min_last6, r.sum_last6, p);
        update(&mut scan.min_total, r.total, p);
        update(&mut scan.min_certificate, r.certificate, p);
        update(&mut scan.min_certificate_gap, r.sum_first3 - r.certificate, p);
        let slack = r.slacks.iter().copied().fold(f64::INFINITY, f64::min);
        update(&mut scan.min_pointwise_slack, slack, p);
        if r.total <= 2.0 + CHAIN_SLACK {
            scan.equality_points.push(p);
        }
    }
    Ok(scan)
}
