//! Monotone window estimators for norms and inverse norms of indicators,
//! which are operators on ℤ or on a half-line.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::indicators::Indicator;
use crate::matrix::{FiniteMatrix, Interval};
use crate::operator::{BandOperator, Exponent, OperatorDomain};
use crate::scalar::{ExtReal, C64};
use crate::spectral::banded::BandedMatrix;
use crate::spectral::norms::{op_norm, singular_values};

/// Inverse norms above this are reported as `∞`.
pub const INVERSE_NORM_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: ExtReal,
    pub kind: EstimateKind,
    pub window_size: usize,
    pub converged: bool,
    pub tolerance_used: f64,
}

/// The `m` column indices of a window anchored at the operator's corner, or
/// `−m..m` on the full line.
pub fn anchored_columns(domain: OperatorDomain, m: usize) -> Interval {
    let m = m.max(1) as i64;
    match domain {
        OperatorDomain::FullLine => Interval { lo: -m, hi: m },
        OperatorDomain::HalfLinePlus(a) => Interval { lo: a, hi: a + m - 1 },
        OperatorDomain::HalfLineMinus(b) => Interval { lo: b - m + 1, hi: b },
    }
}

/// Columns of the anchored window with the rows extended by the bandwidth on
/// each open side; the tall window holds every nonzero of those columns.
pub fn tall_window(op: &BandOperator, m: usize) -> (Interval, Interval) {
    let cols = anchored_columns(op.domain(), m);
    let w = op.bandwidth();
    let rows = op
        .domain()
        .clip(Interval { lo: cols.lo - w, hi: cols.hi + w })
        .expect("columns lie in the domain");
    (rows, cols)
}

/// `ν_m`: the smallest singular value of the tall window of `op`. It is
/// nonincreasing in `m` and bounds `ν(op)` from above.
pub fn windowed_lower_norm(op: &BandOperator, m: usize) -> f64 {
    let (rows, cols) = tall_window(op, m);
    singular_values(op.materialize(rows, cols).data()).last().copied().unwrap_or(0.0)
}

/// `min(ν_m(op), ν_m(op*))`, an upper bound for `μ(op)`.
pub fn windowed_mu(op: &BandOperator, m: usize) -> f64 {
    windowed_lower_norm(op, m).min(windowed_lower_norm(&op.adjoint(), m))
}

/// Tall banded window of `op − λI`, kept separately so grids can reuse it.
#[derive(Debug, Clone)]
pub struct TallWindow {
    band: BandedMatrix,
    diagonal: Vec<(usize, usize)>,
}

impl TallWindow {
    pub fn new(op: &BandOperator, m: usize) -> Self {
        let (rows, cols) = tall_window(op, m);
        let dense = op.materialize(rows, cols);
        Self::from_matrix(&dense)
    }

    pub fn from_matrix(m: &FiniteMatrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        // make sure the band covers the diagonal positions that λ touches
        let mut data = m.data().clone();
        let diagonal: Vec<(usize, usize)> = cols
            .iter()
            .filter(|&j| rows.contains(j))
            .map(|j| ((j - rows.lo) as usize, (j - cols.lo) as usize))
            .collect();
        let marker = C64::new(f64::MIN_POSITIVE, 0.0);
        for &(r, c) in &diagonal {
            if data[(r, c)] == C64::new(0.0, 0.0) {
                data[(r, c)] = marker;
            }
        }
        let mut band = BandedMatrix::from_dense(&data);
        for &(r, c) in &diagonal {
            if band.get(r, c) == marker {
                band.set(r, c, C64::new(0.0, 0.0));
            }
        }
        Self { band, diagonal }
    }

    /// Smallest singular value of the window of `op − λI`.
    pub fn lower_norm_at(&self, lambda: C64) -> f64 {
        self.shifted(lambda).into_smallest_singular_value(1e-10)
    }

    /// Same, with a looser stopping rule for the inverse iteration.
    pub fn lower_norm_at_to(&self, lambda: C64, tol: f64) -> f64 {
        self.shifted(lambda).into_smallest_singular_value(tol)
    }

    fn shifted(&self, lambda: C64) -> BandedMatrix {
        let mut b = self.band.clone();
        for &(r, c) in &self.diagonal {
            b.add_at(r, c, -lambda);
        }
        b
    }
}

/// Both tall windows of an indicator, for `μ̂(B − λI)` at many `λ`.
#[derive(Debug, Clone)]
pub struct MuEstimator {
    direct: TallWindow,
    adjoint: TallWindow,
}

impl MuEstimator {
    pub fn new(op: &BandOperator, m: usize) -> Self {
        Self { direct: TallWindow::new(op, m), adjoint: TallWindow::new(&op.adjoint(), m) }
    }

    pub fn at(&self, lambda: C64) -> f64 {
        self.direct.lower_norm_at(lambda).min(self.adjoint.lower_norm_at(lambda.conj()))
    }

    pub fn at_to(&self, lambda: C64, tol: f64) -> f64 {
        self.direct.lower_norm_at_to(lambda, tol).min(self.adjoint.lower_norm_at_to(lambda.conj(), tol))
    }
}

fn start_window(op: &BandOperator) -> usize {
    let period = op.left_period().max(op.right_period()) as i64;
    (2 * (op.center_radius() + op.bandwidth() + period)).max(4) as usize
}

fn windows(op: &BandOperator, m_max: usize) -> Vec<usize> {
    let mut m = start_window(op).min(m_max.max(1));
    let mut out = vec![m];
    while m < m_max {
        m = (2 * m).min(m_max);
        out.push(m);
    }
    out
}

/// Exact `‖op‖` for `p ∈ {1, ∞}` from row or column sums over one period
/// beyond the irregular part.
fn exact_sum_norm(op: &BandOperator, p: Exponent) -> NormEstimate {
    let reach = op.center_radius() + op.bandwidth() + op.left_period().max(op.right_period()) as i64;
    let range = op.domain().clip(Interval { lo: -reach, hi: reach }).expect("nonempty range");
    let offsets: Vec<i64> = op.diagonals().keys().copied().collect();
    let value = range
        .iter()
        .map(|i| {
            offsets
                .iter()
                .map(|&k| match p {
                    Exponent::Inf => op.entry(i, i + k).norm(),
                    _ => op.entry(i - k, i).norm(),
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    NormEstimate {
        value: ExtReal::Finite(value),
        kind: EstimateKind::Exact,
        window_size: range.len(),
        converged: true,
        tolerance_used: 0.0,
    }
}

/// `‖B‖` for an indicator: exact for `p ∈ {1, ∞}`; for `p = 2` the norms of
/// anchored square windows, which grow monotonically towards `‖B‖`.
pub fn indicator_norm(ind: &Indicator, tol: f64, m_max: usize) -> NormEstimate {
    operator_norm_estimate(&ind.op, tol, m_max)
}

pub fn operator_norm_estimate(op: &BandOperator, tol: f64, m_max: usize) -> NormEstimate {
    match op.exponent() {
        Exponent::One | Exponent::Inf => exact_sum_norm(op, op.exponent()),
        Exponent::Two => {
            let mut prev: Option<f64> = None;
            let mut last = (0.0, 0, false);
            for m in windows(op, m_max) {
                let cols = anchored_columns(op.domain(), m);
                let v = op_norm(&op.materialize(cols, cols), Exponent::Two);
                let converged = prev.is_some_and(|p| (v - p).abs() <= tol * v.max(f64::MIN_POSITIVE));
                last = (v, cols.len(), converged || v == 0.0);
                if last.2 {
                    break;
                }
                prev = Some(v);
            }
            NormEstimate {
                value: ExtReal::Finite(last.0),
                kind: EstimateKind::LowerBound,
                window_size: last.1,
                converged: last.2,
                tolerance_used: tol,
            }
        }
    }
}

/// `‖B⁻¹‖ = 1/μ(B)` estimated from below by `1/min(ν_m, ν*_m)` over doubling
/// windows; `p = 2` only.
pub fn indicator_inv_norm(ind: &Indicator, tol: f64, m_max: usize) -> Result<NormEstimate> {
    operator_inv_norm_estimate(&ind.op, tol, m_max)
}

pub fn operator_inv_norm_estimate(op: &BandOperator, tol: f64, m_max: usize) -> Result<NormEstimate> {
    op.exponent().require_two("inverse norm estimate")?;
    let floor = 1.0 / INVERSE_NORM_CAP;
    let mut prev: Option<f64> = None;
    let mut last = (f64::INFINITY, 0, false);
    for m in windows(op, m_max) {
        let mu = windowed_mu(op, m);
        let size = anchored_columns(op.domain(), m).len();
        let converged = mu <= floor || prev.is_some_and(|p| (p - mu).abs() <= tol * mu);
        last = (mu, size, converged);
        if converged {
            break;
        }
        prev = Some(mu);
    }
    let value = if last.0 <= floor { ExtReal::Infinite } else { ExtReal::Finite(1.0 / last.0) };
    Ok(NormEstimate {
        value,
        kind: EstimateKind::LowerBound,
        window_size: last.1,
        converged: last.2,
        tolerance_used: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::indicators::{stab_composed, stab_pure, IndicatorKind};
    use crate::scalar::real;

    #[test]
    fn corner_block_norm_is_reached_immediately() {
        let s = stab_pure(&catalog::block_flip_operator(0.3)).unwrap();
        for ind in &s.members {
            let e = indicator_norm(ind, 1e-9, 200);
            assert!(e.converged);
            assert!((e.value.finite().unwrap() - 1.3).abs() < 1e-12, "{}", ind.label());
        }
    }

    #[test]
    fn free_jacobi_norm_approaches_two() {
        let s = stab_pure(&catalog::free_jacobi()).unwrap();
        let e = indicator_norm(s.center(), 1e-3, 256);
        assert_eq!(e.kind, EstimateKind::LowerBound);
        let v = e.value.finite().unwrap();
        assert!(v <= 2.0 && v > 1.99, "{v}");
    }

    #[test]
    fn h_has_inverse_norm_four() {
        let s = stab_composed(&catalog::kappa_a()).unwrap();
        let h = s
            .members
            .iter()
            .find(|m| m.kind == IndicatorKind::MinusCorner && m.appears_in(1))
            .unwrap();
        let e = indicator_inv_norm(h, 1e-9, 200).unwrap();
        assert!(e.converged);
        assert!((e.value.finite().unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn shift_corners_are_not_invertible() {
        let s = stab_composed(&catalog::laurent_shift()).unwrap();
        for ind in &s.members {
            let e = indicator_inv_norm(ind, 1e-9, 200).unwrap();
            match ind.kind {
                IndicatorKind::Center => assert!((e.value.finite().unwrap() - 1.0).abs() < 1e-12),
                _ => assert_eq!(e.value, ExtReal::Infinite, "{}", ind.label()),
            }
        }
    }

    #[test]
    fn exact_sums_for_p_one() {
        let l = BandOperator::laurent(&[(0, real(1.0)), (1, real(-0.5))], Exponent::One);
        let s = stab_pure(&l).unwrap();
        for ind in &s.members {
            let e = indicator_norm(ind, 1e-9, 10);
            assert_eq!(e.kind, EstimateKind::Exact);
            assert_eq!(e.value, ExtReal::Finite(1.5));
        }
        assert!(indicator_inv_norm(s.center(), 1e-9, 10).is_err());
    }

    #[test]
    fn banded_windows_agree_with_dense_ones() {
        let s = stab_pure(&catalog::block_flip_operator(0.3)).unwrap();
        for ind in &s.members {
            let est = MuEstimator::new(&ind.op, 12);
            for lambda in [C64::new(0.3, 0.0), C64::new(1.0, 0.2), C64::new(-0.5, -0.1)] {
                let dense = windowed_mu(&ind.op.shift_spectrum(lambda), 12);
                assert!((est.at(lambda) - dense).abs() < 1e-8, "{} at {lambda}", ind.label());
            }
        }
    }
}
