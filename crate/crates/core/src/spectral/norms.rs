//! Norms, lower norms and inverse norms of finite matrices.

use nalgebra::DMatrix;

use crate::error::{FsaError, Result};
use crate::matrix::FiniteMatrix;
use crate::operator::Exponent;
use crate::scalar::{ExtReal, C64};

/// A matrix is treated as singular when its smallest singular value, or its
/// smallest LU pivot, falls below this fraction of its scale.
pub const SINGULARITY_THRESHOLD: f64 = 1e-13;

pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn max_col_sum(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn max_row_sum(m: &DMatrix<C64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn dense_norm(m: &DMatrix<C64>, p: Exponent) -> f64 {
    match p {
        Exponent::One => max_col_sum(m),
        Exponent::Inf => max_row_sum(m),
        Exponent::Two => singular_values(m).first().copied().unwrap_or(0.0),
    }
}

/// Induced operator norm on ℓ^p.
pub fn op_norm(m: &FiniteMatrix, p: Exponent) -> f64 {
    dense_norm(m.data(), p)
}

/// `ν(M) = inf_{‖x‖=1} ‖Mx‖`, the smallest singular value for tall or square
/// windows and 0 for wide ones.
pub fn lower_norm(m: &FiniteMatrix, p: Exponent) -> Result<f64> {
    p.require_two("lower norm")?;
    if m.nrows() < m.ncols() {
        return Ok(0.0);
    }
    Ok(singular_values(m.data()).last().copied().unwrap_or(0.0))
}

fn require_square(m: &FiniteMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(FsaError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

/// `μ(M) = min(ν(M), ν(M*))`.
pub fn mu(m: &FiniteMatrix, p: Exponent) -> Result<f64> {
    require_square(m)?;
    let a = lower_norm(m, p)?;
    let b = lower_norm(&m.adjoint(), p)?;
    Ok(a.min(b))
}

/// `‖M⁻¹‖`, or `∞` when `M` is numerically singular.
pub fn inv_norm(m: &FiniteMatrix, p: Exponent) -> Result<ExtReal> {
    require_square(m)?;
    if m.nrows() == 0 {
        return Ok(ExtReal::Finite(0.0));
    }
    match p {
        Exponent::Two => {
            let s = singular_values(m.data());
            let (max, min) = (s[0], s[s.len() - 1]);
            if max == 0.0 || min <= SINGULARITY_THRESHOLD * max {
                Ok(ExtReal::Infinite)
            } else {
                Ok(ExtReal::Finite(1.0 / min))
            }
        }
        Exponent::One | Exponent::Inf => {
            let scale = m.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lu = m.data().clone().lu();
            let min_pivot = lu.u().diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            if scale == 0.0 || min_pivot < SINGULARITY_THRESHOLD * scale {
                return Ok(ExtReal::Infinite);
            }
            match lu.try_inverse() {
                Some(inv) => Ok(ExtReal::Finite(dense_norm(&inv, p))),
                None => Ok(ExtReal::Infinite),
            }
        }
    }
}

/// `κ(M) = ‖M‖·‖M⁻¹‖`.
pub fn kappa(m: &FiniteMatrix, p: Exponent) -> Result<ExtReal> {
    Ok(ExtReal::Finite(op_norm(m, p)).mul(inv_norm(m, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Interval;
    use crate::scalar::{real, ZERO};

    fn mat(rows: &[&[f64]]) -> FiniteMatrix {
        let n = rows.len() as i64;
        let w = Interval::new(0, n - 1).unwrap();
        let c = Interval::new(0, rows[0].len() as i64 - 1).unwrap();
        FiniteMatrix::from_fn(w, c, |i, j| real(rows[i as usize][j as usize]))
    }

    #[test]
    fn flip_block() {
        let b = mat(&[&[0.3, 1.0], &[1.0, 0.3]]);
        assert!((op_norm(&b, Exponent::Two) - 1.3).abs() < 1e-14);
        assert!((lower_norm(&b, Exponent::Two).unwrap() - 0.7).abs() < 1e-14);
        assert!((op_norm(&b, Exponent::One) - 1.3).abs() < 1e-14);
        assert!(lower_norm(&b, Exponent::One).is_err());
    }

    #[test]
    fn de_block_norms() {
        let de = mat(&[&[3.0, 0.5], &[-0.5, 0.25]]);
        let n = (11.0 + 185f64.sqrt()) / 8.0;
        assert!((op_norm(&de, Exponent::Two) - n).abs() < 1e-12);
        let inv = inv_norm(&de, Exponent::Two).unwrap().finite().unwrap();
        assert!((inv - n).abs() < 1e-12);
    }

    #[test]
    fn singular_and_trivial_cases() {
        let shift = mat(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(lower_norm(&shift, Exponent::Two).unwrap(), 0.0);
        assert_eq!(inv_norm(&shift, Exponent::Two).unwrap(), ExtReal::Infinite);
        assert_eq!(inv_norm(&shift, Exponent::One).unwrap(), ExtReal::Infinite);
        assert_eq!(kappa(&shift, Exponent::Inf).unwrap(), ExtReal::Infinite);
        let zero = FiniteMatrix::zeros(Interval::centered(2), Interval::centered(2));
        assert_eq!(op_norm(&zero, Exponent::Two), 0.0);
        assert_eq!(zero.get(0, 0), ZERO);
        let id = FiniteMatrix::identity(Interval::centered(3));
        assert_eq!(kappa(&id, Exponent::Two).unwrap(), ExtReal::Finite(1.0));
        assert!((lower_norm(&id, Exponent::Two).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wide_windows_have_zero_lower_norm() {
        let w = mat(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(lower_norm(&w, Exponent::Two).unwrap(), 0.0);
        assert!(mu(&w, Exponent::Two).is_err());
    }

    #[test]
    fn one_norm_of_the_inverse() {
        let a = mat(&[&[1.0, 0.0], &[-0.5, 1.0]]);
        // inverse [[1, 0], [0.5, 1]]
        assert_eq!(inv_norm(&a, Exponent::One).unwrap(), ExtReal::Finite(1.5));
        assert_eq!(inv_norm(&a, Exponent::Inf).unwrap(), ExtReal::Finite(1.5));
    }
}
