//! Reference operators and finite-section sequences with known asymptotics.

use crate::expression::FSExpression;
use crate::operator::{BandOperator, Exponent, OperatorDomain};
use crate::scalar::{real, ONE, ZERO};

pub type Block = [[f64; 2]; 2];

pub const D_BLOCK: Block = [[2.0, 1.0], [0.0, 0.5]];
pub const E_BLOCK: Block = [[2.0, 0.0], [-1.0, 0.5]];
pub const DE_BLOCK: Block = [[3.0, 0.5], [-0.5, 0.25]];

/// `‖DE‖₂ = ‖(DE)⁻¹‖₂ = (11 + √185)/8`.
pub fn de_norm() -> f64 {
    (11.0 + 185f64.sqrt()) / 8.0
}

/// Where the 2×2 blocks sit along the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLayout {
    /// A single entry at the origin, blocks `{2j−1, 2j}` to the right and
    /// `{−2j, −2j+1}` to the left.
    Centered,
    /// Blocks `{2j, 2j+1}` for all `j ∈ ℤ`.
    Aligned,
}

impl BlockLayout {
    /// Position (0 or 1) of `i` inside its block, or `None` for the origin
    /// of a centered layout.
    fn slot(self, i: i64) -> Option<i64> {
        match self {
            BlockLayout::Centered if i == 0 => None,
            BlockLayout::Centered if i > 0 => Some((i - 1).rem_euclid(2)),
            BlockLayout::Centered => Some(i.rem_euclid(2)),
            BlockLayout::Aligned => Some(i.rem_euclid(2)),
        }
    }
}

/// `diag(…, M, M, c, M, M, …)` or `diag(…, M, M, …)` on ℤ.
pub fn block_diagonal(block: Block, center: f64, layout: BlockLayout) -> BandOperator {
    BandOperator::from_entry_fn(
        &[-1, 0, 1],
        -2,
        2,
        2,
        2,
        OperatorDomain::FullLine,
        Exponent::Two,
        |i, j| match (layout.slot(i), layout.slot(j)) {
            (None, None) => real(center),
            (Some(a), Some(b)) if i - a == j - b => real(block[a as usize][b as usize]),
            _ => ZERO,
        },
    )
    .expect("periods are positive")
}

pub fn block_flip_operator(mu: f64) -> BandOperator {
    block_diagonal([[mu, 1.0], [1.0, mu]], 1.0, BlockLayout::Centered)
}

/// Pure finite sections of the block flip with parameter `mu`.
pub fn block_flip(mu: f64) -> FSExpression {
    FSExpression::leaf("F", block_flip_operator(mu))
}

/// Product of the sections of two block operators, both with a single 1 at
/// the origin.
pub fn kappa_a() -> FSExpression {
    FSExpression::Product(vec![
        FSExpression::leaf("B", block_diagonal(D_BLOCK, 1.0, BlockLayout::Centered)),
        FSExpression::leaf("C", block_diagonal(E_BLOCK, 1.0, BlockLayout::Centered)),
    ])
}

/// Same as [`kappa_a`] with blocks aligned on `{2j, 2j+1}` and no defect.
pub fn kappa_b() -> FSExpression {
    FSExpression::Product(vec![
        FSExpression::leaf("B", block_diagonal(D_BLOCK, 0.0, BlockLayout::Aligned)),
        FSExpression::leaf("C", block_diagonal(E_BLOCK, 0.0, BlockLayout::Aligned)),
    ])
}

pub fn identity_operator() -> BandOperator {
    BandOperator::identity(OperatorDomain::FullLine, Exponent::Two)
}

pub fn identity() -> FSExpression {
    FSExpression::leaf("I", identity_operator())
}

/// Sections of `F + 2I` with the block flip at `mu = 0`.
pub fn shifted_flip() -> FSExpression {
    FSExpression::Sum(vec![
        block_flip(0.0),
        FSExpression::scale(real(2.0), identity()),
    ])
}

/// Pure sections of the forward shift `S₁` (ones on the subdiagonal).
pub fn laurent_shift() -> FSExpression {
    FSExpression::leaf("S", BandOperator::shift(1, OperatorDomain::FullLine, Exponent::Two))
}

/// `(P_n S₁ P_n)(P_n S₋₁ P_n) + 2 P_n`, an element of the algebra generated
/// by sections of Laurent operators whose sections are diagonal.
pub fn laurent_fs() -> FSExpression {
    let s = |k| BandOperator::shift(k, OperatorDomain::FullLine, Exponent::Two);
    FSExpression::Sum(vec![
        FSExpression::Product(vec![FSExpression::leaf("S", s(1)), FSExpression::leaf("T", s(-1))]),
        FSExpression::scale(real(2.0), identity()),
    ])
}

/// Laurent operator with symbol `a₋₁ = a₁ = 1`.
pub fn free_jacobi() -> BandOperator {
    BandOperator::laurent(&[(-1, ONE), (1, ONE)], Exponent::Two)
}
