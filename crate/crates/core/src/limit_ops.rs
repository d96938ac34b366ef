//! Limit operators of eventually-periodic band operators, obtained by tail
//! extraction and phase alignment.
//!
//! Residue convention: for `Plus`, member `r` is the limit of `S_{−h} A S_h`
//! along `h = kρ + r`, so its diagonals are the right tails read at `i + r`.
//! For `Minus`, member `r` is the limit along `h = −(kρ + r)`, with the left
//! tails read at `i − r`. In both cases `r` is the residue of the section
//! index `n` whose corner the member describes.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{FsaError, Result};
use crate::operator::{BandOperator, OperatorDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Plus,
    Minus,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Plus => write!(f, "+"),
            Direction::Minus => write!(f, "-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitOperatorSet {
    pub direction: Direction,
    pub modulus: u64,
    pub members: BTreeMap<u64, BandOperator>,
}

impl LimitOperatorSet {
    pub fn member(&self, r: u64) -> &BandOperator {
        &self.members[&(r % self.modulus)]
    }
}

fn require_full_line(op: &BandOperator) -> Result<()> {
    if op.domain() != OperatorDomain::FullLine {
        return Err(FsaError::NotFullLine(op.domain().to_string()));
    }
    Ok(())
}

fn tail_period(op: &BandOperator, dir: Direction) -> u64 {
    match dir {
        Direction::Plus => op.right_period(),
        Direction::Minus => op.left_period(),
    }
}

/// The limit of `S_{−h} A S_h` along `h = ±(k·modulus + residue)`.
pub fn limit_along(op: &BandOperator, modulus: u64, residue: u64, dir: Direction) -> Result<BandOperator> {
    require_full_line(op)?;
    if modulus == 0 {
        return Err(FsaError::ZeroModulus);
    }
    let period = tail_period(op, dir);
    if modulus % period != 0 {
        return Err(FsaError::IncompatibleModulus { modulus, period });
    }
    let r = (residue % modulus) as i64;
    let diags = op.diagonals().iter().map(|(&k, s)| {
        let d = match dir {
            Direction::Plus => s.right_tail().shifted(r),
            Direction::Minus => s.left_tail().shifted(-r),
        };
        (k, d)
    });
    Ok(BandOperator::new(diags, OperatorDomain::FullLine, op.exponent()))
}

fn limit_set(op: &BandOperator, dir: Direction) -> Result<LimitOperatorSet> {
    require_full_line(op)?;
    let modulus = tail_period(op, dir);
    let members = (0..modulus)
        .map(|r| limit_along(op, modulus, r, dir).map(|m| (r, m)))
        .collect::<Result<_>>()?;
    Ok(LimitOperatorSet { direction: dir, modulus, members })
}

/// Limit operators at `+∞`, one per residue modulo the right tail period.
pub fn limit_plus(op: &BandOperator) -> Result<LimitOperatorSet> {
    limit_set(op, Direction::Plus)
}

/// Limit operators at `−∞`, one per residue modulo the left tail period.
pub fn limit_minus(op: &BandOperator) -> Result<LimitOperatorSet> {
    limit_set(op, Direction::Minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matrix::Interval;
    use crate::operator::Exponent;
    use crate::scalar::{real, ONE, ZERO};

    #[test]
    fn laurent_operators_are_their_own_limits() {
        let l = catalog::free_jacobi();
        let plus = limit_plus(&l).unwrap();
        assert_eq!(plus.modulus, 1);
        assert!(plus.member(0).approx_eq(&l, 1e-12));
        assert!(limit_minus(&l).unwrap().member(0).approx_eq(&l, 1e-12));
        assert!(limit_along(&l, 1, 0, Direction::Plus).unwrap().approx_eq(&l, 1e-12));
    }

    #[test]
    fn flip_members_match_far_translates() {
        let f = catalog::block_flip_operator(0.3);
        let plus = limit_plus(&f).unwrap();
        assert_eq!(plus.modulus, 2);
        let w = Interval::new(-6, 6).unwrap();
        for h in [10i64, 11] {
            let translate = f.shift_conjugate(h).materialize(w, w);
            let member = plus.member(h as u64).materialize(w, w);
            assert_eq!(translate.max_abs_diff(&member), 0.0, "h = {h}");
        }
        let minus = limit_minus(&f).unwrap();
        for h in [10i64, 11] {
            let translate = f.shift_conjugate(-h).materialize(w, w);
            let member = minus.member(h as u64).materialize(w, w);
            assert_eq!(translate.max_abs_diff(&member), 0.0, "h = -{h}");
        }
    }

    #[test]
    fn even_plus_limit_compresses_to_the_lower_right_blocks() {
        let f = catalog::block_flip_operator(0.3);
        let m = limit_along(&f, 2, 0, Direction::Plus).unwrap();
        let c = m.compress(OperatorDomain::HalfLineMinus(0)).unwrap();
        assert_eq!(c.entry(0, 0), real(0.3));
        assert_eq!(c.entry(-1, 0), ONE);
        assert_eq!(c.entry(-2, -1), ZERO);
        let even_minus = limit_along(&f, 2, 0, Direction::Minus).unwrap();
        let c = even_minus.compress(OperatorDomain::HalfLinePlus(0)).unwrap();
        assert_eq!(c.entry(0, 1), ONE);
        assert_eq!(c.entry(1, 2), ZERO);
    }

    #[test]
    fn refining_the_modulus_keeps_the_residue_class() {
        let f = catalog::block_flip_operator(0.3);
        let a = limit_along(&f, 4, 1, Direction::Plus).unwrap();
        let b = limit_along(&f, 2, 1, Direction::Plus).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
        assert!(matches!(
            limit_along(&f, 3, 1, Direction::Plus),
            Err(FsaError::IncompatibleModulus { .. })
        ));
        assert!(matches!(limit_along(&f, 0, 0, Direction::Plus), Err(FsaError::ZeroModulus)));
    }

    #[test]
    fn vanishing_tail_gives_the_zero_operator() {
        let e = catalog::identity_operator().compress(OperatorDomain::HalfLineMinus(3)).unwrap();
        let e = BandOperator::new(e.diagonals().clone(), OperatorDomain::FullLine, Exponent::Two);
        assert!(limit_plus(&e).unwrap().member(0).is_zero());
        let m = limit_minus(&e).unwrap();
        assert!(m.member(0).approx_eq(&catalog::identity_operator(), 1e-12));
    }
}
