//! Composed finite-section sequences as finite sum/product trees over pure
//! finite-section leaves.

use num_integer::Integer;

use crate::error::{FsaError, Result};
use crate::matrix::{FiniteMatrix, Interval};
use crate::operator::{BandOperator, Exponent, OperatorDomain, DEFAULT_BANDWIDTH_CAP};
use crate::scalar::C64;

/// Section index `n ≥ 1`; the window is `−n..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectionIndex(u64);

impl SectionIndex {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(FsaError::SectionIndex(n));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn window(self) -> Interval {
        Interval::centered(self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FSExpression {
    Leaf { name: String, op: BandOperator },
    Sum(Vec<FSExpression>),
    Product(Vec<FSExpression>),
    Scale(C64, Box<FSExpression>),
}

impl FSExpression {
    pub fn leaf(name: impl Into<String>, op: BandOperator) -> Self {
        FSExpression::Leaf { name: name.into(), op }
    }

    pub fn scale(alpha: C64, child: FSExpression) -> Self {
        FSExpression::Scale(alpha, Box::new(child))
    }

    /// The expression for `Aₙ − λIₙ`.
    pub fn minus_lambda(&self, lambda: C64) -> Result<Self> {
        let p = self.validate()?;
        let id = BandOperator::identity(OperatorDomain::FullLine, p);
        Ok(FSExpression::Sum(vec![self.clone(), Self::scale(-lambda, Self::leaf("I", id))]))
    }

    pub fn leaves(&self) -> Vec<(&str, &BandOperator)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a str, &'a BandOperator)>) {
        match self {
            FSExpression::Leaf { name, op } => out.push((name, op)),
            FSExpression::Sum(c) | FSExpression::Product(c) => {
                c.iter().for_each(|e| e.collect_leaves(out))
            }
            FSExpression::Scale(_, c) => c.collect_leaves(out),
        }
    }

    /// Checks the tree is well formed and returns the common exponent.
    pub fn validate(&self) -> Result<Exponent> {
        self.check_nodes()?;
        let leaves = self.leaves();
        let p = leaves[0].1.exponent();
        for (name, op) in &leaves {
            if op.domain() != OperatorDomain::FullLine {
                return Err(FsaError::NotFullLine(format!("leaf '{name}' lives on {}", op.domain())));
            }
            if op.exponent() != p {
                return Err(FsaError::ExponentMismatch(p.to_string(), op.exponent().to_string()));
            }
        }
        Ok(p)
    }

    fn check_nodes(&self) -> Result<()> {
        match self {
            FSExpression::Leaf { .. } => Ok(()),
            FSExpression::Sum(c) if c.is_empty() => Err(FsaError::EmptyExpression("sum")),
            FSExpression::Product(c) if c.is_empty() => Err(FsaError::EmptyExpression("product")),
            FSExpression::Sum(c) | FSExpression::Product(c) => c.iter().try_for_each(Self::check_nodes),
            FSExpression::Scale(_, c) => c.check_nodes(),
        }
    }

    pub fn exponent(&self) -> Result<Exponent> {
        self.validate()
    }

    /// lcm of all left and right tail periods over all leaves.
    pub fn common_modulus(&self) -> u64 {
        self.leaves()
            .iter()
            .fold(1, |acc, (_, op)| acc.lcm(&op.right_period()).lcm(&op.left_period()))
    }

    /// Largest center radius and total bandwidth over the leaves; a crude
    /// bound on where the sequence is in its periodic regime.
    pub fn irregularity_radius(&self) -> i64 {
        let leaves = self.leaves();
        let center = leaves.iter().map(|(_, op)| op.center_radius()).max().unwrap_or(0);
        let band: i64 = leaves.iter().map(|(_, op)| op.bandwidth()).sum();
        center + band
    }

    /// `Aₙ`: every leaf replaced by its window `P_n B P_n`, then summed,
    /// multiplied left to right and scaled.
    pub fn finite_section(&self, n: SectionIndex) -> Result<FiniteMatrix> {
        self.validate()?;
        Ok(self.section_unchecked(n.window()))
    }

    fn section_unchecked(&self, w: Interval) -> FiniteMatrix {
        match self {
            FSExpression::Leaf { op, .. } => op.materialize(w, w),
            FSExpression::Sum(c) => c[1..].iter().fold(c[0].section_unchecked(w), |acc, e| {
                acc.add(&e.section_unchecked(w)).expect("same window")
            }),
            FSExpression::Product(c) => c[1..].iter().fold(c[0].section_unchecked(w), |acc, e| {
                acc.matmul(&e.section_unchecked(w)).expect("same window")
            }),
            FSExpression::Scale(a, c) => c.section_unchecked(w).scale(*a),
        }
    }

    /// The strong limit of `Aₙ`: the tree evaluated on the operators themselves.
    pub fn pointwise_limit(&self) -> Result<BandOperator> {
        self.validate()?;
        self.eval_with(&|_, op| Ok(op.clone()))
    }

    /// Evaluates the tree after substituting every leaf by `subst(name, op)`.
    pub fn eval_with<F>(&self, subst: &F) -> Result<BandOperator>
    where
        F: Fn(&str, &BandOperator) -> Result<BandOperator>,
    {
        match self {
            FSExpression::Leaf { name, op } => subst(name, op),
            FSExpression::Sum(c) => {
                let first = c.first().ok_or(FsaError::EmptyExpression("sum"))?.eval_with(subst)?;
                c[1..].iter().try_fold(first, |acc, e| acc.add(&e.eval_with(subst)?))
            }
            FSExpression::Product(c) => {
                let first =
                    c.first().ok_or(FsaError::EmptyExpression("product"))?.eval_with(subst)?;
                c[1..]
                    .iter()
                    .try_fold(first, |acc, e| band_product(&acc, &e.eval_with(subst)?))
            }
            FSExpression::Scale(a, c) => Ok(c.eval_with(subst)?.scale(*a)),
        }
    }
}

/// Symbolic product of two band operators with the default bandwidth cap.
pub fn band_product(a: &BandOperator, b: &BandOperator) -> Result<BandOperator> {
    a.product(b, DEFAULT_BANDWIDTH_CAP)
}

/// Sum of a list of expressions, shorthand for tests and configs.
pub fn sum(children: Vec<FSExpression>) -> FSExpression {
    FSExpression::Sum(children)
}

pub fn product(factors: Vec<FSExpression>) -> FSExpression {
    FSExpression::Product(factors)
}

impl From<BandOperator> for FSExpression {
    fn from(op: BandOperator) -> Self {
        FSExpression::leaf("A", op)
    }
}
