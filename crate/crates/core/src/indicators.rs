//! Stability indicators of composed finite-section sequences.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FsaError, Result};
use crate::expression::FSExpression;
use crate::limit_ops::{limit_along, Direction};
use crate::operator::{BandOperator, OperatorDomain};
use crate::scalar::{C64, STRUCTURAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    /// The strong limit of `Aₙ`, on ℤ.
    Center,
    /// Limit of `S_{−n} Aₙ S_n`: the lower right corner, on `..0`.
    PlusCorner,
    /// Limit of `S_n Aₙ S_{−n}`: the upper left corner, on `0..`.
    MinusCorner,
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IndicatorKind::Center => "center",
            IndicatorKind::PlusCorner => "plus_corner",
            IndicatorKind::MinusCorner => "minus_corner",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Indicator {
    pub op: BandOperator,
    pub kind: IndicatorKind,
    /// Residues of `n` modulo the set's modulus along which this indicator
    /// arises; `None` means every residue.
    pub residues: Option<Vec<u64>>,
    /// One line per leaf substitution, kept from before deduplication.
    pub provenance: Vec<String>,
}

impl Indicator {
    pub fn appears_in(&self, r: u64) -> bool {
        self.residues.as_ref().is_none_or(|rs| rs.contains(&r))
    }

    pub fn residue_label(&self) -> String {
        match &self.residues {
            None => "all".into(),
            Some(rs) => rs.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
        }
    }

    /// A short name such as `plus_corner[r=1]`.
    pub fn label(&self) -> String {
        match self.kind {
            IndicatorKind::Center => "center".into(),
            _ => format!("{}[r={}]", self.kind, self.residue_label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSet {
    pub members: Vec<Indicator>,
    pub modulus: u64,
}

impl IndicatorSet {
    pub fn center(&self) -> &Indicator {
        self.members.iter().find(|m| m.kind == IndicatorKind::Center).expect("center member")
    }

    /// The indicators along `n ≡ r (mod modulus)`.
    pub fn by_residue(&self, r: u64) -> Vec<&Indicator> {
        let r = r % self.modulus;
        self.members.iter().filter(|m| m.appears_in(r)).collect()
    }

    pub fn residue_classes(&self) -> BTreeMap<u64, Vec<&Indicator>> {
        (0..self.modulus).map(|r| (r, self.by_residue(r))).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether every member of `self` has a structurally equal member of the
    /// same kind in `other`.
    pub fn is_subset_of(&self, other: &IndicatorSet) -> bool {
        self.members.iter().all(|m| {
            other.members.iter().any(|o| o.kind == m.kind && o.op.approx_eq(&m.op, STRUCTURAL_TOL))
        })
    }

    /// Structural equality of members, kinds and residues, in order.
    pub fn approx_eq(&self, other: &IndicatorSet, tol: f64) -> bool {
        self.modulus == other.modulus
            && self.members.len() == other.members.len()
            && self.members.iter().zip(&other.members).all(|(a, b)| {
                a.kind == b.kind && a.residues == b.residues && a.op.approx_eq(&b.op, tol)
            })
    }
}

struct Candidate {
    op: BandOperator,
    kind: IndicatorKind,
    residue: Option<u64>,
    provenance: Vec<String>,
}

fn corner(expr: &FSExpression, modulus: u64, r: u64, dir: Direction) -> Result<Candidate> {
    let domain = match dir {
        Direction::Plus => OperatorDomain::HalfLineMinus(0),
        Direction::Minus => OperatorDomain::HalfLinePlus(0),
    };
    let op = expr.eval_with(&|_, b| limit_along(b, modulus, r, dir)?.compress(domain))?;
    let provenance = expr
        .leaves()
        .iter()
        .map(|(name, _)| format!("{name} -> P Lim{dir}[h = {r} mod {modulus}] P on {domain}"))
        .collect();
    let kind = match dir {
        Direction::Plus => IndicatorKind::PlusCorner,
        Direction::Minus => IndicatorKind::MinusCorner,
    };
    Ok(Candidate { op, kind, residue: Some(r), provenance })
}

fn assemble(candidates: Vec<Candidate>, modulus: u64) -> IndicatorSet {
    let mut members: Vec<Indicator> = Vec::new();
    for c in candidates {
        let existing = members
            .iter_mut()
            .find(|m| m.kind == c.kind && m.op.approx_eq(&c.op, STRUCTURAL_TOL));
        match existing {
            Some(m) => {
                if let (Some(rs), Some(r)) = (m.residues.as_mut(), c.residue) {
                    if !rs.contains(&r) {
                        rs.push(r);
                        rs.sort_unstable();
                    }
                }
                m.provenance.extend(c.provenance);
            }
            None => members.push(Indicator {
                op: c.op,
                kind: c.kind,
                residues: c.residue.map(|r| vec![r]),
                provenance: c.provenance,
            }),
        }
    }
    IndicatorSet { members, modulus }
}

fn center(expr: &FSExpression) -> Result<Candidate> {
    Ok(Candidate {
        op: expr.pointwise_limit()?,
        kind: IndicatorKind::Center,
        residue: None,
        provenance: vec!["pointwise limit".into()],
    })
}

/// `Stab(Aₙ)`: the strong limit plus, for every residue modulo the common
/// period, the two corner limits with the same residue substituted into every
/// leaf.
pub fn stab_composed(expr: &FSExpression) -> Result<IndicatorSet> {
    expr.validate()?;
    let modulus = expr.common_modulus();
    let mut candidates = vec![center(expr)?];
    for dir in [Direction::Plus, Direction::Minus] {
        for r in 0..modulus {
            candidates.push(corner(expr, modulus, r, dir)?);
        }
    }
    Ok(assemble(candidates, modulus))
}

/// `Stab(P_n A P_n)`.
pub fn stab_pure(op: &BandOperator) -> Result<IndicatorSet> {
    stab_composed(&FSExpression::leaf("A", op.clone()))
}

/// The indicators along `n = k·modulus + residue`.
pub fn stab_h(expr: &FSExpression, modulus: u64, residue: u64) -> Result<IndicatorSet> {
    expr.validate()?;
    if modulus == 0 {
        return Err(FsaError::ZeroModulus);
    }
    let period = expr.common_modulus();
    if modulus % period != 0 {
        return Err(FsaError::IncompatibleModulus { modulus, period });
    }
    let r = residue % modulus;
    let candidates = vec![
        center(expr)?,
        corner(expr, modulus, r, Direction::Plus)?,
        corner(expr, modulus, r, Direction::Minus)?,
    ];
    Ok(assemble(candidates, modulus))
}

/// `B − λI` for every member, with `I` the identity on the member's domain.
pub fn stab_shifted(set: &IndicatorSet, lambda: C64) -> IndicatorSet {
    let members = set
        .members
        .iter()
        .map(|m| Indicator { op: m.op.shift_spectrum(lambda), ..m.clone() })
        .collect();
    IndicatorSet { members, modulus: set.modulus }
}
