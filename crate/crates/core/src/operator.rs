//! Band operators with eventually-periodic diagonals on ℤ or on a half-line.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{FsaError, Result};
use crate::matrix::{FiniteMatrix, Interval};
use crate::scalar::{C64, ONE, STRUCTURAL_TOL, ZERO};
use crate::sequence::EventuallyPeriodicSequence;

/// Products whose bandwidth would exceed this are rejected.
pub const DEFAULT_BANDWIDTH_CAP: i64 = 64;

/// Index set of an operator: ℤ, `a..` or `..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorDomain {
    FullLine,
    HalfLinePlus(i64),
    HalfLineMinus(i64),
}

impl OperatorDomain {
    pub fn contains(&self, i: i64) -> bool {
        match *self {
            OperatorDomain::FullLine => true,
            OperatorDomain::HalfLinePlus(a) => i >= a,
            OperatorDomain::HalfLineMinus(b) => i <= b,
        }
    }

    pub fn translate(&self, k: i64) -> Self {
        match *self {
            OperatorDomain::FullLine => OperatorDomain::FullLine,
            OperatorDomain::HalfLinePlus(a) => OperatorDomain::HalfLinePlus(a + k),
            OperatorDomain::HalfLineMinus(b) => OperatorDomain::HalfLineMinus(b + k),
        }
    }

    /// Intersection of the domain with an interval, if nonempty.
    pub fn clip(&self, w: Interval) -> Option<Interval> {
        let (lo, hi) = match *self {
            OperatorDomain::FullLine => (w.lo, w.hi),
            OperatorDomain::HalfLinePlus(a) => (w.lo.max(a), w.hi),
            OperatorDomain::HalfLineMinus(b) => (w.lo, w.hi.min(b)),
        };
        Interval::new(lo, hi).ok()
    }
}

impl fmt::Display for OperatorDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorDomain::FullLine => write!(f, "Z"),
            OperatorDomain::HalfLinePlus(a) => write!(f, "{a}.."),
            OperatorDomain::HalfLineMinus(b) => write!(f, "..{b}"),
        }
    }
}

/// The `p` of the ℓ^p space norms are measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    One,
    Two,
    Inf,
}

impl Exponent {
    /// Dual exponent `q` with `1/p + 1/q = 1`.
    pub fn dual(self) -> Self {
        match self {
            Exponent::One => Exponent::Inf,
            Exponent::Two => Exponent::Two,
            Exponent::Inf => Exponent::One,
        }
    }

    pub fn require_two(self, what: &str) -> Result<()> {
        if self == Exponent::Two {
            Ok(())
        } else {
            Err(FsaError::UnsupportedExponent(format!("{what} requires p = 2, got p = {self}")))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::One => write!(f, "1"),
            Exponent::Two => write!(f, "2"),
            Exponent::Inf => write!(f, "inf"),
        }
    }
}

/// A band operator: diagonal `k` holds `i ↦ A_{i,i+k}`.
///
/// Entries outside `domain × domain` are masked to zero on construction and
/// identically vanishing diagonals are dropped, so two operators with the same
/// entries have the same representation up to tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct BandOperator {
    diagonals: BTreeMap<i64, EventuallyPeriodicSequence>,
    domain: OperatorDomain,
    p: Exponent,
}

fn mask(seq: &EventuallyPeriodicSequence, k: i64, domain: OperatorDomain) -> EventuallyPeriodicSequence {
    match domain {
        OperatorDomain::FullLine => seq.clone(),
        OperatorDomain::HalfLinePlus(a) => seq.restrict_from(a.max(a - k)),
        OperatorDomain::HalfLineMinus(b) => seq.restrict_to(b.min(b - k)),
    }
}

impl BandOperator {
    pub fn new<I>(diagonals: I, domain: OperatorDomain, p: Exponent) -> Self
    where
        I: IntoIterator<Item = (i64, EventuallyPeriodicSequence)>,
    {
        let mut map: BTreeMap<i64, EventuallyPeriodicSequence> = BTreeMap::new();
        for (k, seq) in diagonals {
            let seq = mask(&seq, k, domain);
            let merged = match map.remove(&k) {
                Some(prev) => prev.add(&seq),
                None => seq,
            };
            map.insert(k, merged);
        }
        map.retain(|_, s| !s.is_zero(STRUCTURAL_TOL));
        Self { diagonals: map, domain, p }
    }

    pub fn zero(domain: OperatorDomain, p: Exponent) -> Self {
        Self { diagonals: BTreeMap::new(), domain, p }
    }

    pub fn identity(domain: OperatorDomain, p: Exponent) -> Self {
        Self::new([(0, EventuallyPeriodicSequence::constant(ONE))], domain, p)
    }

    /// Multiple of the identity.
    pub fn scalar(c: C64, domain: OperatorDomain, p: Exponent) -> Self {
        Self::new([(0, EventuallyPeriodicSequence::constant(c))], domain, p)
    }

    /// The shift `S_k` with `(S_k x)_{i+k} = x_i`, i.e. ones on diagonal `−k`.
    pub fn shift(k: i64, domain: OperatorDomain, p: Exponent) -> Self {
        Self::new([(-k, EventuallyPeriodicSequence::constant(ONE))], domain, p)
    }

    /// Operator on ℤ with constant diagonals `a_k`, entry `(i, j) = a_{i−j}`.
    pub fn laurent(symbol: &[(i64, C64)], p: Exponent) -> Self {
        Self::new(
            symbol.iter().map(|&(k, a)| (-k, EventuallyPeriodicSequence::constant(a))),
            OperatorDomain::FullLine,
            p,
        )
    }

    /// Builds the operator with entries `f(i, j)` on the given offsets. The
    /// caller guarantees that `f(i, i+k)` is `left_period`-periodic in `i`
    /// below `lo` and `right_period`-periodic from `hi` on.
    pub fn from_entry_fn<F: Fn(i64, i64) -> C64>(
        offsets: &[i64],
        lo: i64,
        hi: i64,
        left_period: usize,
        right_period: usize,
        domain: OperatorDomain,
        p: Exponent,
        f: F,
    ) -> Result<Self> {
        let mut diags = Vec::with_capacity(offsets.len());
        for &k in offsets {
            let s = EventuallyPeriodicSequence::from_fn(lo, hi, left_period, right_period, |i| f(i, i + k))?;
            diags.push((k, s));
        }
        Ok(Self::new(diags, domain, p))
    }

    pub fn diagonals(&self) -> &BTreeMap<i64, EventuallyPeriodicSequence> {
        &self.diagonals
    }

    pub fn diagonal(&self, k: i64) -> Option<&EventuallyPeriodicSequence> {
        self.diagonals.get(&k)
    }

    pub fn domain(&self) -> OperatorDomain {
        self.domain
    }

    pub fn exponent(&self) -> Exponent {
        self.p
    }

    pub fn with_exponent(&self, p: Exponent) -> Self {
        Self { p, ..self.clone() }
    }

    /// Propagation `max |k|` over stored offsets.
    pub fn bandwidth(&self) -> i64 {
        self.diagonals.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.diagonals.is_empty()
    }

    /// lcm of the right tail periods over all diagonals.
    pub fn right_period(&self) -> u64 {
        self.diagonals.values().fold(1, |acc, s| acc.lcm(&(s.right_period() as u64)))
    }

    /// lcm of the left tail periods over all diagonals.
    pub fn left_period(&self) -> u64 {
        self.diagonals.values().fold(1, |acc, s| acc.lcm(&(s.left_period() as u64)))
    }

    /// Smallest `r ≥ 0` such that every diagonal is in its periodic regime
    /// outside `−r..r`, counting the domain boundary as an irregularity.
    pub fn center_radius(&self) -> i64 {
        let mut r = match self.domain {
            OperatorDomain::FullLine => 0,
            OperatorDomain::HalfLinePlus(a) => a.abs(),
            OperatorDomain::HalfLineMinus(b) => b.abs(),
        };
        for s in self.diagonals.values() {
            let (lo, hi) = s.aperiodic_range();
            if lo < hi {
                r = r.max(lo.abs()).max((hi - 1).abs());
            }
        }
        r
    }

    pub fn entry(&self, i: i64, j: i64) -> C64 {
        if !self.domain.contains(i) || !self.domain.contains(j) {
            return ZERO;
        }
        self.diagonals.get(&(j - i)).map_or(ZERO, |s| s.get(i))
    }

    pub fn materialize(&self, rows: Interval, cols: Interval) -> FiniteMatrix {
        let mut data = FiniteMatrix::zeros(rows, cols).into_data();
        for (&k, s) in &self.diagonals {
            for i in rows.iter() {
                let j = i + k;
                if cols.contains(j) && self.domain.contains(i) && self.domain.contains(j) {
                    data[((i - rows.lo) as usize, (j - cols.lo) as usize)] = s.get(i);
                }
            }
        }
        FiniteMatrix::new(rows, cols, data).expect("window shape")
    }

    /// Square window `−n..n`.
    pub fn section(&self, n: u64) -> FiniteMatrix {
        let w = Interval::centered(n);
        self.materialize(w, w)
    }

    /// Conjugate transpose; the exponent moves to its dual.
    pub fn adjoint(&self) -> Self {
        let diags = self.diagonals.iter().map(|(&k, s)| (-k, s.shifted(-k).conj()));
        Self::new(diags, self.domain, self.p.dual())
    }

    /// `S_{−k} A S_k`, with entries `(i, j) ↦ A_{i+k, j+k}`.
    pub fn shift_conjugate(&self, k: i64) -> Self {
        let diags = self.diagonals.iter().map(|(&o, s)| (o, s.shifted(k)));
        Self::new(diags, self.domain.translate(-k), self.p)
    }

    /// Restriction to `domain × domain`.
    pub fn compress(&self, domain: OperatorDomain) -> Result<Self> {
        let ok = match (self.domain, domain) {
            (OperatorDomain::FullLine, _) => true,
            (OperatorDomain::HalfLinePlus(a), OperatorDomain::HalfLinePlus(a2)) => a2 >= a,
            (OperatorDomain::HalfLineMinus(b), OperatorDomain::HalfLineMinus(b2)) => b2 <= b,
            _ => false,
        };
        if !ok {
            return Err(FsaError::IncompatibleCompression {
                from: self.domain.to_string(),
                to: domain.to_string(),
            });
        }
        Ok(Self::new(self.diagonals.clone(), domain, self.p))
    }

    /// Extension of an operator on `1..` to ℤ by `c` times the identity on `..0`.
    pub fn semiinfinite_embed(&self, c: C64) -> Result<Self> {
        if self.domain != OperatorDomain::HalfLinePlus(1) {
            return Err(FsaError::EmbedDomain(self.domain.to_string()));
        }
        if c.im != 0.0 || c.re <= 0.0 {
            return Err(FsaError::EmbedConstant(c.to_string()));
        }
        let fill = EventuallyPeriodicSequence::constant(c).restrict_to(0);
        let diags = self.diagonals.clone().into_iter().chain([(0, fill)]);
        Ok(Self::new(diags, OperatorDomain::FullLine, self.p))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain {
            return Err(FsaError::DomainMismatch(self.domain.to_string(), other.domain.to_string()));
        }
        if self.p != other.p {
            return Err(FsaError::ExponentMismatch(self.p.to_string(), other.p.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let diags = self.diagonals.clone().into_iter().chain(other.diagonals.clone());
        Ok(Self::new(diags, self.domain, self.p))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self::new(self.diagonals.iter().map(|(&k, s)| (k, s.scale(alpha))), self.domain, self.p)
    }

    /// `A − λI` with `I` the identity on the operator's own domain.
    pub fn shift_spectrum(&self, lambda: C64) -> Self {
        self.add(&Self::scalar(-lambda, self.domain, self.p)).expect("same domain and exponent")
    }

    /// Symbolic product: diagonal `k` of `AB` at row `i` is
    /// `Σ_{a+b=k} d^A_a(i)·d^B_b(i+a)`.
    pub fn product(&self, other: &Self, cap: i64) -> Result<Self> {
        self.check_compatible(other)?;
        let bw = self.bandwidth() + other.bandwidth();
        if bw > cap {
            return Err(FsaError::BandwidthCap { bandwidth: bw, cap });
        }
        let mut terms = Vec::new();
        for (&a, da) in &self.diagonals {
            for (&b, db) in &other.diagonals {
                terms.push((a + b, da.mul(&db.shifted(a))));
            }
        }
        Ok(Self::new(terms, self.domain, self.p))
    }

    /// Structural equality up to `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.domain != other.domain || self.p != other.p {
            return false;
        }
        let keys: std::collections::BTreeSet<i64> =
            self.diagonals.keys().chain(other.diagonals.keys()).copied().collect();
        let zero = EventuallyPeriodicSequence::zero();
        keys.into_iter().all(|k| {
            let a = self.diagonals.get(&k).unwrap_or(&zero);
            let b = other.diagonals.get(&k).unwrap_or(&zero);
            sequences_close(a, b, tol)
        })
    }
}

/// Entrywise comparison over a window wide enough to cover both centers and
/// the lcm of the periods on each side.
fn sequences_close(a: &EventuallyPeriodicSequence, b: &EventuallyPeriodicSequence, tol: f64) -> bool {
    let lp = (a.left_period() as i64).lcm(&(b.left_period() as i64));
    let rp = (a.right_period() as i64).lcm(&(b.right_period() as i64));
    let lo = a.center_start().min(b.center_start()) - lp;
    let hi = a.center_end().max(b.center_end()) + rp;
    (lo..hi).all(|i| (a.get(i) - b.get(i)).norm() <= tol)
}
