//! Two-sided scalar sequences with a periodic left tail, a finite center and
//! a periodic right tail.

use num_integer::Integer;

use crate::error::{FsaError, Result};
use crate::scalar::{close, C64, STRUCTURAL_TOL, ZERO};

/// A sequence `(s_i)_{i∈ℤ}` that is periodic to the left of `center_start`
/// and to the right of `center_start + center.len()`.
///
/// The left pattern is anchored at `center_start`: for `i < center_start`,
/// `s_i = left[(i − center_start) mod ρ⁻]`. The right pattern is anchored at
/// the end of the center: `s_i = right[(i − center_end) mod ρ⁺]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventuallyPeriodicSequence {
    left: Vec<C64>,
    center: Vec<C64>,
    center_start: i64,
    right: Vec<C64>,
}

fn modulo(a: i64, m: usize) -> usize {
    a.rem_euclid(m as i64) as usize
}

/// Smallest `d` dividing `pattern.len()` such that the pattern is `d`-periodic.
fn minimal_period(pattern: &[C64]) -> usize {
    let n = pattern.len();
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| (0..n).all(|k| close(pattern[k], pattern[k % d], STRUCTURAL_TOL)))
        .unwrap_or(n)
}

impl EventuallyPeriodicSequence {
    pub fn new(left: Vec<C64>, center: Vec<C64>, center_start: i64, right: Vec<C64>) -> Result<Self> {
        if left.is_empty() {
            return Err(FsaError::EmptyPeriod { side: "left" });
        }
        if right.is_empty() {
            return Err(FsaError::EmptyPeriod { side: "right" });
        }
        Ok(Self { left, center, center_start, right }.normalized())
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    pub fn constant(c: C64) -> Self {
        Self { left: vec![c], center: Vec::new(), center_start: 0, right: vec![c] }
    }

    /// Purely periodic sequence with `s_i = pattern[(i − anchor) mod len]`.
    pub fn periodic(pattern: Vec<C64>, anchor: i64) -> Result<Self> {
        Self::new(pattern.clone(), Vec::new(), anchor, pattern)
    }

    /// Samples `f` on `lo..hi` for the center and on one period on each side.
    /// The caller guarantees that `f` is `left_period`-periodic below `lo` and
    /// `right_period`-periodic from `hi` on.
    pub fn from_fn<F: Fn(i64) -> C64>(
        lo: i64,
        hi: i64,
        left_period: usize,
        right_period: usize,
        f: F,
    ) -> Result<Self> {
        if left_period == 0 {
            return Err(FsaError::EmptyPeriod { side: "left" });
        }
        if right_period == 0 {
            return Err(FsaError::EmptyPeriod { side: "right" });
        }
        let hi = hi.max(lo);
        let lp = left_period as i64;
        let left = (0..lp).map(|t| f(lo - lp + t)).collect();
        let center = (lo..hi).map(&f).collect();
        let right = (0..right_period as i64).map(|t| f(hi + t)).collect();
        Self::new(left, center, lo, right)
    }

    pub fn get(&self, i: i64) -> C64 {
        let end = self.center_end();
        if i < self.center_start {
            self.left[modulo(i - self.center_start, self.left.len())]
        } else if i < end {
            self.center[(i - self.center_start) as usize]
        } else {
            self.right[modulo(i - end, self.right.len())]
        }
    }

    pub fn left_period(&self) -> usize {
        self.left.len()
    }

    pub fn right_period(&self) -> usize {
        self.right.len()
    }

    pub fn left_pattern(&self) -> &[C64] {
        &self.left
    }

    pub fn right_pattern(&self) -> &[C64] {
        &self.right
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    pub fn center_start(&self) -> i64 {
        self.center_start
    }

    /// One past the last center index.
    pub fn center_end(&self) -> i64 {
        self.center_start + self.center.len() as i64
    }

    /// Indices `[lo, hi)` outside of which both tails are in their periodic regime.
    pub fn aperiodic_range(&self) -> (i64, i64) {
        (self.center_start, self.center_end())
    }

    pub fn sample(&self, lo: i64, hi: i64) -> Vec<C64> {
        (lo..hi).map(|i| self.get(i)).collect()
    }

    /// Largest modulus over one full period of each tail and the center.
    pub fn max_abs(&self) -> f64 {
        self.left
            .iter()
            .chain(&self.center)
            .chain(&self.right)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// The sequence `i ↦ s_{i+k}`.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            left: self.left.clone(),
            center: self.center.clone(),
            center_start: self.center_start - k,
            right: self.right.clone(),
        }
        .normalized()
    }

    pub fn map<F: Fn(C64) -> C64>(&self, f: F) -> Self {
        Self {
            left: self.left.iter().map(|&z| f(z)).collect(),
            center: self.center.iter().map(|&z| f(z)).collect(),
            center_start: self.center_start,
            right: self.right.iter().map(|&z| f(z)).collect(),
        }
        .normalized()
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, alpha: C64) -> Self {
        self.map(|z| alpha * z)
    }

    /// Pointwise combination; the result has tail periods equal to the lcm of
    /// the input periods.
    pub fn zip_with<F: Fn(C64, C64) -> C64>(&self, other: &Self, f: F) -> Self {
        let lp = self.left.len().lcm(&other.left.len());
        let rp = self.right.len().lcm(&other.right.len());
        let lo = self.center_start.min(other.center_start);
        let hi = self.center_end().max(other.center_end());
        Self::from_fn(lo, hi, lp, rp, |i| f(self.get(i), other.get(i)))
            .expect("periods are positive")
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// Zeroes every entry with index `< a`.
    pub fn restrict_from(&self, a: i64) -> Self {
        let (lo, hi) = self.aperiodic_range();
        let hi = hi.max(a);
        let lo = lo.min(a);
        Self::from_fn(lo, hi, 1, self.right.len(), |i| if i < a { ZERO } else { self.get(i) })
            .expect("periods are positive")
    }

    /// Zeroes every entry with index `> b`.
    pub fn restrict_to(&self, b: i64) -> Self {
        let (lo, hi) = self.aperiodic_range();
        let lo = lo.min(b + 1);
        let hi = hi.max(b + 1);
        Self::from_fn(lo, hi, self.left.len(), 1, |i| if i > b { ZERO } else { self.get(i) })
            .expect("periods are positive")
    }

    /// The purely periodic sequence continuing the right tail to all of ℤ.
    pub fn right_tail(&self) -> Self {
        Self {
            left: self.right.clone(),
            center: Vec::new(),
            center_start: self.center_end(),
            right: self.right.clone(),
        }
        .normalized()
    }

    /// The purely periodic sequence continuing the left tail to all of ℤ.
    pub fn left_tail(&self) -> Self {
        Self {
            left: self.left.clone(),
            center: Vec::new(),
            center_start: self.center_start,
            right: self.left.clone(),
        }
        .normalized()
    }

    /// Minimal periods, minimal center, and for purely periodic sequences a
    /// canonical anchor at 0.
    pub fn normalized(mut self) -> Self {
        let d = minimal_period(&self.left);
        self.left.truncate(d);
        let d = minimal_period(&self.right);
        self.right.truncate(d);

        // absorb center entries into the right tail
        while let Some(&last) = self.center.last() {
            let rp = self.right.len();
            if !close(last, self.right[rp - 1], STRUCTURAL_TOL) {
                break;
            }
            self.center.pop();
            self.right.rotate_right(1);
        }
        // absorb center entries into the left tail
        let mut drop = 0;
        while drop < self.center.len() && close(self.center[drop], self.left[0], STRUCTURAL_TOL) {
            drop += 1;
            self.left.rotate_left(1);
        }
        if drop > 0 {
            self.center.drain(..drop);
            self.center_start += drop as i64;
        }

        if self.center.is_empty() && self.left.len() == self.right.len() {
            let same = self
                .left
                .iter()
                .zip(&self.right)
                .all(|(a, b)| close(*a, *b, STRUCTURAL_TOL));
            if same {
                let p = self.right.len();
                let pattern: Vec<C64> =
                    (0..p as i64).map(|k| self.right[modulo(k - self.center_start, p)]).collect();
                self.left = pattern.clone();
                self.right = pattern;
                self.center_start = 0;
            }
        }
        self
    }

    /// Structural equality: same minimal periods and entrywise agreement on a
    /// window covering both centers plus one period on each side.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.left.len() != other.left.len() || self.right.len() != other.right.len() {
            return false;
        }
        let lo = self.center_start.min(other.center_start) - self.left.len() as i64;
        let hi = self.center_end().max(other.center_end()) + self.right.len() as i64;
        (lo..hi).all(|i| close(self.get(i), other.get(i), tol))
    }
}
