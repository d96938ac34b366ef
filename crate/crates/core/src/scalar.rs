//! Scalar type, structural tolerance and the extended reals used for inverse norms.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use num_complex::Complex64 as C64;

/// Entrywise tolerance for structural comparisons of operators.
pub const STRUCTURAL_TOL: f64 = 1e-12;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[inline]
pub fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// A nonnegative real number or `+∞`.
///
/// Inverse norms of non-invertible operators are `Infinite`; the flag is
/// never encoded as a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    /// `1/x` with `1/0 = ∞`.
    pub fn recip_of(x: f64) -> ExtReal {
        if x <= 0.0 {
            ExtReal::Infinite
        } else {
            ExtReal::Finite(1.0 / x)
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Product in which `∞` absorbs everything, including zero.
    pub fn mul(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a * b),
            _ => ExtReal::Infinite,
        }
    }

    /// `|a − b|`, where two infinities are at distance zero and a finite
    /// value is infinitely far from `∞`.
    pub fn distance(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b).abs()),
            (ExtReal::Infinite, ExtReal::Infinite) => ExtReal::Finite(0.0),
            _ => ExtReal::Infinite,
        }
    }

    /// Whether the two values agree within `tol` (relative to `1 + max`).
    pub fn agrees(self, other: ExtReal, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
            }
            (ExtReal::Infinite, ExtReal::Infinite) => true,
            _ => false,
        }
    }

    pub fn fold_max<I: IntoIterator<Item = ExtReal>>(iter: I) -> Option<ExtReal> {
        iter.into_iter().reduce(ExtReal::max)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Infinite, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v.is_infinite() {
            ExtReal::Infinite
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(ExtReal::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}
