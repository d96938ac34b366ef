//! Finite point sets in ℂ: Hausdorff distance and operational limsup/liminf.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FsaError, Result};
use crate::scalar::C64;

/// Serialized as a JSON list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    pub points: Vec<C64>,
}

impl PointSet {
    pub fn new(points: Vec<C64>) -> Self {
        Self { points }
    }

    pub fn from_reals(xs: &[f64]) -> Self {
        Self { points: xs.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.points.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(Self { points: pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect() })
    }
}

/// Bucket grid for nearest-point queries.
pub struct NearestIndex<'a> {
    points: &'a [C64],
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    lo: (i64, i64),
    hi: (i64, i64),
}

impl<'a> NearestIndex<'a> {
    pub fn new(points: &'a [C64], cell: f64) -> Self {
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, z) in points.iter().enumerate() {
            buckets.entry(Self::key_for(*z, cell)).or_default().push(k);
        }
        let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
        for &(x, y) in buckets.keys() {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        Self { points, cell, buckets, lo, hi }
    }

    /// A cell size giving a few points per bucket.
    pub fn auto(points: &'a [C64]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for z in points {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let extent = (x1 - x0).max(y1 - y0);
        let cell = if points.len() > 1 && extent > 0.0 {
            extent / (points.len() as f64).sqrt()
        } else {
            1.0
        };
        Self::new(points, cell)
    }

    fn key_for(z: C64, cell: f64) -> (i64, i64) {
        ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)
    }

    fn ring(&self, center: (i64, i64), r: i64, mut f: impl FnMut(usize)) {
        let mut visit = |x: i64, y: i64| {
            if let Some(b) = self.buckets.get(&(x, y)) {
                b.iter().for_each(|&k| f(k));
            }
        };
        if r == 0 {
            visit(center.0, center.1);
            return;
        }
        for d in -r..=r {
            visit(center.0 + d, center.1 - r);
            visit(center.0 + d, center.1 + r);
        }
        for d in -r + 1..r {
            visit(center.0 - r, center.1 + d);
            visit(center.0 + r, center.1 + d);
        }
    }

    /// Distance from `z` to the nearest indexed point (`∞` if there is none).
    pub fn distance(&self, z: C64) -> f64 {
        if self.points.is_empty() {
            return f64::INFINITY;
        }
        let c = Self::key_for(z, self.cell);
        let mut best = f64::INFINITY;
        let mut r = 0;
        loop {
            self.ring(c, r, |k| best = best.min((self.points[k] - z).norm()));
            // anything in a later ring is at least r·cell away
            if best <= r as f64 * self.cell {
                return best;
            }
            // every bucket has been visited once the ring passes the bounding box
            let reach = [c.0 - self.lo.0, self.hi.0 - c.0, c.1 - self.lo.1, self.hi.1 - c.1]
                .into_iter()
                .map(i64::abs)
                .max()
                .unwrap_or(0);
            if r >= reach {
                return best;
            }
            // far from the points a plain scan is cheaper than more rings
            if 4 * (r as usize + 1).pow(2) > self.points.len() {
                return self.points.iter().map(|&p| (p - z).norm()).fold(best, f64::min);
            }
            r += 1;
        }
    }

    /// Whether some indexed point lies within `tol` of `z`.
    pub fn within(&self, z: C64, tol: f64) -> bool {
        let c = Self::key_for(z, self.cell);
        let rings = (tol / self.cell).ceil() as i64 + 1;
        let mut hit = false;
        for r in 0..=rings {
            self.ring(c, r, |k| hit |= (self.points[k] - z).norm() <= tol);
            if hit {
                return true;
            }
        }
        false
    }
}

fn directed(from: &[C64], to: &NearestIndex<'_>) -> f64 {
    from.iter().map(|&z| to.distance(z)).fold(0.0, f64::max)
}

/// `d_H(S, T) = max(sup_s dist(s, T), sup_t dist(t, S))`.
pub fn hausdorff_distance(s: &PointSet, t: &PointSet) -> Result<f64> {
    if s.is_empty() || t.is_empty() {
        return Err(FsaError::EmptyPointSet);
    }
    let si = NearestIndex::auto(&s.points);
    let ti = NearestIndex::auto(&t.points);
    Ok(directed(&s.points, &ti).max(directed(&t.points, &si)))
}

/// The last `⌈len/2⌉` sets: the sampled stand-in for "all large n".
pub fn tail(sets: &[PointSet]) -> &[PointSet] {
    let keep = sets.len().div_ceil(2);
    &sets[sets.len() - keep..]
}

fn check(sets: &[PointSet]) -> Result<()> {
    if sets.len() < 2 {
        return Err(FsaError::TooFewSets { need: 2, got: sets.len() });
    }
    Ok(())
}

/// Union of `sets`; points closer than `cluster_tol / 100` to an earlier
/// one are merged.
pub fn set_union(sets: &[PointSet], cluster_tol: f64) -> PointSet {
    let mut out: Vec<C64> = Vec::new();
    let merge = cluster_tol / 100.0;
    for s in sets {
        let seen = NearestIndex::new(&out, cluster_tol.max(f64::MIN_POSITIVE));
        let fresh: Vec<C64> = s.points.iter().copied().filter(|&z| !seen.within(z, merge)).collect();
        out.extend(fresh);
    }
    PointSet::new(out)
}

/// Points of the union of `sets` lying within `cluster_tol` of every one of
/// them.
pub fn set_common(sets: &[PointSet], cluster_tol: f64) -> PointSet {
    let indices: Vec<NearestIndex<'_>> =
        sets.iter().map(|s| NearestIndex::new(&s.points, cluster_tol.max(f64::MIN_POSITIVE))).collect();
    let points = set_union(sets, cluster_tol)
        .points
        .into_iter()
        .filter(|&z| indices.iter().all(|ix| ix.within(z, cluster_tol)))
        .collect();
    PointSet::new(points)
}

/// Partial limits, operationally: every point of some set in the tail.
pub fn set_limsup(sets: &[PointSet], cluster_tol: f64) -> Result<PointSet> {
    check(sets)?;
    Ok(set_union(tail(sets), cluster_tol))
}

/// Limits, operationally: points of the tail within `cluster_tol` of every
/// set in the tail.
pub fn set_liminf(sets: &[PointSet], cluster_tol: f64) -> Result<PointSet> {
    check(sets)?;
    Ok(set_common(tail(sets), cluster_tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectra_of_the_shifted_flip() {
        let a = PointSet::from_reals(&[1.0, 3.0]);
        let b = PointSet::from_reals(&[1.0, 2.0, 3.0]);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(hausdorff_distance(&b, &b).unwrap(), 0.0);
        assert!(hausdorff_distance(&a, &PointSet::default()).is_err());
    }

    #[test]
    fn alternating_sets() {
        let a = PointSet::from_reals(&[1.0, 3.0]);
        let b = PointSet::from_reals(&[1.0, 2.0, 3.0]);
        let seq: Vec<PointSet> = (0..10).map(|n| if n % 2 == 0 { a.clone() } else { b.clone() }).collect();
        let sup = set_limsup(&seq, 0.1).unwrap();
        let inf = set_liminf(&seq, 0.1).unwrap();
        assert_eq!(hausdorff_distance(&sup, &b).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&inf, &a).unwrap(), 0.0);
        assert!(set_limsup(&seq[..1], 0.1).is_err());
    }

    #[test]
    fn far_queries_terminate() {
        let a = PointSet::from_reals(&[0.0, 0.001]);
        let b = PointSet::from_reals(&[1000.0]);
        assert!((hausdorff_distance(&a, &b).unwrap() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn json_is_a_list_of_pairs() {
        let s = PointSet::new(vec![C64::new(1.0, -2.0)]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "[[1.0,-2.0]]");
        assert_eq!(serde_json::from_str::<PointSet>(&j).unwrap(), s);
    }
}
