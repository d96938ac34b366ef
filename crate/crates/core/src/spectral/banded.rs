//! Smallest singular values of banded matrices by Givens QR followed by
//! Lanczos on `(R*R)⁻¹`. Cost is linear in the number of rows, which
//! is what makes fine pseudospectrum grids affordable.

use nalgebra::DMatrix;

use crate::scalar::{C64, ZERO};

/// Row-stored band: row `r` keeps columns `r − kl ..= r + kl + ku`; the
/// extra `kl` superdiagonals absorb the fill-in of the QR factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    nrows: usize,
    ncols: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
}

const MAX_ITERATIONS: usize = 300;
const RELATIVE_TOL: f64 = 1e-10;

impl BandedMatrix {
    pub fn zeros(nrows: usize, ncols: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { nrows, ncols, kl, ku, data: vec![ZERO; nrows * width] }
    }

    /// Band of a dense matrix; `kl`/`ku` are read off its nonzero pattern.
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let (mut kl, mut ku) = (0usize, 0usize);
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != ZERO {
                    if r > c {
                        kl = kl.max(r - c);
                    } else {
                        ku = ku.max(c - r);
                    }
                }
            }
        }
        let mut b = Self::zeros(m.nrows(), m.ncols(), kl, ku);
        for r in 0..m.nrows() {
            let lo = r.saturating_sub(kl);
            let hi = (r + ku).min(m.ncols().saturating_sub(1));
            for c in lo..=hi.max(lo) {
                if c < m.ncols() {
                    b.set(r, c, m[(r, c)]);
                }
            }
        }
        b
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn index(&self, r: usize, c: usize) -> Option<usize> {
        let off = c as isize + self.kl as isize - r as isize;
        if off < 0 || off as usize >= self.width() || r >= self.nrows || c >= self.ncols {
            None
        } else {
            Some(r * self.width() + off as usize)
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.index(r, c).map_or(ZERO, |k| self.data[k])
    }

    /// Panics if `(r, c)` lies outside the stored band.
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        let k = self.index(r, c).expect("entry inside the band");
        self.data[k] = v;
    }

    /// Adds `delta` at `(r, c)`; positions outside the band must not be hit.
    pub fn add_at(&mut self, r: usize, c: usize, delta: C64) {
        let k = self.index(r, c).expect("entry inside the band");
        self.data[k] += delta;
    }

    /// Smallest singular value. Wide matrices have a kernel and give 0.
    pub fn smallest_singular_value(&self) -> f64 {
        self.smallest_singular_value_to(RELATIVE_TOL)
    }

    /// As [`Self::smallest_singular_value`], stopping once the Lanczos
    /// residual falls below `tol` relatively. The result never lies below the
    /// true value.
    pub fn smallest_singular_value_to(&self, tol: f64) -> f64 {
        self.clone().into_smallest_singular_value(tol)
    }

    /// Same, reusing the storage for the factorization.
    pub fn into_smallest_singular_value(mut self, tol: f64) -> f64 {
        if self.ncols == 0 || self.nrows < self.ncols {
            return 0.0;
        }
        self.factor();
        let r = Triangular::new(&self);
        smallest_by_lanczos(&r, tol)
    }

    /// Givens QR in place; afterwards rows `0..ncols` hold `R`.
    fn factor(&mut self) {
        let n = self.ncols;
        let (kl, ku) = (self.kl, self.ku);
        let w = self.width();
        let a = &mut self.data;
        // row r, column c lives at r * w + kl − r + c
        for j in 0..n {
            let last = (j + kl).min(self.nrows - 1);
            let cend = (j + kl + ku).min(n - 1);
            let rj = j * w + kl - j;
            for i in j + 1..=last {
                let ri = i * w + kl - i;
                let b = a[ri + j];
                if b == ZERO {
                    continue;
                }
                let d = a[rj + j];
                let inv = 1.0 / d.norm().hypot(b.norm());
                let (dc, bc) = (d.conj() * inv, b.conj() * inv);
                let (mb, md) = (-b * inv, d * inv);
                for c in j..=cend {
                    let x = a[rj + c];
                    let y = a[ri + c];
                    a[rj + c] = dc * x + bc * y;
                    a[ri + c] = mb * x + md * y;
                }
            }
        }
    }
}

/// View of the triangular factor left in a [`BandedMatrix`] by `factor`.
struct Triangular<'a> {
    data: &'a [C64],
    n: usize,
    bw: usize,
    w: usize,
    kl: usize,
    diag_inv: Vec<C64>,
}

impl<'a> Triangular<'a> {
    fn new(m: &'a BandedMatrix) -> Self {
        let w = m.width();
        let n = m.ncols;
        let diag_inv = (0..n)
            .map(|j| {
                let d = m.data[j * w + m.kl];
                if d == ZERO {
                    ZERO
                } else {
                    d.inv()
                }
            })
            .collect();
        Self { data: &m.data, n, bw: m.kl + m.ku, w, kl: m.kl, diag_inv }
    }

    #[inline]
    fn at(&self, j: usize, c: usize) -> C64 {
        self.data[j * self.w + self.kl - j + c]
    }

    fn singular(&self) -> bool {
        self.diag_inv.iter().any(|&d| d == ZERO)
    }

    /// `z = (R*R)⁻¹ x` by two banded triangular solves; `y` is scratch.
    fn apply_inverse(&self, x: &[C64], y: &mut [C64], z: &mut [C64]) {
        let (n, bw) = (self.n, self.bw);
        // R* y = x
        for j in 0..n {
            let mut s = x[j];
            for c in j.saturating_sub(bw)..j {
                s -= self.at(c, j).conj() * y[c];
            }
            y[j] = s * self.diag_inv[j].conj();
        }
        // R z = y
        for j in (0..n).rev() {
            let mut s = y[j];
            for c in j + 1..=(j + bw).min(n - 1) {
                s -= self.at(j, c) * z[c];
            }
            z[j] = s * self.diag_inv[j];
        }
    }
}

/// A fixed, generic unit vector.
fn start_vector(n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|k| {
            let t = (k as f64 * 0.618_033_988_749_895).fract();
            C64::new(1.0 + t, 0.5 - (k as f64 * 0.414_213_562_373_095).fract())
        })
        .collect();
    let norm = norm2(&v);
    v.into_iter().map(|z| z / norm).collect()
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `a` and off-diagonal `b`.
fn count_below(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for k in 0..a.len() {
        let off = if k == 0 { 0.0 } else { b[k - 1] * b[k - 1] / d };
        d = a[k] - x - off;
        if d == 0.0 {
            d = -f64::EPSILON * (a[k].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix, by bisection on
/// Sturm counts, searching above `floor`.
fn largest_eigenvalue(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let n = a.len();
    let mut hi = (0..n)
        .map(|k| a[k] + if k > 0 { b[k - 1].abs() } else { 0.0 } + if k + 1 < n { b[k].abs() } else { 0.0 })
        .fold(f64::MIN, f64::max);
    let mut lo = floor.min(hi);
    if count_below(a, b, lo) == n {
        lo = a.iter().fold(f64::MAX, |m, &v| m.min(v)) - 2.0 * b.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    }
    while hi - lo > 1e-15 * hi.abs().max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(a, b, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Last component of the unit eigenvector of the tridiagonal matrix for the
/// eigenvalue `theta`, by two steps of inverse iteration.
fn last_component(a: &[f64], b: &[f64], theta: f64) -> f64 {
    let n = a.len();
    if n == 1 {
        return 1.0;
    }
    let shift = theta + 1e-13 * theta.abs().max(f64::MIN_POSITIVE);
    let mut v = vec![1.0; n];
    for _ in 0..2 {
        // Thomas algorithm on (T − shift·I) x = v
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = a[0] - shift;
        for k in 0..n {
            if k > 0 {
                piv = a[k] - shift - b[k - 1] * c[k - 1];
            }
            if piv.abs() < f64::MIN_POSITIVE {
                piv = f64::MIN_POSITIVE;
            }
            c[k] = if k + 1 < n { b[k] / piv } else { 0.0 };
            d[k] = (v[k] - if k > 0 { b[k - 1] * d[k - 1] } else { 0.0 }) / piv;
        }
        for k in (0..n - 1).rev() {
            d[k] -= c[k] * d[k + 1];
        }
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return 1.0;
        }
        v = d.into_iter().map(|x| x / norm).collect();
    }
    v[n - 1]
}

/// Lanczos on `(R*R)⁻¹`. Ritz values never exceed the largest eigenvalue
/// `1/σ_min²` and increase with the step, so the returned `1/√θ` approaches
/// σ_min from above.
fn smallest_by_lanczos(r: &Triangular<'_>, tol: f64) -> f64 {
    let n = r.n;
    if r.singular() {
        return 0.0;
    }
    let mut q = start_vector(n);
    let mut q_prev = vec![ZERO; n];
    let mut y = vec![ZERO; n];
    let mut z = vec![ZERO; n];
    let (mut alpha, mut beta): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut theta = 0.0f64;
    let mut best = f64::INFINITY;
    for step in 0..MAX_ITERATIONS.min(n.max(1) * 3) {
        r.apply_inverse(&q, &mut y, &mut z);
        if !z.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return 0.0;
        }
        let a: f64 = q.iter().zip(&z).map(|(u, v)| (u.conj() * v).re).sum();
        let b_prev = beta.last().copied().unwrap_or(0.0);
        for k in 0..n {
            z[k] -= q[k] * a + q_prev[k] * b_prev;
        }
        alpha.push(a);
        theta = largest_eigenvalue(&alpha, &beta, theta);
        let est = 1.0 / theta.max(f64::MIN_POSITIVE).sqrt();
        let prev = best;
        best = best.min(est);
        let b = norm2(&z);
        // the Ritz pair's residual bounds the distance of θ to the spectrum
        let residual = b * last_component(&alpha, &beta, theta).abs();
        if b <= 1e-14 * theta || residual <= tol * theta || step + 1 >= n && prev - best <= tol * best {
            break;
        }
        beta.push(b);
        for k in 0..n {
            q_prev[k] = q[k];
            q[k] = z[k] / b;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;
    use crate::spectral::norms::singular_values;

    fn dense_min(m: &DMatrix<C64>) -> f64 {
        *singular_values(m).last().unwrap()
    }

    #[test]
    fn agrees_with_dense_svd_on_tridiagonal_matrices() {
        for n in [1usize, 2, 5, 17] {
            let m = DMatrix::from_fn(n, n, |r, c| match r as i64 - c as i64 {
                0 => C64::new(2.0 + (r as f64).sin(), 0.3),
                1 => real(0.7),
                -1 => C64::new(-0.4, 0.2 * c as f64),
                _ => ZERO,
            });
            let b = BandedMatrix::from_dense(&m);
            let s = b.smallest_singular_value();
            assert!((s - dense_min(&m)).abs() < 1e-9, "n = {n}: {s} vs {}", dense_min(&m));
        }
    }

    #[test]
    fn tall_windows() {
        let m = DMatrix::from_fn(7, 5, |r, c| {
            if r == c + 1 {
                real(1.0)
            } else if r == c {
                real(-0.5)
            } else {
                ZERO
            }
        });
        let s = BandedMatrix::from_dense(&m).smallest_singular_value();
        assert!((s - dense_min(&m)).abs() < 1e-9);
    }

    #[test]
    fn singular_and_wide_matrices() {
        let m = DMatrix::from_fn(4, 4, |r, c| if r == c + 1 { real(1.0) } else { ZERO });
        assert!(BandedMatrix::from_dense(&m).smallest_singular_value() < 1e-12);
        let w = DMatrix::from_element(2, 3, real(1.0));
        assert_eq!(BandedMatrix::from_dense(&w).smallest_singular_value(), 0.0);
    }
}
