//! Pseudospectrum grids: samples of `μ(A − λI)` on a rectangle in ℂ.

use serde::{Deserialize, Serialize};

use crate::error::{FsaError, Result};
use crate::indicators::Indicator;
use crate::matrix::FiniteMatrix;
use crate::operator::Exponent;
use crate::parallel::{map_range, Parallelism};
use crate::scalar::C64;
use crate::spectral::estimators::{MuEstimator, TallWindow};
use crate::spectral::sets::PointSet;

/// Stopping rule for the per-cell inverse iteration. Estimates approach the
/// smallest singular value from above, so a loose rule only shrinks sublevel
/// sets by a relative `1e-8`.
pub const GRID_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl GridBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let b = Self { re_min, re_max, im_min, im_max };
        b.validate()?;
        Ok(b)
    }

    /// A box may be flat in the imaginary direction (a real segment) but not
    /// in the real one.
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|x| x.is_finite());
        if !all_finite || self.re_min >= self.re_max || self.im_min > self.im_max {
            return Err(FsaError::DegenerateGrid(format!(
                "box [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub nx: usize,
    pub ny: usize,
}

impl Resolution {
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospectrumGrid {
    #[serde(rename = "box")]
    pub bbox: GridBox,
    pub resolution: Resolution,
    /// Row-major: `values[iy * nx + ix]`.
    pub values: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Set when values are window estimates bounding `μ` from above, so
    /// sublevel sets are inner approximations.
    pub inner_approximation: bool,
}

fn check_grid(bbox: &GridBox, res: Resolution) -> Result<()> {
    bbox.validate()?;
    let flat = bbox.im_min == bbox.im_max;
    if res.nx < 2 || res.ny == 0 || (!flat && res.ny < 2) || (flat && res.ny != 1) {
        return Err(FsaError::DegenerateGrid(format!("resolution {} x {}", res.nx, res.ny)));
    }
    Ok(())
}

fn grid_point(bbox: &GridBox, res: Resolution, ix: usize, iy: usize) -> C64 {
    let t = |lo: f64, hi: f64, k: usize, n: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    };
    C64::new(t(bbox.re_min, bbox.re_max, ix, res.nx), t(bbox.im_min, bbox.im_max, iy, res.ny))
}

fn sample(
    bbox: GridBox,
    res: Resolution,
    epsilons: &[f64],
    inner: bool,
    par: Parallelism,
    f: impl Fn(C64) -> f64 + Sync + Send,
) -> Result<PseudospectrumGrid> {
    check_grid(&bbox, res)?;
    let values = map_range(res.cells(), par, |k| f(grid_point(&bbox, res, k % res.nx, k / res.nx)));
    Ok(PseudospectrumGrid { bbox, resolution: res, values, epsilons: epsilons.to_vec(), inner_approximation: inner })
}

/// `σ_min(M − λI)` on the grid for a square matrix.
pub fn pseudo_grid_matrix(
    m: &FiniteMatrix,
    p: Exponent,
    bbox: GridBox,
    res: Resolution,
    epsilons: &[f64],
    par: Parallelism,
) -> Result<PseudospectrumGrid> {
    p.require_two("pseudospectrum")?;
    if !m.is_square() {
        return Err(FsaError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let window = TallWindow::from_matrix(m);
    sample(bbox, res, epsilons, false, par, |z| window.lower_norm_at_to(z, GRID_TOL))
}

/// `μ̂(B − λI)` from tall windows of size `m`.
pub fn pseudo_grid_indicator(
    ind: &Indicator,
    m: usize,
    bbox: GridBox,
    res: Resolution,
    epsilons: &[f64],
    par: Parallelism,
) -> Result<PseudospectrumGrid> {
    ind.op.exponent().require_two("pseudospectrum")?;
    let est = MuEstimator::new(&ind.op, m);
    sample(bbox, res, epsilons, true, par, |z| est.at_to(z, GRID_TOL))
}

impl PseudospectrumGrid {
    pub fn lambda(&self, ix: usize, iy: usize) -> C64 {
        grid_point(&self.bbox, self.resolution, ix, iy)
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.resolution.nx + ix]
    }

    /// Pointwise minimum; its sublevel sets are the unions of theirs.
    pub fn union(grids: &[PseudospectrumGrid]) -> Result<PseudospectrumGrid> {
        let first = grids.first().ok_or(FsaError::EmptyPointSet)?;
        let mut out = first.clone();
        for g in &grids[1..] {
            if g.bbox != first.bbox || g.resolution != first.resolution {
                return Err(FsaError::ShapeMismatch("grids on different boxes".into()));
            }
            out.values.iter_mut().zip(&g.values).for_each(|(a, &b)| *a = a.min(b));
            out.inner_approximation |= g.inner_approximation;
        }
        Ok(out)
    }

    /// Closed sublevel mask `μ ≤ ε`.
    pub fn sublevel(&self, eps: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v <= eps).collect()
    }

    /// Open sublevel mask `μ < ε`.
    pub fn strict_mask(&self, eps: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v < eps).collect()
    }

    pub fn sublevel_points(&self, eps: f64) -> PointSet {
        let nx = self.resolution.nx;
        let points = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= eps)
            .map(|(k, _)| self.lambda(k % nx, k / nx))
            .collect();
        PointSet::new(points)
    }

    pub fn cell_size(&self) -> (f64, f64) {
        let step = |lo: f64, hi: f64, n: usize| if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
        (
            step(self.bbox.re_min, self.bbox.re_max, self.resolution.nx),
            step(self.bbox.im_min, self.bbox.im_max, self.resolution.ny),
        )
    }

    pub fn cell_diagonal(&self) -> f64 {
        let (dx, dy) = self.cell_size();
        dx.hypot(dy)
    }

    /// `re,im,mu` lines in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,mu\n");
        let nx = self.resolution.nx;
        for (k, v) in self.values.iter().enumerate() {
            let z = self.lambda(k % nx, k / nx);
            out.push_str(&format!("{},{},{}\n", z.re, z.im, v));
        }
        out
    }
}
