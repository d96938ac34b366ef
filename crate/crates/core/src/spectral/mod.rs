//! Numerical kernels: finite-matrix norms, indicator estimators,
//! pseudospectrum grids and point-set distances.

pub mod banded;
pub mod estimators;
pub mod norms;
pub mod pseudo;
pub mod sets;

pub use estimators::{indicator_inv_norm, indicator_norm, EstimateKind, MuEstimator, NormEstimate};
pub use norms::{inv_norm, kappa, lower_norm, mu, op_norm};
pub use pseudo::{pseudo_grid_indicator, pseudo_grid_matrix, GridBox, PseudospectrumGrid, Resolution};
pub use sets::{hausdorff_distance, set_liminf, set_limsup, PointSet};
