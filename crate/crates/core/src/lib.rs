//! Finite sections of band operators with eventually periodic diagonals:
//! limit operators, stability indicators and the asymptotics of norms,
//! inverse norms, condition numbers and pseudospectra of the sections.

pub mod asymptotics;
pub mod catalog;
pub mod error;
pub mod expression;
pub mod format;
pub mod indicators;
pub mod limit_ops;
pub mod matrix;
pub mod operator;
pub mod parallel;
pub mod scalar;
pub mod sequence;
pub mod spectral;

pub use error::{FsaError, Result};
pub use expression::{FSExpression, SectionIndex};
pub use operator::{BandOperator, Exponent, OperatorDomain};
pub use scalar::{ExtReal, C64};
pub use sequence::EventuallyPeriodicSequence;
