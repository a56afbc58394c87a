//! Exact rational arithmetic, univariate polynomials and certified real-root
//! counting. Nothing in here touches floating point except the explicit
//! `*_f64` conversion helpers used for reporting.

pub mod interval;
pub mod poly;
pub mod rational;
pub mod roots;

use thiserror::Error;

pub use interval::Interval;
pub use poly::Polynomial;
pub use rational::{parse_rational, Rational};
pub use roots::{
    count_real_roots, descartes_bound, isolate_roots, isolate_with_multiplicity, refine_root,
    SturmSequence,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial division left a nonzero remainder")]
    InexactDivision,
    #[error("interval does not isolate exactly one root")]
    NoIsolatedRoot,
}
