//! The family, its perturbations, and the exact Melnikov function in
//! radical normal form.

pub mod assemble;
pub mod family;
pub mod integrals;
pub mod normal_form;
pub mod partial;

use thiserror::Error;

pub use assemble::{
    assemble, assemble_confluent, assemble_melnikov, degree_bounds, half_degree, monomial_melnikov,
    MelnikovBasis,
};
pub use family::{Component, PerturbCoeffs, SystemFamily};
pub use normal_form::{evaluate_normal_form, ConfluentNormalForm, MelnikovNormalForm, NormalForm};
pub use partial::{partial_fractions, PartialFractionRow};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MelnikovError {
    #[error("alpha parameters must be nonzero")]
    ZeroAlpha,
    #[error("multiplicities must be positive")]
    ZeroMultiplicity,
    #[error("box bound must be positive, got {0}")]
    NonPositiveBound(String),
    #[error("coefficient index ({i}, {j}) outside 0 <= i + j <= {n}")]
    IndexOutOfRange { i: u32, j: u32, n: u32 },
    #[error("coefficient {value} outside the box [-{bound}, {bound}]")]
    OutsideBox { value: String, bound: String },
    #[error("power must be at least one")]
    InvalidPower,
    #[error("family has alpha1 = alpha2; use the confluent form")]
    ConfluentFamily,
    #[error("family has alpha1 != alpha2; the confluent form does not apply")]
    NonConfluentFamily,
    #[error("h outside the period annulus [0, H0)")]
    OutsideAnnulus,
    #[error("basis built for degree {basis}, coefficients have degree {coeffs}")]
    DegreeMismatch { basis: u32, coeffs: u32 },
}
