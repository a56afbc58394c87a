//! Exact first-order Melnikov functions for the planar family
//!
//! ```text
//! x' = y (1 - a1 x)^m1 (1 - a2 x)^m2
//! y' = -x (1 - a1 x)^m1 (1 - a2 x)^m2
//! ```
//!
//! under polynomial perturbations of degree `n`, together with certified
//! zero counting on the period annulus and a numerical cross-check by direct
//! integration of the perturbed flow.
//!
//! Orbits of the unperturbed center are labelled by `h = x^2 + y^2`.

pub mod dynamics;
pub mod exactalg;
pub mod melnikov;
pub mod sample;
pub mod zerocount;

pub use exactalg::{Interval, Polynomial, Rational};
pub use melnikov::{
    assemble, ConfluentNormalForm, MelnikovNormalForm, NormalForm, PerturbCoeffs, SystemFamily,
};
pub use zerocount::{count_zeros, theorem_bound, TheoremBound, ZeroReport};
