//! Certified zero counting for the Melnikov function on the period annulus
//! `(0, H0)` and the theorem bounds it is checked against.

pub mod count;
pub mod eliminant;
pub mod prescribe;

use thiserror::Error;

use crate::exactalg::AlgebraError;
use crate::melnikov::{half_degree, MelnikovError, SystemFamily};

pub use count::{count_zeros, count_zeros_with, CertifiedZero, CountConfig, Variable, ZeroReport};
pub use eliminant::{eliminant_degree_bound, eliminate_radicals};
pub use prescribe::prescribe_zeros;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZeroCountError {
    #[error("the Melnikov function is identically zero")]
    IdenticallyZero,
    #[error("{0} targets requested but at most {1} zeros are possible")]
    TooManyTargets(usize, String),
    #[error("target {0} is not strictly inside (0, H0)")]
    TargetOutsideAnnulus(String),
    #[error("targets must be distinct")]
    DuplicateTargets,
    #[error("no nonzero coefficient vector vanishes at the targets")]
    Infeasible,
    #[error("verification found zeros [{found_lo}, {found_hi}] instead of {expected}")]
    VerificationMismatch {
        expected: usize,
        found_lo: usize,
        found_hi: usize,
    },
    #[error(transparent)]
    Melnikov(#[from] MelnikovError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Upper bound on the number of limit cycles from the theorems, or the raw
/// (negative) formula value when it does not apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TheoremBound {
    Bound(u32),
    NotApplicable(i64),
}

impl TheoremBound {
    pub fn value(self) -> Option<u32> {
        match self {
            TheoremBound::Bound(b) => Some(b),
            TheoremBound::NotApplicable(_) => None,
        }
    }

    /// Whether `count` respects the bound. A non-applicable bound only admits zero.
    pub fn admits(self, count: usize) -> bool {
        match self {
            TheoremBound::Bound(b) => count <= b as usize,
            TheoremBound::NotApplicable(_) => count == 0,
        }
    }
}

impl std::fmt::Display for TheoremBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TheoremBound::Bound(b) => write!(f, "{b}"),
            TheoremBound::NotApplicable(v) => write!(f, "not applicable ({v})"),
        }
    }
}

/// `4(floor((n+1)/2) + m1 + m2) - 7` for `a1 != a2`, `n` for `a1 = a2`.
pub fn theorem_bound(family: &SystemFamily, n: u32) -> TheoremBound {
    let raw = if family.is_confluent() {
        n as i64
    } else {
        4 * ((n as i64 + 1) / 2 + family.m1() as i64 + family.m2() as i64) - 7
    };
    if raw < 0 {
        TheoremBound::NotApplicable(raw)
    } else {
        TheoremBound::Bound(raw as u32)
    }
}

/// `s = ceil(n/2)` used by the degree bookkeeping.
pub fn s_of(n: u32) -> u32 {
    half_degree(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{int, ratio};

    fn fam(a1: Rational, a2: Rational, m1: u32, m2: u32) -> SystemFamily {
        SystemFamily::new(a1, a2, m1, m2).unwrap()
    }
    use crate::exactalg::Rational;

    #[test]
    fn generic_bounds() {
        let f = fam(ratio(1, 2), ratio(-1, 3), 1, 1);
        assert_eq!(theorem_bound(&f, 3), TheoremBound::Bound(9));
        assert_eq!(theorem_bound(&f, 2), TheoremBound::Bound(5));
        assert_eq!(
            theorem_bound(&fam(int(1), int(2), 1, 2), 2),
            TheoremBound::Bound(9)
        );
        assert_eq!(
            theorem_bound(&fam(int(1), int(2), 2, 1), 4),
            TheoremBound::Bound(13)
        );
        assert_eq!(theorem_bound(&f, 0), TheoremBound::Bound(1));
    }

    #[test]
    fn confluent_bound_is_degree() {
        let f = fam(ratio(1, 2), ratio(1, 2), 2, 1);
        assert_eq!(theorem_bound(&f, 4), TheoremBound::Bound(4));
        assert_eq!(theorem_bound(&f, 0), TheoremBound::Bound(0));
    }

    #[test]
    fn admits() {
        assert!(TheoremBound::Bound(2).admits(2));
        assert!(!TheoremBound::Bound(2).admits(3));
        assert!(TheoremBound::NotApplicable(-3).admits(0));
        assert!(!TheoremBound::NotApplicable(-3).admits(1));
    }
}
