//! Closed intervals with exact rational endpoints.
//!
//! Used both as isolating intervals for real roots and as rigorous
//! enclosures of real numbers. Arithmetic is exact; callers that chain many
//! operations round outward onto a dyadic grid with [`Interval::round_outward`]
//! to keep endpoint sizes bounded.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::poly::Polynomial;
use super::rational::{ceil_dyadic, floor_dyadic, format_rational, sqrt_bounds, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn try_new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `Some(Greater)` if every point is positive, `Some(Less)` if every point
    /// is negative, `Some(Equal)` for the exact point zero, `None` otherwise.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn round_outward(&self, bits: u32) -> Self {
        Self {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Self { lo: b, hi: a }
        } else {
            Self { lo: a, hi: b }
        }
    }

    pub fn shift(&self, c: &Rational) -> Self {
        Self {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products
            .iter()
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero);
        let hi = products
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero);
        Self { lo, hi }
    }

    /// `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::point(Rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        if e.is_multiple_of(2) && self.contains_zero() {
            // Even powers of a sign-straddling interval are nonnegative.
            acc.lo = Rational::zero();
        }
        acc
    }

    /// Enclosure of the square root, accurate to `2^-bits` at each endpoint.
    /// `None` if the interval reaches below zero.
    pub fn sqrt(&self, bits: u32) -> Option<Self> {
        if self.lo.is_negative() {
            return None;
        }
        let (lo, _) = sqrt_bounds(&self.lo, bits);
        let (_, hi) = sqrt_bounds(&self.hi, bits);
        Some(Self { lo, hi })
    }

    /// Horner evaluation of `p` over the interval, rounding outward at each step.
    pub fn eval_poly(&self, p: &Polynomial, bits: u32) -> Self {
        if self.is_point() {
            return Self::point(p.eval(&self.lo));
        }
        let mut acc = Self::point(Rational::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).shift(c).round_outward(bits);
        }
        acc
    }
}

/// Rigorous enclosure of `atan(1/x)` for integer `x >= 2` from the
/// alternating Taylor series: consecutive partial sums bracket the value.
fn atan_inv(x: i64, bits: u32) -> Interval {
    let x = Rational::from_integer(x.into());
    let x2 = &x * &x;
    let tol = Rational::new(1.into(), num_bigint::BigInt::one() << (bits as usize + 4));
    let mut power = x.recip();
    let mut sum = Rational::zero();
    let mut k = 0u64;
    loop {
        let term = &power / Rational::from_integer((2 * k + 1).into());
        let next = if k.is_multiple_of(2) {
            &sum + &term
        } else {
            &sum - &term
        };
        if term < tol {
            return if sum < next {
                Interval::new(sum, next)
            } else {
                Interval::new(next, sum)
            };
        }
        sum = next;
        power = &power / &x2;
        k += 1;
    }
}

fn pi_uncached(bits: u32) -> Interval {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let a = atan_inv(5, bits + 8).scale(&Rational::from_integer(16.into()));
    let b = atan_inv(239, bits + 8).scale(&Rational::from_integer(4.into()));
    a.sub(&b).round_outward(bits + 4)
}

impl Interval {
    /// Enclosure of pi of width at most `2^-bits` (roughly).
    pub fn pi(bits: u32) -> Self {
        const CACHED_BITS: u32 = 1024;
        static CACHE: std::sync::OnceLock<Interval> = std::sync::OnceLock::new();
        if bits + 4 <= CACHED_BITS {
            CACHE
                .get_or_init(|| pi_uncached(CACHED_BITS))
                .round_outward(bits + 2)
        } else {
            pi_uncached(bits)
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_rational(&self.lo),
            format_rational(&self.hi)
        )
    }
}
