//! Helpers around [`BigRational`]: parsing, decimal rendering, dyadic rounding
//! and integer square roots.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar. Always in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{input}` as an exact rational: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, an integer, or a decimal literal with optional exponent
/// (`-1.25`, `3e-4`). Decimal input is converted exactly.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| err("bad exponent"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err("no digits"));
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err("unexpected character"));
    }
    let all: BigInt = format!("{whole}{frac}")
        .parse()
        .map_err(|_| err("no digits"))?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Canonical textual form: `p` for integers, `p/q` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
    Nearest,
}

/// Decimal expansion of `q` with `digits` fractional digits, rounded as asked.
pub fn to_decimal(q: &Rational, digits: usize, rounding: Rounding) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = q * Rational::from_integer(scale.clone());
    let n = match rounding {
        Rounding::Floor => scaled.floor().to_integer(),
        Rounding::Ceil => scaled.ceil().to_integer(),
        Rounding::Nearest => scaled.round().to_integer(),
    };
    let negative = n.is_negative();
    let (int_part, frac_part) = n.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{:0>width$}",
            frac_part.to_string(),
            width = digits
        )
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled division.
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = q.numer() >> shift;
        let d = q.denom() >> shift;
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn pow(q: &Rational, e: u32) -> Rational {
    num_traits::pow(q.clone(), e as usize)
}

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// Largest multiple of `2^-bits` that is `<= q`.
pub fn floor_dyadic(q: &Rational, bits: u32) -> Rational {
    let s = two_pow(bits);
    let n = (q * Rational::from_integer(s.clone())).floor().to_integer();
    Rational::new(n, s)
}

/// Smallest multiple of `2^-bits` that is `>= q`.
pub fn ceil_dyadic(q: &Rational, bits: u32) -> Rational {
    let s = two_pow(bits);
    let n = (q * Rational::from_integer(s.clone())).ceil().to_integer();
    Rational::new(n, s)
}

/// Rigorous bounds `(lo, hi)` with `lo <= sqrt(q) <= hi` and `hi - lo <= 2^-bits`.
/// Exact when `q` is a perfect rational square.
pub fn sqrt_bounds(q: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!q.is_negative(), "square root of a negative rational");
    if q.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let (rn, rd) = (q.numer().sqrt(), q.denom().sqrt());
    if &(&rn * &rn) == q.numer() && &(&rd * &rd) == q.denom() {
        let exact = Rational::new(rn, rd);
        return (exact.clone(), exact);
    }
    // sqrt(n/d) = sqrt(n d) / d; scale so that the floor has `bits` fractional bits.
    let d = q.denom();
    let s = two_pow(bits);
    let radicand = q.numer() * d * &s * &s;
    let root = radicand.sqrt();
    let den = d * &s;
    let lo = Rational::new(root.clone(), den.clone());
    let hi = Rational::new(root + 1, den);
    (lo, hi)
}

/// Sign as -1, 0, 1.
pub fn sign(q: &Rational) -> i8 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
