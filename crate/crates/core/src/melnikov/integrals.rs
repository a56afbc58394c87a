//! Closed forms for the elementary contour integrals over
//! `L_h: x = sqrt(h) sin t, y = sqrt(h) cos t`, `t in [0, 2pi]`.
//!
//! Every integral here carries exactly one factor `2pi`, which is left out:
//! a returned polynomial `p` stands for `2pi * p`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::family::SystemFamily;
use super::MelnikovError;
use crate::exactalg::rational::{binomial, pow, Rational};
use crate::exactalg::Polynomial;

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// `(1/2pi) * oint x^i y^j dt` as a polynomial in `h`: a single monomial
/// `h^((i+j)/2)` when `i` and `j` are both even, zero otherwise.
pub fn circle_moment(i: u32, j: u32) -> Polynomial {
    if i % 2 == 1 || j % 2 == 1 {
        return Polynomial::zero();
    }
    let num = double_factorial(i as i64 - 1) * double_factorial(j as i64 - 1);
    let den = double_factorial((i + j) as i64);
    Polynomial::monomial(Rational::new(num, den), ((i + j) / 2) as usize)
}

/// `N_m(u)` with `(1/2pi) * int_0^{2pi} (1 - a sin t)^-m dt = N_m(r^2) / r^(2m-1)`,
/// `r = sqrt(1 - a^2)`. Obtained from the integration-by-parts recurrence
///
/// ```text
/// m r^2 J_{m+1} = (2m - 1) J_m - (m - 1) J_{m-1}
/// ```
///
/// which in numerator form reads `m N_{m+1} = (2m-1) N_m - (m-1) u N_{m-1}`.
/// Degree is `floor((m-1)/2)`.
pub fn wallis_numerator(m: u32) -> Result<Polynomial, MelnikovError> {
    if m == 0 {
        return Err(MelnikovError::InvalidPower);
    }
    let u = Polynomial::x();
    let (mut prev, mut cur) = (Polynomial::one(), Polynomial::one());
    for k in 2..m {
        let k_r = Rational::from_integer(k.into());
        let next = &cur.scale(&Rational::from_integer((2 * k - 1).into()))
            - &(&u * &prev).scale(&Rational::from_integer((k - 1).into()));
        prev = cur;
        cur = next.scale(&k_r.recip());
    }
    Ok(cur)
}

/// `2pi * (numerator(h) / r^(2m-1) + polynomial(h))` with `r = sqrt(1 - alpha^2 h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleRadical {
    pub alpha: Rational,
    pub m: u32,
    pub numerator: Polynomial,
    pub polynomial: Polynomial,
}

impl SingleRadical {
    pub fn value_f64(&self, h: f64) -> f64 {
        let a = crate::exactalg::rational::to_f64(&self.alpha);
        let r = (1.0 - a * a * h).sqrt();
        let v = self.numerator.eval_f64(h) / r.powi(2 * self.m as i32 - 1)
            + self.polynomial.eval_f64(h);
        2.0 * std::f64::consts::PI * v
    }
}

/// `I^(m)_{0,0} = oint dt / (1 - alpha x)^m`.
pub fn i00_power_integral(m: u32, alpha: &Rational) -> Result<SingleRadical, MelnikovError> {
    let n = wallis_numerator(m)?;
    Ok(SingleRadical {
        alpha: alpha.clone(),
        m,
        numerator: n.compose(&SystemFamily::radicand(alpha)),
        polynomial: Polynomial::zero(),
    })
}

/// `I^(m)_{k,0} = oint x^k / (1 - alpha x)^m dt`, via
/// `x^k = alpha^-k sum_j (-1)^j C(k,j) (1 - alpha x)^j`. Terms with `j < m` are
/// lower power integrals brought over the common radical `r^(2m-1)`; terms
/// with `j >= m` are polynomials in `x` and integrate to circle moments.
pub fn ik0_power_integral(
    k: u32,
    m: u32,
    alpha: &Rational,
) -> Result<SingleRadical, MelnikovError> {
    if m == 0 {
        return Err(MelnikovError::InvalidPower);
    }
    let u = SystemFamily::radicand(alpha);
    let inv_alpha_k = pow(&alpha.recip(), k);
    let mut numerator = Polynomial::zero();
    let mut polynomial = Polynomial::zero();
    for j in 0..=k {
        let mut c = inv_alpha_k.clone() * Rational::from_integer(binomial(k, j));
        if j % 2 == 1 {
            c = -c;
        }
        if j < m {
            let lower = wallis_numerator(m - j)?.compose(&u);
            numerator = &numerator + &(&lower * &u.pow(j)).scale(&c);
        } else {
            let e = j - m;
            for l in 0..=e {
                let mut cl = &c * Rational::from_integer(binomial(e, l)) * pow(alpha, l);
                if l % 2 == 1 {
                    cl = -cl;
                }
                polynomial = &polynomial + &circle_moment(l, 0).scale(&cl);
            }
        }
    }
    Ok(SingleRadical {
        alpha: alpha.clone(),
        m,
        numerator,
        polynomial,
    })
}

/// Whether every coefficient of `N_m` is nonzero, for reporting.
pub fn wallis_coefficients_nonzero(m: u32) -> Result<bool, MelnikovError> {
    let n = wallis_numerator(m)?;
    Ok(n.coeffs().iter().all(|c| !c.is_zero()))
}
