//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, Rational};
use super::AlgebraError;

/// Coefficients are stored lowest power first. The zero polynomial has no
/// coefficients, and otherwise the last coefficient is nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, power: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = c;
        Self { coeffs }
    }

    /// `a + b x`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let cs: Vec<f64> = self.coeffs.iter().map(super::rational::to_f64).collect();
        cs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * inner) + &Self::constant(c.clone())
        })
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), AlgebraError> {
        let dd = divisor.degree().ok_or(AlgebraError::ZeroPolynomial)?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient; fails unless `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, AlgebraError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    /// Monic scaling; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same distinct roots, all simple.
    pub fn squarefree_part(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g)
    }

    /// Yun's square-free factorisation: `(f_i, i)` with `p = c * prod f_i^i`.
    /// Factors are monic, pairwise coprime and square free; trivial ones are skipped.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Self, u32)>, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let mut out = Vec::new();
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_exact(&a0)?;
        let mut c = d.div_exact(&a0)?;
        let mut dd = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dd);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a)?;
            c = dd.div_exact(&a)?;
            dd = &c - &b.derivative();
            i += 1;
        }
        Ok(out)
    }

    /// Positive multiple with coprime integer coefficients. Positive scaling
    /// preserves signs, which is all root counting looks at.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let ints = self.integer_coeffs();
        let content = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        Self {
            coeffs: ints
                .into_iter()
                .map(|c| Rational::from_integer(c / &content))
                .collect(),
        }
    }

    /// Coefficients multiplied by the (positive) lcm of the denominators.
    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        self.coeffs
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect()
    }

    /// Sign changes in the coefficient sequence, zeros skipped.
    pub fn sign_variations(&self) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for c in &self.coeffs {
            let s = super::rational::sign(c);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Cauchy bound: every real root has modulus `< 1 + max |a_i / a_n|`.
    pub fn cauchy_bound(&self) -> Result<Rational, AlgebraError> {
        let lead = self.leading().ok_or(AlgebraError::ZeroPolynomial)?;
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(Rational::zero(), |m, v| if v > m { v } else { m });
        Ok(Rational::one() + max)
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }
}

/// Renders a polynomial with a chosen variable name.
pub struct Display<'a> {
    poly: &'a Polynomial,
    var: &'a str,
}

impl Polynomial {
    /// `display_in("h")` prints `3*h^2 - 1/2*h`.
    pub fn display_in<'a>(&'a self, var: &'a str) -> Display<'a> {
        Display { poly: self, var }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, var) = (self.poly, self.var);
        if p.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in p.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let body = format_rational(&mag);
            match i {
                0 => write!(f, "{body}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{body}*")?;
                    }
                    if i == 1 {
                        write!(f, "{var}")?;
                    } else {
                        write!(f, "{var}^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{int, ratio};

    fn p(cs: &[i64]) -> Polynomial {
        Polynomial::from_i64(cs)
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(p(&[7]).derivative().is_zero());
        assert_eq!(p(&[7]).derivative().degree(), None);
    }

    #[test]
    fn compose_square_with_shift() {
        assert_eq!(p(&[0, 0, 1]).compose(&p(&[1, 1])), p(&[1, 2, 1]));
    }

    #[test]
    fn degree_of_product_adds() {
        let a = p(&[3, 0, -2, 5]);
        let b = p(&[1, 4]);
        assert_eq!((&a * &b).degree(), Some(4));
        assert!((&a * &Polynomial::zero()).is_zero());
    }

    #[test]
    fn division_with_remainder() {
        let (q, r) = p(&[1, 0, 0, 1]).div_rem(&p(&[1, 1])).unwrap();
        assert_eq!(q, p(&[1, -1, 1]));
        assert!(r.is_zero());
        let (q, r) = p(&[2, 0, 1]).div_rem(&p(&[0, 2])).unwrap();
        assert_eq!(q, Polynomial::new(vec![int(0), ratio(1, 2)]));
        assert_eq!(r, p(&[2]));
        assert_eq!(
            p(&[1]).div_rem(&Polynomial::zero()),
            Err(AlgebraError::ZeroPolynomial)
        );
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(
            p(&[1, -2, 1]).squarefree_part().unwrap().monic(),
            p(&[-1, 1])
        );
        assert_eq!(
            p(&[1, 0, 1]).squarefree_part().unwrap().monic(),
            p(&[1, 0, 1])
        );
        // x^3 - x^2 = x^2 (x - 1); gcd with 3x^2 - 2x is x.
        assert_eq!(
            p(&[0, 0, -1, 1]).squarefree_part().unwrap().monic(),
            p(&[0, -1, 1])
        );
        assert_eq!(
            Polynomial::zero().squarefree_part(),
            Err(AlgebraError::ZeroPolynomial)
        );
    }

    #[test]
    fn yun_decomposition_recovers_multiplicities() {
        // (x-1)^3 (x+2)^2 x
        let f = &(&p(&[-1, 1]).pow(3) * &p(&[2, 1]).pow(2)) * &p(&[0, 1]);
        let mut parts = f.squarefree_decomposition().unwrap();
        parts.sort_by_key(|(_, m)| *m);
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], (p(&[0, 1]), 1));
        assert_eq!(parts[1], (p(&[2, 1]), 2));
        assert_eq!(parts[2], (p(&[-1, 1]), 3));
    }

    #[test]
    fn sign_variations_skip_zeros() {
        assert_eq!(p(&[2, -3, 1]).sign_variations(), 2);
        assert_eq!(p(&[1, 1, 1]).sign_variations(), 0);
        assert_eq!(p(&[-1, 0, 0, 1]).sign_variations(), 1);
    }

    #[test]
    fn display_is_readable() {
        let q = Polynomial::new(vec![ratio(-1, 2), int(0), int(1), int(-3)]);
        assert_eq!(q.to_string(), "-3*x^3 + x^2 - 1/2");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }
}
