use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::MelnikovError;
use crate::exactalg::rational::{format_rational, int};
use crate::exactalg::{Polynomial, Rational};

/// Parameters of the unperturbed system
/// `x' = y D(x)`, `y' = -x D(x)` with `D(x) = (1 - a1 x)^m1 (1 - a2 x)^m2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemFamily {
    alpha1: Rational,
    alpha2: Rational,
    m1: u32,
    m2: u32,
}

impl SystemFamily {
    pub fn new(
        alpha1: Rational,
        alpha2: Rational,
        m1: u32,
        m2: u32,
    ) -> Result<Self, MelnikovError> {
        if alpha1.is_zero() || alpha2.is_zero() {
            return Err(MelnikovError::ZeroAlpha);
        }
        if m1 == 0 || m2 == 0 {
            return Err(MelnikovError::ZeroMultiplicity);
        }
        Ok(Self {
            alpha1,
            alpha2,
            m1,
            m2,
        })
    }

    pub fn alpha1(&self) -> &Rational {
        &self.alpha1
    }

    pub fn alpha2(&self) -> &Rational {
        &self.alpha2
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    pub fn m2(&self) -> u32 {
        self.m2
    }

    /// Outer edge of the period annulus, `min(1/a1^2, 1/a2^2)`.
    pub fn h0(&self) -> Rational {
        let a = self.alpha1.abs().max(self.alpha2.abs());
        (&a * &a).recip()
    }

    /// `a1 == a2`: the two factors of `D` coincide.
    pub fn is_confluent(&self) -> bool {
        self.alpha1 == self.alpha2
    }

    /// `a2 == -a1`: distinct factors sharing the radical `sqrt(1 - a^2 h)`.
    pub fn is_merged(&self) -> bool {
        !self.is_confluent() && self.alpha1 == -&self.alpha2
    }

    /// `u_i(h) = 1 - a_i^2 h`, the square of the radical `r_i`.
    pub fn radicand(alpha: &Rational) -> Polynomial {
        Polynomial::linear(Rational::one(), -(alpha * alpha))
    }

    /// `D(x)` as a polynomial in `x`.
    pub fn denominator(&self) -> Polynomial {
        let f1 = Polynomial::linear(Rational::one(), -self.alpha1.clone());
        let f2 = Polynomial::linear(Rational::one(), -self.alpha2.clone());
        &f1.pow(self.m1) * &f2.pow(self.m2)
    }
}

/// Coefficients `a_ij`, `b_ij` (`0 <= i + j <= n`) of the perturbation
/// `eps / D(x) * (sum a_ij x^i y^j, sum b_ij x^i y^j)`, all within `[-K, K]`.
/// Missing entries are zero; zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbCoeffs {
    n: u32,
    bound: Rational,
    a: BTreeMap<(u32, u32), Rational>,
    b: BTreeMap<(u32, u32), Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    A,
    B,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::A => "a",
            Component::B => "b",
        }
    }
}

impl PerturbCoeffs {
    pub fn new(n: u32, bound: Rational) -> Result<Self, MelnikovError> {
        if !bound.is_positive() {
            return Err(MelnikovError::NonPositiveBound(format_rational(&bound)));
        }
        Ok(Self {
            n,
            bound,
            a: BTreeMap::new(),
            b: BTreeMap::new(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn set(
        &mut self,
        which: Component,
        i: u32,
        j: u32,
        value: Rational,
    ) -> Result<(), MelnikovError> {
        if i + j > self.n {
            return Err(MelnikovError::IndexOutOfRange { i, j, n: self.n });
        }
        if value.abs() > self.bound {
            return Err(MelnikovError::OutsideBox {
                value: format_rational(&value),
                bound: format_rational(&self.bound),
            });
        }
        let map = self.map_mut(which);
        if value.is_zero() {
            map.remove(&(i, j));
        } else {
            map.insert((i, j), value);
        }
        Ok(())
    }

    pub fn set_a(&mut self, i: u32, j: u32, value: Rational) -> Result<(), MelnikovError> {
        self.set(Component::A, i, j, value)
    }

    pub fn set_b(&mut self, i: u32, j: u32, value: Rational) -> Result<(), MelnikovError> {
        self.set(Component::B, i, j, value)
    }

    pub fn get(&self, which: Component, i: u32, j: u32) -> Rational {
        self.map(which)
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn a(&self, i: u32, j: u32) -> Rational {
        self.get(Component::A, i, j)
    }

    pub fn b(&self, i: u32, j: u32) -> Rational {
        self.get(Component::B, i, j)
    }

    fn map(&self, which: Component) -> &BTreeMap<(u32, u32), Rational> {
        match which {
            Component::A => &self.a,
            Component::B => &self.b,
        }
    }

    fn map_mut(&mut self, which: Component) -> &mut BTreeMap<(u32, u32), Rational> {
        match which {
            Component::A => &mut self.a,
            Component::B => &mut self.b,
        }
    }

    /// Nonzero entries in a fixed order: all `a` by `(i, j)`, then all `b`.
    pub fn entries(&self) -> impl Iterator<Item = (Component, u32, u32, &Rational)> {
        let a = self.a.iter().map(|(&(i, j), v)| (Component::A, i, j, v));
        let b = self.b.iter().map(|(&(i, j), v)| (Component::B, i, j, v));
        a.chain(b)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }

    /// Every admissible `(i, j)` with `i + j <= n`, ordered by total degree.
    pub fn index_set(n: u32) -> Vec<(u32, u32)> {
        (0..=n)
            .flat_map(|d| (0..=d).rev().map(move |i| (i, d - i)))
            .collect()
    }

    /// `self + lambda * other`, with the box widened to hold the result.
    pub fn axpy(&self, lambda: &Rational, other: &Self) -> Self {
        let n = self.n.max(other.n);
        let mut out = Self {
            n,
            bound: Rational::one(),
            a: BTreeMap::new(),
            b: BTreeMap::new(),
        };
        for which in [Component::A, Component::B] {
            for (i, j) in Self::index_set(n) {
                let v = self.get(which, i, j) + lambda * other.get(which, i, j);
                if !v.is_zero() {
                    out.map_mut(which).insert((i, j), v);
                }
            }
        }
        out.bound = out.max_abs().max(int(1));
        out
    }

    /// Largest `|a_ij|`, `|b_ij|` (zero when empty).
    pub fn max_abs(&self) -> Rational {
        self.entries()
            .map(|(_, _, _, v)| v.abs())
            .fold(Rational::zero(), |m, v| if v > m { v } else { m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::ratio;

    #[test]
    fn h0_is_min_of_inverse_squares() {
        let f = SystemFamily::new(ratio(1, 2), ratio(-1, 3), 1, 1).unwrap();
        assert_eq!(f.h0(), int(4));
        assert!(!f.is_confluent() && !f.is_merged());
        let g = SystemFamily::new(int(2), int(-2), 1, 2).unwrap();
        assert!(g.is_merged());
        assert_eq!(g.h0(), ratio(1, 4));
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert_eq!(
            SystemFamily::new(int(0), int(1), 1, 1),
            Err(MelnikovError::ZeroAlpha)
        );
        assert_eq!(
            SystemFamily::new(int(1), int(1), 0, 1),
            Err(MelnikovError::ZeroMultiplicity)
        );
    }

    #[test]
    fn coefficient_box_and_index_checks() {
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        assert!(c.set_a(1, 1, ratio(1, 2)).is_ok());
        assert!(matches!(
            c.set_a(2, 1, int(0)),
            Err(MelnikovError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            c.set_b(0, 0, int(2)),
            Err(MelnikovError::OutsideBox { .. })
        ));
        assert_eq!(c.a(1, 1), ratio(1, 2));
        assert_eq!(c.b(0, 1), int(0));
        c.set_a(1, 1, int(0)).unwrap();
        assert!(c.is_zero());
        assert!(PerturbCoeffs::new(1, int(0)).is_err());
    }

    #[test]
    fn index_set_covers_triangle() {
        let idx = PerturbCoeffs::index_set(2);
        assert_eq!(idx.len(), 6);
        assert_eq!(idx[0], (0, 0));
        assert!(idx.iter().all(|(i, j)| i + j <= 2));
    }
}
