//! Exact assembly of `Phi = sum a_ij I_{i+1,j} + b_ij I_{i,j+1}`.
//!
//! Odd powers of `y` integrate to zero over `L_h`; even powers are reduced
//! with `y^2 = h - x^2`, leaving the integrals `I_{k,0}`. In the generic case
//! those go through partial fractions of `x^k / D(x)`; in the confluent case
//! `D(x) = (1 - a x)^m` and the binomial reduction applies directly.

use num_traits::{One, Zero};

use super::family::{Component, PerturbCoeffs, SystemFamily};
use super::integrals::{circle_moment, ik0_power_integral};
use super::normal_form::{ConfluentNormalForm, MelnikovNormalForm, NormalForm, RawForm};
use super::partial::partial_fractions;
use super::MelnikovError;
use crate::exactalg::rational::{binomial, Rational};
use crate::exactalg::Polynomial;

/// `N(h)/r^(2m-1) + R(h)` before the change of variable to `r`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct ConfluentRaw {
    num: Polynomial,
    poly: Polynomial,
}

trait LinearForm: Clone + Default {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn mul_poly(&self, f: &Polynomial) -> Self;
}

impl LinearForm for RawForm {
    fn add(&self, other: &Self) -> Self {
        RawForm::add(self, other)
    }
    fn scale(&self, c: &Rational) -> Self {
        RawForm::scale(self, c)
    }
    fn mul_poly(&self, f: &Polynomial) -> Self {
        RawForm::mul_poly(self, f)
    }
}

impl LinearForm for ConfluentRaw {
    fn add(&self, other: &Self) -> Self {
        Self {
            num: &self.num + &other.num,
            poly: &self.poly + &other.poly,
        }
    }
    fn scale(&self, c: &Rational) -> Self {
        Self {
            num: self.num.scale(c),
            poly: self.poly.scale(c),
        }
    }
    fn mul_poly(&self, f: &Polynomial) -> Self {
        Self {
            num: &self.num * f,
            poly: &self.poly * f,
        }
    }
}

/// `I_{i,j}` from the table of `I_{k,0}`:
/// zero for odd `j`, else `I_{i,2k} = sum_l (-1)^l C(k,l) h^(k-l) I_{i+2l,0}`.
fn reduce_y_power<T: LinearForm>(i: u32, j: u32, ik0: &[T]) -> T {
    if j % 2 == 1 {
        return T::default();
    }
    let k = j / 2;
    let mut acc = T::default();
    for l in 0..=k {
        let mut c = Rational::from_integer(binomial(k, l));
        if l % 2 == 1 {
            c = -c;
        }
        let h_pow = Polynomial::monomial(Rational::one(), (k - l) as usize);
        acc = acc.add(&ik0[(i + 2 * l) as usize].mul_poly(&h_pow).scale(&c));
    }
    acc
}

/// `I_{k,0}` for distinct `a1 != a2`.
fn generic_ik0(k: u32, family: &SystemFamily) -> Result<RawForm, MelnikovError> {
    let row = partial_fractions(k, family)?;
    let radical_part =
        |coeffs: &[Rational], alpha: &Rational, m: u32| -> Result<Polynomial, MelnikovError> {
            let u = SystemFamily::radicand(alpha);
            let mut acc = Polynomial::zero();
            for (j, c) in (1..=m).zip(coeffs) {
                if c.is_zero() {
                    continue;
                }
                // J_j = N_j / r^(2j-1) = N_j u^(m-j) / r^(2m-1)
                let jj = ik0_power_integral(0, j, alpha)?;
                acc = &acc + &(&jj.numerator * &u.pow(m - j)).scale(c);
            }
            Ok(acc)
        };
    let p = radical_part(&row.tilde_a, family.alpha1(), family.m1())?;
    let q = radical_part(&row.tilde_b, family.alpha2(), family.m2())?;
    let r = row
        .c
        .iter()
        .enumerate()
        .fold(Polynomial::zero(), |acc, (l, c)| {
            &acc + &circle_moment(l as u32, 0).scale(c)
        });
    Ok(RawForm { p, q, r })
}

fn confluent_ik0(k: u32, family: &SystemFamily) -> Result<ConfluentRaw, MelnikovError> {
    let m = family.m1() + family.m2();
    let s = ik0_power_integral(k, m, family.alpha1())?;
    Ok(ConfluentRaw {
        num: s.numerator,
        poly: s.polynomial,
    })
}

fn confluent_to_r(raw: &ConfluentRaw, family: &SystemFamily) -> ConfluentNormalForm {
    let m = family.m1() + family.m2();
    let a2 = family.alpha1() * family.alpha1();
    let inv = a2.recip();
    let h_of_r = Polynomial::new(vec![inv.clone(), Rational::zero(), -inv]);
    let radical = raw.num.compose(&h_of_r);
    let tail = raw.poly.compose(&h_of_r).shift((2 * m - 1) as usize);
    ConfluentNormalForm {
        pr: &radical + &tail,
        m,
        family: family.clone(),
    }
}

/// `I_{i,j} = oint x^i y^j / D(x) dt` in normal form (divided by `2pi`).
pub fn monomial_melnikov(
    i: u32,
    j: u32,
    family: &SystemFamily,
) -> Result<MelnikovNormalForm, MelnikovError> {
    if family.is_confluent() {
        return Err(MelnikovError::ConfluentFamily);
    }
    let max_k = i + j;
    let table = (0..=max_k)
        .map(|k| generic_ik0(k, family))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MelnikovNormalForm::from_raw(
        family,
        reduce_y_power(i, j, &table),
    ))
}

#[derive(Clone, Debug)]
enum Table {
    Generic(Vec<RawForm>),
    Confluent(Vec<ConfluentRaw>),
}

/// Precomputed `I_{k,0}`, `k <= n + 1`, for one family and degree. Every
/// coefficient slot's contribution is then a cheap linear combination.
#[derive(Clone, Debug)]
pub struct MelnikovBasis {
    family: SystemFamily,
    n: u32,
    table: Table,
}

impl MelnikovBasis {
    pub fn new(family: &SystemFamily, n: u32) -> Result<Self, MelnikovError> {
        let table = if family.is_confluent() {
            Table::Confluent(
                (0..=n + 1)
                    .map(|k| confluent_ik0(k, family))
                    .collect::<Result<_, _>>()?,
            )
        } else {
            Table::Generic(
                (0..=n + 1)
                    .map(|k| generic_ik0(k, family))
                    .collect::<Result<_, _>>()?,
            )
        };
        Ok(Self {
            family: family.clone(),
            n,
            table,
        })
    }

    pub fn family(&self) -> &SystemFamily {
        &self.family
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Integrand monomial attached to a coefficient: `a_ij -> x^(i+1) y^j`,
    /// `b_ij -> x^i y^(j+1)`.
    fn slot_exponents(which: Component, i: u32, j: u32) -> (u32, u32) {
        match which {
            Component::A => (i + 1, j),
            Component::B => (i, j + 1),
        }
    }

    /// Contribution of a unit coefficient in slot `(which, i, j)`.
    pub fn slot(&self, which: Component, i: u32, j: u32) -> NormalForm {
        let (xi, yj) = Self::slot_exponents(which, i, j);
        match &self.table {
            Table::Generic(t) => {
                MelnikovNormalForm::from_raw(&self.family, reduce_y_power(xi, yj, t)).into()
            }
            Table::Confluent(t) => confluent_to_r(&reduce_y_power(xi, yj, t), &self.family).into(),
        }
    }

    pub fn assemble(&self, coeffs: &PerturbCoeffs) -> Result<NormalForm, MelnikovError> {
        if coeffs.n() > self.n {
            return Err(MelnikovError::DegreeMismatch {
                basis: self.n,
                coeffs: coeffs.n(),
            });
        }
        match &self.table {
            Table::Generic(t) => {
                let raw = sum_slots(coeffs, t);
                Ok(MelnikovNormalForm::from_raw(&self.family, raw).into())
            }
            Table::Confluent(t) => {
                let raw = sum_slots(coeffs, t);
                Ok(confluent_to_r(&raw, &self.family).into())
            }
        }
    }
}

fn sum_slots<T: LinearForm>(coeffs: &PerturbCoeffs, table: &[T]) -> T {
    coeffs
        .entries()
        .fold(T::default(), |acc, (which, i, j, v)| {
            let (xi, yj) = MelnikovBasis::slot_exponents(which, i, j);
            acc.add(&reduce_y_power(xi, yj, table).scale(v))
        })
}

/// `Phi` for `a1 != a2` in the radical normal form.
pub fn assemble_melnikov(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
) -> Result<MelnikovNormalForm, MelnikovError> {
    if family.is_confluent() {
        return Err(MelnikovError::ConfluentFamily);
    }
    match MelnikovBasis::new(family, coeffs.n())?.assemble(coeffs)? {
        NormalForm::Generic(nf) => Ok(nf),
        NormalForm::Confluent(_) => unreachable!("generic family"),
    }
}

/// `Phi` for `a1 = a2` as `Pr(r)/r^(2m-1)`.
pub fn assemble_confluent(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
) -> Result<ConfluentNormalForm, MelnikovError> {
    if !family.is_confluent() {
        return Err(MelnikovError::NonConfluentFamily);
    }
    match MelnikovBasis::new(family, coeffs.n())?.assemble(coeffs)? {
        NormalForm::Confluent(nf) => Ok(nf),
        NormalForm::Generic(_) => unreachable!("confluent family"),
    }
}

/// Dispatches on the family.
pub fn assemble(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
) -> Result<NormalForm, MelnikovError> {
    MelnikovBasis::new(family, coeffs.n())?.assemble(coeffs)
}

/// `ceil(n/2)`, the `s` in the degree bounds.
pub fn half_degree(n: u32) -> u32 {
    n.div_ceil(2)
}

/// Degree bounds `(P, Q, R)` of the normal form; `None` means the part must vanish.
pub fn degree_bounds(
    family: &SystemFamily,
    n: u32,
) -> (Option<usize>, Option<usize>, Option<usize>) {
    let s = half_degree(n) as i64;
    let (m1, m2) = (family.m1() as i64, family.m2() as i64);
    let to_opt = |d: i64| (d >= 0).then_some(d as usize);
    let r_bound = (2 * s + 1 - m1 - m2).div_euclid(2);
    if family.is_merged() {
        (to_opt(m1.max(m2) - 1 + s), None, to_opt(r_bound))
    } else {
        (to_opt(m1 - 1 + s), to_opt(m2 - 1 + s), to_opt(r_bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{int, ratio, to_f64};
    use std::f64::consts::PI;

    fn quad_phi(family: &SystemFamily, coeffs: &PerturbCoeffs, h: f64) -> f64 {
        let a1 = to_f64(family.alpha1());
        let a2 = to_f64(family.alpha2());
        let nodes = 1 << 14;
        let dt = 2.0 * PI / nodes as f64;
        let s = h.sqrt();
        let mut sum = 0.0;
        for k in 0..nodes {
            let t = k as f64 * dt;
            let (x, y) = (s * t.sin(), s * t.cos());
            let d =
                (1.0 - a1 * x).powi(family.m1() as i32) * (1.0 - a2 * x).powi(family.m2() as i32);
            let mut f = 0.0;
            let mut g = 0.0;
            for (which, i, j, v) in coeffs.entries() {
                let mono = x.powi(i as i32) * y.powi(j as i32) * to_f64(v);
                match which {
                    Component::A => f += mono,
                    Component::B => g += mono,
                }
            }
            sum += (x * f + y * g) / d;
        }
        sum * dt
    }

    fn fam(a1: Rational, a2: Rational, m1: u32, m2: u32) -> SystemFamily {
        SystemFamily::new(a1, a2, m1, m2).unwrap()
    }

    #[test]
    fn odd_y_power_vanishes() {
        let f = fam(ratio(1, 2), ratio(-1, 3), 2, 1);
        for i in 0..4 {
            for j in [1, 3, 5] {
                assert!(monomial_melnikov(i, j, &f).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn i00_shape_for_simple_factors() {
        let f = fam(ratio(1, 2), ratio(-1, 3), 1, 1);
        let nf = monomial_melnikov(0, 0, &f).unwrap();
        assert!(nf.p.degree() == Some(0) && nf.q.degree() == Some(0));
        assert!(nf.r.is_zero());
        let mut c = PerturbCoeffs::new(0, int(1)).unwrap();
        // I_{0,0} is the b_{0,-1} slot, so check it against quadrature directly.
        let a1 = 0.5f64;
        let a2 = -1.0f64 / 3.0;
        for k in 1..=5 {
            let h = 0.75 * k as f64;
            let nodes = 1 << 14;
            let dt = 2.0 * PI / nodes as f64;
            let q: f64 = (0..nodes)
                .map(|i| {
                    let x = h.sqrt() * (i as f64 * dt).sin();
                    1.0 / ((1.0 - a1 * x) * (1.0 - a2 * x))
                })
                .sum::<f64>()
                * dt;
            assert!((nf.value_f64(h) - q).abs() < 1e-10 * q.abs());
        }
        c.set_a(0, 0, int(1)).unwrap();
        assert!(!assemble(&f, &c).unwrap().is_zero());
    }

    #[test]
    fn r_degree_for_mixed_multiplicities() {
        // I_{4,2} with m1 = 1, m2 = 2: reduces to I_{4,0} h - I_{6,0}; the
        // polynomial tail of I_{6,0} has degree floor((6-3)/2) = 1.
        let f = fam(ratio(1, 2), ratio(1, 5), 1, 2);
        let nf = monomial_melnikov(4, 2, &f).unwrap();
        assert_eq!(nf.r.degree(), Some(1));
        // Quadrature cross-check.
        let h = 1.3f64;
        let nodes = 1 << 14;
        let dt = 2.0 * PI / nodes as f64;
        let q: f64 = (0..nodes)
            .map(|i| {
                let t = i as f64 * dt;
                let (x, y) = (h.sqrt() * t.sin(), h.sqrt() * t.cos());
                x.powi(4) * y * y / ((1.0 - 0.5 * x) * (1.0 - 0.2 * x).powi(2))
            })
            .sum::<f64>()
            * dt;
        assert!((nf.value_f64(h) - q).abs() < 1e-10 * q.abs());
    }

    #[test]
    fn zero_coefficients_give_zero_form() {
        let f = fam(ratio(1, 2), ratio(-1, 3), 1, 1);
        let c = PerturbCoeffs::new(3, int(1)).unwrap();
        assert!(assemble_melnikov(&f, &c).unwrap().is_zero());
        let g = fam(ratio(1, 2), ratio(1, 2), 1, 1);
        assert!(assemble_confluent(&g, &c).unwrap().is_zero());
    }

    #[test]
    fn single_coefficient_matches_monomial() {
        let f = fam(ratio(1, 2), ratio(-1, 3), 1, 1);
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        c.set_a(0, 0, int(1)).unwrap();
        assert_eq!(
            assemble_melnikov(&f, &c).unwrap(),
            monomial_melnikov(1, 0, &f).unwrap()
        );
    }

    #[test]
    fn wrong_path_is_rejected() {
        let c = PerturbCoeffs::new(1, int(1)).unwrap();
        let conf = fam(int(1), int(1), 1, 1);
        let gen = fam(int(1), int(2), 1, 1);
        assert_eq!(
            assemble_melnikov(&conf, &c),
            Err(MelnikovError::ConfluentFamily)
        );
        assert_eq!(
            assemble_confluent(&gen, &c),
            Err(MelnikovError::NonConfluentFamily)
        );
    }

    #[test]
    fn merged_family_combines_radicals() {
        let f = fam(ratio(1, 2), ratio(-1, 2), 1, 2);
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        c.set_a(1, 0, ratio(1, 3)).unwrap();
        c.set_b(0, 1, ratio(-1, 2)).unwrap();
        c.set_a(0, 0, int(1)).unwrap();
        let nf = assemble_melnikov(&f, &c).unwrap();
        assert!(nf.merged && nf.q.is_zero());
        assert_eq!(nf.p_power(), 3);
        for h in [0.3, 1.1, 2.7, 3.6] {
            let q = quad_phi(&f, &c, h);
            assert!(
                (nf.value_f64(h) - q).abs() < 1e-10 * q.abs().max(1e-3),
                "h={h}"
            );
        }
    }

    #[test]
    fn confluent_matches_quadrature_and_vanishes_at_r_one() {
        let f = fam(ratio(2, 3), ratio(2, 3), 1, 2);
        let mut c = PerturbCoeffs::new(3, int(1)).unwrap();
        c.set_a(0, 0, ratio(1, 2)).unwrap();
        c.set_a(2, 0, ratio(-1, 3)).unwrap();
        c.set_b(1, 1, ratio(3, 4)).unwrap();
        c.set_a(1, 2, ratio(-1, 5)).unwrap();
        let nf = assemble_confluent(&f, &c).unwrap();
        assert!(nf.value_at_r_one().is_zero());
        let h0 = 9.0 / 4.0;
        for frac in [0.1, 0.4, 0.7, 0.9] {
            let h = frac * h0;
            let q = quad_phi(&f, &c, h);
            assert!(
                (nf.value_f64(h) - q).abs() < 1e-9 * q.abs().max(1e-3),
                "h={h}"
            );
        }
    }
}
