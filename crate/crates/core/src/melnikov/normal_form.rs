//! Radical normal forms of the Melnikov function and their certified
//! evaluation.

use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};

use super::family::SystemFamily;
use super::MelnikovError;
use crate::exactalg::rational::{sqrt_bounds, to_f64, Rational};
use crate::exactalg::{Interval, Polynomial};

/// `Phi(h) / 2pi = P(h)/r1^(2m1-1) + Q(h)/r2^(2m2-1) + R(h)`,
/// `r_i = sqrt(1 - a_i^2 h)`.
///
/// When `merged` is set (`a2 = -a1`, so `r1 = r2`) the two radical parts
/// are combined into `P(h)/r1^(2M-1)` with `M = max(m1, m2)` and `Q = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MelnikovNormalForm {
    pub p: Polynomial,
    pub q: Polynomial,
    pub r: Polynomial,
    pub family: SystemFamily,
    pub merged: bool,
}

/// Unmerged `(P, Q, R)` triple used while assembling.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct RawForm {
    pub p: Polynomial,
    pub q: Polynomial,
    pub r: Polynomial,
}

impl RawForm {
    pub fn add(&self, other: &Self) -> Self {
        Self {
            p: &self.p + &other.p,
            q: &self.q + &other.q,
            r: &self.r + &other.r,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            p: self.p.scale(c),
            q: self.q.scale(c),
            r: self.r.scale(c),
        }
    }

    pub fn mul_poly(&self, f: &Polynomial) -> Self {
        Self {
            p: &self.p * f,
            q: &self.q * f,
            r: &self.r * f,
        }
    }
}

impl MelnikovNormalForm {
    pub(crate) fn from_raw(family: &SystemFamily, raw: RawForm) -> Self {
        if !family.is_merged() {
            return Self {
                p: raw.p,
                q: raw.q,
                r: raw.r,
                family: family.clone(),
                merged: false,
            };
        }
        let big_m = family.m1().max(family.m2());
        let u = SystemFamily::radicand(family.alpha1());
        let p = &(&raw.p * &u.pow(big_m - family.m1())) + &(&raw.q * &u.pow(big_m - family.m2()));
        Self {
            p,
            q: Polynomial::zero(),
            r: raw.r,
            family: family.clone(),
            merged: true,
        }
    }

    pub fn zero(family: &SystemFamily) -> Self {
        Self::from_raw(family, RawForm::default())
    }

    /// Odd exponent of `r1` under `P`.
    pub fn p_power(&self) -> u32 {
        let m = if self.merged {
            self.family.m1().max(self.family.m2())
        } else {
            self.family.m1()
        };
        2 * m - 1
    }

    /// Odd exponent of `r2` under `Q`.
    pub fn q_power(&self) -> u32 {
        2 * self.family.m2() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero() && self.r.is_zero()
    }

    /// `Phi(0)/2pi = P(0) + Q(0) + R(0)`.
    pub fn value_at_origin(&self) -> Rational {
        self.p.coeff(0) + self.q.coeff(0) + self.r.coeff(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            p: &self.p + &other.p,
            q: &self.q + &other.q,
            r: &self.r + &other.r,
            family: self.family.clone(),
            merged: self.merged,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            p: self.p.scale(c),
            q: self.q.scale(c),
            r: self.r.scale(c),
            family: self.family.clone(),
            merged: self.merged,
        }
    }

    /// Double-precision value of `Phi(h)` (including the `2pi`).
    pub fn value_f64(&self, h: f64) -> f64 {
        let a1 = to_f64(self.family.alpha1());
        let a2 = to_f64(self.family.alpha2());
        let r1 = (1.0 - a1 * a1 * h).sqrt();
        let r2 = (1.0 - a2 * a2 * h).sqrt();
        let v = self.p.eval_f64(h) / r1.powi(self.p_power() as i32)
            + self.q.eval_f64(h) / r2.powi(self.q_power() as i32)
            + self.r.eval_f64(h);
        2.0 * PI * v
    }

    /// Enclosure of `Phi(h)/2pi` at an exact point, endpoints on a `2^-bits` grid.
    pub(crate) fn enclose_scaled(&self, h: &Rational, bits: u32) -> Interval {
        let mut acc = Interval::point(self.r.eval(h));
        let parts = [
            (&self.p, self.family.alpha1(), self.p_power()),
            (&self.q, self.family.alpha2(), self.q_power()),
        ];
        for (poly, alpha, power) in parts {
            if poly.is_zero() {
                continue;
            }
            let u = SystemFamily::radicand(alpha).eval(h);
            let (lo, hi) = sqrt_bounds(&u, bits + 8);
            let radical = Interval::new(lo, hi).powi(power).round_outward(bits + 8);
            let inv = radical
                .recip()
                .expect("h inside the annulus")
                .round_outward(bits + 8);
            acc = acc.add(&inv.scale(&poly.eval(h)));
        }
        acc.round_outward(bits)
    }

    /// Enclosure of `Phi/2pi` over every `h` in `range` (`range` inside `[0, H0)`).
    pub(crate) fn enclose_scaled_over(&self, range: &Interval, bits: u32) -> Interval {
        if range.is_point() {
            return self.enclose_scaled(range.lo(), bits);
        }
        let mut acc = range.eval_poly(&self.r, bits);
        let parts = [
            (&self.p, self.family.alpha1(), self.p_power()),
            (&self.q, self.family.alpha2(), self.q_power()),
        ];
        for (poly, alpha, power) in parts {
            if poly.is_zero() {
                continue;
            }
            let u = SystemFamily::radicand(alpha);
            // u is decreasing in h.
            let u_range = Interval::new(u.eval(range.hi()), u.eval(range.lo()));
            let radical = u_range
                .sqrt(bits + 8)
                .expect("h inside the annulus")
                .powi(power)
                .round_outward(bits + 8);
            let inv = radical
                .recip()
                .expect("h inside the annulus")
                .round_outward(bits + 8);
            acc = acc
                .add(&inv.mul(&range.eval_poly(poly, bits + 8)))
                .round_outward(bits);
        }
        acc
    }
}

/// `Phi(h)/2pi = Pr(r) / r^(2m-1)` with `r = sqrt(1 - a^2 h)`, for `a1 = a2 = a`
/// and `m = m1 + m2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfluentNormalForm {
    pub pr: Polynomial,
    pub m: u32,
    pub family: SystemFamily,
}

impl ConfluentNormalForm {
    pub fn alpha(&self) -> &Rational {
        self.family.alpha1()
    }

    pub fn is_zero(&self) -> bool {
        self.pr.is_zero()
    }

    /// `Pr(1)`, the value corresponding to `h = 0`.
    pub fn value_at_r_one(&self) -> Rational {
        self.pr.eval(&Rational::one())
    }

    pub fn value_f64(&self, h: f64) -> f64 {
        let a = to_f64(self.alpha());
        let r = (1.0 - a * a * h).sqrt();
        2.0 * PI * self.pr.eval_f64(r) / r.powi(2 * self.m as i32 - 1)
    }

    /// `r^2 = 1 - a^2 h`.
    pub fn r_squared_of_h(&self, h: &Rational) -> Rational {
        Rational::one() - self.alpha() * self.alpha() * h
    }

    /// `h = (1 - r^2)/a^2`.
    pub fn h_of_r(&self, r: &Rational) -> Rational {
        (Rational::one() - r * r) / (self.alpha() * self.alpha())
    }

    pub(crate) fn enclose_scaled(&self, h: &Rational, bits: u32) -> Interval {
        let u = self.r_squared_of_h(h);
        let (lo, hi) = sqrt_bounds(&u, bits + 8);
        let r = Interval::new(lo, hi);
        let num = r.eval_poly(&self.pr, bits + 8);
        let den = r.powi(2 * self.m - 1).round_outward(bits + 8);
        num.mul(&den.recip().expect("h inside the annulus"))
            .round_outward(bits)
    }
}

/// Either shape of the Melnikov function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalForm {
    Generic(MelnikovNormalForm),
    Confluent(ConfluentNormalForm),
}

impl NormalForm {
    pub fn family(&self) -> &SystemFamily {
        match self {
            NormalForm::Generic(nf) => &nf.family,
            NormalForm::Confluent(nf) => &nf.family,
        }
    }

    pub fn h0(&self) -> Rational {
        self.family().h0()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NormalForm::Generic(nf) => nf.is_zero(),
            NormalForm::Confluent(nf) => nf.is_zero(),
        }
    }

    pub fn value_f64(&self, h: f64) -> f64 {
        match self {
            NormalForm::Generic(nf) => nf.value_f64(h),
            NormalForm::Confluent(nf) => nf.value_f64(h),
        }
    }

    /// `Phi(0)/2pi`; zero for every assembled instance.
    pub fn value_at_origin(&self) -> Rational {
        match self {
            NormalForm::Generic(nf) => nf.value_at_origin(),
            NormalForm::Confluent(nf) => nf.value_at_r_one(),
        }
    }

    /// Enclosure of `Phi(h)/2pi`. The positive `2pi` factor does not affect
    /// signs, so zero certification works with this directly.
    pub fn enclose_scaled(&self, h: &Rational, bits: u32) -> Interval {
        match self {
            NormalForm::Generic(nf) => nf.enclose_scaled(h, bits),
            NormalForm::Confluent(nf) => nf.enclose_scaled(h, bits),
        }
    }

    /// Enclosure of `Phi(h)` itself at working precision `bits`.
    pub fn enclose(&self, h: &Rational, bits: u32) -> Interval {
        let two_pi = Interval::pi(bits + 8).scale(&Rational::from_integer(2.into()));
        self.enclose_scaled(h, bits + 8)
            .mul(&two_pi)
            .round_outward(bits)
    }
}

impl From<MelnikovNormalForm> for NormalForm {
    fn from(nf: MelnikovNormalForm) -> Self {
        NormalForm::Generic(nf)
    }
}

impl From<ConfluentNormalForm> for NormalForm {
    fn from(nf: ConfluentNormalForm) -> Self {
        NormalForm::Confluent(nf)
    }
}

/// Rigorous enclosure of `Phi(h)` of width at most `10^-precision`.
pub fn evaluate_normal_form(
    nf: &NormalForm,
    h: &Rational,
    precision: u32,
) -> Result<Interval, MelnikovError> {
    if h.is_negative() || *h >= nf.h0() {
        return Err(MelnikovError::OutsideAnnulus);
    }
    if nf.is_zero() {
        return Ok(Interval::point(Rational::zero()));
    }
    let target = Rational::new(
        1.into(),
        num_traits::pow(num_bigint::BigInt::from(10), precision as usize),
    );
    // 10^-p needs about 3.33 p bits; start with margin and double on failure.
    let mut bits = precision * 4 + 32;
    loop {
        let e = nf.enclose(h, bits);
        if e.width() <= target {
            return Ok(e);
        }
        bits *= 2;
    }
}
