//! Partial fractions of `x^k / ((1 - a1 x)^m1 (1 - a2 x)^m2)` for `a1 != a2`.

use num_traits::{One, Zero};

use super::family::SystemFamily;
use super::MelnikovError;
use crate::exactalg::rational::{binomial, pow, Rational};
use crate::exactalg::Polynomial;

/// `x^k / D(x) = sum_j A_j/(1-a1 x)^j + sum_j B_j/(1-a2 x)^j + sum_l C_l x^l`.
/// `tilde_a[j-1]` holds `A_j`, `tilde_b[j-1]` holds `B_j`; `c` is the
/// polynomial tail, nonempty exactly when `k >= m1 + m2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractionRow {
    pub k: u32,
    pub tilde_a: Vec<Rational>,
    pub tilde_b: Vec<Rational>,
    pub c: Vec<Rational>,
}

impl PartialFractionRow {
    /// Multiplies the decomposition back through by `D(x)`; equals `x^k`
    /// exactly when the row is right.
    pub fn reconstruct_numerator(&self, family: &SystemFamily) -> Polynomial {
        let f1 = Polynomial::linear(Rational::one(), -family.alpha1().clone());
        let f2 = Polynomial::linear(Rational::one(), -family.alpha2().clone());
        let (m1, m2) = (family.m1(), family.m2());
        let mut acc = &Polynomial::new(self.c.clone()) * &family.denominator();
        for (j, a) in (1..=m1).zip(&self.tilde_a) {
            acc = &acc + &(&f1.pow(m1 - j) * &f2.pow(m2)).scale(a);
        }
        for (j, b) in (1..=m2).zip(&self.tilde_b) {
            acc = &acc + &(&f2.pow(m2 - j) * &f1.pow(m1)).scale(b);
        }
        acc
    }
}

/// Principal part at the pole `1 - alpha x = 0` of order `m`, the other
/// factor being `(1 - beta x)^other_m`. Works in `w = 1 - alpha x`:
/// `x^k = alpha^-k (1 - w)^k` and `1 - beta x = c0 (1 + g w)` with
/// `c0 = (alpha - beta)/alpha`, `g = beta/(alpha - beta)`.
fn principal_part(
    k: u32,
    alpha: &Rational,
    m: u32,
    beta: &Rational,
    other_m: u32,
) -> Vec<Rational> {
    let trunc = m as usize;
    let one_minus_w = Polynomial::linear(Rational::one(), -Rational::one());
    let numer = one_minus_w.pow(k).scale(&pow(&alpha.recip(), k));
    let c0 = (alpha - beta) / alpha;
    let g = beta / (alpha - beta);
    let series = Polynomial::new(
        (0..trunc as u32)
            .map(|l| {
                let mut c = Rational::from_integer(binomial(other_m + l - 1, l)) * pow(&g, l);
                if l % 2 == 1 {
                    c = -c;
                }
                c
            })
            .collect(),
    )
    .scale(&pow(&c0.recip(), other_m));
    let prod = &numer * &series;
    // Coefficient of w^-j in prod / w^m is prod[m - j].
    (1..=m).map(|j| prod.coeff((m - j) as usize)).collect()
}

pub fn partial_fractions(
    k: u32,
    family: &SystemFamily,
) -> Result<PartialFractionRow, MelnikovError> {
    if family.is_confluent() {
        return Err(MelnikovError::ConfluentFamily);
    }
    let (a1, a2) = (family.alpha1(), family.alpha2());
    let (m1, m2) = (family.m1(), family.m2());
    let tilde_a = principal_part(k, a1, m1, a2, m2);
    let tilde_b = principal_part(k, a2, m2, a1, m1);
    let (tail, _) = Polynomial::monomial(Rational::one(), k as usize)
        .div_rem(&family.denominator())
        .expect("denominator is nonzero");
    let mut c = tail.coeffs().to_vec();
    if k >= m1 + m2 {
        // Keep the full tail length even if trailing coefficients vanish.
        c.resize((k - m1 - m2 + 1) as usize, Rational::zero());
    }
    Ok(PartialFractionRow {
        k,
        tilde_a,
        tilde_b,
        c,
    })
}
