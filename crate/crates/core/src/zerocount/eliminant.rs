//! Clearing the radicals of `P/r1^a + Q/r2^b + R = 0`.
//!
//! With `a = 2m1-1`, `b = 2m2-1` and `r_i^2 = u_i`, multiplying through by
//! `r1^a r2^b` gives `P r2^b + Q r1^a = -R r1^a r2^b`. Squaring leaves one
//! cross term `2PQ r1^a r2^b = 2PQ u1^(m1-1) u2^(m2-1) r1 r2`, isolated as
//! `A r1 r2 = B`; squaring again gives `E = A^2 u1 u2 - B^2`.
//! Every zero of `Phi` in the annulus is a root of `E`; the converse fails.

use super::{s_of, ZeroCountError};
use crate::exactalg::Polynomial;
use crate::melnikov::{MelnikovNormalForm, SystemFamily};

/// Nonzero polynomial in `h` whose roots include every zero of `Phi` in `(0, H0)`.
pub fn eliminate_radicals(nf: &MelnikovNormalForm) -> Result<Polynomial, ZeroCountError> {
    if nf.is_zero() {
        return Err(ZeroCountError::IdenticallyZero);
    }
    let fam = &nf.family;
    let u1 = SystemFamily::radicand(fam.alpha1());
    let u2 = SystemFamily::radicand(fam.alpha2());
    let (p, q, r) = (&nf.p, &nf.q, &nf.r);
    let ua = u1.pow(nf.p_power());
    let e = match (p.is_zero(), q.is_zero()) {
        // Phi = R: polynomial, no radicals.
        (true, true) => r.clone(),
        // P = -R r1^a  =>  R^2 u1^a - P^2
        (false, true) => &(&(r * r) * &ua) - &(p * p),
        (true, false) => {
            let ub = u2.pow(nf.q_power());
            &(&(r * r) * &ub) - &(q * q)
        }
        (false, false) => {
            let ub = u2.pow(nf.q_power());
            if r.is_zero() {
                // P r2^b = -Q r1^a  =>  P^2 u2^b - Q^2 u1^a
                &(&(p * p) * &ub) - &(&(q * q) * &ua)
            } else {
                let a = &(p * q).scale(&crate::exactalg::rational::int(2))
                    * &(&u1.pow(fam.m1() - 1) * &u2.pow(fam.m2() - 1));
                let b = &(&(&(r * r) * &ua) * &ub) - &(&(&(p * p) * &ub) + &(&(q * q) * &ua));
                &(&(&a * &a) * &(&u1 * &u2)) - &(&b * &b)
            }
        }
    };
    debug_assert!(!e.is_zero(), "u1, u2 coprime and not squares");
    Ok(e)
}

/// `4s + 4(m1 + m2) - 6` with `s = ceil(n/2)`: the degree of the doubly
/// squared eliminant before the root at `h = 0` is removed.
pub fn eliminant_degree_bound(family: &SystemFamily, n: u32) -> i64 {
    4 * s_of(n) as i64 + 4 * (family.m1() + family.m2()) as i64 - 6
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{int, ratio};
    use crate::melnikov::{assemble_melnikov, PerturbCoeffs};
    use num_traits::Zero;

    fn fam(a1: i64, d1: i64, a2: i64, d2: i64, m1: u32, m2: u32) -> SystemFamily {
        SystemFamily::new(ratio(a1, d1), ratio(a2, d2), m1, m2).unwrap()
    }

    #[test]
    fn constant_p_only_has_no_root_in_annulus() {
        let f = fam(1, 2, -1, 3, 1, 1);
        let nf = MelnikovNormalForm {
            p: Polynomial::one(),
            q: Polynomial::zero(),
            r: Polynomial::zero(),
            family: f.clone(),
            merged: false,
        };
        let e = eliminate_radicals(&nf).unwrap();
        // E = -1
        assert_eq!(e, Polynomial::from_i64(&[-1]));
    }

    #[test]
    fn vanishes_at_origin_and_respects_degree_bound() {
        let f = fam(1, 2, -1, 3, 1, 1);
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        c.set_a(0, 0, ratio(1, 3)).unwrap();
        c.set_a(2, 0, ratio(-1, 2)).unwrap();
        c.set_b(0, 1, ratio(2, 7)).unwrap();
        c.set_b(1, 1, ratio(-1, 5)).unwrap();
        let nf = assemble_melnikov(&f, &c).unwrap();
        let e = eliminate_radicals(&nf).unwrap();
        assert!(e.eval(&Rational::zero()).is_zero());
        assert!(e.degree().unwrap() as i64 <= eliminant_degree_bound(&f, 2));
    }

    #[test]
    fn zero_form_is_rejected() {
        let f = fam(1, 2, -1, 3, 1, 1);
        assert_eq!(
            eliminate_radicals(&MelnikovNormalForm::zero(&f)),
            Err(ZeroCountError::IdenticallyZero)
        );
    }

    use crate::exactalg::Rational;
}
