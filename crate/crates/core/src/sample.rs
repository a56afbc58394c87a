//! Seeded random instances with exact dyadic entries.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;

use crate::exactalg::Rational;
use crate::melnikov::{Component, PerturbCoeffs, SystemFamily};

/// Denominator exponent for sampled coefficients.
pub const SAMPLE_BITS: u32 = 20;

/// Uniform dyadic value `k / 2^bits * bound`, `k` in `[-2^bits, 2^bits]`.
pub fn dyadic_in_box<R: Rng + ?Sized>(rng: &mut R, bound: &Rational, bits: u32) -> Rational {
    let den = 1i64 << bits;
    let k = rng.gen_range(-den..=den);
    Rational::new(k.into(), BigInt::one() << bits as usize) * bound
}

/// Every coefficient of degree `n` drawn independently from the box.
pub fn dyadic_coeffs<R: Rng + ?Sized>(rng: &mut R, n: u32, bound: &Rational) -> PerturbCoeffs {
    let mut c = PerturbCoeffs::new(n, bound.clone()).expect("positive bound");
    for (i, j) in PerturbCoeffs::index_set(n) {
        for which in [Component::A, Component::B] {
            let v = dyadic_in_box(rng, bound, SAMPLE_BITS);
            c.set(which, i, j, v).expect("inside the box");
        }
    }
    c
}

/// Nonzero `p/q` with `|p/q| <= 2`, `q <= 8`.
pub fn small_alpha<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    loop {
        let q: i64 = rng.gen_range(1..=8);
        let p: i64 = rng.gen_range(-2 * q..=2 * q);
        if p != 0 {
            return Rational::new(p.into(), q.into());
        }
    }
}

/// Family with distinct alphas (`confluent = false`) or equal ones.
pub fn random_family<R: Rng + ?Sized>(
    rng: &mut R,
    m1: u32,
    m2: u32,
    confluent: bool,
) -> SystemFamily {
    let a1 = small_alpha(rng);
    let a2 = if confluent {
        a1.clone()
    } else {
        loop {
            let a = small_alpha(rng);
            if a != a1 {
                break a;
            }
        }
    };
    SystemFamily::new(a1, a2, m1, m2).expect("nonzero alphas and multiplicities")
}
