use melnikov::exactalg::rational::{int, ratio};
use melnikov::exactalg::roots::{count_real_roots, isolate_roots};
use melnikov::exactalg::{Interval, Polynomial};
use melnikov::melnikov::{Component, MelnikovBasis};
use melnikov::{assemble, NormalForm, PerturbCoeffs, Rational, SystemFamily};
use num_traits::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-64i64..=64, 1i64..=16).prop_map(|(p, q)| ratio(p, q))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(small_rational(), 0..=max_deg + 1).prop_map(Polynomial::new)
}

fn coeffs(n: u32) -> impl Strategy<Value = PerturbCoeffs> {
    let len = PerturbCoeffs::index_set(n).len() * 2;
    prop::collection::vec(-16i64..=16, len).prop_map(move |vals| {
        let mut c = PerturbCoeffs::new(n, int(1)).unwrap();
        let mut it = vals.into_iter();
        for (i, j) in PerturbCoeffs::index_set(n) {
            for which in [Component::A, Component::B] {
                c.set(which, i, j, ratio(it.next().unwrap(), 16)).unwrap();
            }
        }
        c
    })
}

fn family() -> impl Strategy<Value = SystemFamily> {
    (
        1i64..=8,
        1i64..=8,
        1i64..=8,
        1u32..=3,
        1u32..=3,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(p1, p2, q, m1, m2, s1, s2)| {
            let a1 = ratio(if s1 { p1 } else { -p1 }, q);
            let a2 = ratio(if s2 { p2 } else { -p2 }, q);
            SystemFamily::new(a1, a2, m1, m2).unwrap()
        })
}

fn add(a: &NormalForm, b: &NormalForm) -> NormalForm {
    match (a, b) {
        (NormalForm::Generic(x), NormalForm::Generic(y)) => x.add(y).into(),
        (NormalForm::Confluent(x), NormalForm::Confluent(y)) => {
            let mut z = x.clone();
            z.pr = &x.pr + &y.pr;
            z.into()
        }
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn division_identity(a in poly(6), b in poly(4)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }

    #[test]
    fn product_degree(a in poly(5), b in poly(5)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!((&a * &b).degree(), Some(a.degree().unwrap() + b.degree().unwrap()));
    }

    #[test]
    fn gcd_divides_both(a in poly(4), b in poly(4), c in poly(2)) {
        prop_assume!(!c.is_zero() && !a.is_zero() && !b.is_zero());
        let (x, y) = (&a * &c, &b * &c);
        let g = x.gcd(&y);
        prop_assert!(x.div_exact(&g).is_ok());
        prop_assert!(y.div_exact(&g).is_ok());
        prop_assert!(g.degree() >= c.degree());
    }

    #[test]
    fn planted_roots_are_counted(roots in prop::collection::btree_set(-40i64..40, 1..=12), extra in 0usize..3) {
        // Distinct planted rationals r/8 times a positive-definite factor.
        let mut p = roots.iter().fold(Polynomial::one(), |acc, &r| &acc * &Polynomial::linear(ratio(-r, 8), int(1)));
        for k in 0..extra {
            p = &p * &Polynomial::new(vec![int(k as i64 + 1), int(0), int(1)]);
        }
        let iv = Interval::new(int(-6), int(6));
        prop_assert_eq!(count_real_roots(&p, &iv).unwrap(), roots.len());
        let ivs = isolate_roots(&p, &iv).unwrap();
        prop_assert_eq!(ivs.len(), roots.len());
        for (r, i) in roots.iter().zip(&ivs) {
            prop_assert!(i.contains(&ratio(*r, 8)));
        }
    }

    #[test]
    fn assembly_is_linear(fam in family(), a in coeffs(3), b in coeffs(3), lambda in small_rational()) {
        let sum = a.axpy(&lambda, &b);
        let lhs = assemble(&fam, &sum).unwrap();
        let rhs_b = match assemble(&fam, &b).unwrap() {
            NormalForm::Generic(g) => NormalForm::Generic(g.scale(&lambda)),
            NormalForm::Confluent(mut c) => { c.pr = c.pr.scale(&lambda); NormalForm::Confluent(c) }
        };
        prop_assert_eq!(lhs, add(&assemble(&fam, &a).unwrap(), &rhs_b));
    }

    #[test]
    fn center_value_vanishes(fam in family(), c in coeffs(4)) {
        prop_assert!(assemble(&fam, &c).unwrap().value_at_origin().is_zero());
    }

    #[test]
    fn basis_slots_sum_to_assembly(fam in family(), c in coeffs(2)) {
        let basis = MelnikovBasis::new(&fam, 2).unwrap();
        let mut acc: Option<NormalForm> = None;
        for (which, i, j, v) in c.entries() {
            let s = match basis.slot(which, i, j) {
                NormalForm::Generic(g) => NormalForm::Generic(g.scale(v)),
                NormalForm::Confluent(mut x) => { x.pr = x.pr.scale(v); NormalForm::Confluent(x) }
            };
            acc = Some(match acc { None => s, Some(a) => add(&a, &s) });
        }
        if let Some(acc) = acc {
            prop_assert_eq!(acc, basis.assemble(&c).unwrap());
        }
    }
}
