//! Certified real-root counting and isolation via Sturm sequences.
//!
//! Counting always runs on the square-free part, so counts are of distinct
//! roots. Intervals follow the half-open convention `(lo, hi]`.

use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::poly::Polynomial;
use super::rational::{int, sign, Rational};
use super::AlgebraError;

/// Signed remainder sequence of a square-free polynomial. Each member is
/// scaled by a positive constant, which leaves sign patterns untouched.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<Polynomial>,
}

impl SturmSequence {
    pub fn new(p: &Polynomial) -> Result<Self, AlgebraError> {
        let p0 = p.squarefree_part()?.primitive();
        let mut seq = vec![p0.clone()];
        let mut prev = p0;
        let mut cur = prev.derivative().primitive();
        while !cur.is_zero() {
            seq.push(cur.clone());
            let (_, r) = prev.div_rem(&cur)?;
            prev = cur;
            cur = (-&r).primitive();
        }
        Ok(Self { seq })
    }

    /// The square-free polynomial the sequence starts from.
    pub fn base(&self) -> &Polynomial {
        &self.seq[0]
    }

    /// Sign variations of the sequence evaluated at `x`.
    pub fn variations_at(&self, x: &Rational) -> usize {
        count_variations(self.seq.iter().map(|q| sign(&q.eval(x))))
    }

    /// Variations at +infinity (`positive = true`) or -infinity.
    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        count_variations(self.seq.iter().map(|q| {
            let lead = sign(q.leading().expect("nonzero member"));
            let deg = q.degree().unwrap_or(0);
            if positive || deg % 2 == 0 {
                lead
            } else {
                -lead
            }
        }))
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        if lo >= hi {
            return 0;
        }
        self.variations_at(lo)
            .saturating_sub(self.variations_at(hi))
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }
}

fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Number of distinct real roots of `p` in `(iv.lo, iv.hi]`.
pub fn count_real_roots(p: &Polynomial, iv: &Interval) -> Result<usize, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    Ok(SturmSequence::new(p)?.count(iv.lo(), iv.hi()))
}

/// Pairwise-disjoint closed intervals, each containing exactly one distinct
/// root of `p`, covering every root in `(iv.lo, iv.hi]`. Exact rational roots
/// hit during bisection come back as point intervals; every other interval
/// has endpoints where `p` is nonzero.
pub fn isolate_roots(p: &Polynomial, iv: &Interval) -> Result<Vec<Interval>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let sturm = SturmSequence::new(p)?;
    Ok(isolate_with(&sturm, iv.lo(), iv.hi()))
}

pub(crate) fn isolate_with(sturm: &SturmSequence, lo: &Rational, hi: &Rational) -> Vec<Interval> {
    let base = sturm.base();
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), sturm.count(lo, hi))];
    while let Some((a, b, n)) = stack.pop() {
        match n {
            0 => {}
            1 => out.push(tighten(sturm, base, a, b)),
            _ => {
                let mid = (&a + &b) / int(2);
                let left = sturm.count(&a, &mid);
                stack.push((mid.clone(), b, n - left));
                stack.push((a, mid, left));
            }
        }
    }
    out.sort_by(|x, y| x.lo().cmp(y.lo()));
    // Neighbours from one bisection can share a (non-root) endpoint.
    for k in 1..out.len() {
        if out[k - 1].hi() == out[k].lo() && !out[k].is_point() {
            let (a, b) = (out[k].lo().clone(), out[k].hi().clone());
            out[k] = move_left_end(sturm, base, a, b);
        }
    }
    out
}

/// Turns a half-open `(a, b]` holding exactly one root into a closed
/// isolating interval whose endpoints are not roots.
fn tighten(sturm: &SturmSequence, base: &Polynomial, a: Rational, b: Rational) -> Interval {
    if base.eval(&b).is_zero() {
        return Interval::point(b);
    }
    if !base.eval(&a).is_zero() {
        return Interval::new(a, b);
    }
    move_left_end(sturm, base, a, b)
}

/// Moves `a` right, staying left of the single root in `(a, b]`, until it is
/// not a root itself.
fn move_left_end(sturm: &SturmSequence, base: &Polynomial, a: Rational, b: Rational) -> Interval {
    let mut step = (&b - &a) / int(2);
    loop {
        let cand = &a + &step;
        if !base.eval(&cand).is_zero() && sturm.count(&cand, &b) == 1 {
            return Interval::new(cand, b);
        }
        if sturm.count(&a, &cand) == 1 && base.eval(&cand).is_zero() {
            return Interval::point(cand);
        }
        step /= int(2);
    }
}

/// Shrinks an interval holding exactly one root of `p` until its width is at
/// most `width`. The root must be either bracketed by a sign change of `p`
/// or certified unique by a Sturm count over the closed interval.
pub fn refine_root(
    p: &Polynomial,
    iv: &Interval,
    width: &Rational,
) -> Result<Interval, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let (lo, hi) = (iv.lo().clone(), iv.hi().clone());
    let (flo, fhi) = (sign(&p.eval(&lo)), sign(&p.eval(&hi)));
    if iv.is_point() {
        return if flo == 0 {
            Ok(iv.clone())
        } else {
            Err(AlgebraError::NoIsolatedRoot)
        };
    }
    if flo * fhi < 0 {
        return Ok(bisect_by_sign(p, lo, hi, flo, width));
    }
    let sturm = SturmSequence::new(p)?;
    let closed = sturm.count(&lo, &hi) + usize::from(flo == 0);
    if closed != 1 {
        return Err(AlgebraError::NoIsolatedRoot);
    }
    if flo == 0 {
        return Ok(Interval::point(lo));
    }
    if fhi == 0 {
        return Ok(Interval::point(hi));
    }
    // Even-multiplicity root: no sign change, bisect by counts instead.
    let (mut a, mut b) = (lo, hi);
    while &b - &a > *width {
        let mid = (&a + &b) / int(2);
        if sturm.base().eval(&mid).is_zero() {
            return Ok(Interval::point(mid));
        }
        if sturm.count(&a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Interval::new(a, b))
}

pub(crate) fn bisect_by_sign(
    p: &Polynomial,
    mut a: Rational,
    mut b: Rational,
    sign_a: i8,
    width: &Rational,
) -> Interval {
    while &b - &a > *width {
        let mid = (&a + &b) / int(2);
        let s = sign(&p.eval(&mid));
        if s == 0 {
            return Interval::point(mid);
        }
        if s == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Interval::new(a, b)
}

/// Descartes' rule of signs: an upper bound on the number of positive roots
/// (with multiplicity) that shares their parity.
pub fn descartes_bound(p: &Polynomial) -> Result<usize, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    Ok(p.sign_variations())
}

/// Distinct positive roots, searched on `(0, cauchy_bound]`.
pub fn count_positive_roots(p: &Polynomial) -> Result<usize, AlgebraError> {
    let bound = p.cauchy_bound()?;
    count_real_roots(p, &Interval::new(Rational::zero(), bound))
}

/// Positive roots counted with multiplicity, on `(0, cauchy_bound]`.
pub fn count_positive_roots_with_multiplicity(p: &Polynomial) -> Result<usize, AlgebraError> {
    let bound = p.cauchy_bound()?;
    let iv = Interval::new(Rational::zero(), bound);
    Ok(isolate_with_multiplicity(p, &iv)?
        .iter()
        .map(|(_, m)| *m as usize)
        .sum())
}

/// Isolating intervals of the distinct roots in `(lo, hi]`, each tagged with
/// its multiplicity as a root of `p` (from the square-free decomposition).
pub fn isolate_with_multiplicity(
    p: &Polynomial,
    iv: &Interval,
) -> Result<Vec<(Interval, u32)>, AlgebraError> {
    let mut found: Vec<(Interval, u32, Polynomial)> = Vec::new();
    for (factor, mult) in p.squarefree_decomposition()? {
        for r in isolate_roots(&factor, iv)? {
            found.push((r, mult, factor.clone()));
        }
    }
    // Roots of different factors are distinct; refine until no two overlap.
    loop {
        found.sort_by(|x, y| x.0.lo().cmp(y.0.lo()));
        let clash = (1..found.len()).find(|&k| found[k - 1].0.overlaps(&found[k].0));
        let Some(k) = clash else { break };
        for idx in [k - 1, k] {
            let (r, _, f) = &found[idx];
            if !r.is_point() {
                let half = r.width() / int(2);
                found[idx].0 = refine_root(f, r, &half)?;
            }
        }
    }
    Ok(found.into_iter().map(|(r, m, _)| (r, m)).collect())
}

/// Sign of `p` just to the right of `x` (first nonzero derivative rule).
pub fn sign_right_of(p: &Polynomial, x: &Rational) -> i8 {
    let mut q = p.clone();
    while !q.is_zero() {
        let s = sign(&q.eval(x));
        if s != 0 {
            return s;
        }
        q = q.derivative();
    }
    0
}

/// Bound `b` such that every root of `p` lies in `(-b, b)`.
pub fn root_bound(p: &Polynomial) -> Result<Rational, AlgebraError> {
    let b = p.cauchy_bound()?;
    Ok(if b.is_positive() { b } else { Rational::one() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::ratio;

    fn p(cs: &[i64]) -> Polynomial {
        Polynomial::from_i64(cs)
    }

    fn iv(a: Rational, b: Rational) -> Interval {
        Interval::new(a, b)
    }

    fn product_of_roots(roots: &[Rational]) -> Polynomial {
        roots.iter().fold(Polynomial::one(), |acc, r| {
            &acc * &Polynomial::linear(-r.clone(), Rational::one())
        })
    }

    #[test]
    fn counts_on_half_open_intervals() {
        assert_eq!(
            count_real_roots(&p(&[-1, 0, 1]), &iv(int(0), int(2))).unwrap(),
            1
        );
        assert_eq!(
            count_real_roots(&p(&[1, 0, 1]), &iv(int(-10), int(10))).unwrap(),
            0
        );
        // Root exactly at the right end is included, at the left end excluded.
        assert_eq!(
            count_real_roots(&p(&[-1, 1]), &iv(int(0), int(1))).unwrap(),
            1
        );
        assert_eq!(
            count_real_roots(&p(&[-1, 1]), &iv(int(1), int(2))).unwrap(),
            0
        );
        assert!(count_real_roots(&Polynomial::zero(), &iv(int(0), int(1))).is_err());
    }

    #[test]
    fn multiple_roots_count_once() {
        let f = &p(&[-1, 1]).pow(3) * &p(&[2, 1]);
        assert_eq!(count_real_roots(&f, &iv(int(-5), int(5))).unwrap(), 2);
    }

    #[test]
    fn isolates_simple_cases() {
        let one = isolate_roots(&p(&[-1, 0, 1]), &iv(int(0), int(2))).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].contains(&int(1)));

        let two = product_of_roots(&[ratio(1, 4), ratio(1, 2)]);
        let ivs = isolate_roots(&two, &iv(int(0), int(1))).unwrap();
        assert_eq!(ivs.len(), 2);
        assert!(!ivs[0].overlaps(&ivs[1]));
        assert!(ivs[0].contains(&ratio(1, 4)) && ivs[1].contains(&ratio(1, 2)));
    }

    #[test]
    fn isolates_wilkinson_style_product() {
        let roots: Vec<_> = (1..=5).map(|k| ratio(k, 10)).collect();
        let f = product_of_roots(&roots);
        let ivs = isolate_roots(&f, &iv(int(0), int(1))).unwrap();
        assert_eq!(ivs.len(), 5);
        for (r, i) in roots.iter().zip(&ivs) {
            assert!(i.contains(r));
        }
        for w in ivs.windows(2) {
            assert!(w[0].hi() < w[1].lo());
        }
    }

    #[test]
    fn refine_sqrt_two() {
        let w = ratio(1, 1_000_000);
        let r = refine_root(&p(&[-2, 0, 1]), &iv(int(1), int(2)), &w).unwrap();
        assert!(r.width() <= w);
        // Bisection oracle in floating point.
        let (mut a, mut b) = (1.0f64, 2.0f64);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if m * m - 2.0 < 0.0 {
                a = m
            } else {
                b = m
            }
        }
        let lo = crate::exactalg::rational::to_f64(r.lo());
        let hi = crate::exactalg::rational::to_f64(r.hi());
        assert!(lo <= a && b <= hi + 1e-15);
        assert_eq!(format!("{:.6}", 0.5 * (lo + hi)), "1.414214");
    }

    #[test]
    fn refine_rational_root_and_point_inputs() {
        let f = Polynomial::linear(ratio(-1, 3), int(1));
        let w = ratio(1, 1000);
        let r = refine_root(&f, &iv(int(0), int(1)), &w).unwrap();
        assert!(r.contains(&ratio(1, 3)) && r.width() <= w);

        let g = Polynomial::linear(ratio(-1, 2), int(1));
        let pt = Interval::point(ratio(1, 2));
        assert_eq!(refine_root(&g, &pt, &w).unwrap(), pt);
    }

    #[test]
    fn refine_rejects_non_isolating_input() {
        let f = p(&[-1, 0, 1]);
        let w = ratio(1, 1000);
        assert_eq!(
            refine_root(&f, &iv(int(-2), int(2)), &w),
            Err(AlgebraError::NoIsolatedRoot)
        );
        assert_eq!(
            refine_root(&f, &iv(int(2), int(3)), &w),
            Err(AlgebraError::NoIsolatedRoot)
        );
    }

    #[test]
    fn refine_double_root_without_sign_change() {
        let f = p(&[-1, 1]).pow(2);
        let w = ratio(1, 1 << 20);
        let r = refine_root(&f, &iv(ratio(1, 3), int(3)), &w).unwrap();
        assert!(r.contains(&int(1)));
    }

    #[test]
    fn descartes_examples() {
        assert_eq!(descartes_bound(&p(&[2, -3, 1])).unwrap(), 2);
        assert_eq!(descartes_bound(&p(&[1, 1, 1])).unwrap(), 0);
        assert!(descartes_bound(&Polynomial::zero()).is_err());
        // Sparse: t nonzero terms give at most t-1 sign changes.
        let sparse = p(&[1, 0, 0, -1, 0, 0, 0, 1]);
        assert!(descartes_bound(&sparse).unwrap() < sparse.term_count());
    }

    #[test]
    fn multiplicities_are_reported_separately() {
        let f = &p(&[-1, 1]).pow(2) * &p(&[-3, 1]);
        let roots = isolate_with_multiplicity(&f, &iv(int(0), int(4))).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].1, 2);
        assert_eq!(roots[1].1, 1);
        assert_eq!(count_positive_roots_with_multiplicity(&f).unwrap(), 3);
        assert_eq!(count_positive_roots(&f).unwrap(), 2);
    }
}
