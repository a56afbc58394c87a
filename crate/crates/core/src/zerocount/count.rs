//! Certified counting of the zeros of `Phi` in `(0, H0)`.
//!
//! Generic families: roots of the eliminant are isolated exactly, then each
//! candidate is either certified (opposite signs of `Phi` at the ends of its
//! isolating interval), rejected as a squaring artifact (an enclosure of
//! `Phi` over the interval excludes zero), or left undecided once the
//! interval is narrower than the precision cap.
//!
//! Confluent families need no squaring: in `r = sqrt(1 - a^2 h)` the zeros
//! of `Phi` are exactly the roots of `Pr` in `(0, 1)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::eliminant::{eliminant_degree_bound, eliminate_radicals};
use super::{theorem_bound, TheoremBound, ZeroCountError};
use crate::exactalg::rational::{int, sign, to_f64, Rational};
use crate::exactalg::roots::{isolate_with, SturmSequence};
use crate::exactalg::{Interval, Polynomial};
use crate::melnikov::{ConfluentNormalForm, MelnikovNormalForm, NormalForm};

/// Variable of the eliminant polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    /// Orbit label `h`.
    H,
    /// `r = sqrt(1 - a^2 h)` (confluent families).
    R,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedZero {
    /// Enclosure of the zero in `h`, strictly inside `(0, H0)`.
    pub interval: Interval,
    /// `true` when `Phi` is certified to change sign across `interval`;
    /// `false` marks a candidate that could not be decided.
    pub sign_change: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroReport {
    pub theorem_bound: TheoremBound,
    pub variable: Variable,
    /// Square-free eliminant with the forced roots at the annulus ends removed.
    pub eliminant: Polynomial,
    pub eliminant_degree: usize,
    /// Degree of the raw eliminant, before the forced roots are divided out.
    pub raw_degree: usize,
    /// Degree predicted by the squaring argument.
    pub degree_formula: i64,
    /// Distinct roots of the eliminant inside the open annulus.
    pub candidates: usize,
    pub artifacts: usize,
    pub certified_zeros: Vec<CertifiedZero>,
    pub count_lo: usize,
    pub count_hi: usize,
    /// The eliminant has a repeated root inside the annulus.
    pub multiple_root: bool,
}

impl ZeroReport {
    pub fn is_decided(&self) -> bool {
        self.count_lo == self.count_hi
    }
}

#[derive(Clone, Debug)]
pub struct CountConfig {
    /// Candidates still undecided at width `cap * H0` stay undecided.
    pub cap: Rational,
    /// Reported intervals are refined to width `report_width * H0`.
    pub report_width: Rational,
}

impl Default for CountConfig {
    fn default() -> Self {
        let ten = BigInt::from(10);
        Self {
            cap: Rational::new(BigInt::one(), num_traits::pow(ten.clone(), 30)),
            report_width: Rational::new(BigInt::one(), num_traits::pow(ten, 12)),
        }
    }
}

pub fn count_zeros(nf: &NormalForm, n: u32) -> Result<ZeroReport, ZeroCountError> {
    count_zeros_with(nf, n, &CountConfig::default())
}

pub fn count_zeros_with(
    nf: &NormalForm,
    n: u32,
    cfg: &CountConfig,
) -> Result<ZeroReport, ZeroCountError> {
    match nf {
        NormalForm::Generic(g) => count_generic(g, n, cfg),
        NormalForm::Confluent(c) => count_confluent(c, n, cfg),
    }
}

/// Strips every factor of `x - at` from `p`.
fn strip_root(mut p: Polynomial, at: &Rational) -> Polynomial {
    let lin = Polynomial::linear(-at.clone(), Rational::one());
    while !p.is_zero() && p.eval(at).is_zero() {
        p = p.div_exact(&lin).expect("root was checked");
    }
    p
}

/// Working precision for an interval of width `w` relative to scale `h0`.
fn bits_for(w: &Rational, h0: &Rational) -> u32 {
    let rel = to_f64(&(w / h0));
    let extra = if rel > 0.0 {
        (-rel.log2()).max(0.0) as u32
    } else {
        0
    };
    96 + extra
}

fn has_repeated_root_inside(
    e: &Polynomial,
    lo: &Rational,
    hi: &Rational,
) -> Result<bool, ZeroCountError> {
    for (factor, mult) in e.squarefree_decomposition()? {
        if mult > 1 && SturmSequence::new(&factor)?.count(lo, hi) > 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Verdict {
    Zero(Interval),
    Undecided(Interval),
    Artifact,
}

struct GenericCtx<'a> {
    nf: &'a MelnikovNormalForm,
    base: &'a Polynomial,
    sturm: &'a SturmSequence,
    h0: Rational,
    cap: Rational,
    report: Rational,
}

impl GenericCtx<'_> {
    fn phi_sign_at(&self, h: &Rational, bits: u32) -> Option<Ordering> {
        self.nf.enclose_scaled(h, bits).sign()
    }

    /// One bisection step on the eliminant; `Err` carries a midpoint that is the root.
    fn halve(&self, lo: &Rational, hi: &Rational) -> Result<(Rational, Rational), Rational> {
        let mid = (lo + hi) / int(2);
        let s_mid = sign(&self.base.eval(&mid));
        if s_mid == 0 {
            return Err(mid);
        }
        if s_mid == sign(&self.base.eval(lo)) {
            Ok((mid, hi.clone()))
        } else {
            Ok((lo.clone(), mid))
        }
    }

    fn decide(&self, iv: &Interval) -> Verdict {
        if iv.is_point() {
            return self.decide_exact(iv.lo().clone());
        }
        let (mut lo, mut hi) = (iv.lo().clone(), iv.hi().clone());
        loop {
            let inside = lo.is_positive() && hi < self.h0;
            let width = &hi - &lo;
            if inside {
                let bits = bits_for(&width, &self.h0);
                let s_lo = self.phi_sign_at(&lo, bits);
                let s_hi = self.phi_sign_at(&hi, bits);
                if let (Some(a), Some(b)) = (s_lo, s_hi) {
                    if a != Ordering::Equal && b != Ordering::Equal && a != b {
                        return Verdict::Zero(self.refine_report(lo, hi));
                    }
                }
                let range = Interval::new(lo.clone(), hi.clone());
                if !self.nf.enclose_scaled_over(&range, bits).contains_zero() {
                    return Verdict::Artifact;
                }
                if width <= &self.cap * &self.h0 {
                    return Verdict::Undecided(range);
                }
            }
            match self.halve(&lo, &hi) {
                Ok((a, b)) => {
                    lo = a;
                    hi = b;
                }
                Err(root) => return self.decide_exact(root),
            }
        }
    }

    /// Candidate that is an exact rational root `c` of the eliminant.
    fn decide_exact(&self, c: Rational) -> Verdict {
        for bits in [96, 192, 384] {
            if !self.nf.enclose_scaled(&c, bits).contains_zero() {
                return Verdict::Artifact;
            }
        }
        // `c` is the only eliminant root within `delta`; check for a sign change.
        let mut delta = (&c).min(&(&self.h0 - &c)).clone() / int(2);
        while self.sturm.count(&(&c - &delta), &(&c + &delta)) > 1 {
            delta /= int(2);
        }
        let point = Interval::point(c.clone());
        loop {
            let bits = bits_for(&delta, &self.h0);
            let left = self.phi_sign_at(&(&c - &delta), bits);
            let right = self.phi_sign_at(&(&c + &delta), bits);
            if let (Some(a), Some(b)) = (left, right) {
                if a != Ordering::Equal && b != Ordering::Equal && a != b {
                    return Verdict::Zero(point);
                }
            }
            if delta <= &self.cap * &self.h0 {
                return Verdict::Undecided(point);
            }
            delta /= int(2);
        }
    }

    /// Shrinks a certified bracket to the report width.
    fn refine_report(&self, mut lo: Rational, mut hi: Rational) -> Interval {
        let target = &self.report * &self.h0;
        while &hi - &lo > target {
            match self.halve(&lo, &hi) {
                Ok((a, b)) => {
                    lo = a;
                    hi = b;
                }
                Err(root) => return Interval::point(root),
            }
        }
        Interval::new(lo, hi)
    }
}

fn count_generic(
    nf: &MelnikovNormalForm,
    n: u32,
    cfg: &CountConfig,
) -> Result<ZeroReport, ZeroCountError> {
    let raw = eliminate_radicals(nf)?;
    let h0 = nf.family.h0();
    let zero = Rational::zero();
    let reduced = strip_root(strip_root(raw.clone(), &zero), &h0);
    let multiple_root = has_repeated_root_inside(&reduced, &zero, &h0)?;
    let sturm = SturmSequence::new(&reduced)?;
    let base = sturm.base().clone();
    let candidates = isolate_with(&sturm, &zero, &h0);
    let ctx = GenericCtx {
        nf,
        base: &base,
        sturm: &sturm,
        h0: h0.clone(),
        cap: cfg.cap.clone(),
        report: cfg.report_width.clone(),
    };
    let verdicts: Vec<Verdict> = candidates.par_iter().map(|iv| ctx.decide(iv)).collect();
    let mut zeros = Vec::new();
    let mut artifacts = 0;
    for v in verdicts {
        match v {
            Verdict::Zero(interval) => zeros.push(CertifiedZero {
                interval,
                sign_change: true,
            }),
            Verdict::Undecided(interval) => zeros.push(CertifiedZero {
                interval,
                sign_change: false,
            }),
            Verdict::Artifact => artifacts += 1,
        }
    }
    let count_lo = zeros.iter().filter(|z| z.sign_change).count();
    Ok(ZeroReport {
        theorem_bound: theorem_bound(&nf.family, n),
        variable: Variable::H,
        eliminant_degree: base.degree().unwrap_or(0),
        eliminant: base,
        raw_degree: raw.degree().unwrap_or(0),
        degree_formula: eliminant_degree_bound(&nf.family, n),
        candidates: candidates.len(),
        artifacts,
        count_hi: zeros.len(),
        count_lo,
        certified_zeros: zeros,
        multiple_root,
    })
}

fn count_confluent(
    nf: &ConfluentNormalForm,
    n: u32,
    cfg: &CountConfig,
) -> Result<ZeroReport, ZeroCountError> {
    if nf.is_zero() {
        return Err(ZeroCountError::IdenticallyZero);
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    // Pr(1) = 0 always; every factor (1 - r) belongs to h = 0.
    let reduced = strip_root(strip_root(nf.pr.clone(), &one), &zero);
    let a2 = nf.alpha() * nf.alpha();
    let width = &cfg.report_width * &a2 / int(2);
    let mut zeros = Vec::new();
    let mut multiple_root = false;
    for (factor, mult) in reduced.squarefree_decomposition()? {
        let sturm = SturmSequence::new(&factor)?;
        for iv in isolate_with(&sturm, &zero, &one) {
            multiple_root |= mult > 1;
            let r_iv = refine_strict(&factor, iv, &width);
            let h_iv = Interval::new(nf.h_of_r(r_iv.hi()), nf.h_of_r(r_iv.lo()));
            zeros.push(CertifiedZero {
                interval: h_iv,
                sign_change: mult % 2 == 1,
            });
        }
    }
    zeros.sort_by(|a, b| a.interval.lo().cmp(b.interval.lo()));
    let count = zeros.len();
    let s = super::s_of(n) as i64;
    Ok(ZeroReport {
        theorem_bound: theorem_bound(&nf.family, n),
        variable: Variable::R,
        eliminant_degree: reduced.degree().unwrap_or(0),
        eliminant: reduced.squarefree_part()?.primitive(),
        raw_degree: nf.pr.degree().unwrap_or(0),
        degree_formula: 2 * s + nf.m as i64 - 1,
        candidates: count,
        artifacts: 0,
        certified_zeros: zeros,
        count_lo: count,
        count_hi: count,
        multiple_root,
    })
}

/// Refines an isolating interval of a square-free `p` in `(0, 1)` to width
/// `width`, keeping both ends strictly inside `(0, 1)`.
fn refine_strict(p: &Polynomial, iv: Interval, width: &Rational) -> Interval {
    if iv.is_point() {
        return iv;
    }
    let (mut lo, mut hi) = (iv.lo().clone(), iv.hi().clone());
    let s_lo = sign(&p.eval(&lo));
    while &hi - &lo > *width || !lo.is_positive() || hi >= Rational::one() {
        let mid = (&lo + &hi) / int(2);
        let s = sign(&p.eval(&mid));
        if s == 0 {
            return Interval::point(mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::ratio;
    use crate::melnikov::{assemble, PerturbCoeffs, SystemFamily};

    fn family() -> SystemFamily {
        SystemFamily::new(ratio(1, 2), ratio(-1, 3), 1, 1).unwrap()
    }

    #[test]
    fn constant_sign_instance_has_no_zeros() {
        // a_00 = 1: Phi = I_{1,0}, the integral of x/D, positive for h > 0.
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        c.set_a(0, 0, int(1)).unwrap();
        let nf = assemble(&family(), &c).unwrap();
        let rep = count_zeros(&nf, 2).unwrap();
        assert_eq!((rep.count_lo, rep.count_hi), (0, 0));
        assert_eq!(rep.theorem_bound, TheoremBound::Bound(5));
    }

    #[test]
    fn identically_zero_is_a_status() {
        let c = PerturbCoeffs::new(2, int(1)).unwrap();
        let nf = assemble(&family(), &c).unwrap();
        assert_eq!(count_zeros(&nf, 2), Err(ZeroCountError::IdenticallyZero));
    }

    #[test]
    fn polynomial_only_form_counts_its_roots() {
        // Hand-built Phi = R = h (h - 1)(h - 2), roots at 1 and 2 inside (0, 4).
        let nf = MelnikovNormalForm {
            p: Polynomial::zero(),
            q: Polynomial::zero(),
            r: Polynomial::from_i64(&[0, 2, -3, 1]),
            family: family(),
            merged: false,
        };
        let rep = count_zeros(&NormalForm::Generic(nf), 2).unwrap();
        assert_eq!((rep.count_lo, rep.count_hi), (2, 2));
        assert_eq!(rep.certified_zeros[0].interval, Interval::point(int(1)));
    }

    #[test]
    fn squaring_artifact_is_rejected() {
        // 1/r1 - 2 vanishes at r1 = 1/2 (h = 3); 1/r1 + 2 never does, yet both
        // square to the same eliminant 4 u1 - 1.
        let base = |c: i64| MelnikovNormalForm {
            p: Polynomial::one(),
            q: Polynomial::zero(),
            r: Polynomial::from_i64(&[c]),
            family: family(),
            merged: false,
        };
        let real = count_zeros(&NormalForm::Generic(base(-2)), 2).unwrap();
        assert_eq!((real.count_lo, real.count_hi), (1, 1));
        assert!(real.certified_zeros[0].interval.contains(&int(3)));
        let fake = count_zeros(&NormalForm::Generic(base(2)), 2).unwrap();
        assert_eq!((fake.count_lo, fake.count_hi), (0, 0));
        assert_eq!(fake.artifacts, 1);
    }

    #[test]
    fn confluent_counts_are_exact() {
        let f = SystemFamily::new(ratio(1, 2), ratio(1, 2), 1, 1).unwrap();
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        c.set_a(0, 0, int(1)).unwrap();
        c.set_a(2, 0, ratio(-1, 2)).unwrap();
        let nf = assemble(&f, &c).unwrap();
        let rep = count_zeros(&nf, 2).unwrap();
        assert!(rep.is_decided());
        assert!(rep.count_hi <= 2);
        assert_eq!(rep.variable, Variable::R);
        for z in &rep.certified_zeros {
            assert!(z.interval.lo().is_positive() && *z.interval.hi() < f.h0());
        }
    }
}
