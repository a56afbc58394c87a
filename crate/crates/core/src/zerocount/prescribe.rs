//! Instances with zeros at prescribed orbit labels.
//!
//! `Phi` is linear in the coefficients, so requiring `Phi(t) = 0` at each
//! target is a linear system. Slot values at the targets are irrational; they
//! are replaced by 128-bit dyadic approximations, the exact rational
//! nullspace is taken, and every candidate is checked with `count_zeros`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::count::{count_zeros, ZeroReport};
use super::{theorem_bound, ZeroCountError};
use crate::exactalg::rational::Rational;
use crate::melnikov::{Component, MelnikovBasis, NormalForm, PerturbCoeffs, SystemFamily};

const EVAL_BITS: u32 = 128;

type Slot = (Component, u32, u32);

/// Coefficient vector of a normal form, keyed by (part, power).
fn flatten(nf: &NormalForm) -> BTreeMap<(u8, usize), Rational> {
    let mut out = BTreeMap::new();
    let mut put = |part: u8, coeffs: &[Rational]| {
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.insert((part, k), c.clone());
            }
        }
    };
    match nf {
        NormalForm::Generic(g) => {
            put(0, g.p.coeffs());
            put(1, g.q.coeffs());
            put(2, g.r.coeffs());
        }
        NormalForm::Confluent(c) => put(0, c.pr.coeffs()),
    }
    out
}

/// Sparse row keyed by (component tag, coefficient position).
type SparseRow = BTreeMap<(u8, usize), Rational>;

/// Slots whose contributions are linearly independent, in index order.
fn independent_slots(basis: &MelnikovBasis) -> Vec<(Slot, NormalForm)> {
    // Echelon rows, each stored with its pivot key.
    let mut rows: Vec<((u8, usize), SparseRow)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, j) in PerturbCoeffs::index_set(basis.n()) {
        for which in [Component::A, Component::B] {
            let nf = basis.slot(which, i, j);
            if nf.is_zero() {
                continue;
            }
            let mut v = flatten(&nf);
            for (pivot, row) in &rows {
                if let Some(c) = v.get(pivot).cloned() {
                    let f = &c / &row[pivot];
                    for (k, x) in row {
                        let e = v.entry(*k).or_insert_with(Rational::zero);
                        *e -= &f * x;
                        if e.is_zero() {
                            v.remove(k);
                        }
                    }
                }
            }
            if let Some(pivot) = v.keys().next().copied() {
                rows.push((pivot, v));
                chosen.push(((which, i, j), nf));
            }
        }
    }
    chosen
}

/// Basis of the rational nullspace of `m` (rows x cols).
fn nullspace(mut m: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

fn to_coeffs(slots: &[Slot], v: &[Rational], n: u32, bound: &Rational) -> Option<PerturbCoeffs> {
    let max = v.iter().map(|x| x.abs()).max()?;
    if max.is_zero() {
        return None;
    }
    let scale = bound / max;
    let mut c = PerturbCoeffs::new(n, bound.clone()).ok()?;
    for (&(which, i, j), x) in slots.iter().zip(v) {
        c.set(which, i, j, x * &scale).ok()?;
    }
    Some(c)
}

/// Each target lies within `tol` of its own certified zero, and nothing else.
fn matches_targets(rep: &ZeroReport, targets: &[Rational], tol: &Rational) -> bool {
    if rep.count_lo != targets.len() || rep.count_hi != targets.len() {
        return false;
    }
    targets.iter().zip(&rep.certified_zeros).all(|(t, z)| {
        let iv = &z.interval;
        z.sign_change && &(iv.lo() - tol) <= t && t <= &(iv.hi() + tol)
    })
}

/// Coefficients in the box `[-bound, bound]` whose Melnikov function has
/// exactly the zeros `targets` in `(0, H0)` (each up to about `2^-100 H0`),
/// all simple and certified.
pub fn prescribe_zeros(
    family: &SystemFamily,
    n: u32,
    targets: &[Rational],
    bound: &Rational,
) -> Result<PerturbCoeffs, ZeroCountError> {
    let h0 = family.h0();
    let mut sorted = targets.to_vec();
    sorted.sort();
    for t in &sorted {
        if !t.is_positive() || *t >= h0 {
            return Err(ZeroCountError::TargetOutsideAnnulus(t.to_string()));
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ZeroCountError::DuplicateTargets);
    }
    let tb = theorem_bound(family, n);
    if !tb.admits(sorted.len()) {
        return Err(ZeroCountError::TooManyTargets(sorted.len(), tb.to_string()));
    }
    let basis = MelnikovBasis::new(family, n)?;
    let slots = independent_slots(&basis);
    let k = sorted.len();
    if slots.len() <= k {
        return Err(ZeroCountError::Infeasible);
    }
    let tol = &h0 * Rational::new(1.into(), num_bigint::BigInt::one() << 90usize);
    let mut last = None;
    for used in k + 1..=slots.len() {
        let chosen = &slots[..used];
        let matrix: Vec<Vec<Rational>> = sorted
            .iter()
            .map(|t| {
                chosen
                    .iter()
                    .map(|(_, nf)| nf.enclose_scaled(t, EVAL_BITS).midpoint())
                    .collect()
            })
            .collect();
        let null = nullspace(matrix, used);
        let mut candidates = null.clone();
        for a in 0..null.len() {
            for b in a + 1..null.len() {
                candidates.push(null[a].iter().zip(&null[b]).map(|(x, y)| x + y).collect());
                candidates.push(null[a].iter().zip(&null[b]).map(|(x, y)| x - y).collect());
            }
        }
        let keys: Vec<Slot> = chosen.iter().map(|(s, _)| *s).collect();
        for v in candidates {
            let Some(coeffs) = to_coeffs(&keys, &v, n, bound) else {
                continue;
            };
            let nf = basis.assemble(&coeffs)?;
            let rep = match count_zeros(&nf, n) {
                Ok(r) => r,
                Err(ZeroCountError::IdenticallyZero) => continue,
                Err(e) => return Err(e),
            };
            if matches_targets(&rep, &sorted, &tol) {
                return Ok(coeffs);
            }
            last = Some((rep.count_lo, rep.count_hi));
        }
    }
    match last {
        Some((found_lo, found_hi)) => Err(ZeroCountError::VerificationMismatch {
            expected: k,
            found_lo,
            found_hi,
        }),
        None => Err(ZeroCountError::Infeasible),
    }
}
