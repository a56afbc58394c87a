//! Limit cycles as sign changes of the return-map displacement.

use rayon::prelude::*;

use super::flow::{displacement, FlowConfig};
use super::FlowError;
use crate::exactalg::rational::to_f64;
use crate::melnikov::{PerturbCoeffs, SystemFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Attracting,
    Repelling,
    Undecided,
}

impl Stability {
    pub fn name(self) -> &'static str {
        match self {
            Stability::Attracting => "attracting",
            Stability::Repelling => "repelling",
            Stability::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cycle {
    pub h: f64,
    pub stability: Stability,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleReport {
    pub cycles: Vec<Cycle>,
    pub grid: Vec<f64>,
    pub epsilon: f64,
    /// Largest grid spacing; cycles closer together than this can be missed.
    pub resolution: f64,
    pub failures: Vec<(f64, FlowError)>,
}

/// `points` labels spread uniformly over `[0.01, 0.9] * H0`.
pub fn default_grid(family: &SystemFamily, points: usize) -> Vec<f64> {
    let h0 = to_f64(&family.h0());
    let (lo, hi) = (0.01 * h0, 0.9 * h0);
    let n = points.max(2);
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn sgn(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

pub fn find_limit_cycles(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    cfg: &FlowConfig,
    grid: &[f64],
) -> CycleReport {
    let resolution = grid
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    // The unperturbed system is a center: no isolated cycles to find.
    if coeffs.is_zero() || cfg.epsilon == 0.0 {
        return CycleReport {
            cycles: Vec::new(),
            grid: grid.to_vec(),
            epsilon: cfg.epsilon,
            resolution,
            failures: Vec::new(),
        };
    }
    let values: Vec<Result<f64, FlowError>> = grid
        .par_iter()
        .map(|&h| displacement(family, coeffs, cfg, h))
        .collect();
    let mut failures = Vec::new();
    let mut ok: Vec<(f64, f64)> = Vec::new();
    for (&h, v) in grid.iter().zip(values) {
        match v {
            // Values inside the integration noise carry no sign.
            Ok(d) if d.abs() <= noise_floor(cfg, h) => {}
            Ok(d) => ok.push((h, d)),
            Err(e) => failures.push((h, e)),
        }
    }
    let brackets: Vec<(f64, f64, f64, f64)> = ok
        .windows(2)
        .filter(|w| sgn(w[0].1) * sgn(w[1].1) < 0)
        .map(|w| (w[0].0, w[0].1, w[1].0, w[1].1))
        .collect();
    let mut cycles: Vec<Cycle> = brackets
        .par_iter()
        .map(|&(a, da, b, db)| refine(family, coeffs, cfg, a, da, b, db))
        .collect();
    cycles.sort_by(|x, y| x.h.total_cmp(&y.h));
    CycleReport {
        cycles,
        grid: grid.to_vec(),
        epsilon: cfg.epsilon,
        resolution,
        failures,
    }
}

fn noise_floor(cfg: &FlowConfig, h: f64) -> f64 {
    10.0 * cfg.step_tolerance * h.max(1.0)
}

/// Orbits inside move out and orbits outside move in: attracting.
fn stability_of(left: f64, right: f64) -> Stability {
    match (sgn(left), sgn(right)) {
        (1, -1) => Stability::Attracting,
        (-1, 1) => Stability::Repelling,
        _ => Stability::Undecided,
    }
}

fn refine(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    cfg: &FlowConfig,
    mut a: f64,
    da: f64,
    mut b: f64,
    db: f64,
) -> Cycle {
    let stability = stability_of(da, db);
    let s_a = sgn(da);
    for _ in 0..40 {
        if b - a < 1e-10 * b {
            break;
        }
        let m = 0.5 * (a + b);
        match displacement(family, coeffs, cfg, m) {
            Ok(d) if d.abs() <= noise_floor(cfg, m) => return Cycle { h: m, stability },
            Ok(d) if sgn(d) == s_a => a = m,
            Ok(_) => b = m,
            Err(_) => break,
        }
    }
    Cycle {
        h: 0.5 * (a + b),
        stability,
    }
}

/// Whether the cycles pair up one-to-one with `zeros` (intervals in `h`),
/// each label within `tol` of its interval.
pub fn match_cycles(cycles: &[Cycle], zeros: &[(f64, f64)], tol: f64) -> bool {
    cycles.len() == zeros.len()
        && cycles
            .iter()
            .zip(zeros)
            .all(|(c, &(lo, hi))| c.h >= lo - tol && c.h <= hi + tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correspondence {
    pub report: CycleReport,
    pub matched: bool,
    /// The match needed the halved epsilon.
    pub retried: bool,
}

/// Detects cycles at `cfg.epsilon`, retrying once at half of it on mismatch.
pub fn verify_correspondence(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    cfg: &FlowConfig,
    grid: &[f64],
    zeros: &[(f64, f64)],
    tol: f64,
) -> Correspondence {
    let report = find_limit_cycles(family, coeffs, cfg, grid);
    if match_cycles(&report.cycles, zeros, tol) {
        return Correspondence {
            report,
            matched: true,
            retried: false,
        };
    }
    let half = cfg.with_epsilon(cfg.epsilon / 2.0);
    let report = find_limit_cycles(family, coeffs, &half, grid);
    let matched = match_cycles(&report.cycles, zeros, tol);
    Correspondence {
        report,
        matched,
        retried: true,
    }
}
