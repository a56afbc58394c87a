//! Double-precision ground truth: trapezoid quadrature of the Melnikov
//! integral, direct integration of the perturbed flow, and limit-cycle
//! detection through the return map. Nothing here certifies anything.

pub mod cycles;
pub mod flow;
pub mod quadrature;

use thiserror::Error;

use crate::exactalg::rational::to_f64;
use crate::melnikov::{Component, PerturbCoeffs, SystemFamily};

pub use cycles::{
    default_grid, find_limit_cycles, match_cycles, verify_correspondence, Correspondence, Cycle,
    CycleReport, Stability,
};
pub use flow::{displacement, estimate_normalization, integrate_to_section, FlowConfig, Section};
pub use quadrature::{numeric_melnikov, numeric_melnikov_detailed, Quadrature};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("h = {h} outside the period annulus (0, {h0})")]
    OutsideAnnulus { h: f64, h0: f64 },
    #[error("quadrature did not converge with {nodes} nodes (last change {change:e})")]
    NoConvergence { nodes: usize, change: f64 },
    #[error("section not reached within time {0}")]
    SectionNotReached(f64),
    #[error("trajectory left the annulus at ({x}, {y})")]
    LeftAnnulus { x: f64, y: f64 },
    #[error("trajectory came within the guard distance of 1 - alpha x = 0 at x = {0}")]
    NearSingularLine(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
}

/// The family and perturbation converted once to `f64`.
#[derive(Clone, Debug)]
pub(crate) struct FloatModel {
    pub alpha1: f64,
    pub alpha2: f64,
    pub m1: i32,
    pub m2: i32,
    pub h0: f64,
    a: Vec<(i32, i32, f64)>,
    b: Vec<(i32, i32, f64)>,
}

impl FloatModel {
    pub fn new(family: &SystemFamily, coeffs: &PerturbCoeffs) -> Self {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (which, i, j, v) in coeffs.entries() {
            let t = (i as i32, j as i32, to_f64(v));
            match which {
                Component::A => a.push(t),
                Component::B => b.push(t),
            }
        }
        Self {
            alpha1: to_f64(family.alpha1()),
            alpha2: to_f64(family.alpha2()),
            m1: family.m1() as i32,
            m2: family.m2() as i32,
            h0: to_f64(&family.h0()),
            a,
            b,
        }
    }

    pub fn factors(&self, x: f64) -> (f64, f64) {
        (1.0 - self.alpha1 * x, 1.0 - self.alpha2 * x)
    }

    pub fn denominator(&self, x: f64) -> f64 {
        let (f1, f2) = self.factors(x);
        f1.powi(self.m1) * f2.powi(self.m2)
    }

    /// `(f(x, y), g(x, y))`, the two perturbation polynomials.
    pub fn perturbation(&self, x: f64, y: f64) -> (f64, f64) {
        let eval = |terms: &[(i32, i32, f64)]| {
            terms
                .iter()
                .map(|&(i, j, v)| v * x.powi(i) * y.powi(j))
                .sum()
        };
        (eval(&self.a), eval(&self.b))
    }
}
