//! Periodic trapezoid rule for `Phi(h) = oint (x f + y g) / D dt` over
//! `x = sqrt(h) sin t`, `y = sqrt(h) cos t`.

use super::{FloatModel, FlowError};
use crate::melnikov::{PerturbCoeffs, SystemFamily};

const MAX_NODES: usize = 1 << 18;
const REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Trapezoid sum of `|integrand|`, the natural size of `value` near zeros.
    pub scale: f64,
    pub nodes: usize,
}

fn trapezoid(model: &FloatModel, h: f64, nodes: usize) -> (f64, f64) {
    let dt = std::f64::consts::TAU / nodes as f64;
    let s = h.sqrt();
    let (mut sum, mut abs) = (0.0, 0.0);
    for k in 0..nodes {
        let (st, ct) = (k as f64 * dt).sin_cos();
        let (x, y) = (s * st, s * ct);
        let (f, g) = model.perturbation(x, y);
        let v = (x * f + y * g) / model.denominator(x);
        sum += v;
        abs += v.abs();
    }
    (sum * dt, abs * dt)
}

/// Doubles `nodes` until two successive sums agree to `1e-12` relative to
/// `max(|value|, scale)`, or fails at `2^18` nodes.
pub fn numeric_melnikov_detailed(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    h: f64,
    nodes: usize,
) -> Result<Quadrature, FlowError> {
    let model = FloatModel::new(family, coeffs);
    if !(h > 0.0 && h < model.h0) {
        return Err(FlowError::OutsideAnnulus { h, h0: model.h0 });
    }
    let mut n = nodes.max(4).next_power_of_two();
    let (mut prev, _) = trapezoid(&model, h, n);
    loop {
        n *= 2;
        let (value, scale) = trapezoid(&model, h, n);
        let change = (value - prev).abs();
        if change <= REL_TOL * value.abs().max(scale) {
            return Ok(Quadrature {
                value,
                scale,
                nodes: n,
            });
        }
        if n >= MAX_NODES {
            return Err(FlowError::NoConvergence { nodes: n, change });
        }
        prev = value;
    }
}

pub fn numeric_melnikov(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    h: f64,
    nodes: usize,
) -> Result<f64, FlowError> {
    numeric_melnikov_detailed(family, coeffs, h, nodes).map(|q| q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{from_f64, int, ratio};
    use crate::melnikov::{assemble, evaluate_normal_form};

    fn family() -> SystemFamily {
        SystemFamily::new(ratio(1, 2), ratio(-1, 3), 1, 1).unwrap()
    }

    #[test]
    fn zero_coefficients_integrate_to_zero() {
        let c = PerturbCoeffs::new(2, int(1)).unwrap();
        assert_eq!(numeric_melnikov(&family(), &c, 1.0, 16).unwrap(), 0.0);
    }

    #[test]
    fn single_coefficient_matches_exact_value() {
        let f = family();
        let mut c = PerturbCoeffs::new(0, int(1)).unwrap();
        c.set_a(0, 0, int(1)).unwrap();
        let q = numeric_melnikov(&f, &c, 0.5, 16).unwrap();
        let nf = assemble(&f, &c).unwrap();
        let exact = evaluate_normal_form(&nf, &ratio(1, 2), 20).unwrap();
        let e = crate::exactalg::rational::to_f64(&exact.midpoint());
        assert!((q - e).abs() <= 1e-9 * e.abs());
    }

    #[test]
    fn vanishes_towards_the_center() {
        let f = family();
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        c.set_b(0, 1, int(1)).unwrap();
        c.set_a(1, 0, ratio(1, 2)).unwrap();
        let small = numeric_melnikov(&f, &c, 1e-8, 16).unwrap();
        assert!(small.abs() < 1e-6);
        let nf = assemble(&f, &c).unwrap();
        let e = evaluate_normal_form(&nf, &from_f64(1e-8).unwrap(), 20).unwrap();
        assert!((crate::exactalg::rational::to_f64(&e.midpoint()) - small).abs() < 1e-15);
    }

    #[test]
    fn rejects_h_outside_annulus() {
        let c = PerturbCoeffs::new(1, int(1)).unwrap();
        assert!(matches!(
            numeric_melnikov(&family(), &c, 4.0, 16),
            Err(FlowError::OutsideAnnulus { .. })
        ));
        assert!(numeric_melnikov(&family(), &c, 0.0, 16).is_err());
    }
}
