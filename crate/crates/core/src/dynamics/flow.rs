//! The perturbed system
//!
//! ```text
//! x' = y  + eps f(x, y) / D(x)
//! y' = -x + eps g(x, y) / D(x)
//! ```
//!
//! integrated with an embedded Dormand-Prince 5(4) pair, and its first
//! return to the positive `y`-axis.

use super::{FloatModel, FlowError};
use crate::melnikov::{PerturbCoeffs, SystemFamily};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub epsilon: f64,
    /// Local error allowed per unit time.
    pub step_tolerance: f64,
    pub max_return_time: f64,
    /// Minimum `|1 - alpha_i x|` at which the vector field may be evaluated.
    pub guard: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            step_tolerance: 1e-12,
            max_return_time: 50.0,
            guard: 1e-6,
        }
    }
}

impl FlowConfig {
    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }
}

/// Point of return on the positive `y`-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Section {
    pub x: f64,
    pub y: f64,
    pub time: f64,
}

type State = [f64; 2];

struct Field<'a> {
    model: &'a FloatModel,
    eps: f64,
    guard: f64,
}

impl Field<'_> {
    fn eval(&self, s: State) -> Result<State, FlowError> {
        let [x, y] = s;
        let (f1, f2) = self.model.factors(x);
        if f1.abs() < self.guard || f2.abs() < self.guard {
            return Err(FlowError::NearSingularLine(x));
        }
        if self.eps == 0.0 {
            return Ok([y, -x]);
        }
        let (f, g) = self.model.perturbation(x, y);
        let d = f1.powi(self.model.m1) * f2.powi(self.model.m2);
        Ok([y + self.eps * f / d, -x + self.eps * g / d])
    }
}

/// Stage weights; the system is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One DP5 step; returns the fifth-order solution and the error estimate.
fn dp_step(field: &Field, s: State, dt: f64) -> Result<(State, f64), FlowError> {
    let mut k = [[0.0; 2]; 7];
    k[0] = field.eval(s)?;
    for i in 1..7 {
        let mut st = s;
        for (j, kj) in k.iter().enumerate().take(i) {
            st[0] += dt * A[i][j] * kj[0];
            st[1] += dt * A[i][j] * kj[1];
        }
        if i == 6 {
            // Row 7 is the fifth-order solution itself (FSAL).
            k[6] = field.eval(st)?;
            let err_x: f64 = (0..7).map(|j| E[j] * k[j][0]).sum::<f64>() * dt;
            let err_y: f64 = (0..7).map(|j| E[j] * k[j][1]).sum::<f64>() * dt;
            return Ok((st, err_x.abs().max(err_y.abs())));
        }
        k[i] = field.eval(st)?;
    }
    unreachable!()
}

/// Integrates from `start` until the first crossing of the positive
/// `y`-axis from `x < 0` to `x >= 0`, after the orbit has visited `x < 0`.
pub fn integrate_to_section(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    cfg: &FlowConfig,
    start: (f64, f64),
) -> Result<Section, FlowError> {
    let model = FloatModel::new(family, coeffs);
    let field = Field {
        model: &model,
        eps: cfg.epsilon,
        guard: cfg.guard,
    };
    let tol = cfg.step_tolerance;
    let mut s: State = [start.0, start.1];
    let mut t = 0.0;
    let mut dt: f64 = 0.05;
    let mut visited_left = false;
    while t < cfg.max_return_time {
        let (next, err) = dp_step(&field, s, dt)?;
        if err <= tol * dt {
            let r2 = next[0] * next[0] + next[1] * next[1];
            if r2 >= model.h0 || r2 <= 0.0 {
                return Err(FlowError::LeftAnnulus {
                    x: next[0],
                    y: next[1],
                });
            }
            if visited_left && s[0] < 0.0 && next[0] >= 0.0 && next[1] > 0.0 {
                return locate_crossing(&field, s, t, dt, next);
            }
            visited_left |= next[0] < 0.0;
            s = next;
            t += dt;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (tol * dt / err).powf(0.2)).clamp(0.2, 5.0)
        };
        dt = (dt * factor).min(0.2);
        if dt < 1e-14 {
            return Err(FlowError::StepUnderflow(t));
        }
    }
    Err(FlowError::SectionNotReached(cfg.max_return_time))
}

/// Illinois iteration on the step length `tau` in `(0, dt]` for `x(t + tau) = 0`.
fn locate_crossing(
    field: &Field,
    s: State,
    t: f64,
    dt: f64,
    end: State,
) -> Result<Section, FlowError> {
    let (mut a, mut fa) = (0.0, s[0]);
    let (mut b, mut fb) = (dt, end[0]);
    let mut best = (dt, end);
    let mut side = 0;
    for _ in 0..100 {
        let tau = (a * fb - b * fa) / (fb - fa);
        let (st, _) = dp_step(field, s, tau)?;
        best = (tau, st);
        let fx = st[0];
        if fx.abs() < 1e-15 || (b - a).abs() < 1e-15 {
            break;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = tau;
            fa = fx;
            if side == -1 {
                fb /= 2.0;
            }
            side = -1;
        } else {
            b = tau;
            fb = fx;
            if side == 1 {
                fa /= 2.0;
            }
            side = 1;
        }
    }
    let (tau, st) = best;
    Ok(Section {
        x: st[0],
        y: st[1],
        time: t + tau,
    })
}

/// `h_return - h` after one return, starting from `(0, sqrt(h))`.
pub fn displacement(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    cfg: &FlowConfig,
    h: f64,
) -> Result<f64, FlowError> {
    let h0 = crate::exactalg::rational::to_f64(&family.h0());
    if !(h > 0.0 && h < h0) {
        return Err(FlowError::OutsideAnnulus { h, h0 });
    }
    let sec = integrate_to_section(family, coeffs, cfg, (0.0, h.sqrt()))?;
    Ok(sec.x * sec.x + sec.y * sec.y - h)
}

/// Empirical `c` in `displacement ~ eps * c * Phi(h)` at `h_ref`.
pub fn estimate_normalization(
    family: &SystemFamily,
    coeffs: &PerturbCoeffs,
    cfg: &FlowConfig,
    h_ref: f64,
) -> Result<f64, FlowError> {
    let d = displacement(family, coeffs, cfg, h_ref)?;
    let phi = super::numeric_melnikov(family, coeffs, h_ref, 64)?;
    Ok(d / (cfg.epsilon * phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{int, ratio};

    fn family() -> SystemFamily {
        SystemFamily::new(ratio(1, 2), ratio(-1, 3), 1, 1).unwrap()
    }

    fn coeffs() -> PerturbCoeffs {
        let mut c = PerturbCoeffs::new(2, int(1)).unwrap();
        c.set_a(0, 0, ratio(1, 2)).unwrap();
        c.set_b(0, 1, ratio(-1, 3)).unwrap();
        c
    }

    #[test]
    fn unperturbed_orbit_returns_after_two_pi() {
        let cfg = FlowConfig::default().with_epsilon(0.0);
        for frac in [0.1, 0.5, 0.9] {
            let h: f64 = 4.0 * frac;
            let sec = integrate_to_section(&family(), &coeffs(), &cfg, (0.0, h.sqrt())).unwrap();
            assert!(
                (sec.time - std::f64::consts::TAU).abs() < 1e-8,
                "time {}",
                sec.time
            );
            assert!(sec.x.abs() < 1e-12);
            let drift = (sec.x * sec.x + sec.y * sec.y - h).abs();
            assert!(drift <= 10.0 * cfg.step_tolerance, "drift {drift}");
        }
    }

    #[test]
    fn displacement_is_first_order_in_eps() {
        let cfg = FlowConfig::default();
        let h = 1.5;
        let d1 = displacement(&family(), &coeffs(), &cfg, h).unwrap();
        let d2 = displacement(&family(), &coeffs(), &cfg.with_epsilon(5e-4), h).unwrap();
        assert!((d1 / d2 - 2.0).abs() < 1e-2, "{d1} {d2}");
        let c = estimate_normalization(&family(), &coeffs(), &cfg, h).unwrap();
        assert!(c > 0.0);
    }

    #[test]
    fn guard_stops_near_singular_line() {
        // alpha1 = 1/2 puts the singular line at x = 2; an orbit of label
        // close to H0 = 4 with a strong outward push reaches it.
        let mut c = PerturbCoeffs::new(1, int(1)).unwrap();
        c.set_a(0, 0, int(1)).unwrap();
        let cfg = FlowConfig {
            epsilon: 0.5,
            ..FlowConfig::default()
        };
        let r = integrate_to_section(&family(), &c, &cfg, (0.0, 1.99));
        assert!(r.is_err());
    }
}
