//! Independent period measurement by direct integration of the planar flow
//! `ẋ = y, ẏ = −g(x)`.
//!
//! An adaptive Dormand–Prince 5(4) integrator starts on the section
//! `{y = 0}` at the right turning point and watches for sign changes of
//! `y`: the first crossing (y going negative → positive, at the left
//! turning point) marks the half period, the second (positive → negative,
//! back at the start) the full period. Crossing times are localized by
//! Brent's method on the cubic Hermite interpolant of each step. Energy
//! `H = y²/2 + G(x)` is monitored, never enforced.

use crate::error::{Error, Result};
use crate::period::turning_points;
use crate::potential::Potential;
use crate::roots::brent;

/// Integrator configuration.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    /// Initial time step.
    pub step: f64,
    /// Local relative error tolerance (absolute tolerance is 1e-3 of it).
    pub tol: f64,
    /// Hard cap on integration time.
    pub max_time: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            tol: 1e-12,
            max_time: 100.0 * 2.0 * std::f64::consts::PI,
        }
    }
}

/// Measured period and diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct SimResult {
    /// Time of the second section crossing: the full period.
    pub period: f64,
    /// Time of the first crossing (half period for symmetric wells).
    pub half_crossing: f64,
    /// `|H(end) − c| / c`.
    pub energy_drift: f64,
    /// Accepted integrator steps.
    pub steps: usize,
    /// Set when the drift exceeds 100× the local tolerance.
    pub drift_warning: bool,
}

#[derive(Clone, Copy)]
struct State {
    x: f64,
    y: f64,
}

impl State {
    fn axpy(self, h: f64, k: [f64; 2]) -> State {
        State { x: self.x + h * k[0], y: self.y + h * k[1] }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error coefficients: 5th-order minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Measure the period of the orbit at energy `c` by integrating one full
/// revolution from `(b(c), 0)`.
pub fn simulate_period(p: &Potential, c: f64, cfg: &SimConfig) -> Result<SimResult> {
    if !(cfg.tol > 0.0) || !(cfg.step > 0.0) {
        return Err(Error::InvalidFamily("simulation needs positive step and tol".into()));
    }
    let orbit = turning_points(p, c)?;
    let rhs = |s: State| [s.y, -p.g(s.x)];

    let rtol = cfg.tol;
    let atol = cfg.tol * 1e-3;
    let scale = |a: f64, b: f64| atol + rtol * a.abs().max(b.abs());

    let mut t = 0.0;
    let mut state = State { x: orbit.b, y: 0.0 };
    let mut k1 = rhs(state);
    let mut h = cfg.step.min(cfg.max_time);
    let mut crossings: Vec<f64> = Vec::new();
    let mut steps = 0usize;

    while crossings.len() < 2 {
        if t >= cfg.max_time {
            return Err(Error::MaxTimeExceeded(cfg.max_time));
        }
        h = h.min(cfg.max_time - t).max(1e-14);

        let k2 = rhs(state.axpy(h, [A21 * k1[0], A21 * k1[1]]));
        let k3 = rhs(state.axpy(h, [A31 * k1[0] + A32 * k2[0], A31 * k1[1] + A32 * k2[1]]));
        let k4 = rhs(state.axpy(h, [
            A41 * k1[0] + A42 * k2[0] + A43 * k3[0],
            A41 * k1[1] + A42 * k2[1] + A43 * k3[1],
        ]));
        let k5 = rhs(state.axpy(h, [
            A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0],
            A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1],
        ]));
        let k6 = rhs(state.axpy(h, [
            A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0],
            A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1],
        ]));
        let next = state.axpy(h, [
            B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0],
            B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1],
        ]);
        let k7 = rhs(next); // FSAL

        let err_x = h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]);
        let err_y = h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]);
        let rx = err_x / scale(state.x, next.x);
        let ry = err_y / scale(state.y, next.y);
        let err = (0.5 * (rx * rx + ry * ry)).sqrt();

        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }

        // accepted: look for a sign change of y inside the step
        if state.y * next.y < 0.0 {
            let theta = locate_crossing(state, next, k1, k7, h)?;
            crossings.push(t + theta * h);
        }

        t += h;
        state = next;
        k1 = k7;
        steps += 1;
        h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        if steps > 20_000_000 {
            return Err(Error::MaxTimeExceeded(t));
        }
    }

    let energy = 0.5 * state.y * state.y + p.big_g(state.x);
    let energy_drift = (energy - c).abs() / c;
    Ok(SimResult {
        period: crossings[1],
        half_crossing: crossings[0],
        energy_drift,
        steps,
        drift_warning: energy_drift > 100.0 * cfg.tol,
    })
}

/// Cubic Hermite interpolant of `y` over the step, solved for its zero.
fn locate_crossing(s0: State, s1: State, k0: [f64; 2], k1: [f64; 2], h: f64) -> Result<f64> {
    let y0 = s0.y;
    let y1 = s1.y;
    let f0 = h * k0[1];
    let f1 = h * k1[1];
    let delta = y1 - y0;
    let value = move |theta: f64| {
        // H(θ) = y0 + θ f0 + θ²(3Δ − 2f0 − f1) + θ³(−2Δ + f0 + f1)
        let c2 = 3.0 * delta - 2.0 * f0 - f1;
        let c3 = -2.0 * delta + f0 + f1;
        y0 + theta * (f0 + theta * (c2 + theta * c3))
    };
    brent(value, 0.0, 1.0, 1e-15)
}
