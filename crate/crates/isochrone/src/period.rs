//! Numerical period engine: turning points, the well involution, the
//! period `T(c)`, its energy derivative `T'(c)`, scans over energy grids,
//! and the fractional-integral relation between the period and the
//! turning-point distance.
//!
//! The period integral `T(c) = √2 ∫ dx/√(c−G)` has inverse-square-root
//! endpoint singularities. Substituting `sign(x)√G(x) = √c sin θ` maps it
//! to a smooth integrand on `[−π/2, π/2]`:
//!
//! ```text
//!     T(c) = √2 ∫ dθ · 2√c sin θ / g(x(θ)),
//!     T'(c) = (√2/√c) ∫ dθ · φ(x(θ)) sin θ,      φ = d/dx(G/g²),
//! ```
//!
//! where each node requires solving `G(x) = c sin²θ` on the matching side
//! of the well. Gauss–Legendre quadrature then converges spectrally for
//! analytic potentials.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quad::GaussLegendre;
use crate::roots::brent;

/// Energy level with resolved turning points `a < 0 < b`.
#[derive(Clone, Copy, Debug)]
pub struct Orbit {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

/// Involution data at a point: `A(x)` with `G(A) = G(x)`, `A·x < 0`,
/// and its first two derivatives.
#[derive(Clone, Copy, Debug)]
pub struct InvolutionPoint {
    pub value: f64,
    pub deriv: f64,
    pub second: f64,
}

/// One scan record.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeriodSample {
    pub c: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Tprime")]
    pub t_prime: f64,
}

/// Monotonicity summary of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    NonMonotone,
}

/// Samples of `(c, T, T')` over a strictly increasing energy grid.
#[derive(Clone, Debug, Serialize)]
pub struct ScanTable {
    pub samples: Vec<PeriodSample>,
}

impl ScanTable {
    /// Max − min of the sampled periods.
    pub fn spread(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.samples {
            lo = lo.min(s.t);
            hi = hi.max(s.t);
        }
        if self.samples.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// Classify the period column. `tol` separates "constant within noise"
    /// from a real trend.
    pub fn monotonicity(&self, tol: f64) -> Monotonicity {
        if self.spread() <= tol {
            return Monotonicity::Constant;
        }
        let mut increasing = true;
        let mut decreasing = true;
        for pair in self.samples.windows(2) {
            if pair[1].t <= pair[0].t {
                increasing = false;
            }
            if pair[1].t >= pair[0].t {
                decreasing = false;
            }
        }
        match (increasing, decreasing) {
            (true, _) => Monotonicity::Increasing,
            (_, true) => Monotonicity::Decreasing,
            _ => Monotonicity::NonMonotone,
        }
    }

    /// CSV with the fixed header `c,T,Tprime`, 17 significant digits
    /// (lossless round-trip for doubles).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,T,Tprime\n");
        for s in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", s.c, s.t, s.t_prime));
        }
        out
    }
}

/// Largest energy the engines will scan by default: `0.9·c̄` for wells with
/// a finite critical energy, otherwise 1.
pub fn effective_c_max(p: &Potential) -> f64 {
    let c_bar = p.critical_energy();
    if c_bar.is_finite() {
        0.9 * c_bar
    } else {
        1.0
    }
}

fn check_energy(p: &Potential, c: f64) -> Result<()> {
    if !(c > 0.0) || c >= p.critical_energy() {
        return Err(Error::EnergyOutOfRange { c, c_max: p.critical_energy() });
    }
    Ok(())
}

/// Solve `G(x) = value` on one side of the center (`side = ±1`).
///
/// Under the well hypothesis `G` is strictly monotone on each side, so an
/// expanding bracket followed by Brent's method is reliable.
fn solve_g_equals(p: &Potential, value: f64, side: f64) -> Result<f64> {
    debug_assert!(value > 0.0);
    let (lo_dom, hi_dom) = p.domain();
    let edge = if side > 0.0 { hi_dom } else { lo_dom };
    let mut probe = side * (2.0 * value).sqrt(); // exact for the harmonic well
    if probe.abs() < 1e-300 {
        probe = side * 1e-300;
    }
    // the harmonic estimate can overshoot a finite domain edge
    if edge.is_finite() && probe.abs() >= edge.abs() && probe * edge > 0.0 {
        probe = 0.5 * edge;
    }
    // expand toward the domain edge until G(probe) >= value
    let mut iterations = 0;
    while p.big_g(probe) < value {
        probe = if edge.is_finite() {
            0.5 * (probe + edge)
        } else {
            probe * 2.0
        };
        iterations += 1;
        if iterations > 200 {
            return Err(Error::RootFailure(format!(
                "could not bracket G = {value} on side {side} (domain edge {edge})"
            )));
        }
    }
    let (a, b) = if side > 0.0 { (0.0, probe) } else { (probe, 0.0) };
    brent(|x| p.big_g(x) - value, a, b, 1e-15 * (1.0 + probe.abs()))
}

/// Turning points `a(c) < 0 < b(c)` with `G(a) = G(b) = c`.
pub fn turning_points(p: &Potential, c: f64) -> Result<Orbit> {
    check_energy(p, c)?;
    let b = solve_g_equals(p, c, 1.0)?;
    let a = solve_g_equals(p, c, -1.0)?;
    Ok(Orbit { c, a, b })
}

/// The involution `A(x)` (conjugate point across the well) and its first
/// two derivatives, from the identities `A' = g(x)/g(A)` and
/// `A'' = (g'(x) − g'(A)·A'²)/g(A)`.
pub fn involution_at(p: &Potential, x: f64) -> Result<InvolutionPoint> {
    let (lo, hi) = p.domain();
    if !p.contains(x) {
        return Err(Error::OutOfDomain { x, lo, hi });
    }
    if x == 0.0 {
        // A(0) = 0, A'(0) = -1, A''(0) = -(2/3) g''(0)
        return Ok(InvolutionPoint { value: 0.0, deriv: -1.0, second: -2.0 / 3.0 * p.g_second(0.0) });
    }
    let energy = p.big_g(x);
    if energy >= p.critical_energy() {
        return Err(Error::InvolutionRange { x, energy, c_bar: p.critical_energy() });
    }
    let value = solve_g_equals(p, energy, -x.signum())?;
    let deriv = p.g(x) / p.g(value);
    let second = (p.g_prime(x) - p.g_prime(value) * deriv * deriv) / p.g(value);
    Ok(InvolutionPoint { value, deriv, second })
}

/// `x − A(x) − 2√(2G(x))`: identically zero exactly on isochronous wells.
pub fn distance_identity_residual(p: &Potential, x: f64) -> Result<f64> {
    let inv = involution_at(p, x)?;
    Ok(x - inv.value - 2.0 * (2.0 * p.big_g(x)).sqrt())
}

/// The period integrand after the sine substitution, at angle `theta`.
///
/// `x` solving `G(x) = c sin²θ` on the side of `sin θ` is found per node;
/// the integrand `2√c sinθ / g(x)` has the removable value `√2` at θ = 0.
fn period_node(p: &Potential, c: f64, sin_theta: f64) -> Result<(f64, f64)> {
    if sin_theta.abs() < 1e-300 {
        return Ok((0.0, std::f64::consts::SQRT_2));
    }
    let value = c * sin_theta * sin_theta;
    let x = solve_g_equals(p, value, sin_theta.signum())?;
    Ok((x, 2.0 * c.sqrt() * sin_theta / p.g(x)))
}

/// Minimal period `T(c)` by Gauss–Legendre quadrature with `nodes` points.
pub fn period(p: &Potential, c: f64, nodes: usize) -> Result<f64> {
    period_with_rule(p, c, &GaussLegendre::new(nodes))
}

pub(crate) fn period_with_rule(p: &Potential, c: f64, rule: &GaussLegendre) -> Result<f64> {
    check_energy(p, c)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    for (theta, weight) in rule.mapped(-half_pi, half_pi) {
        let (_, f) = period_node(p, c, theta.sin())?;
        total += weight * f;
    }
    Ok(std::f64::consts::SQRT_2 * total)
}

/// `T'(c)` from the same substitution:
/// `T'(c) = (√2/√c) ∫ φ(x(θ)) sin θ dθ`.
pub fn period_derivative(p: &Potential, c: f64, nodes: usize) -> Result<f64> {
    period_derivative_with_rule(p, c, &GaussLegendre::new(nodes))
}

pub(crate) fn period_derivative_with_rule(p: &Potential, c: f64, rule: &GaussLegendre) -> Result<f64> {
    check_energy(p, c)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    for (theta, weight) in rule.mapped(-half_pi, half_pi) {
        let sin_theta = theta.sin();
        let (x, _) = period_node(p, c, sin_theta)?;
        total += weight * p.phi(x) * sin_theta;
    }
    Ok(std::f64::consts::SQRT_2 / c.sqrt() * total)
}

/// Scan `(c, T, T')` over a strictly increasing energy grid.
pub fn period_scan(p: &Potential, energies: &[f64], nodes: usize) -> Result<ScanTable> {
    if energies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::RootFailure("energy grid must be strictly increasing".into()));
    }
    let rule = GaussLegendre::new(nodes);
    let mut samples = Vec::with_capacity(energies.len());
    for &c in energies {
        let t = period_with_rule(p, c, &rule)?;
        let t_prime = period_derivative_with_rule(p, c, &rule)?;
        samples.push(PeriodSample { c, t, t_prime });
    }
    Ok(ScanTable { samples })
}

/// Uniform energy grid `(c_max/count, ..., c_max)`.
pub fn energy_grid(c_min: f64, c_max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1);
    if count == 1 {
        return vec![c_max];
    }
    (0..count)
        .map(|i| c_min + (c_max - c_min) * i as f64 / (count as f64 - 1.0))
        .collect()
}

/// Both sides of the turning-distance relation at energy `c`:
/// `lhs = b − a` from the turning points and
/// `rhs = (1/(π√2)) ∫₀^c T(γ)(c−γ)^{-1/2} dγ`, the endpoint singularity
/// removed by `γ = c sin²φ`.
pub fn abel_turning_distance(p: &Potential, c: f64, nodes: usize) -> Result<(f64, f64)> {
    let orbit = turning_points(p, c)?;
    let lhs = orbit.b - orbit.a;
    let inner_rule = GaussLegendre::new(nodes);
    let outer_rule = GaussLegendre::new(64.min(nodes));
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    for (phi, weight) in outer_rule.mapped(0.0, half_pi) {
        let s = phi.sin();
        let gamma = c * s * s;
        let t = if gamma > 0.0 {
            period_with_rule(p, gamma, &inner_rule)?
        } else {
            2.0 * std::f64::consts::PI
        };
        total += weight * t * s;
    }
    let rhs = (2.0 * c).sqrt() / std::f64::consts::PI * total;
    Ok((lhs, rhs))
}
