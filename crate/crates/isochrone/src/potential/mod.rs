//! Concrete potential wells: closed-form isochronous families, truncated
//! series potentials, and the constructive map from an odd characteristic
//! function.
//!
//! All potentials are normalized to `G(0) = 0`, `g(0) = 0`, `g'(0) = 1` and
//! satisfy `x·g(x) > 0` on their validity domain `(ā, b̄)`. The closed-form
//! families are evaluated through the signed coordinate `X(x) = √(2G(x))`
//! and their characteristic function `h`:
//!
//! ```text
//!     G = X²/2,   g = X/(1+h(X)),   g' = (D − X h')/D³,   D = 1 + h(X),
//!     g'' = −X h''/D⁴ − 3 h'(D − X h')/D⁵,   d/dx(G/g²) = h'(X).
//! ```
//!
//! The `X(x)` expressions below are algebraically rearranged so that no
//! catastrophic cancellation occurs near the center; this matters because
//! the period engine solves `G(x) = c sin²θ` at energies down to 1e-8.

mod hspec;
mod parse;

pub use hspec::HSpec;
pub use parse::parse_rational;

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::isochrony;
use crate::roots::brent;
use crate::series::{rat, rat_from_f64, Rational, RationalSeries};

/// Truncation order used for cached exact Taylor data.
pub const TAYLOR_CACHE_ORDER: usize = 16;

/// Below this |x| the generic `d/dx(G/g²)` evaluation switches to its Taylor
/// expansion: the direct quotient loses all precision from cancellation.
const PHI_TAYLOR_SWITCH: f64 = 1e-4;

/// Parsed family description. The `FromStr` impl accepts the command-line
/// grammar: `harmonic`, `urabe:alpha=0.3`, `isotonic:alpha=1`,
/// `three:alpha=0.2,beta=0.5,gamma=1`, `stillinger:alpha=0.4,gamma=1`,
/// `bmk:alpha=0.5`, `series:a2=1/2,a3=-0.25`,
/// `h:preset=zero|three|other1|other2[,alpha=..][,beta=..]`.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    Harmonic,
    Urabe { alpha: f64 },
    Isotonic { alpha: f64 },
    ThreeParam { alpha: f64, beta: f64, gamma: f64 },
    Stillinger { alpha: f64, gamma: f64 },
    BolotinMckay { alpha: f64 },
    /// Coefficients `a_k` (k ≥ 2) of the restoring force `g = x + Σ a_k x^k`.
    Series { coeffs: Vec<(usize, Rational)> },
    FromH { spec: HSpec },
}

enum Kind {
    Harmonic,
    Urabe { alpha: f64 },
    Isotonic { alpha: f64 },
    ThreeParam { alpha: f64, beta: f64, gamma: f64 },
    Stillinger { alpha: f64, gamma: f64 },
    SeriesForce {
        coeffs: Vec<Rational>,
        coeffs_f64: Vec<f64>,
        /// Leading Taylor coefficients of d/dx(G/g²), for the near-zero path.
        phi_taylor: [f64; 5],
    },
    FromH { spec: HSpec, inv_tol: f64 },
    Scaled { inner: Box<Potential>, gamma: f64 },
}

/// An evaluatable potential well.
pub struct Potential {
    kind: Kind,
    domain: (f64, f64),
    c_bar: f64,
    label: String,
    taylor_cache: OnceLock<Option<RationalSeries>>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("c_bar", &self.c_bar)
            .finish()
    }
}

impl Clone for Potential {
    fn clone(&self) -> Self {
        let kind = match &self.kind {
            Kind::Harmonic => Kind::Harmonic,
            Kind::Urabe { alpha } => Kind::Urabe { alpha: *alpha },
            Kind::Isotonic { alpha } => Kind::Isotonic { alpha: *alpha },
            Kind::ThreeParam { alpha, beta, gamma } => Kind::ThreeParam {
                alpha: *alpha,
                beta: *beta,
                gamma: *gamma,
            },
            Kind::Stillinger { alpha, gamma } => Kind::Stillinger { alpha: *alpha, gamma: *gamma },
            Kind::SeriesForce { coeffs, coeffs_f64, phi_taylor } => Kind::SeriesForce {
                coeffs: coeffs.clone(),
                coeffs_f64: coeffs_f64.clone(),
                phi_taylor: *phi_taylor,
            },
            Kind::FromH { spec, inv_tol } => Kind::FromH { spec: spec.clone(), inv_tol: *inv_tol },
            Kind::Scaled { inner, gamma } => Kind::Scaled { inner: inner.clone(), gamma: *gamma },
        };
        let taylor_cache = OnceLock::new();
        if let Some(value) = self.taylor_cache.get() {
            let _ = taylor_cache.set(value.clone());
        }
        Self {
            kind,
            domain: self.domain,
            c_bar: self.c_bar,
            label: self.label.clone(),
            taylor_cache,
        }
    }
}

fn require_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidFamily(format!("{name} = {value} is not finite")))
    }
}

impl Potential {
    fn new(kind: Kind, domain: (f64, f64), c_bar: f64, label: String) -> Self {
        Self { kind, domain, c_bar, label, taylor_cache: OnceLock::new() }
    }

    /// `G(x) = x²/2`.
    pub fn harmonic() -> Self {
        Self::new(Kind::Harmonic, (f64::NEG_INFINITY, f64::INFINITY), f64::INFINITY, "harmonic".into())
    }

    /// The unique potential with `d/dx(G/g²) ≡ α`:
    /// `G(x) = x²/(1 + αx + √(1+2αx))`, with `g''(0) = −3α`.
    pub fn urabe(alpha: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        let (domain, c_bar) = if alpha == 0.0 {
            ((f64::NEG_INFINITY, f64::INFINITY), f64::INFINITY)
        } else {
            let edge = -1.0 / (2.0 * alpha);
            let c = 1.0 / (2.0 * alpha * alpha);
            if alpha > 0.0 {
                ((edge, f64::INFINITY), c)
            } else {
                ((f64::NEG_INFINITY, edge), c)
            }
        };
        Ok(Self::new(Kind::Urabe { alpha }, domain, c_bar, format!("urabe:alpha={alpha}")))
    }

    /// The rational isochronous well
    /// `G(x) = (1/(8α²)) [αx + 1 − 1/(αx+1)]²`.
    pub fn isotonic(alpha: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        if alpha == 0.0 {
            return Err(Error::InvalidFamily("isotonic needs alpha != 0 (alpha = 0 is the harmonic well)".into()));
        }
        let pole = -1.0 / alpha;
        let domain = if alpha > 0.0 {
            (pole, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, pole)
        };
        Ok(Self::new(Kind::Isotonic { alpha }, domain, f64::INFINITY, format!("isotonic:alpha={alpha}")))
    }

    /// Three-parameter closed-form family solving
    /// `d/dx(G/g²) = α (1+βG)^{−3/2}` at unit scale, then rescaled by γ.
    ///
    /// The family is globally defined when `2α² ≤ β`; for `2α² > β` the well
    /// is still valid on a restricted domain with critical energy
    /// `1/((2α²−β)γ²)`.
    pub fn three_param(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        require_finite("beta", beta)?;
        require_finite("gamma", gamma)?;
        if gamma == 0.0 {
            return Err(Error::InvalidFamily("three-parameter family needs gamma != 0".into()));
        }
        let ((lo, hi), c_bar) = three_base_domain(alpha, beta);
        let domain = scale_interval((lo, hi), gamma);
        Ok(Self::new(
            Kind::ThreeParam { alpha, beta, gamma },
            domain,
            c_bar / (gamma * gamma),
            format!("three:alpha={alpha},beta={beta},gamma={gamma}"),
        ))
    }

    /// Two-parameter pseudoharmonic family, identical to
    /// [`Potential::three_param`] with `β = 2α`.
    pub fn stillinger(alpha: f64, gamma: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        require_finite("gamma", gamma)?;
        if gamma == 0.0 {
            return Err(Error::InvalidFamily("stillinger family needs gamma != 0".into()));
        }
        let ((lo, hi), c_bar) = stillinger_base_domain(alpha);
        let domain = scale_interval((lo, hi), gamma);
        Ok(Self::new(
            Kind::Stillinger { alpha, gamma },
            domain,
            c_bar / (gamma * gamma),
            format!("stillinger:alpha={alpha},gamma={gamma}"),
        ))
    }

    /// One-parameter special case: the γ = 1 slice of the pseudoharmonic
    /// family.
    pub fn bolotin_mckay(alpha: f64) -> Result<Self> {
        let mut p = Self::stillinger(alpha, 1.0)?;
        p.label = format!("bmk:alpha={alpha}");
        Ok(p)
    }

    /// Truncated-series force `g(x) = x + Σ a_k x^k` with exact rational
    /// coefficients. Indices must be ≥ 2. The domain is bounded by the
    /// nearest zeros of `g` on each side of the center.
    pub fn from_series_coeffs(pairs: &[(usize, Rational)]) -> Result<Self> {
        use num::ToPrimitive;
        let max_idx = pairs.iter().map(|(k, _)| *k).max().unwrap_or(1);
        let order = max_idx.max(7);
        let mut series = RationalSeries::identity(order);
        for (k, value) in pairs {
            if *k < 2 {
                return Err(Error::BadCoefficientIndex(*k, "series coefficients start at a2 (normalization fixes a0, a1)"));
            }
            series.set_coeff(*k, value.clone());
        }
        let coeffs: Vec<Rational> = (0..=order).map(|k| series.coeff(k).clone()).collect();
        let coeffs_f64: Vec<f64> = coeffs
            .iter()
            .map(|c| c.to_f64().ok_or_else(|| Error::InvalidFamily("series coefficient overflows f64".into())))
            .collect::<Result<_>>()?;
        if coeffs_f64.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFamily("series coefficient overflows f64".into()));
        }
        let phi = isochrony::phi_series(&series.resized(order.max(8)))?;
        let mut phi_taylor = [0.0; 5];
        for (k, slot) in phi_taylor.iter_mut().enumerate() {
            *slot = phi.coeff_f64(k);
        }
        let (domain, c_bar) = poly_domain(&coeffs_f64);
        let label = format!(
            "series:{}",
            pairs
                .iter()
                .map(|(k, v)| format!("a{k}={v}"))
                .collect::<Vec<_>>()
                .join(",")
        );
        Ok(Self::new(Kind::SeriesForce { coeffs, coeffs_f64, phi_taylor }, domain, c_bar, label))
    }

    /// Potential defined by an odd characteristic function: `x(X) = X + H(X)`
    /// inverted numerically, then `G = X²/2`, `g = X/(1+h(X))`.
    pub fn from_h(spec: HSpec, inv_tol: f64) -> Result<Self> {
        spec.validate()?;
        if !(inv_tol > 0.0) {
            return Err(Error::InvalidFamily("inversion tolerance must be positive".into()));
        }
        let x_max = spec.x_max;
        let (domain, c_bar) = if x_max.is_finite() {
            let lo = -x_max + spec.big_h_at(-x_max);
            let hi = x_max + spec.big_h_at(x_max);
            ((lo, hi), 0.5 * x_max * x_max)
        } else {
            ((f64::NEG_INFINITY, f64::INFINITY), f64::INFINITY)
        };
        let label = spec.label.clone();
        Ok(Self::new(Kind::FromH { spec, inv_tol }, domain, c_bar, label))
    }

    /// Rescaled well `G̃(x) = G(γx)/γ²`; periods satisfy
    /// `T_G̃(c) = T_G(γ²c)`.
    pub fn scaled(&self, gamma: f64) -> Result<Self> {
        require_finite("gamma", gamma)?;
        if gamma == 0.0 {
            return Err(Error::InvalidFamily("scaling needs gamma != 0".into()));
        }
        if gamma == 1.0 {
            return Ok(self.clone());
        }
        let domain = scale_interval(self.domain, gamma);
        let c_bar = self.c_bar / (gamma * gamma);
        let label = format!("scaled:gamma={gamma},of={}", self.label);
        Ok(Self::new(
            Kind::Scaled { inner: Box::new(self.clone()), gamma },
            domain,
            c_bar,
            label,
        ))
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        match spec {
            FamilySpec::Harmonic => Ok(Self::harmonic()),
            FamilySpec::Urabe { alpha } => Self::urabe(*alpha),
            FamilySpec::Isotonic { alpha } => Self::isotonic(*alpha),
            FamilySpec::ThreeParam { alpha, beta, gamma } => Self::three_param(*alpha, *beta, *gamma),
            FamilySpec::Stillinger { alpha, gamma } => Self::stillinger(*alpha, *gamma),
            FamilySpec::BolotinMckay { alpha } => Self::bolotin_mckay(*alpha),
            FamilySpec::Series { coeffs } => Self::from_series_coeffs(coeffs),
            FamilySpec::FromH { spec } => Self::from_h(spec.clone(), 1e-14),
        }
    }

    /// Parse a family spec string (see the CLI grammar) and build the well.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_spec(&text.parse()?)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Validity interval `(ā, b̄)`; endpoints may be infinite.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Supremum of energies carrying a closed orbit (possibly infinite).
    pub fn critical_energy(&self) -> f64 {
        self.c_bar
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.domain.0 && x < self.domain.1
    }

    /// Signed turning coordinate `X(x) = sign(x)·√(2G(x))`.
    pub fn sqrt_2g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Harmonic => x,
            Kind::Urabe { alpha } => urabe_cap_x(*alpha, x),
            Kind::Isotonic { alpha } => isotonic_cap_x(*alpha, x),
            Kind::ThreeParam { alpha, beta, gamma } => three_cap_x(*alpha, *beta, gamma * x) / gamma,
            Kind::Stillinger { alpha, gamma } => stillinger_cap_x(*alpha, *gamma, x),
            Kind::SeriesForce { coeffs_f64, .. } => {
                let g = poly_big_g(coeffs_f64, x);
                (2.0 * g).max(0.0).sqrt().copysign(x)
            }
            Kind::FromH { spec, inv_tol } => invert_h_map(spec, x, *inv_tol),
            Kind::Scaled { inner, gamma } => inner.sqrt_2g(gamma * x) / gamma,
        }
    }

    /// Potential value `G(x)`.
    pub fn big_g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::SeriesForce { coeffs_f64, .. } => poly_big_g(coeffs_f64, x),
            Kind::Scaled { inner, gamma } => inner.big_g(gamma * x) / (gamma * gamma),
            _ => {
                let cap = self.sqrt_2g(x);
                0.5 * cap * cap
            }
        }
    }

    /// Restoring force `g(x) = G'(x)`.
    pub fn g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Harmonic => x,
            Kind::SeriesForce { coeffs_f64, .. } => poly_eval(coeffs_f64, x),
            Kind::Scaled { inner, gamma } => inner.g(gamma * x) / gamma,
            _ => {
                let (cap, h, _, _) = self.h_data(x);
                cap / (1.0 + h)
            }
        }
    }

    /// `g'(x)`.
    pub fn g_prime(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Harmonic => 1.0,
            Kind::SeriesForce { coeffs_f64, .. } => poly_eval_prime(coeffs_f64, x),
            Kind::Scaled { inner, gamma } => inner.g_prime(gamma * x),
            _ => {
                let (cap, h, dh, _) = self.h_data(x);
                let d = 1.0 + h;
                (d - cap * dh) / (d * d * d)
            }
        }
    }

    /// `g''(x)`.
    pub fn g_second(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Harmonic => 0.0,
            Kind::SeriesForce { coeffs_f64, .. } => poly_eval_second(coeffs_f64, x),
            Kind::Scaled { inner, gamma } => gamma * inner.g_second(gamma * x),
            _ => {
                let (cap, h, dh, d2h) = self.h_data(x);
                let d = 1.0 + h;
                let d4 = d * d * d * d;
                -cap * d2h / d4 - 3.0 * dh * (d - cap * dh) / (d4 * d)
            }
        }
    }

    /// `d/dx [G/g²](x) = (g² − 2Gg')/g³`, evaluated without cancellation:
    /// closed families use `h'(X)` directly, series potentials switch to the
    /// exact Taylor expansion near the center.
    pub fn phi(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Harmonic => 0.0,
            Kind::SeriesForce { coeffs_f64, phi_taylor, .. } => {
                if x.abs() < PHI_TAYLOR_SWITCH {
                    let [c0, c1, c2, c3, c4] = *phi_taylor;
                    (((c4 * x + c3) * x + c2) * x + c1) * x + c0
                } else {
                    let g = poly_eval(coeffs_f64, x);
                    let dg = poly_eval_prime(coeffs_f64, x);
                    let big_g = poly_big_g(coeffs_f64, x);
                    (g * g - 2.0 * big_g * dg) / (g * g * g)
                }
            }
            Kind::Scaled { inner, gamma } => gamma * inner.phi(gamma * x),
            _ => {
                let (_, _, dh, _) = self.h_data(x);
                dh
            }
        }
    }

    /// Exact Taylor series of the restoring force `g` at the center, when
    /// the construction admits one (always, except for custom `h`
    /// specifications without series data).
    pub fn taylor(&self, order: usize) -> Option<RationalSeries> {
        if order <= TAYLOR_CACHE_ORDER {
            return self
                .taylor_cache
                .get_or_init(|| self.compute_taylor(TAYLOR_CACHE_ORDER))
                .as_ref()
                .map(|s| s.resized(order));
        }
        self.compute_taylor(order)
    }

    /// `(X, h(X), h'(X), h''(X))` for the characteristic-function kinds.
    fn h_data(&self, x: f64) -> (f64, f64, f64, f64) {
        match &self.kind {
            Kind::Harmonic => (x, 0.0, 0.0, 0.0),
            Kind::Urabe { alpha } => {
                let cap = urabe_cap_x(*alpha, x);
                (cap, alpha * cap, *alpha, 0.0)
            }
            Kind::Isotonic { alpha } => {
                let cap = isotonic_cap_x(*alpha, x);
                let s = 1.0 + alpha * alpha * cap * cap;
                let root = s.sqrt();
                (
                    cap,
                    alpha * cap / root,
                    alpha / (s * root),
                    -3.0 * alpha.powi(3) * cap / (s * s * root),
                )
            }
            Kind::ThreeParam { alpha, beta, gamma } => {
                // h_γ(X) = h₁(γX) with h₁ for the unit-scale family
                let cap = three_cap_x(*alpha, *beta, gamma * x) / gamma;
                let t = gamma * cap;
                let s = 2.0 + beta * t * t;
                let root = s.sqrt();
                let s2 = std::f64::consts::SQRT_2;
                (
                    cap,
                    s2 * alpha * t / root,
                    gamma * 2.0 * s2 * alpha / (s * root),
                    gamma * gamma * (-6.0) * s2 * alpha * beta * t / (s * s * root),
                )
            }
            Kind::Stillinger { alpha, gamma } => {
                let cap = stillinger_cap_x(*alpha, *gamma, x);
                let s = 1.0 + alpha * gamma * gamma * cap * cap;
                let root = s.sqrt();
                (
                    cap,
                    alpha * gamma * cap / root,
                    alpha * gamma / (s * root),
                    -3.0 * alpha * alpha * gamma.powi(3) * cap / (s * s * root),
                )
            }
            Kind::FromH { spec, inv_tol } => {
                let cap = invert_h_map(spec, x, *inv_tol);
                ((cap), (spec.h)(cap), (spec.dh)(cap), (spec.d2h)(cap))
            }
            Kind::SeriesForce { .. } | Kind::Scaled { .. } => {
                unreachable!("h_data is only called for characteristic-function kinds")
            }
        }
    }

    fn compute_taylor(&self, order: usize) -> Option<RationalSeries> {
        match &self.kind {
            Kind::Harmonic => Some(RationalSeries::identity(order)),
            Kind::Urabe { alpha } => {
                // g'(x) = (1 + 2αx)^{-3/2}
                let a = rat_from_f64(*alpha)?;
                let mut inner = RationalSeries::zero(order);
                inner.set_coeff(1, &a * rat(2, 1));
                let g_prime = RationalSeries::binomial(&rat(-3, 2), order).compose(&inner).ok()?;
                Some(g_prime.integral().resized(order))
            }
            Kind::Isotonic { alpha } => {
                // g = (w − w^{-3})/(4α), w = 1 + αx
                let a = rat_from_f64(*alpha)?;
                let mut ax = RationalSeries::zero(order);
                ax.set_coeff(1, a.clone());
                let w_m3 = RationalSeries::binomial(&rat(-3, 1), order).compose(&ax).ok()?;
                let mut w = RationalSeries::one(order);
                w.set_coeff(1, a.clone());
                let diff = w.sub(&w_m3).ok()?;
                Some(diff.scaled(&(rat(1, 4) / a)))
            }
            Kind::ThreeParam { alpha, beta, gamma } => {
                // via the characteristic series h₁(X) = αX(1+(β/2)X²)^{-1/2}
                let a = rat_from_f64(*alpha)?;
                let b = rat_from_f64(*beta)?;
                let work = order + 1;
                let mut inner = RationalSeries::zero(work);
                inner.set_coeff(2, &b / rat(2, 1));
                let factor = RationalSeries::binomial(&rat(-1, 2), work).compose(&inner).ok()?;
                let h = RationalSeries::identity(work).scaled(&a).mul(&factor).ok()?;
                let base = force_series_from_h(&h, order)?;
                scale_series(&base, *gamma)
            }
            Kind::Stillinger { alpha, gamma } => {
                // unit-scale characteristic series h₁(X) = αX(1+αX²)^{-1/2}
                let a = rat_from_f64(*alpha)?;
                let work = order + 1;
                let mut inner = RationalSeries::zero(work);
                inner.set_coeff(2, a.clone());
                let factor = RationalSeries::binomial(&rat(-1, 2), work).compose(&inner).ok()?;
                let h = RationalSeries::identity(work).scaled(&a).mul(&factor).ok()?;
                let base = force_series_from_h(&h, order)?;
                scale_series(&base, *gamma)
            }
            Kind::SeriesForce { coeffs, .. } => {
                let mut s = RationalSeries::zero(order);
                for (k, c) in coeffs.iter().enumerate().take(order + 1) {
                    s.set_coeff(k, c.clone());
                }
                Some(s)
            }
            Kind::FromH { spec, .. } => {
                let h = spec.taylor.as_ref()?;
                if h.order() < order + 1 {
                    return None;
                }
                force_series_from_h(&h.resized(order + 1), order)
            }
            Kind::Scaled { inner, gamma } => {
                let base = inner.compute_taylor(order)?;
                scale_series(&base, *gamma)
            }
        }
    }
}

/// Taylor series of `g` from the characteristic series of `h` (in `X`,
/// order `order + 1`): invert `x(X) = X + ∫h`, square, differentiate.
fn force_series_from_h(h: &RationalSeries, order: usize) -> Option<RationalSeries> {
    let work = order + 1;
    debug_assert_eq!(h.order(), work);
    let x_of_cap = RationalSeries::identity(work)
        .add(&h.integral().resized(work))
        .ok()?;
    let cap_of_x = x_of_cap.reverted().ok()?;
    let big_g = cap_of_x.mul(&cap_of_x).ok()?.scaled(&rat(1, 2));
    Some(big_g.derivative())
}

/// `g̃(x) = g(γx)/γ` on series coefficients: `a_k ↦ γ^{k-1} a_k`.
fn scale_series(g: &RationalSeries, gamma: f64) -> Option<RationalSeries> {
    if gamma == 1.0 {
        return Some(g.clone());
    }
    let gm = rat_from_f64(gamma)?;
    let mut out = RationalSeries::zero(g.order());
    let mut power = gm.recip();
    for k in 0..=g.order() {
        out.set_coeff(k, g.coeff(k) * &power);
        power *= &gm;
    }
    Some(out)
}

fn scale_interval((lo, hi): (f64, f64), gamma: f64) -> (f64, f64) {
    if gamma > 0.0 {
        (lo / gamma, hi / gamma)
    } else {
        (hi / gamma, lo / gamma)
    }
}

/// `X(x) = 2x / (1 + √(1+2αx))` for the constant-f family.
fn urabe_cap_x(alpha: f64, x: f64) -> f64 {
    2.0 * x / (1.0 + (1.0 + 2.0 * alpha * x).max(0.0).sqrt())
}

/// `X(x) = x(2+αx) / (2(1+αx))` for the isotonic well.
fn isotonic_cap_x(alpha: f64, x: f64) -> f64 {
    x * (2.0 + alpha * x) / (2.0 * (1.0 + alpha * x))
}

/// Unit-scale three-parameter coordinate
/// `X₁(x) = x(4α+βx) / (2α+βx+α√(4+8αx+2βx²))`, regular at `β = 2α²`.
fn three_cap_x(alpha: f64, beta: f64, x: f64) -> f64 {
    if alpha == 0.0 {
        // d/dx(G/g²) = 0: harmonic regardless of β
        return x;
    }
    let q = 4.0 + 8.0 * alpha * x + 2.0 * beta * x * x;
    let r = q.max(0.0).sqrt();
    x * (4.0 * alpha + beta * x) / (2.0 * alpha + beta * x + alpha * r)
}

/// Pseudoharmonic coordinate; two algebraic forms cover the cancellation
/// regions near `x = 0` and near `x = −2/γ`.
fn stillinger_cap_x(alpha: f64, gamma: f64, x: f64) -> f64 {
    let rho = 1.0 + 2.0 * alpha * gamma * x + alpha * gamma * gamma * x * x;
    let r = rho.max(0.0).sqrt();
    let u = gamma * x;
    if (2.0 + u).abs() >= 1.0 || alpha == 1.0 {
        x * (2.0 + u) / (1.0 + u + r)
    } else {
        (1.0 + u - r) / (gamma * (1.0 - alpha))
    }
}

/// Invert `x(X) = X + H(X)` by bracketed root finding.
fn invert_h_map(spec: &HSpec, x: f64, tol: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let f = |cap: f64| cap + spec.big_h_at(cap) - x;
    let cap_limit = spec.x_max;
    let (lo, hi) = if x > 0.0 {
        let mut hi = if cap_limit.is_finite() { cap_limit } else { x.max(1e-12) };
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::NAN;
            }
        }
        (0.0, hi)
    } else {
        let mut lo = if cap_limit.is_finite() { -cap_limit } else { x.min(-1e-12) };
        while f(lo) > 0.0 {
            lo *= 2.0;
            if lo < -1e300 {
                return f64::NAN;
            }
        }
        (lo, 0.0)
    };
    brent(f, lo, hi, tol * (1.0 + x.abs())).unwrap_or(f64::NAN)
}

/// Base-domain and critical energy of the unit-scale three-parameter family.
fn three_base_domain(alpha: f64, beta: f64) -> ((f64, f64), f64) {
    let full = (f64::NEG_INFINITY, f64::INFINITY);
    if alpha == 0.0 {
        return (full, f64::INFINITY);
    }
    let excess = 2.0 * alpha * alpha - beta;
    let c_bar = if excess > 0.0 { 1.0 / excess } else { f64::INFINITY };
    if beta == 0.0 {
        let edge = -0.25 / alpha; // root of 4 + 8αx
        if alpha > 0.0 {
            return ((edge * 2.0, f64::INFINITY), c_bar);
        }
        return ((f64::NEG_INFINITY, edge * 2.0), c_bar);
    }
    // roots of q(x) = 2βx² + 8αx + 4
    let disc = 64.0 * alpha * alpha - 32.0 * beta;
    let scale = 64.0 * alpha * alpha + 32.0 * beta.abs() + 1.0;
    if disc < -1e-13 * scale {
        return (full, f64::INFINITY);
    }
    if disc.abs() <= 1e-13 * scale {
        // double root (the isotonic locus β = 2α²): a pole of G
        let x0 = -2.0 * alpha / beta;
        if alpha > 0.0 {
            return ((x0, f64::INFINITY), f64::INFINITY);
        }
        return ((f64::NEG_INFINITY, x0), f64::INFINITY);
    }
    let sq = disc.sqrt();
    // stable quadratic root from the non-cancelling branch, the other via
    // the product of roots
    let stable = if alpha >= 0.0 {
        (-8.0 * alpha - sq) / (4.0 * beta)
    } else {
        (-8.0 * alpha + sq) / (4.0 * beta)
    };
    let other = (2.0 / beta) / stable; // product of roots = 2/β
    let (lo_root, hi_root) = if stable <= other { (stable, other) } else { (other, stable) };
    if beta > 0.0 {
        // q > 0 outside the roots; both roots share the sign of −α
        if alpha > 0.0 {
            ((hi_root, f64::INFINITY), c_bar)
        } else {
            ((f64::NEG_INFINITY, lo_root), c_bar)
        }
    } else {
        // q > 0 between the roots, which straddle 0
        ((lo_root, hi_root), c_bar)
    }
}

/// Base-domain and critical energy of the unit-scale pseudoharmonic family
/// (`β = 2α` slice of the three-parameter family).
fn stillinger_base_domain(alpha: f64) -> ((f64, f64), f64) {
    let full = (f64::NEG_INFINITY, f64::INFINITY);
    if alpha == 0.0 {
        return (full, f64::INFINITY);
    }
    let excess = 2.0 * alpha * alpha - 2.0 * alpha;
    let c_bar = if excess > 0.0 { 1.0 / excess } else { f64::INFINITY };
    // roots of ρ(x) = αx² + 2αx + 1 (unit scale)
    let disc = 4.0 * alpha * alpha - 4.0 * alpha;
    if disc < 0.0 {
        return (full, f64::INFINITY);
    }
    if disc == 0.0 {
        // α = 1: the isotonic pole at −1
        return ((-1.0, f64::INFINITY), f64::INFINITY);
    }
    let sq = disc.sqrt();
    let stable = (-2.0 * alpha - sq.copysign(alpha)) / (2.0 * alpha);
    let other = (1.0 / alpha) / stable; // product of roots = 1/α
    let (lo_root, hi_root) = if stable <= other { (stable, other) } else { (other, stable) };
    if alpha > 1.0 {
        // both roots negative
        ((hi_root, f64::INFINITY), c_bar)
    } else {
        // α < 0: roots straddle 0
        ((lo_root, hi_root), c_bar)
    }
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_eval_prime(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if k >= 1 {
            acc = acc * x + k as f64 * c;
        }
    }
    acc
}

fn poly_eval_second(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if k >= 2 {
            acc = acc * x + (k * (k - 1)) as f64 * c;
        }
    }
    acc
}

fn poly_big_g(coeffs: &[f64], x: f64) -> f64 {
    // G = ∫g: coefficient k of g becomes coefficient k+1 of G, divided by k+1
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().rev() {
        acc = acc * x + c / (k as f64 + 1.0);
    }
    acc * x
}

/// Domain of a polynomial force: bounded by the nearest zero of `g` on each
/// side of the center; the critical energy is the lower of the two boundary
/// values of `G`.
fn poly_domain(coeffs: &[f64]) -> ((f64, f64), f64) {
    let mut hi = f64::INFINITY;
    let mut lo = f64::NEG_INFINITY;

    let mut t = 1e-6;
    while t < 1e8 {
        let next = t * 1.07;
        if poly_eval(coeffs, next) <= 0.0 {
            hi = brent(|x| poly_eval(coeffs, x), t, next, 1e-15).unwrap_or(next);
            break;
        }
        t = next;
    }
    let mut t = 1e-6;
    while t < 1e8 {
        let next = t * 1.07;
        if poly_eval(coeffs, -next) >= 0.0 {
            lo = -brent(|x| poly_eval(coeffs, -x), t, next, 1e-15).unwrap_or(next);
            break;
        }
        t = next;
    }
    let c_hi = if hi.is_finite() { poly_big_g(coeffs, hi) } else { f64::INFINITY };
    let c_lo = if lo.is_finite() { poly_big_g(coeffs, lo) } else { f64::INFINITY };
    ((lo, hi), c_hi.min(c_lo))
}

impl std::str::FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse::parse_family_spec(s)
    }
}
