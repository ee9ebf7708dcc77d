//! Odd characteristic functions `h` and their antiderivatives.
//!
//! A potential with an isochronous center is exactly one whose restoring
//! force can be written `g(x) = X / (1 + h(X))` with `X = √(2G(x))` and `h`
//! an odd C¹ function with `|h| < 1` on the relevant range. The map
//! `x(X) = X + H(X)` (H the even antiderivative of h, `H(0) = 0`) is then a
//! diffeomorphism and defines the potential implicitly.

use std::fmt;
use std::sync::Arc;

use num::Zero;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::series::{rat, rat_from_f64, RationalSeries};

pub(crate) type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Golden-ratio constant `(√5 − 1)/2`; `|h| = 1` threshold of the second
/// built-in two-parameter family.
const U0: f64 = 0.618_033_988_749_894_9;

/// Order at which preset `h` series are cached.
pub(crate) const H_TAYLOR_ORDER: usize = 20;

/// Specification of an odd characteristic function.
#[derive(Clone)]
pub struct HSpec {
    pub(crate) label: String,
    pub(crate) h: RealFn,
    pub(crate) dh: RealFn,
    pub(crate) d2h: RealFn,
    pub(crate) big_h: Option<RealFn>,
    /// Validity bound: `|h| < 1` holds on `(−x_max, x_max)`.
    pub(crate) x_max: f64,
    /// Exact series of `h` in `X`, for presets with rational-representable
    /// parameters.
    pub(crate) taylor: Option<RationalSeries>,
}

impl fmt::Debug for HSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HSpec")
            .field("label", &self.label)
            .field("x_max", &self.x_max)
            .field("has_big_h", &self.big_h.is_some())
            .field("has_taylor", &self.taylor.is_some())
            .finish()
    }
}

impl HSpec {
    /// Custom specification. `big_h` may be omitted, in which case the
    /// antiderivative is computed by adaptive quadrature (much slower).
    pub fn custom<F, D, D2>(label: &str, h: F, dh: D, d2h: D2, big_h: Option<RealFn>, x_max: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.to_string(),
            h: Arc::new(h),
            dh: Arc::new(dh),
            d2h: Arc::new(d2h),
            big_h,
            x_max,
            taylor: None,
        }
    }

    pub fn with_taylor(mut self, taylor: RationalSeries) -> Self {
        self.taylor = Some(taylor);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// `h ≡ 0`: the harmonic well.
    pub fn zero() -> Self {
        Self {
            label: "h:preset=zero".into(),
            h: Arc::new(|_| 0.0),
            dh: Arc::new(|_| 0.0),
            d2h: Arc::new(|_| 0.0),
            big_h: Some(Arc::new(|_| 0.0)),
            x_max: f64::INFINITY,
            taylor: Some(RationalSeries::zero(H_TAYLOR_ORDER)),
        }
    }

    /// `h(X) = √2 α X / √(2 + β X²)`, the characteristic function of the
    /// three-parameter closed-form family (at unit scale).
    pub fn three(alpha: f64, beta: f64) -> Result<Self> {
        check_finite(&[("alpha", alpha), ("beta", beta)])?;
        let x_max = if 2.0 * alpha * alpha > beta {
            (2.0 / (2.0 * alpha * alpha - beta)).sqrt()
        } else {
            f64::INFINITY
        };
        let s2 = std::f64::consts::SQRT_2;
        let taylor = (|| {
            // h = α X (1 + (β/2) X²)^{-1/2}
            let a = rat_from_f64(alpha)?;
            let b = rat_from_f64(beta)?;
            let mut inner = RationalSeries::zero(H_TAYLOR_ORDER);
            inner.set_coeff(2, b / rat(2, 1));
            let factor = RationalSeries::binomial(&rat(-1, 2), H_TAYLOR_ORDER)
                .compose(&inner)
                .ok()?;
            RationalSeries::identity(H_TAYLOR_ORDER).scaled(&a).mul(&factor).ok()
        })();
        Ok(Self {
            label: format!("h:preset=three,alpha={alpha},beta={beta}"),
            h: Arc::new(move |x| s2 * alpha * x / (2.0 + beta * x * x).sqrt()),
            dh: Arc::new(move |x| 2.0 * s2 * alpha * (2.0 + beta * x * x).powf(-1.5)),
            d2h: Arc::new(move |x| -6.0 * s2 * alpha * beta * x * (2.0 + beta * x * x).powf(-2.5)),
            big_h: Some(Arc::new(move |x| {
                s2 * alpha * x * x / ((2.0 + beta * x * x).sqrt() + s2)
            })),
            x_max,
            taylor,
        })
    }

    /// First extra two-parameter family:
    /// `h(X) = α [ (1/3) X (1+β²X²)^{-3/2} + (2/3) X (1+β²X²)^{-1/2} ]`,
    /// whose derivative is `α (1+β²X²)^{-5/2}`.
    pub fn other1(alpha: f64, beta: f64) -> Result<Self> {
        check_finite(&[("alpha", alpha), ("beta", beta)])?;
        let b2 = beta * beta;
        let x_max = if alpha == 0.0 {
            f64::INFINITY
        } else if beta == 0.0 {
            1.0 / alpha.abs()
        } else if 2.0 * alpha.abs() < 3.0 * beta.abs() {
            f64::INFINITY
        } else {
            // |h| is increasing; find where it reaches 1
            let habs = |x: f64| {
                alpha.abs() * ((1.0 / 3.0) * x * (1.0 + b2 * x * x).powf(-1.5)
                    + (2.0 / 3.0) * x * (1.0 + b2 * x * x).powf(-0.5))
            };
            let mut hi = 1.0;
            while habs(hi) < 1.0 {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::InvalidFamily("other1: |h| never reaches 1".into()));
                }
            }
            crate::roots::brent(|x| habs(x) - 1.0, 0.0, hi, 1e-14)?
        };
        let taylor = (|| {
            let a = rat_from_f64(alpha)?;
            let b = rat_from_f64(beta)?;
            let mut inner = RationalSeries::zero(H_TAYLOR_ORDER);
            inner.set_coeff(2, &b * &b);
            let m32 = RationalSeries::binomial(&rat(-3, 2), H_TAYLOR_ORDER).compose(&inner).ok()?;
            let m12 = RationalSeries::binomial(&rat(-1, 2), H_TAYLOR_ORDER).compose(&inner).ok()?;
            let mix = m32.scaled(&rat(1, 3)).add(&m12.scaled(&rat(2, 3))).ok()?;
            RationalSeries::identity(H_TAYLOR_ORDER).scaled(&a).mul(&mix).ok()
        })();
        Ok(Self {
            label: format!("h:preset=other1,alpha={alpha},beta={beta}"),
            h: Arc::new(move |x| {
                let s = 1.0 + b2 * x * x;
                alpha * x * ((1.0 / 3.0) * s.powf(-1.5) + (2.0 / 3.0) * s.powf(-0.5))
            }),
            dh: Arc::new(move |x| alpha * (1.0 + b2 * x * x).powf(-2.5)),
            d2h: Arc::new(move |x| -5.0 * alpha * b2 * x * (1.0 + b2 * x * x).powf(-3.5)),
            big_h: Some(Arc::new(move |x| {
                // (α/(3β²)) [ (1+2s)/√(1+s) − 1 ], s = β²X², rationalized:
                // = (α X²/3) (3+4s) / ((1+2s+√(1+s)) √(1+s))
                let s = b2 * x * x;
                let root = (1.0 + s).sqrt();
                (alpha * x * x / 3.0) * (3.0 + 4.0 * s) / ((1.0 + 2.0 * s + root) * root)
            })),
            x_max,
            taylor,
        })
    }

    /// Second extra family, defined by the simple antiderivative
    /// `H(X) = α X² / √(1 + α²X²)`; then
    /// `h(X) = (2αX + α³X³)(1+α²X²)^{-3/2}` and `|h| < 1` holds for
    /// `α²X² < (√5−1)/2`.
    pub fn other2(alpha: f64) -> Result<Self> {
        check_finite(&[("alpha", alpha)])?;
        let a2 = alpha * alpha;
        let x_max = if alpha == 0.0 { f64::INFINITY } else { (U0 / a2).sqrt() };
        let taylor = (|| {
            let a = rat_from_f64(alpha)?;
            let mut inner = RationalSeries::zero(H_TAYLOR_ORDER);
            inner.set_coeff(2, &a * &a);
            let m32 = RationalSeries::binomial(&rat(-3, 2), H_TAYLOR_ORDER).compose(&inner).ok()?;
            let mut poly = RationalSeries::zero(H_TAYLOR_ORDER);
            poly.set_coeff(1, &a * rat(2, 1));
            poly.set_coeff(3, &a * &a * &a);
            poly.mul(&m32).ok()
        })();
        Ok(Self {
            label: format!("h:preset=other2,alpha={alpha}"),
            h: Arc::new(move |x| {
                (2.0 * alpha * x + a2 * alpha * x * x * x) * (1.0 + a2 * x * x).powf(-1.5)
            }),
            dh: Arc::new(move |x| {
                (2.0 * alpha - a2 * alpha * x * x) * (1.0 + a2 * x * x).powf(-2.5)
            }),
            d2h: Arc::new(move |x| {
                -3.0 * a2 * alpha * x * (4.0 - a2 * x * x) * (1.0 + a2 * x * x).powf(-3.5)
            }),
            big_h: Some(Arc::new(move |x| alpha * x * x / (1.0 + a2 * x * x).sqrt())),
            x_max,
            taylor,
        })
    }

    /// Antiderivative of `h` with `H(0) = 0`: closed form if supplied,
    /// otherwise adaptive quadrature.
    pub(crate) fn big_h_at(&self, x: f64) -> f64 {
        match &self.big_h {
            Some(f) => f(x),
            None => {
                let h = self.h.clone();
                adaptive_simpson(&|t| h(t), 0.0, x, 1e-14 * (1.0 + x.abs()))
            }
        }
    }

    /// Structural validation: oddness, `|h| < 1` inside the bound, `H` (if
    /// given) really an antiderivative of `h`, `h'` consistent with `h`.
    pub(crate) fn validate(&self) -> Result<()> {
        let probe_hi = if self.x_max.is_finite() { 0.97 * self.x_max } else { 4.0 };
        if !(probe_hi > 0.0) {
            return Err(Error::InvalidFamily(format!("{}: empty validity range", self.label)));
        }
        if (self.h)(0.0).abs() > 1e-14 {
            return Err(Error::InvalidFamily(format!("{}: h(0) != 0", self.label)));
        }
        for i in 1..=33 {
            let x = probe_hi * i as f64 / 33.0;
            let hp = (self.h)(x);
            let hm = (self.h)(-x);
            if (hp + hm).abs() > 1e-10 * (1.0 + hp.abs()) {
                return Err(Error::InvalidFamily(format!(
                    "{}: h is not odd at X = {x} (h(X) = {hp}, h(-X) = {hm})",
                    self.label
                )));
            }
            if hp.abs() >= 1.0 || !hp.is_finite() {
                return Err(Error::InvalidFamily(format!(
                    "{}: |h| >= 1 at X = {x} inside the stated bound (h = {hp})",
                    self.label
                )));
            }
            // finite-difference consistency of dh and (optionally) H
            let step = 1e-5 * (1.0 + x.abs());
            let fd = ((self.h)(x + step) - (self.h)(x - step)) / (2.0 * step);
            if (fd - (self.dh)(x)).abs() > 1e-4 * (1.0 + fd.abs()) {
                return Err(Error::InvalidFamily(format!(
                    "{}: h' inconsistent with h at X = {x}",
                    self.label
                )));
            }
            if let Some(big_h) = &self.big_h {
                let fd = (big_h(x + step) - big_h(x - step)) / (2.0 * step);
                if (fd - hp).abs() > 1e-4 * (1.0 + hp.abs()) {
                    return Err(Error::InvalidFamily(format!(
                        "{}: H is not an antiderivative of h (mismatch at X = {x})",
                        self.label
                    )));
                }
            }
        }
        if let Some(big_h) = &self.big_h {
            if big_h(0.0).abs() > 1e-14 {
                return Err(Error::InvalidFamily(format!("{}: H(0) != 0", self.label)));
            }
        }
        if let Some(taylor) = &self.taylor {
            if !taylor.coeff(0).is_zero() {
                return Err(Error::InvalidFamily(format!("{}: h series must vanish at 0", self.label)));
            }
        }
        Ok(())
    }
}

fn check_finite(params: &[(&str, f64)]) -> Result<()> {
    for (name, value) in params {
        if !value.is_finite() {
            return Err(Error::InvalidFamily(format!("{name} = {value} is not finite")));
        }
    }
    Ok(())
}
