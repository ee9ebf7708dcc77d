//! Period functions of conservative oscillators `ẍ + g(x) = 0`.
//!
//! The crate provides three interlocking layers:
//!
//! * an exact-arithmetic series kernel ([`series`]) and the coefficient
//!   recursion that characterizes isochronous potentials ([`isochrony`]);
//! * closed-form potential families and constructions ([`potential`])
//!   together with the numerical period engine ([`period`]): turning
//!   points, the well involution, `T(c)`, `T'(c)`, and the fractional
//!   integral relating the period to the turning-point distance;
//! * decision procedures for monotonicity and isochronicity
//!   ([`criteria`]) cross-validated by direct integration of the flow
//!   ([`oracle`]).
//!
//! Everything is deterministic and pure: potentials are immutable after
//! construction and all engines are safe to call concurrently.

// `!(x > 0.0)` is used deliberately throughout: unlike `x <= 0.0` it also
// rejects NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;

pub mod criteria;
pub mod isochrony;
pub mod oracle;
pub mod period;
pub mod potential;
pub mod quad;
pub mod roots;
pub mod series;

pub use error::{Error, Result};
pub use isochrony::{
    b_from_g, g_from_b, odd_from_even, EvenCoefficients, IsochroneSeries, SeriesMatch,
};
pub use potential::{FamilySpec, HSpec, Potential};
pub use series::{rat, rat_from_f64, Rational, RationalSeries};
