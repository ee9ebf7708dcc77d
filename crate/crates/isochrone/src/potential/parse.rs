//! Family specification grammar.
//!
//! ```text
//!   harmonic
//!   urabe:alpha=0.3
//!   isotonic:alpha=1
//!   three:alpha=0.2,beta=0.5,gamma=1
//!   stillinger:alpha=0.4,gamma=1
//!   bmk:alpha=0.5
//!   series:a2=1/2,a3=-0.25
//!   h:preset=three|other1|other2|zero[,alpha=..][,beta=..]
//! ```
//!
//! Numeric values accept integers, decimals and exact fractions `p/q`.
//! Series coefficients are kept as exact rationals; family parameters are
//! doubles.

use std::collections::BTreeMap;

use num::BigInt;

use crate::error::{Error, Result};
use crate::series::Rational;

use super::{FamilySpec, HSpec};

fn err(spec: &str, message: impl Into<String>) -> Error {
    Error::ParseSpec(spec.to_string(), message.into())
}

/// Parse `p/q`, decimal, or integer text into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            "0".to_string()
        } else {
            int_part.to_string()
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int_value: BigInt = int_digits.parse().ok()?;
        let frac_value: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10).pow(frac_part.len() as u32);
        let signed_frac = if negative { -frac_value } else { frac_value };
        return Some(Rational::new(int_value * &scale + signed_frac, scale));
    }
    let n: BigInt = text.parse().ok()?;
    Some(Rational::from(n))
}

fn key_values<'a>(spec: &str, tail: &'a str) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut map = BTreeMap::new();
    if tail.trim().is_empty() {
        return Ok(map);
    }
    for item in tail.split(',') {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| err(spec, format!("expected key=value, got `{item}`")))?;
        if map.insert(key.trim(), value.trim()).is_some() {
            return Err(err(spec, format!("duplicate key `{}`", key.trim())));
        }
    }
    Ok(map)
}

fn take_f64(spec: &str, map: &mut BTreeMap<&str, &str>, key: &str) -> Result<f64> {
    let raw = map
        .remove(key)
        .ok_or_else(|| err(spec, format!("missing required parameter `{key}`")))?;
    raw.parse::<f64>()
        .map_err(|_| err(spec, format!("cannot parse `{key}={raw}` as a number")))
}

fn take_f64_or(spec: &str, map: &mut BTreeMap<&str, &str>, key: &str, default: f64) -> Result<f64> {
    match map.remove(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse::<f64>()
            .map_err(|_| err(spec, format!("cannot parse `{key}={raw}` as a number"))),
    }
}

fn reject_leftovers(spec: &str, map: &BTreeMap<&str, &str>) -> Result<()> {
    if let Some(key) = map.keys().next() {
        return Err(err(spec, format!("unknown parameter `{key}`")));
    }
    Ok(())
}

pub(super) fn parse_family_spec(spec: &str) -> Result<FamilySpec> {
    let trimmed = spec.trim();
    let (head, tail) = match trimmed.split_once(':') {
        Some((head, tail)) => (head.trim(), Some(tail)),
        None => (trimmed, None),
    };
    match head {
        "harmonic" => {
            if tail.is_some_and(|t| !t.trim().is_empty()) {
                return Err(err(spec, "harmonic takes no parameters"));
            }
            Ok(FamilySpec::Harmonic)
        }
        "urabe" => {
            let mut map = key_values(spec, tail.unwrap_or_default())?;
            let alpha = take_f64(spec, &mut map, "alpha")?;
            reject_leftovers(spec, &map)?;
            Ok(FamilySpec::Urabe { alpha })
        }
        "isotonic" => {
            let mut map = key_values(spec, tail.unwrap_or_default())?;
            let alpha = take_f64(spec, &mut map, "alpha")?;
            reject_leftovers(spec, &map)?;
            Ok(FamilySpec::Isotonic { alpha })
        }
        "three" => {
            let mut map = key_values(spec, tail.unwrap_or_default())?;
            let alpha = take_f64(spec, &mut map, "alpha")?;
            let beta = take_f64(spec, &mut map, "beta")?;
            let gamma = take_f64_or(spec, &mut map, "gamma", 1.0)?;
            reject_leftovers(spec, &map)?;
            Ok(FamilySpec::ThreeParam { alpha, beta, gamma })
        }
        "stillinger" => {
            let mut map = key_values(spec, tail.unwrap_or_default())?;
            let alpha = take_f64(spec, &mut map, "alpha")?;
            let gamma = take_f64_or(spec, &mut map, "gamma", 1.0)?;
            reject_leftovers(spec, &map)?;
            Ok(FamilySpec::Stillinger { alpha, gamma })
        }
        "bmk" => {
            let mut map = key_values(spec, tail.unwrap_or_default())?;
            let alpha = take_f64(spec, &mut map, "alpha")?;
            reject_leftovers(spec, &map)?;
            Ok(FamilySpec::BolotinMckay { alpha })
        }
        "series" => {
            let map = key_values(spec, tail.unwrap_or_default())?;
            let mut coeffs = Vec::new();
            for (key, value) in map {
                let index: usize = key
                    .strip_prefix('a')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| err(spec, format!("series keys look like a2, a3, ...; got `{key}`")))?;
                if index < 2 {
                    return Err(err(spec, "a0 and a1 are fixed by the normalization g(0)=0, g'(0)=1"));
                }
                let rational = parse_rational(value)
                    .ok_or_else(|| err(spec, format!("cannot parse `{key}={value}` as a rational")))?;
                coeffs.push((index, rational));
            }
            Ok(FamilySpec::Series { coeffs })
        }
        "h" => {
            let mut map = key_values(spec, tail.unwrap_or_default())?;
            let preset = map
                .remove("preset")
                .ok_or_else(|| err(spec, "h needs preset=zero|three|other1|other2"))?;
            let built = match preset {
                "zero" => HSpec::zero(),
                "three" => {
                    let alpha = take_f64(spec, &mut map, "alpha")?;
                    let beta = take_f64(spec, &mut map, "beta")?;
                    HSpec::three(alpha, beta)?
                }
                "other1" => {
                    let alpha = take_f64(spec, &mut map, "alpha")?;
                    let beta = take_f64(spec, &mut map, "beta")?;
                    HSpec::other1(alpha, beta)?
                }
                "other2" => {
                    let alpha = take_f64(spec, &mut map, "alpha")?;
                    HSpec::other2(alpha)?
                }
                other => return Err(err(spec, format!("unknown h preset `{other}`"))),
            };
            reject_leftovers(spec, &map)?;
            Ok(FamilySpec::FromH { spec: built })
        }
        other => Err(err(
            spec,
            format!("unknown family `{other}` (expected harmonic, urabe, isotonic, three, stillinger, bmk, series, or h)"),
        )),
    }
}
