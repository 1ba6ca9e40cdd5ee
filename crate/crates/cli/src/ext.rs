//! Serde helpers for extended reals: `inf`, `-inf` and `nan` travel as
//! strings so JSON manifests stay lossless.

use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};
use std::fmt;

pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// Accepts `inf`, `infinity`, `pi`, `2pi` and plain numbers.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Some(c) = t.strip_suffix("pi") {
        let c = c.trim_end_matches('*');
        let k = if c.is_empty() { 1.0 } else { c.parse::<f64>().map_err(|e| format!("{s}: {e}"))? };
        return Ok(k * std::f64::consts::PI);
    }
    t.parse::<f64>().map_err(|e| format!("{s}: {e}"))
}

struct RealVisitor;

impl Visitor<'_> for RealVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or one of \"inf\", \"-inf\", \"nan\", \"pi\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        if v.eq_ignore_ascii_case("nan") {
            return Ok(f64::NAN);
        }
        parse_real(v).map_err(E::custom)
    }
}

pub mod real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&format_real(*v))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(RealVisitor)
    }
}

pub mod opt_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => real::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        real::deserialize(d).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_symbols() {
        assert_eq!(parse_real("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_real("pi").unwrap(), std::f64::consts::PI);
        assert_eq!(parse_real("2pi").unwrap(), 2.0 * std::f64::consts::PI);
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert!(parse_real("abc").is_err());
        assert_eq!(format_real(f64::NEG_INFINITY), "-inf");
    }
}
