//! Radian parsing and pretty-printing.
//!
//! Angles are accepted either as plain decimals (`0.7853981633974483`) or as
//! π-fractions (`pi/4`, `3pi/8`, `-pi/6`, `2pi`, `pi`).  The printer renders
//! exact multiples of π/24 as reduced fractions and falls back to decimals
//! for everything else, so the common detector angles read the way they are
//! usually written.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parses an angle in radians from a decimal or a π-fraction string.
///
/// Accepted forms: `1.25`, `-0.5`, `pi`, `-pi`, `2pi`, `pi/4`, `3pi/8`,
/// `-5pi/12`.  Whitespace around the value is ignored; `π` may be written in
/// place of `pi`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim().replace('π', "pi");
    if s.is_empty() {
        return Err(Error::Parse("empty angle".into()));
    }
    if let Ok(v) = s.parse::<f64>() {
        if !v.is_finite() {
            return Err(Error::Parse(format!("angle `{text}` is not finite")));
        }
        return Ok(v);
    }
    let Some(at) = s.find("pi") else {
        return Err(Error::Parse(format!(
            "angle `{text}` is neither a decimal nor a pi-fraction"
        )));
    };
    let (coeff_str, rest) = (&s[..at], &s[at + 2..]);
    let coeff = match coeff_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad pi coefficient in `{text}`")))?,
    };
    let denom = match rest.strip_prefix('/') {
        None if rest.is_empty() => 1.0,
        None => {
            return Err(Error::Parse(format!(
                "unexpected trailing characters in angle `{text}`"
            )))
        }
        Some(d) => {
            let d: f64 = d
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in `{text}`")))?;
            if d == 0.0 {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            d
        }
    };
    Ok(coeff * PI / denom)
}

/// Formats an angle in radians, using a π-fraction when the value is an
/// exact multiple of π/24 (within 1e-9) and a decimal otherwise.
pub fn format_angle(value: f64) -> String {
    let steps = value / (PI / 24.0);
    let k = steps.round();
    if (steps - k).abs() < 1e-9 * 24.0 / PI && k.abs() < 1e6 {
        let k = k as i64;
        if k == 0 {
            return "0".into();
        }
        let g = gcd(k.unsigned_abs(), 24);
        let (num, den) = (k / g as i64, 24 / g);
        let sign = if num < 0 { "-" } else { "" };
        let num = num.abs();
        return match (num, den) {
            (1, 1) => format!("{sign}pi"),
            (n, 1) => format!("{sign}{n}pi"),
            (1, d) => format!("{sign}pi/{d}"),
            (n, d) => format!("{sign}{n}pi/{d}"),
        };
    }
    format!("{value:.9}")
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}
