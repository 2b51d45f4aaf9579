//! SI-suffixed number parsing and deterministic float formatting.
//!
//! The same number grammar is shared by the netlist parser, the config
//! reader and CLI flags: an ordinary float literal optionally followed by
//! one of the classic SPICE suffixes `f p n u m k meg g`. Note the classic
//! pitfall: `1m` is 1e-3 and `1meg` is 1e6.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("empty number")]
    Empty,
    #[error("invalid number '{0}'")]
    BadNumber(String),
    #[error("unknown suffix '{0}'")]
    BadSuffix(String),
}

/// Multiplier for a SPICE engineering suffix, if recognized.
pub fn suffix_multiplier(suffix: &str) -> Option<f64> {
    match suffix.to_ascii_lowercase().as_str() {
        "" => Some(1.0),
        "f" => Some(1e-15),
        "p" => Some(1e-12),
        "n" => Some(1e-9),
        "u" => Some(1e-6),
        "m" => Some(1e-3),
        "k" => Some(1e3),
        "meg" => Some(1e6),
        "g" => Some(1e9),
        _ => None,
    }
}

/// Parses a number with an optional SI suffix (`17f`, `4.5`, `1e-12`, `10meg`).
pub fn parse_si(text: &str) -> Result<f64, UnitError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(UnitError::Empty);
    }
    // Split the longest prefix that parses as a float from the trailing
    // suffix letters. Scientific notation is handled by the float parser,
    // so `1e-3` must not be mistaken for value `1` with suffix `e-3`.
    // Split points walk char boundaries; arbitrary bytes must not panic.
    let mut best: Option<(usize, f64)> = None;
    for (idx, ch) in t.char_indices() {
        let end = idx + ch.len_utf8();
        if let Ok(v) = t[..end].parse::<f64>() {
            best = Some((end, v));
        }
    }
    let (split, value) = best.ok_or_else(|| UnitError::BadNumber(t.to_string()))?;
    let suffix = &t[split..];
    let mult = suffix_multiplier(suffix).ok_or_else(|| UnitError::BadSuffix(suffix.to_string()))?;
    let v = value * mult;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(UnitError::BadNumber(t.to_string()))
    }
}

/// Formats a float with a fixed number of significant digits.
///
/// All emitted CSV/JSON numbers go through this so identical runs produce
/// byte-identical output regardless of platform printf behavior.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    // Normalize exponent form: Rust prints `1.23e4`; keep as-is but strip
    // redundant '+' never emitted and trailing zeros in the mantissa.
    let (mant, exp) = s.split_once('e').unwrap();
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    let exp: i32 = exp.parse().unwrap();
    if exp == 0 {
        mant.to_string()
    } else {
        format!("{mant}e{exp}")
    }
}

/// Rounds to `digits` significant digits; used before JSON serialization.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    fmt_sig(x, digits).parse().unwrap_or(x)
}
