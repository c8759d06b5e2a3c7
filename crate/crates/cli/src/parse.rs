//! Value parsers for command-line arguments.

use std::str::FromStr;

use thciz::regimes::{Family, Regime};
use thciz::tensors::StateSpec;
use thciz::{ExactRational, PermTuple};

/// A real number given as a decimal or an exact rational such as `1/2`.
pub fn real(s: &str) -> Result<f64, String> {
    if let Ok(r) = ExactRational::from_str(s) {
        return Ok(r.to_f64());
    }
    s.trim().parse::<f64>().map_err(|_| format!("not a number: {s:?}")).and_then(|v| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("not a finite number: {s:?}"))
        }
    })
}

/// A permutation tuple such as `2,1;1,2`, validated and kept as text.
pub fn tuple(s: &str) -> Result<String, String> {
    s.parse::<PermTuple>().map(|_| s.trim().to_string()).map_err(|e| e.to_string())
}

pub fn family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: thciz::Error| e.to_string())
}

pub fn regime(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e: thciz::Error| e.to_string())
}

/// A state family: inline JSON, `@file.json`, or one of the shorthands
/// `max-mixed`, `pure`, `pure:SEED`, `one-uniform`, `product-rank:R`,
/// `interpolation:D1,DS,DE`.
pub fn state(s: &str) -> Result<StateSpec, String> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        return serde_json::from_str(&text).map_err(|e| format!("bad state JSON in {path}: {e}"));
    }
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| format!("bad state JSON: {e}"));
    }
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let int = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("not a non-negative integer: {v:?}"));
    match (name.to_ascii_lowercase().replace('_', "-").as_str(), arg) {
        ("max-mixed" | "maximally-mixed", None) => Ok(StateSpec::MaximallyMixed),
        ("pure" | "pure-separable", None) => Ok(StateSpec::PureSeparable { seed: None }),
        ("pure" | "pure-separable", Some(seed)) => {
            Ok(StateSpec::PureSeparable { seed: Some(seed.trim().parse().map_err(|_| format!("bad seed {seed:?}"))?) })
        }
        ("one-uniform", None) => Ok(StateSpec::OneUniform),
        ("product-rank", Some(r)) => Ok(StateSpec::ProductRank { rank: int(r)? }),
        ("interpolation", Some(dims)) => {
            let v: Vec<usize> = dims.split(',').map(int).collect::<Result<_, _>>()?;
            match v[..] {
                [d1, ds, de] => Ok(StateSpec::Interpolation { d1, ds, de }),
                _ => Err("interpolation needs three dimensions d1,ds,de".into()),
            }
        }
        _ => Err(format!(
            "unknown state {s:?} (expected JSON, @file, max-mixed, pure[:seed], one-uniform, product-rank:R, interpolation:d1,ds,de)"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_accept_rationals() {
        assert_eq!(real("1/2").unwrap(), 0.5);
        assert_eq!(real("0.25").unwrap(), 0.25);
        assert_eq!(real("1e-3").unwrap(), 1e-3);
        assert!(real("x").is_err());
        assert!(real("inf").is_err());
    }

    #[test]
    fn state_shorthands() {
        assert_eq!(state("max-mixed").unwrap(), StateSpec::MaximallyMixed);
        assert_eq!(state("product-rank:3").unwrap(), StateSpec::ProductRank { rank: 3 });
        assert_eq!(state("interpolation:1,2,3").unwrap(), StateSpec::Interpolation { d1: 1, ds: 2, de: 3 });
        assert_eq!(state("pure:5").unwrap(), StateSpec::PureSeparable { seed: Some(5) });
        assert_eq!(state(r#"{"kind":"one_uniform"}"#).unwrap(), StateSpec::OneUniform);
        assert!(state("interpolation:1,2").is_err());
        assert!(state("nope").is_err());
    }
}
