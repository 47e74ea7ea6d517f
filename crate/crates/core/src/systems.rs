//! Catalog of builtin diagonal systems with closed-form antiderivatives.
//!
//! | name                    | coefficients                                  | parameters           |
//! |-------------------------|-----------------------------------------------|----------------------|
//! | `intro-diagonal`        | `ω₁`, `ω₂·t·sin t`                            | `omega1=4, omega2=2` |
//! | `no-ubg-scalar`         | `t·sin t + 1`                                 | none                 |
//! | `no-ubg-scalar-literal` | `t·(sin t + 1)`                               | none                 |
//! | `planar-nubg`           | `sin(ln t) + cos(ln t)`, `ω₁ − ω₂·t·sin t`    | `omega1=4, omega2=2` |
//! | `constant`              | `c1, …, cn`                                   | `c1=0` by default    |
//!
//! `no-ubg-scalar` reads the scalar example as `t·sin t + 1`, the only
//! reading consistent with its worked antiderivative; the literal
//! parenthesization is available as `no-ubg-scalar-literal`.

use std::collections::BTreeMap;

use crate::coefficient::{CoefficientError, CoefficientFunction};
use crate::spectra::DiagonalSystem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("unknown builtin system `{name}` (known: {})", known.join(", "))]
    UnknownSystem {
        name: String,
        known: Vec<&'static str>,
    },
    #[error("system `{system}` has no parameter `{name}` (allowed: {allowed})")]
    UnknownParameter {
        system: String,
        name: String,
        allowed: String,
    },
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFiniteParameter { name: String, value: f64 },
    #[error("constant system parameters must be c1..cn without gaps; missing `{0}`")]
    MissingConstant(String),
    #[error("system must have at least one coefficient")]
    Empty,
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

/// Catalog entry description.
#[derive(Debug, Clone, Copy)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub defaults: &'static [(&'static str, f64)],
}

pub const CATALOG: &[BuiltinInfo] = &[
    BuiltinInfo {
        name: "intro-diagonal",
        summary: "diag(omega1, omega2*t*sin(t))",
        defaults: &[("omega1", 4.0), ("omega2", 2.0)],
    },
    BuiltinInfo {
        name: "no-ubg-scalar",
        summary: "t*sin(t) + 1",
        defaults: &[],
    },
    BuiltinInfo {
        name: "no-ubg-scalar-literal",
        summary: "t*(sin(t) + 1)",
        defaults: &[],
    },
    BuiltinInfo {
        name: "planar-nubg",
        summary: "diag(sin(ln(t)) + cos(ln(t)), omega1 - omega2*t*sin(t))",
        defaults: &[("omega1", 4.0), ("omega2", 2.0)],
    },
    BuiltinInfo {
        name: "constant",
        summary: "diag(c1, ..., cn), default c1 = 0",
        defaults: &[("c1", 0.0)],
    },
];

pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|b| b.name).collect()
}

/// Materializes a catalog entry with `overrides` applied on top of its
/// defaults.
pub fn builtin(
    name: &str,
    overrides: &BTreeMap<String, f64>,
) -> Result<DiagonalSystem, SystemError> {
    let info =
        CATALOG
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| SystemError::UnknownSystem {
                name: name.to_string(),
                known: names(),
            })?;
    for (key, &value) in overrides {
        if !value.is_finite() {
            return Err(SystemError::NonFiniteParameter {
                name: key.clone(),
                value,
            });
        }
    }
    if name == "constant" {
        return constant_system(overrides);
    }

    let mut params: BTreeMap<String, f64> = info
        .defaults
        .iter()
        .map(|&(k, v)| (k.to_string(), v))
        .collect();
    for (key, &value) in overrides {
        match params.get_mut(key) {
            Some(slot) => *slot = value,
            None => {
                return Err(SystemError::UnknownParameter {
                    system: name.to_string(),
                    name: key.clone(),
                    allowed: allowed_list(info),
                })
            }
        }
    }
    let p = |key: &str| format!("({:?})", params[key]);

    let coefficients = match name {
        "intro-diagonal" => {
            let (w1, w2) = (p("omega1"), p("omega2"));
            vec![
                coefficient(&w1, &format!("{w1}*t"))?,
                coefficient(
                    &format!("{w2}*t*sin(t)"),
                    &format!("{w2}*(sin(t)-t*cos(t))"),
                )?,
            ]
        }
        "no-ubg-scalar" => vec![coefficient("t*sin(t)+1", "sin(t)-t*cos(t)+t")?],
        "no-ubg-scalar-literal" => vec![coefficient("t*(sin(t)+1)", "sin(t)-t*cos(t)+t^2/2")?],
        "planar-nubg" => {
            let (w1, w2) = (p("omega1"), p("omega2"));
            vec![
                coefficient("sin(ln(t))+cos(ln(t))", "t*sin(ln(t))")?,
                coefficient(
                    &format!("{w1}-{w2}*t*sin(t)"),
                    &format!("{w1}*t+{w2}*t*cos(t)-{w2}*sin(t)"),
                )?,
            ]
        }
        _ => unreachable!("catalog entry without constructor"),
    };
    DiagonalSystem::new(name, coefficients, params).map_err(|_| SystemError::Empty)
}

fn coefficient(body: &str, anti: &str) -> Result<CoefficientFunction, SystemError> {
    Ok(CoefficientFunction::parse(body, Some(anti))?)
}

fn allowed_list(info: &BuiltinInfo) -> String {
    if info.defaults.is_empty() {
        "none".to_string()
    } else {
        info.defaults
            .iter()
            .map(|(k, _)| *k)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn constant_system(overrides: &BTreeMap<String, f64>) -> Result<DiagonalSystem, SystemError> {
    let mut values: BTreeMap<usize, f64> = BTreeMap::new();
    for (key, &value) in overrides {
        let index = key
            .strip_prefix('c')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&i| i >= 1 && key == &format!("c{i}"));
        match index {
            Some(i) => {
                values.insert(i, value);
            }
            None => {
                return Err(SystemError::UnknownParameter {
                    system: "constant".to_string(),
                    name: key.clone(),
                    allowed: "c1, c2, ...".to_string(),
                })
            }
        }
    }
    if values.is_empty() {
        values.insert(1, 0.0);
    }
    let n = *values.keys().last().expect("non-empty");
    for i in 1..=n {
        if !values.contains_key(&i) {
            return Err(SystemError::MissingConstant(format!("c{i}")));
        }
    }
    let coefficients = values
        .values()
        .map(|&c| CoefficientFunction::constant(c))
        .collect();
    let params = values.iter().map(|(i, &c)| (format!("c{i}"), c)).collect();
    DiagonalSystem::new("constant", coefficients, params).map_err(|_| SystemError::Empty)
}
