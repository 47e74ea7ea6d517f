//! TOML run configuration. Every section is optional; missing values fall
//! back to the defaults of the subcommand that reads them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use dichospec::coefficient::CoefficientFunction;
use dichospec::quad::{IntegrationMode, QuadOptions};
use dichospec::spectra::SpectraOptions;
use dichospec::systems::builtin;
use dichospec::DiagonalSystem;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub lyap: LyapSection,
    #[serde(default)]
    pub ed: EdSection,
    #[serde(default)]
    pub ned: WindowSection,
    #[serde(default)]
    pub bias: BiasSection,
    #[serde(default)]
    pub wis: WisSection,
    #[serde(default)]
    pub growth: GrowthSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Either a builtin (`builtin` plus `params`) or an inline system given by
/// coefficient expressions. An empty antiderivative string means "none".
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub builtin: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub name: Option<String>,
    pub coefficients: Option<Vec<String>>,
    pub antiderivatives: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapSection {
    #[serde(rename = "T1")]
    pub t1: Option<f64>,
    #[serde(rename = "T2")]
    pub t2: Option<f64>,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdSection {
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub t0: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    #[serde(rename = "H")]
    pub h: Option<f64>,
    #[serde(rename = "T1")]
    pub t1: Option<f64>,
    #[serde(rename = "T2")]
    pub t2: Option<f64>,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasSection {
    #[serde(rename = "H")]
    pub h: Option<f64>,
    #[serde(rename = "T1")]
    pub t1: Option<f64>,
    #[serde(rename = "T2")]
    pub t2: Option<f64>,
    pub grid_step: Option<f64>,
    pub epsilon: Option<f64>,
}

/// `T`, `s_points`, `gap_points` and `max_pairs` describe the pair grid:
/// `s` log-spaced over `[1, T]`, gaps log-spaced over `[1, T - s]`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WisSection {
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub s_points: Option<usize>,
    pub gap_points: Option<usize>,
    pub max_pairs: Option<usize>,
    pub b_max: Option<f64>,
    pub coarse: Option<usize>,
    pub fine: Option<usize>,
    pub offset_limit: Option<f64>,
    /// Components tested for membership; all when empty.
    #[serde(default)]
    pub components: Vec<usize>,
    #[serde(default)]
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSection {
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub s_points: Option<usize>,
    pub gap_points: Option<usize>,
    pub max_pairs: Option<usize>,
    #[serde(default)]
    pub a_candidates: Vec<f64>,
    #[serde(default)]
    pub absolute: bool,
    #[serde(default)]
    pub components: Vec<usize>,
    pub offset_limit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Auto,
    Exact,
    Numeric,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    pub error_target: Option<f64>,
    pub mode: Option<ModeName>,
    pub max_panels: Option<u64>,
    pub ratio_min: Option<f64>,
    pub ratio_warn: Option<f64>,
    pub divergence_factor: Option<f64>,
    pub refine: Option<bool>,
    pub containment_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<String>,
    pub plot_data: Option<String>,
    pub plot_points: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn system(&self) -> Result<DiagonalSystem, CliError> {
        let s = &self.system;
        match (&s.builtin, &s.coefficients) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "system: set either `builtin` or `coefficients`, not both".into(),
            )),
            (None, Some(bodies)) => {
                if !s.params.is_empty() {
                    return Err(CliError::Config(
                        "system.params only applies to builtin systems".into(),
                    ));
                }
                let antis = s.antiderivatives.clone().unwrap_or_default();
                if !antis.is_empty() && antis.len() != bodies.len() {
                    return Err(CliError::Config(format!(
                        "system.antiderivatives has {} entries for {} coefficients",
                        antis.len(),
                        bodies.len()
                    )));
                }
                let coefficients = bodies
                    .iter()
                    .enumerate()
                    .map(|(i, body)| {
                        let anti = antis
                            .get(i)
                            .map(String::as_str)
                            .filter(|a| !a.trim().is_empty());
                        CoefficientFunction::parse(body, anti)
                            .map_err(|e| CliError::Config(format!("system.coefficients[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let name = s.name.clone().unwrap_or_else(|| "inline".into());
                DiagonalSystem::new(name, coefficients, BTreeMap::new())
                    .map_err(|e| CliError::Config(format!("system: {e}")))
            }
            (name, None) => {
                if s.antiderivatives.is_some() {
                    return Err(CliError::Config(
                        "system.antiderivatives requires system.coefficients".into(),
                    ));
                }
                let name = name.as_deref().unwrap_or("planar-nubg");
                builtin(name, &s.params).map_err(|e| CliError::Config(format!("system: {e}")))
            }
        }
    }

    pub fn spectra_options(&self) -> Result<SpectraOptions, CliError> {
        let n = &self.numerics;
        let mut quad = QuadOptions::default();
        if let Some(e) = n.error_target {
            quad.error_target = positive("numerics.error_target", e)?;
        }
        if let Some(m) = n.max_panels {
            if m == 0 {
                return Err(CliError::Config(
                    "numerics.max_panels must be positive".into(),
                ));
            }
            quad.max_panels = m;
        }
        quad.mode = match n.mode.unwrap_or(ModeName::Auto) {
            ModeName::Auto => IntegrationMode::Auto,
            ModeName::Exact => IntegrationMode::Exact,
            ModeName::Numeric => IntegrationMode::Numeric,
        };
        let mut opts = SpectraOptions {
            quad,
            ..SpectraOptions::default()
        };
        if let Some(r) = n.ratio_min {
            opts.ratio_min = positive("numerics.ratio_min", r)?;
        }
        if let Some(r) = n.ratio_warn {
            opts.ratio_warn = positive("numerics.ratio_warn", r)?;
        }
        if let Some(f) = n.divergence_factor {
            opts.divergence_factor = positive("numerics.divergence_factor", f)?;
        }
        opts.refine = n.refine.unwrap_or(false);
        Ok(opts)
    }

    pub fn containment_tolerance(&self) -> Result<f64, CliError> {
        match self.numerics.containment_tolerance {
            None => Ok(0.05),
            Some(t) if t >= 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(CliError::Config(format!(
                "numerics.containment_tolerance must be >= 0, got {t}"
            ))),
        }
    }
}

pub fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{key} must be positive, got {v}")))
    }
}

/// Checks an optional value and falls back to `default`.
pub fn positive_or(key: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    v.map_or(Ok(default), |v| positive(key, v))
}

pub fn optional_positive(key: &str, v: Option<f64>) -> Result<Option<f64>, CliError> {
    v.map(|v| positive(key, v)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let err = RunConfig::parse("[lyap]\nT1 = 1.0\nT3 = 2.0\n").unwrap_err();
        assert!(err.to_string().contains("T3"), "{err}");
        let err = RunConfig::parse("[plot]\n").unwrap_err();
        assert!(err.to_string().contains("plot"), "{err}");
    }

    #[test]
    fn inline_and_builtin_systems() {
        let c = RunConfig::parse(
            "[system]\ncoefficients = [\"1\", \"t*sin(t)\"]\nantiderivatives = [\"t\", \"\"]\n",
        )
        .unwrap();
        let s = c.system().unwrap();
        assert_eq!(s.dimension(), 2);
        assert!(s.coefficients()[0].has_antiderivative());
        assert!(!s.coefficients()[1].has_antiderivative());

        let c =
            RunConfig::parse("[system]\nbuiltin = \"intro-diagonal\"\nparams = { omega1 = 3.0 }\n")
                .unwrap();
        assert_eq!(c.system().unwrap().parameters()["omega1"], 3.0);
        assert_eq!(RunConfig::default().system().unwrap().name(), "planar-nubg");

        let bad = RunConfig::parse("[system]\nbuiltin = \"nope\"\n").unwrap();
        assert!(matches!(bad.system(), Err(CliError::Config(_))));
        let bad = RunConfig::parse("[system]\ncoefficients = [\"2t\"]\n").unwrap();
        assert!(bad
            .system()
            .unwrap_err()
            .to_string()
            .contains("coefficients[0]"));
    }

    #[test]
    fn numerics_are_validated_by_key() {
        let c = RunConfig::parse("[numerics]\nerror_target = -1.0\n").unwrap();
        assert!(c
            .spectra_options()
            .unwrap_err()
            .to_string()
            .contains("numerics.error_target"));
        let c = RunConfig::parse("[numerics]\nmode = \"numeric\"\nrefine = true\n").unwrap();
        let o = c.spectra_options().unwrap();
        assert_eq!(o.quad.mode, IntegrationMode::Numeric);
        assert!(o.refine);
        assert!(RunConfig::parse("[numerics]\nmode = \"fast\"\n").is_err());
    }
}
