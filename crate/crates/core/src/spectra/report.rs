use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    bias_from, bias_ratio, build_integrals, ed_from, lyapunov_from, ned_ratio, steklov_from,
    time_grid, window_grid, BiasReport, DiagonalSystem, SpectraError, SpectraOptions,
    SpectralInterval, SpectrumKind, DEFAULT_EPSILON,
};
use crate::quad::{IntegrationMode, QuadProvenance};
use crate::steklov::{SteklovParams, TimeGrid};
use crate::wis::{check_containment, ContainmentViolation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovWindow {
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteklovWindow {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdWindow {
    #[serde(rename = "H")]
    pub h: f64,
    pub t0: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub grid_step: Option<f64>,
}

/// Windows for every procedure of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub lyapunov: LyapunovWindow,
    pub bias: SteklovWindow,
    pub epsilon: f64,
    pub ed: EdWindow,
    pub ned: SteklovWindow,
    pub containment_tolerance: f64,
    pub options: SpectraOptions,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            lyapunov: LyapunovWindow {
                t1: 1e2,
                t2: 1e4,
                grid_step: None,
            },
            bias: SteklovWindow {
                h: 1e3,
                t1: 1e6,
                t2: 1e7,
                grid_step: None,
            },
            epsilon: DEFAULT_EPSILON,
            ed: EdWindow {
                h: 1e4,
                t0: 1e5,
                t: 1e8,
                grid_step: None,
            },
            ned: SteklovWindow {
                h: 1e6,
                t1: 1e2,
                t2: 1e3,
                grid_step: None,
            },
            containment_tolerance: 0.05,
            options: SpectraOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSummary {
    pub name: String,
    pub dimension: usize,
    pub parameters: BTreeMap<String, f64>,
    pub coefficients: Vec<String>,
}

impl SystemSummary {
    pub fn of(system: &DiagonalSystem) -> Self {
        SystemSummary {
            name: system.name().to_string(),
            dimension: system.dimension(),
            parameters: system.parameters().clone(),
            coefficients: system
                .coefficients()
                .iter()
                .map(|c| c.to_string())
                .collect(),
        }
    }
}

/// A window as actually sampled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedWindow {
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    pub start: f64,
    pub end: f64,
    pub grid_step: f64,
    pub points: usize,
}

impl ResolvedWindow {
    fn new(h: Option<f64>, grid: &TimeGrid) -> Self {
        ResolvedWindow {
            h,
            start: grid.start,
            end: grid.end,
            grid_step: grid.step,
            points: grid.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub lyapunov: ResolvedWindow,
    pub bias: ResolvedWindow,
    pub ed: ResolvedWindow,
    /// Absent when every component is uniform.
    pub ned: Option<ResolvedWindow>,
    pub epsilon: f64,
    pub containment_tolerance: f64,
    pub error_target: f64,
    pub integration_mode: IntegrationMode,
    pub ratio_min: f64,
    pub ratio_warn: f64,
    pub divergence_factor: f64,
    pub refined_extrema: bool,
    pub integrals: Vec<QuadProvenance>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub system: SystemSummary,
    pub lyapunov: Vec<SpectralInterval>,
    pub ed: Vec<SpectralInterval>,
    pub ned: Vec<SpectralInterval>,
    pub bias: BiasReport,
    pub containment_violations: Vec<ContainmentViolation>,
    pub provenance: Provenance,
}

/// Runs the bias detector and routes each component: uniform components
/// take their ED interval as NED estimate; nonuniform components get a
/// divergent ED interval and a long-window NED interval.
pub fn full_report(
    system: &DiagonalSystem,
    config: &ReportConfig,
) -> Result<SpectrumReport, SpectraError> {
    let opts = &config.options;
    let mut warnings = Vec::new();

    let lyap_grid = time_grid(
        config.lyapunov.t1,
        config.lyapunov.t2,
        config.lyapunov.grid_step,
    )?;
    let b = config.bias;
    super::check_window(b.h)?;
    if !(config.epsilon > 0.0) {
        return Err(SpectraError::Precondition(format!(
            "epsilon must be positive, got {}",
            config.epsilon
        )));
    }
    let bias_grid = window_grid(b.t1, b.t2, b.h, b.grid_step)?;
    warnings.extend(bias_ratio(b.h, b.t1, opts)?);
    let e = config.ed;
    super::check_window(e.h)?;
    if !(e.t0 > 0.0 && e.t0 < e.t - e.h) {
        return Err(SpectraError::Precondition(format!(
            "ED window needs 0 < t0 < T - H, got t0 = {}, T = {}, H = {}",
            e.t0, e.t, e.h
        )));
    }
    let ed_grid = window_grid(e.t0, e.t - e.h, e.h, e.grid_step)?;
    let n = config.ned;
    super::check_window(n.h)?;
    let ned_grid = time_grid(n.t1, n.t2, n.grid_step)?;

    let max_time = [config.lyapunov.t2, b.t2 + b.h, e.t, n.t2 + n.h]
        .into_iter()
        .fold(0.0, f64::max);
    let integrals = build_integrals(system, max_time, &opts.quad)?;

    let bias = bias_from(
        &integrals,
        SteklovParams::new(b.h, b.t1, b.t2, bias_grid.step)?,
        config.epsilon,
        opts,
    )?;
    let lyapunov = lyapunov_from(&integrals, &lyap_grid, opts)?;
    let mut ed = ed_from(&integrals, e.h, &ed_grid, opts)?;

    let nonuniform: Vec<usize> = bias
        .components
        .iter()
        .filter(|c| c.nonuniform)
        .map(|c| c.component - 1)
        .collect();
    let ned_long = if nonuniform.is_empty() {
        None
    } else {
        warnings.extend(ned_ratio(n.h, n.t2, opts)?);
        let subset: Vec<_> = nonuniform.iter().map(|&j| integrals[j].clone()).collect();
        Some(steklov_from(
            &subset,
            n.h,
            &ned_grid,
            SpectrumKind::Ned,
            opts,
        )?)
    };

    let mut ned = Vec::with_capacity(system.dimension());
    for (j, ed_j) in ed.iter_mut().enumerate() {
        match nonuniform.iter().position(|&k| k == j) {
            None => ned.push(SpectralInterval {
                kind: SpectrumKind::Ned,
                ..ed_j.clone()
            }),
            Some(pos) => {
                ed_j.divergent = true;
                let computed = &ned_long
                    .as_ref()
                    .expect("computed for nonuniform components")[pos];
                ned.push(SpectralInterval {
                    component: j + 1,
                    ..computed.clone()
                });
            }
        }
    }

    let provenance = Provenance {
        lyapunov: ResolvedWindow::new(None, &lyap_grid),
        bias: ResolvedWindow::new(Some(b.h), &bias_grid),
        ed: ResolvedWindow::new(Some(e.h), &ed_grid),
        ned: ned_long
            .as_ref()
            .map(|_| ResolvedWindow::new(Some(n.h), &ned_grid)),
        epsilon: config.epsilon,
        containment_tolerance: config.containment_tolerance,
        error_target: opts.quad.error_target,
        integration_mode: opts.quad.mode,
        ratio_min: opts.ratio_min,
        ratio_warn: opts.ratio_warn,
        divergence_factor: opts.divergence_factor,
        refined_extrema: opts.refine,
        integrals: integrals.iter().map(|f| f.provenance()).collect(),
        warnings,
    };
    let mut report = SpectrumReport {
        system: SystemSummary::of(system),
        lyapunov,
        ed,
        ned,
        bias,
        containment_violations: Vec::new(),
        provenance,
    };
    report.containment_violations = check_containment(&report, config.containment_tolerance);
    Ok(report)
}
