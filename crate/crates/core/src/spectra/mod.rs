//! Finite-time spectral intervals of diagonal systems.
//!
//! * Lyapunov: `[inf, sup]` of the running average `F_j(t)/t` over `[T1, T2]`.
//! * ED: `[inf, sup]` of the Steklov average `f_j^H(t)` over `[t0, T - H]`,
//!   the bounded-growth regime where `t` ranges far beyond `H`.
//! * NED: `[inf, sup]` of `f_j^H(t)` over `[T1, T2]` with `H >> T2`.
//! * Bias: `sup |(1/t) ∫_t^{t+H} a_j|` over `[T1, T2]` with `T1 >> H`.
//!
//! All cumulative integrals start at `t = 0`. Extrema are taken over the
//! sample grid, optionally polished by golden-section search.

mod report;
pub(crate) mod scan;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coefficient::CoefficientFunction;
use crate::quad::{build_cumulative, CumulativeIntegral, QuadError, QuadOptions};
use crate::steklov::{aligned_step, default_grid_step, SteklovError, SteklovParams, TimeGrid};

pub use report::{
    full_report, EdWindow, LyapunovWindow, Provenance, ReportConfig, ResolvedWindow,
    SpectrumReport, SteklovWindow, SystemSummary,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectraError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

impl From<SteklovError> for SpectraError {
    fn from(e: SteklovError) -> Self {
        match e {
            SteklovError::InvalidParams(msg) => SpectraError::Precondition(msg),
            SteklovError::Quad(q) => SpectraError::Quad(q),
        }
    }
}

/// `diag(a_1(t), …, a_n(t))`.
#[derive(Debug, Clone)]
pub struct DiagonalSystem {
    name: String,
    coefficients: Vec<CoefficientFunction>,
    parameters: BTreeMap<String, f64>,
}

impl DiagonalSystem {
    pub fn new(
        name: impl Into<String>,
        coefficients: Vec<CoefficientFunction>,
        parameters: BTreeMap<String, f64>,
    ) -> Result<Self, SpectraError> {
        if coefficients.is_empty() {
            return Err(SpectraError::Precondition(
                "a system needs at least one coefficient".into(),
            ));
        }
        Ok(DiagonalSystem {
            name: name.into(),
            coefficients,
            parameters,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[CoefficientFunction] {
        &self.coefficients
    }

    pub fn parameters(&self) -> &BTreeMap<String, f64> {
        &self.parameters
    }

    /// `diag(a_1 + λ, …, a_n + λ)`.
    pub fn shifted(&self, lambda: f64) -> DiagonalSystem {
        DiagonalSystem {
            name: format!("{}+shift({lambda})", self.name),
            coefficients: self
                .coefficients
                .iter()
                .map(|c| c.shifted(lambda))
                .collect(),
            parameters: self.parameters.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Lyapunov,
    Ed,
    Ned,
}

/// One computed interval for component `component` (1-based).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralInterval {
    pub component: usize,
    pub kind: SpectrumKind,
    pub lower: f64,
    pub upper: f64,
    pub divergent: bool,
    /// Grid times where the bounds were attained.
    pub lower_at: f64,
    pub upper_at: f64,
}

impl SpectralInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentBias {
    pub component: usize,
    pub b_bar: f64,
    pub nonuniform: bool,
    /// Grid time where the supremum was attained.
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub components: Vec<ComponentBias>,
    pub epsilon: f64,
    pub params: SteklovParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectraOptions {
    pub quad: QuadOptions,
    /// Hard lower limit for `H/T2` (NED) and `T1/H` (bias).
    pub ratio_min: f64,
    /// Ratios below this are accepted with a warning.
    pub ratio_warn: f64,
    pub divergence_factor: f64,
    pub refine: bool,
}

pub const DEFAULT_EPSILON: f64 = 0.01;

impl Default for SpectraOptions {
    fn default() -> Self {
        SpectraOptions {
            quad: QuadOptions::default(),
            ratio_min: 10.0,
            ratio_warn: 100.0,
            divergence_factor: 1e3,
            refine: false,
        }
    }
}

/// Checks a scale-separation ratio; returns a warning for ratios between
/// the hard and soft limits.
fn check_ratio(
    what: &str,
    ratio: f64,
    opts: &SpectraOptions,
) -> Result<Option<String>, SpectraError> {
    if !(ratio >= opts.ratio_min) {
        return Err(SpectraError::Precondition(format!(
            "{what} must be at least {} (got {ratio:.6})",
            opts.ratio_min
        )));
    }
    if ratio < opts.ratio_warn {
        let msg = format!(
            "{what} is {ratio:.6}, below the recommended {}",
            opts.ratio_warn
        );
        log::warn!("{msg}");
        return Ok(Some(msg));
    }
    Ok(None)
}

pub(crate) fn ned_ratio(
    h: f64,
    t2: f64,
    opts: &SpectraOptions,
) -> Result<Option<String>, SpectraError> {
    check_ratio("H/T2 for the NED window", h / t2, opts)
}

pub(crate) fn bias_ratio(
    h: f64,
    t1: f64,
    opts: &SpectraOptions,
) -> Result<Option<String>, SpectraError> {
    check_ratio("T1/H for the bias window", t1 / h, opts)
}

/// Cumulative integrals `F_j` from `t = 0`, covering `[0, max_time]` plus
/// a round-off reserve for window ends computed as `t + H`.
pub fn build_integrals(
    system: &DiagonalSystem,
    max_time: f64,
    quad: &QuadOptions,
) -> Result<Vec<CumulativeIntegral>, SpectraError> {
    let reserve = max_time * (1.0 + 1e-12);
    system
        .coefficients()
        .iter()
        .map(|c| build_cumulative(c, 0.0, reserve, quad).map_err(SpectraError::from))
        .collect()
}

/// Grid for a window quantity over `[start, end]` with window length `h`.
/// Without an explicit step, the default step is shrunk until it divides
/// `h`, which lets the scan share integral values between window ends.
pub fn window_grid(
    start: f64,
    end: f64,
    h: f64,
    step: Option<f64>,
) -> Result<TimeGrid, SpectraError> {
    let step = step.or_else(|| {
        let base = default_grid_step(start, end);
        (h / base <= MAX_SHIFT as f64).then(|| aligned_step(h, base))
    });
    time_grid(start, end, step)
}

const MAX_SHIFT: usize = 1 << 20;

/// Scans `combine(t, F(t), F(t + h))`, sharing lattice values of `F` when
/// `h` is a small whole multiple of the grid step.
fn window_scan<const K: usize>(
    f: &CumulativeIntegral,
    grid: &TimeGrid,
    h: f64,
    split: Option<f64>,
    combine: impl Fn(f64, f64, f64) -> [f64; K] + Sync,
) -> Result<scan::Scan<K>, QuadError> {
    let m = (h / grid.step).round();
    if m >= 1.0 && m <= MAX_SHIFT as f64 && (m * grid.step - h).abs() <= 1e-9 * h {
        scan::scan_shifted(
            grid,
            split,
            m as usize,
            grid.end + h,
            |t| f.value(t),
            combine,
        )
    } else {
        scan::scan(grid, split, |t| {
            let ft = f.value(t)?;
            Ok(combine(t, ft, f.value(t + h)?))
        })
    }
}

/// Sample grid over `[start, end]`, with the default step when none is given.
pub fn time_grid(start: f64, end: f64, step: Option<f64>) -> Result<TimeGrid, SpectraError> {
    if !(start > 0.0 && end > start && start.is_finite() && end.is_finite()) {
        return Err(SpectraError::Precondition(format!(
            "need 0 < T1 < T2, got T1 = {start}, T2 = {end}"
        )));
    }
    Ok(TimeGrid::new(
        start,
        end,
        step.unwrap_or_else(|| default_grid_step(start, end)),
    )?)
}

fn check_window(h: f64) -> Result<(), SpectraError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(SpectraError::Precondition(format!(
            "H must be positive, got {h}"
        )));
    }
    Ok(())
}

#[inline]
fn running_average(f: &CumulativeIntegral, t: f64) -> Result<f64, QuadError> {
    Ok(f.value(t)? / t)
}

#[inline]
fn steklov(f: &CumulativeIntegral, t: f64, h: f64) -> Result<f64, QuadError> {
    Ok((f.value(t + h)? - f.value(t)?) / h)
}

fn interval(component: usize, kind: SpectrumKind, r: &scan::Range) -> SpectralInterval {
    SpectralInterval {
        component,
        kind,
        lower: r.min.value,
        upper: r.max.value,
        divergent: false,
        lower_at: r.min.t,
        upper_at: r.max.t,
    }
}

pub(crate) fn lyapunov_from(
    integrals: &[CumulativeIntegral],
    grid: &TimeGrid,
    opts: &SpectraOptions,
) -> Result<Vec<SpectralInterval>, SpectraError> {
    integrals
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let mut r = scan::scan(grid, None, |t| running_average(f, t).map(|v| [v]))?.full[0];
            if opts.refine {
                scan::refine(grid, &mut r, |t| running_average(f, t))?;
            }
            Ok(interval(j + 1, SpectrumKind::Lyapunov, &r))
        })
        .collect()
}

pub(crate) fn steklov_from(
    integrals: &[CumulativeIntegral],
    h: f64,
    grid: &TimeGrid,
    kind: SpectrumKind,
    opts: &SpectraOptions,
) -> Result<Vec<SpectralInterval>, SpectraError> {
    integrals
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let mut r = scan::scan(grid, None, |t| steklov(f, t, h).map(|v| [v]))?.full[0];
            if opts.refine {
                scan::refine(grid, &mut r, |t| steklov(f, t, h))?;
            }
            Ok(interval(j + 1, kind, &r))
        })
        .collect()
}

/// ED divergence rule. `reference` is the width of a bounded interval of
/// the same component; `prefix` is the width over the first half of the
/// time range.
pub fn is_divergent(width: f64, prefix: f64, reference: f64, factor: f64) -> bool {
    let scale = reference.max(1.0);
    width > factor * scale || (width > 10.0 * scale && width > 1.5 * prefix)
}

pub(crate) fn ed_from(
    integrals: &[CumulativeIntegral],
    h: f64,
    grid: &TimeGrid,
    opts: &SpectraOptions,
) -> Result<Vec<SpectralInterval>, SpectraError> {
    let split = grid.start + 0.5 * (grid.end - grid.start);
    integrals
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let s = window_scan(f, grid, h, Some(split), |t, ft, fh| [(fh - ft) / h, ft / t])?;
            let mut r = s.full[0];
            if opts.refine {
                scan::refine(grid, &mut r, |t| steklov(f, t, h))?;
            }
            let prefix = s.prefix.map_or(0.0, |p| p[0].width());
            let mut out = interval(j + 1, SpectrumKind::Ed, &r);
            out.divergent =
                is_divergent(r.width(), prefix, s.full[1].width(), opts.divergence_factor);
            Ok(out)
        })
        .collect()
}

pub(crate) fn bias_from(
    integrals: &[CumulativeIntegral],
    params: SteklovParams,
    epsilon: f64,
    opts: &SpectraOptions,
) -> Result<BiasReport, SpectraError> {
    let grid = params.grid();
    let h = params.h;
    let b = |f: &CumulativeIntegral, t: f64| -> Result<f64, QuadError> {
        Ok(((f.value(t + h)? - f.value(t)?) / t).abs())
    };
    let components = integrals
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let mut r =
                window_scan(f, &grid, h, None, |t, ft, fh| [((fh - ft) / t).abs()])?.full[0];
            if opts.refine {
                scan::refine(&grid, &mut r, |t| b(f, t))?;
            }
            Ok(ComponentBias {
                component: j + 1,
                b_bar: r.max.value,
                nonuniform: r.max.value >= epsilon,
                at: r.max.t,
            })
        })
        .collect::<Result<_, SpectraError>>()?;
    Ok(BiasReport {
        components,
        epsilon,
        params,
    })
}

/// Running-average intervals over `[t1, t2]`; `grid_step` defaults to
/// `min(π/8, (t2 - t1)/1e4)`.
pub fn lyapunov_intervals(
    system: &DiagonalSystem,
    t1: f64,
    t2: f64,
    grid_step: Option<f64>,
    opts: &SpectraOptions,
) -> Result<Vec<SpectralInterval>, SpectraError> {
    let g = time_grid(t1, t2, grid_step)?;
    let integrals = build_integrals(system, t2, &opts.quad)?;
    lyapunov_from(&integrals, &g, opts)
}

/// Steklov intervals over `t ∈ [t0, t_end - h]` with the divergence flag.
pub fn ed_intervals(
    system: &DiagonalSystem,
    h: f64,
    t0: f64,
    t_end: f64,
    grid_step: Option<f64>,
    opts: &SpectraOptions,
) -> Result<Vec<SpectralInterval>, SpectraError> {
    check_window(h)?;
    if !(t0 > 0.0 && t0 < t_end - h) {
        return Err(SpectraError::Precondition(format!(
            "ED window needs 0 < t0 < T - H, got t0 = {t0}, T = {t_end}, H = {h}"
        )));
    }
    let g = window_grid(t0, t_end - h, h, grid_step)?;
    let integrals = build_integrals(system, t_end, &opts.quad)?;
    ed_from(&integrals, h, &g, opts)
}

/// Steklov intervals over `[t1, t2]` in the long-window regime `H >> T2`.
pub fn ned_intervals(
    system: &DiagonalSystem,
    h: f64,
    t1: f64,
    t2: f64,
    grid_step: Option<f64>,
    opts: &SpectraOptions,
) -> Result<Vec<SpectralInterval>, SpectraError> {
    check_window(h)?;
    let g = time_grid(t1, t2, grid_step)?;
    ned_ratio(h, t2, opts)?;
    let integrals = build_integrals(system, t2 + h, &opts.quad)?;
    steklov_from(&integrals, h, &g, SpectrumKind::Ned, opts)
}

/// Per-component nonuniform bias `b̄_j` over `[t1, t2]` with `T1 >> H`.
pub fn nonuniform_bias(
    system: &DiagonalSystem,
    h: f64,
    t1: f64,
    t2: f64,
    grid_step: Option<f64>,
    epsilon: f64,
    opts: &SpectraOptions,
) -> Result<BiasReport, SpectraError> {
    check_window(h)?;
    if !(epsilon > 0.0) {
        return Err(SpectraError::Precondition(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let g = window_grid(t1, t2, h, grid_step)?;
    bias_ratio(h, t1, opts)?;
    let params = SteklovParams::new(h, t1, t2, g.step)?;
    let integrals = build_integrals(system, t2 + h, &opts.quad)?;
    bias_from(&integrals, params, epsilon, opts)
}

/// Quantity sampled by [`sample_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesKind {
    /// `λ_j(t) = F_j(t)/t`.
    RunningAverage,
    /// `a_j^t = f_j^H(t)`.
    Steklov { h: f64 },
    /// `b_j^t = (1/t) |∫_t^{t+H} a_j|`.
    Bias { h: f64 },
}

/// `(t, value)` samples of one series on a decimation of `grid` with at
/// most `max_points` points (the last grid point is always included).
pub fn sample_series(
    f: &CumulativeIntegral,
    kind: SeriesKind,
    grid: &TimeGrid,
    max_points: usize,
) -> Result<Vec<(f64, f64)>, QuadError> {
    let n = grid.len();
    let stride = n.div_ceil(max_points.max(2) - 1).max(1);
    let mut indices: Vec<usize> = (0..n).step_by(stride).collect();
    if *indices.last().expect("non-empty") != n - 1 {
        indices.push(n - 1);
    }
    indices
        .into_iter()
        .map(|k| {
            let t = grid.point(k);
            let v = match kind {
                SeriesKind::RunningAverage => running_average(f, t)?,
                SeriesKind::Steklov { h } => steklov(f, t, h)?,
                SeriesKind::Bias { h } => ((f.value(t + h)? - f.value(t)?) / t).abs(),
            };
            Ok((t, v))
        })
        .collect()
}
