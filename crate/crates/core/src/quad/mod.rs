//! Cumulative integrals `F(t) = ∫_{ref}^t a(τ) dτ` over long, oscillatory
//! ranges.
//!
//! Two backends sit behind [`CumulativeIntegral`]:
//!
//! * exact: `A(t) - A(ref)` from a closed-form antiderivative, no quadrature;
//! * numeric: composite 7-point Gauss-Legendre on a fixed panel layout, with
//!   prefix sums cached every `checkpoint_spacing` time units. A query sums
//!   the whole panels between the nearest checkpoint and `t`, then one
//!   partial panel.
//!
//! The panel layout depends only on the build parameters, never on the
//! number of worker threads, so results are reproducible bit for bit.

pub mod gauss;

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficient::CoefficientFunction;
use crate::expr::EvalError;

/// Numeric integration starts here when the integrand cannot be evaluated at
/// a zero reference time; `[0, START_GAP]` contributes 0.
pub const START_GAP: f64 = 1e-6;
pub const DEFAULT_MAX_PANEL_WIDTH: f64 = 0.5;
pub const DEFAULT_CHECKPOINT_SPACING: f64 = 1e3;
pub const DEFAULT_MAX_PANELS: u64 = 1_000_000_000;
pub const DEFAULT_ERROR_TARGET: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("query time {t} outside the covered range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("invalid quadrature parameter: {0}")]
    InvalidParameter(String),
    #[error("numeric integration over [{lo}, {hi}] needs {needed} panels, above the cap of {cap}; supply a closed-form antiderivative to use exact mode")]
    TooManyPanels {
        lo: f64,
        hi: f64,
        needed: u64,
        cap: u64,
    },
    #[error("exact mode requested but the coefficient `{0}` has no antiderivative")]
    NoAntiderivative(String),
    #[error("antiderivative has no finite one-sided limit at t = {0}")]
    NoFiniteLimit(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrationMode {
    /// Exact when an antiderivative is attached, numeric otherwise.
    Auto,
    Exact,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    pub error_target: f64,
    pub mode: IntegrationMode,
    pub max_panel_width: f64,
    pub checkpoint_spacing: f64,
    pub max_panels: u64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            error_target: DEFAULT_ERROR_TARGET,
            mode: IntegrationMode::Auto,
            max_panel_width: DEFAULT_MAX_PANEL_WIDTH,
            checkpoint_spacing: DEFAULT_CHECKPOINT_SPACING,
            max_panels: DEFAULT_MAX_PANELS,
        }
    }
}

impl QuadOptions {
    pub fn with_error_target(error_target: f64) -> Self {
        QuadOptions {
            error_target,
            ..Self::default()
        }
    }

    pub fn numeric(mut self) -> Self {
        self.mode = IntegrationMode::Numeric;
        self
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.error_target > 0.0 && self.error_target <= 1e-3) {
            return Err(QuadError::InvalidParameter(format!(
                "error target must lie in (0, 1e-3], got {}",
                self.error_target
            )));
        }
        if !(self.max_panel_width > 0.0 && self.max_panel_width.is_finite()) {
            return Err(QuadError::InvalidParameter(format!(
                "max panel width must be positive, got {}",
                self.max_panel_width
            )));
        }
        if !(self.checkpoint_spacing > 0.0 && self.checkpoint_spacing.is_finite()) {
            return Err(QuadError::InvalidParameter(format!(
                "checkpoint spacing must be positive, got {}",
                self.checkpoint_spacing
            )));
        }
        Ok(())
    }

    /// Panel width used for the error target. The rule's error per unit
    /// length scales like `h^14` for integrands with bounded high
    /// derivatives, so tightening the target by 14 decades halves `h`.
    pub fn panel_width(&self) -> f64 {
        let scaled = DEFAULT_MAX_PANEL_WIDTH * (self.error_target / 1e-3).powf(1.0 / 14.0);
        scaled
            .min(self.max_panel_width)
            .min(DEFAULT_MAX_PANEL_WIDTH)
    }
}

/// Fixed panel boundaries: an optional geometric run starting at the start
/// gap, followed by uniform panels ending exactly at `end`.
#[derive(Debug, Clone)]
struct PanelLayout {
    graded: Vec<f64>,
    uniform_start: f64,
    width: f64,
    uniform_count: usize,
    end: f64,
}

impl PanelLayout {
    fn new(origin: f64, end: f64, max_width: f64, graded: bool) -> Self {
        let mut boundaries = Vec::new();
        let mut uniform_start = origin;
        if graded && origin < 1.0 && end > 1.0 {
            let mut b = origin;
            while b < 0.5 {
                boundaries.push(b);
                b *= 2.0;
            }
            boundaries.push(b);
            uniform_start = b;
        }
        let span = end - uniform_start;
        let uniform_count = if span > 0.0 {
            (span / max_width).ceil().max(1.0) as usize
        } else {
            0
        };
        let width = if uniform_count > 0 {
            span / uniform_count as f64
        } else {
            0.0
        };
        PanelLayout {
            graded: boundaries,
            uniform_start,
            width,
            uniform_count,
            end,
        }
    }

    fn graded_panels(&self) -> usize {
        self.graded.len().saturating_sub(1)
    }

    fn len(&self) -> usize {
        self.graded_panels() + self.uniform_count
    }

    fn boundary(&self, i: usize) -> f64 {
        let g = self.graded_panels();
        if i <= g && !self.graded.is_empty() {
            self.graded[i]
        } else if i - g == self.uniform_count {
            self.end
        } else {
            self.uniform_start + (i - g) as f64 * self.width
        }
    }

    /// Index of the panel containing `t`; `t` must lie in the layout.
    fn panel_of(&self, t: f64) -> usize {
        let g = self.graded_panels();
        if g > 0 && t < self.uniform_start {
            let k = self.graded.partition_point(|&b| b <= t);
            return k.saturating_sub(1).min(g - 1);
        }
        let k = ((t - self.uniform_start) / self.width).floor();
        let k = if k.is_finite() && k > 0.0 {
            k as usize
        } else {
            0
        };
        g + k.min(self.uniform_count.saturating_sub(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Integrand {
    Signed,
    Absolute,
}

fn integrand_value(f: &CoefficientFunction, kind: Integrand, t: f64) -> Result<f64, EvalError> {
    let v = f.eval(t)?;
    Ok(match kind {
        Integrand::Signed => v,
        Integrand::Absolute => v.abs(),
    })
}

/// One panel of `f` (or `|f|`). For `|f|` the panel is split at sign
/// changes of `f` detected on the rule's nodes, so kinks sit on sub-panel
/// boundaries.
fn panel_integral(
    f: &CoefficientFunction,
    kind: Integrand,
    a: f64,
    b: f64,
) -> Result<f64, EvalError> {
    if b <= a {
        return Ok(0.0);
    }
    match kind {
        Integrand::Signed => gauss::integrate(|x| f.eval(x), a, b),
        Integrand::Absolute => {
            let mut samples = Vec::with_capacity(9);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            // endpoints may sit on the domain edge, so fall back to interior nodes
            if let Ok(v) = f.eval(a) {
                samples.push((a, v));
            }
            for x in gauss::NODES {
                let p = mid + half * x;
                samples.push((p, f.eval(p)?));
            }
            if let Ok(v) = f.eval(b) {
                samples.push((b, v));
            }
            let mut cuts = vec![a];
            for w in samples.windows(2) {
                let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                if y0 * y1 < 0.0 {
                    cuts.push(bisect_root(f, x0, y0, x1)?);
                }
            }
            cuts.push(b);
            let mut sum = 0.0;
            for w in cuts.windows(2) {
                sum += gauss::integrate(|x| integrand_value(f, kind, x), w[0], w[1])?;
            }
            Ok(sum)
        }
    }
}

fn bisect_root(
    f: &CoefficientFunction,
    mut lo: f64,
    f_lo: f64,
    mut hi: f64,
) -> Result<f64, EvalError> {
    let sign_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f.eval(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone)]
struct NumericTable {
    integrand: CoefficientFunction,
    kind: Integrand,
    origin: f64,
    layout: PanelLayout,
    stride: usize,
    checkpoints: Vec<f64>,
}

impl NumericTable {
    fn build(
        f: &CoefficientFunction,
        kind: Integrand,
        origin: f64,
        end: f64,
        graded: bool,
        opts: &QuadOptions,
    ) -> Result<Self, QuadError> {
        let width = opts.panel_width();
        let needed = ((end - origin) / width).ceil();
        if needed > opts.max_panels as f64 {
            return Err(QuadError::TooManyPanels {
                lo: origin,
                hi: end,
                needed: needed as u64,
                cap: opts.max_panels,
            });
        }
        let layout = PanelLayout::new(origin, end, width, graded);
        let stride = ((opts.checkpoint_spacing / layout.width.max(f64::MIN_POSITIVE)).round()
            as usize)
            .max(1);
        let n = layout.len();
        let blocks = n.div_ceil(stride);
        let block_sums: Vec<f64> = (0..blocks)
            .into_par_iter()
            .map(|blk| {
                let lo = blk * stride;
                let hi = (lo + stride).min(n);
                let mut sum = 0.0;
                for i in lo..hi {
                    sum += panel_integral(f, kind, layout.boundary(i), layout.boundary(i + 1))?;
                }
                Ok(sum)
            })
            .collect::<Result<_, EvalError>>()?;
        let mut checkpoints = Vec::with_capacity(blocks + 1);
        let (mut acc, mut comp) = (0.0f64, 0.0f64);
        checkpoints.push(0.0);
        for s in block_sums {
            // Neumaier summation keeps the prefix error independent of range length
            let t = acc + s;
            if acc.abs() >= s.abs() {
                comp += (acc - t) + s;
            } else {
                comp += (s - t) + acc;
            }
            acc = t;
            checkpoints.push(acc + comp);
        }
        Ok(NumericTable {
            integrand: f.clone(),
            kind,
            origin,
            layout,
            stride,
            checkpoints,
        })
    }

    fn value(&self, t: f64) -> Result<f64, EvalError> {
        let f = &self.integrand;
        if t <= self.origin {
            return Ok(0.0);
        }
        let i = self.layout.panel_of(t);
        let k = i / self.stride;
        let mut sum = self.checkpoints[k];
        for p in k * self.stride..i {
            sum += panel_integral(
                f,
                self.kind,
                self.layout.boundary(p),
                self.layout.boundary(p + 1),
            )?;
        }
        let start = self.layout.boundary(i);
        Ok(sum + panel_integral(f, self.kind, start, t)?)
    }
}

#[derive(Debug, Clone)]
enum Store {
    Exact { anchor: f64 },
    Numeric(NumericTable),
}

/// Queryable `F(t) = ∫_{ref}^t a`, covering `[ref_time, max_time]`.
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    source: CoefficientFunction,
    ref_time: f64,
    max_time: f64,
    error_target: f64,
    start_gap: Option<f64>,
    store: Store,
}

/// Description of how a cumulative integral was built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadProvenance {
    pub backend: Backend,
    pub ref_time: f64,
    pub max_time: f64,
    pub error_target: f64,
    pub panel_width: Option<f64>,
    pub panels: Option<usize>,
    pub checkpoint_count: Option<usize>,
    /// Start of numeric integration when `[ref, start]` was assigned 0.
    pub start_gap: Option<f64>,
    /// Upper bound on the additive error from the start gap.
    pub start_gap_bias: Option<f64>,
}

/// Builds a cumulative integral of `f` from `ref_time` covering up to
/// `max_time`. Callers include any window length `H` in `max_time`.
pub fn build_cumulative(
    f: &CoefficientFunction,
    ref_time: f64,
    max_time: f64,
    opts: &QuadOptions,
) -> Result<CumulativeIntegral, QuadError> {
    opts.validate()?;
    if !(ref_time.is_finite() && ref_time >= 0.0) {
        return Err(QuadError::InvalidParameter(format!(
            "reference time must be finite and >= 0, got {ref_time}"
        )));
    }
    if ref_time < f.domain_start() {
        return Err(QuadError::InvalidParameter(format!(
            "reference time {ref_time} precedes the coefficient's domain start {}",
            f.domain_start()
        )));
    }
    if !(max_time.is_finite() && max_time > ref_time) {
        return Err(QuadError::InvalidParameter(format!(
            "max time must exceed the reference time {ref_time}, got {max_time}"
        )));
    }
    let use_exact = match opts.mode {
        IntegrationMode::Numeric => false,
        IntegrationMode::Auto => f.has_antiderivative(),
        IntegrationMode::Exact => {
            if !f.has_antiderivative() {
                return Err(QuadError::NoAntiderivative(f.to_string()));
            }
            true
        }
    };
    let (store, start_gap) = if use_exact {
        (
            Store::Exact {
                anchor: exact_anchor(f, ref_time)?,
            },
            None,
        )
    } else {
        build_numeric(f, Integrand::Signed, ref_time, max_time, opts)?
    };
    Ok(CumulativeIntegral {
        source: f.clone(),
        ref_time,
        max_time,
        error_target: opts.error_target,
        start_gap,
        store,
    })
}

/// Numeric cumulative integral of `|f|`, for absolute-mode growth bounds.
pub fn build_abs_cumulative(
    f: &CoefficientFunction,
    ref_time: f64,
    max_time: f64,
    opts: &QuadOptions,
) -> Result<CumulativeIntegral, QuadError> {
    opts.validate()?;
    if !(max_time.is_finite() && max_time > ref_time && ref_time >= f.domain_start()) {
        return Err(QuadError::InvalidParameter(format!(
            "need domain start <= ref time < max time, got ref {ref_time}, max {max_time}"
        )));
    }
    let (store, start_gap) = build_numeric(f, Integrand::Absolute, ref_time, max_time, opts)?;
    Ok(CumulativeIntegral {
        source: f.abs(),
        ref_time,
        max_time,
        error_target: opts.error_target,
        start_gap,
        store,
    })
}

fn build_numeric(
    f: &CoefficientFunction,
    kind: Integrand,
    ref_time: f64,
    max_time: f64,
    opts: &QuadOptions,
) -> Result<(Store, Option<f64>), QuadError> {
    let gap = ref_time < START_GAP && f.eval(ref_time).is_err();
    let origin = if gap { START_GAP } else { ref_time };
    let table = NumericTable::build(f, kind, origin, max_time, gap, opts)?;
    Ok((Store::Numeric(table), gap.then_some(START_GAP)))
}

/// `A(ref)`, or its one-sided limit when `A` cannot be evaluated at a zero
/// reference time (e.g. `t*sin(ln(t))` at 0).
fn exact_anchor(f: &CoefficientFunction, ref_time: f64) -> Result<f64, QuadError> {
    match f.eval_antiderivative(ref_time).expect("checked by caller") {
        Ok(v) => Ok(v),
        Err(e) if ref_time > 0.0 => Err(e.into()),
        Err(_) => {
            let near = f.eval_antiderivative(1e-300).expect("checked by caller");
            let far = f.eval_antiderivative(1e-150).expect("checked by caller");
            match (near, far) {
                (Ok(a), Ok(b)) if (a - b).abs() <= 1e-9 * a.abs().max(1.0) => Ok(a),
                _ => Err(QuadError::NoFiniteLimit(ref_time)),
            }
        }
    }
}

impl CumulativeIntegral {
    pub fn source(&self) -> &CoefficientFunction {
        &self.source
    }

    pub fn ref_time(&self) -> f64 {
        self.ref_time
    }

    pub fn max_time(&self) -> f64 {
        self.max_time
    }

    pub fn error_target(&self) -> f64 {
        self.error_target
    }

    pub fn backend(&self) -> Backend {
        match self.store {
            Store::Exact { .. } => Backend::Exact,
            Store::Numeric(_) => Backend::Numeric,
        }
    }

    pub fn start_gap(&self) -> Option<f64> {
        self.start_gap
    }

    pub fn covers(&self, t: f64) -> bool {
        t >= self.ref_time && t <= self.max_time
    }

    /// `F(t)`; zero at the reference time.
    #[inline]
    pub fn value(&self, t: f64) -> Result<f64, QuadError> {
        if !self.covers(t) {
            return Err(QuadError::OutOfRange {
                t,
                lo: self.ref_time,
                hi: self.max_time,
            });
        }
        match &self.store {
            Store::Exact { anchor } => {
                if t == self.ref_time {
                    return Ok(0.0);
                }
                let a = self
                    .source
                    .eval_antiderivative(t)
                    .expect("exact store implies an antiderivative")?;
                Ok(a - anchor)
            }
            Store::Numeric(table) => Ok(table.value(t)?),
        }
    }

    pub fn provenance(&self) -> QuadProvenance {
        let (panel_width, panels, checkpoint_count) = match &self.store {
            Store::Exact { .. } => (None, None, None),
            Store::Numeric(t) => (
                Some(t.layout.width),
                Some(t.layout.len()),
                Some(t.checkpoints.len()),
            ),
        };
        let start_gap_bias = self.start_gap.map(|gap| {
            // sup |a| sampled on a geometric grid over the gap's neighbourhood
            let mut sup: f64 = 0.0;
            let mut x = gap;
            while x <= 1.0 {
                if let Ok(v) = self.source.eval(x) {
                    sup = sup.max(v.abs());
                }
                x *= 1.25;
            }
            sup * gap
        });
        QuadProvenance {
            backend: self.backend(),
            ref_time: self.ref_time,
            max_time: self.max_time,
            error_target: self.error_target,
            panel_width,
            panels,
            checkpoint_count,
            start_gap: self.start_gap,
            start_gap_bias,
        }
    }
}

/// `F(t) - F(s)`; antisymmetric in `(s, t)`.
#[inline]
pub fn integral_between(f: &CumulativeIntegral, s: f64, t: f64) -> Result<f64, QuadError> {
    Ok(f.value(t)? - f.value(s)?)
}

/// `∫_s^t |f|` by composite Gauss-Legendre with panels split at sign changes.
pub fn integral_of_abs(
    f: &CoefficientFunction,
    s: f64,
    t: f64,
    error_target: f64,
) -> Result<f64, QuadError> {
    let opts = QuadOptions::with_error_target(error_target);
    opts.validate()?;
    if !(s <= t && s >= f.domain_start()) {
        return Err(QuadError::InvalidParameter(format!(
            "need domain start <= s <= t, got s = {s}, t = {t}"
        )));
    }
    if s == t {
        return Ok(0.0);
    }
    let gap = s < START_GAP && f.eval(s).is_err();
    let origin = if gap { START_GAP } else { s };
    if t <= origin {
        return Ok(0.0);
    }
    let layout = PanelLayout::new(origin, t, opts.panel_width(), gap);
    let needed = layout.len() as u64;
    if needed > opts.max_panels {
        return Err(QuadError::TooManyPanels {
            lo: s,
            hi: t,
            needed,
            cap: opts.max_panels,
        });
    }
    let mut sum = 0.0;
    for i in 0..layout.len() {
        sum += panel_integral(
            f,
            Integrand::Absolute,
            layout.boundary(i),
            layout.boundary(i + 1),
        )?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn coeff(body: &str, anti: Option<&str>) -> CoefficientFunction {
        CoefficientFunction::parse(body, anti).unwrap()
    }

    fn numeric() -> QuadOptions {
        QuadOptions::default().numeric()
    }

    #[test]
    fn constant_integrand_is_linear() {
        let f = CoefficientFunction::constant(2.5);
        for opts in [QuadOptions::default(), numeric()] {
            let c = build_cumulative(&f, 0.0, 100.0, &opts).unwrap();
            assert_eq!(c.value(0.0).unwrap(), 0.0);
            for t in [0.3, 1.0, 17.25, 99.9, 100.0] {
                assert!((c.value(t).unwrap() - 2.5 * t).abs() < 1e-11 * t.max(1.0));
            }
            assert!((integral_between(&c, 1.0, 3.0).unwrap() - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oscillatory_closed_form_values() {
        // 4t + 2t cos t - 2 sin t at 2π
        let f = coeff("4-2*t*sin(t)", None);
        let c = build_cumulative(&f, 0.0, 10.0, &numeric()).unwrap();
        assert!((c.value(2.0 * PI).unwrap() - 12.0 * PI).abs() < 1e-10);

        // t sin(ln t) at e^{π/2}; the integrand is singular at 0 so the start gap applies
        let f = coeff("sin(ln(t))+cos(ln(t))", None);
        let c = build_cumulative(&f, 0.0, 10.0, &numeric()).unwrap();
        assert_eq!(c.start_gap(), Some(START_GAP));
        let want = (PI / 2.0).exp();
        assert!((c.value(want).unwrap() - want).abs() < 3e-6);
        let prov = c.provenance();
        assert!(prov.start_gap_bias.unwrap() <= 2f64.sqrt() * START_GAP);

        let f = coeff("t*sin(t)+1", None);
        let c = build_cumulative(&f, 0.0, 20.0, &numeric()).unwrap();
        assert!((integral_between(&c, 2.0 * PI, 3.0 * PI).unwrap() - 6.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn exact_mode_uses_limit_at_zero() {
        let f = coeff("sin(ln(t))+cos(ln(t))", Some("t*sin(ln(t))"));
        let c = build_cumulative(&f, 0.0, 10.0, &QuadOptions::default()).unwrap();
        assert_eq!(c.backend(), Backend::Exact);
        assert!((c.value((PI / 2.0).exp()).unwrap() - (PI / 2.0).exp()).abs() < 1e-14);
        let f = coeff("1/t", Some("ln(t)"));
        assert_eq!(
            build_cumulative(&f, 0.0, 10.0, &QuadOptions::default()).unwrap_err(),
            QuadError::NoFiniteLimit(0.0)
        );
    }

    #[test]
    fn exact_mode_subtracts_anchor() {
        let f = coeff("t*sin(t)+1", Some("sin(t)-t*cos(t)+t"));
        let c = build_cumulative(&f, 2.0, 50.0, &QuadOptions::default()).unwrap();
        let anti = |t: f64| t.sin() - t * t.cos() + t;
        assert_eq!(c.value(2.0).unwrap(), 0.0);
        assert_eq!(c.value(7.0).unwrap(), anti(7.0) - anti(2.0));
    }

    #[test]
    fn between_is_antisymmetric_and_zero_on_empty() {
        let f = coeff("t*sin(t)+1", None);
        let c = build_cumulative(&f, 0.0, 50.0, &numeric()).unwrap();
        let a = integral_between(&c, 3.0, 41.0).unwrap();
        let b = integral_between(&c, 41.0, 3.0).unwrap();
        assert_eq!(a, -b);
        assert_eq!(integral_between(&c, 12.5, 12.5).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_queries_fail() {
        let c = build_cumulative(
            &CoefficientFunction::constant(1.0),
            1.0,
            5.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!(matches!(c.value(0.5), Err(QuadError::OutOfRange { .. })));
        assert!(matches!(c.value(5.5), Err(QuadError::OutOfRange { .. })));
    }

    #[test]
    fn parameter_validation() {
        let f = CoefficientFunction::constant(1.0);
        let bad_target = QuadOptions::with_error_target(1e-2);
        assert!(build_cumulative(&f, 0.0, 1.0, &bad_target).is_err());
        assert!(build_cumulative(&f, 1.0, 1.0, &QuadOptions::default()).is_err());
        let g = coeff("t", None);
        let exact = QuadOptions {
            mode: IntegrationMode::Exact,
            ..QuadOptions::default()
        };
        assert!(matches!(
            build_cumulative(&g, 0.0, 1.0, &exact),
            Err(QuadError::NoAntiderivative(_))
        ));
    }

    #[test]
    fn panel_cap_is_enforced() {
        let f = coeff("t", None);
        let opts = QuadOptions {
            max_panels: 1000,
            ..numeric()
        };
        let err = build_cumulative(&f, 0.0, 1e4, &opts).unwrap_err();
        assert!(matches!(err, QuadError::TooManyPanels { cap: 1000, .. }));
        assert!(err.to_string().contains("antiderivative"));
    }

    #[test]
    fn domain_errors_propagate() {
        let f = coeff("sqrt(5-t)", None);
        assert!(matches!(
            build_cumulative(&f, 0.0, 10.0, &numeric()),
            Err(QuadError::Eval(_))
        ));
    }

    #[test]
    fn abs_integrals() {
        let two = CoefficientFunction::constant(-2.0);
        assert!((integral_of_abs(&two, 0.0, 5.0, 1e-8).unwrap() - 10.0).abs() < 1e-12);
        let s = coeff("sin(t)", None);
        assert!((integral_of_abs(&s, 0.0, 2.0 * PI, 1e-8).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn abs_integral_matches_trapezoid_oracle() {
        // brute-force trapezoid on 2e6 uniform intervals
        let n = 2_000_000;
        let (a, b) = (0.0, 2.0 * PI);
        let h = (b - a) / n as f64;
        let g = |x: f64| (x * x.sin() + 1.0).abs();
        let mut trap = 0.5 * (g(a) + g(b));
        for i in 1..n {
            trap += g(a + i as f64 * h);
        }
        trap *= h;
        let f = coeff("t*sin(t)+1", None);
        let got = integral_of_abs(&f, a, b, 1e-8).unwrap();
        assert!((got - trap).abs() < 1e-8, "{got} vs {trap}");
        let signed =
            integral_between(&build_cumulative(&f, 0.0, b, &numeric()).unwrap(), a, b).unwrap();
        assert!(got >= signed.abs());
    }

    #[test]
    fn abs_cumulative_matches_direct() {
        let f = coeff("t*sin(t)+1", None);
        let c = build_abs_cumulative(&f, 0.0, 30.0, &QuadOptions::default()).unwrap();
        let direct = integral_of_abs(&f, 4.0, 27.0, 1e-8).unwrap();
        assert!((integral_between(&c, 4.0, 27.0).unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn step_halving_cross_check() {
        let f = coeff("t*sin(t)+1", None);
        let coarse = build_cumulative(&f, 0.0, 500.0, &numeric()).unwrap();
        let fine_opts = QuadOptions {
            max_panel_width: 0.125,
            ..numeric()
        };
        let fine = build_cumulative(&f, 0.0, 500.0, &fine_opts).unwrap();
        for t in [1.0, E, 77.7, 312.0, 500.0] {
            let (a, b) = (coarse.value(t).unwrap(), fine.value(t).unwrap());
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{t}: {a} vs {b}");
        }
    }

    #[test]
    fn checkpoint_spacing_does_not_change_values_beyond_rounding() {
        let f = coeff("4-2*t*sin(t)", None);
        let sparse = build_cumulative(&f, 0.0, 3000.0, &numeric()).unwrap();
        let dense_opts = QuadOptions {
            checkpoint_spacing: 0.5,
            ..numeric()
        };
        let dense = build_cumulative(&f, 0.0, 3000.0, &dense_opts).unwrap();
        for t in [0.1, 999.0, 1000.0, 1000.3, 2999.99] {
            let (a, b) = (sparse.value(t).unwrap(), dense.value(t).unwrap());
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}
