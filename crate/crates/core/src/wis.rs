//! Grid certificates for weak integral separation and nonuniformly
//! bounded growth, plus the interval containment diagnostic.
//!
//! A pair `(g_low, g_high)` is weakly integrally separated on a grid of
//! `(s, t)` pairs when `G(s, t) = ∫_s^t (g_high - g_low) ≥ a(t - s) - b·s + d`
//! for every pair, with `a > 0` and `b ≥ 0`. On a finite grid any `a` is
//! attainable by pushing `d` down, so certificates additionally require
//! `d ≥ -ρ·T` where `T` is the largest grid time and `ρ` is
//! [`WisOptions::offset_limit`].

use serde::Serialize;

use crate::coefficient::CoefficientFunction;
use crate::quad::{
    build_abs_cumulative, build_cumulative, CumulativeIntegral, QuadError, QuadOptions,
};
use crate::spectra::{DiagonalSystem, SpectralInterval, SpectrumReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WisError {
    #[error("degenerate pair grid: {0}")]
    DegenerateGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDescriptor {
    /// `"log"` for [`PairGrid::log_spaced`], `"explicit"` otherwise.
    pub kind: &'static str,
    pub t_max: f64,
    pub pairs: usize,
}

/// Sample set of `(s, t)` pairs with `0 <= s <= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGrid {
    pairs: Vec<(f64, f64)>,
    descriptor: GridDescriptor,
}

pub const DEFAULT_PAIR_CAP: usize = 4096;

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi <= lo {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

impl PairGrid {
    /// `s` log-spaced over `[1, t_max]` and `t - s` log-spaced over
    /// `[1, t_max - s]`; values of `s` leaving less than a unit gap are
    /// dropped. Evenly thinned to at most `cap` pairs.
    pub fn log_spaced(
        t_max: f64,
        s_points: usize,
        gap_points: usize,
        cap: usize,
    ) -> Result<Self, WisError> {
        if !(t_max >= 2.0 && t_max.is_finite()) {
            return Err(WisError::DegenerateGrid(format!(
                "T must be at least 2, got {t_max}"
            )));
        }
        let mut pairs = Vec::new();
        for s in log_points(1.0, t_max, s_points) {
            if t_max - s < 1.0 {
                continue;
            }
            for gap in log_points(1.0, t_max - s, gap_points) {
                pairs.push((s, (s + gap).min(t_max)));
            }
        }
        if cap >= 2 && pairs.len() > cap {
            let n = pairs.len();
            pairs = (0..cap).map(|i| pairs[i * (n - 1) / (cap - 1)]).collect();
        }
        Self::build(pairs, "log")
    }

    /// Default grid: 32 × 32 log-spaced, capped at 4096 pairs.
    pub fn default_for(t_max: f64) -> Result<Self, WisError> {
        Self::log_spaced(t_max, 32, 32, DEFAULT_PAIR_CAP)
    }

    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Result<Self, WisError> {
        Self::build(pairs, "explicit")
    }

    fn build(pairs: Vec<(f64, f64)>, kind: &'static str) -> Result<Self, WisError> {
        if pairs.len() < 2 {
            return Err(WisError::DegenerateGrid(format!(
                "need at least 2 pairs, got {}",
                pairs.len()
            )));
        }
        if let Some(&(s, t)) = pairs
            .iter()
            .find(|&&(s, t)| !(s >= 0.0 && s <= t && t.is_finite()))
        {
            return Err(WisError::DegenerateGrid(format!(
                "pair (s = {s}, t = {t}) violates 0 <= s <= t"
            )));
        }
        let t_max = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
        let descriptor = GridDescriptor {
            kind,
            t_max,
            pairs: pairs.len(),
        };
        Ok(PairGrid { pairs, descriptor })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn t_max(&self) -> f64 {
        self.descriptor.t_max
    }

    pub fn descriptor(&self) -> &GridDescriptor {
        &self.descriptor
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WisOptions {
    pub coarse: usize,
    pub fine: usize,
    /// `ρ` in the offset floor `d ≥ -ρ·T`.
    pub offset_limit: f64,
    pub quad: QuadOptions,
}

impl Default for WisOptions {
    fn default() -> Self {
        WisOptions {
            coarse: 32,
            fine: 32,
            offset_limit: 0.05,
            quad: QuadOptions::default(),
        }
    }
}

/// Which two functions a certificate separates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SeparatedPair {
    Components { lower: usize, upper: usize },
    ConstantBelow { component: usize, lambda: f64 },
    ConstantAbove { component: usize, lambda: f64 },
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub pair: SeparatedPair,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    /// Smallest slack `G - (a(t-s) - b·s + d)` over the grid.
    pub margin: f64,
    pub offset_floor: f64,
    pub grid: GridDescriptor,
    pub feasible: bool,
}

struct Sample {
    g: f64,
    gap: f64,
    s: f64,
}

fn gap_samples(
    f_low: &CumulativeIntegral,
    f_high: &CumulativeIntegral,
    grid: &PairGrid,
) -> Result<Vec<Sample>, QuadError> {
    grid.pairs()
        .iter()
        .map(|&(s, t)| {
            let g = (f_high.value(t)? - f_high.value(s)?) - (f_low.value(t)? - f_low.value(s)?);
            Ok(Sample { g, gap: t - s, s })
        })
        .collect()
}

#[inline]
fn offset(x: &Sample, a: f64, b: f64) -> f64 {
    x.g - a * x.gap + b * x.s
}

fn min_offset(samples: &[Sample], a: f64, b: f64) -> f64 {
    samples
        .iter()
        .map(|x| offset(x, a, b))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    a: f64,
    b: f64,
    d: f64,
    feasible: bool,
}

impl Candidate {
    /// Larger a, then smaller b, then larger d; feasible beats infeasible.
    /// Among infeasible candidates the one with the largest d, closest to
    /// the offset floor, ranks first.
    fn better_than(&self, other: &Candidate) -> bool {
        if self.feasible != other.feasible {
            return self.feasible;
        }
        if !self.feasible && self.d != other.d {
            return self.d > other.d;
        }
        if self.a != other.a {
            return self.a > other.a;
        }
        if self.b != other.b {
            return self.b < other.b;
        }
        self.d > other.d
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| {
        if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

/// Searches `(a, b) ∈ [0, aMax] × [0, b_max]` for a separation certificate
/// of `g_high` over `g_low`, where `aMax` is the largest observed
/// `G(s, t)/(t - s)`.
pub fn check_weak_separation(
    f_low: &CumulativeIntegral,
    f_high: &CumulativeIntegral,
    grid: &PairGrid,
    b_max: f64,
    opts: &WisOptions,
) -> Result<SeparationCertificate, WisError> {
    if !(b_max >= 0.0 && b_max.is_finite()) {
        return Err(WisError::InvalidParameter(format!(
            "bMax must be finite and >= 0, got {b_max}"
        )));
    }
    if !(opts.offset_limit >= 0.0) || opts.coarse < 2 || opts.fine < 2 {
        return Err(WisError::InvalidParameter(
            "sweep needs at least 2 points per axis and a non-negative offset limit".into(),
        ));
    }
    let samples = gap_samples(f_low, f_high, grid)?;
    let floor = -opts.offset_limit * grid.t_max();
    let a_max = samples
        .iter()
        .filter(|x| x.gap > 0.0)
        .map(|x| x.g / x.gap)
        .fold(0.0, f64::max);

    let eval = |a: f64, b: f64| {
        let d = min_offset(&samples, a, b);
        Candidate {
            a,
            b,
            d,
            feasible: a > 0.0 && d >= floor,
        }
    };
    let mut best = eval(0.0, 0.0);
    let mut best_cell = (0usize, 0usize);
    let a_step = a_max / (opts.coarse - 1) as f64;
    let b_step = b_max / (opts.coarse - 1) as f64;
    if a_max > 0.0 {
        for (i, a) in linspace(0.0, a_max, opts.coarse).enumerate() {
            for (k, b) in linspace(0.0, b_max, opts.coarse).enumerate() {
                let c = eval(a, b);
                if c.better_than(&best) {
                    best = c;
                    best_cell = (i, k);
                }
            }
        }
        if !best.feasible {
            best_cell = (0, 0);
        }
        // the feasibility boundary lies between the best row and the next
        let a_lo = best_cell.0 as f64 * a_step;
        let a_hi = (a_lo + a_step).min(a_max);
        let b_lo = (best_cell.1 as f64 - 1.0).max(0.0) * b_step;
        for a in linspace(a_lo, a_hi, opts.fine) {
            for b in linspace(b_lo, b_max, opts.fine) {
                let c = eval(a, b);
                if c.better_than(&best) {
                    best = c;
                }
            }
        }
    }

    let margin = samples
        .iter()
        .map(|x| offset(x, best.a, best.b) - best.d)
        .fold(f64::INFINITY, f64::min);
    Ok(SeparationCertificate {
        pair: SeparatedPair::Unlabeled,
        a: best.a,
        b: best.b,
        d: best.d,
        margin,
        offset_floor: floor,
        grid: grid.descriptor().clone(),
        feasible: best.feasible && margin >= 0.0,
    })
}

/// Re-checks a certificate pair by pair. Returns the smallest slack; a
/// sound certificate has slack `>= -tol` with `tol` a round-off allowance
/// relative to the terms involved.
pub fn revalidate(
    cert: &SeparationCertificate,
    f_low: &CumulativeIntegral,
    f_high: &CumulativeIntegral,
    grid: &PairGrid,
) -> Result<bool, QuadError> {
    for &(s, t) in grid.pairs() {
        let g = f_high.value(t)? - f_high.value(s)? - (f_low.value(t)? - f_low.value(s)?);
        let rhs = cert.a * (t - s) - cert.b * s + cert.d;
        let tol =
            1e-12 * (g.abs() + (cert.a * (t - s)).abs() + (cert.b * s).abs() + cert.d.abs() + 1.0);
        if g < rhs - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certificates for `λ` below and above `a_j`, with the membership verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub component: usize,
    pub lambda: f64,
    pub member: bool,
    pub below: SeparationCertificate,
    pub above: SeparationCertificate,
}

/// Decides whether `λ` belongs to the estimate of `Λ_j`: it does unless
/// `a_j` separates from the constant `λ` in one direction or the other.
pub fn wis_membership_detail(
    system: &DiagonalSystem,
    j: usize,
    lambda: f64,
    grid: &PairGrid,
    b_max: f64,
    opts: &WisOptions,
) -> Result<Membership, WisError> {
    let coefficient = j
        .checked_sub(1)
        .and_then(|i| system.coefficients().get(i))
        .ok_or_else(|| {
            WisError::InvalidParameter(format!(
                "component {j} out of range 1..={}",
                system.dimension()
            ))
        })?;
    if !lambda.is_finite() {
        return Err(WisError::InvalidParameter(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    let f = build_cumulative(coefficient, 0.0, grid.t_max(), &opts.quad)?;
    let c = build_cumulative(
        &CoefficientFunction::constant(lambda),
        0.0,
        grid.t_max(),
        &opts.quad,
    )?;
    let mut below = check_weak_separation(&c, &f, grid, b_max, opts)?;
    below.pair = SeparatedPair::ConstantBelow {
        component: j,
        lambda,
    };
    let mut above = check_weak_separation(&f, &c, grid, b_max, opts)?;
    above.pair = SeparatedPair::ConstantAbove {
        component: j,
        lambda,
    };
    Ok(Membership {
        component: j,
        lambda,
        member: !below.feasible && !above.feasible,
        below,
        above,
    })
}

pub fn wis_membership(
    system: &DiagonalSystem,
    j: usize,
    lambda: f64,
    grid: &PairGrid,
    b_max: f64,
    opts: &WisOptions,
) -> Result<bool, WisError> {
    Ok(wis_membership_detail(system, j, lambda, grid, b_max, opts)?.member)
}

/// Certificate for consecutive components `(i, i + 1)` of a system.
pub fn separate_components(
    system: &DiagonalSystem,
    lower: usize,
    grid: &PairGrid,
    b_max: f64,
    opts: &WisOptions,
) -> Result<SeparationCertificate, WisError> {
    let n = system.dimension();
    if lower == 0 || lower >= n {
        return Err(WisError::InvalidParameter(format!(
            "lower component must lie in 1..{n}, got {lower}"
        )));
    }
    let lo = build_cumulative(
        &system.coefficients()[lower - 1],
        0.0,
        grid.t_max(),
        &opts.quad,
    )?;
    let hi = build_cumulative(&system.coefficients()[lower], 0.0, grid.t_max(), &opts.quad)?;
    let mut cert = check_weak_separation(&lo, &hi, grid, b_max, opts)?;
    cert.pair = SeparatedPair::Components {
        lower,
        upper: lower + 1,
    };
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthMode {
    /// `±∫_s^t a ≤ ã|t - s| + b̃·s + d̃`.
    Signed,
    /// `∫_s^t |a| ≤ ã|t - s| + b̃·s + d̃`.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthBound {
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub d_tilde: f64,
    pub mode: GrowthMode,
    /// The bound holds on every grid pair with `d̃` within the offset cap.
    pub satisfied_on_grid: bool,
    pub d_cap: f64,
}

struct Observation {
    q: f64,
    dist: f64,
    second: f64,
}

fn growth_bound(obs: &[Observation], a_tilde: f64, d_cap: f64, mode: GrowthMode) -> GrowthBound {
    let b_tilde = obs
        .iter()
        .filter(|o| o.second > 0.0)
        .map(|o| (o.q - a_tilde * o.dist - d_cap) / o.second)
        .fold(0.0, f64::max);
    let d_tilde = obs
        .iter()
        .map(|o| o.q - a_tilde * o.dist - b_tilde * o.second)
        .fold(f64::NEG_INFINITY, f64::max);
    GrowthBound {
        a_tilde,
        b_tilde,
        d_tilde,
        mode,
        satisfied_on_grid: d_tilde <= d_cap,
        d_cap,
    }
}

/// For each candidate `ã`, the smallest `b̃` (with its `d̃`) for which the
/// growth bound holds on the grid under the offset cap `d̃ ≤ ρ·T`. Both
/// orderings of every pair are checked, the later time of the two acting
/// as the transition's final time. Absolute-mode bounds follow the signed
/// ones when `abs_integral` (a cumulative integral of `|a|`) is given.
pub fn estimate_growth_bounds(
    f: &CumulativeIntegral,
    abs_integral: Option<&CumulativeIntegral>,
    grid: &PairGrid,
    a_candidates: &[f64],
    opts: &WisOptions,
) -> Result<Vec<GrowthBound>, WisError> {
    if let Some(a) = a_candidates.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(WisError::InvalidParameter(format!(
            "ã candidates must be positive, got {a}"
        )));
    }
    let d_cap = opts.offset_limit * grid.t_max();
    let mut signed = Vec::with_capacity(2 * grid.pairs().len());
    for &(s, t) in grid.pairs() {
        let q = f.value(t)? - f.value(s)?;
        signed.push(Observation {
            q,
            dist: t - s,
            second: s,
        });
        signed.push(Observation {
            q: -q,
            dist: t - s,
            second: t,
        });
    }
    let mut out: Vec<GrowthBound> = a_candidates
        .iter()
        .map(|&a| growth_bound(&signed, a, d_cap, GrowthMode::Signed))
        .collect();
    if let Some(fa) = abs_integral {
        let mut abs = Vec::with_capacity(grid.pairs().len());
        for &(s, t) in grid.pairs() {
            abs.push(Observation {
                q: fa.value(t)? - fa.value(s)?,
                dist: t - s,
                second: s,
            });
        }
        out.extend(
            a_candidates
                .iter()
                .map(|&a| growth_bound(&abs, a, d_cap, GrowthMode::Absolute)),
        );
    }
    Ok(out)
}

/// Builds the signed (and optionally absolute) integrals of `coefficient`
/// over the grid range and estimates growth bounds.
pub fn growth_bounds_for(
    coefficient: &CoefficientFunction,
    grid: &PairGrid,
    a_candidates: &[f64],
    absolute: bool,
    opts: &WisOptions,
) -> Result<Vec<GrowthBound>, WisError> {
    let f = build_cumulative(coefficient, 0.0, grid.t_max(), &opts.quad)?;
    let fa = if absolute {
        Some(build_abs_cumulative(
            coefficient,
            0.0,
            grid.t_max(),
            &opts.quad,
        )?)
    } else {
        None
    };
    estimate_growth_bounds(&f, fa.as_ref(), grid, a_candidates, opts)
}

/// `ã|t - s| + b̃·s + d̃ - (F(t) - F(s))`.
pub fn growth_slack(
    f: &CumulativeIntegral,
    a_tilde: f64,
    b_tilde: f64,
    d_tilde: f64,
    s: f64,
    t: f64,
) -> Result<f64, QuadError> {
    Ok(a_tilde * (t - s).abs() + b_tilde * s + d_tilde - (f.value(t)? - f.value(s)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inclusion {
    LyapunovInNed,
    NedInEd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentViolation {
    pub component: usize,
    pub inclusion: Inclusion,
    pub endpoint: Endpoint,
    pub inner: f64,
    pub outer: f64,
}

fn check_inclusion(
    inner: &SpectralInterval,
    outer: &SpectralInterval,
    inclusion: Inclusion,
    tolerance: f64,
    out: &mut Vec<ContainmentViolation>,
) {
    if inner.divergent || outer.divergent {
        return;
    }
    if inner.lower < outer.lower - tolerance {
        out.push(ContainmentViolation {
            component: inner.component,
            inclusion,
            endpoint: Endpoint::Lower,
            inner: inner.lower,
            outer: outer.lower,
        });
    }
    if inner.upper > outer.upper + tolerance {
        out.push(ContainmentViolation {
            component: inner.component,
            inclusion,
            endpoint: Endpoint::Upper,
            inner: inner.upper,
            outer: outer.upper,
        });
    }
}

/// Lyapunov ⊆ NED ⊆ ED per component, within `tolerance`. Divergent
/// intervals stand for the whole line and never cause a violation.
pub fn check_containment(report: &SpectrumReport, tolerance: f64) -> Vec<ContainmentViolation> {
    let mut out = Vec::new();
    for ((l, n), e) in report.lyapunov.iter().zip(&report.ned).zip(&report.ed) {
        check_inclusion(l, n, Inclusion::LyapunovInNed, tolerance, &mut out);
        check_inclusion(n, e, Inclusion::NedInEd, tolerance, &mut out);
    }
    out
}
