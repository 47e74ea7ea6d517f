//! Steklov averages `f^H(t) = (1/H) ∫_t^{t+H} f` and the two separation
//! gap functionals built from them.
//!
//! These primitives are regime-agnostic: whether `H >> t` or `t >> H` is a
//! precondition enforced by the callers in [`crate::spectra`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::quad::{CumulativeIntegral, QuadError};

/// Largest grid step accepted anywhere: a quarter period of the trig
/// factors in the coefficients of interest.
pub const MAX_GRID_STEP: f64 = PI / 4.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SteklovError {
    #[error("invalid window parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Window length `h` and evaluation range `[t1, t2]` sampled every
/// `grid_step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteklovParams {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub grid_step: f64,
}

impl SteklovParams {
    pub fn new(h: f64, t1: f64, t2: f64, grid_step: f64) -> Result<Self, SteklovError> {
        let p = SteklovParams {
            h,
            t1,
            t2,
            grid_step,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SteklovError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(SteklovError::InvalidParams(format!(
                "H must be positive, got {}",
                self.h
            )));
        }
        validate_range(self.t1, self.t2, self.grid_step)
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new_unchecked(self.t1, self.t2, self.grid_step)
    }
}

/// `min(π/8, (t2 - t1)/1e4)`.
pub fn default_grid_step(t1: f64, t2: f64) -> f64 {
    (PI / 8.0).min((t2 - t1) / 1e4)
}

/// Largest step `<= step` dividing `h` evenly, so that `t + h` falls on
/// the grid lattice and window integrals can reuse grid values.
pub fn aligned_step(h: f64, step: f64) -> f64 {
    h / (h / step).ceil()
}

fn validate_range(t1: f64, t2: f64, step: f64) -> Result<(), SteklovError> {
    if !(t1 > 0.0 && t1.is_finite() && t2.is_finite() && t1 < t2) {
        return Err(SteklovError::InvalidParams(format!(
            "need 0 < T1 < T2, got T1 = {t1}, T2 = {t2}"
        )));
    }
    if !(step > 0.0 && step <= t2 - t1 && step <= MAX_GRID_STEP) {
        return Err(SteklovError::InvalidParams(format!(
            "grid step must lie in (0, min(T2 - T1, π/4)], got {step}"
        )));
    }
    Ok(())
}

/// Uniform grid `{start, start + step, …}` over the closed range
/// `[start, end]`; `end` is appended when the stepping falls short of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    steps: usize,
    closing_point: bool,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self, SteklovError> {
        validate_range(start, end, step)?;
        Ok(Self::new_unchecked(start, end, step))
    }

    fn new_unchecked(start: f64, end: f64, step: f64) -> Self {
        let span = end - start;
        // tolerate round-off when step divides the span
        let steps = ((span / step) * (1.0 + 1e-12)).floor() as usize;
        let last = start + steps as f64 * step;
        let closing_point = last < end && (end - last) > 1e-9 * step;
        TimeGrid {
            start,
            end,
            step,
            steps,
            closing_point,
        }
    }

    pub fn len(&self) -> usize {
        self.steps + 1 + usize::from(self.closing_point)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        if k > self.steps {
            self.end
        } else {
            (self.start + k as f64 * self.step).min(self.end)
        }
    }

    /// Number of points on the lattice `start + k·step`, excluding an
    /// appended closing point.
    pub fn lattice_len(&self) -> usize {
        self.steps + 1
    }

    /// `start + k·step`, also for `k` beyond the grid.
    #[inline]
    pub fn lattice_point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    /// Same start and end with a halved step; its points include all of
    /// this grid's points.
    pub fn refined(&self) -> TimeGrid {
        TimeGrid::new_unchecked(self.start, self.end, self.step / 2.0)
    }
}

/// `(F(t + H) - F(t)) / H`.
#[inline]
pub fn steklov_average(f: &CumulativeIntegral, t: f64, h: f64) -> Result<f64, SteklovError> {
    if !(h > 0.0) {
        return Err(SteklovError::InvalidParams(format!(
            "H must be positive, got {h}"
        )));
    }
    Ok((f.value(t + h)? - f.value(t)?) / h)
}

/// `f2^H(t) - f1^H(t)`.
pub fn steklov_gap(
    f1: &CumulativeIntegral,
    f2: &CumulativeIntegral,
    t: f64,
    h: f64,
) -> Result<f64, SteklovError> {
    Ok(steklov_average(f2, t, h)? - steklov_average(f1, t, h)?)
}

/// `(H/t) |f2^H(t) - f1^H(t)| = (1/t) |∫_t^{t+H} (f2 - f1)|`.
pub fn scaled_gap(
    f1: &CumulativeIntegral,
    f2: &CumulativeIntegral,
    t: f64,
    h: f64,
) -> Result<f64, SteklovError> {
    if !(t > 0.0) {
        return Err(SteklovError::InvalidParams(format!(
            "t must be positive, got {t}"
        )));
    }
    Ok((h / t) * steklov_gap(f1, f2, t, h)?.abs())
}
