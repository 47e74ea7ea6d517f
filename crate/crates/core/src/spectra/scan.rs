//! Parallel min/max reduction over a [`TimeGrid`].
//!
//! The grid is cut into fixed-size chunks independent of the worker count;
//! chunk results are merged in index order and ties keep the earlier
//! point, so the outcome is bit-identical for any number of threads.

use rayon::prelude::*;

use crate::steklov::TimeGrid;

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: Extremum,
    pub max: Extremum,
}

impl Range {
    fn point(t: f64, v: f64) -> Self {
        let e = Extremum { value: v, t };
        Range { min: e, max: e }
    }

    #[inline]
    fn absorb(&mut self, other: &Range) {
        if other.min.value < self.min.value {
            self.min = other.min;
        }
        if other.max.value > self.max.value {
            self.max = other.max;
        }
    }

    pub fn width(&self) -> f64 {
        self.max.value - self.min.value
    }
}

/// Per-channel ranges over the whole grid, and over the points `t <= split`
/// when a split was requested.
#[derive(Debug, Clone)]
pub struct Scan<const K: usize> {
    pub full: [Range; K],
    pub prefix: Option<[Range; K]>,
}

#[derive(Clone, Copy)]
struct Partial<const K: usize> {
    full: Option<[Range; K]>,
    prefix: Option<[Range; K]>,
}

fn merge<const K: usize>(acc: &mut Option<[Range; K]>, other: &Option<[Range; K]>) {
    match (acc.as_mut(), other) {
        (_, None) => {}
        (None, Some(o)) => *acc = Some(*o),
        (Some(a), Some(o)) => {
            for (x, y) in a.iter_mut().zip(o) {
                x.absorb(y);
            }
        }
    }
}

pub fn scan<const K: usize, E, F>(grid: &TimeGrid, split: Option<f64>, f: F) -> Result<Scan<K>, E>
where
    E: Send,
    F: Fn(f64) -> Result<[f64; K], E> + Sync,
{
    let n = grid.len();
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Result<Partial<K>, E>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut part = Partial {
                full: None,
                prefix: None,
            };
            for k in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let t = grid.point(k);
                let values = f(t)?;
                let here = Some(values.map(|v| Range::point(t, v)));
                merge(&mut part.full, &here);
                if split.is_some_and(|s| t <= s) {
                    merge(&mut part.prefix, &here);
                }
            }
            Ok(part)
        })
        .collect();

    let mut full = None;
    let mut prefix = None;
    for p in partials {
        let p = p?;
        merge(&mut full, &p.full);
        merge(&mut prefix, &p.prefix);
    }
    Ok(Scan {
        full: full.expect("grids are never empty"),
        prefix,
    })
}

/// Like [`scan`] for window quantities `combine(t, F(t), F(t + shift·step))`
/// with `F` given by `value`. Values of `F` on the lattice are computed
/// once per chunk and shared between the two window ends; the appended
/// closing point, if any, uses `closing_end` as its window end.
pub fn scan_shifted<const K: usize, E, V, C>(
    grid: &TimeGrid,
    split: Option<f64>,
    shift: usize,
    closing_end: f64,
    value: V,
    combine: C,
) -> Result<Scan<K>, E>
where
    E: Send,
    V: Fn(f64) -> Result<f64, E> + Sync,
    C: Fn(f64, f64, f64) -> [f64; K] + Sync,
{
    let n = grid.len();
    let lattice = grid.lattice_len();
    let chunk = CHUNK.max(4 * shift).next_power_of_two();
    let chunks = n.div_ceil(chunk);
    let partials: Vec<Result<Partial<K>, E>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (k0, k1) = (c * chunk, ((c + 1) * chunk).min(n));
            let lattice_end = k1.min(lattice);
            let buf = (k0..lattice_end.max(k0) + shift)
                .map(|k| value(grid.lattice_point(k)))
                .collect::<Result<Vec<f64>, E>>()?;
            let mut part = Partial {
                full: None,
                prefix: None,
            };
            for k in k0..k1 {
                let t = grid.point(k);
                let (ft, fs) = if k < lattice {
                    (buf[k - k0], buf[k - k0 + shift])
                } else {
                    (value(t)?, value(closing_end)?)
                };
                let here = Some(combine(t, ft, fs).map(|v| Range::point(t, v)));
                merge(&mut part.full, &here);
                if split.is_some_and(|s| t <= s) {
                    merge(&mut part.prefix, &here);
                }
            }
            Ok(part)
        })
        .collect();

    let mut full = None;
    let mut prefix = None;
    for p in partials {
        let p = p?;
        merge(&mut full, &p.full);
        merge(&mut prefix, &p.prefix);
    }
    Ok(Scan {
        full: full.expect("grids are never empty"),
        prefix,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[a, b]` for the minimum (or maximum) of `f`.
pub fn golden<E>(
    f: impl Fn(f64) -> Result<f64, E>,
    mut a: f64,
    mut b: f64,
    maximize: bool,
) -> Result<Extremum, E> {
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |x: f64| f(x).map(|v| sign * v);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = g(c)?;
    let mut fd = g(d)?;
    for _ in 0..80 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g(d)?;
        }
    }
    let (t, v) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(Extremum { value: sign * v, t })
}

/// Improves grid extrema by golden-section search within one step of the
/// grid argmin/argmax. Never makes an extremum worse.
pub fn refine<E>(
    grid: &TimeGrid,
    range: &mut Range,
    f: impl Fn(f64) -> Result<f64, E>,
) -> Result<(), E> {
    let bracket = |t: f64| {
        (
            (t - grid.step).max(grid.start),
            (t + grid.step).min(grid.end),
        )
    };
    let (a, b) = bracket(range.min.t);
    let lo = golden(&f, a, b, false)?;
    if lo.value < range.min.value {
        range.min = lo;
    }
    let (a, b) = bracket(range.max.t);
    let hi = golden(&f, a, b, true)?;
    if hi.value > range.max.value {
        range.max = hi;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<const K: usize>(v: [f64; K]) -> Result<[f64; K], ()> {
        Ok(v)
    }

    #[test]
    fn extrema_and_prefix() {
        let grid = TimeGrid::new(1.0, 10.0, 0.5).unwrap();
        let s = scan(&grid, Some(5.0), |t| ok([t, -(t - 3.0).powi(2)])).unwrap();
        assert_eq!(s.full[0].min, Extremum { value: 1.0, t: 1.0 });
        assert_eq!(
            s.full[0].max,
            Extremum {
                value: 10.0,
                t: 10.0
            }
        );
        assert_eq!(s.full[1].max.t, 3.0);
        let p = s.prefix.unwrap();
        assert_eq!(p[0].max.value, 5.0);
    }

    #[test]
    fn ties_keep_earliest_point_across_chunks() {
        let grid = TimeGrid::new(1.0, 1.0 + 0.01 * (3 * CHUNK) as f64, 0.01).unwrap();
        let s = scan(&grid, None, |_| ok([7.0])).unwrap();
        assert_eq!(s.full[0].min.t, 1.0);
        assert_eq!(s.full[0].max.t, 1.0);
    }

    #[test]
    fn first_error_in_grid_order_wins() {
        let grid = TimeGrid::new(1.0, 1.0 + 0.01 * (4 * CHUNK) as f64, 0.01).unwrap();
        let err = scan(&grid, None, |t| if t > 200.0 { Err(t) } else { Ok([t]) }).unwrap_err();
        assert!(err > 200.0 && err < 200.02);
    }

    #[test]
    fn shifted_scan_matches_direct_scan() {
        let grid = TimeGrid::new(1.0, 1.0 + 0.25 * (3 * CHUNK) as f64 + 0.1, 0.25).unwrap();
        let f = |t: f64| Ok::<_, ()>(t.sin() * t);
        let shift = 40;
        let h = 0.25 * shift as f64;
        let a = scan_shifted(&grid, Some(2000.0), shift, grid.end + h, f, |t, x, y| {
            [(y - x) / h, x / t]
        })
        .unwrap();
        let b = scan(&grid, Some(2000.0), |t| {
            Ok::<_, ()>([(f(grid_shift(&grid, t, shift, h))? - f(t)?) / h, f(t)? / t])
        })
        .unwrap();
        assert_eq!(a.full, b.full);
        assert_eq!(a.prefix, b.prefix);
    }

    fn grid_shift(grid: &TimeGrid, t: f64, shift: usize, h: f64) -> f64 {
        let k = ((t - grid.start) / grid.step).round() as usize;
        if k < grid.lattice_len() && grid.point(k) == t {
            grid.lattice_point(k + shift)
        } else {
            t + h
        }
    }

    #[test]
    fn golden_finds_interior_extremum() {
        let e = golden(|t: f64| Ok::<_, ()>(t.sin()), 1.0, 2.0, true).unwrap();
        assert!((e.t - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
        assert!((e.value - 1.0).abs() < 1e-12);
        let grid = TimeGrid::new(1.0, 6.0, 0.7).unwrap();
        let f = |t: f64| Ok::<_, ()>(t.sin());
        let mut r = scan(&grid, None, |t| f(t).map(|v| [v])).unwrap().full[0];
        let before = r;
        refine(&grid, &mut r, f).unwrap();
        assert!(r.max.value >= before.max.value && r.min.value <= before.min.value);
        assert!((r.min.value + 1.0).abs() < 1e-12);
    }
}
