use serde_json::{json, Value};

use dichospec::spectra::{
    self, build_integrals, full_report, lyapunov_intervals, nonuniform_bias, sample_series,
    time_grid, window_grid, EdWindow, LyapunovWindow, ReportConfig, SeriesKind, SpectraOptions,
    SpectralInterval, SteklovWindow, SystemSummary,
};
use dichospec::steklov::TimeGrid;
use dichospec::wis::{
    growth_bounds_for, separate_components, wis_membership_detail, PairGrid, SeparatedPair,
    SeparationCertificate, WisOptions,
};
use dichospec::DiagonalSystem;

use crate::config::{optional_positive, positive, positive_or, RunConfig};
use crate::output::{exact, interval, short, text_table, to_csv};
use crate::{lib_error, CliError, Command};

pub const DEFAULT_PLOT_POINTS: usize = 10_000;

/// `(file stem, (t, value) samples)` for plot data.
pub type Series = (String, Vec<(f64, f64)>);

/// A rendered command result.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub json: Value,
    pub csv: String,
    pub table: String,
    pub series: Vec<Series>,
}

pub fn execute(command: Command, config: &RunConfig, plot: bool) -> Result<Artifact, CliError> {
    let plot_points = match config.output.plot_points {
        Some(0) => {
            return Err(CliError::Config(
                "output.plot_points must be positive".into(),
            ))
        }
        Some(n) => n,
        None => DEFAULT_PLOT_POINTS,
    };
    let plot = plot.then_some(plot_points);
    match command {
        Command::Lyap => lyap(config, plot),
        Command::Ed => ed(config, plot),
        Command::Ned => ned(config, plot),
        Command::Bias => bias(config, plot),
        Command::Report => report(config, plot),
        Command::CheckWis => check_wis(config),
        Command::Growth => growth(config),
        Command::Tables => crate::tables::tables(config),
    }
}

fn envelope(
    command: &str,
    system: &DiagonalSystem,
    parameters: Value,
    results: Value,
    warnings: &[String],
) -> Value {
    json!({
        "schema": 1,
        "command": command,
        "system": SystemSummary::of(system),
        "parameters": parameters,
        "results": results,
        "warnings": warnings,
    })
}

fn grid_json(grid: &TimeGrid) -> Value {
    json!({ "start": grid.start, "end": grid.end, "grid_step": grid.step, "points": grid.len() })
}

fn ratio_warning(what: &str, ratio: f64, opts: &SpectraOptions) -> Vec<String> {
    if ratio < opts.ratio_warn {
        vec![format!(
            "{what} = {ratio} is below the recommended {}",
            opts.ratio_warn
        )]
    } else {
        Vec::new()
    }
}

fn interval_rows(intervals: &[SpectralInterval], divergent: bool) -> (String, String) {
    let csv_rows: Vec<Vec<String>> = intervals
        .iter()
        .map(|iv| {
            let mut r = vec![iv.component.to_string(), exact(iv.lower), exact(iv.upper)];
            if divergent {
                r.push(iv.divergent.to_string());
            }
            r
        })
        .collect();
    let text_rows: Vec<Vec<String>> = intervals
        .iter()
        .map(|iv| {
            let mut r = vec![iv.component.to_string(), interval(iv.lower, iv.upper)];
            if divergent {
                r.push(if iv.divergent { "yes" } else { "no" }.to_string());
            }
            r
        })
        .collect();
    if divergent {
        (
            to_csv(&["component", "lower", "upper", "divergent"], &csv_rows),
            text_table(&["component", "interval", "divergent"], &text_rows),
        )
    } else {
        (
            to_csv(&["component", "lower", "upper"], &csv_rows),
            text_table(&["component", "interval"], &text_rows),
        )
    }
}

fn series(
    system: &DiagonalSystem,
    prefix: &str,
    kind: SeriesKind,
    grid: &TimeGrid,
    max_time: f64,
    max_points: usize,
    opts: &SpectraOptions,
) -> Result<Vec<Series>, CliError> {
    let integrals = build_integrals(system, max_time, &opts.quad).map_err(lib_error)?;
    integrals
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let s = sample_series(f, kind, grid, max_points).map_err(lib_error)?;
            Ok((format!("{prefix}_{}", j + 1), s))
        })
        .collect()
}

fn lyap(config: &RunConfig, plot: Option<usize>) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let opts = config.spectra_options()?;
    let l = &config.lyap;
    let t1 = positive_or("lyap.T1", l.t1, 1e2)?;
    let t2 = positive_or("lyap.T2", l.t2, 1e4)?;
    let step = optional_positive("lyap.grid_step", l.grid_step)?;
    let intervals = lyapunov_intervals(&system, t1, t2, step, &opts).map_err(lib_error)?;
    let grid = time_grid(t1, t2, step).map_err(lib_error)?;
    let (csv, rows) = interval_rows(&intervals, false);
    let table = format!(
        "{}: Lyapunov intervals, T1 = {t1:e}, T2 = {t2:e}, grid step {}\n\n{rows}",
        system.name(),
        short(grid.step)
    );
    let series = match plot {
        Some(n) => series(
            &system,
            "lambda",
            SeriesKind::RunningAverage,
            &grid,
            t2,
            n,
            &opts,
        )?,
        None => Vec::new(),
    };
    Ok(Artifact {
        json: envelope(
            "lyap",
            &system,
            json!({ "T1": t1, "T2": t2, "grid": grid_json(&grid) }),
            json!(intervals),
            &[],
        ),
        csv,
        table,
        series,
    })
}

fn ed(config: &RunConfig, plot: Option<usize>) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let opts = config.spectra_options()?;
    let e = &config.ed;
    let h = positive_or("ed.H", e.h, 1e4)?;
    let t0 = positive_or("ed.t0", e.t0, 1e5)?;
    let t = positive_or("ed.T", e.t, 1e8)?;
    let step = optional_positive("ed.grid_step", e.grid_step)?;
    let intervals = spectra::ed_intervals(&system, h, t0, t, step, &opts).map_err(lib_error)?;
    let grid = window_grid(t0, t - h, h, step).map_err(lib_error)?;
    let (csv, rows) = interval_rows(&intervals, true);
    let table = format!(
        "{}: dichotomy intervals, H = {h:e}, t0 = {t0:e}, T = {t:e}, grid step {}\n\n{rows}",
        system.name(),
        short(grid.step)
    );
    let series = match plot {
        Some(n) => series(
            &system,
            "steklov",
            SeriesKind::Steklov { h },
            &grid,
            t,
            n,
            &opts,
        )?,
        None => Vec::new(),
    };
    Ok(Artifact {
        json: envelope(
            "ed",
            &system,
            json!({ "H": h, "t0": t0, "T": t, "grid": grid_json(&grid) }),
            json!(intervals),
            &[],
        ),
        csv,
        table,
        series,
    })
}

fn ned(config: &RunConfig, plot: Option<usize>) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let opts = config.spectra_options()?;
    let n = &config.ned;
    let h = positive_or("ned.H", n.h, 1e6)?;
    let t1 = positive_or("ned.T1", n.t1, 1e2)?;
    let t2 = positive_or("ned.T2", n.t2, 1e3)?;
    let step = optional_positive("ned.grid_step", n.grid_step)?;
    let intervals = spectra::ned_intervals(&system, h, t1, t2, step, &opts).map_err(lib_error)?;
    let grid = time_grid(t1, t2, step).map_err(lib_error)?;
    let warnings = ratio_warning("H/T2", h / t2, &opts);
    let (csv, rows) = interval_rows(&intervals, true);
    let table = format!(
        "{}: nonuniform dichotomy intervals, H = {h:e}, T1 = {t1:e}, T2 = {t2:e}, grid step {}\n\n{rows}",
        system.name(),
        short(grid.step)
    );
    let series = match plot {
        Some(p) => series(
            &system,
            "steklov",
            SeriesKind::Steklov { h },
            &grid,
            t2 + h,
            p,
            &opts,
        )?,
        None => Vec::new(),
    };
    Ok(Artifact {
        json: envelope(
            "ned",
            &system,
            json!({ "H": h, "T1": t1, "T2": t2, "grid": grid_json(&grid) }),
            json!(intervals),
            &warnings,
        ),
        csv,
        table,
        series,
    })
}

fn bias(config: &RunConfig, plot: Option<usize>) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let opts = config.spectra_options()?;
    let b = &config.bias;
    let h = positive_or("bias.H", b.h, 1e3)?;
    let t1 = positive_or("bias.T1", b.t1, 1e6)?;
    let t2 = positive_or("bias.T2", b.t2, 1e7)?;
    let eps = positive_or("bias.epsilon", b.epsilon, spectra::DEFAULT_EPSILON)?;
    let step = optional_positive("bias.grid_step", b.grid_step)?;
    let report = nonuniform_bias(&system, h, t1, t2, step, eps, &opts).map_err(lib_error)?;
    let grid = window_grid(t1, t2, h, step).map_err(lib_error)?;
    let warnings = ratio_warning("T1/H", t1 / h, &opts);
    let decision = |nonuniform: bool| if nonuniform { "nonuniform" } else { "uniform" }.to_string();
    let csv_rows: Vec<Vec<String>> = report
        .components
        .iter()
        .map(|c| {
            vec![
                c.component.to_string(),
                exact(c.b_bar),
                decision(c.nonuniform),
            ]
        })
        .collect();
    let text_rows: Vec<Vec<String>> = report
        .components
        .iter()
        .map(|c| {
            vec![
                c.component.to_string(),
                short(c.b_bar),
                decision(c.nonuniform),
            ]
        })
        .collect();
    let table = format!(
        "{}: nonuniform bias, H = {h:e}, T1 = {t1:e}, T2 = {t2:e}, epsilon = {eps}, grid step {}\n\n{}",
        system.name(),
        short(grid.step),
        text_table(&["component", "b_bar", "decision"], &text_rows)
    );
    let series = match plot {
        Some(n) => series(
            &system,
            "bias",
            SeriesKind::Bias { h },
            &grid,
            t2 + h,
            n,
            &opts,
        )?,
        None => Vec::new(),
    };
    Ok(Artifact {
        json: envelope(
            "bias",
            &system,
            json!({ "H": h, "T1": t1, "T2": t2, "epsilon": eps, "grid": grid_json(&grid) }),
            json!(report),
            &warnings,
        ),
        csv: to_csv(&["component", "b_bar", "decision"], &csv_rows),
        table,
        series,
    })
}

/// Report windows: the config sections on top of the library defaults.
pub fn report_config(config: &RunConfig) -> Result<ReportConfig, CliError> {
    let d = ReportConfig::default();
    let (l, b, e, n) = (&config.lyap, &config.bias, &config.ed, &config.ned);
    Ok(ReportConfig {
        lyapunov: LyapunovWindow {
            t1: positive_or("lyap.T1", l.t1, d.lyapunov.t1)?,
            t2: positive_or("lyap.T2", l.t2, d.lyapunov.t2)?,
            grid_step: optional_positive("lyap.grid_step", l.grid_step)?,
        },
        bias: SteklovWindow {
            h: positive_or("bias.H", b.h, d.bias.h)?,
            t1: positive_or("bias.T1", b.t1, d.bias.t1)?,
            t2: positive_or("bias.T2", b.t2, d.bias.t2)?,
            grid_step: optional_positive("bias.grid_step", b.grid_step)?,
        },
        epsilon: positive_or("bias.epsilon", b.epsilon, d.epsilon)?,
        ed: EdWindow {
            h: positive_or("ed.H", e.h, d.ed.h)?,
            t0: positive_or("ed.t0", e.t0, d.ed.t0)?,
            t: positive_or("ed.T", e.t, d.ed.t)?,
            grid_step: optional_positive("ed.grid_step", e.grid_step)?,
        },
        ned: SteklovWindow {
            h: positive_or("ned.H", n.h, d.ned.h)?,
            t1: positive_or("ned.T1", n.t1, d.ned.t1)?,
            t2: positive_or("ned.T2", n.t2, d.ned.t2)?,
            grid_step: optional_positive("ned.grid_step", n.grid_step)?,
        },
        containment_tolerance: config.containment_tolerance()?,
        options: config.spectra_options()?,
    })
}

fn report(config: &RunConfig, plot: Option<usize>) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let rc = report_config(config)?;
    let r = full_report(&system, &rc).map_err(lib_error)?;

    let mut csv_rows = Vec::new();
    let mut text = format!("{}: spectral report\n", system.name());
    for (label, list) in [("lyapunov", &r.lyapunov), ("ed", &r.ed), ("ned", &r.ned)] {
        for iv in list {
            csv_rows.push(vec![
                label.to_string(),
                iv.component.to_string(),
                exact(iv.lower),
                exact(iv.upper),
                iv.divergent.to_string(),
            ]);
        }
        let (_, rows) = interval_rows(list, true);
        text += &format!("\n{label}\n{rows}");
    }
    let bias_rows: Vec<Vec<String>> = r
        .bias
        .components
        .iter()
        .map(|c| {
            vec![
                c.component.to_string(),
                short(c.b_bar),
                if c.nonuniform {
                    "nonuniform"
                } else {
                    "uniform"
                }
                .to_string(),
            ]
        })
        .collect();
    text += &format!(
        "\nbias (epsilon = {})\n{}",
        r.bias.epsilon,
        text_table(&["component", "b_bar", "decision"], &bias_rows)
    );
    if r.containment_violations.is_empty() {
        text += "\ncontainment: no violations\n";
    } else {
        text += "\ncontainment violations\n";
        for v in &r.containment_violations {
            text += &format!(
                "  component {}: {:?} {:?} endpoint, inner {} vs outer {}\n",
                v.component,
                v.inclusion,
                v.endpoint,
                short(v.inner),
                short(v.outer)
            );
        }
    }
    for w in &r.provenance.warnings {
        text += &format!("warning: {w}\n");
    }

    let mut series_out = Vec::new();
    if let Some(n) = plot {
        let p = &r.provenance;
        let g = |w: &spectra::ResolvedWindow| {
            TimeGrid::new(w.start, w.end, w.grid_step).map_err(lib_error)
        };
        let max_time = [
            rc.lyapunov.t2,
            rc.bias.t2 + rc.bias.h,
            rc.ed.t,
            rc.ned.t2 + rc.ned.h,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let o = &rc.options;
        series_out.extend(series(
            &system,
            "lambda",
            SeriesKind::RunningAverage,
            &g(&p.lyapunov)?,
            max_time,
            n,
            o,
        )?);
        series_out.extend(series(
            &system,
            "bias",
            SeriesKind::Bias { h: rc.bias.h },
            &g(&p.bias)?,
            max_time,
            n,
            o,
        )?);
        series_out.extend(series(
            &system,
            "ed_steklov",
            SeriesKind::Steklov { h: rc.ed.h },
            &g(&p.ed)?,
            max_time,
            n,
            o,
        )?);
        if let Some(w) = &p.ned {
            series_out.extend(series(
                &system,
                "ned_steklov",
                SeriesKind::Steklov { h: rc.ned.h },
                &g(w)?,
                max_time,
                n,
                o,
            )?);
        }
    }

    let mut json = serde_json::to_value(&r).expect("report serializes");
    let obj = json.as_object_mut().expect("report is an object");
    obj.insert("schema".into(), json!(1));
    obj.insert("command".into(), json!("report"));
    Ok(Artifact {
        json,
        csv: to_csv(
            &["kind", "component", "lower", "upper", "divergent"],
            &csv_rows,
        ),
        table: text,
        series: series_out,
    })
}

fn pair_grid(
    prefix: &str,
    t: Option<f64>,
    s_points: Option<usize>,
    gap_points: Option<usize>,
    max_pairs: Option<usize>,
    default_t: f64,
) -> Result<PairGrid, CliError> {
    let t = positive_or(&format!("{prefix}.T"), t, default_t)?;
    if t <= 1.0 {
        return Err(CliError::Config(format!(
            "{prefix}.T must exceed 1, got {t}"
        )));
    }
    let count = |key: &str, v: Option<usize>, d: usize, min: usize| match v {
        Some(n) if n < min => Err(CliError::Config(format!(
            "{prefix}.{key} must be at least {min}, got {n}"
        ))),
        Some(n) => Ok(n),
        None => Ok(d),
    };
    PairGrid::log_spaced(
        t,
        count("s_points", s_points, 32, 2)?,
        count("gap_points", gap_points, 32, 2)?,
        count("max_pairs", max_pairs, 4096, 2)?,
    )
    .map_err(lib_error)
}

fn components(key: &str, list: &[usize], n: usize) -> Result<Vec<usize>, CliError> {
    if let Some(j) = list.iter().find(|&&j| j == 0 || j > n) {
        return Err(CliError::Config(format!(
            "{key}: component {j} out of range 1..={n}"
        )));
    }
    Ok(if list.is_empty() {
        (1..=n).collect()
    } else {
        list.to_vec()
    })
}

fn pair_label(pair: &SeparatedPair) -> String {
    match *pair {
        SeparatedPair::Components { lower, upper } => format!("a{lower}<a{upper}"),
        SeparatedPair::ConstantBelow { component, lambda } => format!("{lambda}<a{component}"),
        SeparatedPair::ConstantAbove { component, lambda } => format!("a{component}<{lambda}"),
        SeparatedPair::Unlabeled => "unlabeled".into(),
    }
}

fn check_wis(config: &RunConfig) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let w = &config.wis;
    let grid = pair_grid("wis", w.t, w.s_points, w.gap_points, w.max_pairs, 200.0)?;
    let mut opts = WisOptions {
        quad: config.spectra_options()?.quad,
        ..WisOptions::default()
    };
    for (key, v, slot) in [
        ("coarse", w.coarse, &mut opts.coarse),
        ("fine", w.fine, &mut opts.fine),
    ] {
        match v {
            Some(n) if n < 2 => {
                return Err(CliError::Config(format!(
                    "wis.{key} must be at least 2, got {n}"
                )))
            }
            Some(n) => *slot = n,
            None => {}
        }
    }
    if let Some(r) = w.offset_limit {
        opts.offset_limit = positive("wis.offset_limit", r)?;
    }
    let (b_max, b_source) = match w.b_max {
        Some(b) if b >= 0.0 && b.is_finite() => (b, "config".to_string()),
        Some(b) => return Err(CliError::Config(format!("wis.b_max must be >= 0, got {b}"))),
        None => default_b_max(config, &system)?,
    };

    let mut certificates: Vec<SeparationCertificate> = Vec::new();
    for lower in 1..system.dimension() {
        certificates
            .push(separate_components(&system, lower, &grid, b_max, &opts).map_err(lib_error)?);
    }
    let mut membership = Vec::new();
    for j in components("wis.components", &w.components, system.dimension())? {
        for &lambda in &w.lambdas {
            if !lambda.is_finite() {
                return Err(CliError::Config(format!(
                    "wis.lambdas: {lambda} is not finite"
                )));
            }
            membership.push(
                wis_membership_detail(&system, j, lambda, &grid, b_max, &opts)
                    .map_err(lib_error)?,
            );
        }
    }

    let all: Vec<&SeparationCertificate> = certificates
        .iter()
        .chain(membership.iter().flat_map(|m| [&m.below, &m.above]))
        .collect();
    let csv_rows: Vec<Vec<String>> = all
        .iter()
        .map(|c| {
            vec![
                pair_label(&c.pair),
                exact(c.a),
                exact(c.b),
                exact(c.d),
                exact(c.margin),
                c.feasible.to_string(),
            ]
        })
        .collect();
    let text_rows: Vec<Vec<String>> = all
        .iter()
        .map(|c| {
            vec![
                pair_label(&c.pair),
                short(c.a),
                short(c.b),
                short(c.d),
                short(c.margin),
                if c.feasible { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect();
    let mut table = format!(
        "{}: separation certificates on {} pairs up to T = {}, bMax = {} ({b_source})\n\n{}",
        system.name(),
        grid.pairs().len(),
        grid.t_max(),
        short(b_max),
        text_table(&["pair", "a", "b", "d", "margin", "feasible"], &text_rows)
    );
    for m in &membership {
        table += &format!(
            "lambda = {} {} the estimate of component {}\n",
            m.lambda,
            if m.member { "lies in" } else { "lies outside" },
            m.component
        );
    }
    Ok(Artifact {
        json: envelope(
            "check-wis",
            &system,
            json!({
                "grid": grid.descriptor(),
                "b_max": b_max,
                "b_max_source": b_source,
                "coarse": opts.coarse,
                "fine": opts.fine,
                "offset_limit": opts.offset_limit,
            }),
            json!({ "certificates": certificates, "membership": membership }),
            &[],
        ),
        csv: to_csv(&["pair", "a", "b", "d", "margin", "feasible"], &csv_rows),
        table,
        series: Vec::new(),
    })
}

/// Twice the largest bias estimate when a bias window is configured, else 10.
fn default_b_max(config: &RunConfig, system: &DiagonalSystem) -> Result<(f64, String), CliError> {
    let b = &config.bias;
    if b.h.is_none() && b.t1.is_none() && b.t2.is_none() {
        return Ok((10.0, "default".into()));
    }
    let opts = config.spectra_options()?;
    let h = positive_or("bias.H", b.h, 1e3)?;
    let t1 = positive_or("bias.T1", b.t1, 1e6)?;
    let t2 = positive_or("bias.T2", b.t2, 1e7)?;
    let step = optional_positive("bias.grid_step", b.grid_step)?;
    let eps = positive_or("bias.epsilon", b.epsilon, spectra::DEFAULT_EPSILON)?;
    let report = nonuniform_bias(system, h, t1, t2, step, eps, &opts).map_err(lib_error)?;
    let top = report
        .components
        .iter()
        .map(|c| c.b_bar)
        .fold(0.0, f64::max);
    Ok((2.0 * top, "twice the bias estimate".into()))
}

fn growth(config: &RunConfig) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let g = &config.growth;
    let grid = pair_grid("growth", g.t, g.s_points, g.gap_points, g.max_pairs, 1e3)?;
    let mut opts = WisOptions {
        quad: config.spectra_options()?.quad,
        ..WisOptions::default()
    };
    if let Some(r) = g.offset_limit {
        opts.offset_limit = positive("growth.offset_limit", r)?;
    }
    let candidates = if g.a_candidates.is_empty() {
        vec![1.0, 2.0, 4.0]
    } else {
        g.a_candidates
            .iter()
            .map(|&a| positive("growth.a_candidates", a))
            .collect::<Result<_, _>>()?
    };
    let mut results = Vec::new();
    let mut csv_rows = Vec::new();
    let mut text_rows = Vec::new();
    for j in components("growth.components", &g.components, system.dimension())? {
        let bounds = growth_bounds_for(
            &system.coefficients()[j - 1],
            &grid,
            &candidates,
            g.absolute,
            &opts,
        )
        .map_err(lib_error)?;
        for b in &bounds {
            let mode = serde_json::to_value(b.mode).expect("mode serializes");
            let mode = mode.as_str().expect("mode is a string").to_string();
            csv_rows.push(vec![
                j.to_string(),
                mode.clone(),
                exact(b.a_tilde),
                exact(b.b_tilde),
                exact(b.d_tilde),
                b.satisfied_on_grid.to_string(),
            ]);
            text_rows.push(vec![
                j.to_string(),
                mode,
                short(b.a_tilde),
                short(b.b_tilde),
                short(b.d_tilde),
                if b.satisfied_on_grid { "yes" } else { "no" }.to_string(),
            ]);
        }
        results.push(json!({ "component": j, "bounds": bounds }));
    }
    let table = format!(
        "{}: growth bounds on {} pairs up to T = {}, offset cap {}\n\n{}",
        system.name(),
        grid.pairs().len(),
        grid.t_max(),
        short(opts.offset_limit * grid.t_max()),
        text_table(
            &[
                "component",
                "mode",
                "a_tilde",
                "b_tilde",
                "d_tilde",
                "satisfied"
            ],
            &text_rows
        )
    );
    Ok(Artifact {
        json: envelope(
            "growth",
            &system,
            json!({ "grid": grid.descriptor(), "a_candidates": candidates, "absolute": g.absolute }),
            json!(results),
            &[],
        ),
        csv: to_csv(
            &[
                "component",
                "mode",
                "a_tilde",
                "b_tilde",
                "d_tilde",
                "satisfied",
            ],
            &csv_rows,
        ),
        table,
        series: Vec::new(),
    })
}
