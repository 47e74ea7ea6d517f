//! The four reference tables: Lyapunov intervals, bias, dichotomy and
//! nonuniform dichotomy intervals over fixed parameter sets.
//!
//! Every table is sampled with step π/8. For windowed quantities the step
//! is shrunk slightly so that it divides `H` (by less than one part in
//! `H/(π/8)`), which lets the scan reuse integral values.

use std::f64::consts::PI;

use serde_json::{json, Value};

use dichospec::spectra::{
    ed_intervals, lyapunov_intervals, ned_intervals, nonuniform_bias, SpectralInterval,
    SystemSummary,
};
use dichospec::steklov::aligned_step;

use crate::commands::Artifact;
use crate::config::{positive_or, RunConfig};
use crate::output::{exact, interval, short, text_table, to_csv};
use crate::{lib_error, CliError};

pub const TABLE_STEP: f64 = PI / 8.0;

pub const LYAPUNOV_ROWS: [(f64, f64); 3] = [(1e2, 1e4), (1e2, 1e6), (1e4, 1e6)];
pub const BIAS_ROWS: [(f64, f64, f64); 3] = [(1e2, 1e4, 1e5), (1e3, 1e6, 1e7), (1e4, 1e6, 1e7)];
/// `(H, t0, T)`.
pub const ED_ROWS: [(f64, f64, f64); 3] = [(1e3, 1e6, 1e8), (1e5, 1e6, 1e8), (1e4, 1e5, 1e8)];
pub const NED_ROWS: [(f64, f64, f64); 3] = [(1e4, 1e2, 1e3), (1e6, 1e2, 1e3), (1e8, 1e3, 1e4)];

pub fn window_step(h: f64) -> f64 {
    aligned_step(h, TABLE_STEP)
}

struct Table {
    title: &'static str,
    note: String,
    params: &'static [&'static str],
    columns: Vec<String>,
    csv_columns: Vec<String>,
    text: Vec<Vec<String>>,
    csv: Vec<Vec<String>>,
    json: Vec<Value>,
}

impl Table {
    fn new(
        title: &'static str,
        note: String,
        params: &'static [&'static str],
        (columns, csv_columns): (Vec<String>, Vec<String>),
    ) -> Self {
        Table {
            title,
            note,
            params,
            columns,
            csv_columns,
            text: Vec::new(),
            csv: Vec::new(),
            json: Vec::new(),
        }
    }

    fn header<'a>(&'a self, columns: &'a [String]) -> Vec<&'a str> {
        self.params
            .iter()
            .copied()
            .chain(columns.iter().map(String::as_str))
            .collect()
    }
}

fn interval_cells(list: &[SpectralInterval], table: &mut Vec<String>, csv: &mut Vec<String>) {
    for iv in list {
        let mark = if iv.divergent { " (divergent)" } else { "" };
        table.push(format!("{}{mark}", interval(iv.lower, iv.upper)));
        csv.push(exact(iv.lower));
        csv.push(exact(iv.upper));
    }
}

fn interval_columns(n: usize, symbol: &str) -> (Vec<String>, Vec<String>) {
    let text = (1..=n)
        .map(|j| format!("[{symbol}{j} lower, upper]"))
        .collect();
    let csv = (1..=n)
        .flat_map(|j| [format!("lower{j}"), format!("upper{j}")])
        .collect();
    (text, csv)
}

pub fn tables(config: &RunConfig) -> Result<Artifact, CliError> {
    let system = config.system()?;
    let opts = config.spectra_options()?;
    let eps = positive_or(
        "bias.epsilon",
        config.bias.epsilon,
        dichospec::spectra::DEFAULT_EPSILON,
    )?;
    let n = system.dimension();
    let mut out = Vec::new();

    let mut t = Table::new(
        "Table 1: Lyapunov intervals",
        format!("grid step pi/8 = {}", short(TABLE_STEP)),
        &["T1", "T2"],
        interval_columns(n, "lambda"),
    );
    for (t1, t2) in LYAPUNOV_ROWS {
        let iv = lyapunov_intervals(&system, t1, t2, Some(TABLE_STEP), &opts).map_err(lib_error)?;
        let (mut text, mut csv) = (
            vec![format!("{t1:e}"), format!("{t2:e}")],
            vec![exact(t1), exact(t2)],
        );
        interval_cells(&iv, &mut text, &mut csv);
        t.text.push(text);
        t.csv.push(csv);
        t.json
            .push(json!({ "T1": t1, "T2": t2, "grid_step": TABLE_STEP, "intervals": iv }));
    }
    out.push(t);

    let cols: Vec<String> = (1..=n).map(|j| format!("b{j}")).collect();
    let mut t = Table::new(
        "Table 2: bias of the nonuniform part",
        format!("grid step pi/8 aligned to H; decision threshold epsilon = {eps}"),
        &["H", "T1", "T2"],
        (cols.clone(), cols),
    );
    for (h, t1, t2) in BIAS_ROWS {
        let step = window_step(h);
        let r = nonuniform_bias(&system, h, t1, t2, Some(step), eps, &opts).map_err(lib_error)?;
        let mut text = vec![format!("{h:e}"), format!("{t1:e}"), format!("{t2:e}")];
        let mut csv = vec![exact(h), exact(t1), exact(t2)];
        for c in &r.components {
            let flag = if c.nonuniform { " (nonuniform)" } else { "" };
            text.push(format!("{}{flag}", short(c.b_bar)));
            csv.push(exact(c.b_bar));
        }
        t.text.push(text);
        t.csv.push(csv);
        t.json
            .push(json!({ "H": h, "T1": t1, "T2": t2, "grid_step": step, "bias": r }));
    }
    out.push(t);

    let mut t = Table::new(
        "Table 3: dichotomy intervals",
        "grid step pi/8 aligned to H; t ranges over [t0, T - H]".into(),
        &["H", "t0", "T"],
        interval_columns(n, "a"),
    );
    for (h, t0, tt) in ED_ROWS {
        let step = window_step(h);
        let iv = ed_intervals(&system, h, t0, tt, Some(step), &opts).map_err(lib_error)?;
        let mut text = vec![format!("{h:e}"), format!("{t0:e}"), format!("{tt:e}")];
        let mut csv = vec![exact(h), exact(t0), exact(tt)];
        interval_cells(&iv, &mut text, &mut csv);
        t.text.push(text);
        t.csv.push(csv);
        t.json
            .push(json!({ "H": h, "t0": t0, "T": tt, "grid_step": step, "intervals": iv }));
    }
    out.push(t);

    let mut t = Table::new(
        "Table 4: nonuniform dichotomy intervals",
        format!("grid step pi/8 = {} over [T1, T2]", short(TABLE_STEP)),
        &["H", "T1", "T2"],
        interval_columns(n, "a"),
    );
    for (h, t1, t2) in NED_ROWS {
        let iv = ned_intervals(&system, h, t1, t2, Some(TABLE_STEP), &opts).map_err(lib_error)?;
        let mut text = vec![format!("{h:e}"), format!("{t1:e}"), format!("{t2:e}")];
        let mut csv = vec![exact(h), exact(t1), exact(t2)];
        interval_cells(&iv, &mut text, &mut csv);
        t.text.push(text);
        t.csv.push(csv);
        t.json
            .push(json!({ "H": h, "T1": t1, "T2": t2, "grid_step": TABLE_STEP, "intervals": iv }));
    }
    out.push(t);

    let mut table = format!("{}\n", system.name());
    let mut csv = String::new();
    let mut json_tables = Vec::new();
    for t in &out {
        table += &format!(
            "\n{}\n{}\n\n{}",
            t.title,
            t.note,
            text_table(&t.header(&t.columns), &t.text)
        );
        csv += &format!(
            "# {}\n{}",
            t.title,
            to_csv(&t.header(&t.csv_columns), &t.csv)
        );
        json_tables.push(json!({ "title": t.title, "note": t.note, "rows": t.json }));
    }
    Ok(Artifact {
        json: json!({
            "schema": 1,
            "command": "tables",
            "system": SystemSummary::of(&system),
            "tables": json_tables,
        }),
        csv,
        table,
        series: Vec::new(),
    })
}
