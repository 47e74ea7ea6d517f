//! Acceptance run: one PASS/FAIL line per criterion, then a summary.
//! Exits nonzero when any line fails.

#![allow(clippy::approx_constant)]

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;

use dichospec::quad::{build_cumulative, QuadOptions};
use dichospec::spectra::{
    ed_intervals, lyapunov_intervals, ned_intervals, nonuniform_bias, SpectraOptions,
    SpectralInterval,
};
use dichospec::steklov::steklov_average;
use dichospec::systems::{self, CATALOG};
use dichospec::wis::{
    check_weak_separation, estimate_growth_bounds, growth_slack, revalidate, separate_components,
    wis_membership_detail, PairGrid, WisOptions,
};
use dichospec::{CoefficientFunction, DiagonalSystem};

const TIME_LIMIT: Duration = Duration::from_secs(60);

struct Run {
    lines: Vec<(bool, String)>,
}

impl Run {
    fn check(&mut self, id: &str, pass: bool, detail: impl Into<String>) {
        let line = format!(
            "{} {id}: {}",
            if pass { "PASS" } else { "FAIL" },
            detail.into()
        );
        println!("{line}");
        self.lines.push((pass, line));
    }

    fn info(&self, id: &str, detail: impl Into<String>) {
        println!("INFO {id}: {}", detail.into());
    }

    fn timed(&mut self, id: &str, body: impl FnOnce(&mut Run)) {
        let start = Instant::now();
        body(self);
        let elapsed = start.elapsed();
        self.check(
            &format!("{id}.time"),
            elapsed < TIME_LIMIT,
            format!(
                "{:.1} s (limit {} s)",
                elapsed.as_secs_f64(),
                TIME_LIMIT.as_secs()
            ),
        );
    }
}

fn dichospec(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_dichospec"))
        .args(args)
        .args(["--format", "json"])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn bounds(v: &Value) -> (f64, f64) {
    (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap())
}

fn near(got: (f64, f64), want: (f64, f64), tol: f64) -> bool {
    (got.0 - want.0).abs() <= tol && (got.1 - want.1).abs() <= tol
}

fn show(iv: (f64, f64)) -> String {
    format!("[{:.4}, {:.4}]", iv.0, iv.1)
}

fn system(name: &str) -> DiagonalSystem {
    systems::builtin(name, &Default::default()).unwrap()
}

fn lyapunov_tables(run: &mut Run) {
    let rows = [
        ("1a", "1e2", "1e4", [(-1.0098, 1.0004), (2.0019, 6.0000)]),
        ("1b", "1e4", "1e6", [(-1.0000, 0.9487), (2.0000, 6.0000)]),
    ];
    for (id, t1, t2, want) in rows {
        let v = dichospec(&["lyap", "--system", "planar-nubg", "--T1", t1, "--T2", t2]);
        for (j, w) in want.iter().enumerate() {
            let got = bounds(&v["results"][j]);
            run.check(
                &format!("{id}.{}", j + 1),
                near(got, *w, 0.05),
                format!(
                    "lyap T1={t1} T2={t2} component {} = {} vs {} +-0.05",
                    j + 1,
                    show(got),
                    show(*w)
                ),
            );
        }
    }
    for (id, t1, t2) in [("1c", "1e2", "1e4"), ("1d", "1e2", "1e6")] {
        let v = dichospec(&["lyap", "--system", "planar-nubg", "--T1", t1, "--T2", t2]);
        for (j, w) in [(-1.0, 1.0), (2.0, 6.0)].iter().enumerate() {
            let got = bounds(&v["results"][j]);
            run.check(
                &format!("{id}.{}", j + 1),
                near(got, *w, 0.02),
                format!(
                    "lyap T1={t1} T2={t2} component {} = {} vs analytic {} +-0.02",
                    j + 1,
                    show(got),
                    show(*w)
                ),
            );
        }
    }
}

fn bias_tables(run: &mut Run) {
    for (id, h, t1, t2, b1_max) in [
        ("2a", "1e2", "1e4", "1e5", 0.01),
        ("2b", "1e4", "1e6", "1e7", 1e-4),
    ] {
        let v = dichospec(&[
            "bias",
            "--system",
            "planar-nubg",
            "--H",
            h,
            "--T1",
            t1,
            "--T2",
            t2,
            "--epsilon",
            "0.01",
        ]);
        let c = &v["results"]["components"];
        let b1 = c[0]["b_bar"].as_f64().unwrap();
        let b2 = c[1]["b_bar"].as_f64().unwrap();
        let flags = (
            c[0]["nonuniform"].as_bool().unwrap(),
            c[1]["nonuniform"].as_bool().unwrap(),
        );
        let window = format!("H={h} T1={t1} T2={t2}");
        run.check(
            &format!("{id}.b1"),
            b1 <= b1_max,
            format!("{window}: b1 = {b1:.4e}, need <= {b1_max:e}"),
        );
        run.check(
            &format!("{id}.b2"),
            b2 >= 1.0,
            format!("{window}: b2 = {b2:.4}, need >= 1"),
        );
        run.check(
            &format!("{id}.flags"),
            flags == (false, true),
            format!("{window}: nonuniform flags {flags:?}, need (false, true)"),
        );
    }
}

fn ed_table(run: &mut Run) {
    let v = dichospec(&[
        "ed",
        "--system",
        "planar-nubg",
        "--H",
        "1e4",
        "--t0",
        "1e5",
        "--T",
        "1e8",
    ]);
    let c1 = bounds(&v["results"][0]);
    run.check(
        "3.1",
        near(c1, (-1.4142, 1.4142), 0.01),
        format!("ed component 1 = {} vs [-1.4142, 1.4142] +-0.01", show(c1)),
    );
    let c2 = bounds(&v["results"][1]);
    let divergent = v["results"][1]["divergent"].as_bool().unwrap();
    run.check(
        "3.2",
        c2.1 - c2.0 >= 1e3 && divergent,
        format!(
            "ed component 2 = [{:.4e}, {:.4e}], width {:.4e}, divergent {divergent}",
            c2.0,
            c2.1,
            c2.1 - c2.0
        ),
    );
}

fn ned_table(run: &mut Run) {
    let v = dichospec(&[
        "ned",
        "--system",
        "planar-nubg",
        "--H",
        "1e6",
        "--T1",
        "1e2",
        "--T2",
        "1e3",
    ]);
    let got = bounds(&v["results"][1]);
    let want = (1.9999, 5.9985);
    run.check(
        "4a",
        near(got, want, 0.02),
        format!(
            "ned H=1e6 component 2 = {} vs {} +-0.02",
            show(got),
            show(want)
        ),
    );

    let want = (1.6649, 6.3694);
    let step = format!("{:?}", PI / 8.0);
    let v = dichospec(&[
        "ned",
        "--system",
        "planar-nubg",
        "--H",
        "1e4",
        "--T1",
        "1e2",
        "--T2",
        "1e3",
        "--grid-step",
        &step,
    ]);
    let got = bounds(&v["results"][1]);
    run.check(
        "4b",
        near(got, want, 0.05),
        format!(
            "ned H=1e4 grid pi/8 component 2 = {} vs {} +-0.05",
            show(got),
            show(want)
        ),
    );
    let v = dichospec(&[
        "ned",
        "--system",
        "planar-nubg",
        "--H",
        "1e4",
        "--T1",
        "1e2",
        "--T2",
        "1e3",
    ]);
    run.info(
        "4b",
        format!("default grid gives {}", show(bounds(&v["results"][1]))),
    );
}

fn intro_report(run: &mut Run) {
    let v = dichospec(&["report", "--system", "intro-diagonal"]);
    let nonuniform = v["bias"]["components"][1]["nonuniform"].as_bool().unwrap();
    run.check(
        "5.bias",
        nonuniform,
        format!("component 2 nonuniform = {nonuniform}"),
    );
    let divergent = v["ed"][1]["divergent"].as_bool().unwrap();
    run.check(
        "5.ed",
        divergent,
        format!("component 2 ED divergent = {divergent}"),
    );
    let got = bounds(&v["ned"][1]);
    run.check(
        "5.ned",
        near(got, (-2.0, 2.0), 0.05),
        format!("component 2 NED = {} vs [-2, 2] +-0.05", show(got)),
    );
    run.info(
        "5",
        format!("component 1 NED = {}", show(bounds(&v["ned"][0]))),
    );
}

fn quadrature_oracle(run: &mut Run) {
    let points: Vec<f64> = (0..100)
        .map(|k| 10f64.powf(4.0 * k as f64 / 99.0))
        .collect();
    let numeric = QuadOptions::default().numeric();
    for info in CATALOG {
        let s = system(info.name);
        for (j, c) in s.coefficients().iter().enumerate() {
            let id = format!("6.{}.{}", info.name, j + 1);
            if !c.has_antiderivative() {
                run.check(&id, false, "no closed form to compare against");
                continue;
            }
            let f = build_cumulative(c, 0.0, 1e4, &numeric).unwrap();
            let exact = |t: f64| c.eval_antiderivative(t).unwrap().unwrap();
            let (base, f1) = (exact(1.0), f.value(1.0).unwrap());
            let mut worst = 0.0f64;
            for &t in &points {
                let want = exact(t) - base;
                let err = (f.value(t).unwrap() - f1 - want).abs() / want.abs().max(1.0);
                worst = worst.max(err);
            }
            run.check(&id, worst <= 1e-6, format!("worst relative error of the integral from 1 over 100 points in [1, 1e4]: {worst:.3e}"));
        }
    }
}

fn properties(run: &mut Run) {
    let opts = SpectraOptions::default();
    let q = QuadOptions::default();

    let c = CoefficientFunction::constant(2.5);
    let f = build_cumulative(&c, 0.0, 2e4, &q).unwrap();
    let worst = [(1.0, 0.5), (10.0, 7.0), (1e3, 1e2), (1e4, 1e4)]
        .iter()
        .map(|&(t, h)| (steklov_average(&f, t, h).unwrap() - 2.5).abs())
        .fold(0.0, f64::max);
    run.check(
        "7.steklov_constant",
        worst <= 1e-12,
        format!("worst error {worst:.2e}"),
    );

    let s = system("planar-nubg");
    let mut worst = 0.0f64;
    for lambda in [-3.0, 0.5, 2.0] {
        let shifted = s.shifted(lambda);
        let pairs = [
            (
                lyapunov_intervals(&s, 1e2, 1e3, None, &opts).unwrap(),
                lyapunov_intervals(&shifted, 1e2, 1e3, None, &opts).unwrap(),
            ),
            (
                ed_intervals(&s, 10.0, 1e2, 1e4, None, &opts).unwrap(),
                ed_intervals(&shifted, 10.0, 1e2, 1e4, None, &opts).unwrap(),
            ),
            (
                ned_intervals(&s, 1e4, 1e2, 1e3, None, &opts).unwrap(),
                ned_intervals(&shifted, 1e4, 1e2, 1e3, None, &opts).unwrap(),
            ),
        ];
        for (a, b) in &pairs {
            for (x, y) in a.iter().zip(b) {
                let e = (y.lower - x.lower - lambda)
                    .abs()
                    .max((y.upper - x.upper - lambda).abs());
                worst = worst.max(e / (1.0 + lambda.abs()));
            }
        }
    }
    run.check(
        "7.shift",
        worst <= 1e-12,
        format!("worst endpoint shift error {worst:.2e} relative to 1 + |lambda|"),
    );

    let mut ok = true;
    for name in ["planar-nubg", "intro-diagonal"] {
        let s = system(name);
        for step in [0.7, 0.31, 0.1] {
            let contains = |c: &[SpectralInterval], f: &[SpectralInterval]| {
                c.iter()
                    .zip(f)
                    .all(|(c, f)| f.lower <= c.lower && f.upper >= c.upper)
            };
            let coarse = lyapunov_intervals(&s, 1e2, 1e3, Some(step), &opts).unwrap();
            let fine = lyapunov_intervals(&s, 1e2, 1e3, Some(step / 2.0), &opts).unwrap();
            ok &= contains(&coarse, &fine);
            let coarse = ed_intervals(&s, 10.0, 1e2, 1e4, Some(step), &opts).unwrap();
            let fine = ed_intervals(&s, 10.0, 1e2, 1e4, Some(step / 2.0), &opts).unwrap();
            ok &= contains(&coarse, &fine);
        }
    }
    run.check(
        "7.refinement",
        ok,
        "halving the step never shrinks a Lyapunov or ED interval",
    );

    let v = dichospec(&["report", "--system", "planar-nubg"]);
    let violations = v["containment_violations"].as_array().unwrap().len();
    run.check(
        "7.containment",
        violations == 0,
        format!("{violations} containment violations on the planar-nubg report"),
    );

    let b: Vec<f64> = (3..=5)
        .map(|k| {
            let t1 = 10f64.powi(k);
            nonuniform_bias(&s, 10.0, t1, 10.0 * t1, None, 0.01, &opts)
                .unwrap()
                .components[0]
                .b_bar
        })
        .collect();
    run.check(
        "7.bias_decay",
        b.windows(2).all(|w| w[1] < w[0]),
        format!(
            "component 1 bias at T1 = 1e3, 1e4, 1e5: {:.3e}, {:.3e}, {:.3e}",
            b[0], b[1], b[2]
        ),
    );
}

fn certificates(run: &mut Run) {
    let opts = WisOptions::default();
    let q = &opts.quad;
    let grid = PairGrid::default_for(200.0).unwrap();
    let mut all_revalidate = true;

    let zero = build_cumulative(&CoefficientFunction::constant(0.0), 0.0, 200.0, q).unwrap();
    let one = build_cumulative(&CoefficientFunction::constant(1.0), 0.0, 200.0, q).unwrap();
    let cert = check_weak_separation(&zero, &one, &grid, 10.0, &opts).unwrap();
    run.check(
        "8.constants",
        cert.feasible && (cert.a, cert.b, cert.d) == (1.0, 0.0, 0.0),
        format!(
            "(0, 1) certificate (a, b, d) = ({}, {}, {}), feasible {}",
            cert.a, cert.b, cert.d, cert.feasible
        ),
    );
    all_revalidate &= revalidate(&cert, &zero, &one, &grid).unwrap();

    let planar = system("planar-nubg");
    let cert = separate_components(&planar, 1, &grid, 10.0, &opts).unwrap();
    run.check(
        "8.planar",
        cert.feasible && cert.a >= 0.5,
        format!(
            "planar-nubg certificate a = {:.4}, b = {:.4}, d = {:.4}, feasible {}",
            cert.a, cert.b, cert.d, cert.feasible
        ),
    );
    let f1 = build_cumulative(&planar.coefficients()[0], 0.0, 200.0, q).unwrap();
    let f2 = build_cumulative(&planar.coefficients()[1], 0.0, 200.0, q).unwrap();
    all_revalidate &= !cert.feasible || revalidate(&cert, &f1, &f2, &grid).unwrap();

    let constant = systems::builtin("constant", &[("c1".to_string(), 3.0)].into()).unwrap();
    let cases = [
        (&constant, 1, 3.0, true),
        (&constant, 1, 4.0, false),
        (&planar, 2, 0.0, false),
    ];
    for (k, (s, j, lambda, want)) in cases.into_iter().enumerate() {
        let m = wis_membership_detail(s, j, lambda, &grid, 10.0, &opts).unwrap();
        run.check(
            &format!("8.membership.{}", k + 1),
            m.member == want,
            format!(
                "{} component {j}, lambda = {lambda}: member {} (expected {want})",
                s.name(),
                m.member
            ),
        );
        let f = build_cumulative(&s.coefficients()[j - 1], 0.0, 200.0, q).unwrap();
        let c = build_cumulative(&CoefficientFunction::constant(lambda), 0.0, 200.0, q).unwrap();
        all_revalidate &= !m.below.feasible || revalidate(&m.below, &c, &f, &grid).unwrap();
        all_revalidate &= !m.above.feasible || revalidate(&m.above, &f, &c, &grid).unwrap();
    }
    run.check(
        "8.revalidate",
        all_revalidate,
        "every feasible certificate holds pair by pair on its grid",
    );
}

fn growth(run: &mut Run) {
    let opts = WisOptions::default();
    let scalar = system("no-ubg-scalar");
    let a = &scalar.coefficients()[0];
    for t_max in [10.0, 100.0, 1e3] {
        let grid = PairGrid::default_for(t_max).unwrap();
        let f = build_cumulative(a, 0.0, t_max, &opts.quad).unwrap();
        let b = estimate_growth_bounds(&f, None, &grid, &[2.0], &opts).unwrap();
        run.check(
            &format!("9.T={t_max:e}"),
            b[0].satisfied_on_grid && b[0].b_tilde <= 2.0,
            format!(
                "a~ = 2: b~ = {:.4}, d~ = {:.4} (cap {:.4}), satisfied {}",
                b[0].b_tilde, b[0].d_tilde, b[0].d_cap, b[0].satisfied_on_grid
            ),
        );
    }
    let f = build_cumulative(a, 0.0, 1e3, &opts.quad).unwrap();
    let worst = (1..)
        .map(|k| (2.0 * PI * k as f64, (2 * k + 1) as f64 * PI))
        .take_while(|&(_, t)| t <= 1e3)
        .map(|(s, t)| growth_slack(&f, 2.0, 2.0, 0.0, s, t).unwrap().abs())
        .fold(0.0, f64::max);
    run.check(
        "9.tightness",
        worst <= 1e-9,
        format!("worst |slack| at (2k pi, (2k+1) pi) = {worst:.2e}"),
    );
}

fn main() -> ExitCode {
    let mut run = Run { lines: Vec::new() };
    run.timed("1", lyapunov_tables);
    run.timed("2", bias_tables);
    run.timed("3", ed_table);
    run.timed("4", ned_table);
    run.timed("5", intro_report);
    run.timed("6", quadrature_oracle);
    run.timed("7", properties);
    run.timed("8", certificates);
    run.timed("9", growth);

    let failed: Vec<&String> = run
        .lines
        .iter()
        .filter(|(p, _)| !p)
        .map(|(_, l)| l)
        .collect();
    println!("\n{} checks, {} failed", run.lines.len(), failed.len());
    for line in &failed {
        println!("  {line}");
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
