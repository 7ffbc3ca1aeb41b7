use std::f64::consts::PI;
use std::sync::Arc;

use clap::Args;
use serde_json::{json, Value};

use bi_waves::background_field::{
    background_ic, effective_metric_velocity, estimate_dispersion, magnetic_first_order,
    period_ratio, BackgroundConfig,
};
use bi_waves::error::Error;
use bi_waves::example_bc::{critical_epsilon, ExampleConfig};
use bi_waves::lindstedt::{solve_order, LindstedtSolution, Scales};
use bi_waves::minimal_surface::{InitialCondition, ParametricSolution, QuadratureSpec, SineSeries};
use bi_waves::output::{fmt_f64, Csv};
use bi_waves::residual_check::GridSpec;

use crate::config::{Format, Grid, PhaseGrid, RunConfig};
use crate::error::CliError;

/// Highest order computed by default; `maxOrder` lifts it.
pub const DEFAULT_MAX_ORDER: usize = 11;

pub struct Rendered {
    pub body: String,
    /// JSON summary written next to a CSV body.
    pub meta: Option<Value>,
}

impl Rendered {
    fn json(v: Value) -> Self {
        Rendered {
            body: pretty(&v),
            meta: None,
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_order(n: usize, max: usize) -> Result<usize, CliError> {
    if n > max {
        return Err(bad(format!("order N = {n} exceeds maxOrder = {max}")));
    }
    Ok(n)
}

fn check_eps(eps: &[f64]) -> Result<(), CliError> {
    match eps.iter().find(|e| !(**e >= 0.0 && **e < 1.0)) {
        Some(e) => Err(bad(format!("eps = {e} outside [0, 1)"))),
        None => Ok(()),
    }
}

fn check_grid(g: &Grid, min: usize) -> Result<GridSpec, CliError> {
    if g.nx < min || g.nt < min {
        return Err(bad(format!("grid needs at least {min} points per axis")));
    }
    if !(g.x1 > g.x0 && g.t1 >= g.t0) || ![g.x0, g.x1, g.t0, g.t1].iter().all(|v| v.is_finite()) {
        return Err(bad("grid bounds must be finite with x1 > x0 and t1 >= t0"));
    }
    Ok(GridSpec {
        x0: g.x0,
        x1: g.x1,
        nx: g.nx,
        t0: g.t0,
        t1: g.t1,
        nt: g.nt,
    })
}

fn check_phase_grid(g: PhaseGrid) -> Result<PhaseGrid, CliError> {
    if g.nx < 8 || g.nt < 8 {
        return Err(bad("phase grid needs nx, nt >= 8"));
    }
    Ok(g)
}

fn no_csv(format: Format, cmd: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(bad(format!("{cmd} only emits json")));
    }
    Ok(())
}

fn eps_list(explicit: Option<Vec<f64>>, eps_max: f64, steps: usize) -> Vec<f64> {
    explicit.unwrap_or_else(|| {
        (0..=steps)
            .map(|i| eps_max * i as f64 / steps as f64)
            .collect()
    })
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Default, Args)]
pub struct DispersionArgs {
    #[arg(long = "N")]
    pub order: Option<usize>,
    #[arg(long = "eps-max")]
    pub eps_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

pub fn dispersion(
    args: &DispersionArgs,
    cfg: &RunConfig,
    format: Format,
) -> Result<Rendered, CliError> {
    let block = cfg.lindstedt.clone().unwrap_or_default();
    let max = block.max_order.unwrap_or(DEFAULT_MAX_ORDER);
    let order = check_order(args.order.or(block.order).unwrap_or(3), max)?;
    let steps = args.steps.or(block.steps).unwrap_or(10);
    if steps == 0 {
        return Err(bad("steps must be at least 1"));
    }
    let explicit = if args.eps_max.is_some() {
        None
    } else {
        block.eps
    };
    let eps = eps_list(
        explicit,
        args.eps_max.or(block.eps_max).unwrap_or(0.5),
        steps,
    );
    check_eps(&eps)?;

    let sol = solve_order(order)?;
    let header = json!({ "N": order, "xi": sol.to_json()["xi"] });
    let values: Vec<(f64, f64)> = eps.iter().map(|&e| (e, sol.omega_sq_ratio(e))).collect();
    Ok(match format {
        Format::Csv => {
            let mut csv = Csv::new(&["eps", "omega2_over_k2"]);
            for (e, w) in &values {
                csv.row_f64(&[*e, *w]);
            }
            Rendered {
                body: csv.finish(),
                meta: Some(header),
            }
        }
        Format::Json => {
            let rows: Vec<Value> = values
                .iter()
                .map(|(e, w)| json!({"eps": e, "omega2_over_k2": w}))
                .collect();
            Rendered::json(json!({ "N": order, "xi": header["xi"], "rows": rows }))
        }
    })
}

#[derive(Debug, Clone, Default, Args)]
pub struct Fig1Args {
    /// Comma-separated orders, e.g. 3,6,11.
    #[arg(long = "N", value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
}

/// Least-squares slope of `ln F` against `ln ε` over `[lo, hi]`.
fn loglog_slope(rows: &[(f64, f64)], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(e, f)| *e >= lo && *e <= hi && *f > 0.0 && f.is_finite())
        .map(|(e, f)| (e.ln(), f.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn fig1(args: &Fig1Args, cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let block = cfg.lindstedt.clone().unwrap_or_default();
    let max = block.max_order.unwrap_or(DEFAULT_MAX_ORDER);
    let mut orders = args
        .orders
        .clone()
        .or(block.orders)
        .unwrap_or_else(|| vec![3, 6, 11]);
    orders.sort_unstable();
    orders.dedup();
    if orders.is_empty() {
        return Err(bad("N list is empty"));
    }
    for &n in &orders {
        check_order(n, max)?;
    }
    let eps = args
        .eps
        .clone()
        .or(block.eps)
        .unwrap_or_else(|| logspace(0.02, 0.3, 15));
    check_eps(&eps)?;
    let grid = block.grid.unwrap_or(PhaseGrid { nx: 64, nt: 64 });
    let grid = check_phase_grid(PhaseGrid {
        nx: args.nx.unwrap_or(grid.nx),
        nt: args.nt.unwrap_or(grid.nt),
    })?;

    let mut table: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    let mut failed = Vec::new();
    for &n in &orders {
        let sol = solve_order(n)?;
        let mut rows = Vec::with_capacity(eps.len());
        for &e in &eps {
            let f = match sol.residual_max(e, grid.nx, grid.nt) {
                Ok(f) => f,
                Err(err @ Error::NegativeOmegaSquared { .. }) => {
                    failed.push(json!({"N": n, "eps": e, "error": err.name()}));
                    f64::NAN
                }
                Err(err) => return Err(err.into()),
            };
            rows.push((e, f));
        }
        table.push((n, rows));
    }

    let mut violations = Vec::new();
    for (i, &e) in eps.iter().enumerate() {
        let column: Vec<f64> = table.iter().map(|(_, rows)| rows[i].1).collect();
        if e > 0.0
            && column
                .windows(2)
                .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less))
        {
            violations.push(e);
        }
    }
    let slopes: Vec<Value> = table
        .iter()
        .map(|(n, rows)| json!({"N": n, "expected": 2 * n + 2, "slope": loglog_slope(rows, 0.02, 0.1)}))
        .collect();
    let summary = json!({
        "grid": {"nx": grid.nx, "nt": grid.nt},
        "monotone_in_N": violations.is_empty(),
        "monotonicity_violations": violations,
        "slopes": slopes,
        "failed_rows": failed,
    });

    Ok(match format {
        Format::Csv => {
            let mut csv = Csv::new(&["eps", "N", "F"]);
            for (n, rows) in &table {
                for (e, f) in rows {
                    csv.row(&[fmt_f64(*e), n.to_string(), fmt_f64(*f)]);
                }
            }
            Rendered {
                body: csv.finish(),
                meta: Some(summary),
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .flat_map(|(n, rows)| {
                    rows.iter()
                        .map(move |(e, f)| json!({"eps": e, "N": n, "F": f}))
                })
                .collect();
            Rendered::json(json!({"rows": rows, "summary": summary}))
        }
    })
}

#[derive(Debug, Clone, Default, Args)]
pub struct CompareArgs {
    #[arg(long = "N")]
    pub order: Option<usize>,
    #[arg(long = "A")]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
}

pub fn compare(args: &CompareArgs, cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    no_csv(format, "compare")?;
    let block = cfg.compare.clone().unwrap_or_default();
    let order = check_order(args.order.or(block.order).unwrap_or(3), DEFAULT_MAX_ORDER)?;
    let amplitude = args.amplitude.or(block.amplitude).unwrap_or(0.1);
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(bad(format!("A must be non-negative, got {amplitude}")));
    }
    let k = positive("k", args.k.or(block.k).unwrap_or(1.0))?;
    let b = positive("b", args.b.or(block.b).unwrap_or(1.0))?;
    let eps = amplitude * k / b;
    check_eps(&[eps])?;
    let grid = check_phase_grid(block.grid.unwrap_or(PhaseGrid { nx: 16, nt: 16 }))?;

    let sol = solve_order(order)?.with_scales(Scales {
        amplitude,
        wavenumber: k,
    });
    let ps = lindstedt_parametric(&sol, eps, b)?;
    let two_k = ps.period();
    let lindstedt_period = sol.period(eps)?;
    let gap = (two_k - lindstedt_period).abs();
    let normalized = gap / (2.0 * PI / k);
    let constant = (eps > 0.0).then(|| normalized / eps.powi(2 * order as i32 + 2));

    let l = ps.half_period();
    let mut worst = 0.0f64;
    for i in 0..=grid.nx {
        for j in 0..grid.nt {
            let x = l * i as f64 / grid.nx as f64;
            let t = two_k * j as f64 / grid.nt as f64;
            worst = worst.max((ps.value_at(x, t)? - sol.evaluate(x, t, eps)?).abs());
        }
    }
    Ok(Rendered::json(json!({
        "N": order,
        "A": amplitude,
        "k": k,
        "b": b,
        "eps": eps,
        "two_K": two_k,
        "lindstedt_period": lindstedt_period,
        "period_gap": gap,
        "normalized_gap": normalized,
        "gap_over_eps_power": constant,
        "max_field_difference": worst,
        "quadrature_error_estimate": ps.error_estimate(),
    })))
}

/// Parametric solution seeded with the Lindstedt `t = 0` profile; `v0 = 0`.
fn lindstedt_parametric(
    sol: &LindstedtSolution,
    eps: f64,
    b: f64,
) -> Result<ParametricSolution, CliError> {
    let l = PI / sol.scales().wavenumber;
    let ic = InitialCondition::new(
        Arc::new(SineSeries::new(l, sol.initial_profile(eps))),
        Arc::new(SineSeries::zero(l)),
        l,
        0.0,
        b,
    )?;
    Ok(ParametricSolution::build(ic, QuadratureSpec::default())?)
}

#[derive(Debug, Clone, Default, Args)]
pub struct TableArgs {
    #[arg(long = "N")]
    pub order: Option<usize>,
}

pub fn lindstedt_table(
    args: &TableArgs,
    cfg: &RunConfig,
    format: Format,
    dump_series: bool,
) -> Result<Rendered, CliError> {
    let block = cfg.lindstedt.clone().unwrap_or_default();
    let max = block.max_order.unwrap_or(DEFAULT_MAX_ORDER);
    let order = check_order(args.order.or(block.order).unwrap_or(3), max)?;
    let sol = solve_order(order)?;
    if dump_series {
        no_csv(format, "--dump-series")?;
        return Ok(Rendered::json(sol.series().to_json()));
    }
    Ok(match format {
        Format::Json => Rendered::json(sol.to_json()),
        Format::Csv => {
            let mut csv = Csv::new(&["M", "nu", "mu", "num", "den"]);
            for (m, nu, mu, a) in sol.alpha_entries() {
                csv.row(&[
                    m.to_string(),
                    nu.to_string(),
                    mu.to_string(),
                    a.numer().to_string(),
                    a.denom().to_string(),
                ]);
            }
            Rendered {
                body: csv.finish(),
                meta: Some(json!({"N": order, "xi": sol.to_json()["xi"]})),
            }
        }
    })
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParametricArgs {
    #[arg(long = "L")]
    pub half_period: Option<f64>,
    #[arg(long = "B")]
    pub field: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
}

pub fn parametric(
    args: &ParametricArgs,
    cfg: &RunConfig,
    format: Format,
) -> Result<Rendered, CliError> {
    let block = cfg.parametric.clone().unwrap_or_default();
    let l = positive("L", args.half_period.or(block.half_period).unwrap_or(PI))?;
    let field = args.field.or(block.field).unwrap_or(0.0);
    if !field.is_finite() {
        return Err(bad("B must be finite"));
    }
    let b = positive("b", args.b.or(block.b).unwrap_or(1.0))?;
    let h = positive("h", args.h.or(block.h).unwrap_or(1e-4))?;
    let displacement = block.displacement.unwrap_or_else(|| vec![(1, 0.1)]);
    let velocity = block.velocity.unwrap_or_default();
    for (n, c) in displacement.iter().chain(&velocity) {
        if *n == 0 || !c.is_finite() {
            return Err(bad(format!(
                "sine term ({n}, {c}) needs n >= 1 and a finite coefficient"
            )));
        }
    }
    let q = block.quad.unwrap_or_default();
    let d = QuadratureSpec::default();
    let quad = QuadratureSpec {
        panels: q.panels.unwrap_or(d.panels),
        nodes: q.nodes.unwrap_or(d.nodes),
        tolerance: q.tolerance.unwrap_or(d.tolerance),
        max_panels: q.max_panels.unwrap_or(d.max_panels),
    };
    let grid = block.grid.unwrap_or(Grid {
        x0: 0.0,
        x1: l,
        nx: 16,
        t0: 0.0,
        t1: 2.0 * l,
        nt: 16,
    });
    let grid = check_grid(&grid, 1)?;
    let samples = block.symmetry_samples.unwrap_or(32);

    let ic = background_ic(
        field,
        SineSeries::new(l, displacement),
        SineSeries::new(l, velocity),
        l,
        b,
    )?;
    let ps = ParametricSolution::build(ic, quad)?;
    let symmetries = ps.validate_symmetries(samples)?;
    let summary = json!({
        "L": l,
        "K": ps.k(),
        "period": ps.period(),
        "panels": ps.panels(),
        "quadrature_error_estimate": ps.error_estimate(),
        "min_margin": ps.min_margin(),
        "symmetries": symmetries,
    });
    Ok(match format {
        Format::Csv => Rendered {
            body: ps.grid_csv(&grid, h)?,
            meta: Some(summary),
        },
        Format::Json => Rendered::json(summary),
    })
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExampleArgs {
    #[arg(long = "A")]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
}

pub fn example(args: &ExampleArgs, cfg: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let block = cfg.example.clone().unwrap_or_default();
    let amplitude = positive("A", args.amplitude.or(block.amplitude).unwrap_or(0.1))?;
    let ex = ExampleConfig::new(amplitude)?;
    let period = 4.0 * PI * (1.0 + amplitude);
    let mut grid = block.grid.unwrap_or(Grid {
        x0: 0.0,
        x1: 2.0 * PI,
        nx: 32,
        t0: 0.0,
        t1: period,
        nt: 32,
    });
    grid.nx = args.nx.unwrap_or(grid.nx);
    grid.nt = args.nt.unwrap_or(grid.nt);
    let grid = check_grid(&grid, 1)?;

    let mut points = Vec::new();
    for (x, t) in grid.points() {
        points.push((x, t, ex.field(x, t)?));
    }
    Ok(match format {
        Format::Csv => {
            let mut csv = Csv::new(&["x", "t", "u"]);
            for (x, t, u) in &points {
                csv.row_f64(&[*x, *t, *u]);
            }
            Rendered {
                body: csv.finish(),
                meta: Some(
                    json!({"A": amplitude, "period": period, "critical": critical_epsilon()}),
                ),
            }
        }
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .map(|(x, t, u)| json!({"x": x, "t": t, "u": u}))
                .collect();
            Rendered::json(
                json!({"A": amplitude, "period": period, "critical": critical_epsilon(), "points": rows}),
            )
        }
    })
}

#[derive(Debug, Clone, Default, Args)]
pub struct BackgroundArgs {
    #[arg(long = "B")]
    pub field: Option<f64>,
    #[arg(long = "A")]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
}

pub fn background(
    args: &BackgroundArgs,
    cfg: &RunConfig,
    format: Format,
) -> Result<Rendered, CliError> {
    no_csv(format, "background")?;
    let block = cfg.background.clone().unwrap_or_default();
    let field = args.field.or(block.field).unwrap_or(0.0);
    if !field.is_finite() {
        return Err(bad("B must be finite"));
    }
    let bc = BackgroundConfig {
        field,
        amplitude: positive("A", args.amplitude.or(block.amplitude).unwrap_or(0.1))?,
        wavenumber: positive("k", args.k.or(block.k).unwrap_or(1.0))?,
        bi_parameter: positive("b", args.b.or(block.b).unwrap_or(1.0))?,
    };
    check_eps(&[bc.eps()])?;
    let grid = block.grid.unwrap_or(32);
    if grid < 8 {
        return Err(bad("background grid needs at least 8 points"));
    }

    let first = magnetic_first_order(&bc)?;
    let estimate = estimate_dispersion(&bc, grid)?;
    let l = PI / bc.wavenumber;
    let ic = background_ic(
        field,
        SineSeries::new(l, vec![(1, bc.amplitude)]),
        SineSeries::zero(l),
        l,
        bc.bi_parameter,
    )?;
    let ps = ParametricSolution::build(ic, QuadratureSpec::default())?;
    Ok(Rendered::json(json!({
        "dispersion": {"first_order": first, "estimate": estimate},
        "KoverL": period_ratio(&ps),
        "v": effective_metric_velocity(field, bc.bi_parameter)?,
    })))
}
