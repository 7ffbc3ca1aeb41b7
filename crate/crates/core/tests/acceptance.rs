//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criterion 5 asks for `u(x, t + 2π(1+A)) = u(x, t)` for the closed-form
//! example. The example profile satisfies `a(λ + 2π) = −a(λ)`, so the field
//! is antiperiodic under that shift and the true period is twice as long.
//! The criterion is run exactly as stated and is listed in
//! `KNOWN_FAILURES`; any other failure, or a pass of criterion 5, fails the
//! test.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bi_waves::background_field::{background_ic, effective_metric_velocity, period_ratio};
use bi_waves::example_bc::{
    critical_epsilon, xi_fixed_point, xi_series, xi_series_coefficients, ExampleConfig,
};
use bi_waves::lindstedt::{solve_order, LindstedtSolution, Scales};
use bi_waves::minimal_surface::{InitialCondition, ParametricSolution, QuadratureSpec, SineSeries};
use bi_waves::rational::ratio;
use bi_waves::residual_check::{bi_residual, fd_derivatives, hyperbolicity_margin};
use bi_waves::trig_algebra::{bi_operator_symbolic, TrigSeries};

const KNOWN_FAILURES: &[u32] = &[5];

// Tolerances.
const FIG1_SLOPE_TOL: f64 = 0.3;
const EXAMPLE_PERIOD_TOL: f64 = 1e-8;
const EPS_C: (f64, f64) = (0.663, 0.001);
const X_C: (f64, f64) = (1.1997, 0.0005);
const XI_SERIES_C: f64 = 2.0;
const SYMMETRY_TOL: f64 = 1e-9;
const CROSS_METHOD_C: f64 = 10.0;
const BACKGROUND_TOL: f64 = 1e-12;
const FD_RESIDUAL_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-4;
const MARGIN_TOL: f64 = 1e-10;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (ok, mut detail) = f();
    let elapsed = start.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    if !in_budget {
        detail.push_str(&format!("; over budget {:?}", budget.unwrap()));
    }
    Outcome {
        id,
        name,
        pass: ok && in_budget,
        detail,
        elapsed,
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn q(n: i64, d: i64) -> BigRational {
    ratio(n, d)
}

fn dispersion_coefficients() -> (bool, String) {
    let sol = solve_order(3).unwrap();
    let expected = vec![q(1, 1), q(-1, 2), q(1, 4), q(-125, 1024)];
    let got: Vec<String> = sol.xi().iter().map(|x| x.to_string()).collect();
    (
        sol.xi() == expected.as_slice(),
        format!("xi = [{}]", got.join(", ")),
    )
}

fn printed_blocks() -> [TrigSeries; 3] {
    let s = |n, m| TrigSeries::s(n, m);
    let half = q(1, 2);
    let e2 = s(1, 3).add(&s(3, 1)).scale(&q(1, 32));
    let e4 = s(1, 3)
        .scale(&q(5, 1))
        .add(&s(3, 1).scale(&q(3, 1)))
        .sub(&s(1, 5))
        .sub(&s(5, 1))
        .add(&s(3, 5).sub(&s(5, 3)).scale(&q(1, 4)))
        .scale(&q(-1, 512));
    let e6 = s(1, 3)
        .scale(&q(189, 4))
        .add(&s(3, 1).scale(&q(61, 4)))
        .sub(&s(1, 5).scale(&q(17, 1)))
        .sub(&s(5, 1).scale(&q(15, 1)))
        .add(&s(3, 5).scale(&q(3, 1)))
        .sub(&s(5, 3).scale(&q(5, 1)))
        .add(&s(1, 7).scale(&q(3, 1)))
        .add(&s(7, 1).scale(&q(3, 1)))
        .sub(&s(3, 7))
        .add(&s(7, 3))
        .add(&s(5, 7).add(&s(7, 5)).scale(&q(1, 12)))
        .scale(&q(1, 16384));
    [
        e2.scale(&half).shift_eps(2),
        e4.scale(&half).shift_eps(4),
        e6.scale(&half).shift_eps(6),
    ]
}

fn coefficient_tables() -> (bool, String) {
    let series = solve_order(3).unwrap().series();
    let blocks = printed_blocks();
    let mut mismatches = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let power = 2 * (i as u32 + 1);
        if &series.grade(power) != block {
            mismatches.push(power);
        }
    }
    let terms: usize = blocks.iter().map(|b| b.len()).sum();
    (
        mismatches.is_empty(),
        format!("{terms} printed terms compared, mismatched grades {mismatches:?}"),
    )
}

fn oracle_equivalence() -> (bool, String) {
    let sol = solve_order(4).unwrap();
    let r = bi_operator_symbolic(&sol.series(), sol.xi(), 4).unwrap();
    (
        r.is_zero(),
        format!("residual through eps^8 has {} terms", r.len()),
    )
}

fn fig1() -> (bool, String) {
    let eps_grid = [0.02, 0.03, 0.05, 0.07, 0.1, 0.15, 0.2, 0.25, 0.3];
    let orders = [3usize, 6, 11];
    let mut table = Vec::new();
    for &n in &orders {
        let sol = solve_order(n).unwrap();
        let f: Vec<f64> = eps_grid
            .iter()
            .map(|&e| sol.residual_max(e, 64, 64).unwrap())
            .collect();
        table.push(f);
    }
    let mut ok = true;
    let mut notes = Vec::new();
    for (row, &n) in table.iter().zip(&orders) {
        let positive = row.iter().all(|&v| v > 0.0);
        let increasing = row.windows(2).all(|w| w[1] > w[0]);
        let (xs, ys): (Vec<f64>, Vec<f64>) = eps_grid
            .iter()
            .zip(row)
            .filter(|(&e, _)| e <= 0.1 + 1e-12)
            .map(|(&e, &v)| (e.ln(), v.ln()))
            .unzip();
        let slope = least_squares_slope(&xs, &ys);
        let target = 2.0 * n as f64 + 2.0;
        ok &= positive && increasing && (slope - target).abs() <= FIG1_SLOPE_TOL;
        notes.push(format!("N={n} slope {slope:.3}"));
    }
    for ((f3, f6), f11) in table[0].iter().zip(&table[1]).zip(&table[2]) {
        ok &= f11 < f6 && f6 < f3;
    }
    notes.push(format!(
        "F(0.2): {:.3e} > {:.3e} > {:.3e}",
        table[0][6], table[1][6], table[2][6]
    ));
    (ok, notes.join(", "))
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn example_period() -> (bool, String) {
    let cfg = ExampleConfig::new(0.1).unwrap();
    let period = 2.0 * PI * (1.0 + cfg.amplitude);
    // With L = π the profile is rejected: a(x + 2π) = −a(x).
    let with_pi = InitialCondition::new(
        std::sync::Arc::new(bi_waves::example_bc::ExampleProfile(cfg)),
        std::sync::Arc::new(SineSeries::zero(PI)),
        PI,
        0.0,
        1.0,
    );
    let ps = ParametricSolution::build(cfg.initial_condition().unwrap(), QuadratureSpec::default())
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst, mut anti) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let x = rng.gen_range(0.0..PI);
        let t = rng.gen_range(0.0..period);
        let u = ps.value_at(x, t).unwrap();
        let shifted = ps.value_at(x, t + period).unwrap();
        worst = worst.max((shifted - u).abs());
        anti = anti.max((shifted + u).abs());
    }
    (
        worst <= EXAMPLE_PERIOD_TOL,
        format!(
            "L = pi initial data {}; built with L = 2pi, 2K = {:.12} = 4pi(1+A); max|u(t+2pi(1+A)) - u| = {worst:.3e}, max|u(t+2pi(1+A)) + u| = {anti:.3e}",
            match with_pi {
                Ok(_) => "accepted".to_string(),
                Err(e) => format!("rejected ({})", e.name()),
            },
            ps.period()
        ),
    )
}

fn appendix_constants() -> (bool, String) {
    let c = critical_epsilon();
    let ok = (c.eps_c - EPS_C.0).abs() <= EPS_C.1 && (c.x_c - X_C.0).abs() <= X_C.1;
    (
        ok,
        format!(
            "eps_c = {:.10}, x_c = {:.10}, 1/arcsinh(eps_c) = {:.7}",
            c.eps_c, c.x_c, c.inverse_arcsinh
        ),
    )
}

fn xi_prefix() -> (bool, String) {
    let c = xi_series_coefficients(4);
    let prefix_ok = c[0] == vec![(1, q(-1, 1))]
        && c[1] == vec![(2, q(1, 2))]
        && c[2] == vec![(1, q(1, 8)), (3, q(-3, 8))]
        && c[3] == vec![(2, q(-1, 6)), (4, q(1, 3))];
    let mut worst_ratio = 0.0f64;
    for i in 0..=64 {
        let tau = 2.0 * PI * i as f64 / 64.0;
        for j in 1..=30 {
            let eps = 0.3 * j as f64 / 30.0;
            let fp = xi_fixed_point(tau, eps, 1e-15).unwrap().xi;
            let diff = (fp - xi_series(tau, eps, 4)).abs();
            worst_ratio = worst_ratio.max(diff / eps.powi(5));
        }
    }
    (
        prefix_ok && worst_ratio <= XI_SERIES_C,
        format!("prefix exact: {prefix_ok}, max |fixed point - series|/eps^5 = {worst_ratio:.4}"),
    )
}

fn lindstedt_ic(sol: &LindstedtSolution, eps: f64) -> InitialCondition {
    let scales = sol.scales();
    let l = PI / scales.wavenumber;
    InitialCondition::new(
        std::sync::Arc::new(SineSeries::new(l, sol.initial_profile(eps))),
        std::sync::Arc::new(SineSeries::zero(l)),
        l,
        0.0,
        scales.bi_parameter(eps),
    )
    .unwrap()
}

fn symmetry_suite() -> (bool, String) {
    let sol = solve_order(3).unwrap();
    let cases = [
        ("vacuum", InitialCondition::vacuum(PI)),
        (
            "example",
            ExampleConfig::new(0.1)
                .unwrap()
                .initial_condition()
                .unwrap(),
        ),
        ("lindstedt N=3", lindstedt_ic(&sol, 0.2)),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, ic) in cases {
        let ps = ParametricSolution::build(ic, QuadratureSpec::default()).unwrap();
        let rep = ps.validate_symmetries(50).unwrap();
        ok &= rep.worst() <= SYMMETRY_TOL;
        notes.push(format!("{name} {:.1e}", rep.worst()));
    }
    (ok, notes.join(", "))
}

fn cross_method() -> (bool, String) {
    let sol = solve_order(3).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for eps in [0.05, 0.1, 0.2] {
        let ps =
            ParametricSolution::build(lindstedt_ic(&sol, eps), QuadratureSpec::default()).unwrap();
        let rel = (ps.period() - sol.period(eps).unwrap()).abs() / (2.0 * PI);
        let c = rel / eps.powi(8);
        ok &= c <= CROSS_METHOD_C;
        notes.push(format!("eps {eps}: C = {c:.3}"));
    }
    (ok, notes.join(", "))
}

fn background_closed_forms() -> (bool, String) {
    let mut worst_ratio = 0.0f64;
    let mut worst_product = 0.0f64;
    for (field, b) in [(0.5, 1.0), (2.0, 1.0), (1.0, 3.0), (0.1, 0.2)] {
        let ic = background_ic(field, SineSeries::zero(PI), SineSeries::zero(PI), PI, b).unwrap();
        let ps = ParametricSolution::build(ic, QuadratureSpec::default()).unwrap();
        let r = period_ratio(&ps);
        worst_ratio = worst_ratio.max((r - (1.0 + field * field / (b * b)).sqrt()).abs());
        worst_product =
            worst_product.max((r * effective_metric_velocity(field, b).unwrap() - 1.0).abs());
    }
    (
        worst_ratio <= BACKGROUND_TOL && worst_product <= BACKGROUND_TOL,
        format!("|K/L - sqrt(1+B^2/b^2)| = {worst_ratio:.1e}, |v K/L - 1| = {worst_product:.1e}"),
    )
}

fn parametric_residual() -> (bool, String) {
    let cfg = ExampleConfig::new(0.1).unwrap();
    let ps = ParametricSolution::build(cfg.initial_condition().unwrap(), QuadratureSpec::default())
        .unwrap();
    let l = ps.half_period();
    let k = PI / l;
    let norm = ps.field_scale() * k * k;
    let n = 32;
    let mut worst = 0.0f64;
    for i in 1..=n {
        let x = l * i as f64 / (n + 1) as f64;
        for j in 1..=n {
            let t = ps.period() * j as f64 / (n + 1) as f64;
            let s = fd_derivatives(|x, t| ps.value_at(x, t), x, t, FD_STEP, FD_STEP).unwrap();
            worst = worst.max(bi_residual(&s, 1.0).unwrap().abs() / norm);
        }
    }
    (
        worst <= FD_RESIDUAL_TOL,
        format!("max normalized FD residual {worst:.3e}"),
    )
}

fn hyperbolicity_boundary() -> (bool, String) {
    let sol = solve_order(0).unwrap().with_scales(Scales::default());
    let mut ok = true;
    let mut notes = Vec::new();
    for eps in [0.3, 0.6, 0.9] {
        let b = sol.scales().bi_parameter(eps);
        let omega = sol.omega(eps).unwrap();
        let n = 64;
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let x = 2.0 * PI * i as f64 / n as f64;
                let t = 2.0 * PI * j as f64 / (n as f64 * omega);
                let s = sol.sample(x, t, eps).unwrap();
                min = min.min(hyperbolicity_margin(&s, b).unwrap());
            }
        }
        let err = (min - (1.0 - eps * eps)).abs();
        ok &= err <= MARGIN_TOL;
        notes.push(format!("eps {eps}: min {min:.12}"));
    }
    (ok, notes.join(", "))
}

fn main() {
    let outcomes = vec![
        run(
            1,
            "dispersion coefficients",
            secs(1),
            dispersion_coefficients,
        ),
        run(2, "coefficient tables", secs(5), coefficient_tables),
        run(3, "oracle equivalence", secs(30), oracle_equivalence),
        run(4, "residual curves", secs(300), fig1),
        run(5, "example period", secs(30), example_period),
        run(6, "critical epsilon", secs(1), appendix_constants),
        run(7, "xi series prefix", secs(5), xi_prefix),
        run(8, "symmetry suite", secs(60), symmetry_suite),
        run(9, "cross-method period", secs(60), cross_method),
        run(
            10,
            "background closed forms",
            secs(1),
            background_closed_forms,
        ),
        run(11, "parametric FD residual", secs(120), parametric_residual),
        run(12, "hyperbolicity boundary", None, hyperbolicity_boundary),
    ];
    let mut failures = Vec::new();
    for o in &outcomes {
        println!(
            "{} #{:<2} {:<26} ({:>7.2?}) {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.elapsed,
            o.detail
        );
        if !o.pass {
            failures.push(o.id);
        }
    }
    assert_eq!(failures, KNOWN_FAILURES, "unexpected acceptance outcome");
}
