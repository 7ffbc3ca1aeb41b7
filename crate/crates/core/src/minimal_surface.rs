//! Exact parametric standing waves from initial data.
//!
//! With `b = 1` units (fields divided by `b`) and momentum densities
//!
//! ```text
//! π_t = (1 + a′²)/√D,  π_x = −a′ v0/√D,  π_z = v0/√D,  D = 1 + a′² − v0²,
//! ```
//!
//! the solution surface is
//!
//! ```text
//! t(α,β) = ½∫_α^β π_t,  x(α,β) = (α+β)/2 + ½∫_α^β π_x,  z(α,β) = (a(α)+a(β))/2 + ½∫_α^β π_z
//! ```
//!
//! and `u(x(α,β), t(α,β)) = z(α,β)`. The densities are periodic with period
//! `2L`, so one period of cumulative integrals is cached and shifted.

use std::fmt::Debug;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::output::{fmt_f64, Csv};
use crate::residual_check::{
    bi_residual, fd_derivatives, hyperbolicity_margin, FieldSample, Source,
};

/// A smooth profile on the real line.
pub trait Profile: Debug + Send + Sync {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

/// `Σ c_n sin(nπx/L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    pub half_period: f64,
    pub terms: Vec<(u32, f64)>,
}

impl SineSeries {
    pub fn new(half_period: f64, terms: Vec<(u32, f64)>) -> Self {
        SineSeries { half_period, terms }
    }

    pub fn zero(half_period: f64) -> Self {
        SineSeries::new(half_period, Vec::new())
    }
}

impl Profile for SineSeries {
    fn value(&self, x: f64) -> f64 {
        let w = std::f64::consts::PI / self.half_period;
        self.terms
            .iter()
            .map(|&(n, c)| c * (n as f64 * w * x).sin())
            .sum()
    }

    fn derivative(&self, x: f64) -> f64 {
        let w = std::f64::consts::PI / self.half_period;
        self.terms
            .iter()
            .map(|&(n, c)| c * n as f64 * w * (n as f64 * w * x).cos())
            .sum()
    }
}

/// Initial data `u(x,0) = B·x + ã(x)`, `u_t(x,0) = v0(x)`.
#[derive(Debug, Clone)]
pub struct InitialCondition {
    displacement: Arc<dyn Profile>,
    velocity: Arc<dyn Profile>,
    half_period: f64,
    background_slope: f64,
    bi_parameter: f64,
}

const SYMMETRY_SAMPLES: usize = 64;

impl InitialCondition {
    /// Checks antisymmetry and `2L` periodicity of `ã` and `v0`, and the
    /// hyperbolicity margin, at a fixed set of sample points.
    pub fn new(
        displacement: Arc<dyn Profile>,
        velocity: Arc<dyn Profile>,
        half_period: f64,
        background_slope: f64,
        bi_parameter: f64,
    ) -> Result<Self> {
        if !(half_period > 0.0 && half_period.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "half period must be positive, got {half_period}"
            )));
        }
        if !(bi_parameter > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "b must be positive, got {bi_parameter}"
            )));
        }
        if !background_slope.is_finite() {
            return Err(Error::InvalidArgument(
                "background slope must be finite".into(),
            ));
        }
        let ic = InitialCondition {
            displacement,
            velocity,
            half_period,
            background_slope,
            bi_parameter,
        };
        ic.check_symmetry()?;
        for i in 0..=2 * SYMMETRY_SAMPLES {
            let x = ic.half_period * i as f64 / SYMMETRY_SAMPLES as f64;
            let margin = ic.margin(x);
            if !(margin > 0.0) {
                return Err(Error::HyperbolicityViolation { lambda: x, margin });
            }
        }
        Ok(ic)
    }

    pub fn vacuum(half_period: f64) -> Self {
        InitialCondition {
            displacement: Arc::new(SineSeries::zero(half_period)),
            velocity: Arc::new(SineSeries::zero(half_period)),
            half_period,
            background_slope: 0.0,
            bi_parameter: f64::INFINITY,
        }
    }

    fn check_symmetry(&self) -> Result<()> {
        let l = self.half_period;
        let profiles: [(&str, &dyn Profile); 2] = [
            ("displacement", &*self.displacement),
            ("velocity", &*self.velocity),
        ];
        for (name, p) in profiles {
            let scale = (0..=SYMMETRY_SAMPLES)
                .map(|i| p.value(2.0 * l * i as f64 / SYMMETRY_SAMPLES as f64).abs())
                .fold(1.0, f64::max);
            for i in 0..SYMMETRY_SAMPLES {
                // Irrational offset keeps samples off the symmetry points.
                let x = l * (i as f64 + 0.371) / SYMMETRY_SAMPLES as f64 * 2.0;
                let odd = (p.value(-x) + p.value(x)).abs();
                let periodic = (p.value(x + 2.0 * l) - p.value(x)).abs();
                let tol = 1e-9 * scale;
                if odd > tol {
                    return Err(Error::SymmetryViolation(format!(
                        "{name} is not odd at x = {x}: |f(-x) + f(x)| = {odd:e}"
                    )));
                }
                if periodic > tol {
                    return Err(Error::SymmetryViolation(format!(
                        "{name} is not 2L-periodic at x = {x}: |f(x+2L) - f(x)| = {periodic:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn background_slope(&self) -> f64 {
        self.background_slope
    }

    pub fn bi_parameter(&self) -> f64 {
        self.bi_parameter
    }

    /// `a(x) = B·x + ã(x)`.
    pub fn a(&self, x: f64) -> f64 {
        self.background_slope * x + self.displacement.value(x)
    }

    pub fn a_prime(&self, x: f64) -> f64 {
        self.background_slope + self.displacement.derivative(x)
    }

    pub fn v0(&self, x: f64) -> f64 {
        self.velocity.value(x)
    }

    /// `1 + (a′² − v0²)/b²`.
    pub fn margin(&self, x: f64) -> f64 {
        let (ap, v) = self.reduced(x);
        1.0 + ap * ap - v * v
    }

    /// `(a′/b, v0/b)`.
    fn reduced(&self, x: f64) -> (f64, f64) {
        if self.bi_parameter.is_infinite() {
            return (0.0, 0.0);
        }
        (
            self.a_prime(x) / self.bi_parameter,
            self.v0(x) / self.bi_parameter,
        )
    }
}

/// `(π_t, π_x, π_z)` in `b = 1` units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Densities {
    pub t: f64,
    pub x: f64,
    pub z: f64,
}

pub fn momentum_densities(ic: &InitialCondition, lambda: f64) -> Result<Densities> {
    let margin = ic.margin(lambda);
    if !(margin > 0.0) {
        return Err(Error::HyperbolicityViolation { lambda, margin });
    }
    let d = raw_densities(ic, lambda);
    Ok(Densities {
        t: d.t,
        x: d.x,
        z: d.z,
    })
}

// NaN where the data is not hyperbolic.
fn raw_densities(ic: &InitialCondition, lambda: f64) -> Triple {
    let (ap, v) = ic.reduced(lambda);
    let root = (1.0 + ap * ap - v * v).sqrt();
    Triple {
        t: (1.0 + ap * ap) / root,
        x: -ap * v / root,
        z: v / root,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub nodes: usize,
    /// Relative tolerance on the panel-doubling error estimate.
    pub tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panels: 32,
            nodes: 16,
            tolerance: 1e-12,
            max_panels: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Triple {
    t: f64,
    x: f64,
    z: f64,
}

impl std::ops::Add for Triple {
    type Output = Triple;
    fn add(self, o: Triple) -> Triple {
        Triple {
            t: self.t + o.t,
            x: self.x + o.x,
            z: self.z + o.z,
        }
    }
}

impl std::ops::Mul<f64> for Triple {
    type Output = Triple;
    fn mul(self, s: f64) -> Triple {
        Triple {
            t: self.t * s,
            x: self.x * s,
            z: self.z * s,
        }
    }
}

/// The surface built from one initial condition. Immutable once built.
#[derive(Debug, Clone)]
pub struct ParametricSolution {
    ic: InitialCondition,
    spec: QuadratureSpec,
    panels: usize,
    width: f64,
    rule: Vec<(f64, f64)>,
    // Antiderivatives from 0 at each panel start, panels + 1 entries.
    cumulative: Vec<Triple>,
    k: f64,
    error_estimate: f64,
    min_margin: f64,
}

fn panel_integrals(ic: &InitialCondition, rule: &[(f64, f64)], panels: usize) -> Vec<Triple> {
    let width = 2.0 * ic.half_period / panels as f64;
    (0..panels)
        .map(|i| integrate(ic, rule, i as f64 * width, (i + 1) as f64 * width))
        .collect()
}

fn integrate(ic: &InitialCondition, rule: &[(f64, f64)], a: f64, b: f64) -> Triple {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Triple::default();
    for &(node, weight) in rule {
        acc = acc + raw_densities(ic, mid + half * node) * weight;
    }
    acc * half
}

fn sum(v: &[Triple]) -> Triple {
    v.iter().fold(Triple::default(), |a, &b| a + b)
}

impl ParametricSolution {
    pub fn build(ic: InitialCondition, spec: QuadratureSpec) -> Result<Self> {
        if spec.panels < 8 || spec.nodes < 4 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 8 panels x 4 nodes, got {} x {}",
                spec.panels, spec.nodes
            )));
        }
        if !(spec.tolerance > 0.0) {
            return Err(Error::InvalidArgument(
                "quadrature tolerance must be positive".into(),
            ));
        }
        let gl = GaussLegendre::new(spec.nodes)
            .map_err(|e| Error::InvalidArgument(format!("Gauss-Legendre rule: {e}")))?;
        let rule: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();

        let mut panels = spec.panels;
        let mut coarse = panel_integrals(&ic, &rule, panels);
        let (fine, estimate) = loop {
            let fine = panel_integrals(&ic, &rule, 2 * panels);
            let (c, f) = (sum(&coarse), sum(&fine));
            let scale = f.t.abs().max(1.0);
            let estimate = [c.t - f.t, c.x - f.x, c.z - f.z]
                .iter()
                .fold(0.0f64, |m, d| m.max(d.abs()))
                / scale;
            panels *= 2;
            if estimate <= spec.tolerance {
                break (fine, estimate);
            }
            if !estimate.is_finite() {
                break (fine, estimate);
            }
            if 2 * panels > spec.max_panels {
                return Err(Error::QuadratureNotConverged {
                    estimate,
                    tolerance: spec.tolerance,
                    panels,
                });
            }
            coarse = fine;
        };

        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut run = Triple::default();
        cumulative.push(run);
        for p in &fine {
            run = run + *p;
            cumulative.push(run);
        }
        let width = 2.0 * ic.half_period / panels as f64;
        let mut min_margin = f64::INFINITY;
        for i in 0..panels {
            for &(node, _) in &rule {
                let lambda = (i as f64 + 0.5 * (node + 1.0)) * width;
                let margin = ic.margin(lambda);
                if !(margin > 0.0) {
                    return Err(Error::HyperbolicityViolation { lambda, margin });
                }
                min_margin = min_margin.min(margin);
            }
        }
        let k = 0.5 * run.t;
        Ok(ParametricSolution {
            ic,
            spec,
            panels,
            width,
            rule,
            cumulative,
            k,
            error_estimate: estimate,
            min_margin,
        })
    }

    pub fn initial_condition(&self) -> &InitialCondition {
        &self.ic
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.spec
    }

    /// Panel count after refinement.
    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Half temporal period, `K = ½∫_0^{2L} π_t`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn period(&self) -> f64 {
        2.0 * self.k
    }

    pub fn half_period(&self) -> f64 {
        self.ic.half_period
    }

    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    /// Smallest `1 + (a′² − v0²)/b²` over the quadrature nodes.
    pub fn min_margin(&self) -> f64 {
        self.min_margin
    }

    /// `∫_0^λ π` for any real λ.
    fn antiderivative(&self, lambda: f64) -> Triple {
        let period = 2.0 * self.ic.half_period;
        let j = (lambda / period).floor();
        let r = lambda - j * period;
        let i = ((r / self.width) as usize).min(self.panels - 1);
        let start = i as f64 * self.width;
        let partial = integrate(&self.ic, &self.rule, start, r);
        self.cumulative[i] + partial + self.cumulative[self.panels] * j
    }

    fn densities(&self, lambda: f64) -> Triple {
        raw_densities(&self.ic, lambda)
    }

    /// `(t, x, z)` at characteristic coordinates `(α, β)`; `z` in field units.
    pub fn eval(&self, alpha: f64, beta: f64) -> (f64, f64, f64) {
        let ia = self.antiderivative(alpha);
        let ib = self.antiderivative(beta);
        let b = self.field_unit();
        let t = 0.5 * (ib.t - ia.t);
        let x = 0.5 * (alpha + beta) + 0.5 * (ib.x - ia.x);
        let z = 0.5 * (self.ic.a(alpha) + self.ic.a(beta)) + 0.5 * b * (ib.z - ia.z);
        (t, x, z)
    }

    fn field_unit(&self) -> f64 {
        if self.ic.bi_parameter.is_infinite() {
            0.0
        } else {
            self.ic.bi_parameter
        }
    }

    /// `[[x_α, x_β], [t_α, t_β]]`.
    fn jacobian(&self, alpha: f64, beta: f64) -> ([f64; 2], [f64; 2], Triple, Triple) {
        let da = self.densities(alpha);
        let db = self.densities(beta);
        (
            [0.5 * (1.0 - da.x), 0.5 * (1.0 + db.x)],
            [-0.5 * da.t, 0.5 * db.t],
            da,
            db,
        )
    }

    /// Characteristic coordinates `(α, β)` of the point `(x, t)`.
    pub fn invert(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        if !(x.is_finite() && t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite point ({x}, {t})"
            )));
        }
        let l = self.ic.half_period;
        let tol = 1e-10 * l;
        let speed = l / self.k;
        let (mut a, mut b) = (x - t * speed, x + t * speed);
        let resid = |a: f64, b: f64| {
            let (tt, xx, _) = self.eval(a, b);
            (xx - x, tt - t)
        };
        let (mut fx, mut ft) = resid(a, b);
        for _ in 0..60 {
            let norm = fx.abs().max(ft.abs());
            if norm == 0.0 {
                break;
            }
            let (jx, jt, _, _) = self.jacobian(a, b);
            let det = jx[0] * jt[1] - jx[1] * jt[0];
            if !(det.abs() > 0.0) || !det.is_finite() {
                break;
            }
            let da = -(jt[1] * fx - jx[1] * ft) / det;
            let db = -(-jt[0] * fx + jx[0] * ft) / det;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let (na, nb) = (a + step * da, b + step * db);
                let (nfx, nft) = resid(na, nb);
                if nfx.abs().max(nft.abs()) < norm {
                    a = na;
                    b = nb;
                    fx = nfx;
                    ft = nft;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if fx.abs().max(ft.abs()) <= tol {
            return Ok((a, b));
        }
        self.invert_bisection(x, t, tol)
    }

    /// Nested bisection: `ξ = (β−α)/2` solves the time equation at fixed
    /// centre (monotone since `∂t/∂ξ ≥ 1`), the centre solves the x equation.
    fn invert_bisection(&self, x: f64, t: f64, tol: f64) -> Result<(f64, f64)> {
        let solve_xi = |s: f64| {
            let (mut lo, mut hi) = (-t.abs() - 1.0, t.abs() + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let (tt, _, _) = self.eval(s - mid, s + mid);
                if tt < t {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                    break;
                }
            }
            0.5 * (lo + hi)
        };
        let x_of = |s: f64| {
            let xi = solve_xi(s);
            self.eval(s - xi, s + xi).1 - x
        };
        let reach = t.abs() + self.ic.half_period;
        let (mut lo, mut hi) = (x - reach, x + reach);
        let (flo, fhi) = (x_of(lo), x_of(hi));
        if flo.signum() == fhi.signum() {
            return Err(self.inversion_failure(x, t, flo.abs().min(fhi.abs())));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (x_of(mid) < 0.0) == (flo < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        let s = 0.5 * (lo + hi);
        let xi = solve_xi(s);
        let (tt, xx, _) = self.eval(s - xi, s + xi);
        let r = (tt - t).abs().max((xx - x).abs());
        if r <= tol {
            Ok((s - xi, s + xi))
        } else {
            Err(self.inversion_failure(x, t, r))
        }
    }

    fn inversion_failure(&self, x: f64, t: f64, residual: f64) -> Error {
        Error::InversionNotConverged { x, t, residual }
    }

    /// `u(x, t)` only.
    pub fn value_at(&self, x: f64, t: f64) -> Result<f64> {
        let (a, b) = self.invert(x, t)?;
        Ok(self.eval(a, b).2)
    }

    /// `u`, `u_x`, `u_t` via the chain rule.
    pub fn field_at(&self, x: f64, t: f64) -> Result<FieldSample> {
        let (alpha, beta) = self.invert(x, t)?;
        let (_, _, u) = self.eval(alpha, beta);
        let (jx, jt, da, db) = self.jacobian(alpha, beta);
        let bu = self.field_unit();
        let za = 0.5 * (self.ic.a_prime(alpha) - bu * da.z);
        let zb = 0.5 * (self.ic.a_prime(beta) + bu * db.z);
        // z_α = u_x x_α + u_t t_α, z_β = u_x x_β + u_t t_β
        let det = jx[0] * jt[1] - jx[1] * jt[0];
        let ux = (za * jt[1] - zb * jt[0]) / det;
        let ut = (jx[0] * zb - jx[1] * za) / det;
        Ok(FieldSample {
            x,
            t,
            u,
            ux: Some(ux),
            ut: Some(ut),
            uxx: None,
            utt: None,
            uxt: None,
            source: Source::Parametric,
        })
    }

    /// Largest of `max|a|` and `L·max|v0|` over the nodes, or 1 for vacuum.
    pub fn field_scale(&self) -> f64 {
        let mut s: f64 = 0.0;
        for i in 0..self.panels {
            for &(node, _) in &self.rule {
                let lambda = (i as f64 + 0.5 * (node + 1.0)) * self.width;
                s = s
                    .max(self.ic.a(lambda).abs())
                    .max(self.ic.half_period * self.ic.v0(lambda).abs());
            }
        }
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Worst `|(ρ′ ± π)²|` over the quadrature nodes, in `b = 1` units.
    pub fn null_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.panels {
            for &(node, _) in &self.rule {
                let lambda = (i as f64 + 0.5 * (node + 1.0)) * self.width;
                let (ap, _) = self.ic.reduced(lambda);
                let d = self.densities(lambda);
                for sign in [1.0, -1.0] {
                    let (et, ex, ez) = (sign * d.t, 1.0 + sign * d.x, ap + sign * d.z);
                    worst = worst.max((et * et - ex * ex - ez * ez).abs());
                }
            }
        }
        worst
    }

    /// Check the standing-wave symmetries at `samples` pseudo-random points.
    pub fn validate_symmetries(&self, samples: usize) -> Result<SymmetryReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let l = self.ic.half_period;
        let slope = self.ic.background_slope;
        let scale = self.field_scale();
        let mut rep = SymmetryReport {
            samples,
            field_scale: scale,
            ..SymmetryReport::default()
        };
        for _ in 0..samples {
            let x = rng.gen_range(-l..l);
            let t = rng.gen_range(0.0..self.period());
            let u = self.value_at(x, t)?;
            let mirror = self.value_at(-x, t)?;
            let shifted_x = self.value_at(x + 2.0 * l, t)?;
            let shifted_t = self.value_at(x, t + self.period())?;
            let left = self.value_at(0.0, t)?;
            let right = self.value_at(l, t)?;
            rep.antisymmetry = rep.antisymmetry.max((mirror + u).abs() / scale);
            rep.x_periodicity = rep
                .x_periodicity
                .max((shifted_x - u - 2.0 * l * slope).abs() / scale);
            rep.t_periodicity = rep.t_periodicity.max((shifted_t - u).abs() / scale);
            rep.dirichlet = rep
                .dirichlet
                .max(left.abs() / scale)
                .max((right - slope * l).abs() / scale);
        }
        rep.null_condition = self.null_violation();
        Ok(rep)
    }

    /// Grid rows `x,t,u,ux,ut,margin,residual` with an FD residual at step `h`.
    pub fn grid_csv(&self, grid: &crate::residual_check::GridSpec, h: f64) -> Result<String> {
        let b = self.ic.bi_parameter;
        let mut csv = Csv::new(&["x", "t", "u", "ux", "ut", "margin", "residual"]);
        for (x, t) in grid.points() {
            let s = self.field_at(x, t)?;
            let fd = fd_derivatives(|x, t| self.value_at(x, t), x, t, h, h)?;
            let margin = hyperbolicity_margin(&s, b)?;
            let residual = bi_residual(&fd, b)?;
            csv.row(&[
                fmt_f64(x),
                fmt_f64(t),
                fmt_f64(s.u),
                fmt_f64(s.ux.unwrap_or(f64::NAN)),
                fmt_f64(s.ut.unwrap_or(f64::NAN)),
                fmt_f64(margin),
                fmt_f64(residual),
            ]);
        }
        Ok(csv.finish())
    }
}

/// Worst violations, field entries divided by `field_scale`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub samples: usize,
    pub field_scale: f64,
    pub antisymmetry: f64,
    pub x_periodicity: f64,
    pub t_periodicity: f64,
    pub dirichlet: f64,
    pub null_condition: f64,
}

impl SymmetryReport {
    pub fn worst(&self) -> f64 {
        [
            self.antisymmetry,
            self.x_periodicity,
            self.t_periodicity,
            self.dirichlet,
            self.null_condition,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
