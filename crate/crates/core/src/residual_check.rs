//! Pointwise Born-Infeld residual
//!
//! ```text
//! R = u_xx − u_tt − b⁻² (u_t² u_xx + u_x² u_tt − 2 u_x u_t u_xt)
//! ```
//!
//! plus finite-difference derivatives and grid scans shared by every solver.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Where a sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Lindstedt,
    Parametric,
    Example,
    FiniteDifference,
    External,
}

/// Field value and derivatives at one space-time point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub ux: Option<f64>,
    pub ut: Option<f64>,
    pub uxx: Option<f64>,
    pub utt: Option<f64>,
    pub uxt: Option<f64>,
    pub source: Source,
}

impl FieldSample {
    fn first(&self) -> Result<(f64, f64)> {
        match (self.ux, self.ut) {
            (Some(ux), Some(ut)) => Ok((ux, ut)),
            _ => Err(Error::MissingDerivatives("u_x and u_t")),
        }
    }

    fn second(&self) -> Result<(f64, f64, f64)> {
        match (self.uxx, self.utt, self.uxt) {
            (Some(a), Some(b), Some(c)) => Ok((a, b, c)),
            _ => Err(Error::MissingDerivatives("u_xx, u_tt and u_xt")),
        }
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "b must be positive (or infinite), got {b}"
        )))
    }
}

/// Residual of the scalar Born-Infeld equation. `b = ∞` gives the wave operator.
pub fn bi_residual(sample: &FieldSample, b: f64) -> Result<f64> {
    check_b(b)?;
    let (ux, ut) = sample.first()?;
    let (uxx, utt, uxt) = sample.second()?;
    let linear = uxx - utt;
    if b.is_infinite() {
        return Ok(linear);
    }
    Ok(linear - (ut * ut * uxx + ux * ux * utt - 2.0 * ux * ut * uxt) / (b * b))
}

/// `1 + (u_x² − u_t²)/b²`; the equation is hyperbolic where this is positive.
pub fn hyperbolicity_margin(sample: &FieldSample, b: f64) -> Result<f64> {
    check_b(b)?;
    let (ux, ut) = sample.first()?;
    if b.is_infinite() {
        return Ok(1.0);
    }
    Ok(1.0 + (ux * ux - ut * ut) / (b * b))
}

/// Second-order central differences of `sampler` with steps `hx`, `ht`.
pub fn fd_derivatives<F>(sampler: F, x: f64, t: f64, hx: f64, ht: f64) -> Result<FieldSample>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if !(hx > 0.0 && ht > 0.0) {
        return Err(Error::InvalidArgument(
            "finite-difference steps must be positive".into(),
        ));
    }
    let u = sampler(x, t)?;
    let xp = sampler(x + hx, t)?;
    let xm = sampler(x - hx, t)?;
    let tp = sampler(x, t + ht)?;
    let tm = sampler(x, t - ht)?;
    let pp = sampler(x + hx, t + ht)?;
    let pm = sampler(x + hx, t - ht)?;
    let mp = sampler(x - hx, t + ht)?;
    let mm = sampler(x - hx, t - ht)?;
    Ok(FieldSample {
        x,
        t,
        u,
        ux: Some((xp - xm) / (2.0 * hx)),
        ut: Some((tp - tm) / (2.0 * ht)),
        uxx: Some((xp - 2.0 * u + xm) / (hx * hx)),
        utt: Some((tp - 2.0 * u + tm) / (ht * ht)),
        uxt: Some((pp - pm - mp + mm) / (4.0 * hx * ht)),
        source: Source::FiniteDifference,
    })
}

/// Inclusive uniform grid `[x0, x1] × [t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let step = |a: f64, b: f64, n: usize, i: usize| {
            if n <= 1 {
                a
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.nt);
        for i in 0..self.nx {
            for j in 0..self.nt {
                out.push((
                    step(self.x0, self.x1, self.nx, i),
                    step(self.t0, self.t1, self.nt, j),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    pub min_hyperbolicity_margin: f64,
    pub grid: GridSpec,
    pub fd_steps: Option<(f64, f64)>,
    /// The raw residual is divided by this before taking the maximum.
    pub normalization: f64,
}

/// Scan `grid`, reporting the largest normalized residual and smallest margin.
pub fn scan<F>(
    grid: GridSpec,
    b: f64,
    normalization: f64,
    fd_steps: Option<(f64, f64)>,
    sampler: F,
) -> Result<ResidualReport>
where
    F: Fn(f64, f64) -> Result<FieldSample> + Sync,
{
    if !(normalization > 0.0) {
        return Err(Error::InvalidArgument(
            "normalization must be positive".into(),
        ));
    }
    let per_point: Vec<Result<(f64, f64)>> = grid
        .points()
        .into_par_iter()
        .map(|(x, t)| {
            let s = sampler(x, t)?;
            Ok((
                bi_residual(&s, b)?.abs() / normalization,
                hyperbolicity_margin(&s, b)?,
            ))
        })
        .collect();
    let mut max_abs_residual: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    for r in per_point {
        let (res, margin) = r?;
        max_abs_residual = max_abs_residual.max(res);
        min_margin = min_margin.min(margin);
    }
    Ok(ResidualReport {
        max_abs_residual,
        min_hyperbolicity_margin: min_margin,
        grid,
        fd_steps,
        normalization,
    })
}
