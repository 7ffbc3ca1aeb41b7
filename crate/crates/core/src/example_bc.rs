//! Closed-form example with `v0 = 0` and `π_t(λ) = 1 + A + A cos λ`.
//!
//! Here `x(α,β) = (α+β)/2` and `t = (1+A)ξ + A cos x sin ξ` with
//! `ξ = (β−α)/2`, so the inversion reduces to the Kepler-like equation
//! `ξ = τ − ε sin ξ`, `τ = t/(1+A)`, `ε = A cos x/(1+A)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minimal_surface::{InitialCondition, Profile, SineSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleConfig {
    pub amplitude: f64,
}

impl ExampleConfig {
    pub fn new(amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "example amplitude must be positive, got {amplitude}"
            )));
        }
        Ok(ExampleConfig { amplitude })
    }

    /// Shape parameter `A/(2+A)`, in `(0, 1)`.
    pub fn shape(&self) -> f64 {
        self.amplitude / (2.0 + self.amplitude)
    }

    /// Closed-form `a(λ)`, odd with `a(λ + 2π) = −a(λ)`.
    pub fn a_closed(&self, lambda: f64) -> f64 {
        let a = self.amplitude;
        let b = self.shape();
        let s = (lambda / 2.0).sin();
        let root = (1.0 + b * lambda.cos()).sqrt();
        2.0 * (a * (1.0 + a / 2.0)).sqrt() * s * root
            + 2.0 * (1.0 + a) * ((2.0 * b).sqrt() * s / root).atan()
    }

    /// `a′(λ) = 2√A cos(λ/2) √(1 + A cos²(λ/2))`.
    pub fn a_prime(&self, lambda: f64) -> f64 {
        let a = self.amplitude;
        let c = (lambda / 2.0).cos();
        2.0 * a.sqrt() * c * (1.0 + a * c * c).sqrt()
    }

    /// Leading small-A form `4√A sin(λ/2)[1 + (A/2)(1 − sin²(λ/2)/6)]`.
    pub fn a_small(&self, lambda: f64) -> f64 {
        let a = self.amplitude;
        let s = (lambda / 2.0).sin();
        4.0 * a.sqrt() * s * (1.0 + a / 2.0 * (1.0 - s * s / 6.0))
    }

    pub fn pi_t(&self, lambda: f64) -> f64 {
        1.0 + self.amplitude + self.amplitude * lambda.cos()
    }

    /// `t` as a function of `ξ` at fixed `x`.
    pub fn t_of_xi(&self, x: f64, xi: f64) -> f64 {
        (1.0 + self.amplitude) * xi + self.amplitude * x.cos() * xi.sin()
    }

    /// `(τ, ε)` for the Kepler form.
    pub fn reduced(&self, x: f64, t: f64) -> (f64, f64) {
        let one_a = 1.0 + self.amplitude;
        (t / one_a, self.amplitude / one_a * x.cos())
    }

    /// `u = ½(a(x−ξ) + a(x+ξ))`.
    pub fn field(&self, x: f64, t: f64) -> Result<f64> {
        let (tau, eps) = self.reduced(x, t);
        let xi = xi_fixed_point(tau, eps, 1e-15)?.xi;
        Ok(0.5 * (self.a_closed(x - xi) + self.a_closed(x + xi)))
    }

    /// Initial data on the half period `2π`, where `a` is odd and `4π`-periodic
    /// and vanishes at both ends.
    pub fn initial_condition(&self) -> Result<InitialCondition> {
        InitialCondition::new(
            Arc::new(ExampleProfile(*self)),
            Arc::new(SineSeries::zero(2.0 * PI)),
            2.0 * PI,
            0.0,
            1.0,
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExampleProfile(pub ExampleConfig);

impl Profile for ExampleProfile {
    fn value(&self, x: f64) -> f64 {
        self.0.a_closed(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.0.a_prime(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub xi: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 10_000;

/// Iterate `ξ ← τ − ε sin ξ` from `ξ = τ` until `|Δξ| ≤ tol·max(1, |ξ|)`.
pub fn xi_fixed_point(tau: f64, eps: f64, tol: f64) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if !(eps.abs() < 1.0) {
        return Err(Error::EpsilonOutOfRange { eps });
    }
    let mut xi = tau;
    for i in 1..=MAX_ITERATIONS {
        let next = tau - eps * xi.sin();
        if (next - xi).abs() <= tol * next.abs().max(1.0) {
            return Ok(FixedPoint {
                xi: next,
                iterations: i,
            });
        }
        xi = next;
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
    })
}

/// Exact coefficients of `ξ − τ = Σ_{n≥1} ε^n Σ_j c_{nj} sin(jτ)`, from
/// Lagrange inversion: `c_n = ((−1)^n/n!) dⁿ⁻¹/dτⁿ⁻¹ sinⁿ τ`.
///
/// Entry `n−1` holds `(j, c_{nj})` with non-zero coefficients, ascending `j`.
pub fn xi_series_coefficients(order: usize) -> Vec<Vec<(u32, BigRational)>> {
    (1..=order).map(lagrange_term).collect()
}

fn lagrange_term(n: usize) -> Vec<(u32, BigRational)> {
    // sinⁿτ = (2i)^{−n} Σ_k C(n,k) (−1)^k e^{i(n−2k)τ}; pairing ±m after
    // n−1 derivatives leaves C_m m^{n−1} sin(mτ) / 2^{n−1}.
    let n_i = n as i64;
    let mut out = Vec::new();
    let mut fact = BigInt::one();
    for i in 2..=n_i {
        fact *= i;
    }
    let mut binom = BigInt::one();
    let mut by_m: std::collections::BTreeMap<i64, BigInt> = std::collections::BTreeMap::new();
    for k in 0..=n_i {
        let m = n_i - 2 * k;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        *by_m.entry(m).or_insert_with(BigInt::zero) += &binom * sign;
        binom = binom * (n_i - k) / (k + 1);
    }
    let two_pow = BigInt::one() << (n - 1);
    for (&m, c) in by_m.iter().filter(|(&m, _)| m > 0) {
        if c.is_zero() {
            continue;
        }
        let mut mpow = BigInt::one();
        for _ in 1..n {
            mpow *= m;
        }
        let sign = if n.is_multiple_of(2) {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let coeff = BigRational::new(sign * c * mpow, &two_pow * &fact);
        if !coeff.is_zero() {
            out.push((m as u32, coeff));
        }
    }
    out
}

/// Truncated series `τ + Σ_{n≤order} ε^n Σ_j c_{nj} sin(jτ)`.
pub fn xi_series(tau: f64, eps: f64, order: usize) -> f64 {
    let coeffs = xi_series_coefficients(order);
    let mut value = tau;
    let mut pow = 1.0;
    for terms in &coeffs {
        pow *= eps;
        for (j, c) in terms {
            value += pow * crate::rational::to_f64(c) * (*j as f64 * tau).sin();
        }
    }
    value
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalEpsilon {
    /// Largest ε for which `x = ε cosh x` has a real root.
    pub eps_c: f64,
    /// Tangency point, the root of `x tanh x = 1`.
    pub x_c: f64,
    /// `1/arcsinh(ε_c)`, reported alongside `x_c`.
    pub inverse_arcsinh: f64,
}

pub fn critical_epsilon() -> CriticalEpsilon {
    let mut x: f64 = 1.2;
    for _ in 0..100 {
        let f = x * x.tanh() - 1.0;
        let df = x.tanh() + x / x.cosh().powi(2);
        let step = f / df;
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    let eps_c = x / x.cosh();
    CriticalEpsilon {
        eps_c,
        x_c: x,
        inverse_arcsinh: 1.0 / eps_c.asinh(),
    }
}

/// Number of sign changes of `x − ε cosh x` on `[0, 10]`.
pub fn real_root_count(eps: f64) -> usize {
    let f = |x: f64| x - eps * x.cosh();
    let n = 10_000;
    let mut count = 0;
    let mut prev = f(0.0);
    for i in 1..=n {
        let cur = f(10.0 * i as f64 / n as f64);
        if prev.signum() != cur.signum() {
            count += 1;
        }
        prev = cur;
    }
    count
}
