//! Standing waves on a uniform magnetic background `u = B·x + ũ`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minimal_surface::{InitialCondition, ParametricSolution, SineSeries};
use crate::rational::{from_f64, ratio};
use crate::residual_check::{bi_residual, FieldSample, Source};
use crate::trig_algebra::TrigSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackgroundConfig {
    /// Background field `B`.
    pub field: f64,
    pub amplitude: f64,
    pub wavenumber: f64,
    pub bi_parameter: f64,
}

impl BackgroundConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bi_parameter > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "b must be positive, got {}",
                self.bi_parameter
            )));
        }
        if !(self.amplitude > 0.0 && self.wavenumber > 0.0) {
            return Err(Error::InvalidArgument("A and k must be positive".into()));
        }
        if !self.field.is_finite() {
            return Err(Error::InvalidArgument("B must be finite".into()));
        }
        Ok(())
    }

    pub fn eps(&self) -> f64 {
        self.amplitude * self.wavenumber / self.bi_parameter
    }

    /// `(B / (A k))²`.
    fn field_ratio_sq(&self) -> f64 {
        let r = self.field / (self.amplitude * self.wavenumber);
        r * r
    }
}

/// First correction for the seed `(A/2) s₁₁ + B·x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagneticFirstOrder {
    pub eps: f64,
    /// `c` in `ω²/k² = 1 − c ε²`, with the `1/4` seed coefficient.
    pub printed_coefficient: f64,
    /// Same with the `1/2` seed coefficient of the field-free recursion.
    pub consistent_coefficient: f64,
    pub omega_sq_printed: f64,
    pub omega_sq_consistent: f64,
    /// `u⁽¹⁾ = ε² [A/64 (s₁₃ + s₃₁) + B/(8k) s₂₀]`, graded at ε².
    #[serde(skip)]
    pub correction: TrigSeries,
}

pub fn magnetic_first_order(cfg: &BackgroundConfig) -> Result<MagneticFirstOrder> {
    cfg.validate()?;
    let eps = cfg.eps();
    let r2 = cfg.field_ratio_sq();
    let printed_coefficient = 0.25 + r2;
    let consistent_coefficient = 0.5 + r2;
    let exact =
        |v: f64| from_f64(v).ok_or_else(|| Error::InvalidArgument(format!("{v} is not finite")));
    let a = exact(cfg.amplitude)?;
    let b_over_k = exact(cfg.field / cfg.wavenumber)?;
    let correction = TrigSeries::s(1, 3)
        .add(&TrigSeries::s(3, 1))
        .scale(&(a * ratio(1, 64)))
        .add(&TrigSeries::s(2, 0).scale(&(b_over_k * ratio(1, 8))))
        .shift_eps(2);
    Ok(MagneticFirstOrder {
        eps,
        printed_coefficient,
        consistent_coefficient,
        omega_sq_printed: 1.0 - printed_coefficient * eps * eps,
        omega_sq_consistent: 1.0 - consistent_coefficient * eps * eps,
        correction,
    })
}

/// `u = A sin(kx) cos(ωt) + B·x + u⁽¹⁾` at a trial frequency, with exact derivatives.
fn first_order_sample(cfg: &BackgroundConfig, omega: f64, x: f64, t: f64) -> FieldSample {
    let (a, k, bf) = (cfg.amplitude, cfg.wavenumber, cfg.field);
    let e2 = cfg.eps() * cfg.eps();
    // (coefficient, n, m) for c sin(n k x) cos(m ω t)
    let modes = [
        (a, 1.0, 1.0),
        (e2 * a / 32.0, 1.0, 3.0),
        (e2 * a / 32.0, 3.0, 1.0),
        (e2 * bf / (4.0 * k), 2.0, 0.0),
    ];
    let mut s = FieldSample {
        x,
        t,
        u: bf * x,
        ux: Some(bf),
        ut: Some(0.0),
        uxx: Some(0.0),
        utt: Some(0.0),
        uxt: Some(0.0),
        source: Source::External,
    };
    let add = |slot: &mut Option<f64>, v: f64| *slot = slot.map(|s| s + v);
    for (c, n, m) in modes {
        let (sx, cx) = (n * k * x).sin_cos();
        let (st, ct) = (m * omega * t).sin_cos();
        let (kn, wm) = (n * k, m * omega);
        s.u += c * sx * ct;
        add(&mut s.ux, c * kn * cx * ct);
        add(&mut s.ut, -c * wm * sx * st);
        add(&mut s.uxx, -c * kn * kn * sx * ct);
        add(&mut s.utt, -c * wm * wm * sx * ct);
        add(&mut s.uxt, -c * kn * wm * cx * st);
    }
    s
}

/// Max |residual|/(A k²) of the first-order field at `ω²/k² = w2` over a
/// `grid × grid` set of phases.
pub fn first_order_residual(cfg: &BackgroundConfig, w2: f64, grid: usize) -> Result<f64> {
    cfg.validate()?;
    if !(w2 > 0.0) {
        return Err(Error::NegativeOmegaSquared {
            eps: cfg.eps(),
            value: w2,
        });
    }
    let k = cfg.wavenumber;
    let omega = k * w2.sqrt();
    let norm = cfg.amplitude * k * k;
    let mut worst: f64 = 0.0;
    for i in 0..grid {
        let x = 2.0 * PI * i as f64 / (grid as f64 * k);
        for j in 0..grid {
            let t = 2.0 * PI * j as f64 / (grid as f64 * omega);
            let s = first_order_sample(cfg, omega, x, t);
            worst = worst.max(bi_residual(&s, cfg.bi_parameter)?.abs() / norm);
        }
    }
    Ok(worst)
}

/// Frequency preferred by the equation itself at first order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionEstimate {
    pub eps: f64,
    /// `ω²/k²` minimizing the first-order residual.
    pub omega_sq: f64,
    /// `(1 − ω²/k²)/ε² − (B/(Ak))²`: compare with 1/4 and 1/2.
    pub seed_coefficient: f64,
    pub residual_at_estimate: f64,
    pub residual_printed: f64,
    pub residual_consistent: f64,
}

/// Golden-section search of the residual over `ω²/k²`.
pub fn estimate_dispersion(cfg: &BackgroundConfig, grid: usize) -> Result<DispersionEstimate> {
    let first = magnetic_first_order(cfg)?;
    let eps = first.eps;
    let e2 = eps * eps;
    let span = (1.0 + first.consistent_coefficient) * e2;
    let (mut lo, mut hi) = (1.0 - 2.0 * span, 1.0 + 0.5 * span);
    if lo <= 0.0 {
        return Err(Error::EpsilonOutOfRange { eps });
    }
    let f = |w2: f64| first_order_residual(cfg, w2, grid);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
    }
    let omega_sq = 0.5 * (lo + hi);
    Ok(DispersionEstimate {
        eps,
        omega_sq,
        seed_coefficient: (1.0 - omega_sq) / e2 - cfg.field_ratio_sq(),
        residual_at_estimate: f(omega_sq)?,
        residual_printed: f(first.omega_sq_printed)?,
        residual_consistent: f(first.omega_sq_consistent)?,
    })
}

/// `a(x) = B·x + ã(x)` with `ã`, `v0` sine series of half period `L`.
pub fn background_ic(
    field: f64,
    displacement: SineSeries,
    velocity: SineSeries,
    half_period: f64,
    bi_parameter: f64,
) -> Result<InitialCondition> {
    for s in [&displacement, &velocity] {
        if (s.half_period - half_period).abs() > 1e-12 * half_period && !s.terms.is_empty() {
            return Err(Error::SymmetryViolation(format!(
                "sine series half period {} differs from L = {half_period}",
                s.half_period
            )));
        }
    }
    InitialCondition::new(
        Arc::new(displacement),
        Arc::new(velocity),
        half_period,
        field,
        bi_parameter,
    )
}

/// `K / L` from the built solution.
pub fn period_ratio(ps: &ParametricSolution) -> f64 {
    ps.k() / ps.half_period()
}

/// Phase velocity `b / √(b² + B²)` along the background.
pub fn effective_metric_velocity(field: f64, bi_parameter: f64) -> Result<f64> {
    if !(bi_parameter > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "b must be positive, got {bi_parameter}"
        )));
    }
    if bi_parameter.is_infinite() {
        return Ok(1.0);
    }
    Ok(bi_parameter / (bi_parameter * bi_parameter + field * field).sqrt())
}

/// Exact coefficient `1/4 + (B/(Ak))²` when the inputs are representable.
pub fn printed_coefficient_exact(cfg: &BackgroundConfig) -> Option<BigRational> {
    let r = from_f64(cfg.field)? / (from_f64(cfg.amplitude)? * from_f64(cfg.wavenumber)?);
    Some(ratio(1, 4) + &r * &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindstedt::solve_order;
    use crate::minimal_surface::QuadratureSpec;

    fn cfg(field: f64) -> BackgroundConfig {
        BackgroundConfig {
            field,
            amplitude: 1.0,
            wavenumber: 1.0,
            bi_parameter: 20.0,
        }
    }

    #[test]
    fn zero_field_reduces_to_first_order_lindstedt() {
        let m = magnetic_first_order(&cfg(0.0)).unwrap();
        assert_eq!(m.correction, solve_order(1).unwrap().series().grade(2));
        assert_eq!(m.printed_coefficient, 0.25);
        assert_eq!(m.consistent_coefficient, 0.5);
        assert_eq!(printed_coefficient_exact(&cfg(0.0)).unwrap(), ratio(1, 4));
    }

    #[test]
    fn correction_has_even_harmonic() {
        let c = BackgroundConfig {
            field: 0.5,
            amplitude: 0.25,
            wavenumber: 2.0,
            bi_parameter: 10.0,
        };
        let m = magnetic_first_order(&c).unwrap();
        let s20 = TrigSeries::s(2, 0).scale(&ratio(1, 32)).shift_eps(2);
        let s13 = TrigSeries::s(1, 3)
            .add(&TrigSeries::s(3, 1))
            .scale(&ratio(1, 256))
            .shift_eps(2);
        assert_eq!(m.correction, s20.add(&s13));
    }

    #[test]
    fn large_field_limit() {
        let c = BackgroundConfig {
            field: 0.5,
            amplitude: 1e-3,
            wavenumber: 1.0,
            bi_parameter: 20.0,
        };
        let m = magnetic_first_order(&c).unwrap();
        let expect = 1.0 - 0.25 / (2.0 * 400.0);
        assert!((m.omega_sq_consistent.sqrt() - expect).abs() < 1e-5);
    }

    #[test]
    fn equation_prefers_the_half_coefficient() {
        let est = estimate_dispersion(&cfg(0.0), 32).unwrap();
        assert!((est.seed_coefficient - 0.5).abs() < 0.01, "{est:?}");
        assert!(est.residual_consistent < est.residual_printed);
        let est = estimate_dispersion(&cfg(0.3), 32).unwrap();
        assert!((est.seed_coefficient - 0.5).abs() < 0.01, "{est:?}");
    }

    #[test]
    fn background_only_period_ratio() {
        for (field, b) in [(0.5, 1.0), (2.0, 1.0), (0.0, 1.0), (1.0, 3.0)] {
            let ic =
                background_ic(field, SineSeries::zero(PI), SineSeries::zero(PI), PI, b).unwrap();
            assert_eq!(ic.a(1.5), 1.5 * field);
            assert_eq!(ic.a_prime(0.2), field);
            let ps = ParametricSolution::build(ic, QuadratureSpec::default()).unwrap();
            let r = period_ratio(&ps);
            assert!((r - (1.0 + field * field / (b * b)).sqrt()).abs() < 1e-12);
            assert!((r * effective_metric_velocity(field, b).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn velocity_values() {
        assert_eq!(effective_metric_velocity(0.0, 2.0).unwrap(), 1.0);
        assert!((effective_metric_velocity(2.0, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(effective_metric_velocity(1.0, 0.0).is_err());
    }

    #[test]
    fn background_with_fluctuations_keeps_symmetries() {
        let ic = background_ic(
            0.4,
            SineSeries::new(PI, vec![(1, 0.2)]),
            SineSeries::new(PI, vec![(1, 0.1)]),
            PI,
            1.0,
        )
        .unwrap();
        let ps = ParametricSolution::build(ic, QuadratureSpec::default()).unwrap();
        let rep = ps.validate_symmetries(10).unwrap();
        assert!(rep.worst() < 1e-10, "{rep:?}");
        let mismatched = background_ic(
            0.1,
            SineSeries::new(2.0, vec![(1, 0.1)]),
            SineSeries::zero(PI),
            PI,
            1.0,
        );
        assert!(matches!(mismatched, Err(Error::SymmetryViolation(_))));
    }
}
