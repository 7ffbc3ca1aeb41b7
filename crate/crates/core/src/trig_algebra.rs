//! Exact algebra on finite trigonometric series in the two phases `kx` and `ωt`.
//!
//! A [`TrigSeries`] is a sum of terms
//!
//! ```text
//! c · ε^e · k^p · ω^q · X(n·kx) · T(m·ωt),      X, T ∈ {sin, cos}
//! ```
//!
//! with exact rational `c`. The powers of `k` and `ω` are formal scale
//! markers produced by differentiation; `ω²` can later be replaced by the
//! graded dispersion series `k² Σ ξ_M ε^{2M}`. Terms are kept in a
//! `BTreeMap`, so equal functions have identical canonical representations.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::rational_to_json_pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    fn eval(self, phase: f64) -> f64 {
        match self {
            Trig::Sin => phase.sin(),
            Trig::Cos => phase.cos(),
        }
    }
}

/// Which trig function multiplies each phase: `(x-factor, t-factor)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    SinCos,
    CosSin,
    SinSin,
    CosCos,
}

impl Parity {
    pub fn from_parts(x: Trig, t: Trig) -> Self {
        match (x, t) {
            (Trig::Sin, Trig::Cos) => Parity::SinCos,
            (Trig::Cos, Trig::Sin) => Parity::CosSin,
            (Trig::Sin, Trig::Sin) => Parity::SinSin,
            (Trig::Cos, Trig::Cos) => Parity::CosCos,
        }
    }

    pub fn x(self) -> Trig {
        match self {
            Parity::SinCos | Parity::SinSin => Trig::Sin,
            Parity::CosSin | Parity::CosCos => Trig::Cos,
        }
    }

    pub fn t(self) -> Trig {
        match self {
            Parity::SinCos | Parity::CosCos => Trig::Cos,
            Parity::CosSin | Parity::SinSin => Trig::Sin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    T,
}

/// Lattice position of a term, including its ε grade and formal scale markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub eps_power: u32,
    pub k_power: u32,
    pub omega_power: u32,
    pub n: u32,
    pub m: u32,
    pub parity: Parity,
}

impl TermKey {
    pub fn mode(n: u32, m: u32, parity: Parity) -> Self {
        TermKey {
            eps_power: 0,
            k_power: 0,
            omega_power: 0,
            n,
            m,
            parity,
        }
    }

    pub fn with_eps(mut self, eps_power: u32) -> Self {
        self.eps_power = eps_power;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub key: TermKey,
    pub coeff: BigRational,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigSeries {
    terms: BTreeMap<TermKey, BigRational>,
}

/// One harmonic factor `±trig(n θ)` after folding negative harmonics.
/// `None` means the factor vanishes identically (`sin 0`).
fn fold(sign: i64, n: i64, trig: Trig) -> Option<(i64, u32, Trig)> {
    match (n.signum(), trig) {
        (0, Trig::Sin) => None,
        (0, Trig::Cos) => Some((sign, 0, Trig::Cos)),
        (-1, Trig::Sin) => Some((-sign, n.unsigned_abs() as u32, Trig::Sin)),
        (_, trig) => Some((sign, n.unsigned_abs() as u32, trig)),
    }
}

/// Product-to-sum for one phase. Each entry is (sign, harmonic, trig), all
/// carrying an overall factor ½.
fn product_to_sum(a: (u32, Trig), b: (u32, Trig)) -> [(i64, i64, Trig); 2] {
    let (n1, n2) = (a.0 as i64, b.0 as i64);
    match (a.1, b.1) {
        (Trig::Sin, Trig::Sin) => [(1, n1 - n2, Trig::Cos), (-1, n1 + n2, Trig::Cos)],
        (Trig::Cos, Trig::Cos) => [(1, n1 - n2, Trig::Cos), (1, n1 + n2, Trig::Cos)],
        (Trig::Sin, Trig::Cos) => [(1, n1 + n2, Trig::Sin), (1, n1 - n2, Trig::Sin)],
        (Trig::Cos, Trig::Sin) => [(1, n1 + n2, Trig::Sin), (-1, n1 - n2, Trig::Sin)],
    }
}

impl TrigSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(TermKey::mode(0, 0, Parity::CosCos), BigRational::one())
    }

    /// A single term, canonicalized (a `sin 0` factor gives the zero series).
    pub fn term(key: TermKey, coeff: BigRational) -> Self {
        let mut s = Self::zero();
        s.add_term(key, coeff);
        s
    }

    /// `s_{nm} = sin(n kx + m ωt) + sin(n kx − m ωt) = 2 sin(n kx) cos(m ωt)`.
    pub fn s(n: u32, m: u32) -> Self {
        Self::term(
            TermKey::mode(n, m, Parity::SinCos),
            BigRational::from_integer(2.into()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &TermKey) -> BigRational {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &BigRational)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> Vec<TrigTerm> {
        self.terms
            .iter()
            .map(|(k, c)| TrigTerm {
                key: *k,
                coeff: c.clone(),
            })
            .collect()
    }

    /// Add `coeff` at `key`, folding `sin 0` to nothing and dropping zeros.
    pub fn add_term(&mut self, key: TermKey, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        if (key.n == 0 && key.parity.x() == Trig::Sin)
            || (key.m == 0 && key.parity.t() == Trig::Sin)
        {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, -c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, c * factor)).collect(),
        }
    }

    /// Multiply by `ε^power`.
    pub fn shift_eps(&self, power: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    let mut k = *k;
                    k.eps_power += power;
                    (k, c.clone())
                })
                .collect(),
        }
    }

    /// Drop every term with `ε` power above `max_eps_power`.
    pub fn truncate(&self, max_eps_power: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.eps_power <= max_eps_power)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn max_eps_power(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.eps_power).max()
    }

    /// Collect the part of the series at a single ε grade.
    pub fn grade(&self, eps_power: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.eps_power == eps_power)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Self {
        self.multiply_truncated(other, u32::MAX)
    }

    /// Exact product, skipping pairs whose combined ε power exceeds `max_eps_power`.
    pub fn multiply_truncated(&self, other: &Self, max_eps_power: u32) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        let quarter = &half * &half;
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let eps_power = ka.eps_power.saturating_add(kb.eps_power);
                if eps_power > max_eps_power {
                    continue;
                }
                let base = ca * cb * &quarter;
                let xs = product_to_sum((ka.n, ka.parity.x()), (kb.n, kb.parity.x()));
                let ts = product_to_sum((ka.m, ka.parity.t()), (kb.m, kb.parity.t()));
                for &(sx, nx, tx) in &xs {
                    let Some((sx, nx, tx)) = fold(sx, nx, tx) else {
                        continue;
                    };
                    for &(st, mt, tt) in &ts {
                        let Some((st, mt, tt)) = fold(st, mt, tt) else {
                            continue;
                        };
                        let key = TermKey {
                            eps_power,
                            k_power: ka.k_power + kb.k_power,
                            omega_power: ka.omega_power + kb.omega_power,
                            n: nx,
                            m: mt,
                            parity: Parity::from_parts(tx, tt),
                        };
                        let c = if sx * st > 0 {
                            base.clone()
                        } else {
                            -base.clone()
                        };
                        out.add_term(key, c);
                    }
                }
            }
        }
        out
    }

    /// Exact partial derivative. The chain-rule factor `k` or `ω` is recorded
    /// as a scale marker on the term key.
    pub fn differentiate(&self, axis: Axis) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let mut key = *k;
            let (harmonic, x, t) = match axis {
                Axis::X => (k.n, k.parity.x(), k.parity.t()),
                Axis::T => (k.m, k.parity.t(), k.parity.x()),
            };
            if harmonic == 0 {
                continue;
            }
            let (new_trig, sign) = match x {
                Trig::Sin => (Trig::Cos, 1),
                Trig::Cos => (Trig::Sin, -1),
            };
            let factor = BigRational::from_integer((sign * harmonic as i64).into());
            match axis {
                Axis::X => {
                    key.k_power += 1;
                    key.parity = Parity::from_parts(new_trig, t);
                }
                Axis::T => {
                    key.omega_power += 1;
                    key.parity = Parity::from_parts(t, new_trig);
                }
            }
            out.add_term(key, c * factor);
        }
        out
    }

    /// Replace `ω^{2p}` by `k^{2p} (Σ ξ_M ε^{2M})^p`, truncating at `max_eps_power`.
    pub fn substitute_omega_sq(&self, xi: &[BigRational], max_eps_power: u32) -> Result<Self> {
        let mut dispersion = Self::zero();
        for (m, x) in xi.iter().enumerate() {
            let mut key = TermKey::mode(0, 0, Parity::CosCos).with_eps(2 * m as u32);
            key.k_power = 2;
            dispersion.add_term(key, x.clone());
        }
        let mut powers = vec![Self::one()];
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.omega_power % 2 != 0 {
                return Err(Error::OddOmegaPower);
            }
            let p = (k.omega_power / 2) as usize;
            while powers.len() <= p {
                let next = powers
                    .last()
                    .expect("non-empty")
                    .multiply_truncated(&dispersion, max_eps_power);
                powers.push(next);
            }
            let mut key = *k;
            key.omega_power = 0;
            let single = Self::term(key, c.clone());
            out = out.add(&single.multiply_truncated(&powers[p], max_eps_power));
        }
        Ok(out)
    }

    /// Divide by `k^2`; every term must carry at least two powers of `k`.
    pub fn divide_k_sq(&self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k.k_power < 2 {
                return Err(Error::InvalidArgument(
                    "term without a k^2 factor in divide_k_sq".into(),
                ));
            }
            let mut key = *k;
            key.k_power -= 2;
            terms.insert(key, c.clone());
        }
        Ok(Self { terms })
    }

    /// Floating-point evaluation at `(x, t)` with the given scales.
    pub fn eval(&self, x: f64, t: f64, k: f64, omega: f64, eps: f64) -> f64 {
        self.terms
            .iter()
            .map(|(key, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                c * eps.powi(key.eps_power as i32)
                    * k.powi(key.k_power as i32)
                    * omega.powi(key.omega_power as i32)
                    * key.parity.x().eval(key.n as f64 * k * x)
                    * key.parity.t().eval(key.m as f64 * omega * t)
            })
            .sum()
    }

    /// JSON form used by `--dump-series`:
    /// `[{n, m, parity, num, den, epsPower}, ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let (num, den) = rational_to_json_pair(c);
                serde_json::json!({
                    "n": k.n,
                    "m": k.m,
                    "parity": k.parity,
                    "num": num,
                    "den": den,
                    "epsPower": k.eps_power,
                })
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    /// Largest absolute coefficient, used in diagnostics.
    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for TrigSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let trig = |t: Trig| if t == Trig::Sin { "sin" } else { "cos" };
            write!(
                f,
                "({}) e^{} k^{} w^{} {}({}kx){}({}wt)",
                c,
                k.eps_power,
                k.k_power,
                k.omega_power,
                trig(k.parity.x()),
                k.n,
                trig(k.parity.t()),
                k.m
            )?;
        }
        Ok(())
    }
}

/// Left-hand side of `u_xx − u_tt − b^{-2}(u_t² u_xx + u_x² u_tt − 2 u_x u_t u_xt)`
/// for an ε-graded series, in units of `A k²`.
///
/// `u` is the field divided by the amplitude `A`, so the nonlinear prefactor
/// `A²/b²` becomes `ε²/k²`. `ω²` is replaced by `k² Σ ξ_M ε^{2M}` and the
/// result is truncated at `ε^{2·max_order}`.
pub fn bi_operator_symbolic(
    u: &TrigSeries,
    xi: &[BigRational],
    max_order: i64,
) -> Result<TrigSeries> {
    bi_operator_symbolic_scaled(u, xi, max_order, &BigRational::one())
}

/// As [`bi_operator_symbolic`], for a field measured in units where the
/// nonlinear prefactor is `ε² / (k² · amplitude_sq)`; the two-mode seed uses
/// `amplitude_sq = A₁² + 9A₃²` with the field in physical units.
pub fn bi_operator_symbolic_scaled(
    u: &TrigSeries,
    xi: &[BigRational],
    max_order: i64,
    amplitude_sq: &BigRational,
) -> Result<TrigSeries> {
    if max_order < 0 {
        return Err(Error::InvalidArgument(format!(
            "max_order must be non-negative, got {max_order}"
        )));
    }
    if amplitude_sq.is_zero() {
        return Err(Error::InvalidArgument(
            "amplitude_sq must be non-zero".into(),
        ));
    }
    let cap = 2 * max_order as u32;
    let u = u.truncate(cap);
    let ux = u.differentiate(Axis::X);
    let ut = u.differentiate(Axis::T);
    let uxx = ux.differentiate(Axis::X);
    let utt = ut.differentiate(Axis::T);
    let uxt = ux.differentiate(Axis::T);

    let linear = uxx.sub(&utt);

    // The nonlinear bracket is multiplied by ε², so it is needed only to ε^{cap-2}.
    let inner = cap.saturating_sub(2);
    let nonlinear = if cap >= 2 {
        let a = ut
            .multiply_truncated(&ut, inner)
            .multiply_truncated(&uxx, inner);
        let b = ux
            .multiply_truncated(&ux, inner)
            .multiply_truncated(&utt, inner);
        let c = ux
            .multiply_truncated(&ut, inner)
            .multiply_truncated(&uxt, inner);
        let two = BigRational::from_integer(2.into());
        a.add(&b).sub(&c.scale(&two))
    } else {
        TrigSeries::zero()
    };
    // −b^{-2}(...) with A²/b² = ε²/(k² amplitude_sq): shift ε by 2, drop k².
    let nonlinear = nonlinear
        .shift_eps(2)
        .divide_k_sq()?
        .scale(&(-amplitude_sq.recip()));

    let lhs = linear.add(&nonlinear);
    let lhs = lhs.substitute_omega_sq(xi, cap)?;
    lhs.divide_k_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sc(n: u32, m: u32, c: BigRational) -> TrigSeries {
        TrigSeries::term(TermKey::mode(n, m, Parity::SinCos), c)
    }

    #[test]
    fn multiplicative_identity() {
        let s = sc(1, 1, q(1, 1));
        assert_eq!(s.multiply(&TrigSeries::one()), s);
    }

    #[test]
    fn triple_sine_product_matches_identity() {
        // 4 sin a sin b sin c in the x phase with a = kx, b = 2kx, c = 4kx, t phase trivial.
        let sx = |n: u32| TrigSeries::term(TermKey::mode(n, 0, Parity::SinCos), q(1, 1));
        let lhs = sx(1).multiply(&sx(2)).multiply(&sx(4)).scale(&q(4, 1));
        // −sin(a−b−c) + sin(a+b−c) + sin(a−b+c) − sin(a+b+c)
        // = −sin(−5) + sin(−1) + sin(3) − sin(7) = sin 5 − sin 1 + sin 3 − sin 7
        let mut rhs = TrigSeries::zero();
        for (n, c) in [(5, 1), (1, -1), (3, 1), (7, -1)] {
            rhs.add_term(TermKey::mode(n, 0, Parity::SinCos), q(c, 1));
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn square_of_seed_has_four_terms_and_matches_sampling() {
        let s = sc(1, 1, q(1, 1));
        let sq = s.multiply(&s);
        assert_eq!(sq.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..16 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let t: f64 = rng.gen_range(-3.0..3.0);
            let direct = (x.sin() * t.cos()).powi(2);
            let expected = 0.25 * (1.0 - (2.0 * x).cos()) * (1.0 + (2.0 * t).cos());
            assert!((direct - expected).abs() < 1e-14);
            assert!((sq.eval(x, t, 1.0, 1.0, 0.0) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn single_mode_derivatives() {
        let s = sc(1, 1, q(1, 1));
        let dx = s.differentiate(Axis::X);
        let mut key = TermKey::mode(1, 1, Parity::CosCos);
        key.k_power = 1;
        assert_eq!(dx, TrigSeries::term(key, q(1, 1)));
        let dt = s.differentiate(Axis::T);
        let mut key = TermKey::mode(1, 1, Parity::SinSin);
        key.omega_power = 1;
        assert_eq!(dt, TrigSeries::term(key, q(-1, 1)));
    }

    #[test]
    fn wave_operator_on_s_nm() {
        for (n, m) in [(1u32, 3u32), (3, 1), (5, 7), (2, 0)] {
            let s = TrigSeries::s(n, m);
            let lhs = s
                .differentiate(Axis::X)
                .differentiate(Axis::X)
                .sub(&s.differentiate(Axis::T).differentiate(Axis::T));
            // (m²ω² − n²k²) s_nm
            let mut rhs = TrigSeries::zero();
            let mut kw = TermKey::mode(n, m, Parity::SinCos);
            kw.omega_power = 2;
            rhs.add_term(kw, q(2 * (m * m) as i64, 1));
            let mut kk = TermKey::mode(n, m, Parity::SinCos);
            kk.k_power = 2;
            rhs.add_term(kk, q(-2 * (n * n) as i64, 1));
            if m == 0 {
                rhs = TrigSeries::term(kk, q(-2 * (n * n) as i64, 1));
            }
            assert_eq!(lhs, rhs, "n={n} m={m}");
        }
    }

    #[test]
    fn seed_residual_matches_first_order_expression() {
        // u/A = s11/2 with ω = k: residual = −ε²/8 (s13 − s31 − 2 s11).
        let u = TrigSeries::s(1, 1).scale(&q(1, 2));
        let r = bi_operator_symbolic(&u, &[q(1, 1)], 1).unwrap();
        let expected = TrigSeries::s(1, 3)
            .sub(&TrigSeries::s(3, 1))
            .sub(&TrigSeries::s(1, 1).scale(&q(2, 1)))
            .scale(&q(-1, 8))
            .shift_eps(2);
        assert_eq!(r, expected);
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let r = bi_operator_symbolic(&TrigSeries::zero(), &[q(1, 1)], 3).unwrap();
        assert!(r.is_zero());
        assert!(bi_operator_symbolic(&TrigSeries::zero(), &[q(1, 1)], -1).is_err());
    }

    #[test]
    fn negative_harmonics_fold() {
        let a = TrigSeries::term(TermKey::mode(1, 0, Parity::SinCos), q(1, 1));
        let b = TrigSeries::term(TermKey::mode(3, 0, Parity::CosCos), q(1, 1));
        // sin x cos 3x = ½(sin 4x + sin(−2x)) = ½ sin 4x − ½ sin 2x
        let p = a.multiply(&b);
        assert_eq!(p.coeff(&TermKey::mode(4, 0, Parity::SinCos)), q(1, 2));
        assert_eq!(p.coeff(&TermKey::mode(2, 0, Parity::SinCos)), q(-1, 2));
    }

    #[test]
    fn json_dump_shape() {
        let j = TrigSeries::s(1, 3).shift_eps(2).to_json();
        assert_eq!(
            j,
            serde_json::json!([{"n":1,"m":3,"parity":"sin_cos","num":2,"den":1,"epsPower":2}])
        );
    }
}
