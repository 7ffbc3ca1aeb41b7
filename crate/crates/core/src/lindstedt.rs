//! Poincaré–Lindstedt series for the standing wave seeded by `A sin(kx) cos(ωt)`.
//!
//! The N-th order solution is
//!
//! ```text
//! u(x,t) = A Σ_{M≤N} Σ_{ν,μ≤M} α_{Mνμ} sin((2ν+1)kx) cos((2μ+1)ω_N t) ε^{2M},
//! ω_N² = k² Σ_{M≤N} ξ_M ε^{2M},            ε = Ak/b,
//! ```
//!
//! with `α_{000} = ξ_0 = 1` and `α_{Mνν} = 0` for `M ≥ 1`. The coefficients
//! are exact rationals obtained order by order from the Kronecker-kernel
//! recursion: the off-diagonal lattice points fix `α_{Nνμ}`, the seed point
//! `(0,0)` fixes `ξ_N`, and the remaining diagonal points must vanish on
//! their own.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{from_f64, ratio, rational_json, rational_to_json_pair, to_f64};
use crate::residual_check::{FieldSample, Source};
use crate::trig_algebra::{Parity, TermKey, TrigSeries};

/// The six signed Kronecker kernels of the recursion. `Q*` act on the
/// spatial harmonics, `P*` on the temporal ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Q1,
    Q2,
    Q3,
    P1,
    P2,
    P3,
}

impl Kernel {
    pub const ALL: [Kernel; 6] = [
        Kernel::Q1,
        Kernel::Q2,
        Kernel::Q3,
        Kernel::P1,
        Kernel::P2,
        Kernel::P3,
    ];
}

/// Harmonic indices `(ν, ν′, ν″, ν̃)` (or the μ analogues).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelArgs {
    pub target: u32,
    pub first: u32,
    pub second: u32,
    pub tilde: u32,
}

impl KernelArgs {
    pub fn new(target: u32, first: u32, second: u32, tilde: u32) -> Self {
        KernelArgs {
            target,
            first,
            second,
            tilde,
        }
    }
}

/// `(sign, c, a, b, d)` encodes `sign · δ^{tilde}_{c + a·target + b·first + d·second}`.
type Delta = (i8, i8, i8, i8, i8);

const Q1: [Delta; 8] = [
    (1, -2, -1, -1, -1),
    (-1, -1, 1, -1, -1),
    (-1, -1, -1, 1, -1),
    (1, 0, 1, 1, -1),
    (-1, -1, -1, -1, 1),
    (1, 0, 1, -1, 1),
    (1, 0, -1, 1, 1),
    (-1, 1, 1, 1, 1),
];

const Q2: [Delta; 8] = [
    (-1, -2, -1, -1, -1),
    (1, -1, 1, -1, -1),
    (-1, -1, -1, 1, -1),
    (1, 0, 1, 1, -1),
    (-1, -1, -1, -1, 1),
    (1, 0, 1, -1, 1),
    (-1, 0, -1, 1, 1),
    (1, 1, 1, 1, 1),
];

const Q3: [Delta; 8] = [
    (1, -1, 1, -1, -1),
    (-1, 0, 1, 1, -1),
    (1, 0, 1, -1, 1),
    (-1, 1, 1, 1, 1),
    (1, 0, -1, 1, 1),
    (-1, -1, -1, -1, 1),
    (1, -1, -1, 1, -1),
    (-1, -2, -1, -1, -1),
];

const P1: [Delta; 8] = [
    (-1, -2, -1, -1, -1),
    (-1, -1, 1, -1, -1),
    (1, -1, -1, 1, -1),
    (1, 0, 1, 1, -1),
    (1, -1, -1, -1, 1),
    (1, 0, 1, -1, 1),
    (-1, 0, -1, 1, 1),
    (-1, 1, 1, 1, 1),
];

// First slot is δ_{−1+μ−μ′−μ″}: the expansion of 4 cos a cos b cos c has no
// −2 offset with a positive target coefficient.
const P2: [Delta; 8] = [
    (1, -1, 1, -1, -1),
    (1, 0, 1, 1, -1),
    (1, 0, 1, -1, 1),
    (1, 1, 1, 1, 1),
    (1, 0, -1, 1, 1),
    (1, -1, -1, -1, 1),
    (1, -1, -1, 1, -1),
    (1, -2, -1, -1, -1),
];

const P3: [Delta; 8] = [
    (-1, -2, -1, -1, -1),
    (-1, -1, 1, -1, -1),
    (1, -1, -1, 1, -1),
    (1, 0, 1, 1, -1),
    (-1, -1, -1, -1, 1),
    (-1, 0, 1, -1, 1),
    (1, 0, -1, 1, 1),
    (1, 1, 1, 1, 1),
];

fn deltas(which: Kernel) -> &'static [Delta; 8] {
    match which {
        Kernel::Q1 => &Q1,
        Kernel::Q2 => &Q2,
        Kernel::Q3 => &Q3,
        Kernel::P1 => &P1,
        Kernel::P2 => &P2,
        Kernel::P3 => &P3,
    }
}

/// Signed sum of Kronecker deltas; the value lies in `-4..=4`.
pub fn kernel(which: Kernel, args: KernelArgs) -> i32 {
    let (t, f, s, tilde) = (
        args.target as i64,
        args.first as i64,
        args.second as i64,
        args.tilde as i64,
    );
    deltas(which)
        .iter()
        .filter(|&&(_, c, a, b, d)| tilde == c as i64 + a as i64 * t + b as i64 * f + d as i64 * s)
        .map(|&(sign, ..)| sign as i32)
        .sum()
}

/// Physical scales of a solution: amplitude `A` (vector-potential units) and
/// wave number `k`. The Born-Infeld parameter follows from `b = A k / ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub amplitude: f64,
    pub wavenumber: f64,
}

impl Default for Scales {
    fn default() -> Self {
        Scales {
            amplitude: 1.0,
            wavenumber: 1.0,
        }
    }
}

impl Scales {
    pub fn bi_parameter(&self, eps: f64) -> f64 {
        self.amplitude * self.wavenumber / eps
    }
}

/// Coefficients `α_{Mνμ}` for a single order `M`, row-major in `(ν, μ)`.
#[derive(Debug, Clone, PartialEq)]
struct OrderTable {
    size: usize,
    values: Vec<BigRational>,
}

impl OrderTable {
    fn zeros(order: usize) -> Self {
        let size = order + 1;
        OrderTable {
            size,
            values: vec![BigRational::zero(); size * size],
        }
    }

    fn get(&self, nu: usize, mu: usize) -> Option<&BigRational> {
        (nu < self.size && mu < self.size).then(|| &self.values[nu * self.size + mu])
    }

    fn set(&mut self, nu: usize, mu: usize, v: BigRational) {
        self.values[nu * self.size + mu] = v;
    }

    /// Non-zero entries as integer numerators over a common denominator.
    fn scaled(&self) -> ScaledBlock {
        let den = self
            .values
            .iter()
            .filter(|v| !v.is_zero())
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let entries = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| {
                let num = v.numer() * (&den / v.denom());
                (i / self.size, i % self.size, num)
            })
            .collect();
        (den, entries)
    }
}

/// Exact Poincaré–Lindstedt solution through order `N`.
#[derive(Debug, Clone)]
pub struct LindstedtSolution {
    order: usize,
    alpha: Vec<OrderTable>,
    xi: Vec<BigRational>,
    scales: Scales,
    eps_guard: bool,
    // Float copy of the non-zero α: (M, n = 2ν+1, m = 2μ+1, α).
    alpha_f64: Vec<(usize, f64, f64, f64)>,
    xi_f64: Vec<f64>,
}

/// Nonzero kernel values for one source triple, per target index.
type Support = Vec<(usize, i64, i64, i64)>;

fn supports(kernels: [Kernel; 3], max_source: usize, max_target: usize) -> Vec<Support> {
    let dim = max_source + 1;
    let mut out = vec![Vec::new(); dim * dim * dim];
    for first in 0..dim {
        for second in 0..dim {
            for tilde in 0..dim {
                let list = &mut out[(first * dim + second) * dim + tilde];
                for target in 0..=max_target {
                    let args =
                        KernelArgs::new(target as u32, first as u32, second as u32, tilde as u32);
                    let v = kernels.map(|k| kernel(k, args) as i64);
                    if v != [0, 0, 0] {
                        list.push((target, v[0], v[1], v[2]));
                    }
                }
            }
        }
    }
    out
}

/// Common denominator and integer numerators `(ν, μ, n)` of one order.
type ScaledBlock = (BigInt, Vec<(usize, usize, BigInt)>);

struct Recursion {
    max_order: usize,
    x_support: Vec<Support>,
    t_support: Vec<Support>,
    scaled: Vec<ScaledBlock>,
    // contraction[S] holds Σ over triples of total order S, grid (S+2)².
    contraction: Vec<Vec<BigRational>>,
}

impl Recursion {
    fn new(max_order: usize) -> Self {
        let src = max_order.saturating_sub(1);
        Recursion {
            max_order,
            x_support: supports([Kernel::Q1, Kernel::Q2, Kernel::Q3], src, max_order),
            t_support: supports([Kernel::P1, Kernel::P2, Kernel::P3], src, max_order),
            scaled: Vec::new(),
            contraction: Vec::new(),
        }
    }

    fn support<'a>(
        &self,
        table: &'a [Support],
        first: usize,
        second: usize,
        tilde: usize,
    ) -> &'a Support {
        let dim = self.max_order.max(1);
        &table[(first * dim + second) * dim + tilde]
    }

    /// Trilinear kernel sum over all `(M̃, M′, M″)` with `M̃ + M′ + M″ = total`.
    fn contract(&self, total: usize) -> Vec<BigRational> {
        let side = total + 2;
        let splits: Vec<(usize, usize, usize)> = (0..=total)
            .flat_map(|mt| (0..=total - mt).map(move |mp| (mt, mp, total - mt - mp)))
            .collect();
        let partials: Vec<Vec<BigRational>> = splits
            .par_iter()
            .map(|&(mt, mp, mpp)| self.contract_split(mt, mp, mpp, side))
            .collect();
        let mut out = vec![BigRational::zero(); side * side];
        for part in partials {
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        out
    }

    fn contract_split(&self, mt: usize, mp: usize, mpp: usize, side: usize) -> Vec<BigRational> {
        let (den_t, tilde) = &self.scaled[mt];
        let (den_p, prime) = &self.scaled[mp];
        let (den_pp, dprime) = &self.scaled[mpp];
        let mut acc = vec![BigInt::zero(); side * side];
        for (nt, mut_, at) in tilde {
            let nt_f = 2 * *nt as i64 + 1;
            let mt_f = 2 * *mut_ as i64 + 1;
            for (np, mp_, ap) in prime {
                let np_f = 2 * *np as i64 + 1;
                let mp_f = 2 * *mp_ as i64 + 1;
                let atp = at * ap;
                for (npp, mpp_, app) in dprime {
                    let npp_f = 2 * *npp as i64 + 1;
                    let mpp_f = 2 * *mpp_ as i64 + 1;
                    let xs = self.support(&self.x_support, *np, *npp, *nt);
                    let ts = self.support(&self.t_support, *mp_, *mpp_, *mut_);
                    if xs.is_empty() || ts.is_empty() {
                        continue;
                    }
                    let c1 = mp_f * mpp_f * nt_f * nt_f;
                    let c2 = np_f * npp_f * mt_f * mt_f;
                    let c3 = 2 * mp_f * npp_f * nt_f * mt_f;
                    let prod = &atp * app;
                    for &(nu, q1, q2, q3) in xs {
                        for &(mu, p1, p2, p3) in ts {
                            let w = c1 * q1 * p1 + c2 * q2 * p2 + c3 * q3 * p3;
                            if w != 0 {
                                acc[nu * side + mu] += &prod * w;
                            }
                        }
                    }
                }
            }
        }
        let den = den_t * den_p * den_pp;
        acc.into_iter()
            .map(|n| BigRational::new(n, den.clone()))
            .collect()
    }
}

/// Solve the recursion through order `order`.
pub fn solve_order(order: usize) -> Result<LindstedtSolution> {
    let mut alpha = vec![OrderTable::zeros(0)];
    alpha[0].set(0, 0, BigRational::one());
    let mut xi = vec![BigRational::one()];
    let mut rec = Recursion::new(order);
    let sixteenth = ratio(1, 16);

    for n in 1..=order {
        rec.scaled.push(alpha[n - 1].scaled());
        let c = rec.contract(n - 1);
        rec.contraction.push(c);

        // Nonlinear residual at ε^{2n} per lattice point (ν, μ), ν, μ ≤ n.
        let side = n + 1;
        let mut residual = vec![BigRational::zero(); side * side];
        for (s, cs) in rec.contraction.iter().enumerate() {
            let x = &xi[n - 1 - s];
            if x.is_zero() {
                continue;
            }
            let cs_side = s + 2;
            for nu in 0..cs_side.min(side) {
                for mu in 0..cs_side.min(side) {
                    let v = &cs[nu * cs_side + mu];
                    if !v.is_zero() {
                        residual[nu * side + mu] += v * x;
                    }
                }
            }
        }
        for r in residual.iter_mut() {
            *r *= &sixteenth;
        }

        let xi_n = -residual[0].clone();
        let mut table = OrderTable::zeros(n);
        for nu in 0..side {
            for mu in 0..side {
                if nu == 0 && mu == 0 {
                    continue;
                }
                let r = &residual[nu * side + mu];
                if nu == mu {
                    if !r.is_zero() {
                        return Err(Error::DiagonalObstruction {
                            order: n,
                            index: nu,
                            value: r.to_string(),
                        });
                    }
                    continue;
                }
                let m_sq = ((2 * mu + 1) * (2 * mu + 1)) as i64;
                let n_sq = ((2 * nu + 1) * (2 * nu + 1)) as i64;
                let mut linear = BigRational::zero();
                for (mm, tab) in alpha.iter().enumerate().skip(1) {
                    if let Some(a) = tab.get(nu, mu) {
                        if !a.is_zero() {
                            linear += a * &xi[n - mm] * BigRational::from_integer(m_sq.into());
                        }
                    }
                }
                let value = -(linear + r) / BigRational::from_integer((m_sq - n_sq).into());
                table.set(nu, mu, value);
            }
        }
        alpha.push(table);
        xi.push(xi_n);
    }
    Ok(LindstedtSolution::from_tables(order, alpha, xi))
}

/// Dispersion coefficients `ξ_0..ξ_N` with `ω²/k² = Σ ξ_M ε^{2M}`.
pub fn dispersion(order: usize) -> Result<Vec<BigRational>> {
    Ok(solve_order(order)?.xi)
}

impl LindstedtSolution {
    fn from_tables(order: usize, alpha: Vec<OrderTable>, xi: Vec<BigRational>) -> Self {
        let mut alpha_f64 = Vec::new();
        for (m, tab) in alpha.iter().enumerate() {
            for nu in 0..tab.size {
                for mu in 0..tab.size {
                    let a = &tab.values[nu * tab.size + mu];
                    if !a.is_zero() {
                        alpha_f64.push((m, (2 * nu + 1) as f64, (2 * mu + 1) as f64, to_f64(a)));
                    }
                }
            }
        }
        let xi_f64 = xi.iter().map(to_f64).collect();
        LindstedtSolution {
            order,
            alpha,
            xi,
            scales: Scales::default(),
            eps_guard: true,
            alpha_f64,
            xi_f64,
        }
    }

    pub fn with_scales(mut self, scales: Scales) -> Self {
        self.scales = scales;
        self
    }

    /// Disable the `ε < 1` guard on evaluation.
    pub fn without_eps_guard(mut self) -> Self {
        self.eps_guard = false;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scales(&self) -> Scales {
        self.scales
    }

    pub fn xi(&self) -> &[BigRational] {
        &self.xi
    }

    /// `α_{Mνμ}`; zero outside the stored cone.
    pub fn alpha(&self, order: usize, nu: usize, mu: usize) -> BigRational {
        self.alpha
            .get(order)
            .and_then(|t| t.get(nu, mu))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// All non-zero `(M, ν, μ, α)`.
    pub fn alpha_entries(&self) -> Vec<(usize, usize, usize, BigRational)> {
        let mut out = Vec::new();
        for (m, tab) in self.alpha.iter().enumerate() {
            for nu in 0..tab.size {
                for mu in 0..tab.size {
                    let a = &tab.values[nu * tab.size + mu];
                    if !a.is_zero() {
                        out.push((m, nu, mu, a.clone()));
                    }
                }
            }
        }
        out
    }

    /// The field divided by `A` as an ε-graded trigonometric series.
    pub fn series(&self) -> TrigSeries {
        let mut s = TrigSeries::zero();
        for (m, nu, mu, a) in self.alpha_entries() {
            let key = TermKey::mode(2 * nu as u32 + 1, 2 * mu as u32 + 1, Parity::SinCos)
                .with_eps(2 * m as u32);
            s.add_term(key, a);
        }
        s
    }

    fn check_eps(&self, eps: f64) -> Result<()> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "eps must be finite and >= 0, got {eps}"
            )));
        }
        if self.eps_guard && eps >= 1.0 {
            return Err(Error::EpsilonOutOfRange { eps });
        }
        Ok(())
    }

    /// `ω_N² / k² = Σ ξ_M ε^{2M}`.
    pub fn omega_sq_ratio(&self, eps: f64) -> f64 {
        let e2 = eps * eps;
        self.xi_f64.iter().rev().fold(0.0, |acc, x| acc * e2 + x)
    }

    pub fn omega(&self, eps: f64) -> Result<f64> {
        self.check_eps(eps)?;
        let w2 = self.omega_sq_ratio(eps);
        if w2 <= 0.0 {
            return Err(Error::NegativeOmegaSquared { eps, value: w2 });
        }
        Ok(self.scales.wavenumber * w2.sqrt())
    }

    /// Temporal period `2π / ω_N`.
    pub fn period(&self, eps: f64) -> Result<f64> {
        Ok(2.0 * std::f64::consts::PI / self.omega(eps)?)
    }

    pub fn evaluate(&self, x: f64, t: f64, eps: f64) -> Result<f64> {
        Ok(self.sample(x, t, eps)?.u)
    }

    /// Field and all first and second derivatives, evaluated term by term.
    pub fn sample(&self, x: f64, t: f64, eps: f64) -> Result<FieldSample> {
        let omega = self.omega(eps)?;
        let k = self.scales.wavenumber;
        let amp = self.scales.amplitude;
        let e2 = eps * eps;
        let mut pow = vec![1.0; self.order + 1];
        for i in 1..pow.len() {
            pow[i] = pow[i - 1] * e2;
        }
        let (mut u, mut ux, mut ut, mut uxx, mut utt, mut uxt) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &(m, n, mm, a) in &self.alpha_f64 {
            let c = a * pow[m];
            let (sx, cx) = (n * k * x).sin_cos();
            let (st, ct) = (mm * omega * t).sin_cos();
            u += c * sx * ct;
            ux += c * n * k * cx * ct;
            ut -= c * mm * omega * sx * st;
            uxx -= c * n * n * k * k * sx * ct;
            utt -= c * mm * mm * omega * omega * sx * ct;
            uxt -= c * n * mm * k * omega * cx * st;
        }
        Ok(FieldSample {
            x,
            t,
            u: amp * u,
            ux: Some(amp * ux),
            ut: Some(amp * ut),
            uxx: Some(amp * uxx),
            utt: Some(amp * utt),
            uxt: Some(amp * uxt),
            source: Source::Lindstedt,
        })
    }

    /// Coefficients `P_j` (in powers of `ε²`) of the residual divided by `A k²`
    /// at phases `θx = kx`, `θt = ω_N t`.
    ///
    /// The recursion makes `P_j` vanish identically for `j ≤ N`; those entries
    /// are returned as exact zeros so that rounding noise from the cancelling
    /// low orders does not mask the `ε^{2N+2}` tail.
    pub fn residual_polynomial(&self, theta_x: f64, theta_t: f64) -> Vec<f64> {
        let n = self.order;
        // Per-order coefficients of X1 = u_x/(Ak), T1 = u_t/(Aω),
        // XX = u_xx/(Ak²), TT = u_tt/(Aω²), XT = u_xt/(Akω).
        let mut x1 = vec![0.0; n + 1];
        let mut t1 = vec![0.0; n + 1];
        let mut xx = vec![0.0; n + 1];
        let mut tt = vec![0.0; n + 1];
        let mut xt = vec![0.0; n + 1];
        for &(m, nn, mm, a) in &self.alpha_f64 {
            let (sx, cx) = (nn * theta_x).sin_cos();
            let (st, ct) = (mm * theta_t).sin_cos();
            x1[m] += a * nn * cx * ct;
            t1[m] -= a * mm * sx * st;
            xx[m] -= a * nn * nn * sx * ct;
            tt[m] -= a * mm * mm * sx * ct;
            xt[m] -= a * nn * mm * cx * st;
        }
        let w = &self.xi_f64;
        // LHS/(Ak²) = XX − W·TT − ε² W (T1² XX + X1² TT − 2 X1 T1 XT)
        let linear = poly_sub(&xx, &poly_mul(w, &tt));
        let bracket = poly_sub(
            &poly_add(
                &poly_mul(&poly_mul(&t1, &t1), &xx),
                &poly_mul(&poly_mul(&x1, &x1), &tt),
            ),
            &poly_scale(&poly_mul(&poly_mul(&x1, &t1), &xt), 2.0),
        );
        let nonlinear = poly_mul(w, &bracket);
        let mut total = vec![0.0; 4 * n + 2];
        for (i, v) in linear.iter().enumerate() {
            total[i] += v;
        }
        for (i, v) in nonlinear.iter().enumerate() {
            total[i + 1] -= v;
        }
        for v in total.iter_mut().take(n + 1) {
            *v = 0.0;
        }
        total
    }

    /// Residual divided by `A k²` at `(θx, θt)` for the given ε.
    pub fn residual_at_phase(&self, theta_x: f64, theta_t: f64, eps: f64) -> f64 {
        let e2 = eps * eps;
        self.residual_polynomial(theta_x, theta_t)
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * e2 + c)
    }

    /// `F(ε) / (A k²)`: the maximum of |residual| over a uniform
    /// `grid_x × grid_t` grid covering one spatial and one temporal period.
    pub fn residual_max(&self, eps: f64, grid_x: usize, grid_t: usize) -> Result<f64> {
        if grid_x < 8 || grid_t < 8 {
            return Err(Error::InvalidArgument(format!(
                "residual grid must be at least 8x8, got {grid_x}x{grid_t}"
            )));
        }
        self.omega(eps)?;
        let tau = 2.0 * std::f64::consts::PI;
        let max = (0..grid_x)
            .into_par_iter()
            .map(|i| {
                let tx = tau * i as f64 / grid_x as f64;
                (0..grid_t)
                    .map(|j| {
                        let tt = tau * j as f64 / grid_t as f64;
                        self.residual_at_phase(tx, tt, eps).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(max)
    }

    /// Sine coefficients of the `t = 0` profile `u(x, 0) = Σ c_n sin(n k x)`.
    pub fn initial_profile(&self, eps: f64) -> Vec<(u32, f64)> {
        let mut by_harmonic: BTreeMap<u32, f64> = BTreeMap::new();
        let e2 = eps * eps;
        for &(m, n, _, a) in &self.alpha_f64 {
            *by_harmonic.entry(n as u32).or_insert(0.0) +=
                self.scales.amplitude * a * e2.powi(m as i32);
        }
        by_harmonic.into_iter().collect()
    }

    /// `{"N":..,"xi":[[num,den],..],"alpha":[{"M","nu","mu","num","den"},..]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let alpha: Vec<serde_json::Value> = self
            .alpha_entries()
            .into_iter()
            .map(|(m, nu, mu, a)| {
                let (num, den) = rational_to_json_pair(&a);
                json!({"M": m, "nu": nu, "mu": mu, "num": num, "den": den})
            })
            .collect();
        json!({
            "N": self.order,
            "xi": self.xi.iter().map(rational_json).collect::<Vec<_>>(),
            "alpha": alpha,
        })
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    poly_add(a, &poly_scale(b, -1.0))
}

fn poly_scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// First-order solution for the two-mode seed
/// `u⁽⁰⁾ = A₁ sin(kx) cos(ωt) + A₃ sin(3kx) cos(3ωt)`.
#[derive(Debug, Clone)]
pub struct TwoModeFirstOrder {
    /// `u⁽⁰⁾ + u⁽¹⁾` in physical units, graded in the two-mode ε.
    pub series: TrigSeries,
    /// `ξ_1`, the ε² coefficient of `ω²/k²`.
    pub xi1: BigRational,
    /// `ε = k √(A₁² + 9A₃²) / b`.
    pub eps: f64,
    /// `A₁² + 9A₃²` as an exact rational (the nonlinear scale of the seed).
    pub amplitude_sq: BigRational,
}

pub fn two_mode_first_order(a1: f64, a3: f64, k: f64, b: f64) -> Result<TwoModeFirstOrder> {
    if a1 == 0.0 && a3 == 0.0 {
        return Err(Error::InvalidArgument(
            "two-mode seed needs (A1, A3) != (0, 0)".into(),
        ));
    }
    if !(k > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument("k and b must be positive".into()));
    }
    let exact = |v: f64, name: &str| {
        from_f64(v).ok_or_else(|| Error::InvalidArgument(format!("{name} must be finite")))
    };
    let qa1 = exact(a1, "A1")?;
    let qa3 = exact(a3, "A3")?;
    let nine = ratio(9, 1);
    let amplitude_sq = &qa1 * &qa1 + &nine * &qa3 * &qa3;
    let eps = k * amplitude_sq_f64(a1, a3).sqrt() / b;

    let half = ratio(1, 2);
    let mut series = TrigSeries::s(1, 1)
        .scale(&(&qa1 * &half))
        .add(&TrigSeries::s(3, 3).scale(&(&qa3 * &half)));

    // u⁽¹⁾ = k²/(8b²)[...] = ε²/(8 (A₁²+9A₃²)) [...]
    let s = |n, m| TrigSeries::s(n, m);
    let a1a1 = &qa1 * &qa1;
    let a3a3 = &qa3 * &qa3;
    let six_a3 = ratio(6, 1) * &qa3;
    let a1_6a3 = &qa1 + &six_a3;
    let blocks = [
        (&a1a1 * &a1_6a3 * ratio(1, 8), s(3, 1).add(&s(1, 3))),
        (ratio(9, 24) * &qa1 * &qa3 * &a1_6a3, s(5, 1).sub(&s(1, 5))),
        (ratio(3, 8) * &a1a1 * &qa3, s(5, 3).add(&s(3, 5))),
        (ratio(54, 48) * &qa1 * &a3a3, s(7, 1).add(&s(1, 7))),
        (ratio(9, 24) * &qa1 * &a3a3, s(7, 5).add(&s(5, 7))),
        (ratio(9, 8) * &a3a3 * &qa3, s(9, 3).add(&s(3, 9))),
    ];
    let prefactor = (ratio(8, 1) * &amplitude_sq).recip();
    let mut u1 = TrigSeries::zero();
    for (c, block) in blocks {
        u1 = u1.add(&block.scale(&(c * &prefactor)));
    }
    series = series.add(&u1.shift_eps(2));
    Ok(TwoModeFirstOrder {
        series,
        xi1: ratio(-1, 2),
        eps,
        amplitude_sq,
    })
}

fn amplitude_sq_f64(a1: f64, a3: f64) -> f64 {
    a1 * a1 + 9.0 * a3 * a3
}
