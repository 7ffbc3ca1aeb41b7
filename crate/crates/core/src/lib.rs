//! Standing-wave solutions of the 1+1 dimensional scalar Born-Infeld equation
//!
//! ```text
//! (1 − u_t²/b²) u_xx − (1 + u_x²/b²) u_tt + (2/b²) u_x u_t u_xt = 0
//! ```
//!
//! between Dirichlet plates. Two independent constructions are provided:
//!
//! * [`lindstedt`]: an exact-rational Poincaré–Lindstedt series in `ε = Ak/b`,
//!   to arbitrary order, with [`trig_algebra`] as an independent symbolic oracle;
//! * [`minimal_surface`]: the exact parametric (characteristic) solution built
//!   from arbitrary hyperbolic initial data by quadrature.
//!
//! [`example_bc`] holds a closed-form example of the parametric construction,
//! [`background_field`] the variants with a uniform magnetic background, and
//! [`residual_check`] the pointwise residual and hyperbolicity checks shared by
//! all of them.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background_field;
pub mod error;
pub mod example_bc;
pub mod lindstedt;
pub mod minimal_surface;
pub mod output;
pub mod rational;
pub mod residual_check;
pub mod trig_algebra;

pub use error::{Error, Result};
