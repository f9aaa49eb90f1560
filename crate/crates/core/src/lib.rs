//! Davenport–Heilbronn-type functions, end to end.
//!
//! The pieces, bottom up:
//!
//! - [`characters`]: exact arithmetic on Dirichlet characters mod q (values are
//!   rational turn angles, so multiplicativity, conjugation, conductor tests
//!   and Gauss-sum setup are exact).
//! - [`lfunc`]: complex log-gamma, Hurwitz zeta by Euler–Maclaurin summation,
//!   and Dirichlet L-functions continued to the whole plane in binary64.
//! - [`dh`]: the Davenport–Heilbronn-type combination of a conjugate pair of
//!   primitive complex characters — a real-coefficient Dirichlet series
//!   satisfying the Riemann-type functional equation f(s) = W(s)·f(1−s) —
//!   plus W itself and functional-equation residuals.
//! - [`zeros`]: argument-principle zero counting over rectangles, recursive
//!   subdivision, Newton refinement, mirror-pair verification across the
//!   critical line, and derivative-zero location between mirror pairs.
//! - [`rays`]: predictor–corrector tracing of ray pre-images {arg f = φ}
//!   (the boundary curves of fundamental domains), with SVG emission.
//! - [`lincomb`]: linear combinations of two functions satisfying the same
//!   functional equation, and the numerical demonstration that such a
//!   combination fails the equation whenever its constants are not real.
//!
//! Heavy loops (grids, rectangle boundaries, subdivision) fan out through
//! [`par`], which is rayon-backed under the default `parallel` feature and
//! sequential without it; results are identical either way.

pub mod characters;
pub mod dh;
pub mod error;
pub mod lfunc;
pub mod lincomb;
pub mod par;
pub mod rays;
pub mod zeros;

pub use num_complex::Complex64;

pub use characters::{enumerate_characters, Character, CharacterGroup, Parity, Turn};
pub use dh::{eval_w, root_number, theta_from_root_number, DhSpec};
pub use error::{Error, Result};
pub use lfunc::{dirichlet_l, hurwitz_zeta, log_gamma, EvalParams};
pub use lincomb::{build_same_fe_pair, ComboFunction, SameFePair};
pub use rays::{curves_through_zero, trace_preimage, RayCurve, Termination};
pub use zeros::{
    derivative_zero_between, find_zeros, mirror_check, refine_newton, winding_number, ScanReport,
    SearchRect, ZeroRecord,
};
