//! Building blocks for self-referential representations of real functions.
//!
//! A *fractel* for a function f is a map w(x, y) = (l(x), F(x, y)) that sends
//! the graph of f into itself, equivalently F(x, f(x)) = f(l(x)) on f's
//! interval. This crate constructs, verifies, and combines such maps, and
//! exploits them in three directions:
//!
//! * assembling fractels into local iterated function systems whose
//!   fixed points reconstruct or approximate a function ([`ifs`], [`approx`]);
//! * exact rational matrices describing how affine substitutions act on
//!   polynomial bases ([`poly`], [`rational`]);
//! * a digit-driven exact polynomial evaluator where each digit of the
//!   argument costs one small matrix-vector product ([`digit`]).
//!
//! Grid-shaped inner loops (verification residuals, fixed-point sweeps, error
//! profiles) run data-parallel on rayon when the default `parallel` feature
//! is enabled, and sequentially otherwise; both paths return identical
//! results.
//!
//! ```
//! use fractel::{verify_fractel, AffineMap1D, Fractel, Interval, ScalarFunction};
//!
//! // (x/2, y/8) sends the graph of x³ into itself
//! let unit = Interval::unit();
//! let halving = AffineMap1D::new(0.5, 0.0, unit)?;
//! let w = Fractel::affine(halving, 0.125, ScalarFunction::zero(unit));
//! let cube = ScalarFunction::power(1.0, 3.0, unit);
//!
//! let report = verify_fractel(&w, &cube, 1000, 1e-12)?;
//! assert!(report.pass);
//!
//! // composing it with itself stays a fractel for x³
//! let ww = fractel::compose_fractels(&w, &w)?;
//! assert!(verify_fractel(&ww, &cube, 1000, 1e-12)?.pass);
//! # Ok::<(), fractel::FractelError>(())
//! ```

pub mod affine;
pub mod algebra;
pub mod approx;
pub mod calculus;
pub mod digit;
pub mod error;
mod exec;
pub mod fractel;
pub mod function;
pub mod ifs;
pub mod interval;
pub mod poly;
pub mod rational;
pub mod textio;

pub use affine::AffineMap1D;
pub use error::{FractelError, Result};
pub use fractel::{
    check_nontrivial, compose_fractels, rb_apply, residual_on, verify_fractel, FMap, Fractel,
    VerifyReport, DEFAULT_VERIFY_GRID, DEFAULT_VERIFY_TOL,
};
pub use function::ScalarFunction;
pub use interval::Interval;
