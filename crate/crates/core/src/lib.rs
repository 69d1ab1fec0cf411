//! Numerical tools for radially reduced fractional potential theory.
//!
//! The crate evaluates the fractional Laplacian, Riesz potentials, ball
//! Green and Poisson kernels, nonlocal averages and Kelvin transforms on
//! radial functions, and carries the exponent arithmetic behind Liouville
//! theorems for fractional Hénon-Lane-Emden systems.

pub mod averages;
pub mod error;
pub mod kernels;
pub mod lemmas;
pub mod liouville;
pub mod output;
pub mod params;
pub mod quad;
pub mod radial;
pub mod selftest;

pub use error::{Error, Result};
pub use params::{validate, ProblemParams, ValidatedParams};
pub use quad::QuadratureSpec;
pub use radial::{make_radial, InnerPolicy, RadialFunction, Tail, TailPolicy};
