//! Numerical toolkit for the Meyer-König–Zeller (MKZ) and Baskakov operator
//! families, their Goodman–Sharma (GS) modifications, and the second-order
//! modified GS operators obtained by subtracting a weighted second derivative
//! of every basis function.
//!
//! The crate evaluates six series operators — three on the unit interval
//! `[0, 1)` and three on the half line `[0, ∞)` — together with the
//! differential calculus (`D̃ = φ D²`, `𝒟̃ = ψ D²`) that connects them, and a
//! verification layer that numerically certifies the identities and
//! inequalities the operators satisfy: moment formulas, the spectral-factor
//! identity, the unit↔ray transform bridge, the `√6` norm bound, a
//! second-order Jackson estimate, Voronovskaya and Bernstein inequalities,
//! and direct/strong-converse K-functional bounds.
//!
//! Organization:
//!
//! - [`basis`]: numerically stable basis kernels and fused spectral products
//! - [`series`]: certified truncation windows and anchored term profiles
//! - [`quad`]: panel-adaptive Gauss–Legendre quadrature
//! - [`coeffs`]: the integral coefficient functionals of the GS operators
//! - [`transform`]: the unit↔ray change of variables and norm bridges
//! - [`spectral`]: weighted differential operators, moments, tail sums
//! - [`interp`]: Chebyshev grids and barycentric interpolation
//! - [`engine`]: the operator evaluators and iterated application
//! - [`analysis`]: sup norms, K-functional bounds, verification suites
//! - [`registry`]: the built-in test functions with analytic derivative chains

pub mod analysis;
pub mod basis;
pub mod coeffs;
pub mod domain;
pub mod engine;
mod error;
pub mod function;
pub mod interp;
pub mod quad;
pub mod registry;
pub mod report;
pub mod series;
pub mod spectral;
pub mod transform;

pub use domain::{Domain, RayPoint, UnitPoint};
pub use error::{Error, Result};
pub use function::RealFunction;
