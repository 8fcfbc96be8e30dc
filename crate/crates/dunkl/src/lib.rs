//! Numerical toolkit for one-dimensional Dunkl calculus.
//!
//! The Dunkl operator on the real line,
//!
//! ```text
//! L f(x) = f'(x) + (2a + 1) / x * (f(x) - f(-x)) / 2,      a > -1/2,
//! ```
//!
//! is a differential-difference deformation of `d/dx`. This crate implements
//! the objects built on top of it and the identities connecting them:
//!
//! | module        | contents                                                       |
//! |---------------|----------------------------------------------------------------|
//! | [`special`]   | gamma, Pochhammer, normalized Bessel series, Dunkl kernel      |
//! | [`poly`]      | polynomials with exact Dunkl-operator action                   |
//! | [`functions`] | test-function catalog with closed-form operator chains         |
//! | [`quadrature`]| Gauss-Legendre / Gauss-Jacobi rules, adaptive panels           |
//! | [`theta`]     | power-log term algebra and the Taylor kernel pair (u_k, v_k)   |
//! | [`translation`]| generalized translation (exact on polynomials, kernel-based)  |
//! | [`norms`]     | weighted L^p norms for the measure |x|^(2a+1) dx / c_a         |
//! | [`remainder`] | Taylor remainders: direct kernel route and recursive route     |
//! | [`besov`]     | modulus of smoothness, K-functional bounds, Besov seminorms    |
//!
//! Everything is plain `f64`; all routines are deterministic and free of
//! interior mutability, so values are reproducible bit-for-bit for a fixed
//! build. Operations that can fail (series truncation, quadrature tolerance,
//! non-integrable inputs) return [`Error`].

pub mod besov;
mod error;
pub mod functions;
pub mod norms;
pub mod poly;
pub mod quadrature;
pub mod remainder;
pub mod special;
pub mod theta;
pub mod translation;

pub use error::Error;
pub use special::DunklParameter;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
