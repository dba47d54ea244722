//! Certified non-vanishing of central values of Hecke L-functions for
//! level-one cusp forms.
//!
//! The crate is organised bottom-up:
//!
//! - [`ntheory`]: gcd, modular inverses, coprime factorisations, the cosine
//!   sums `γ_n(m)`, divisor counts, Bernoulli numbers and `ζ(s)`.
//! - [`specfun`]: half-integer Bessel `J_ν`, its power envelope, `ln Γ`, `Γ`
//!   and the upper incomplete gamma function, all with error contracts.
//! - [`qexpansion`]: exact q-series over `Q`, Eisenstein series, `Δ`, the
//!   Miller basis, Hecke matrices and normalised eigenforms.
//! - [`kernel`]: Fourier coefficients `r_k(n)` of the kernel dual to
//!   `φ ↦ L(φ, k/2)`, with certified truncation, and the non-vanishing
//!   certificate for `r_k(1)`.
//! - [`lfunction`]: completed L-values through incomplete-gamma sums.
//! - [`petersson`]: Petersson norms by quadrature over the fundamental domain
//!   and the end-to-end duality check.
//! - [`cli`]: the `hecke` command-line front end and its JSON report.

pub mod cli;
pub mod error;
pub mod kernel;
pub mod lfunction;
pub mod ntheory;
pub mod petersson;
pub mod qexpansion;
pub mod specfun;
pub mod value;

pub use error::{Error, Result};
pub use value::ValueWithError;
