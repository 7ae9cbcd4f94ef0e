//! Rankin-Cohen brackets on exact truncated q-expansions, and the Fourier
//! coefficients of the adjoint of the bracket map `h -> [h, g]_nu`.
//!
//! The crate is layered bottom-up:
//!
//! - [`conv`]: exact integer convolution (sparse, schoolbook, multi-modular NTT)
//! - [`qseries`]: truncated q-series with rational coefficients and form metadata
//! - [`forms`]: the named forms catalog and sanity checks on it
//! - [`bracket`]: `C_r(k, l; nu)`, `alpha(k, l, nu, n, m)` and `[f, g]_nu`
//! - [`hp`]: high-precision floats, pi and Gamma at half-integers
//! - [`adjoint`]: `c(n) = beta(n) * L_{f,g,nu,n}(gamma)` with tail bounds
//! - [`verify`]: proportionality and positivity checks of `T* T`
//! - [`cli`]: the `rc-adjoint` command line front end
//!
//! With the default `parallel` feature, inner loops run on rayon; without it
//! every loop runs sequentially and results are identical.

pub mod adjoint;
pub mod bracket;
pub mod cli;
pub mod conv;
mod error;
pub mod forms;
pub mod hp;
mod par;
pub mod qseries;
pub mod verify;
mod weight;

pub use error::{Error, Result};
pub use weight::{HalfInt, TwiceWeight};
