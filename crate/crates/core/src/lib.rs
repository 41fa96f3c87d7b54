//! Fourier and wavelet transforms side by side.
//!
//! The crate treats both fast transforms as sparse matrix factorizations:
//!
//! * [`fft`]: radix-2 Cooley-Tukey (even/odd shuffle, two half transforms,
//!   twiddle diagonal) with a dense DFT oracle and multiplication counts.
//! * [`fwt`]: the pyramid algorithm for any orthogonal dilation filter, its
//!   inverse, separable 2-D transforms and wavelet packets (Walsh basis).
//! * [`filters`]: dilation coefficients `c_0..c_N`, the symbol `P(xi)` and
//!   the admissibility tests (sum rule, accuracy `A_p`, orthogonality,
//!   simple-eigenvalue test).
//! * [`dilation`]: exact solution of `phi(x) = sum c_k phi(2x - k)` on
//!   dyadic grids, the wavelet `W`, and the infinite-product transform.
//! * [`jsr`]: joint spectral radius bounds and Hölder exponents.
//! * [`compress`]: keep-the-largest thresholding in Fourier, blocked
//!   Fourier, wavelet and packet bases.
//!
//! Conventions: the symbol is `P(xi) = 1/2 sum c_k e^{+i k xi}` and the
//! Fourier matrix has entries `omega^{jk}` with `omega = e^{+2 pi i / n}`.

pub mod cli;
pub mod compress;
pub mod dilation;
mod error;
pub mod fft;
pub mod filters;
pub mod fwt;
pub mod io;
pub mod jsr;
pub(crate) mod linalg;

pub use error::{Error, Result};
pub use filters::FilterCoefficients;
