//! Dilation filters `c_0..c_N` and their admissibility conditions.
//!
//! A filter is normalized so that `sum c_k = 2`; the symbol is
//! `P(xi) = 1/2 sum c_k e^{i k xi}` and `P(0) = 1`. The conditions tested here:
//!
//! * sum rule: `sum c_even = sum c_odd = 1`,
//! * accuracy `A_p`: `sum (-1)^k k^m c_k = 0` for `m < p`,
//! * orthogonality `O`: `sum c_k c_{k-2m} = 2 delta_{0m}`,
//! * the simple-eigenvalue test on the autocorrelation transition matrix,
//!   which rejects filters that pass `O` without giving orthogonal translates.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Default tolerance at which condition O is considered satisfied.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-10;

/// Names accepted by [`FilterCoefficients::builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["haar", "hat", "d4", "stretched-box"];

#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    coeffs: Vec<f64>,
    name: Option<String>,
}

impl FilterCoefficients {
    /// Validates and wraps a coefficient sequence. At least two taps, all
    /// finite, and nonzero endpoints so the support is exactly `[0, N]`.
    pub fn new(coeffs: Vec<f64>, name: Option<String>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidFilter(format!(
                "need at least 2 coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFilter("non-finite coefficient".into()));
        }
        if coeffs[0] == 0.0 || coeffs[coeffs.len() - 1] == 0.0 {
            return Err(Error::InvalidFilter(
                "first and last coefficients must be nonzero".into(),
            ));
        }
        Ok(Self { coeffs, name })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let coeffs = match name {
            "haar" => vec![1.0, 1.0],
            "hat" => vec![0.5, 1.0, 0.5],
            "d4" => {
                let s3 = 3f64.sqrt();
                vec![
                    (1.0 + s3) / 4.0,
                    (3.0 + s3) / 4.0,
                    (3.0 - s3) / 4.0,
                    (1.0 - s3) / 4.0,
                ]
            }
            "stretched-box" => vec![1.0, 0.0, 0.0, 1.0],
            other => {
                return Err(Error::InvalidFilter(format!(
                    "unknown filter '{other}' (known: {})",
                    BUILTIN_NAMES.join(", ")
                )))
            }
        };
        Self::new(coeffs, Some(name.to_string()))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of taps, `N + 1`.
    pub fn support_length(&self) -> usize {
        self.coeffs.len()
    }

    /// Highest index `N`; `phi` lives on `[0, N]`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c_k`, zero outside `0..=N`.
    pub fn get(&self, k: i64) -> f64 {
        if k < 0 {
            return 0.0;
        }
        self.coeffs.get(k as usize).copied().unwrap_or(0.0)
    }

    /// The filter with `c_k -> c_{N-k}`.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            coeffs,
            name: self.name.as_ref().map(|n| format!("{n}-reversed")),
        }
    }

    pub fn symbol(&self) -> Symbol<'_> {
        Symbol {
            filter: self,
            sign: ExponentSign::Positive,
        }
    }

    /// Even-index and odd-index sums both equal to 1 within `tol`.
    pub fn check_sums(&self, tol: f64) -> bool {
        let (even, odd) = self.parity_sums();
        (even - 1.0).abs() <= tol && (odd - 1.0).abs() <= tol
    }

    pub(crate) fn parity_sums(&self) -> (f64, f64) {
        let even = self.coeffs.iter().step_by(2).sum();
        let odd = self.coeffs.iter().skip(1).step_by(2).sum();
        (even, odd)
    }

    /// `sum_k (-1)^k k^m c_k`.
    pub fn alternating_moment(&self, m: u32) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| sign(k) * (k as f64).powi(m as i32) * c)
            .sum()
    }

    /// Largest `p <= max_p` such that the alternating moments vanish for
    /// every `m < p`. Moment `m` is compared against `tol * sum |c_k| k^m`
    /// since the sums grow like `N^m`.
    pub fn accuracy_order(&self, max_p: usize, tol: f64) -> usize {
        let mut p = 0;
        while p < max_p {
            let m = p as i32;
            let scale: f64 = self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * (k as f64).powi(m))
                .sum();
            if self.alternating_moment(p as u32).abs() > tol * scale.max(f64::MIN_POSITIVE) {
                break;
            }
            p += 1;
        }
        p
    }

    /// Time-domain condition O. The residual is the worst of
    /// `|sum c_k c_{k-2m}|` over `m != 0` and `|sum c_k^2 - 2|`.
    pub fn check_orthogonality(&self, tol: f64) -> (bool, f64) {
        let residual = self.orthogonality_residual();
        (residual < tol, residual)
    }

    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.degree() as i64;
        let mut residual = (self.even_shift_product(0) - 2.0).abs();
        for m in 1..=n / 2 {
            // the product is symmetric in m, so positive shifts suffice
            residual = residual.max(self.even_shift_product(m).abs());
        }
        residual
    }

    /// `sum_k c_k c_{k - 2m}`.
    fn even_shift_product(&self, m: i64) -> f64 {
        (0..self.coeffs.len() as i64)
            .map(|k| self.get(k) * self.get(k - 2 * m))
            .sum()
    }

    /// Frequency form of condition O: the worst deviation of
    /// `|P(xi)|^2 + |P(xi + pi)|^2` from 1 over `samples` uniform points in `[0, 2 pi)`.
    pub fn mirror_identity_residual(&self, samples: usize) -> f64 {
        let p = self.symbol();
        (0..samples)
            .map(|s| {
                let xi = 2.0 * PI * s as f64 / samples as f64;
                (p.eval(xi).norm_sqr() + p.eval(xi + PI).norm_sqr() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Transition matrix on autocorrelations,
    /// `T_ij = 1/2 sum_k c_k c_{j - 2i + k}` for `i, j` in `-(N-1)..=N-1`.
    ///
    /// The factor `1/2` puts the eigenvalue carried by `delta_{0m}` at 1 for
    /// filters normalized to `sum c_k = 2`.
    pub fn transition_matrix(&self) -> DMatrix<f64> {
        let n = self.degree() as i64;
        let dim = (2 * n - 1) as usize;
        DMatrix::from_fn(dim, dim, |r, s| {
            let i = r as i64 - (n - 1);
            let j = s as i64 - (n - 1);
            0.5 * (0..=n)
                .map(|k| self.get(k) * self.get(j - 2 * i + k))
                .sum::<f64>()
        })
    }

    /// Requires condition O. Passes when exactly one eigenvalue of
    /// [`transition_matrix`](Self::transition_matrix) lies within `tol` of 1.
    /// The returned gap is the distance from 1 to the nearest of the other
    /// eigenvalues (infinite for the 1x1 Haar matrix).
    pub fn lawton_test(&self, tol: f64) -> Result<(bool, f64)> {
        let (ortho, residual) = self.check_orthogonality(tol);
        if !ortho {
            return Err(Error::ConditionOFailed { residual });
        }
        let mut dist: Vec<f64> = linalg::eigenvalues(&self.transition_matrix())
            .iter()
            .map(|z| (z - 1.0).norm())
            .collect();
        dist.sort_by(f64::total_cmp);
        let near_one = dist.iter().filter(|d| **d < tol).count();
        let gap = dist.get(1).copied().unwrap_or(f64::INFINITY);
        Ok((near_one == 1 && gap > tol, gap))
    }

    /// Coefficients of `W` in terms of `phi(2x - k)`, see [`WaveletCoefficients`].
    pub fn wavelet_coefficients(&self) -> WaveletCoefficients {
        let n = self.degree();
        // (-1)^j c_{N-j} for odd N; one extra sign flip when N is even so that
        // the sequence matches (-1)^k c_{1-k} re-based from k = 1 - N.
        let flip = if n % 2 == 1 { 1.0 } else { -1.0 };
        let coeffs = (0..=n).map(|j| flip * sign(j) * self.coeffs[n - j]).collect();
        let offset = if n % 2 == 1 { 0 } else { 1 - n as i64 };
        WaveletCoefficients { coeffs, offset }
    }

    /// All four conditions in one pass.
    pub fn condition_report(&self, tol: f64) -> ConditionReport {
        let sum_ok = self.check_sums(tol.max(1e-12));
        let accuracy_order = self.accuracy_order(self.support_length(), 1e-10);
        let (ortho_ok, ortho_residual) = self.check_orthogonality(tol);
        let (lawton_ok, lawton_second_eigenvalue_gap) = self.lawton_test(tol).unwrap_or((false, f64::NAN));
        ConditionReport {
            sum_ok,
            accuracy_order,
            ortho_ok,
            ortho_residual,
            lawton_ok,
            lawton_second_eigenvalue_gap,
        }
    }
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the exponent in `e^{± i k xi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentSign {
    Positive,
    Negative,
}

impl ExponentSign {
    pub fn as_f64(self) -> f64 {
        match self {
            ExponentSign::Positive => 1.0,
            ExponentSign::Negative => -1.0,
        }
    }
}

/// `P(xi) = 1/2 sum c_k e^{± i k xi}`; positive sign unless asked otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Symbol<'a> {
    filter: &'a FilterCoefficients,
    sign: ExponentSign,
}

impl<'a> Symbol<'a> {
    pub fn with_sign(self, sign: ExponentSign) -> Self {
        Self { sign, ..self }
    }

    pub fn sign(&self) -> ExponentSign {
        self.sign
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        let s = self.sign.as_f64();
        0.5 * self
            .filter
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, s * k as f64 * xi))
            .sum::<Complex64>()
    }

    /// `P'(xi)`.
    pub fn derivative(&self, xi: f64) -> Complex64 {
        let s = self.sign.as_f64();
        0.5 * self
            .filter
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Complex64::new(0.0, s * k as f64) * c * Complex64::from_polar(1.0, s * k as f64 * xi)
            })
            .sum::<Complex64>()
    }
}

/// Wavelet coefficients `d_j`, with `W(x) = sum_j d_j phi(2x - j - offset)`.
///
/// For odd `N` this is `d_j = (-1)^j c_{N-j}` with `offset = 0`. For even `N`
/// the same reversed, sign-alternated sequence starts at `k = 1 - N`, so the
/// offset is odd and the even-shift orthogonality survives.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients {
    pub coeffs: Vec<f64>,
    pub offset: i64,
}

impl WaveletCoefficients {
    /// `sum_j d_j c_{j + offset - 2m}`, zero for every `m` by construction.
    pub fn even_shift_product(&self, filter: &FilterCoefficients, m: i64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, d)| d * filter.get(j as i64 + self.offset - 2 * m))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub sum_ok: bool,
    pub accuracy_order: usize,
    pub ortho_ok: bool,
    pub ortho_residual: f64,
    pub lawton_ok: bool,
    /// NaN when the test does not apply (condition O failed).
    pub lawton_second_eigenvalue_gap: f64,
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sum_ok={}", self.sum_ok)?;
        writeln!(f, "accuracy_order={}", self.accuracy_order)?;
        writeln!(f, "ortho_ok={}", self.ortho_ok)?;
        writeln!(f, "ortho_residual={:e}", self.ortho_residual)?;
        writeln!(f, "lawton_ok={}", self.lawton_ok)?;
        write!(f, "lawton_gap={}", self.lawton_second_eigenvalue_gap)
    }
}
