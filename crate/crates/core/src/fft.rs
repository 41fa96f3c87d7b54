//! Radix-2 FFT as the factorization
//!
//! ```text
//! F_n = [ I  D ] [ F_{n/2}         ] [ even-odd ]
//!       [ I -D ] [         F_{n/2} ] [ shuffle  ]
//! ```
//!
//! applied recursively. `F_n` has entries `omega^{jk}` with
//! `omega = e^{+2 pi i / n}`; many references call this sign the inverse
//! transform. `D` is `diag(1, omega, ..., omega^{n/2 - 1})` and every level
//! costs `n/2` multiplications by its entries, `(n/2) log2 n` in total.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{log2_exact, Error, Result};
use crate::filters::ExponentSign;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub values: Vec<Complex64>,
    /// Sign of the exponent in the matrix entries `e^{± 2 pi i jk / n}`.
    pub sign: ExponentSign,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Multiplication tally, one entry per level (or pyramid stage).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpCount {
    pub multiplications: u64,
    pub stage_breakdown: Vec<u64>,
}

impl OpCount {
    pub fn from_stages(stage_breakdown: Vec<u64>) -> Self {
        Self {
            multiplications: stage_breakdown.iter().sum(),
            stage_breakdown,
        }
    }
}

/// `omega^m` for `omega = e^{2 pi i / n}`, reduced mod n before the trig call.
fn root_of_unity(m: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (m % n) as f64 / n as f64)
}

/// Dense `n^2` evaluation of `y_j = sum_k a_k omega^{jk}`; any `n >= 1`.
pub fn dft_naive(a: &[Complex64]) -> ComplexSpectrum {
    let n = a.len();
    let table: Vec<Complex64> = (0..n).map(|m| root_of_unity(m, n)).collect();
    let values = (0..n)
        .map(|j| {
            a.iter()
                .enumerate()
                .map(|(k, ak)| ak * table[(j * k) % n])
                .sum()
        })
        .collect();
    ComplexSpectrum {
        values,
        sign: ExponentSign::Positive,
    }
}

/// A radix-2 plan: the twiddle table for one size, read-only after construction.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    levels: usize,
    /// `omega_n^m` for `m < n/2`; level with block size `b` uses stride `n / b`.
    twiddles: Vec<Complex64>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        let levels = log2_exact(n).ok_or(Error::InvalidLength {
            len: n,
            reason: "FFT length must be a power of two",
        })?;
        let twiddles = (0..n / 2).map(|m| root_of_unity(m, n)).collect();
        Ok(Self { n, levels, twiddles })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `F_n a` through bit-reversal followed by `log2 n` butterfly passes.
    pub fn forward(&self, a: &[Complex64]) -> Result<(ComplexSpectrum, OpCount)> {
        if a.len() != self.n {
            return Err(Error::InvalidLength {
                len: a.len(),
                reason: "input length differs from the plan length",
            });
        }
        let mut y = bit_reverse(a, self.levels);
        let mut stages = Vec::with_capacity(self.levels);
        let mut half = 1;
        while half < self.n {
            let block = 2 * half;
            let stride = self.n / block;
            let mut mults = 0u64;
            for start in (0..self.n).step_by(block) {
                for k in 0..half {
                    // [I D; I -D] on the two half-size outputs
                    let t = self.twiddles[k * stride] * y[start + half + k];
                    mults += 1;
                    let u = y[start + k];
                    y[start + k] = u + t;
                    y[start + half + k] = u - t;
                }
            }
            stages.push(mults);
            half = block;
        }
        Ok((
            ComplexSpectrum {
                values: y,
                sign: ExponentSign::Positive,
            },
            OpCount::from_stages(stages),
        ))
    }

    /// `F_n^{-1} y = (1/n) conj(F_n) y`.
    pub fn inverse(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let conj: Vec<Complex64> = y.iter().map(|v| v.conj()).collect();
        let (spec, _) = self.forward(&conj)?;
        let scale = 1.0 / self.n as f64;
        Ok(spec.values.into_iter().map(|v| v.conj() * scale).collect())
    }
}

fn bit_reverse(a: &[Complex64], bits: usize) -> Vec<Complex64> {
    if bits == 0 {
        return a.to_vec();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    for (i, v) in a.iter().enumerate() {
        let r = i.reverse_bits() >> (usize::BITS as usize - bits);
        out[r] = *v;
    }
    out
}

pub fn fft_forward(a: &[Complex64]) -> Result<(ComplexSpectrum, OpCount)> {
    Fft::new(a.len())?.forward(a)
}

pub fn fft_inverse(y: &ComplexSpectrum) -> Result<Vec<Complex64>> {
    Fft::new(y.len())?.inverse(&y.values)
}

/// Dense `F_n`, entry `(j, k)` equal to `omega^{jk}`.
pub fn fourier_matrix(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |j, k| root_of_unity(j * k, n))
}

/// The three factors of one Cooley-Tukey step for size `n`:
/// `[I D; I -D]`, `diag(F_{n/2}, F_{n/2})`, and the even-odd shuffle.
/// Their product is `F_n`.
pub fn cooley_tukey_factors(
    n: usize,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>)> {
    if log2_exact(n).is_none() || n < 2 {
        return Err(Error::InvalidLength {
            len: n,
            reason: "factorization needs a power of two >= 2",
        });
    }
    let h = n / 2;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let combine = DMatrix::from_fn(n, n, |r, c| {
        let (rb, rk) = (r / h, r % h);
        let (cb, ck) = (c / h, c % h);
        if rk != ck {
            return zero;
        }
        match (rb, cb) {
            (_, 0) => one,
            (0, 1) => root_of_unity(rk, n),
            _ => -root_of_unity(rk, n),
        }
    });
    let half = fourier_matrix(h);
    let blocks = DMatrix::from_fn(n, n, |r, c| {
        if r / h == c / h {
            half[(r % h, c % h)]
        } else {
            zero
        }
    });
    // row r of the shuffle picks a_{2r} for r < h, a_{2(r-h)+1} otherwise
    let shuffle = DMatrix::from_fn(n, n, |r, c| {
        let src = if r < h { 2 * r } else { 2 * (r - h) + 1 };
        if c == src {
            one
        } else {
            zero
        }
    });
    Ok((combine, blocks, shuffle))
}
