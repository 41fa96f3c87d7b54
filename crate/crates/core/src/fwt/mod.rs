//! The pyramid algorithm.
//!
//! One step multiplies the signal by the stacked periodized filter matrix
//!
//! ```text
//! [ L ]   c_0  c_1  c_2  c_3
//! [   ] =           c_0  c_1  c_2  c_3   ...
//! [ H ]   c_3 -c_2  c_1 -c_0
//!                   c_3 -c_2  c_1 -c_0   ...
//! ```
//!
//! keeps the `H` half as the detail block and recurses on the `L` half.
//! Rows wrap around the end of the block. With the `1/sqrt 2` prefactor the
//! matrix is orthogonal for filters satisfying condition O; the unnormalized
//! variant uses `1/2` and reproduces the Haar averages-and-differences
//! `W_n^{-1}` exactly.

mod image;
mod packet;

pub use image::{analyze_2d, synthesize_2d, Band, Pyramid2d};
pub use packet::{packet_analyze, packet_synthesize, PacketBand, PacketTree};

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::error::{log2_exact, Error, Result};
use crate::fft::OpCount;
use crate::filters::{FilterCoefficients, DEFAULT_ORTHO_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `1/sqrt 2` per step; energy preserving.
    #[default]
    Orthonormal,
    /// `1/2` per step: averages and half-differences of the Haar example.
    Unnormalized,
}

impl Normalization {
    /// Factor applied to the raw filter taps on analysis.
    fn analysis_scale(self) -> f64 {
        match self {
            Normalization::Orthonormal => 1.0 / SQRT_2,
            Normalization::Unnormalized => 0.5,
        }
    }

    /// The raw step matrix `T` satisfies `T^{-1} = T^t / 2`, so synthesis
    /// uses `1 / (2 s)` for analysis scale `s`.
    fn synthesis_scale(self) -> f64 {
        1.0 / (2.0 * self.analysis_scale())
    }

    pub fn label(self) -> &'static str {
        match self {
            Normalization::Orthonormal => "orthonormal",
            Normalization::Unnormalized => "paper",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "orthonormal" => Ok(Normalization::Orthonormal),
            "paper" | "unnormalized" => Ok(Normalization::Unnormalized),
            other => Err(Error::InvalidInput(format!(
                "unknown normalization '{other}' (expected orthonormal or paper)"
            ))),
        }
    }
}

/// Output of [`analyze`]: the coarse scaling block, then detail blocks
/// ordered coarse to fine.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidCoefficients {
    pub coarse: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub normalization: Normalization,
}

impl PyramidCoefficients {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn len(&self) -> usize {
        self.coarse.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Block lengths in storage order, coarse block first.
    pub fn block_lengths(&self) -> Vec<usize> {
        std::iter::once(self.coarse.len())
            .chain(self.details.iter().map(Vec::len))
            .collect()
    }

    /// Coarse block followed by the detail blocks.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.coarse);
        for d in &self.details {
            out.extend_from_slice(d);
        }
        out
    }

    /// Inverse of [`flatten`](Self::flatten) for a signal of length `n`.
    pub fn from_flat(flat: &[f64], levels: usize, normalization: Normalization) -> Result<Self> {
        let n = flat.len();
        let ell = log2_exact(n).ok_or(Error::InvalidLength {
            len: n,
            reason: "pyramid length must be a power of two",
        })?;
        if levels > ell {
            return Err(Error::InvalidInput(format!(
                "{levels} levels do not fit a length-{n} pyramid"
            )));
        }
        let coarse_len = n >> levels;
        let coarse = flat[..coarse_len].to_vec();
        let mut details = Vec::with_capacity(levels);
        let mut start = coarse_len;
        for j in 0..levels {
            let len = coarse_len << j;
            details.push(flat[start..start + len].to_vec());
            start += len;
        }
        Ok(Self {
            coarse,
            details,
            normalization,
        })
    }
}

/// One analysis step on a block of even length: `(low, high)`.
pub(crate) struct StepFilters {
    low: Vec<f64>,
    high: Vec<f64>,
    synth_low: Vec<f64>,
    synth_high: Vec<f64>,
}

impl StepFilters {
    pub(crate) fn new(filter: &FilterCoefficients, normalization: Normalization) -> Self {
        let s = normalization.analysis_scale();
        let t = normalization.synthesis_scale();
        let c = filter.coeffs();
        // high-pass taps sit in the same columns as the low-pass taps
        let d = filter.wavelet_coefficients().coeffs;
        Self {
            low: c.iter().map(|v| v * s).collect(),
            high: d.iter().map(|v| v * s).collect(),
            synth_low: c.iter().map(|v| v * t).collect(),
            synth_high: d.iter().map(|v| v * t).collect(),
        }
    }

    pub(crate) fn taps(&self) -> usize {
        self.low.len()
    }

    /// Returns the number of multiplications performed.
    pub(crate) fn analyze(&self, x: &[f64], low: &mut Vec<f64>, high: &mut Vec<f64>) -> u64 {
        let n = x.len();
        let half = n / 2;
        low.clear();
        high.clear();
        for m in 0..half {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for (k, (a, b)) in self.low.iter().zip(&self.high).enumerate() {
                let v = x[(2 * m + k) % n];
                lo += a * v;
                hi += b * v;
            }
            low.push(lo);
            high.push(hi);
        }
        (2 * half * self.taps()) as u64
    }

    /// Transpose of the analysis step (up to scale).
    pub(crate) fn synthesize(&self, low: &[f64], high: &[f64], out: &mut Vec<f64>) {
        let n = 2 * low.len();
        out.clear();
        out.resize(n, 0.0);
        for m in 0..low.len() {
            for (k, (a, b)) in self.synth_low.iter().zip(&self.synth_high).enumerate() {
                out[(2 * m + k) % n] += a * low[m] + b * high[m];
            }
        }
    }
}

fn check_signal(n: usize, levels: usize) -> Result<usize> {
    let ell = log2_exact(n).ok_or(Error::InvalidLength {
        len: n,
        reason: "signal length must be a power of two",
    })?;
    if levels == 0 || levels > ell {
        return Err(Error::InvalidInput(format!(
            "levels must be in 1..={ell} for length {n}, got {levels}"
        )));
    }
    Ok(ell)
}

pub(crate) fn warn_if_not_orthogonal(filter: &FilterCoefficients) {
    let (ok, residual) = filter.check_orthogonality(DEFAULT_ORTHO_TOL);
    if !ok {
        log::warn!(
            "filter {} fails condition O (residual {residual:e}); the transform is not orthogonal",
            filter.name().unwrap_or("<unnamed>")
        );
    }
}

pub fn analyze(
    signal: &[f64],
    filter: &FilterCoefficients,
    levels: usize,
    normalization: Normalization,
) -> Result<PyramidCoefficients> {
    analyze_counted(signal, filter, levels, normalization).map(|(p, _)| p)
}

/// [`analyze`] plus the multiplications actually performed per stage.
pub fn analyze_counted(
    signal: &[f64],
    filter: &FilterCoefficients,
    levels: usize,
    normalization: Normalization,
) -> Result<(PyramidCoefficients, OpCount)> {
    check_signal(signal.len(), levels)?;
    warn_if_not_orthogonal(filter);
    let step = StepFilters::new(filter, normalization);
    let mut current = signal.to_vec();
    let mut low = Vec::new();
    let mut details = Vec::with_capacity(levels);
    let mut stages = Vec::with_capacity(levels);
    for _ in 0..levels {
        let mut high = Vec::new();
        stages.push(step.analyze(&current, &mut low, &mut high));
        details.push(high);
        std::mem::swap(&mut current, &mut low);
    }
    details.reverse();
    Ok((
        PyramidCoefficients {
            coarse: current,
            details,
            normalization,
        },
        OpCount::from_stages(stages),
    ))
}

pub fn synthesize(pyramid: &PyramidCoefficients, filter: &FilterCoefficients) -> Result<Vec<f64>> {
    let mut expected = pyramid.coarse.len();
    if expected == 0 {
        return Err(Error::InvalidInput("empty coarse block".into()));
    }
    for (j, d) in pyramid.details.iter().enumerate() {
        if d.len() != expected {
            return Err(Error::InvalidInput(format!(
                "detail block {j} has length {}, expected {expected}",
                d.len()
            )));
        }
        expected *= 2;
    }
    let step = StepFilters::new(filter, pyramid.normalization);
    let mut current = pyramid.coarse.clone();
    let mut out = Vec::new();
    for d in &pyramid.details {
        step.synthesize(&current, d, &mut out);
        std::mem::swap(&mut current, &mut out);
    }
    Ok(current)
}

/// Multiplication count of an `levels`-stage pyramid on length `n` with
/// `taps`-tap filters: stage `j` produces `n / 2^{j+1}` outputs in each band.
pub fn fwt_opcount(n: usize, levels: usize, taps: usize) -> Result<OpCount> {
    check_signal(n, levels)?;
    let stages: Vec<u64> = (0..levels)
        .map(|j| (2 * taps * (n >> (j + 1))) as u64)
        .collect();
    let count = OpCount::from_stages(stages);
    // 1 + 1/2 + 1/4 + ... < 2
    assert!(count.multiplications < (4 * taps * n) as u64);
    Ok(count)
}

/// Periodized `L` and `H` (each `n/2 x n`) of a single step.
pub fn filter_bank_matrices(
    filter: &FilterCoefficients,
    n: usize,
    normalization: Normalization,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidLength {
            len: n,
            reason: "filter bank matrices need an even size",
        });
    }
    let step = StepFilters::new(filter, normalization);
    let mut l = DMatrix::zeros(n / 2, n);
    let mut h = DMatrix::zeros(n / 2, n);
    for m in 0..n / 2 {
        for k in 0..step.taps() {
            l[(m, (2 * m + k) % n)] += step.low[k];
            h[(m, (2 * m + k) % n)] += step.high[k];
        }
    }
    Ok((l, h))
}

/// The full analysis matrix: row `i` holds the coefficients of flattened
/// output `i` (coarse first).
pub fn analysis_matrix(
    filter: &FilterCoefficients,
    n: usize,
    levels: usize,
    normalization: Normalization,
) -> Result<DMatrix<f64>> {
    check_signal(n, levels)?;
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e[col] = 1.0;
        let p = analyze(&e, filter, levels, normalization)?;
        m.set_column(col, &nalgebra::DVector::from_vec(p.flatten()));
        e[col] = 0.0;
    }
    Ok(m)
}

/// The matrix whose columns are the synthesized basis vectors, `y = W b`.
/// For Haar in the unnormalized mode this is the piecewise-constant `W_n`.
pub fn synthesis_matrix(
    filter: &FilterCoefficients,
    n: usize,
    levels: usize,
    normalization: Normalization,
) -> Result<DMatrix<f64>> {
    check_signal(n, levels)?;
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e[col] = 1.0;
        let p = PyramidCoefficients::from_flat(&e, levels, normalization)?;
        m.set_column(col, &nalgebra::DVector::from_vec(synthesize(&p, filter)?));
        e[col] = 0.0;
    }
    Ok(m)
}
