//! Keep-the-largest compression in Fourier, blocked Fourier, wavelet and
//! packet bases.
//!
//! Every basis is orthonormal, so ranking coefficients by magnitude ranks
//! them by the energy they carry and the squared reconstruction error is
//! exactly the sum of the squared discarded coefficients. Only thresholding
//! is modelled; no quantization or entropy coding.
//!
//! The blocked Fourier basis cuts the input into non-overlapping 8-sample
//! (or 8x8) windows with no smoothing between them, so block-edge artifacts
//! are expected in its reconstructions.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{log2_exact, Error, Result};
use crate::fft::Fft;
use crate::filters::{FilterCoefficients, DEFAULT_ORTHO_TOL};
use crate::fwt::{self, Normalization, PacketTree, PyramidCoefficients};

/// Window length of [`Basis::BlockedFourier`].
pub const BLOCK: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// Real orthonormal Fourier basis over the whole input.
    Fourier,
    /// Real orthonormal Fourier basis on each 8-sample window.
    BlockedFourier,
    /// Pyramid with the given filter. `levels: None` means every level for
    /// signals and `log2(min side) - 2` for images.
    Wavelet {
        filter: FilterCoefficients,
        levels: Option<usize>,
    },
    /// Wavelet packet with an arbitrary split tree (signals only).
    Packet {
        filter: FilterCoefficients,
        tree: PacketTree,
    },
}

impl Basis {
    pub fn wavelet(name: &str) -> Result<Self> {
        Ok(Basis::Wavelet {
            filter: FilterCoefficients::builtin(name)?,
            levels: None,
        })
    }

    /// Accepts `fourier`, `blocked-fourier`, `<filter>`, `<filter>:<levels>`
    /// and `packet:<filter>:<tree>` with built-in filter names.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["fourier"] => Ok(Basis::Fourier),
            ["blocked-fourier"] => Ok(Basis::BlockedFourier),
            ["packet", name, tree] => Ok(Basis::Packet {
                filter: FilterCoefficients::builtin(name)?,
                tree: tree.parse()?,
            }),
            [name] => Basis::wavelet(name),
            [name, levels] => Ok(Basis::Wavelet {
                filter: FilterCoefficients::builtin(name)?,
                levels: Some(levels.parse().map_err(|_| {
                    Error::Parse(format!("bad level count '{levels}' in basis '{s}'"))
                })?),
            }),
            _ => Err(Error::Parse(format!("unrecognized basis '{s}'"))),
        }
    }

    fn filter_label(filter: &FilterCoefficients) -> &str {
        filter.name().unwrap_or("custom")
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Fourier => f.write_str("fourier"),
            Basis::BlockedFourier => f.write_str("blocked-fourier"),
            Basis::Wavelet { filter, levels: None } => f.write_str(Self::filter_label(filter)),
            Basis::Wavelet {
                filter,
                levels: Some(l),
            } => write!(f, "{}:{l}", Self::filter_label(filter)),
            Basis::Packet { filter, tree } => write!(f, "packet:{}:{tree}", Self::filter_label(filter)),
        }
    }
}

/// A 1-D signal or a 2-D image; both sides must be powers of two.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Signal(Vec<f64>),
    Image(DMatrix<f64>),
}

impl Data {
    pub fn len(&self) -> usize {
        match self {
            Data::Signal(s) => s.len(),
            Data::Image(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Samples in storage order (column-major for images).
    pub fn as_slice(&self) -> &[f64] {
        match self {
            Data::Signal(s) => s,
            Data::Image(m) => m.as_slice(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Data::Signal(s) => {
                log2_exact(s.len()).ok_or(Error::InvalidLength {
                    len: s.len(),
                    reason: "signal length must be a power of two",
                })?;
            }
            Data::Image(m) => {
                if log2_exact(m.nrows()).is_none() || log2_exact(m.ncols()).is_none() {
                    return Err(Error::InvalidInput(format!(
                        "image dimensions must be powers of two, got {}x{}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub basis: Basis,
    pub kept_fraction: f64,
    pub kept_count: usize,
    /// `||x - x_hat|| / ||x||`, zero for an all-zero input.
    pub l2_rel_error: f64,
    pub linf_error: f64,
    /// Sum of squares of the zeroed coefficients.
    pub discarded_energy: f64,
}

/// `ceil(fraction * n)`, forgiving the last bits of rounding in the product.
pub fn kept_count(fraction: f64, n: usize) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "kept fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let raw = fraction * n as f64;
    let k = (raw - 1e-9 * raw.max(1.0)).ceil() as usize;
    Ok(k.clamp(1, n))
}

/// Real orthonormal Fourier coefficients of a real vector of length `n`:
/// the mean term, then `(Re, Im)` pairs scaled by `sqrt 2` for
/// `k = 1..n/2-1`, then the Nyquist term.
pub fn real_fourier_forward(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let plan = Fft::new(n)?;
    let a: Vec<Complex64> = x.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let (spec, _) = plan.forward(&a)?;
    let y = spec.values;
    let s = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(n);
    out.push(y[0].re * s);
    if n >= 2 {
        let r = std::f64::consts::SQRT_2 * s;
        for yk in &y[1..n / 2] {
            out.push(yk.re * r);
            out.push(yk.im * r);
        }
        out.push(y[n / 2].re * s);
    }
    Ok(out)
}

/// Inverse of [`real_fourier_forward`].
pub fn real_fourier_inverse(c: &[f64]) -> Result<Vec<f64>> {
    let n = c.len();
    let plan = Fft::new(n)?;
    let s = (n as f64).sqrt();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    y[0] = Complex64::new(c[0] * s, 0.0);
    if n >= 2 {
        let r = s / std::f64::consts::SQRT_2;
        for k in 1..n / 2 {
            let v = Complex64::new(c[2 * k - 1], c[2 * k]) * r;
            y[k] = v;
            y[n - k] = v.conj();
        }
        y[n / 2] = Complex64::new(c[n - 1] * s, 0.0);
    }
    Ok(plan.inverse(&y)?.into_iter().map(|v| v.re).collect())
}

fn blocked_forward(x: &[f64]) -> Result<Vec<f64>> {
    let b = BLOCK.min(x.len());
    let mut out = Vec::with_capacity(x.len());
    for chunk in x.chunks(b) {
        out.extend(real_fourier_forward(chunk)?);
    }
    Ok(out)
}

fn blocked_inverse(c: &[f64]) -> Result<Vec<f64>> {
    let b = BLOCK.min(c.len());
    let mut out = Vec::with_capacity(c.len());
    for chunk in c.chunks(b) {
        out.extend(real_fourier_inverse(chunk)?);
    }
    Ok(out)
}

/// Applies a 1-D transform to every column, then every row.
fn separable(m: &DMatrix<f64>, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<DMatrix<f64>> {
    let mut out = m.clone();
    for j in 0..out.ncols() {
        let col = f(out.column(j).as_slice())?;
        out.column_mut(j).copy_from_slice(&col);
    }
    let mut row = Vec::with_capacity(out.ncols());
    for i in 0..out.nrows() {
        row.clear();
        row.extend(out.row(i).iter().copied());
        let t = f(&row)?;
        for (j, v) in t.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// Inverse of [`separable`] given the 1-D inverse: rows first, then columns.
fn separable_inverse(m: &DMatrix<f64>, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<DMatrix<f64>> {
    let mut out = m.clone();
    let mut row = Vec::with_capacity(out.ncols());
    for i in 0..out.nrows() {
        row.clear();
        row.extend(out.row(i).iter().copied());
        let t = f(&row)?;
        for (j, v) in t.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    for j in 0..out.ncols() {
        let col = f(out.column(j).as_slice())?;
        out.column_mut(j).copy_from_slice(&col);
    }
    Ok(out)
}

fn require_orthogonal(filter: &FilterCoefficients) -> Result<()> {
    let (ok, residual) = filter.check_orthogonality(DEFAULT_ORTHO_TOL);
    if ok {
        Ok(())
    } else {
        Err(Error::ConditionOFailed { residual })
    }
}

fn image_levels(m: &DMatrix<f64>, levels: Option<usize>) -> usize {
    levels.unwrap_or_else(|| {
        let ell = log2_exact(m.nrows().min(m.ncols())).unwrap_or(0);
        ell.saturating_sub(2).max(1)
    })
}

/// Flat coefficients of `data` in `basis`.
pub fn transform(data: &Data, basis: &Basis) -> Result<Vec<f64>> {
    data.validate()?;
    match (basis, data) {
        (Basis::Fourier, Data::Signal(x)) => real_fourier_forward(x),
        (Basis::Fourier, Data::Image(m)) => Ok(separable(m, real_fourier_forward)?.as_slice().to_vec()),
        (Basis::BlockedFourier, Data::Signal(x)) => blocked_forward(x),
        (Basis::BlockedFourier, Data::Image(m)) => Ok(separable(m, blocked_forward)?.as_slice().to_vec()),
        (Basis::Wavelet { filter, levels }, Data::Signal(x)) => {
            require_orthogonal(filter)?;
            let levels = levels.unwrap_or_else(|| log2_exact(x.len()).unwrap_or(0));
            if levels == 0 {
                return Ok(x.clone());
            }
            Ok(fwt::analyze(x, filter, levels, Normalization::Orthonormal)?.flatten())
        }
        (Basis::Wavelet { filter, levels }, Data::Image(m)) => {
            require_orthogonal(filter)?;
            let p = fwt::analyze_2d(m, filter, image_levels(m, *levels), Normalization::Orthonormal)?;
            Ok(p.layout.as_slice().to_vec())
        }
        (Basis::Packet { filter, tree }, Data::Signal(x)) => {
            require_orthogonal(filter)?;
            let bands = fwt::packet_analyze(x, filter, tree, Normalization::Orthonormal)?;
            Ok(bands.into_iter().flat_map(|b| b.coeffs).collect())
        }
        (Basis::Packet { .. }, Data::Image(_)) => Err(Error::NotApplicable(
            "packet bases are implemented for 1-D signals only".into(),
        )),
    }
}

/// Inverse of [`transform`]; `like` supplies the shape.
pub fn inverse_transform(coeffs: &[f64], like: &Data, basis: &Basis) -> Result<Data> {
    if coeffs.len() != like.len() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for {} samples",
            coeffs.len(),
            like.len()
        )));
    }
    let as_image = |m: &DMatrix<f64>| DMatrix::from_column_slice(m.nrows(), m.ncols(), coeffs);
    match (basis, like) {
        (Basis::Fourier, Data::Signal(_)) => real_fourier_inverse(coeffs).map(Data::Signal),
        (Basis::Fourier, Data::Image(m)) => separable_inverse(&as_image(m), real_fourier_inverse).map(Data::Image),
        (Basis::BlockedFourier, Data::Signal(_)) => blocked_inverse(coeffs).map(Data::Signal),
        (Basis::BlockedFourier, Data::Image(m)) => separable_inverse(&as_image(m), blocked_inverse).map(Data::Image),
        (Basis::Wavelet { filter, levels }, Data::Signal(_)) => {
            let levels = levels.unwrap_or_else(|| log2_exact(coeffs.len()).unwrap_or(0));
            if levels == 0 {
                return Ok(Data::Signal(coeffs.to_vec()));
            }
            let p = PyramidCoefficients::from_flat(coeffs, levels, Normalization::Orthonormal)?;
            fwt::synthesize(&p, filter).map(Data::Signal)
        }
        (Basis::Wavelet { filter, levels }, Data::Image(m)) => {
            let p = fwt::Pyramid2d {
                layout: as_image(m),
                levels: image_levels(m, *levels),
                normalization: Normalization::Orthonormal,
            };
            fwt::synthesize_2d(&p, filter).map(Data::Image)
        }
        (Basis::Packet { filter, tree }, Data::Signal(_)) => {
            fwt::packet_synthesize(coeffs, filter, tree, Normalization::Orthonormal).map(Data::Signal)
        }
        (Basis::Packet { .. }, Data::Image(_)) => Err(Error::NotApplicable(
            "packet bases are implemented for 1-D signals only".into(),
        )),
    }
}

/// Indices of the `k` largest magnitudes; equal magnitudes go to the lower
/// index.
pub fn largest_indices(coeffs: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..coeffs.len()).collect();
    idx.sort_by(|&a, &b| coeffs[b].abs().total_cmp(&coeffs[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Transform, keep the `ceil(kept_fraction n)` largest coefficients, invert,
/// and measure against the input.
pub fn compress_in_basis(data: &Data, basis: &Basis, kept_fraction: f64) -> Result<(CompressionResult, Data)> {
    let n = data.len();
    let k = kept_count(kept_fraction, n)?;
    let coeffs = transform(data, basis)?;
    let mut kept = vec![0.0; n];
    for i in largest_indices(&coeffs, k) {
        kept[i] = coeffs[i];
    }
    let discarded_energy = coeffs
        .iter()
        .zip(&kept)
        .map(|(c, q)| (c - q) * (c - q))
        .sum();
    let recon = inverse_transform(&kept, data, basis)?;
    let (mut err2, mut norm2, mut linf) = (0.0, 0.0, 0.0f64);
    for (x, y) in data.as_slice().iter().zip(recon.as_slice()) {
        err2 += (x - y) * (x - y);
        norm2 += x * x;
        linf = linf.max((x - y).abs());
    }
    let l2_rel_error = if norm2 > 0.0 { (err2 / norm2).sqrt() } else { err2.sqrt() };
    Ok((
        CompressionResult {
            basis: basis.clone(),
            kept_fraction,
            kept_count: k,
            l2_rel_error,
            linf_error: linf,
            discarded_energy,
        },
        recon,
    ))
}

/// Every basis against every fraction, bases outer. The blocked Fourier
/// basis is appended when the list lacks it.
pub fn contest_report(input: &Data, bases: &[Basis], fractions: &[f64]) -> Result<Vec<CompressionResult>> {
    let mut all = bases.to_vec();
    if !all.contains(&Basis::BlockedFourier) {
        all.push(Basis::BlockedFourier);
    }
    let mut rows = Vec::with_capacity(all.len() * fractions.len());
    for basis in &all {
        for &f in fractions {
            rows.push(compress_in_basis(input, basis, f)?.0);
        }
    }
    Ok(rows)
}

/// Least-squares line through `(x, y)` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the points from the line.
    pub residual: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 4;

pub fn fit_line(points: &[(f64, f64)]) -> Result<DecayFit> {
    let m = points.len();
    if m < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            points: m,
            required: MIN_FIT_POINTS,
        });
    }
    let mf = m as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            points: 1,
            required: MIN_FIT_POINTS,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / mf)
        .sqrt();
    Ok(DecayFit {
        slope,
        intercept,
        residual,
        points: m,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    /// Fourier: `|a_j|` for `j = 0..=n/2` (unitary scaling). Wavelet: the
    /// largest detail magnitude per level, coarse to fine.
    pub magnitudes: Vec<f64>,
    /// `(log2 x, log2 y)` points the fit was made on.
    pub fit_points: Vec<(f64, f64)>,
    /// `None` exactly when `all_zero` is set.
    pub fit: Option<DecayFit>,
    /// Every magnitude considered is below `1e-12`.
    pub all_zero: bool,
}

const ZERO_MAGNITUDE: f64 = 1e-12;

/// Decay of coefficient size for step-like signals.
///
/// Fourier: `log |a_j|` against `log j` for `j` in `[2, n/4]`. A step at a
/// generic position has `|a_j|` oscillating under an envelope `~ 1/j`, with
/// near-zeros wherever `j` times the step position is close to a multiple
/// of `n`; the fit therefore uses the largest `|a_j|` of each octave
/// `[2^m, 2^{m+1})`, which traces the envelope.
///
/// Wavelet: `log2 M_j` against level `j`, where `M_j` is the largest detail
/// magnitude at level `j` (orthonormal scaling, coarse to fine).
pub fn decay_profile(signal: &[f64], basis: &Basis) -> Result<DecayProfile> {
    let n = signal.len();
    log2_exact(n).ok_or(Error::InvalidLength {
        len: n,
        reason: "signal length must be a power of two",
    })?;
    let (magnitudes, candidates): (Vec<f64>, Vec<(f64, f64)>) = match basis {
        Basis::Fourier => {
            let a: Vec<Complex64> = signal.iter().map(|v| Complex64::new(*v, 0.0)).collect();
            let (spec, _) = Fft::new(n)?.forward(&a)?;
            let s = 1.0 / (n as f64).sqrt();
            let mags: Vec<f64> = spec.values[..=n / 2].iter().map(|v| v.norm() * s).collect();
            let mut pts = Vec::new();
            let mut lo = 2;
            while lo <= n / 4 {
                let hi = (2 * lo).min(n / 4 + 1);
                let (j, m) = (lo..hi)
                    .map(|j| (j, mags[j]))
                    .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
                pts.push((j as f64, m));
                lo *= 2;
            }
            (mags, pts)
        }
        Basis::Wavelet { filter, levels } => {
            require_orthogonal(filter)?;
            let levels = levels.unwrap_or_else(|| log2_exact(n).unwrap_or(0));
            if levels == 0 {
                return Err(Error::InsufficientData {
                    points: 0,
                    required: MIN_FIT_POINTS,
                });
            }
            let p = fwt::analyze(signal, filter, levels, Normalization::Orthonormal)?;
            let mags: Vec<f64> = p
                .details
                .iter()
                .map(|d| d.iter().fold(0.0f64, |a, v| a.max(v.abs())))
                .collect();
            let pts = mags.iter().enumerate().map(|(j, m)| (j as f64, *m)).collect();
            (mags, pts)
        }
        other => {
            return Err(Error::NotApplicable(format!(
                "decay profiles are defined for the fourier and wavelet bases, not {other}"
            )))
        }
    };
    if candidates.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            points: candidates.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let all_zero = candidates.iter().all(|(_, m)| *m < ZERO_MAGNITUDE);
    if all_zero {
        return Ok(DecayProfile {
            magnitudes,
            fit_points: Vec::new(),
            fit: None,
            all_zero,
        });
    }
    let log_x = matches!(basis, Basis::Fourier);
    let fit_points: Vec<(f64, f64)> = candidates
        .into_iter()
        .filter(|(_, m)| *m >= ZERO_MAGNITUDE)
        .map(|(x, m)| (if log_x { x.log2() } else { x }, m.log2()))
        .collect();
    let fit = fit_line(&fit_points)?;
    Ok(DecayProfile {
        magnitudes,
        fit_points,
        fit: Some(fit),
        all_zero,
    })
}
