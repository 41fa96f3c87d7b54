//! Solving `phi(x) = sum_k c_k phi(2x - k)` on dyadic grids.
//!
//! Values at the integers come from the eigenvector for eigenvalue 1 of
//! `[c_{2i-j}]`; every finer dyadic point is then a finite combination of
//! coarser ones, so the samples are exact up to rounding. The same values
//! follow from products of the two matrices `A = [c_{2i-j}]` and
//! `B = [c_{2i-j+1}]` acting on `v(x) = (phi(x), ..., phi(x+N-1))`, one
//! factor per binary digit of `x`. The Fourier route is the infinite
//! product of symbols.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filters::FilterCoefficients;

const SUM_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-9;

/// `phi(0), phi(1), ..., phi(N)`, normalized to sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerValues {
    pub values: Vec<f64>,
    /// Eigenvalue 1 of the full `(N+1)`-point system is not simple. The
    /// returned vector is still a solution, chosen as described on
    /// [`integer_values`].
    pub degenerate: bool,
}

impl IntegerValues {
    /// `phi(1)..phi(N-1)`.
    pub fn interior(&self) -> &[f64] {
        let n = self.values.len();
        if n <= 2 {
            &[]
        } else {
            &self.values[1..n - 1]
        }
    }
}

/// Values of `phi` at the integers.
///
/// For `N >= 2` the endpoints are `phi(0) = phi(N) = 0` and the interior
/// values solve the `(N-1)x(N-1)` system `phi(i) = sum_j c_{2i-j} phi(j)`.
/// If eigenvalue 1 has a multi-dimensional eigenspace the all-ones vector is
/// projected onto it, giving the symmetric solution, and the result is
/// flagged degenerate. Haar (`N = 1`) uses the half-open box, `phi(0) = 1`.
pub fn integer_values(filter: &FilterCoefficients) -> Result<IntegerValues> {
    if !filter.check_sums(SUM_TOL) {
        let (even, odd) = filter.parity_sums();
        return Err(Error::InvalidFilter(format!(
            "sum rule fails: even sum {even}, odd sum {odd}"
        )));
    }
    let n = filter.degree();
    if n == 1 {
        return Ok(IntegerValues {
            values: vec![1.0, 0.0],
            degenerate: false,
        });
    }
    let dim = n - 1;
    let system = DMatrix::from_fn(dim, dim, |r, s| {
        filter.get(2 * (r as i64 + 1) - (s as i64 + 1))
    });
    let null = eigenspace_of_one(&system);
    let mut degenerate = null.ncols() > 1;
    let v = match null.ncols() {
        0 => return Err(Error::NoSolution),
        1 => null.column(0).into_owned(),
        _ => &null * (null.transpose() * DVector::from_element(dim, 1.0)),
    };
    let total: f64 = v.iter().sum();
    if total.abs() < 1e-12 * v.amax() {
        return Err(Error::DegenerateFilter(
            "eigenvector for eigenvalue 1 sums to zero and cannot be normalized".into(),
        ));
    }
    let full = DMatrix::from_fn(n + 1, n + 1, |r, s| filter.get(2 * r as i64 - s as i64));
    degenerate |= eigenspace_of_one(&full).ncols() > 1;

    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    values.extend(v.iter().map(|x| x / total));
    values.push(0.0);
    Ok(IntegerValues { values, degenerate })
}

/// Orthonormal basis (as columns) of the null space of `m - I`.
fn eigenspace_of_one(m: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = m.nrows();
    let shifted = m - DMatrix::identity(dim, dim);
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^t");
    let scale = svd.singular_values.max().max(1.0);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < EIGEN_TOL * scale)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Samples of `phi` (or `W`) at `origin + k / 2^depth`, `k = 0..=N 2^depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFunctionSamples {
    pub depth: u32,
    pub origin: f64,
    pub values: Vec<f64>,
    pub filter: FilterCoefficients,
    pub degenerate: bool,
}

impl ScalingFunctionSamples {
    pub fn spacing(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.spacing()
    }

    /// Points per unit length.
    fn per_unit(&self) -> usize {
        1 << self.depth
    }

    /// Sample at grid index `k`, zero off the support.
    pub fn at(&self, k: i64) -> f64 {
        if k < 0 {
            return 0.0;
        }
        self.values.get(k as usize).copied().unwrap_or(0.0)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, v)| (self.x(k), *v))
    }

    /// `2^{-J} sum_k f(x_k)`.
    pub fn riemann_integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing()
    }

    /// `2^{-J} sum_k x_k^p f(x_k)`.
    pub fn riemann_moment(&self, p: i32) -> f64 {
        self.points().map(|(x, v)| x.powi(p) * v).sum::<f64>() * self.spacing()
    }

    /// `2^{-J} sum_k f(x_k) e^{i xi x_k}`.
    pub fn discrete_transform(&self, xi: f64) -> Complex64 {
        self.points()
            .map(|(x, v)| v * Complex64::from_polar(1.0, xi * x))
            .sum::<Complex64>()
            * self.spacing()
    }

    /// Worst `|phi(x) - sum c_k phi(2x - k)|` over the grid. Only meaningful
    /// for samples of `phi` (origin 0).
    pub fn dilation_residual(&self) -> f64 {
        let per_unit = self.per_unit() as i64;
        let c = self.filter.coeffs();
        (0..self.values.len() as i64)
            .map(|k| {
                let rhs: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(j, cj)| cj * self.at(2 * k - j as i64 * per_unit))
                    .sum();
                (self.at(k) - rhs).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Worst `|sum_m phi(x + m) - 1|` over one period of the grid.
    pub fn partition_of_unity_residual(&self) -> f64 {
        let per_unit = self.per_unit();
        (0..per_unit)
            .map(|r| {
                let total: f64 = self.values.iter().skip(r).step_by(per_unit).sum();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `phi` on the grid `k / 2^depth` over `[0, N]`, by exact level-by-level
/// refinement from the integer values.
pub fn refine(filter: &FilterCoefficients, depth: u32) -> Result<ScalingFunctionSamples> {
    let ints = integer_values(filter)?;
    let n = filter.degree();
    let c = filter.coeffs();
    let mut level = ints.values;
    for j in 0..depth {
        let per_unit = 1usize << j;
        let len = n * per_unit;
        let mut next = vec![0.0; 2 * len + 1];
        for (i, v) in level.iter().enumerate() {
            next[2 * i] = *v;
        }
        for i in 0..len {
            // x = (2i+1) / 2^{j+1}; 2x - k lies on the level-j grid
            let odd = 2 * i + 1;
            next[odd] = c
                .iter()
                .enumerate()
                .filter_map(|(k, ck)| {
                    odd.checked_sub(k * per_unit)
                        .and_then(|idx| level.get(idx))
                        .map(|v| ck * v)
                })
                .sum();
        }
        level = next;
    }
    Ok(ScalingFunctionSamples {
        depth,
        origin: 0.0,
        values: level,
        filter: filter.clone(),
        degenerate: ints.degenerate,
    })
}

/// The refinement matrices driving `v(x) = A v(2x)` on `[0, 1/2]` and
/// `v(x) = B v(2x - 1)` on `[1/2, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl MatrixPair {
    /// `N x N` matrices `A_ij = c_{2i-j}`, `B_ij = c_{2i-j+1}` (0-based).
    pub fn from_filter(filter: &FilterCoefficients) -> Self {
        let n = filter.degree();
        let a = DMatrix::from_fn(n, n, |i, j| filter.get(2 * i as i64 - j as i64));
        let b = DMatrix::from_fn(n, n, |i, j| filter.get(2 * i as i64 - j as i64 + 1));
        Self { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Product in word order, `false` for `A` and `true` for `B`.
    pub fn product(&self, word: &[bool]) -> DMatrix<f64> {
        let mut p = DMatrix::identity(self.dim(), self.dim());
        for &bit in word {
            p *= if bit { &self.b } else { &self.a };
        }
        p
    }
}

/// Same samples as [`refine`], computed point by point as
/// `v(0.b_1 b_2 ... b_J) = M_{b_1} ... M_{b_J} v(0)`.
pub fn refine_by_matrices(filter: &FilterCoefficients, depth: u32) -> Result<ScalingFunctionSamples> {
    let ints = integer_values(filter)?;
    let n = filter.degree();
    let pair = MatrixPair::from_filter(filter);
    let v0 = DVector::from_column_slice(&ints.values[..n]);
    let per_unit = 1usize << depth;
    let mut values = vec![0.0; n * per_unit + 1];
    let mut word = vec![false; depth as usize];
    for k in 0..per_unit {
        for (bit, w) in word.iter_mut().enumerate() {
            *w = (k >> (depth as usize - 1 - bit)) & 1 == 1;
        }
        let v = pair.product(&word) * &v0;
        for i in 0..n {
            values[k + i * per_unit] = v[i];
        }
    }
    Ok(ScalingFunctionSamples {
        depth,
        origin: 0.0,
        values,
        filter: filter.clone(),
        degenerate: ints.degenerate,
    })
}

/// `W(x) = sum_j d_j phi(2x - j - offset)` on the depth-`depth` grid over
/// its support `[offset/2, offset/2 + N]`.
pub fn wavelet_samples(filter: &FilterCoefficients, depth: u32) -> Result<ScalingFunctionSamples> {
    let phi = refine(filter, depth)?;
    let w = filter.wavelet_coefficients();
    let n = filter.degree();
    let per_unit = 1i64 << depth;
    let values = (0..=(n as i64 * per_unit))
        .map(|k| {
            // 2 x_k - j - offset = k / 2^{J-1} - j
            w.coeffs
                .iter()
                .enumerate()
                .map(|(j, d)| d * phi.at(2 * k - j as i64 * per_unit))
                .sum()
        })
        .collect();
    Ok(ScalingFunctionSamples {
        depth,
        origin: w.offset as f64 / 2.0,
        values,
        filter: filter.clone(),
        degenerate: phi.degenerate,
    })
}

/// `prod_{j=1}^{terms} P(xi / 2^j)`, the truncated transform
/// `int phi(x) e^{i xi x} dx` for filters with `sum c_k = 2`.
pub fn phi_hat(filter: &FilterCoefficients, xi: f64, terms: u32) -> Complex64 {
    let p = filter.symbol();
    (1..=terms)
        .map(|j| p.eval(xi / (j as f64).exp2()))
        .product()
}
