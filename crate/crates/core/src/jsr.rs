//! Joint spectral radius of a matrix pair.
//!
//! For every word length `m` up to the requested depth, all `2^m` products
//! are formed. Norms bound the radius from above,
//! `rho(A, B) <= (max ||Pi_m||)^{1/m}`, and spectral radii bound it from
//! below, `(rho(Pi_m))^{1/m} <= rho(A, B)`. Both sides converge to the
//! radius as `m` grows.

use nalgebra::DMatrix;

use crate::dilation::MatrixPair;
use crate::error::{Error, Result};
use crate::filters::FilterCoefficients;
use crate::linalg;

/// Depth above which exhaustive enumeration is refused.
pub const MAX_DEPTH: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixNorm {
    /// Largest singular value.
    #[default]
    Spectral,
    /// Maximum absolute row sum.
    Infinity,
}

impl MatrixNorm {
    fn apply(self, m: &DMatrix<f64>) -> f64 {
        match self {
            MatrixNorm::Spectral => linalg::norm_2(m),
            MatrixNorm::Infinity => linalg::norm_inf(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsrEstimate {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
    /// Product attaining `lower`, `false` for `A`, `true` for `B`.
    pub argmax_word: Vec<bool>,
}

impl JsrEstimate {
    pub fn word_string(&self) -> String {
        self.argmax_word.iter().map(|b| if *b { 'B' } else { 'A' }).collect()
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

struct Search<'a> {
    a: &'a DMatrix<f64>,
    b: &'a DMatrix<f64>,
    norm: MatrixNorm,
    depth: usize,
    max_norm: Vec<f64>,
    lower: f64,
    lower_word: Vec<bool>,
    word: Vec<bool>,
}

impl Search<'_> {
    fn visit(&mut self, product: &DMatrix<f64>) {
        let m = self.word.len();
        let norm = self.norm.apply(product);
        self.max_norm[m - 1] = self.max_norm[m - 1].max(norm);
        // rho(P) <= ||P||: the eigenvalue solve can only help when the norm
        // root already beats the current lower bound
        if norm.powf(1.0 / m as f64) > self.lower {
            let r = linalg::spectral_radius(product).powf(1.0 / m as f64);
            if r > self.lower {
                self.lower = r;
                self.lower_word = self.word.clone();
            }
        }
        if m < self.depth {
            for bit in [false, true] {
                let next = product * if bit { self.b } else { self.a };
                self.word.push(bit);
                self.visit(&next);
                self.word.pop();
            }
        }
    }
}

/// Bounds from all products of length `1..=depth`. `upper` is the minimum
/// over lengths of the worst norm root, `lower` the maximum over all words
/// of the spectral-radius root, so both tighten monotonically with depth.
pub fn jsr_bounds(a: &DMatrix<f64>, b: &DMatrix<f64>, depth: usize, norm: MatrixNorm) -> Result<JsrEstimate> {
    if !a.is_square() || !b.is_square() || a.shape() != b.shape() {
        return Err(Error::InvalidInput(format!(
            "matrices must be square and of equal size, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if a.nrows() == 0 {
        return Err(Error::InvalidInput("empty matrices".into()));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::InvalidInput(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    let mut search = Search {
        a,
        b,
        norm,
        depth,
        max_norm: vec![0.0; depth],
        lower: 0.0,
        lower_word: vec![false],
        word: Vec::with_capacity(depth),
    };
    for (bit, m) in [(false, a), (true, b)] {
        search.word.push(bit);
        search.visit(m);
        search.word.pop();
    }
    let upper = search
        .max_norm
        .iter()
        .enumerate()
        .map(|(i, n)| n.powf(1.0 / (i + 1) as f64))
        .fold(f64::INFINITY, f64::min);
    Ok(JsrEstimate {
        lower: search.lower,
        upper,
        depth,
        argmax_word: search.lower_word,
    })
}

/// `A` and `B` of the refinement recursion restricted to the subspace
/// `sum v_i = 0`, which both leave invariant when the sum rule holds.
///
/// Coordinates are taken in the difference basis `e_i - e_{i+1}`; a vector
/// `v` in the subspace has coordinates equal to its partial sums.
pub fn reduced_pair(filter: &FilterCoefficients) -> Result<MatrixPair> {
    if !filter.check_sums(1e-10) {
        return Err(Error::InvalidFilter(
            "reduction needs sum c_even = sum c_odd = 1".into(),
        ));
    }
    let full = MatrixPair::from_filter(filter);
    let n = full.dim();
    let restrict = |m: &DMatrix<f64>| {
        DMatrix::from_fn(n - 1, n - 1, |r, s| {
            // column s of the restriction: partial sums of m (e_s - e_{s+1})
            (0..=r).map(|i| m[(i, s)] - m[(i, s + 1)]).sum()
        })
    };
    Ok(MatrixPair {
        a: restrict(&full.a),
        b: restrict(&full.b),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate {
    /// `-log2(upper)`: a guaranteed exponent.
    pub alpha_lower: f64,
    /// `-log2(lower)`: no larger exponent is certified by this pair.
    pub alpha_upper: f64,
    /// `upper < 1`, which certifies continuity.
    pub continuous: bool,
    pub jsr: JsrEstimate,
}

/// Hölder exponent interval of `phi` from the reduced pair.
pub fn holder_estimate(filter: &FilterCoefficients, depth: usize) -> Result<HolderEstimate> {
    if filter.degree() < 2 {
        return Err(Error::NotApplicable(
            "a two-tap filter leaves no complementary subspace to measure".into(),
        ));
    }
    let pair = reduced_pair(filter)?;
    let jsr = jsr_bounds(&pair.a, &pair.b, depth, MatrixNorm::Spectral)?;
    Ok(HolderEstimate {
        alpha_lower: -jsr.upper.log2(),
        alpha_upper: -jsr.lower.log2(),
        continuous: jsr.upper < 1.0,
        jsr,
    })
}
