//! Separable 2-D pyramid: one 1-D step along every row, then every column,
//! recursing on the low/low quadrant.

use nalgebra::DMatrix;

use super::{warn_if_not_orthogonal, Normalization, StepFilters};
use crate::error::{log2_exact, Error, Result};
use crate::filters::FilterCoefficients;

/// Detail quadrants at one level. The first letter is the row (horizontal)
/// filter, the second the column (vertical) filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// Row high-pass, column low-pass (top right quadrant).
    Hl,
    /// Row low-pass, column high-pass (bottom left quadrant).
    Lh,
    Hh,
}

/// 2-D coefficients in the usual nested-quadrant layout: the `LL` block of
/// the coarsest level sits in the top-left corner.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid2d {
    pub layout: DMatrix<f64>,
    pub levels: usize,
    pub normalization: Normalization,
}

impl Pyramid2d {
    fn quadrant_size(&self, level: usize) -> (usize, usize) {
        // level 0 is the coarsest detail level
        let shift = self.levels - level;
        (self.layout.nrows() >> shift, self.layout.ncols() >> shift)
    }

    pub fn ll(&self) -> DMatrix<f64> {
        let (r, c) = self.quadrant_size(0);
        self.layout.view((0, 0), (r, c)).into_owned()
    }

    /// Detail quadrant at `level`, counted coarse (0) to fine.
    pub fn band(&self, level: usize, band: Band) -> DMatrix<f64> {
        let (r, c) = self.quadrant_size(level);
        let origin = match band {
            Band::Hl => (0, c),
            Band::Lh => (r, 0),
            Band::Hh => (r, c),
        };
        self.layout.view(origin, (r, c)).into_owned()
    }
}

fn check_image(rows: usize, cols: usize, levels: usize) -> Result<()> {
    let (Some(lr), Some(lc)) = (log2_exact(rows), log2_exact(cols)) else {
        return Err(Error::InvalidInput(format!(
            "image dimensions must be powers of two, got {rows}x{cols}"
        )));
    };
    if levels == 0 || levels > lr.min(lc) {
        return Err(Error::InvalidInput(format!(
            "levels must be in 1..={} for a {rows}x{cols} image, got {levels}",
            lr.min(lc)
        )));
    }
    Ok(())
}

pub fn analyze_2d(
    image: &DMatrix<f64>,
    filter: &FilterCoefficients,
    levels: usize,
    normalization: Normalization,
) -> Result<Pyramid2d> {
    let (rows, cols) = image.shape();
    check_image(rows, cols, levels)?;
    warn_if_not_orthogonal(filter);
    let step = StepFilters::new(filter, normalization);
    let mut layout = image.clone();
    let (mut r, mut c) = (rows, cols);
    let mut line = Vec::new();
    let (mut low, mut high) = (Vec::new(), Vec::new());
    for _ in 0..levels {
        for i in 0..r {
            line.clear();
            line.extend((0..c).map(|j| layout[(i, j)]));
            step.analyze(&line, &mut low, &mut high);
            for (j, v) in low.iter().chain(&high).enumerate() {
                layout[(i, j)] = *v;
            }
        }
        for j in 0..c {
            line.clear();
            line.extend((0..r).map(|i| layout[(i, j)]));
            step.analyze(&line, &mut low, &mut high);
            for (i, v) in low.iter().chain(&high).enumerate() {
                layout[(i, j)] = *v;
            }
        }
        r /= 2;
        c /= 2;
    }
    Ok(Pyramid2d {
        layout,
        levels,
        normalization,
    })
}

pub fn synthesize_2d(pyramid: &Pyramid2d, filter: &FilterCoefficients) -> Result<DMatrix<f64>> {
    let (rows, cols) = pyramid.layout.shape();
    check_image(rows, cols, pyramid.levels)?;
    let step = StepFilters::new(filter, pyramid.normalization);
    let mut out = pyramid.layout.clone();
    let mut line = Vec::new();
    for level in (0..pyramid.levels).rev() {
        let r = rows >> level;
        let c = cols >> level;
        for j in 0..c {
            let (lo, hi): (Vec<f64>, Vec<f64>) =
                ((0..r / 2).map(|i| out[(i, j)]).collect(), (r / 2..r).map(|i| out[(i, j)]).collect());
            step.synthesize(&lo, &hi, &mut line);
            for (i, v) in line.iter().enumerate() {
                out[(i, j)] = *v;
            }
        }
        for i in 0..r {
            let (lo, hi): (Vec<f64>, Vec<f64>) =
                ((0..c / 2).map(|j| out[(i, j)]).collect(), (c / 2..c).map(|j| out[(i, j)]).collect());
            step.synthesize(&lo, &hi, &mut line);
            for (j, v) in line.iter().enumerate() {
                out[(i, j)] = *v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_block() {
        let haar = FilterCoefficients::builtin("haar").unwrap();
        let img = DMatrix::from_element(2, 2, 3.0);
        let p = analyze_2d(&img, &haar, 1, Normalization::Orthonormal).unwrap();
        assert!((p.ll()[(0, 0)] - 6.0).abs() < 1e-14);
        for b in [Band::Hl, Band::Lh, Band::Hh] {
            assert!(p.band(0, b)[(0, 0)].abs() < 1e-14);
        }
    }

    #[test]
    fn impulse_spreads_evenly() {
        let haar = FilterCoefficients::builtin("haar").unwrap();
        let img = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let p = analyze_2d(&img, &haar, 1, Normalization::Orthonormal).unwrap();
        assert!(p.layout.iter().all(|v| (v.abs() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn band_geometry() {
        let d4 = FilterCoefficients::builtin("d4").unwrap();
        let img = DMatrix::from_fn(16, 32, |i, j| (i * 7 + j * 3) as f64);
        let p = analyze_2d(&img, &d4, 2, Normalization::Orthonormal).unwrap();
        assert_eq!(p.ll().shape(), (4, 8));
        assert_eq!(p.band(0, Band::Hh).shape(), (4, 8));
        assert_eq!(p.band(1, Band::Lh).shape(), (8, 16));
        let back = synthesize_2d(&p, &d4).unwrap();
        assert!((back - img).amax() < 1e-10);
    }

    #[test]
    fn rejects_bad_shapes() {
        let haar = FilterCoefficients::builtin("haar").unwrap();
        let img = DMatrix::zeros(6, 8);
        assert!(analyze_2d(&img, &haar, 1, Normalization::Orthonormal).is_err());
        let img = DMatrix::zeros(4, 8);
        assert!(analyze_2d(&img, &haar, 3, Normalization::Orthonormal).is_err());
    }
}
