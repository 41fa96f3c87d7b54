use nalgebra::DMatrix;
use num_complex::Complex64;

/// All eigenvalues of a real square matrix (real Schur form underneath).
pub(crate) fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 {
        return vec![Complex64::new(m[(0, 0)], 0.0)];
    }
    if m.nrows() == 2 {
        // closed form keeps the 2x2 case (the bulk of jsr work) cheap and exact
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let half_tr = 0.5 * (a + d);
        let disc = Complex64::new(half_tr * half_tr - (a * d - b * c), 0.0).sqrt();
        return vec![half_tr + disc, half_tr - disc];
    }
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect()
}

pub(crate) fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest singular value.
pub(crate) fn norm_2(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Maximum absolute row sum.
pub(crate) fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form_matches_schur() {
        let m = DMatrix::from_row_slice(2, 2, &[0.3, -1.2, 0.7, 0.1]);
        let mut fast: Vec<f64> = eigenvalues(&m).iter().map(|z| z.norm()).collect();
        let mut slow: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        fast.sort_by(f64::total_cmp);
        slow.sort_by(f64::total_cmp);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn norms_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -5.0, 1.0]));
        assert!((norm_2(&m) - 5.0).abs() < 1e-12);
        assert_eq!(norm_inf(&m), 5.0);
        assert!((spectral_radius(&m) - 5.0).abs() < 1e-12);
    }
}
