use num_complex::Complex;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Both roots of `λ² − tr·λ + det = 0` for a 2×2 matrix.
///
/// Real roots come back ordered `λ₁ ≥ λ₂`; complex roots come back as an
/// exact conjugate pair with `Im λ₁ > 0`.
pub fn eig2<T: Scalar>(m: &Matrix<T>) -> Result<[Complex<T>; 2]> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension(format!("eig2 needs a 2x2 matrix, got {}x{}", m.rows(), m.cols())));
    }
    let tr = m.trace();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    Ok(roots_from_invariants(tr, det))
}

pub(crate) fn roots_from_invariants<T: Scalar>(tr: T, det: T) -> [Complex<T>; 2] {
    let two = T::lit(2.0);
    let disc = tr * tr - T::lit(4.0) * det;
    if disc >= T::zero() {
        let sq = disc.sqrt();
        // Avoid cancellation in the smaller root.
        let big = if tr >= T::zero() { (tr + sq) / two } else { (tr - sq) / two };
        let small = if big.is_zero() { T::zero() } else { det / big };
        let (l1, l2) = if big >= small { (big, small) } else { (small, big) };
        [Complex::new(l1, T::zero()), Complex::new(l2, T::zero())]
    } else {
        let re = tr / two;
        let im = (-disc).sqrt() / two;
        [Complex::new(re, im), Complex::new(re, -im)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(a: f64, b: f64, c: f64, d: f64) -> Matrix<f64> {
        Matrix::from_rows(&[[a, b], [c, d]]).unwrap()
    }

    #[test]
    fn elliptic_pair() {
        let beta = 2.0;
        let [l1, l2] = eig2(&mat(0.0, -beta * beta, 1.0, 0.0)).unwrap();
        assert_eq!((l1.re, l1.im), (0.0, 2.0));
        assert_eq!(l2, l1.conj());
    }

    #[test]
    fn hyperbolic_pair() {
        let [l1, l2] = eig2(&mat(-1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!((l1.re, l2.re), (1.0, -1.0));
        assert_eq!((l1.im, l2.im), (0.0, 0.0));
    }

    #[test]
    fn repeated_root() {
        let [l1, l2] = eig2(&mat(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!((l1.re, l2.re), (1.0, 1.0));
    }

    #[test]
    fn rejects_wrong_shape() {
        assert!(eig2(&Matrix::<f64>::identity(3)).is_err());
    }

    proptest! {
        #[test]
        fn vieta(a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0, d in -50.0f64..50.0) {
            let m = mat(a, b, c, d);
            let [l1, l2] = eig2(&m).unwrap();
            let sum = l1 + l2;
            let prod = l1 * l2;
            let det = a * d - b * c;
            let scale = 1.0 + m.max_abs() * m.max_abs();
            prop_assert!((sum.re - (a + d)).abs() <= 1e-12 * scale && sum.im.abs() <= 1e-12 * scale);
            prop_assert!((prod.re - det).abs() <= 1e-12 * scale && prod.im.abs() <= 1e-12 * scale);
        }
    }
}
