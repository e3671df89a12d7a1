//! Partial-pivoting LU factorization for the small dense systems that show
//! up in stage equations and determinant ratios (dimension ≤ 16 in practice).

use super::matrix::{Matrix, Vector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `P·M = L·U` packed into a single matrix, unit lower triangle implied.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
    /// Largest absolute entry of the original matrix; pivots are judged against it.
    scale: T,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", m.rows(), m.cols())));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let p = (k..n).max_by(|&a, &b| lu[(a, k)].abs().partial_cmp(&lu[(b, k)].abs()).unwrap()).unwrap();
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            if pivot.is_zero() {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Ok(Self { lu, perm, sign, scale: m.max_abs() })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Determinant including the permutation sign; zero pivots give exactly zero.
    pub fn det(&self) -> T {
        (0..self.dim()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    /// First pivot whose magnitude falls below `pivot_tol · max|m_ij|`.
    pub fn singular_pivot(&self) -> Option<usize> {
        let tol = T::pivot_tol() * self.scale;
        (0..self.dim()).find(|&i| !(self.lu[(i, i)].abs() >= tol) || self.scale.is_zero())
    }

    pub fn solve(&self, v: &[T]) -> Result<Vector<T>> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::Dimension(format!("right-hand side has length {}, expected {n}", v.len())));
        }
        if let Some(index) = self.singular_pivot() {
            return Err(Error::Singular { index });
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| v[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        Ok(Vector(x))
    }
}

/// Determinant by pivoted LU. Singular input is not an error; it yields a
/// (near-)zero value with the sign of the factorization.
pub fn lu_det<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(Lu::factor(m)?.det())
}

/// Determinant that refuses matrices singular to the pivot tolerance.
pub fn det_nonsingular<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    let lu = Lu::factor(m)?;
    match lu.singular_pivot() {
        Some(index) => Err(Error::Singular { index }),
        None => Ok(lu.det()),
    }
}

pub fn lu_solve<T: Scalar>(m: &Matrix<T>, v: &[T]) -> Result<Vector<T>> {
    Lu::factor(m)?.solve(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn det_identity() {
        assert_eq!(lu_det(&Matrix::<f64>::identity(3)).unwrap(), 1.0);
    }

    #[test]
    fn det_rotation_like() {
        // 1 + z²/4 at z = 2
        let z = 2.0;
        assert_relative_eq!(lu_det(&m(&[&[1.0, -z / 2.0], &[z / 2.0, 1.0]])).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn det_lobatto_iiib_shift() {
        // I - A for the 2-stage Lobatto IIIB matrix [[1/2, 0], [1/2, 0]]
        let d = lu_det(&m(&[&[0.5, 0.0], &[-0.5, 1.0]])).unwrap();
        assert_relative_eq!(d, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn det_sign_under_row_swap() {
        assert_eq!(lu_det(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap(), -1.0);
    }

    #[test]
    fn det_rejects_non_square() {
        assert!(matches!(lu_det(&m(&[&[1.0, 2.0, 3.0]])), Err(Error::Dimension(_))));
    }

    #[test]
    fn solve_examples() {
        assert_eq!(lu_solve(&Matrix::<f64>::identity(2), &[3.0, 4.0]).unwrap().0, vec![3.0, 4.0]);
        assert_eq!(lu_solve(&m(&[&[2.0, 0.0], &[0.0, 4.0]]), &[2.0, 4.0]).unwrap().0, vec![1.0, 1.0]);
        // (1 + z²/4) x = 1 for the midpoint A = [[1/2]], z = 2
        let x = lu_solve(&m(&[&[1.0 + 4.0 * 0.25]]), &[1.0]).unwrap();
        assert_relative_eq!(x[0], 0.5);
    }

    #[test]
    fn singular_reports_pivot() {
        let err = lu_solve(&m(&[&[1.0, 2.0], &[2.0, 4.0]]), &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::Singular { index: 1 });
        assert!(det_nonsingular(&m(&[&[1.0, 2.0], &[2.0, 4.0]])).is_err());
    }

    #[test]
    fn solve_length_mismatch() {
        assert!(matches!(lu_solve(&Matrix::<f64>::identity(2), &[1.0]), Err(Error::Dimension(_))));
    }

    fn square(n: usize) -> impl Strategy<Value = Matrix<f64>> {
        proptest::collection::vec(-10.0f64..10.0, n * n).prop_map(move |d| Matrix::from_vec(n, n, d).unwrap())
    }

    /// |det| relative to the product of row norms (1 for orthogonal rows).
    fn hadamard_ratio(m: &Matrix<f64>, det: f64) -> f64 {
        let prod: f64 = (0..m.rows()).map(|i| m.row(i).iter().map(|x| x * x).sum::<f64>().sqrt()).product();
        det.abs() / prod
    }

    proptest! {
        #[test]
        fn det_is_multiplicative((a, b) in (1usize..=8).prop_flat_map(|n| (square(n), square(n)))) {
            let da = lu_det(&a).unwrap();
            let db = lu_det(&b).unwrap();
            // Skip nearly singular draws, whose determinants carry no relative accuracy.
            prop_assume!(hadamard_ratio(&a, da) > 1e-3 && hadamard_ratio(&b, db) > 1e-3);
            let dab = lu_det(&a.matmul(&b)).unwrap();
            prop_assert!((dab - da * db).abs() <= 1e-10 * (da * db).abs(), "{dab} vs {}", da * db);
        }

        #[test]
        fn solve_inverts_multiplication(n in 1usize..=8, seed in proptest::collection::vec(-1.0f64..1.0, 64 + 8)) {
            // Diagonally dominant keeps the system well conditioned.
            let a = Matrix::from_fn(n, n, |i, j| seed[i * 8 + j] + if i == j { 2.0 * n as f64 } else { 0.0 });
            let x: Vec<f64> = seed[64..64 + n].to_vec();
            let v = a.mul_vec(&x);
            let back = lu_solve(&a, &v).unwrap();
            for (u, w) in back.iter().zip(&x) {
                prop_assert!((u - w).abs() <= 1e-10);
            }
        }
    }
}
