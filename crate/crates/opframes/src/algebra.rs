//! The matrix algebra `A = M_k(C)` with involution, positivity and norms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tol;

/// An element of the C*-algebra `M_k(C)`: a k-by-k complex matrix, with the
/// conjugate transpose as involution.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    mat: CMat,
}

impl AlgebraElement {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::Malformed {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat })
    }

    pub fn zero(k: usize) -> Self {
        Self {
            mat: CMat::zeros(k, k),
        }
    }

    pub fn identity(k: usize) -> Self {
        Self {
            mat: linalg::identity(k),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat * &other.mat,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            mat: linalg::scale(&self.mat, c),
        }
    }

    /// Operator norm: the largest singular value of the entries.
    pub fn norm(&self) -> f64 {
        linalg::sigma_max(&self.mat)
    }

    /// Positivity: Hermitian within `tol * ||a||` entrywise and minimum
    /// eigenvalue at least `-tol * max(||a||, 1)`. The zero element passes.
    pub fn is_positive(&self, tol: f64) -> bool {
        let scale = self.norm();
        let dev = (&self.mat - self.mat.adjoint())
            .iter()
            .fold(0.0_f64, |a, v| a.max(v.norm()));
        if dev > tol * scale.max(1.0) {
            return false;
        }
        if scale == 0.0 {
            return true;
        }
        linalg::min_eig(&self.mat) >= -tol * scale.max(1.0)
    }

    pub fn is_positive_default(&self) -> bool {
        self.is_positive(tol::POSITIVITY)
    }

    /// Unique positive square root, eigenvalue-wise in the eigenbasis.
    pub fn positive_sqrt(&self) -> Result<Self> {
        if !self.is_positive_default() {
            return Err(Error::NotPositive(linalg::min_eig(&self.mat)));
        }
        Ok(Self {
            mat: linalg::psd_sqrt(&self.mat),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_gaussian as random_cmat, rng_for_seed};

    #[test]
    fn identity_is_positive() {
        assert!(AlgebraElement::identity(2).is_positive_default());
    }

    #[test]
    fn nilpotent_is_not_positive() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(!AlgebraElement::new(m).unwrap().is_positive_default());
    }

    #[test]
    fn gram_is_positive() {
        let mut rng = rng_for_seed(11);
        let g = random_cmat(3, 3, &mut rng);
        let a = AlgebraElement::new(&g.adjoint() * &g).unwrap();
        assert!(a.is_positive_default());
    }

    #[test]
    fn sqrt_scalar_case() {
        let a = AlgebraElement::identity(2).scale(Complex64::new(4.0, 0.0));
        let b = a.positive_sqrt().unwrap();
        assert!(b.sub(&AlgebraElement::identity(2).scale(Complex64::new(2.0, 0.0))).norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_zero() {
        let z = AlgebraElement::zero(3);
        assert_eq!(z.positive_sqrt().unwrap(), z);
    }

    #[test]
    fn sqrt_rejects_non_positive() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let a = AlgebraElement::new(m).unwrap();
        match a.positive_sqrt() {
            Err(Error::NotPositive(l)) => assert!(l < -0.5),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn norm_of_hermitian_diag() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        assert!((AlgebraElement::new(m).unwrap().norm() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_square_rejected() {
        let m = CMat::zeros(2, 3);
        assert!(matches!(
            AlgebraElement::new(m),
            Err(Error::Malformed { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn cstar_identity() {
        let mut rng = rng_for_seed(3);
        for _ in 0..50 {
            let a = AlgebraElement::new(random_cmat(3, 3, &mut rng)).unwrap();
            let lhs = a.adjoint().mul(&a).norm();
            let rhs = a.norm() * a.norm();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }
    }
}
