//! Dense complex operators tagged with ħ.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix in a representation with a fixed ħ.
///
/// Arithmetic through the operator traits panics on a dimension or ħ
/// mismatch; fallible entry points call [`Operator::ensure_compatible`] first.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: CMatrix,
    hbar: f64,
}

impl Operator {
    pub fn new(mat: CMatrix, hbar: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { mat, hbar })
    }

    pub(crate) fn from_parts(mat: CMatrix, hbar: f64) -> Self {
        debug_assert!(mat.is_square());
        Self { mat, hbar }
    }

    pub fn identity(dim: usize, hbar: f64) -> Self {
        Self::from_parts(CMatrix::identity(dim, dim), hbar)
    }

    pub fn zeros(dim: usize, hbar: f64) -> Self {
        Self::from_parts(CMatrix::zeros(dim, dim), hbar)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn ensure_compatible(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { left: self.dim(), right: other.dim() });
        }
        if self.hbar != other.hbar {
            return Err(Error::HbarMismatch { left: self.hbar, right: other.hbar });
        }
        Ok(())
    }

    pub fn ensure_all_compatible(ops: &[&Operator]) -> Result<()> {
        if let Some((first, rest)) = ops.split_first() {
            for op in rest {
                first.ensure_compatible(op)?;
            }
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.mat.adjoint(), self.hbar)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_parts(&self.mat * factor, self.hbar)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.mat.clone().svd(false, false).singular_values.max()
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// ‖A − A†‖_F
    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    /// Fails with [`Error::NotHermitean`] when ‖A − A†‖ > 10⁻¹²·‖A‖.
    pub fn ensure_hermitean(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > 1e-12 * self.norm() {
            Err(Error::NotHermitean { deviation })
        } else {
            Ok(())
        }
    }

    /// Eigen-decomposition of the hermitean part: ascending eigenvalues, unitary U.
    pub fn hermitean_eigen(&self) -> Result<(DVector<f64>, CMatrix)> {
        self.ensure_hermitean()?;
        let herm = (&self.mat + self.mat.adjoint()) * c(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let vectors = CMatrix::from_fn(self.dim(), self.dim(), |r, col| eig.eigenvectors[(r, order[col])]);
        Ok((values, vectors))
    }

    /// f(A) for hermitean A through its eigen-decomposition.
    pub fn hermitean_function(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (values, u) = self.hermitean_eigen()?;
        let diag = CMatrix::from_diagonal(&values.map(|v| c(f(v), 0.0)));
        Ok(Self::from_parts(&u * diag * u.adjoint(), self.hbar))
    }

    pub fn try_inverse(&self) -> Result<Self> {
        self.mat
            .clone()
            .try_inverse()
            .map(|m| Self::from_parts(m, self.hbar))
            .ok_or_else(|| Error::InvalidArgument("operator is singular".into()))
    }

    /// Block-diagonal direct sum; all blocks share ħ.
    pub fn direct_sum(blocks: &[CMatrix], hbar: f64) -> Self {
        let dim = blocks.iter().map(|b| b.nrows()).sum();
        let mut out = CMatrix::zeros(dim, dim);
        let mut offset = 0;
        for b in blocks {
            let n = b.nrows();
            out.view_mut((offset, offset), (n, n)).copy_from(b);
            offset += n;
        }
        Self::from_parts(out, hbar)
    }
}

fn assert_compatible(a: &Operator, b: &Operator) {
    if let Err(e) = a.ensure_compatible(b) {
        panic!("incompatible operators: {e}");
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_compatible(self, rhs);
        Operator::from_parts(&self.mat * &rhs.mat, self.hbar)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        assert_compatible(self, rhs);
        Operator::from_parts(&self.mat + &rhs.mat, self.hbar)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_compatible(self, rhs);
        Operator::from_parts(&self.mat - &rhs.mat, self.hbar)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_parts(-&self.mat, self.hbar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square_and_bad_hbar() {
        assert!(matches!(Operator::new(CMatrix::zeros(2, 3), 1.0), Err(Error::NotSquare { .. })));
        assert!(Operator::new(CMatrix::zeros(2, 2), 0.0).is_err());
    }

    #[test]
    fn compatibility_checks() {
        let a = Operator::identity(2, 1.0);
        let b = Operator::identity(3, 1.0);
        let h = Operator::identity(2, 2.0);
        assert_eq!(a.ensure_compatible(&b), Err(Error::DimMismatch { left: 2, right: 3 }));
        assert!(matches!(a.ensure_compatible(&h), Err(Error::HbarMismatch { .. })));
    }

    #[test]
    fn hermitean_function_square_root() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let a = Operator::new(m, 1.0).unwrap();
        let root = a.hermitean_function(f64::sqrt).unwrap();
        assert!((&(&root * &root) - &a).norm() < 1e-14);
    }

    #[test]
    fn non_hermitean_eigen_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let a = Operator::new(m, 1.0).unwrap();
        assert!(matches!(a.hermitean_eigen(), Err(Error::NotHermitean { .. })));
    }
}
