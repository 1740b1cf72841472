use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eigen::EigenDecomposition;
use crate::error::{Error, Result};

/// Per-entry tolerance for `H_ij == conj(H_ji)`.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace and positivity slack for density matrices and test operators.
pub const STATE_TOL: f64 = 1e-10;

/// Dense self-adjoint operator on a `dim`-dimensional Hilbert space.
///
/// Construction through [`HermitianOperator::new`] checks Hermiticity and then
/// stores the exactly symmetrized matrix `(H + H†)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
}

/// Largest `|H_ij - conj(H_ji)|` over all entries.
pub fn max_asymmetry(matrix: &DMatrix<Complex64>) -> f64 {
    let n = matrix.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let asym = max_asymmetry(&matrix);
        if !(asym <= HERMITICITY_TOL) {
            return Err(Error::NotHermitian {
                max_asymmetry: asym,
            });
        }
        Ok(Self::hermitize(matrix))
    }

    /// Symmetrizes without checking. Used for results that are Hermitian up to rounding.
    pub(crate) fn hermitize(matrix: DMatrix<Complex64>) -> Self {
        let adj = matrix.adjoint();
        Self {
            matrix: (matrix + adj).scale(0.5),
        }
    }

    /// Build from row-major real and imaginary parts.
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        let n2 = dim * dim;
        if re.len() != n2 || im.len() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                actual: re.len().min(im.len()),
            });
        }
        let data: Vec<Complex64> = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Self::new(DMatrix::from_row_slice(dim, dim, &data))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        Self { matrix: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        }
    }

    pub fn pauli_y() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        }
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn projector(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let n = psi.len();
        let m = DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Ok(Self::hermitize(m))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Hilbert–Schmidt pairing `(A|B) = tr(A† B) = tr(A B)`, real for Hermitian operands.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * s),
        }
    }

    /// `U H U†` for an arbitrary square `U` of matching size.
    pub fn conjugated(&self, u: &DMatrix<Complex64>) -> Self {
        Self::hermitize(u * &self.matrix * u.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn eig(&self) -> EigenDecomposition {
        EigenDecomposition::new(self)
    }

    /// All off-diagonal entries exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                if i != j && self.matrix[(i, j)] != Complex64::new(0.0, 0.0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eig().eigenvalues().iter().map(|w| w.abs()).sum()
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scaled(-1.0)
    }
}

/// Unit-trace positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !((tr - 1.0).abs() <= STATE_TOL) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = op.eig().min();
        if !(min >= -STATE_TOL) {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min:.3e} is negative"
            )));
        }
        Ok(Self { op })
    }

    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::new(HermitianOperator::new(matrix)?)
    }

    /// Classical state with the given probabilities on the diagonal.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(probs))
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Ok(Self {
            op: HermitianOperator::projector(psi)?,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scaled(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.op.matrix()
    }

    /// `tr(ρ H)`.
    pub fn expectation(&self, observable: &HermitianOperator) -> f64 {
        self.op.inner(observable)
    }

    pub fn conjugated(&self, u: &DMatrix<Complex64>) -> Self {
        Self::new_unchecked(self.op.conjugated(u))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::new_unchecked(self.op.kron(&other.op))
    }

    /// Convex combination `w ρ + (1 - w) σ`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        self.op.check_dim(&other.op)?;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidArgument(format!("mixing weight {w} outside [0, 1]")));
        }
        Ok(Self::new_unchecked(&self.op.scaled(w) + &other.op.scaled(1.0 - w)))
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        0.5 * (&self.op - &other.op).trace_norm()
    }
}

/// Operator `Γ` with `0 ≤ Γ ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestOperator {
    op: HermitianOperator,
}

impl TestOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let eig = op.eig();
        let (min, max) = (eig.min(), eig.max());
        if !(min >= -STATE_TOL && max <= 1.0 + STATE_TOL) {
            return Err(Error::InvalidTestOperator { min, max });
        }
        Ok(Self { op })
    }

    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian_with_asymmetry() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.25, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        match HermitianOperator::new(m) {
            Err(Error::NotHermitian { max_asymmetry }) => {
                assert!((max_asymmetry - 0.25).abs() < 1e-15)
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::diagonal(&[0.9, 0.1]).is_ok());
        assert!(DensityMatrix::diagonal(&[0.9, 0.2]).is_err());
        assert!(DensityMatrix::diagonal(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn test_operator_spectrum_checked() {
        assert!(TestOperator::new(HermitianOperator::from_real_diagonal(&[0.0, 1.0])).is_ok());
        assert!(TestOperator::new(HermitianOperator::pauli_z()).is_err());
    }

    #[test]
    fn inner_is_trace_of_product() {
        let x = HermitianOperator::pauli_x();
        let y = HermitianOperator::pauli_y();
        assert_eq!(x.inner(&x), 2.0);
        assert_eq!(x.inner(&y), 0.0);
    }
}
