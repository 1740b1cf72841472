use nalgebra::DMatrix;
use num_complex::Complex64;

use super::hermitian::{DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Allowed deviation of `Σ K†K` from the identity, per entry.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map `ρ ↦ Σ_k K_k ρ K_k†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    input_dim: usize,
    output_dim: usize,
    ops: Vec<DMatrix<Complex64>>,
}

impl KrausChannel {
    pub fn new(ops: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?;
        let (output_dim, input_dim) = first.shape();
        for k in &ops {
            if k.shape() != (output_dim, input_dim) {
                return Err(Error::DimensionMismatch {
                    expected: output_dim * input_dim,
                    actual: k.nrows() * k.ncols(),
                });
            }
        }
        let error = completeness_error(&ops, input_dim);
        if !(error <= COMPLETENESS_TOL) {
            return Err(Error::IncompleteKraus { error });
        }
        Ok(Self {
            input_dim,
            output_dim,
            ops,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            input_dim: dim,
            output_dim: dim,
            ops: vec![DMatrix::identity(dim, dim)],
        }
    }

    /// Measure in the computational basis and replace by a uniformly random
    /// basis state: Kraus operators `|i⟩⟨j| / √d`.
    pub fn full_depolarizing(dim: usize) -> Self {
        let s = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let mut ops = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut k = DMatrix::zeros(dim, dim);
                k[(i, j)] = s;
                ops.push(k);
            }
        }
        Self {
            input_dim: dim,
            output_dim: dim,
            ops,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus_operators(&self) -> &[DMatrix<Complex64>] {
        &self.ops
    }

    pub fn completeness_error(&self) -> f64 {
        completeness_error(&self.ops, self.input_dim)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: rho.dim(),
            });
        }
        let mut out = DMatrix::zeros(self.output_dim, self.output_dim);
        for k in &self.ops {
            out += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityMatrix::new_unchecked(HermitianOperator::hermitize(
            out,
        )))
    }
}

fn completeness_error(ops: &[DMatrix<Complex64>], input_dim: usize) -> f64 {
    let mut sum = DMatrix::<Complex64>::zeros(input_dim, input_dim);
    for k in ops {
        sum += k.adjoint() * k;
    }
    sum -= DMatrix::identity(input_dim, input_dim);
    sum.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
