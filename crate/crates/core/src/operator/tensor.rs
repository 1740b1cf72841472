use nalgebra::DMatrix;
use num_complex::Complex64;

use super::hermitian::{DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Largest Hilbert-space dimension any tensor power may reach.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// `dim^n`, rejected when above `cap`.
pub fn checked_power_dim(dim: usize, n: usize, cap: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("tensor power needs N >= 1".into()));
    }
    let total = (dim as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::DimensionCap { dim: total, cap });
    }
    Ok(total as usize)
}

/// `H ⊗ H ⊗ … ⊗ H` (`n` factors).
pub fn operator_power(h: &HermitianOperator, n: usize, cap: usize) -> Result<HermitianOperator> {
    checked_power_dim(h.dim(), n, cap)?;
    let mut out = h.clone();
    for _ in 1..n {
        out = out.kron(h);
    }
    Ok(out)
}

pub fn tensor_power(rho: &DensityMatrix, n: usize, cap: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(operator_power(
        rho.as_operator(),
        n,
        cap,
    )?))
}

/// Sum over `k` of `base ⊗ … ⊗ slot(k) ⊗ … ⊗ base`, the "one different factor" lift.
pub fn single_slot_sum(
    slot: &HermitianOperator,
    base: &HermitianOperator,
    n: usize,
    cap: usize,
) -> Result<HermitianOperator> {
    slot.check_dim(base)?;
    let total = checked_power_dim(base.dim(), n, cap)?;
    let mut acc = HermitianOperator::zeros(total);
    for k in 0..n {
        let mut term = if k == 0 { slot.clone() } else { base.clone() };
        for j in 1..n {
            term = term.kron(if j == k { slot } else { base });
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state of a bipartite `dims.0 × dims.1` operator.
pub fn partial_trace(
    rho_ab: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(partial_trace_operator(
        rho_ab.as_operator(),
        dims,
        keep,
    )?))
}

pub fn partial_trace_operator(
    h: &HermitianOperator,
    (da, db): (usize, usize),
    keep: Subsystem,
) -> Result<HermitianOperator> {
    if da * db != h.dim() || da == 0 || db == 0 {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            actual: h.dim(),
        });
    }
    let m = h.matrix();
    let out = match keep {
        Subsystem::A => DMatrix::from_fn(da, da, |i, j| {
            (0..db).fold(Complex64::new(0.0, 0.0), |s, k| s + m[(i * db + k, j * db + k)])
        }),
        Subsystem::B => DMatrix::from_fn(db, db, |i, j| {
            (0..da).fold(Complex64::new(0.0, 0.0), |s, k| s + m[(k * db + i, k * db + j)])
        }),
    };
    Ok(HermitianOperator::hermitize(out))
}
