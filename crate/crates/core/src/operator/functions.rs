use super::eigen::EigenDecomposition;
use super::hermitian::{HermitianOperator, STATE_TOL};
use crate::error::{Error, Result};

/// Eigenvalues at or below this fraction of the largest one count as kernel.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpFunction {
    Exp,
    /// Natural log on the support; kernel directions map to 0.
    LogOnSupport,
}

/// Spectral support cutoff for a positive semidefinite spectrum.
pub(crate) fn support_cutoff(eigenvalues: &[f64]) -> f64 {
    let top = eigenvalues.iter().cloned().fold(0.0, f64::max);
    SUPPORT_THRESHOLD * top
}

pub fn op_function(h: &HermitianOperator, f: OpFunction) -> Result<HermitianOperator> {
    let eig = h.eig();
    match f {
        OpFunction::Exp => Ok(eig.map(f64::exp)),
        OpFunction::LogOnSupport => {
            if eig.min() < -STATE_TOL {
                return Err(Error::LogDomain {
                    min_eigenvalue: eig.min(),
                });
            }
            let cut = support_cutoff(eig.eigenvalues());
            Ok(eig.map(|w| if w > cut { w.ln() } else { 0.0 }))
        }
    }
}

/// First divided difference of `exp` at `(a, b)`, with limit `e^a` on the diagonal.
pub(crate) fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let half = 0.5 * (a - b);
    let mid = (0.5 * (a + b)).exp();
    if half.abs() < 1e-8 {
        mid * (1.0 + half * half / 6.0)
    } else {
        mid * half.sinh() / half
    }
}

/// Fréchet derivative of `exp` at the operator whose spectral data is `eig`,
/// in direction `direction`. The eigenvalues may carry a shift; the caller
/// rescales accordingly.
pub(crate) fn frechet_exp_in_basis(
    eig: &EigenDecomposition,
    direction: &HermitianOperator,
) -> HermitianOperator {
    let w = eig.eigenvalues();
    let n = w.len();
    let mut rotated = eig.rotate_in(direction.matrix());
    for j in 0..n {
        for i in 0..n {
            rotated[(i, j)] *= exp_divided_difference(w[i], w[j]);
        }
    }
    HermitianOperator::hermitize(eig.rotate_out(&rotated))
}

/// Directional derivative of the matrix exponential at `a` along `e`.
pub fn frechet_exp(a: &HermitianOperator, e: &HermitianOperator) -> Result<HermitianOperator> {
    a.check_dim(e)?;
    Ok(frechet_exp_in_basis(&a.eig(), e))
}

/// Spectral split `H = P - M`, `P, M ≥ 0`, `PM = 0`.
#[derive(Clone, Debug)]
pub struct PosNegParts {
    pub positive: HermitianOperator,
    pub negative: HermitianOperator,
    /// `tr P + tr M`.
    pub trace_norm: f64,
}

impl PosNegParts {
    pub fn positive_trace(&self) -> f64 {
        self.positive.trace()
    }

    pub fn negative_trace(&self) -> f64 {
        self.negative.trace()
    }
}

pub fn pos_neg_parts(h: &HermitianOperator) -> PosNegParts {
    let eig = h.eig();
    let pos: Vec<f64> = eig.eigenvalues().iter().map(|&w| w.max(0.0)).collect();
    let neg: Vec<f64> = eig.eigenvalues().iter().map(|&w| (-w).max(0.0)).collect();
    let trace_norm = pos.iter().sum::<f64>() + neg.iter().sum::<f64>();
    PosNegParts {
        positive: eig.from_weights(&pos),
        negative: eig.from_weights(&neg),
        trace_norm,
    }
}
