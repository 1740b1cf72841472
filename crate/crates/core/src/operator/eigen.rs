use nalgebra::DMatrix;
use num_complex::Complex64;

use super::hermitian::HermitianOperator;

/// Spectral decomposition `H = V diag(w) V†` with `w` ascending.
///
/// Diagonal inputs skip the dense eigensolver: their eigenvectors are standard
/// basis vectors, recorded as a permutation so that downstream spectral
/// reconstructions stay `O(dim)`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
    // eigenvector k is e_{perm[k]}
    permutation: Option<Vec<usize>>,
}

impl EigenDecomposition {
    pub fn new(h: &HermitianOperator) -> Self {
        let n = h.dim();
        if h.is_diagonal() {
            let diag = h.diagonal();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
            let eigenvalues = perm.iter().map(|&i| diag[i]).collect();
            let mut vecs = DMatrix::zeros(n, n);
            for (k, &i) in perm.iter().enumerate() {
                vecs[(i, k)] = Complex64::new(1.0, 0.0);
            }
            return Self {
                eigenvalues,
                eigenvectors: vecs,
                permutation: Some(perm),
            };
        }

        let se = h.matrix().clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| se.eigenvalues[k]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |i, k| se.eigenvectors[(i, order[k])]);
        Self {
            eigenvalues,
            eigenvectors,
            permutation: None,
        }
    }

    /// Decomposition of `H + delta·1`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            eigenvalues: self.eigenvalues.iter().map(|w| w + delta).collect(),
            eigenvectors: self.eigenvectors.clone(),
            permutation: self.permutation.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors, matching the order of [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("dim >= 1")
    }

    /// `Σ_k weights[k] v_k v_k†`.
    pub fn from_weights(&self, weights: &[f64]) -> HermitianOperator {
        let n = self.dim();
        assert_eq!(weights.len(), n);
        if let Some(perm) = &self.permutation {
            let mut diag = vec![0.0; n];
            for (k, &i) in perm.iter().enumerate() {
                diag[i] = weights[k];
            }
            return HermitianOperator::from_real_diagonal(&diag);
        }
        let mut scaled = self.eigenvectors.clone();
        for (k, &w) in weights.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w);
        }
        HermitianOperator::hermitize(scaled * self.eigenvectors.adjoint())
    }

    /// Applies `f` to each eigenvalue and reassembles.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        self.from_weights(&w)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.from_weights(&self.eigenvalues)
    }

    /// `Re ⟨v_k|H|v_k⟩` for every eigenvector.
    pub fn expectations(&self, h: &HermitianOperator) -> Vec<f64> {
        if let Some(perm) = &self.permutation {
            return perm.iter().map(|&i| h.matrix()[(i, i)].re).collect();
        }
        let hv = h.matrix() * &self.eigenvectors;
        (0..self.dim())
            .map(|k| {
                self.eigenvectors
                    .column(k)
                    .iter()
                    .zip(hv.column(k).iter())
                    .map(|(v, w)| (v.conj() * w).re)
                    .sum()
            })
            .collect()
    }

    /// `V† H V`.
    pub fn rotate_in(&self, h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.eigenvectors.adjoint() * h * &self.eigenvectors
    }

    /// `V M V†`.
    pub fn rotate_out(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::random::RandomSuite;

    #[test]
    fn identity_spectrum() {
        let e = HermitianOperator::identity(3).eig();
        assert_eq!(e.eigenvalues(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = HermitianOperator::pauli_x().eig();
        assert!((e.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_fast_path_sorted() {
        let h = HermitianOperator::from_real_diagonal(&[0.3, -2.0, 1.0]);
        let e = h.eig();
        assert_eq!(e.eigenvalues(), &[-2.0, 0.3, 1.0]);
        assert!(e.reconstruct().max_abs_diff(&h) == 0.0);
        assert_eq!(e.expectations(&h), vec![-2.0, 0.3, 1.0]);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let suite = RandomSuite::new(7);
        for dim in [2usize, 3, 4, 8] {
            for idx in 0..100u64 {
                let h = suite.hermitian(idx, dim);
                let e = h.eig();
                let err = e.reconstruct().frobenius_distance(&h);
                assert!(err < 1e-10 * dim as f64, "dim {dim} idx {idx}: {err:e}");
                let v = e.eigenvectors();
                let gram = v.adjoint() * v;
                let id = DMatrix::<Complex64>::identity(dim, dim);
                assert!((gram - id).iter().all(|z| z.norm() < 1e-10));
                assert!(e.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
