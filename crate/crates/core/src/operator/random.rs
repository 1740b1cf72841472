//! Seeded random ensembles.
//!
//! Every draw is a pure function of `(seed, index)`: the generator is
//! ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with `seed_from_u64(seed)` and
//! switched to stream `index` via `set_stream`. Gaussian variates come from
//! `rand_distr::StandardNormal`; matrix entries are drawn in row-major order,
//! real part before imaginary part.
//!
//! Ensembles:
//! - density matrices: `G G† / tr(G G†)` with `G` a square complex Gaussian
//!   matrix (Hilbert–Schmidt measure, full rank almost surely);
//! - unitaries: QR of a complex Gaussian matrix with the phases of `diag(R)`
//!   folded into `Q` (Haar measure);
//! - Hermitian matrices: `(G + G†)/2`;
//! - observable sets: independent Hermitian draws, Gram–Schmidt
//!   orthonormalized under `tr(AB)` against the identity and each other;
//! - test operators: `U diag(u) U†`, Haar `U`, `u_i` uniform on `[0, 1)`;
//! - Kraus sets: the `d·r × d` isometry given by the first `d` columns of a
//!   Haar unitary, cut into `r` square blocks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::channel::KrausChannel;
use super::hermitian::{DensityMatrix, HermitianOperator, TestOperator};
use crate::error::{Error, Result};
use crate::maxent::ObservableSet;

/// Generator for draw `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    DMatrix::from_row_slice(rows, cols, &data)
}

pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let h = HermitianOperator::hermitize(&g * g.adjoint());
    let tr = h.trace();
    DensityMatrix::new_unchecked(h.scaled(1.0 / tr))
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let psi: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    DensityMatrix::pure(&psi).expect("gaussian vector is nonzero")
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let g = gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    HermitianOperator::hermitize(gaussian_matrix(rng, dim, dim))
}

/// `m` trace-orthonormal Hermitian observables, each orthogonal to the identity.
pub fn random_observables<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    m: usize,
) -> Result<ObservableSet> {
    if m + 1 > dim * dim {
        return Err(Error::InvalidArgument(format!(
            "at most {} independent observables fit in dimension {dim}",
            dim * dim - 1
        )));
    }
    let mut basis = vec![HermitianOperator::identity(dim).scaled(1.0 / (dim as f64).sqrt())];
    let mut members = Vec::with_capacity(m);
    while members.len() < m {
        let mut g = random_hermitian(rng, dim);
        for b in &basis {
            g = &g - &b.scaled(b.inner(&g));
        }
        let norm = g.inner(&g).sqrt();
        if norm < 1e-8 {
            continue;
        }
        let g = g.scaled(1.0 / norm);
        basis.push(g.clone());
        members.push(g);
    }
    ObservableSet::new(dim, members)
}

pub fn random_test_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> TestOperator {
    let u = random_unitary(rng, dim);
    let w: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let d = HermitianOperator::from_real_diagonal(&w);
    TestOperator::new_unchecked(d.conjugated(&u))
}

pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> KrausChannel {
    let rank = rank.max(1);
    let u = random_unitary(rng, dim * rank);
    let ops = (0..rank)
        .map(|k| u.view((k * dim, 0), (dim, dim)).into_owned())
        .collect();
    KrausChannel::new(ops).expect("isometry blocks are complete")
}

/// Indexed access to the ensembles above under a fixed seed.
#[derive(Clone, Copy, Debug)]
pub struct RandomSuite {
    seed: u64,
}

impl RandomSuite {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self, index: u64) -> ChaCha20Rng {
        stream_rng(self.seed, index)
    }

    pub fn density(&self, index: u64, dim: usize) -> DensityMatrix {
        random_density(&mut self.rng(index), dim)
    }

    pub fn pure(&self, index: u64, dim: usize) -> DensityMatrix {
        random_pure(&mut self.rng(index), dim)
    }

    pub fn unitary(&self, index: u64, dim: usize) -> DMatrix<Complex64> {
        random_unitary(&mut self.rng(index), dim)
    }

    pub fn hermitian(&self, index: u64, dim: usize) -> HermitianOperator {
        random_hermitian(&mut self.rng(index), dim)
    }

    pub fn observables(&self, index: u64, dim: usize, m: usize) -> Result<ObservableSet> {
        random_observables(&mut self.rng(index), dim, m)
    }

    pub fn test_operator(&self, index: u64, dim: usize) -> TestOperator {
        random_test_operator(&mut self.rng(index), dim)
    }

    pub fn kraus(&self, index: u64, dim: usize, rank: usize) -> KrausChannel {
        random_kraus(&mut self.rng(index), dim, rank)
    }
}
