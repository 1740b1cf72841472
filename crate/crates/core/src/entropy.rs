//! Von Neumann entropy and quantum relative entropy, in nats.

use std::fmt;

use crate::operator::{support_cutoff, DensityMatrix};

/// Eigenvalues below this are dropped from `−Σ w ln w`.
pub const ENTROPY_EIGEN_FLOOR: f64 = 1e-15;
/// Weight of `ρ` on `ker σ` above which `S(ρ‖σ)` is infinite.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;

/// A nonnegative extended real: finite nats or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Nats {
    Finite(f64),
    Infinite,
}

impl Nats {
    pub fn finite(self) -> Option<f64> {
        match self {
            Nats::Finite(v) => Some(v),
            Nats::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Nats::Infinite)
    }

    /// Finite value or `f64::INFINITY`, for internal arithmetic only.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nats::Finite(v) => write!(f, "{v}"),
            Nats::Infinite => f.write_str("inf"),
        }
    }
}

pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    rho.as_operator()
        .eig()
        .eigenvalues()
        .iter()
        .filter(|&&w| w >= ENTROPY_EIGEN_FLOOR)
        .map(|&w| -w * w.ln())
        .sum()
}

/// `S(ρ‖σ) = tr(ρ ln ρ − ρ ln σ)`, or [`Nats::Infinite`] when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Nats {
    assert_eq!(rho.dim(), sigma.dim(), "relative entropy of states of different dimension");
    let se = sigma.as_operator().eig();
    let cut = support_cutoff(se.eigenvalues());
    let weights = se.expectations(rho.as_operator());

    let mut leak = 0.0;
    let mut cross = 0.0;
    for (&s, &p) in se.eigenvalues().iter().zip(&weights) {
        if s > cut {
            cross += p * s.ln();
        } else {
            leak += p;
        }
    }
    if leak >= SUPPORT_LEAK_TOL {
        return Nats::Infinite;
    }
    Nats::Finite(-von_neumann(rho) - cross)
}

/// Classical Kullback–Leibler divergence of two probability vectors.
pub fn classical_kl(p: &[f64], q: &[f64]) -> Nats {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Nats::Infinite;
        }
        acc += pi * (pi / qi).ln();
    }
    Nats::Finite(acc)
}
