//! Coarse-graining maps and the Kawasaki–Gunton projector.
//!
//! The projector at expectation values `f` acts on observables of `N` copies.
//! Its adjoint on states is the first-order expansion of `μ_f^{⊗N}` in the
//! copy-averaged expectations:
//!
//! `P†τ = μ⊗ᴺ + Σ_a D_a⁽ᴺ⁾ (tr(Ḡ_a⁽ᴺ⁾ τ) − f_a)`
//!
//! with `D_a = ∂μ/∂f_a`, `D_a⁽ᴺ⁾` its single-slot lift over `μ` and
//! `Ḡ_a⁽ᴺ⁾ = (1/N) Σ_k G_a` acting on copy `k`. On observables,
//!
//! `PΓ = tr(μ⊗ᴺ Γ)·1 + Σ_a (Ḡ_a⁽ᴺ⁾ − f_a·1) tr(D_a⁽ᴺ⁾ Γ)`.

use crate::error::{Error, Result};
use crate::maxent::{fit_maxent, CanonicalState, FitOptions, ObservableSet};
use crate::operator::{
    operator_power, partial_trace, pos_neg_parts, single_slot_sum, tensor_power, DensityMatrix,
    HermitianOperator, RandomSuite, Subsystem, TestOperator,
};

/// Eigenvalues of `PΓ` outside `[−tol, 1 + tol]` count as positivity violations.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Replaces `ρ` by the MaxEnt state sharing its expectations of `obs`.
pub fn canonical_coarse_grain(rho: &DensityMatrix, obs: &ObservableSet) -> Result<CanonicalState> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            expected: obs.dim(),
            actual: rho.dim(),
        });
    }
    let f = obs.expectations(rho.as_operator());
    fit_maxent(obs, &f, FitOptions::default())
}

/// `ρ_AB → ρ_A ⊗ ρ_B`.
pub fn product_coarse_grain(rho_ab: &DensityMatrix, dims: (usize, usize)) -> Result<DensityMatrix> {
    let a = partial_trace(rho_ab, dims, Subsystem::A)?;
    let b = partial_trace(rho_ab, dims, Subsystem::B)?;
    Ok(a.kron(&b))
}

/// `(ε, ε′) = ((1 − γ)/2, (1 + γ)/2)`, defined for `0 ≤ γ < 1`.
pub fn epsilon_choices(gamma: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidGamma(gamma));
    }
    Ok(((1.0 - gamma) / 2.0, (1.0 + gamma) / 2.0))
}

#[derive(Clone, Debug)]
pub struct KgProjector {
    observables: ObservableSet,
    f: Vec<f64>,
    mu: DensityMatrix,
    derivs: Vec<HermitianOperator>,
}

/// The projector lifted to `N` copies, with its building blocks precomputed.
#[derive(Clone, Debug)]
pub struct KgLift {
    n: usize,
    f: Vec<f64>,
    mu_n: HermitianOperator,
    derivs_n: Vec<HermitianOperator>,
    averaged: Vec<HermitianOperator>,
}

impl KgProjector {
    /// Fits the canonical state at `f` and stores its state derivatives.
    pub fn build(obs: &ObservableSet, f: &[f64]) -> Result<Self> {
        Self::from_canonical(&fit_maxent(obs, f, FitOptions::default())?)
    }

    /// Projector at the expectations of an already fitted state.
    pub fn from_canonical(state: &CanonicalState) -> Result<Self> {
        Ok(Self {
            observables: state.observables().clone(),
            f: state.f().to_vec(),
            mu: state.mu().clone(),
            derivs: state.state_derivatives()?,
        })
    }

    pub fn observables(&self) -> &ObservableSet {
        &self.observables
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn mu(&self) -> &DensityMatrix {
        &self.mu
    }

    pub fn derivs(&self) -> &[HermitianOperator] {
        &self.derivs
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn lift(&self, n: usize, cap: usize) -> Result<KgLift> {
        let mu = self.mu.as_operator();
        let id = HermitianOperator::identity(self.dim());
        let derivs_n = self
            .derivs
            .iter()
            .map(|d| single_slot_sum(d, mu, n, cap))
            .collect::<Result<Vec<_>>>()?;
        let averaged = self
            .observables
            .members()
            .iter()
            .map(|g| Ok(single_slot_sum(g, &id, n, cap)?.scaled(1.0 / n as f64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(KgLift {
            n,
            f: self.f.clone(),
            mu_n: operator_power(mu, n, cap)?,
            derivs_n,
            averaged,
        })
    }

    pub fn apply_state(&self, tau: &HermitianOperator, n: usize, cap: usize) -> Result<HermitianOperator> {
        self.lift(n, cap)?.apply_state(tau)
    }

    pub fn apply_observable(
        &self,
        gamma: &HermitianOperator,
        n: usize,
        cap: usize,
    ) -> Result<HermitianOperator> {
        self.lift(n, cap)?.apply_observable(gamma)
    }

    /// `γ_N(ρ) = sup_{0 ≤ Γ ≤ 1} |(ρ⊗ᴺ|QΓ)|`.
    pub fn gamma_n(&self, rho: &DensityMatrix, n: usize, cap: usize) -> Result<f64> {
        self.lift(n, cap)?.gamma(rho)
    }

    /// `γ_N` for `N = 1..=n_max`.
    pub fn gamma_series(&self, rho: &DensityMatrix, n_max: usize, cap: usize) -> Result<Vec<f64>> {
        (1..=n_max).map(|n| self.gamma_n(rho, n, cap)).collect()
    }

    /// Spectra of `PΓ` for seeded random test operators on `N` copies.
    pub fn positivity_diagnostic(
        &self,
        n: usize,
        trials: usize,
        seed: u64,
        cap: usize,
    ) -> Result<PositivityReport> {
        let lift = self.lift(n, cap)?;
        let dim = lift.mu_n.dim();
        let suite = RandomSuite::new(seed);
        let mut report = PositivityReport {
            n,
            trials,
            min_eig: f64::INFINITY,
            max_eig: f64::NEG_INFINITY,
            violations: 0,
        };
        for i in 0..trials as u64 {
            let g = suite.test_operator(i, dim);
            let eig = lift.apply_observable(g.as_operator())?.eig();
            report.min_eig = report.min_eig.min(eig.min());
            report.max_eig = report.max_eig.max(eig.max());
            if eig.min() < -POSITIVITY_TOL || eig.max() > 1.0 + POSITIVITY_TOL {
                report.violations += 1;
            }
        }
        Ok(report)
    }
}

impl KgLift {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mu_n.dim()
    }

    pub fn mu_power(&self) -> &HermitianOperator {
        &self.mu_n
    }

    /// `ḡ_a(τ) = tr(Ḡ_a⁽ᴺ⁾ τ)`.
    pub fn averaged_expectations(&self, tau: &HermitianOperator) -> Vec<f64> {
        self.averaged.iter().map(|g| g.inner(tau)).collect()
    }

    pub fn averaged_observables(&self) -> &[HermitianOperator] {
        &self.averaged
    }

    pub fn apply_state(&self, tau: &HermitianOperator) -> Result<HermitianOperator> {
        self.mu_n.check_dim(tau)?;
        let g = self.averaged_expectations(tau);
        Ok(self
            .derivs_n
            .iter()
            .zip(g.iter().zip(&self.f))
            .fold(self.mu_n.clone(), |acc, (d, (ga, fa))| &acc + &d.scaled(ga - fa)))
    }

    pub fn apply_observable(&self, gamma: &HermitianOperator) -> Result<HermitianOperator> {
        self.mu_n.check_dim(gamma)?;
        let dim = self.dim();
        let id = HermitianOperator::identity(dim);
        let mut out = id.scaled(self.mu_n.inner(gamma));
        for ((g, d), fa) in self.averaged.iter().zip(&self.derivs_n).zip(&self.f) {
            let weight = d.inner(gamma);
            out = &out + &(g - &id.scaled(*fa)).scaled(weight);
        }
        Ok(out)
    }

    /// `QΓ = Γ − PΓ`.
    pub fn apply_complement(&self, gamma: &HermitianOperator) -> Result<HermitianOperator> {
        Ok(gamma - &self.apply_observable(gamma)?)
    }

    /// `Δ = ρ⊗ᴺ − P†ρ⊗ᴺ`, so that `(ρ⊗ᴺ|QΓ) = tr(ΔΓ)`.
    pub fn complement_residual(&self, rho: &DensityMatrix) -> Result<HermitianOperator> {
        let rn = tensor_power(rho, self.n, usize::MAX)?.into_operator();
        let projected = self.apply_state(&rn)?;
        Ok(&rn - &projected)
    }

    pub fn gamma(&self, rho: &DensityMatrix) -> Result<f64> {
        let parts = pos_neg_parts(&self.complement_residual(rho)?);
        Ok(parts.positive_trace().max(parts.negative_trace()))
    }

    /// A test operator attaining `γ_N`: the projector onto the positive or
    /// negative part of `Δ`, whichever carries more trace.
    pub fn gamma_maximizer(&self, rho: &DensityMatrix) -> Result<TestOperator> {
        let delta = self.complement_residual(rho)?;
        let eig = delta.eig();
        let parts = pos_neg_parts(&delta);
        let positive = parts.positive_trace() >= parts.negative_trace();
        Ok(TestOperator::new_unchecked(eig.map(|w| {
            if (positive && w > 0.0) || (!positive && w < 0.0) {
                1.0
            } else {
                0.0
            }
        })))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityReport {
    pub n: usize,
    pub trials: usize,
    pub min_eig: f64,
    pub max_eig: f64,
    pub violations: usize,
}

impl PositivityReport {
    pub fn violation_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.violations as f64 / self.trials as f64
        }
    }
}

/// One line of the γ / positivity report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KgReportRow {
    pub n: usize,
    pub gamma_n: f64,
    pub positivity: PositivityReport,
}

/// CSV with header `N,gamma_N,min_eig_PGamma,violation_fraction`.
pub fn kg_report_csv(rows: &[KgReportRow]) -> String {
    let mut out = String::from("N,gamma_N,min_eig_PGamma,violation_fraction\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n,
            r.gamma_n,
            r.positivity.min_eig,
            r.positivity.violation_fraction()
        ));
    }
    out
}
