//! Generalized canonical states `μ = exp(Σ_a λ^a G_a) / Z`.
//!
//! The forward map `λ ↦ (μ, f, ln Z)` is evaluated spectrally with a
//! max-eigenvalue shift. The inverse map `f ↦ λ` is a damped Newton iteration on
//! the convex dual `ln Z(λ) − λ·f`, whose gradient is `f(λ) − f` and whose
//! Hessian is the Kubo covariance `C_ab = ∂f_a/∂λ^b`.
//!
//! The sign convention is `exp(+Σ λ^a G_a)`: a positive multiplier raises the
//! weight of the positive spectrum of its observable.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    frechet_exp_in_basis, DensityMatrix, EigenDecomposition, HermitianOperator, OperatorJson,
};

/// Upper bound on the condition number of the Gram matrix of `{1, G_1, …, G_m}`.
pub const MAX_GRAM_CONDITION: f64 = 1e8;
/// Upper bound on the covariance condition number when inverting it.
pub const MAX_COVARIANCE_CONDITION: f64 = 1e10;
/// `|λ|_∞` beyond which a target is declared infeasible.
pub const LAMBDA_DIVERGENCE: f64 = 1e3;
/// Ridge added to the covariance inside Newton steps.
pub const NEWTON_RIDGE: f64 = 1e-12;
/// Smallest eigenvalue of `μ` below which a state counts as near-extremal.
pub const NEAR_EXTREMAL_EIGENVALUE: f64 = 1e-9;

/// Relevant observables defining a level of description.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    dim: usize,
    members: Vec<HermitianOperator>,
}

impl ObservableSet {
    pub fn new(dim: usize, members: Vec<HermitianOperator>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        for g in &members {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: g.dim(),
                });
            }
        }
        let condition = gram_condition(dim, &members);
        if !(condition < MAX_GRAM_CONDITION) {
            return Err(Error::DegenerateObservables { condition });
        }
        Ok(Self { dim, members })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            members: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[HermitianOperator] {
        &self.members
    }

    /// `tr(G_a ρ)` for each member.
    pub fn expectations(&self, rho: &HermitianOperator) -> Vec<f64> {
        self.members.iter().map(|g| g.inner(rho)).collect()
    }

    /// `Σ_a λ^a G_a`.
    pub fn generator(&self, lambda: &[f64]) -> HermitianOperator {
        self.members
            .iter()
            .zip(lambda)
            .fold(HermitianOperator::zeros(self.dim), |acc, (g, &l)| {
                &acc + &g.scaled(l)
            })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ObservableSetJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ObservableSetJson = serde_json::from_str(text)?;
        Self::try_from(&doc)
    }
}

fn gram_condition(dim: usize, members: &[HermitianOperator]) -> f64 {
    let mut all = Vec::with_capacity(members.len() + 1);
    all.push(HermitianOperator::identity(dim));
    all.extend(members.iter().cloned());
    let n = all.len();
    let gram = DMatrix::from_fn(n, n, |i, j| all[i].inner(&all[j]));
    symmetric_condition(&gram)
}

/// Ratio of extreme eigenvalues of a real symmetric matrix; `inf` if singular.
fn symmetric_condition(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let w = m.clone().symmetric_eigen().eigenvalues;
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// A fitted MaxEnt state.
#[derive(Clone, Debug)]
pub struct CanonicalState {
    observables: ObservableSet,
    lambda: Vec<f64>,
    f: Vec<f64>,
    mu: DensityMatrix,
    log_z: f64,
    fit_residual: f64,
    // spectral data of Σλ G − ln Z·1, so that exp of it is μ itself
    log_mu_eig: EigenDecomposition,
}

pub fn canonical_from_lambda(obs: &ObservableSet, lambda: &[f64]) -> Result<CanonicalState> {
    if lambda.len() != obs.len() {
        return Err(Error::DimensionMismatch {
            expected: obs.len(),
            actual: lambda.len(),
        });
    }
    let eig = obs.generator(lambda).eig();
    let top = eig.max();
    let weights: Vec<f64> = eig.eigenvalues().iter().map(|w| (w - top).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let log_z = top + sum.ln();
    let probs: Vec<f64> = weights.iter().map(|w| w / sum).collect();
    let mu = DensityMatrix::new_unchecked(eig.from_weights(&probs));
    let f = obs.expectations(mu.as_operator());
    Ok(CanonicalState {
        observables: obs.clone(),
        lambda: lambda.to_vec(),
        f,
        mu,
        log_z,
        fit_residual: 0.0,
        log_mu_eig: eig.shifted(-log_z),
    })
}

impl CanonicalState {
    pub fn observables(&self) -> &ObservableSet {
        &self.observables
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Expectation values `tr(G_a μ)`.
    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn mu(&self) -> &DensityMatrix {
        &self.mu
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// `|f − target|_∞` reached by the fit that produced this state (0 for
    /// states built directly from `λ`).
    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    /// Spectrum of `μ` touches zero within [`NEAR_EXTREMAL_EIGENVALUE`].
    pub fn is_near_extremal(&self) -> bool {
        let w = self.log_mu_eig.eigenvalues()[0];
        w.exp() < NEAR_EXTREMAL_EIGENVALUE
    }

    /// `ln Z(λ) − λ·target`, the convex dual minimized by [`fit_maxent`].
    pub fn dual(&self, target: &[f64]) -> f64 {
        self.log_z - dot(&self.lambda, target)
    }

    /// `∂μ/∂λ^b = L_exp(A)[G_b]/Z − μ f_b` for every `b`.
    pub fn lambda_derivatives(&self) -> Vec<HermitianOperator> {
        self.observables
            .members()
            .iter()
            .zip(&self.f)
            .map(|(g, &fb)| {
                let k = frechet_exp_in_basis(&self.log_mu_eig, g);
                &k - &self.mu.as_operator().scaled(fb)
            })
            .collect()
    }

    /// Kubo covariance `C_ab = ∂f_a/∂λ^b`, symmetrized.
    pub fn covariance(&self) -> DMatrix<f64> {
        covariance_from(&self.observables, &self.lambda_derivatives())
    }

    /// `D_a = ∂μ/∂f_a = Σ_b (C⁻¹)_ab ∂μ/∂λ^b`.
    pub fn state_derivatives(&self) -> Result<Vec<HermitianOperator>> {
        let m = self.observables.len();
        if m == 0 {
            return Ok(Vec::new());
        }
        let dl = self.lambda_derivatives();
        let c = covariance_from(&self.observables, &dl);
        let condition = symmetric_condition(&c);
        if !(condition <= MAX_COVARIANCE_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        let inv = c
            .clone()
            .cholesky()
            .map(|ch| ch.inverse())
            .ok_or(Error::IllConditioned {
                condition: f64::INFINITY,
            })?;
        Ok((0..m)
            .map(|a| {
                dl.iter()
                    .enumerate()
                    .fold(HermitianOperator::zeros(self.mu.dim()), |acc, (b, k)| {
                        &acc + &k.scaled(inv[(a, b)])
                    })
            })
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CanonicalStateJson::from(self))?)
    }

    /// Rebuilds the state from the stored `λ` and checks it against the stored `μ`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CanonicalStateJson = serde_json::from_str(text)?;
        let obs = ObservableSet::try_from(&doc.observables)?;
        let mut cs = canonical_from_lambda(&obs, &doc.lambda)?;
        let stored = HermitianOperator::try_from(&doc.mu)?;
        let err = stored.max_abs_diff(cs.mu.as_operator());
        if err > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "stored mu disagrees with exp(lambda.G)/Z by {err:.3e}"
            )));
        }
        cs.fit_residual = doc.fit_residual;
        Ok(cs)
    }
}

fn covariance_from(obs: &ObservableSet, dmu_dlambda: &[HermitianOperator]) -> DMatrix<f64> {
    let m = obs.len();
    let raw = DMatrix::from_fn(m, m, |a, b| obs.members()[a].inner(&dmu_dlambda[b]));
    (&raw + raw.transpose()) * 0.5
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Finds `λ` with `|tr(G_a μ_λ) − target_a|_∞ ≤ tol`.
pub fn fit_maxent(obs: &ObservableSet, target: &[f64], opts: FitOptions) -> Result<CanonicalState> {
    let m = obs.len();
    if target.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: target.len(),
        });
    }
    if target.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("target expectation values must be finite".into()));
    }

    let mut cs = canonical_from_lambda(obs, &vec![0.0; m])?;
    let mut iterations = 0;
    loop {
        let grad: Vec<f64> = target.iter().zip(&cs.f).map(|(t, f)| t - f).collect();
        let residual = max_abs(&grad);
        if residual <= opts.tol {
            cs.fit_residual = residual;
            return Ok(cs);
        }
        if iterations >= opts.max_iter {
            return Err(stalled(&cs, residual, iterations));
        }
        iterations += 1;

        let mut c = cs.covariance();
        for i in 0..m {
            c[(i, i)] += NEWTON_RIDGE;
        }
        let rhs = DVector::from_column_slice(&grad);
        let step = match c.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => c
                .lu()
                .solve(&rhs)
                .ok_or(Error::IllConditioned { condition: f64::INFINITY })?,
        };
        let decrement = step.dot(&rhs);
        let dual = cs.dual(target);

        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = cs.lambda.iter().zip(step.iter()).map(|(l, s)| l + t * s).collect();
            let biggest = max_abs(&trial);
            if biggest > LAMBDA_DIVERGENCE {
                return Err(Error::Infeasible {
                    max_abs_lambda: biggest,
                    iterations,
                });
            }
            let next = canonical_from_lambda(obs, &trial)?;
            let next_dual = next.dual(target);
            let sufficient = next_dual <= dual - 1e-4 * t * decrement;
            // below rounding of ln Z the dual is flat; fall back to the gradient
            let flat = (next_dual - dual).abs() <= 1e-13 * (1.0 + dual.abs());
            let next_residual = max_abs(
                &target.iter().zip(&next.f).map(|(a, b)| a - b).collect::<Vec<_>>(),
            );
            if sufficient || (flat && next_residual < residual) {
                break Some(next);
            }
            t *= 0.5;
            if t < 1e-12 {
                break None;
            }
        };
        match accepted {
            Some(next) => cs = next,
            None => return Err(stalled(&cs, residual, iterations)),
        }
    }
}

fn stalled(cs: &CanonicalState, residual: f64, iterations: usize) -> Error {
    let near_extremal = cs.is_near_extremal();
    if near_extremal || residual < 1e-6 {
        Error::NotConverged {
            residual,
            iterations,
            near_extremal,
        }
    } else {
        Error::Infeasible {
            max_abs_lambda: max_abs(&cs.lambda),
            iterations,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableSetJson {
    pub dim: usize,
    pub members: Vec<OperatorJson>,
}

impl From<&ObservableSet> for ObservableSetJson {
    fn from(obs: &ObservableSet) -> Self {
        Self {
            dim: obs.dim,
            members: obs.members.iter().map(OperatorJson::from).collect(),
        }
    }
}

impl TryFrom<&ObservableSetJson> for ObservableSet {
    type Error = Error;

    fn try_from(doc: &ObservableSetJson) -> Result<Self> {
        let members = doc
            .members
            .iter()
            .map(HermitianOperator::try_from)
            .collect::<Result<Vec<_>>>()?;
        ObservableSet::new(doc.dim, members)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalStateJson {
    pub observables: ObservableSetJson,
    pub lambda: Vec<f64>,
    pub f: Vec<f64>,
    #[serde(rename = "logZ")]
    pub log_z: f64,
    pub fit_residual: f64,
    pub mu: OperatorJson,
}

impl From<&CanonicalState> for CanonicalStateJson {
    fn from(cs: &CanonicalState) -> Self {
        Self {
            observables: ObservableSetJson::from(&cs.observables),
            lambda: cs.lambda.clone(),
            f: cs.f.clone(),
            log_z: cs.log_z,
            fit_residual: cs.fit_residual,
            mu: OperatorJson::from(cs.mu.as_operator()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::von_neumann;
    use crate::operator::{op_function, OpFunction, RandomSuite};

    fn sz() -> ObservableSet {
        ObservableSet::new(2, vec![HermitianOperator::pauli_z()]).unwrap()
    }

    const ATANH_HALF: f64 = 0.549_306_144_334_054_8;

    #[test]
    fn empty_set_gives_equidistribution() {
        let cs = canonical_from_lambda(&ObservableSet::empty(3), &[]).unwrap();
        assert!(cs.mu().as_operator().max_abs_diff(&HermitianOperator::identity(3).scaled(1.0 / 3.0)) < 1e-15);
        assert!((cs.log_z() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn qubit_zero_lambda() {
        let cs = canonical_from_lambda(&sz(), &[0.0]).unwrap();
        assert!(cs.mu().as_operator().max_abs_diff(&HermitianOperator::identity(2).scaled(0.5)) < 1e-15);
        assert_eq!(cs.f(), &[0.0]);
    }

    #[test]
    fn qubit_expectation_is_tanh() {
        let cs = canonical_from_lambda(&sz(), &[0.549_306_1]).unwrap();
        assert!((cs.f()[0] - 0.549_306_1f64.tanh()).abs() < 1e-14);
        assert!((cs.f()[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn mu_matches_normalized_exponential() {
        let suite = RandomSuite::new(21);
        let obs = suite.observables(0, 3, 2).unwrap();
        let lambda = [0.7, -1.3];
        let cs = canonical_from_lambda(&obs, &lambda).unwrap();
        let e = op_function(&obs.generator(&lambda), OpFunction::Exp).unwrap();
        let want = e.scaled((-cs.log_z()).exp());
        assert!(cs.mu().as_operator().frobenius_distance(&want) < 1e-10);
    }

    #[test]
    fn huge_multipliers_do_not_overflow() {
        let cs = canonical_from_lambda(&sz(), &[800.0]).unwrap();
        assert!(cs.log_z().is_finite());
        assert!((cs.mu().as_operator().trace() - 1.0).abs() < 1e-14);
        assert!(cs.is_near_extremal());
    }

    #[test]
    fn covariance_closed_forms() {
        let c0 = canonical_from_lambda(&sz(), &[0.0]).unwrap().covariance();
        assert!((c0[(0, 0)] - 1.0).abs() < 1e-14);
        let c1 = canonical_from_lambda(&sz(), &[ATANH_HALF]).unwrap().covariance();
        assert!((c1[(0, 0)] - 0.75).abs() < 1e-8);
    }

    #[test]
    fn covariance_matches_finite_differences() {
        let suite = RandomSuite::new(22);
        let h = 1e-5;
        for idx in 0..10u64 {
            let dim = 2 + (idx as usize % 3);
            let m = 1 + (idx as usize % 3);
            let obs = suite.observables(idx, dim, m).unwrap();
            let mut rng = suite.rng(1000 + idx);
            let lambda: Vec<f64> = (0..m).map(|_| rand::Rng::random_range(&mut rng, -1.5..1.5)).collect();
            let c = canonical_from_lambda(&obs, &lambda).unwrap().covariance();
            for b in 0..m {
                let mut lp = lambda.clone();
                let mut lm = lambda.clone();
                lp[b] += h;
                lm[b] -= h;
                let fp = canonical_from_lambda(&obs, &lp).unwrap().f().to_vec();
                let fm = canonical_from_lambda(&obs, &lm).unwrap().f().to_vec();
                for a in 0..m {
                    let fd = (fp[a] - fm[a]) / (2.0 * h);
                    assert!((c[(a, b)] - fd).abs() < 1e-6, "{} vs {}", c[(a, b)], fd);
                }
            }
        }
    }

    #[test]
    fn fit_trivial_target() {
        let cs = fit_maxent(&sz(), &[0.0], FitOptions::default()).unwrap();
        assert_eq!(cs.lambda(), &[0.0]);
        assert!(cs.mu().as_operator().max_abs_diff(&HermitianOperator::identity(2).scaled(0.5)) < 1e-15);
    }

    #[test]
    fn fit_recovers_atanh() {
        let cs = fit_maxent(&sz(), &[0.5], FitOptions::default()).unwrap();
        assert!((cs.lambda()[0] - ATANH_HALF).abs() < 1e-8);
        assert!(cs.fit_residual() <= 1e-10);
    }

    #[test]
    fn fit_rejects_outside_spectrum() {
        let r = fit_maxent(&sz(), &[1.5], FitOptions::default());
        assert!(matches!(r, Err(Error::Infeasible { .. })), "{r:?}");
    }

    #[test]
    fn boundary_target_is_near_extremal() {
        match fit_maxent(&sz(), &[1.0], FitOptions::default()) {
            Ok(cs) => assert!(cs.is_near_extremal() || cs.mu().as_operator().eig().min() < 1e-9),
            Err(Error::NotConverged { near_extremal, .. }) => assert!(near_extremal),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn fit_rejects_wrong_length() {
        assert!(fit_maxent(&sz(), &[0.1, 0.2], FitOptions::default()).is_err());
    }

    #[test]
    fn degenerate_observables_rejected() {
        let z = HermitianOperator::pauli_z();
        let r = ObservableSet::new(2, vec![z.clone(), z.scaled(2.0)]);
        assert!(matches!(r, Err(Error::DegenerateObservables { .. })));
        let with_identity = ObservableSet::new(2, vec![HermitianOperator::identity(2)]);
        assert!(matches!(with_identity, Err(Error::DegenerateObservables { .. })));
    }

    #[test]
    fn round_trip_lambda_recovery() {
        let suite = RandomSuite::new(23);
        for idx in 0..100u64 {
            let dim = 2 + (idx as usize % 3);
            let m = 1 + (idx as usize / 3 % 3);
            let obs = suite.observables(idx, dim, m).unwrap();
            let mut rng = suite.rng(10_000 + idx);
            let lambda: Vec<f64> = (0..m).map(|_| rand::Rng::random_range(&mut rng, -2.0..2.0)).collect();
            let f = canonical_from_lambda(&obs, &lambda).unwrap().f().to_vec();
            let fit = fit_maxent(&obs, &f, FitOptions::default()).unwrap();
            for (a, b) in fit.lambda().iter().zip(&lambda) {
                assert!((a - b).abs() < 1e-7, "idx {idx}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dual_is_convex_along_lines() {
        let suite = RandomSuite::new(24);
        for idx in 0..10u64 {
            let obs = suite.observables(idx, 3, 2).unwrap();
            let mut rng = suite.rng(500 + idx);
            let base: Vec<f64> = (0..2).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
            let dir: Vec<f64> = (0..2).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
            let log_z = |t: f64| {
                let l: Vec<f64> = base.iter().zip(&dir).map(|(b, d)| b + t * d).collect();
                canonical_from_lambda(&obs, &l).unwrap().log_z()
            };
            let h = 0.1;
            for k in 0..10 {
                let t = -1.0 + 0.2 * k as f64;
                let second = log_z(t + h) - 2.0 * log_z(t) + log_z(t - h);
                assert!(second >= -1e-9);
            }
        }
    }

    #[test]
    fn canonical_state_maximizes_entropy() {
        let suite = RandomSuite::new(25);
        for idx in 0..20u64 {
            let dim = 3;
            let obs = suite.observables(idx, dim, 2).unwrap();
            let target = obs.expectations(suite.density(100 + idx, dim).as_operator());
            let cs = fit_maxent(&obs, &target, FitOptions::default()).unwrap();
            // perturb μ inside the affine space that keeps every tr(G_a ·) and the trace fixed
            let mut x = suite.hermitian(200 + idx, dim);
            let mut basis = vec![HermitianOperator::identity(dim).scaled(1.0 / (dim as f64).sqrt())];
            basis.extend(obs.members().iter().cloned());
            for b in &basis {
                let nb = b.inner(b);
                x = &x - &b.scaled(b.inner(&x) / nb);
            }
            let w_min = cs.mu().as_operator().eig().min();
            let scale = 0.5 * w_min / x.eig().eigenvalues().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let rho = DensityMatrix::new(&cs.mu().as_operator().clone() + &x.scaled(scale)).unwrap();
            let re = obs.expectations(rho.as_operator());
            for (a, b) in re.iter().zip(&target) {
                assert!((a - b).abs() < 1e-9);
            }
            assert!(von_neumann(cs.mu()) >= von_neumann(&rho) - 1e-9);
        }
    }

    #[test]
    fn state_derivative_at_symmetric_point() {
        let cs = canonical_from_lambda(&sz(), &[0.0]).unwrap();
        let d = cs.state_derivatives().unwrap();
        assert!(d[0].max_abs_diff(&HermitianOperator::pauli_z().scaled(0.5)) < 1e-14);
    }

    #[test]
    fn state_derivatives_duality() {
        let suite = RandomSuite::new(26);
        for idx in 0..20u64 {
            let dim = 2 + (idx as usize % 2);
            let m = 1 + (idx as usize % 3);
            let obs = suite.observables(idx, dim, m).unwrap();
            let target = obs.expectations(suite.density(50 + idx, dim).as_operator());
            let cs = fit_maxent(&obs, &target, FitOptions::default()).unwrap();
            let d = cs.state_derivatives().unwrap();
            for (a, da) in d.iter().enumerate() {
                assert!(da.trace().abs() < 1e-10);
                for (c, gc) in obs.members().iter().enumerate() {
                    let want = if a == c { 1.0 } else { 0.0 };
                    assert!((gc.inner(da) - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let obs = RandomSuite::new(27).observables(0, 3, 2).unwrap();
        let cs = canonical_from_lambda(&obs, &[0.3, -0.4]).unwrap();
        let back = CanonicalState::from_json(&cs.to_json().unwrap()).unwrap();
        assert_eq!(back.lambda(), cs.lambda());
        assert!(back.mu().as_operator().max_abs_diff(cs.mu().as_operator()) < 1e-15);
        let obs_back = ObservableSet::from_json(&obs.to_json().unwrap()).unwrap();
        assert_eq!(obs_back, obs);
        let text = cs.to_json().unwrap();
        assert!(text.contains("\"logZ\""));
    }
}
