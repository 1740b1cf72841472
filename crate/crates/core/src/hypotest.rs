//! Optimal binary tests between two states.
//!
//! [`np_optimal_test`] solves
//! `min tr(σΓ)  s.t.  tr(ρΓ) ≥ ε,  0 ≤ Γ ≤ 1`
//! exactly. For a multiplier `t ≥ 0` the Lagrangian is minimized by the
//! projector `Π₊(ρ − tσ)` onto the positive part, plus any operator supported
//! on the kernel of `ρ − tσ`. The power `g(t) = tr(ρ Π₊(ρ − tσ))` is
//! nonincreasing in `t`; bisection locates the `t` where it crosses `ε`, and
//! the near-kernel eigenvectors at that `t` receive the uniform fractional
//! weight that makes the constraint tight.

use crate::entropy::{relative_entropy, Nats};
use crate::error::{Error, Result};
use crate::operator::{
    random::{random_hermitian, random_test_operator},
    support_cutoff, tensor_power, DensityMatrix, EigenDecomposition, HermitianOperator,
    RandomSuite, TestOperator,
};

/// Eigenvalues of `ρ − tσ` with magnitude at most this count as kernel.
pub const NEAR_KERNEL_BAND: f64 = 1e-10;
/// Width of the final `t` bracket.
pub const BISECTION_TOL: f64 = 1e-12;
// deficits below this are rounding, not constraint violations
const POWER_SLACK: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct NpTestResult {
    pub epsilon: f64,
    /// Multiplier `t` of the optimal test; `+∞` when `ρ` puts at least `ε`
    /// of its weight on `ker σ` and the test is perfect.
    pub threshold_t: f64,
    /// `tr(σΓ)` at the optimum.
    pub prob: f64,
    /// `tr(ρΓ)` at the optimum.
    pub power: f64,
    pub gamma_op: TestOperator,
}

impl NpTestResult {
    /// The optimum was reached on `ker σ` with zero error probability.
    pub fn is_perfect(&self) -> bool {
        self.threshold_t.is_infinite()
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// Power `tr(ρ Π₊(ρ − tσ))` together with the decomposition it came from.
fn power_at(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> (f64, EigenDecomposition, Vec<f64>) {
    let diff = rho.as_operator() - &sigma.as_operator().scaled(t);
    let eig = diff.eig();
    let weights = eig.expectations(rho.as_operator());
    let g = eig
        .eigenvalues()
        .iter()
        .zip(&weights)
        .filter(|(&w, _)| w > NEAR_KERNEL_BAND)
        .map(|(_, &p)| p)
        .sum();
    (g, eig, weights)
}

/// `g(t)` on its own, exposed for monotonicity checks.
pub fn positive_part_power(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> f64 {
    power_at(rho, sigma, t).0
}

pub fn np_optimal_test(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<NpTestResult> {
    check_epsilon(eps)?;
    rho.as_operator().check_dim(sigma.as_operator())?;

    // ρ's weight on ker σ is free: it costs nothing under σ
    let se = sigma.as_operator().eig();
    let cut = support_cutoff(se.eigenvalues());
    let on_sigma = se.expectations(rho.as_operator());
    let leak: f64 = se
        .eigenvalues()
        .iter()
        .zip(&on_sigma)
        .filter(|(&s, _)| s <= cut)
        .map(|(_, &p)| p)
        .sum();
    if leak >= eps - POWER_SLACK {
        let c = (eps / leak).min(1.0);
        let weights: Vec<f64> = se
            .eigenvalues()
            .iter()
            .map(|&s| if s <= cut { c } else { 0.0 })
            .collect();
        return Ok(finish(rho, sigma, eps, f64::INFINITY, se.from_weights(&weights)));
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while power_at(rho, sigma, hi).0 >= eps {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::InvalidArgument(
                "Neyman-Pearson threshold diverged".into(),
            ));
        }
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // ties move the bracket down: power that rounds to ε is already enough
        if power_at(rho, sigma, mid).0 > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let t = 0.5 * (lo + hi);
    let (_, eig, on_rho) = power_at(rho, sigma, t);
    let w = eig.eigenvalues();
    let n = w.len();
    // fill from the top, one near-degenerate group at a time; the group that
    // straddles ε gets a uniform fraction
    let mut weights = vec![0.0; n];
    let mut power = 0.0;
    let mut end = n;
    while end > 0 && eps - power > POWER_SLACK {
        let mut start = end - 1;
        while start > 0 && w[end - 1] - w[start - 1] <= 2.0 * NEAR_KERNEL_BAND {
            start -= 1;
        }
        let group: f64 = on_rho[start..end].iter().sum();
        let c = if group > eps - power {
            (eps - power) / group
        } else {
            1.0
        };
        for wk in &mut weights[start..end] {
            *wk = c;
        }
        power += c * group;
        end = start;
    }
    Ok(finish(rho, sigma, eps, t, eig.from_weights(&weights)))
}

fn finish(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    t: f64,
    gamma: HermitianOperator,
) -> NpTestResult {
    NpTestResult {
        epsilon: eps,
        threshold_t: t,
        prob: sigma.expectation(&gamma).clamp(0.0, 1.0),
        power: rho.expectation(&gamma),
        gamma_op: TestOperator::new_unchecked(gamma),
    }
}

/// Optimal test on `ρ^{⊗N}` versus `σ^{⊗N}`.
pub fn np_tensor_test(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    n: usize,
    cap: usize,
) -> Result<NpTestResult> {
    check_epsilon(eps)?;
    rho.as_operator().check_dim(sigma.as_operator())?;
    let rn = tensor_power(rho, n, cap)?;
    let sn = tensor_power(sigma, n, cap)?;
    np_optimal_test(&rn, &sn, eps)
}

/// `prob_ε(ρ^{⊗N} | σ^{⊗N})`.
pub fn prob_eps_tensor(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    n: usize,
    cap: usize,
) -> Result<f64> {
    Ok(np_tensor_test(rho, sigma, eps, n, cap)?.prob)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinPoint {
    pub n: usize,
    pub prob: f64,
    /// `−ln(prob)/N`; infinite for perfect tests.
    pub rate: Nats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinSeries {
    pub epsilon: f64,
    pub relative_entropy: Nats,
    pub points: Vec<SteinPoint>,
}

impl SteinSeries {
    /// `rate_N − S(ρ‖σ)`, with `±∞` when exactly one side is infinite and
    /// NaN when both are.
    pub fn gap(&self, point: &SteinPoint) -> f64 {
        match (point.rate, self.relative_entropy) {
            (Nats::Finite(r), Nats::Finite(s)) => r - s,
            (Nats::Infinite, Nats::Finite(_)) => f64::INFINITY,
            (Nats::Finite(_), Nats::Infinite) => f64::NEG_INFINITY,
            (Nats::Infinite, Nats::Infinite) => f64::NAN,
        }
    }

    /// CSV with header `N,prob,rate,relative_entropy,gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,prob,rate,relative_entropy,gap\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.n,
                p.prob,
                p.rate,
                self.relative_entropy,
                crate::harness::fmt_extended(self.gap(p)),
            ));
        }
        out
    }
}

pub fn stein_rate_series(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    n_max: usize,
    cap: usize,
) -> Result<SteinSeries> {
    check_epsilon(eps)?;
    rho.as_operator().check_dim(sigma.as_operator())?;
    crate::operator::checked_power_dim(rho.dim(), n_max.max(1), cap)?;
    let points = (1..=n_max)
        .map(|n| {
            let r = np_tensor_test(rho, sigma, eps, n, cap)?;
            let rate = if r.is_perfect() || r.prob <= 0.0 {
                Nats::Infinite
            } else {
                Nats::Finite(-r.prob.ln() / n as f64)
            };
            Ok(SteinPoint {
                n,
                prob: r.prob,
                rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SteinSeries {
        epsilon: eps,
        relative_entropy: relative_entropy(rho, sigma),
        points,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledBound {
    /// Smallest `tr(σΓ)` over the sampled feasible tests.
    pub bound: f64,
    /// The exact optimum it is compared with.
    pub prob: f64,
}

impl SampledBound {
    pub fn gap(&self) -> f64 {
        self.bound - self.prob
    }
}

/// Mixes `Γ` toward the identity just enough that `tr(ρΓ) ≥ ε`.
fn make_feasible(gamma: &HermitianOperator, rho: &DensityMatrix, eps: f64) -> HermitianOperator {
    let a = rho.expectation(gamma);
    if a >= eps {
        return gamma.clone();
    }
    let s = (eps - a) / (1.0 - a);
    let id = HermitianOperator::identity(gamma.dim());
    &gamma.scaled(1.0 - s) + &id.scaled(s)
}

/// Upper bound on `prob_ε(ρ^{⊗N} | σ^{⊗N})` from seeded feasible tests:
/// even trials draw random test operators, odd trials perturb the exact
/// minimizer and clip its spectrum to `[0, 1]`.
pub fn sampled_gamma_bound(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    n: usize,
    trials: usize,
    seed: u64,
    cap: usize,
) -> Result<SampledBound> {
    check_epsilon(eps)?;
    let rn = tensor_power(rho, n, cap)?;
    let sn = tensor_power(sigma, n, cap)?;
    let exact = np_optimal_test(&rn, &sn, eps)?;
    let dim = rn.dim();
    let suite = RandomSuite::new(seed);
    let mut bound = f64::INFINITY;
    for i in 0..trials as u64 {
        let mut rng = suite.rng(i);
        let candidate = if i % 2 == 0 {
            random_test_operator(&mut rng, dim).into_operator()
        } else {
            let h = random_hermitian(&mut rng, dim);
            let scale = 1e-3 / h.frobenius_norm().max(f64::MIN_POSITIVE);
            let moved = exact.gamma_op.as_operator() + &h.scaled(scale);
            moved.eig().map(|w| w.clamp(0.0, 1.0))
        };
        let feasible = make_feasible(&candidate, &rn, eps);
        bound = bound.min(sn.expectation(&feasible));
    }
    Ok(SampledBound {
        bound,
        prob: exact.prob,
    })
}
