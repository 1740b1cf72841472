//! Seeded experiment sweeps and their CSV reports.
//!
//! Trial `t` of a run draws everything from `stream_rng(seed, t)`, so records
//! do not depend on scheduling and trials run in parallel.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{relative_entropy, Nats};
use crate::error::{Error, Result};
use crate::hypotest::{stein_rate_series, SteinSeries};
use crate::kg::{canonical_coarse_grain, kg_report_csv, product_coarse_grain, KgProjector, KgReportRow};
use crate::maxent::{fit_maxent, CanonicalState, FitOptions, ObservableSet};
use crate::operator::random::{random_density, random_kraus, random_observables, random_unitary, stream_rng};
use crate::operator::{
    partial_trace, tensor_power, DensityMatrix, KrausChannel, RandomSuite, Subsystem, DEFAULT_DIM_CAP,
};

/// Draws beyond this many failed fits abort the trial.
pub const MAX_REDRAWS: usize = 100;
/// Redraw rate above which a run is flagged.
pub const REDRAW_FLAG_RATE: f64 = 0.05;
pub const MAX_DIM: usize = 64;

/// Extended real formatted for reports: `inf`, `-inf`, `nan` or the value.
pub fn fmt_extended(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    #[default]
    Process,
    Monotonicity,
    Product,
    Lindblad,
    Stein,
    KgChecks,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Process,
        Experiment::Monotonicity,
        Experiment::Product,
        Experiment::Lindblad,
        Experiment::Stein,
        Experiment::KgChecks,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Process => "process",
            Experiment::Monotonicity => "monotonicity",
            Experiment::Product => "product",
            Experiment::Lindblad => "lindblad",
            Experiment::Stein => "stein",
            Experiment::KgChecks => "kg-checks",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment `{s}`")))
    }
}

/// Final observables of the process experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinalObservables {
    #[default]
    Random,
    SameAsInitial,
    Empty,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelChoice {
    #[default]
    Random,
    Identity,
    Depolarizing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Hilbert-space dimension; the largest one for sweeps that cycle dimensions.
    pub dim: usize,
    /// Bipartite dimensions for the product experiment.
    pub dims: (usize, usize),
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub n_max: usize,
    pub epsilon: f64,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    /// Process experiment: use `U = 1` instead of a Haar draw.
    pub identity_unitary: bool,
    pub final_observables: FinalObservables,
    pub channel: ChannelChoice,
    /// Stein experiment inputs, as operator JSON documents.
    pub rho: Option<PathBuf>,
    pub sigma: Option<PathBuf>,
    /// Random test operators per `N` in the positivity diagnostic.
    pub diagnostic_trials: usize,
    pub dim_cap: usize,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Process,
            dim: 4,
            dims: (2, 2),
            m: 2,
            trials: 1000,
            seed: 42,
            n_max: 10,
            epsilon: 0.5,
            tolerance: 1e-9,
            out: None,
            identity_unitary: false,
            final_observables: FinalObservables::Random,
            channel: ChannelChoice::Random,
            rho: None,
            sigma: None,
            diagnostic_trials: 500,
            dim_cap: DEFAULT_DIM_CAP,
            parallel: true,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be nonnegative".into()));
        }
        if !(2..=MAX_DIM).contains(&self.dim) {
            return Err(Error::InvalidArgument(format!(
                "dim must lie in 2..={MAX_DIM}, got {}",
                self.dim
            )));
        }
        let (da, db) = self.dims;
        if da < 2 || db < 2 || da * db > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dims {da}x{db} must be at least 2 each with product at most {MAX_DIM}"
            )));
        }
        if self.m + 1 > self.dim * self.dim {
            return Err(Error::InvalidArgument(format!(
                "m = {} exceeds the {} independent traceless observables in dimension {}",
                self.m,
                self.dim * self.dim - 1,
                self.dim
            )));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidArgument("n-max must be at least 1".into()));
        }
        Ok(())
    }
}

/// One row of an inequality sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub dim: usize,
    pub m: usize,
    pub s_before: Nats,
    pub s_after: Nats,
    pub slack: f64,
    pub pass: bool,
    /// Free-form description of the drawn inputs; not part of the CSV.
    pub inputs: String,
}

impl TrialRecord {
    pub fn new(trial: usize, dim: usize, m: usize, s_before: Nats, s_after: Nats, tolerance: f64) -> Self {
        let slack = match (s_before, s_after) {
            (Nats::Finite(b), Nats::Finite(a)) => b - a,
            (Nats::Infinite, Nats::Finite(_)) => f64::INFINITY,
            (Nats::Finite(_), Nats::Infinite) => f64::NEG_INFINITY,
            (Nats::Infinite, Nats::Infinite) => 0.0,
        };
        Self {
            trial,
            dim,
            m,
            s_before,
            s_after,
            slack,
            pass: slack >= -tolerance,
            inputs: String::new(),
        }
    }

    fn with_inputs(mut self, inputs: String) -> Self {
        self.inputs = inputs;
        self
    }
}

pub const RECORD_HEADER: &str = "trial,dim,m,S_before,S_after,slack,pass";

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = format!("{RECORD_HEADER}\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.trial,
            r.dim,
            r.m,
            r.s_before,
            r.s_after,
            fmt_extended(r.slack),
            r.pass
        ));
    }
    out
}

/// A named pass/fail check with its worst observed deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub worst: f64,
    pub detail: String,
}

impl CheckResult {
    fn bound(name: &str, worst: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            pass: worst <= limit,
            worst,
            detail: format!("worst {worst:e}, limit {limit:e}"),
        }
    }
}

pub fn checks_csv(checks: &[CheckResult]) -> String {
    let mut out = String::from("check,pass,worst\n");
    for c in checks {
        out.push_str(&format!("{},{},{}\n", c.name, c.pass, fmt_extended(c.worst)));
    }
    out
}

/// A secondary record table written next to the main CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Companion {
    pub suffix: &'static str,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub records: Vec<TrialRecord>,
    pub companions: Vec<Companion>,
    pub checks: Vec<CheckResult>,
    pub redraws: usize,
    pub stein: Option<SteinSeries>,
    pub kg_rows: Vec<KgReportRow>,
}

impl ExperimentReport {
    fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            records: Vec::new(),
            companions: Vec::new(),
            checks: Vec::new(),
            redraws: 0,
            stein: None,
            kg_rows: Vec::new(),
        }
    }

    fn all_records(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records
            .iter()
            .chain(self.companions.iter().flat_map(|c| c.records.iter()))
    }

    /// Every record passes and every check holds.
    pub fn all_pass(&self) -> bool {
        self.all_records().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }

    pub fn pass_fraction(&self) -> f64 {
        fraction(&self.records)
    }

    pub fn min_slack(&self) -> f64 {
        self.records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn redraw_rate(&self) -> f64 {
        let trials = self.records.len().max(1);
        self.redraws as f64 / (self.redraws + trials) as f64
    }

    pub fn redraws_flagged(&self) -> bool {
        self.redraw_rate() >= REDRAW_FLAG_RATE
    }

    /// The main CSV body.
    pub fn csv(&self) -> String {
        match self.experiment {
            Experiment::Stein => self.stein.as_ref().map(|s| s.to_csv()).unwrap_or_default(),
            Experiment::KgChecks => kg_report_csv(&self.kg_rows),
            _ => records_csv(&self.records),
        }
    }

    /// Companion files as `(suffix, body)` pairs.
    pub fn companion_csvs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .companions
            .iter()
            .map(|c| (c.suffix.to_string(), records_csv(&c.records)))
            .collect();
        if !self.checks.is_empty() {
            out.push(("checks".into(), checks_csv(&self.checks)));
        }
        out
    }

    /// Writes the main CSV to `path` and each companion next to it.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        std::fs::write(path, self.csv())?;
        let mut written = vec![path.to_path_buf()];
        for (suffix, body) in self.companion_csvs() {
            let p = companion_path(path, &suffix);
            std::fs::write(&p, body)?;
            written.push(p);
        }
        Ok(written)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("experiment: {}\n", self.experiment);
        if !self.records.is_empty() {
            s.push_str(&format!(
                "trials: {}\npass fraction: {}\nmin slack: {}\n",
                self.records.len(),
                self.pass_fraction(),
                fmt_extended(self.min_slack())
            ));
        }
        for c in &self.companions {
            s.push_str(&format!(
                "{}: pass fraction {}, min slack {}\n",
                c.suffix,
                fraction(&c.records),
                fmt_extended(c.records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min))
            ));
        }
        s.push_str(&format!(
            "redraws: {} (rate {:.4}){}\n",
            self.redraws,
            self.redraw_rate(),
            if self.redraws_flagged() { " FLAGGED" } else { "" }
        ));
        if let Some(st) = &self.stein {
            s.push_str(&format!("relative entropy: {}\n", st.relative_entropy));
            if let Some(last) = st.points.last() {
                s.push_str(&format!("rate at N={}: {}\n", last.n, last.rate));
            }
        }
        for r in &self.kg_rows {
            s.push_str(&format!(
                "N={}: gamma_N {}, min eig(PGamma) {}, violation fraction {}\n",
                r.n,
                r.gamma_n,
                r.positivity.min_eig,
                r.positivity.violation_fraction()
            ));
        }
        for c in &self.checks {
            s.push_str(&format!(
                "check {}: {} ({})\n",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.detail
            ));
        }
        s.push_str(&format!("all hard invariants: {}\n", if self.all_pass() { "pass" } else { "FAIL" }));
        s
    }
}

fn fraction(records: &[TrialRecord]) -> f64 {
    if records.is_empty() {
        return 1.0;
    }
    records.iter().filter(|r| r.pass).count() as f64 / records.len() as f64
}

/// `out.csv` → `out.<suffix>.csv`.
pub fn companion_path(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.with_extension("").into_os_string();
    s.push(format!(".{suffix}.csv"));
    PathBuf::from(s)
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.experiment {
        Experiment::Process => run_process(config),
        Experiment::Monotonicity => run_monotonicity(config),
        Experiment::Product => run_product(config),
        Experiment::Lindblad => run_lindblad(config),
        Experiment::Stein => run_stein(config),
        Experiment::KgChecks => run_kg_checks(config),
    }
}

fn map_trials<T: Send>(
    config: &ExperimentConfig,
    f: impl Fn(usize, &mut ChaCha20Rng) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let one = |t: usize| f(t, &mut stream_rng(config.seed, t as u64));
    if config.parallel {
        (0..config.trials).into_par_iter().map(one).collect()
    } else {
        (0..config.trials).map(one).collect()
    }
}

fn is_fit_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::Infeasible { .. } | Error::NotConverged { .. } | Error::IllConditioned { .. }
    )
}

/// Retries `draw` until it yields a value, counting failed fits.
fn with_redraws<T>(rng: &mut ChaCha20Rng, mut draw: impl FnMut(&mut ChaCha20Rng) -> Result<T>) -> Result<(T, usize)> {
    let mut redraws = 0;
    loop {
        match draw(rng) {
            Ok(v) => return Ok((v, redraws)),
            Err(e) if is_fit_failure(&e) && redraws < MAX_REDRAWS => redraws += 1,
            Err(e) => return Err(e),
        }
    }
}

fn fit(obs: &ObservableSet, target: &[f64]) -> Result<CanonicalState> {
    fit_maxent(obs, target, FitOptions::default())
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(" "))
}

/// Initial macrostates, one shared process `U`, final macrostates.
pub fn run_process(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (d, m, tol) = (config.dim, config.m, config.tolerance);
    let rows = map_trials(config, |t, rng| {
        let (((g, gp, mg, mgp), (mf, mfp)), redraws) = with_redraws(rng, |rng| {
            let initial = random_observables(rng, d, m)?;
            // targets measured on random states are feasible by construction
            let g = initial.expectations(random_density(rng, d).as_operator());
            let gp = initial.expectations(random_density(rng, d).as_operator());
            let mg = fit(&initial, &g)?;
            let mgp = fit(&initial, &gp)?;
            let u = if config.identity_unitary {
                nalgebra::DMatrix::identity(d, d)
            } else {
                random_unitary(rng, d)
            };
            let fin = match config.final_observables {
                FinalObservables::Random => random_observables(rng, d, m)?,
                FinalObservables::SameAsInitial => initial.clone(),
                FinalObservables::Empty => ObservableSet::empty(d),
            };
            let f = fin.expectations(mg.mu().conjugated(&u).as_operator());
            let fp = fin.expectations(mgp.mu().conjugated(&u).as_operator());
            let mf = fit(&fin, &f)?;
            let mfp = fit(&fin, &fp)?;
            Ok(((g, gp, mg, mgp), (mf, mfp)))
        })?;
        let inputs = format!(
            "g={} g'={} f={} f'={}",
            fmt_vec(&g),
            fmt_vec(&gp),
            fmt_vec(mf.f()),
            fmt_vec(mfp.f())
        );
        let main = TrialRecord::new(
            t,
            d,
            m,
            relative_entropy(mg.mu(), mgp.mu()),
            relative_entropy(mf.mu(), mfp.mu()),
            tol,
        )
        .with_inputs(inputs.clone());
        let uniform = DensityMatrix::maximally_mixed(d);
        let second = TrialRecord::new(
            t,
            d,
            m,
            relative_entropy(mg.mu(), &uniform),
            relative_entropy(mf.mu(), &uniform),
            tol,
        )
        .with_inputs(inputs);
        Ok((main, second, redraws))
    })?;
    let mut report = ExperimentReport::new(Experiment::Process);
    let mut second = Vec::with_capacity(rows.len());
    for (main, sl, redraws) in rows {
        report.records.push(main);
        second.push(sl);
        report.redraws += redraws;
    }
    report.companions.push(Companion {
        suffix: "second_law",
        records: second,
    });
    Ok(report)
}

/// Dimension of trial `t` in sweeps cycling over `2..=max`.
fn cycled_dim(t: usize, max: usize) -> usize {
    2 + t % (max - 1)
}

/// Canonical coarse graining of two random states by a shared observable set.
pub fn run_monotonicity(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let tol = config.tolerance;
    let rows = map_trials(config, |t, rng| {
        let d = cycled_dim(t, config.dim);
        let m = config.m.min(d * d - 1);
        let ((rho, sigma, mr, ms), redraws) = with_redraws(rng, |rng| {
            let rho = random_density(rng, d);
            let sigma = random_density(rng, d);
            let obs = random_observables(rng, d, m)?;
            let mr = canonical_coarse_grain(&rho, &obs)?;
            let ms = canonical_coarse_grain(&sigma, &obs)?;
            Ok((rho, sigma, mr, ms))
        })?;
        let rec = TrialRecord::new(
            t,
            d,
            m,
            relative_entropy(&rho, &sigma),
            relative_entropy(mr.mu(), ms.mu()),
            tol,
        )
        .with_inputs(format!("f(rho)={} f(sigma)={}", fmt_vec(mr.f()), fmt_vec(ms.f())));
        Ok((rec, redraws))
    })?;
    let mut report = ExperimentReport::new(Experiment::Monotonicity);
    for (rec, redraws) in rows {
        report.records.push(rec);
        report.redraws += redraws;
    }
    Ok(report)
}

/// Product coarse graining, with the partial-trace bound as companion.
pub fn run_product(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (da, db) = config.dims;
    let d = da * db;
    let tol = config.tolerance;
    let rows = map_trials(config, |t, rng| {
        let rho = random_density(rng, d);
        let sigma = random_density(rng, d);
        let before = relative_entropy(&rho, &sigma);
        let after = relative_entropy(
            &product_coarse_grain(&rho, (da, db))?,
            &product_coarse_grain(&sigma, (da, db))?,
        );
        let reduced = relative_entropy(
            &partial_trace(&rho, (da, db), Subsystem::A)?,
            &partial_trace(&sigma, (da, db), Subsystem::A)?,
        );
        let inputs = format!("dims={da}x{db}");
        Ok((
            TrialRecord::new(t, d, 0, before, after, tol).with_inputs(inputs.clone()),
            TrialRecord::new(t, d, 0, before, reduced, tol).with_inputs(inputs),
        ))
    })?;
    let mut report = ExperimentReport::new(Experiment::Product);
    let mut partial = Vec::with_capacity(rows.len());
    for (main, pt) in rows {
        report.records.push(main);
        partial.push(pt);
    }
    report.companions.push(Companion {
        suffix: "partial_trace",
        records: partial,
    });
    Ok(report)
}

/// Data processing under channels; dimensions cycle over `2..=dim`, Kraus
/// ranks over `1..=4`.
pub fn run_lindblad(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let tol = config.tolerance;
    let records = map_trials(config, |t, rng| {
        let d = cycled_dim(t, config.dim);
        let rank = 1 + t % 4;
        let rho = random_density(rng, d);
        let sigma = random_density(rng, d);
        let channel = match config.channel {
            ChannelChoice::Random => random_kraus(rng, d, rank),
            ChannelChoice::Identity => KrausChannel::identity(d),
            ChannelChoice::Depolarizing => KrausChannel::full_depolarizing(d),
        };
        let before = relative_entropy(&rho, &sigma);
        let after = relative_entropy(&channel.apply(&rho)?, &channel.apply(&sigma)?);
        Ok(TrialRecord::new(t, d, 0, before, after, tol)
            .with_inputs(format!("kraus_rank={}", channel.kraus_operators().len())))
    })?;
    let mut report = ExperimentReport::new(Experiment::Lindblad);
    report.records = records;
    Ok(report)
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::from_json(&std::fs::read_to_string(path)?)
}

/// Classical Neyman–Pearson optimum by fractional knapsack over the product
/// distributions `p^{⊗N}`, `q^{⊗N}`.
pub fn classical_np_prob(p: &[f64], q: &[f64], eps: f64, n: usize) -> f64 {
    let mut pn = vec![1.0];
    let mut qn = vec![1.0];
    for _ in 0..n {
        pn = pn.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
        qn = qn.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
    }
    let ratio = |i: usize| if qn[i] == 0.0 { f64::INFINITY } else { pn[i] / qn[i] };
    let mut idx: Vec<usize> = (0..pn.len()).filter(|&i| pn[i] > 0.0).collect();
    idx.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)));
    let (mut power, mut cost) = (0.0, 0.0);
    for i in idx {
        if power >= eps {
            break;
        }
        let take = ((eps - power) / pn[i]).min(1.0);
        power += take * pn[i];
        cost += take * qn[i];
    }
    cost
}

/// Stein-rate series; defaults to `diag(0.9, 0.1)` against `diag(0.5, 0.5)`.
pub fn run_stein(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let rho = match &config.rho {
        Some(p) => load_state(p)?,
        None => DensityMatrix::diagonal(&[0.9, 0.1])?,
    };
    let sigma = match &config.sigma {
        Some(p) => load_state(p)?,
        None => DensityMatrix::diagonal(&[0.5, 0.5])?,
    };
    let series = stein_rate_series(&rho, &sigma, config.epsilon, config.n_max, config.dim_cap)?;
    let mut report = ExperimentReport::new(Experiment::Stein);

    if rho == sigma {
        let worst = series
            .points
            .iter()
            .map(|p| (p.rate.to_f64() + config.epsilon.ln() / p.n as f64).abs())
            .fold(0.0, f64::max);
        report.checks.push(CheckResult::bound("identical_states_rate", worst, 1e-9));
    }
    if rho.as_operator().is_diagonal() && sigma.as_operator().is_diagonal() {
        let (p, q) = (rho.as_operator().diagonal(), sigma.as_operator().diagonal());
        let worst = series
            .points
            .iter()
            .map(|pt| (pt.prob - classical_np_prob(&p, &q, config.epsilon, pt.n)).abs())
            .fold(0.0, f64::max);
        report.checks.push(CheckResult::bound("classical_oracle", worst, 1e-9));
    }
    report.stein = Some(series);
    Ok(report)
}

struct KgGridPoint {
    rho: DensityMatrix,
    sigma: DensityMatrix,
    obs: ObservableSet,
}

fn kg_grid(config: &ExperimentConfig) -> Result<Vec<KgGridPoint>> {
    let suite = RandomSuite::new(config.seed);
    let per_cell = config.trials.clamp(1, 20);
    let mut out = Vec::new();
    let mut idx = 0u64;
    for d in 2..=config.dim.min(3) {
        for m in [1usize, 2] {
            for _ in 0..per_cell {
                out.push(KgGridPoint {
                    rho: suite.density(idx, d),
                    sigma: suite.density(idx + 1, d),
                    obs: suite.observables(idx + 2, d, m)?,
                });
                idx += 3;
            }
        }
    }
    Ok(out)
}

/// Worst deviations of the KG invariants over the grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KgBattery {
    pub duality: f64,
    pub traceless: f64,
    pub defining: f64,
    pub pairing: f64,
    pub linearity: f64,
    pub idempotency: f64,
    pub reproduction: f64,
    pub coarse_identity: f64,
    pub gamma_at_mu: f64,
    /// Most negative `ε′ − (μ⊗ᴺ|QΓ) − ε` with `ε, ε′` from the displayed formulas.
    pub pairing_slack: f64,
    /// Grid points whose `γ` is at least 1, where `epsilon_choices` refuses.
    pub gamma_at_least_one: usize,
    pub grid_points: usize,
    pub gamma_by_n: Vec<f64>,
}

pub fn kg_battery(config: &ExperimentConfig) -> Result<KgBattery> {
    let cap = config.dim_cap;
    let n_max = config.n_max.min(3);
    let grid = kg_grid(config)?;
    let suite = RandomSuite::new(config.seed ^ 0x6b67);
    let mut b = KgBattery {
        pairing_slack: f64::INFINITY,
        grid_points: grid.len(),
        gamma_by_n: vec![0.0; n_max],
        ..KgBattery::default()
    };
    for (k, pt) in grid.iter().enumerate() {
        let k = k as u64 * 1000;
        let f_rho = pt.obs.expectations(pt.rho.as_operator());
        let pr = KgProjector::build(&pt.obs, &f_rho)?;
        let ps = KgProjector::build(&pt.obs, &pt.obs.expectations(pt.sigma.as_operator()))?;
        let mu_rho = canonical_coarse_grain(&pt.rho, &pt.obs)?;

        for (a, d) in pr.derivs().iter().enumerate() {
            b.traceless = b.traceless.max(d.trace().abs());
            for (c, g) in pt.obs.members().iter().enumerate() {
                let want = if a == c { 1.0 } else { 0.0 };
                b.duality = b.duality.max((g.inner(d) - want).abs());
            }
        }

        let mut gammas = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let lr = pr.lift(n, cap)?;
            let ls = ps.lift(n, cap)?;
            let dim = lr.dim();
            let rn = tensor_power(&pt.rho, n, cap)?;
            let mn = tensor_power(mu_rho.mu(), n, cap)?;
            let seed = k + 10 * n as u64;
            let g1 = suite.test_operator(seed, dim);
            let g2 = suite.test_operator(seed + 1, dim);
            let tau = suite.density(seed + 2, dim);

            let p1 = lr.apply_observable(g1.as_operator())?;
            b.defining = b
                .defining
                .max((rn.expectation(&p1) - lr.mu_power().inner(g1.as_operator())).abs());
            b.pairing = b.pairing.max(
                (tau.expectation(&p1) - lr.apply_state(tau.as_operator())?.inner(g1.as_operator())).abs(),
            );

            let (x, y) = (0.37, -1.21);
            let combo = lr.apply_observable(&(&g1.as_operator().scaled(x) + &g2.as_operator().scaled(y)))?;
            let sep = &p1.scaled(x) + &lr.apply_observable(g2.as_operator())?.scaled(y);
            b.linearity = b.linearity.max(combo.max_abs_diff(&sep));

            let once = ls.apply_observable(g1.as_operator())?;
            b.idempotency = b
                .idempotency
                .max(lr.apply_observable(&once)?.frobenius_distance(&once));

            let out = ls.apply_state(tau.as_operator())?;
            for (before, after) in ls
                .averaged_expectations(tau.as_operator())
                .iter()
                .zip(ls.averaged_expectations(&out))
            {
                b.reproduction = b.reproduction.max((before - after).abs());
            }

            b.coarse_identity = b
                .coarse_identity
                .max((rn.expectation(&once) - mn.expectation(&once)).abs());

            b.gamma_at_mu = b.gamma_at_mu.max(lr.gamma(mu_rho.mu())?);
            let gamma = ls.gamma(mu_rho.mu())?;
            b.gamma_by_n[n - 1] = b.gamma_by_n[n - 1].max(gamma);
            gammas.push(gamma);
        }

        let gamma = gammas.iter().cloned().fold(0.0, f64::max);
        if gamma >= 1.0 {
            b.gamma_at_least_one += 1;
        }
        let (eps, eps_p) = ((1.0 - gamma) / 2.0, (1.0 + gamma) / 2.0);
        for n in 1..=n_max {
            let ls = ps.lift(n, cap)?;
            let mn = tensor_power(mu_rho.mu(), n, cap)?;
            for j in 0..5u64 {
                let g = suite.test_operator(k + 500 + 10 * n as u64 + j, ls.dim());
                let q = mn.expectation(&ls.apply_complement(g.as_operator())?);
                b.pairing_slack = b.pairing_slack.min(eps_p - q - eps);
            }
        }
    }
    Ok(b)
}

/// KG invariant battery plus the γ / positivity report.
pub fn run_kg_checks(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let b = kg_battery(config)?;
    let mut report = ExperimentReport::new(Experiment::KgChecks);
    report.checks = vec![
        CheckResult::bound("duality", b.duality, 1e-8),
        CheckResult::bound("traceless_derivatives", b.traceless, 1e-10),
        CheckResult::bound("defining_property", b.defining, 1e-9),
        CheckResult::bound("pairing_identity", b.pairing, 1e-9),
        CheckResult::bound("linearity", b.linearity, 1e-10),
        CheckResult::bound("idempotency", b.idempotency, 1e-9),
        CheckResult::bound("expectation_reproduction", b.reproduction, 1e-9),
        CheckResult::bound("coarse_graining_identity", b.coarse_identity, 1e-9),
        CheckResult::bound("gamma_at_mu", b.gamma_at_mu, 1e-10),
        CheckResult {
            name: "pairing_constraint_slack".into(),
            pass: b.pairing_slack >= -1e-9,
            worst: -b.pairing_slack,
            detail: format!(
                "min slack {:e}; gamma >= 1 on {} of {} grid points",
                b.pairing_slack, b.gamma_at_least_one, b.grid_points
            ),
        },
    ];

    // positivity diagnostic at a seeded qubit projector
    let suite = RandomSuite::new(config.seed);
    let obs = suite.observables(u64::MAX, 2, 1)?;
    let target = obs.expectations(suite.density(u64::MAX - 1, 2).as_operator());
    let kg = KgProjector::build(&obs, &target)?;
    for (i, &gamma_n) in b.gamma_by_n.iter().enumerate() {
        let n = i + 1;
        let positivity = kg.positivity_diagnostic(
            n,
            config.diagnostic_trials,
            config.seed.wrapping_add(n as u64),
            config.dim_cap,
        )?;
        report.kg_rows.push(KgReportRow { n, gamma_n, positivity });
    }
    Ok(report)
}
