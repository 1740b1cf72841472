//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the console.
//! The process exits nonzero on any failure, except a failure that the runner
//! itself certifies as a genuine counterexample to the inequality under test.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use macrolab::entropy::relative_entropy;
use macrolab::harness::{self, kg_battery, Experiment, ExperimentConfig, TrialRecord};
use macrolab::hypotest::{np_optimal_test, sampled_gamma_bound, stein_rate_series};
use macrolab::kg::{canonical_coarse_grain, product_coarse_grain};
use macrolab::maxent::{canonical_from_lambda, fit_maxent, FitOptions, ObservableSet};
use macrolab::operator::random::{random_density, stream_rng};
use macrolab::operator::{
    op_function, DensityMatrix, HermitianOperator, OpFunction, RandomSuite, DEFAULT_DIM_CAP,
};

enum Outcome {
    Pass(String),
    Fail(String),
    /// Fails as stated, with every violation independently confirmed.
    Refuted(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn parse_slack(s: &str) -> f64 {
    match s {
        "inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        v => v.parse().unwrap(),
    }
}

fn summarize(rows: &[Vec<String>]) -> (usize, usize, f64) {
    let pass = rows.iter().filter(|r| r[6] == "true").count();
    let min = rows.iter().map(|r| parse_slack(&r[5])).fold(f64::INFINITY, f64::min);
    (pass, rows.len(), min)
}

fn records_summary(records: &[TrialRecord]) -> (usize, usize, f64) {
    let pass = records.iter().filter(|r| r.pass && r.slack >= -1e-9).count();
    let min = records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    (pass, records.len(), min)
}

fn config(experiment: Experiment, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        trials,
        ..ExperimentConfig::new(experiment)
    }
}

fn criterion_1_and_2(dir: &Path) -> (Outcome, Outcome) {
    let out = dir.join("process.csv");
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_macrolab"))
        .args(["process", "--trials", "1000", "--dim", "4", "--m", "2", "--seed", "42", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    let elapsed = start.elapsed();
    let (pass, total, min) = summarize(&csv_rows(&out));
    let c1 = check(
        status.success() && pass == total && total == 1000 && min >= -1e-9 && elapsed < Duration::from_secs(120),
        format!("pass {pass}/{total}, min slack {min:e}, {elapsed:.2?}, exit {status}"),
    );

    let second = csv_rows(&harness::companion_path(&out, "second_law"));
    let worst = second
        .iter()
        .map(|r| parse_slack(&r[4]) - parse_slack(&r[3]))
        .fold(f64::NEG_INFINITY, f64::max);
    let c2 = check(
        second.len() == 1000 && worst <= 1e-9,
        format!("max S(mu_f||1/d) - S(mu_g||1/d) = {worst:e} over {} trials", second.len()),
    );
    (c1, c2)
}

fn criterion_3() -> Outcome {
    let r = harness::run(&config(Experiment::Monotonicity, 1000)).unwrap();
    let (pass, total, min) = records_summary(&r.records);
    let dims_ok = (2..=4).all(|d| r.records.iter().any(|x| x.dim == d));
    check(
        pass == total && dims_ok,
        format!("pass {pass}/{total} over dims 2-4, min slack {min:e}, redraws {}", r.redraws),
    )
}

/// `tr ρ(ln ρ − ln σ)` through matrix logarithms, independent of the
/// eigenbasis bookkeeping in `relative_entropy`.
fn relative_entropy_by_logs(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let lr = op_function(rho.as_operator(), OpFunction::LogOnSupport).unwrap();
    let ls = op_function(sigma.as_operator(), OpFunction::LogOnSupport).unwrap();
    rho.expectation(&(&lr - &ls))
}

fn criterion_4() -> Outcome {
    let r = harness::run(&config(Experiment::Product, 1000)).unwrap();
    let (pass, total, min) = records_summary(&r.records);
    let partial = &r.companions[0];
    let (ppass, ptotal, pmin) = records_summary(&partial.records);
    let detail = format!(
        "product: pass {pass}/{total}, min slack {min:e}; partial trace: pass {ppass}/{ptotal}, min slack {pmin:e}"
    );
    if ppass != ptotal {
        return Outcome::Fail(detail);
    }
    if pass == total {
        return Outcome::Pass(detail);
    }

    // rebuild each violating trial and confirm it by an independent route
    let mut confirmed = 0;
    for rec in r.records.iter().filter(|x| !x.pass) {
        let mut rng = stream_rng(42, rec.trial as u64);
        let rho = random_density(&mut rng, 4);
        let sigma = random_density(&mut rng, 4);
        let before = relative_entropy_by_logs(&rho, &sigma);
        let after = relative_entropy_by_logs(
            &product_coarse_grain(&rho, (2, 2)).unwrap(),
            &product_coarse_grain(&sigma, (2, 2)).unwrap(),
        );
        if after - before > 1e-6 && (before - after - rec.slack).abs() < 1e-8 {
            confirmed += 1;
        }
    }
    let rho = DensityMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    let sigma = DensityMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]).unwrap();
    let classical = relative_entropy(
        &product_coarse_grain(&rho, (2, 2)).unwrap(),
        &product_coarse_grain(&sigma, (2, 2)).unwrap(),
    )
    .to_f64()
        - relative_entropy(&rho, &sigma).to_f64();
    let detail = format!(
        "{detail}; {confirmed}/{} violations confirmed via matrix logs; classical counterexample excess {classical:.7} (= ln 2)",
        total - pass
    );
    if confirmed == total - pass && (classical - 2f64.ln()).abs() < 1e-12 {
        Outcome::Refuted(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn criterion_5() -> Outcome {
    let r = harness::run(&config(Experiment::Lindblad, 1000)).unwrap();
    let (pass, total, min) = records_summary(&r.records);
    check(pass == total, format!("pass {pass}/{total}, min slack {min:e}"))
}

fn criterion_6() -> Outcome {
    let sz = ObservableSet::new(2, vec![HermitianOperator::pauli_z()]).unwrap();
    let fit = fit_maxent(&sz, &[0.5], FitOptions::default()).unwrap();
    let oracle = 0.5f64.atanh();
    let err = (fit.lambda()[0] - oracle).abs();

    let suite = RandomSuite::new(6);
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let d = 2 + (i as usize % 3);
        let m = 1 + (i as usize % 3);
        let obs = suite.observables(2 * i, d, m).unwrap();
        let mut rng = suite.rng(2 * i + 1);
        let lambda: Vec<f64> = (0..m).map(|_| rand::Rng::random_range(&mut rng, -1.5..1.5)).collect();
        let f = canonical_from_lambda(&obs, &lambda).unwrap().f().to_vec();
        let back = fit_maxent(&obs, &f, FitOptions::default()).unwrap();
        for (a, b) in back.lambda().iter().zip(&lambda) {
            worst = worst.max((a - b).abs());
        }
    }
    check(
        err <= 1e-8 && worst <= 1e-7,
        format!("lambda = {:.10} (atanh 0.5 = {oracle:.10}, err {err:e}); round trip worst {worst:e} over 100", fit.lambda()[0]),
    )
}

/// Fractional knapsack by likelihood ratio.
fn knapsack(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let mut idx: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    idx.sort_by(|&a, &b| (p[b] / q[b]).total_cmp(&(p[a] / q[a])));
    let (mut power, mut cost) = (0.0, 0.0);
    for i in idx {
        if power >= eps {
            break;
        }
        let take = ((eps - power) / p[i]).min(1.0);
        power += take * p[i];
        cost += take * q[i];
    }
    cost
}

fn criterion_7() -> Outcome {
    let suite = RandomSuite::new(7);
    let mut same: f64 = 0.0;
    for i in 0..20u64 {
        let rho = suite.density(i, 2 + (i as usize % 3));
        for eps in [0.1, 0.5, 0.9, 1.0] {
            same = same.max((np_optimal_test(&rho, &rho, eps).unwrap().prob - eps).abs());
        }
    }

    let mut classical: f64 = 0.0;
    for i in 0..20u64 {
        let d = 2 + (i as usize % 3);
        let mut rng = suite.rng(100 + i);
        let mut draw = || {
            let v: Vec<f64> = (0..d).map(|_| rand::Rng::random_range(&mut rng, 0.01..1.0)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let (p, q) = (draw(), draw());
        let u = suite.unitary(200 + i, d);
        let rho = DensityMatrix::diagonal(&p).unwrap().conjugated(&u);
        let sigma = DensityMatrix::diagonal(&q).unwrap().conjugated(&u);
        for eps in [0.2, 0.5, 0.95] {
            let got = np_optimal_test(&rho, &sigma, eps).unwrap().prob;
            classical = classical.max((got - knapsack(&p, &q, eps)).abs());
        }
    }
    let fixed = (np_optimal_test(
        &DensityMatrix::diagonal(&[0.9, 0.1]).unwrap(),
        &DensityMatrix::diagonal(&[0.5, 0.5]).unwrap(),
        0.95,
    )
    .unwrap()
    .prob
        - knapsack(&[0.9, 0.1], &[0.5, 0.5], 0.95))
    .abs();
    classical = classical.max(fixed);

    let mut gap = f64::INFINITY;
    for i in 0..3u64 {
        let rho = suite.density(300 + 2 * i, 2);
        let sigma = suite.density(301 + 2 * i, 2);
        let b = sampled_gamma_bound(&rho, &sigma, 0.6, 1, 1000, i, DEFAULT_DIM_CAP).unwrap();
        gap = gap.min(b.gap());
    }
    check(
        same <= 1e-9 && classical <= 1e-10 && gap >= -1e-9,
        format!("rho=sigma err {same:e}; classical oracle err {classical:e}; min sampled gap {gap:e} (1000 draws)"),
    )
}

fn criterion_8() -> Outcome {
    let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
    let sigma = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
    let kl = 0.9 * (0.9f64 / 0.5).ln() + 0.1 * (0.1f64 / 0.5).ln();
    let start = Instant::now();
    let s = stein_rate_series(&rho, &sigma, 0.5, 10, DEFAULT_DIM_CAP).unwrap();
    let elapsed = start.elapsed();
    let (r2, r10) = (s.points[1].rate.to_f64(), s.points[9].rate.to_f64());
    check(
        (r10 - kl).abs() < (r2 - kl).abs()
            && (kl - 0.3680642).abs() < 1e-7
            && (s.relative_entropy.to_f64() - kl).abs() < 1e-12
            && elapsed < Duration::from_secs(60),
        format!("KL {kl:.7}; rate_2 {r2:.7}; rate_10 {r10:.7}; series in {elapsed:.2?}"),
    )
}

fn criterion_9(dir: &Path) -> Outcome {
    let mut cfg = config(Experiment::KgChecks, 5);
    cfg.dim = 3;
    cfg.n_max = 3;
    let b = kg_battery(&cfg).unwrap();
    let report = harness::run(&cfg).unwrap();
    let path = dir.join("kg.csv");
    report.write(&path).unwrap();
    let rows = std::fs::read_to_string(&path).unwrap();
    let report_ok = rows.starts_with("N,gamma_N,min_eig_PGamma,violation_fraction\n") && rows.lines().count() == 4;
    let ok = b.defining < 1e-9
        && b.pairing < 1e-9
        && b.linearity < 1e-10
        && b.idempotency < 1e-9
        && b.reproduction < 1e-9
        && b.coarse_identity < 1e-9
        && b.duality < 1e-8
        && b.traceless < 1e-10
        && b.pairing_slack >= -1e-9
        && b.gamma_at_mu < 1e-10
        && report_ok;
    check(
        ok,
        format!(
            "{} grid points; defining {:.1e}, linearity {:.1e}, idempotency {:.1e}, reproduction {:.1e}, pairing slack min {:.1e} (gamma >= 1 on {}), gamma(mu_f) {:.1e}; report rows {}",
            b.grid_points,
            b.defining,
            b.linearity,
            b.idempotency,
            b.reproduction,
            b.pairing_slack,
            b.gamma_at_least_one,
            b.gamma_at_mu,
            rows.lines().count() - 1
        ),
    )
}

fn criterion_10() -> Outcome {
    let suite = RandomSuite::new(10);
    let (mut canonical, mut product) = (0, 0);
    for i in 0..200u64 {
        let a = suite.density(4 * i, 4);
        let b = suite.density(4 * i + 1, 4);
        let obs = suite.observables(4 * i + 2, 4, 2).unwrap();
        let mix = a.mix(&b, 0.5).unwrap();
        let cg = |r: &DensityMatrix| canonical_coarse_grain(r, &obs).unwrap().mu().clone();
        if cg(&mix).trace_distance(&cg(&a).mix(&cg(&b), 0.5).unwrap()) > 1e-6 {
            canonical += 1;
        }
        let pg = |r: &DensityMatrix| product_coarse_grain(r, (2, 2)).unwrap();
        if pg(&mix).trace_distance(&pg(&a).mix(&pg(&b), 0.5).unwrap()) > 1e-6 {
            product += 1;
        }
    }
    check(
        canonical >= 180 && product >= 180,
        format!("canonical {canonical}/200, product {product}/200 draws non-affine"),
    )
}

fn criterion_11(dir: &Path) -> Outcome {
    let run = |name: &str, args: &[&str]| {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_macrolab"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.code().is_some());
        out
    };
    let mut identical = true;
    let mut compared = 0;
    for (exp, args) in [
        ("process", vec!["process", "--trials", "200", "--seed", "7"]),
        ("monotonicity", vec!["monotonicity", "--trials", "200", "--seed", "7"]),
        ("stein", vec!["stein", "--n-max", "6"]),
    ] {
        let a = run(&format!("{exp}_a.csv"), &args);
        let b = run(&format!("{exp}_b.csv"), &args);
        identical &= std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap();
        compared += 1;
        if exp == "process" {
            let sa = std::fs::read(harness::companion_path(&a, "second_law")).unwrap();
            let sb = std::fs::read(harness::companion_path(&b, "second_law")).unwrap();
            identical &= sa == sb;
            compared += 1;
        }
    }
    check(identical, format!("{compared} CSV pairs byte-identical"))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, c2) = criterion_1_and_2(dir.path());
    let results = vec![
        (1, "extended second law (process)", c1),
        (2, "second-law specialization", c2),
        (3, "monotonicity under canonical coarse graining", criterion_3()),
        (4, "product coarse-graining and partial-trace bounds", criterion_4()),
        (5, "Lindblad monotonicity", criterion_5()),
        (6, "MaxEnt correctness", criterion_6()),
        (7, "Neyman-Pearson exactness", criterion_7()),
        (8, "Stein-rate trend", criterion_8()),
        (9, "KG battery", criterion_9(dir.path())),
        (10, "nonlinearity witness", criterion_10()),
        (11, "determinism", criterion_11(dir.path())),
    ];

    let mut unexpected = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Outcome::Pass(d) => println!("criterion {n:>2} PASS  {name}: {d}"),
            Outcome::Fail(d) => {
                unexpected += 1;
                println!("criterion {n:>2} FAIL  {name}: {d}");
            }
            Outcome::Refuted(d) => {
                println!("criterion {n:>2} FAIL  {name}: {d} [stated inequality refuted by verified counterexamples]")
            }
        }
    }
    let passed = results.iter().filter(|r| matches!(r.2, Outcome::Pass(_))).count();
    println!("acceptance: {passed}/{} PASS, {unexpected} unexpected FAIL", results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
