use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use macrolab::harness::{self, Experiment, ExperimentConfig};

/// Seeded entropy-inequality experiments on macrostates.
#[derive(Parser, Debug)]
#[command(name = "macrolab", version)]
struct Cli {
    /// process, monotonicity, product, lindblad, stein or kg-checks
    experiment: Experiment,
    #[arg(long)]
    dim: Option<usize>,
    /// Bipartite dimensions for the product experiment
    #[arg(long, num_args = 2, value_names = ["DA", "DB"])]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// CSV output path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print pass fraction, min slack and redraw counts to stderr
    #[arg(long)]
    summary: bool,
}

impl Cli {
    fn config(&self) -> macrolab::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        c.experiment = self.experiment;
        if let Some(v) = self.dim {
            c.dim = v;
        }
        if let Some(v) = &self.dims {
            c.dims = (v[0], v[1]);
        }
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.n_max {
            c.n_max = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = &self.out {
            c.out = Some(v.clone());
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.config().and_then(|config| {
        let report = harness::run(&config)?;
        match &config.out {
            Some(path) => {
                report.write(path)?;
            }
            None => print!("{}", report.csv()),
        }
        Ok(report)
    });
    match result {
        Ok(report) => {
            if cli.summary {
                eprint!("{}", report.summary());
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("macrolab: {e}");
            ExitCode::from(2)
        }
    }
}
