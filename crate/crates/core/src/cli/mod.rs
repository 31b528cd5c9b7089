//! Command-line pipeline: config resolution, data loading, the `simulate`,
//! `fit`, `compare` and `perm-test` commands, and the JSON report.
//!
//! Every command reads an optional TOML config and applies flag overrides
//! on top of it. The resolved config, with every seed explicit, is echoed
//! into the report.

mod config;
mod csv_io;
mod report;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Command, GaussianSpec, ModelKind, OptimizerKind, RunConfig, SimulationSpec, DEFAULT_SEED};
pub use csv_io::{load_csv, load_values, write_csv, write_values, ChoiceSchema};
pub use report::{
    read_report, write_report, ArmReport, BootstrapSummary, DatasetSummary, DistanceRecord, PermutationRecord,
    Report, TOOL_VERSION,
};
pub use run::{
    comparison_pairs, estimate, prepare_data, run_compare, run_fit, run_perm_test, run_simulate, second_step,
    GaussianData, ModelData, Prepared, PreparedData, BOOTSTRAP, GRADIENT, TWO_STEP,
};

use crate::covariance::CovMethod;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "twostep", version, about = "Two-step maximum likelihood: global search, then automatic differentiation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Simulate a multinomial-logit (or normal) dataset and write it as CSV.
    Simulate(RunArgs),
    /// Estimate, then compute AD standard errors at the estimate.
    Fit(RunArgs),
    /// Two-step, gradient and bootstrap standard errors with distances and
    /// permutation tests.
    Compare(RunArgs),
    /// Permutation test between two vectors.
    PermTest(RunArgs),
}

/// Flags shared by every subcommand. Each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV, one row per observation.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub choice_col: Option<String>,
    /// Covariate columns, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub covariates: Option<Vec<String>>,
    /// Alternative labels in index order, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub label_order: Option<Vec<String>>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerKind>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub bounds: Option<Vec<f64>>,
    /// Covariance estimators, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub covariance: Option<Vec<CovMethod>>,
    /// Starting points for the gradient multistart.
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long = "bootstrap-B")]
    pub bootstrap_b: Option<usize>,
    #[arg(long)]
    pub perm_iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path: the report (JSON), or the CSV for `simulate`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Simulated alternatives J.
    #[arg(long)]
    pub alternatives: Option<usize>,
    /// Simulated covariate count K.
    #[arg(long = "n-covariates")]
    pub n_covariates: Option<usize>,
    /// Simulated observations.
    #[arg(long)]
    pub n: Option<usize>,
    /// Known standard deviation of the normal mean model.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// First vector for `perm-test`, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Option<Vec<f64>>,
    /// Second vector for `perm-test`, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b: Option<Vec<f64>>,
}

impl RunArgs {
    /// The config file (or defaults) with these flags applied.
    pub fn to_config(&self, command: Command) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.command = command;
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = &self.$flag { cfg.$($field).+ = v.clone(); })*
            };
        }
        set!(
            choice_col => choice_col,
            model => model,
            optimizer => optimizer,
            covariance => covariance,
            starts => starts,
            bootstrap_b => bootstrap_b,
            perm_iters => perm_iters,
            alternatives => simulation.alternatives,
            n_covariates => simulation.covariates,
            sigma => gaussian.sigma,
        );
        if self.data.is_some() {
            cfg.data = self.data.clone();
        }
        if self.covariates.is_some() {
            cfg.covariates = self.covariates.clone();
        }
        if self.label_order.is_some() {
            cfg.label_order = self.label_order.clone();
        }
        if let Some(b) = &self.bounds {
            cfg.bounds = [b[0], b[1]];
        }
        if let Some(n) = self.n {
            cfg.simulation.n = n;
            cfg.gaussian.n = n;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.a.is_some() {
            cfg.perm_a = self.a.clone();
        }
        if self.b.is_some() {
            cfg.perm_b = self.b.clone();
        }
        Ok(cfg)
    }
}

fn emit(report: &Report, out: &Option<PathBuf>) -> Result<String> {
    match out {
        Some(path) => {
            write_report(report, path)?;
            Ok(format!("report written to {}", path.display()))
        }
        None => Ok(serde_json::to_string_pretty(report)?),
    }
}

/// Executes a parsed command line; returns the text for stdout.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        CliCommand::Simulate(args) => {
            let cfg = args.to_config(Command::Simulate)?;
            let out = cfg
                .out
                .clone()
                .ok_or_else(|| Error::Config("simulate needs --out for the CSV file".into()))?;
            let prepared = run_simulate(&cfg)?;
            match &prepared.data {
                Prepared::Choice(d) => write_csv(d, &out)?,
                Prepared::Gaussian(d) => write_values(&d.values, &cfg.gaussian.value_col, &out)?,
            }
            let summary = serde_json::json!({
                "out": out,
                "dataset": prepared.summary,
                "parameter-names": prepared.parameter_names,
                "theta-true": prepared.theta_true,
            });
            Ok(serde_json::to_string_pretty(&summary)?)
        }
        CliCommand::Fit(args) => {
            let cfg = args.to_config(Command::Fit)?;
            emit(&run_fit(&cfg)?, &cfg.out)
        }
        CliCommand::Compare(args) => {
            let cfg = args.to_config(Command::Compare)?;
            emit(&run_compare(&cfg)?, &cfg.out)
        }
        CliCommand::PermTest(args) => {
            let cfg = args.to_config(Command::PermTest)?;
            emit(&run_perm_test(&cfg)?, &cfg.out)
        }
    }
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(text) => {
            let _ = writeln!(std::io::stdout(), "{text}");
            0
        }
        Err(e) => {
            let category = e.category();
            eprintln!("error ({category:?}): {e}");
            category.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from([
            "twostep",
            "fit",
            "--optimizer",
            "nelder-mead",
            "--bounds",
            "-3",
            "3",
            "--covariance",
            "opg,hessian",
            "--seed",
            "4",
            "--bootstrap-B",
            "12",
        ])
        .unwrap();
        let CliCommand::Fit(args) = cli.command else {
            panic!("wrong subcommand");
        };
        let cfg = args.to_config(Command::Fit).unwrap();
        assert_eq!(cfg.optimizer, OptimizerKind::NelderMead);
        assert_eq!(cfg.bounds, [-3.0, 3.0]);
        assert_eq!(cfg.covariance, vec![CovMethod::Opg, CovMethod::Hessian]);
        assert_eq!(cfg.seed, Some(4));
        assert_eq!(cfg.bootstrap_b, 12);
    }

    #[test]
    fn config_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "seed = 1\nstarts = 7\n[simulation]\nn = 50\n").unwrap();
        let args = RunArgs {
            config: Some(path),
            seed: Some(2),
            ..Default::default()
        };
        let cfg = args.to_config(Command::Fit).unwrap();
        assert_eq!(cfg.seed, Some(2));
        assert_eq!(cfg.starts, 7);
        assert_eq!(cfg.simulation.n, 50);
    }

    #[test]
    fn usage_errors_exit_with_code_two() {
        assert_eq!(main_with_args(["twostep", "fit", "--bounds", "1", "0"]), 2);
        assert_eq!(main_with_args(["twostep", "frobnicate"]), 2);
    }
}
