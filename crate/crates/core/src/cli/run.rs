use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{stream, Command, ModelKind, OptimizerKind, RunConfig};
use super::csv_io::{load_csv, load_values, ChoiceSchema};
use super::report::{ArmReport, BootstrapSummary, DatasetSummary, DistanceRecord, PermutationRecord, Report};
use crate::autodiff::{gradient, hessian, score_matrix};
use crate::covariance::{cov_from_hessian, cov_from_opg, cov_sandwich, standard_errors, CovMethod};
use crate::error::{Error, Result};
use crate::models::{param_count, parameter_names, simulate_dataset, ChoiceDataset, GaussianMean, Mnl};
use crate::objective::{Likelihood, NegLogLik, TotalLogLik};
use crate::optimize::{
    bfgs, gradient_fn, multistart, nelder_mead, objective_fn, random_init, simulated_annealing, Bounds,
    OptimizationResult,
};
use crate::resample::{bootstrap_se, euclidean_distance, permutation_test, Resample};
use crate::seed;

pub const TWO_STEP: &str = "two-step";
pub const GRADIENT: &str = "gradient";
pub const BOOTSTRAP: &str = "bootstrap";

/// Observations of the known-sigma normal mean model.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianData {
    pub values: Vec<f64>,
    pub sigma: f64,
}

impl Resample for GaussianData {
    fn n_obs(&self) -> usize {
        self.values.len()
    }

    fn resample(&self, indices: &[usize]) -> Self {
        GaussianData {
            values: self.values.resample(indices),
            sigma: self.sigma,
        }
    }
}

/// A dataset together with the likelihood it feeds.
pub trait ModelData: Resample {
    type Model<'a>: Likelihood
    where
        Self: 'a;

    fn model(&self) -> Result<Self::Model<'_>>;
}

impl ModelData for ChoiceDataset {
    type Model<'a> = Mnl<'a>;

    fn model(&self) -> Result<Mnl<'_>> {
        Ok(Mnl::new(self))
    }
}

impl ModelData for GaussianData {
    type Model<'a> = GaussianMean<'a>;

    fn model(&self) -> Result<GaussianMean<'_>> {
        GaussianMean::new(&self.values, self.sigma)
    }
}

/// Data resolved from a config, either loaded or simulated.
#[derive(Debug, Clone)]
pub enum Prepared {
    Choice(ChoiceDataset),
    Gaussian(GaussianData),
}

#[derive(Debug, Clone)]
pub struct PreparedData {
    pub data: Prepared,
    pub summary: DatasetSummary,
    pub parameter_names: Vec<String>,
    pub theta_true: Option<Vec<f64>>,
}

fn draw_theta_true(cfg: &RunConfig, p: usize) -> Result<Vec<f64>> {
    let sim = &cfg.simulation;
    match &sim.theta_true {
        Some(t) if t.len() == p => Ok(t.clone()),
        Some(t) => Err(Error::Config(format!(
            "theta-true has {} entries, the model has {p} parameters",
            t.len()
        ))),
        None => {
            let mut rng = seed::rng(cfg.stream_seed(stream::THETA_TRUE));
            Ok((0..p)
                .map(|_| sim.theta_scale * rng.sample::<f64, _>(StandardNormal))
                .collect())
        }
    }
}

/// Loads `cfg.data`, or simulates when no file is configured.
pub fn prepare_data(cfg: &RunConfig) -> Result<PreparedData> {
    let sim_seed = cfg
        .simulation
        .seed
        .unwrap_or_else(|| cfg.stream_seed(stream::SIMULATION));
    match cfg.model {
        ModelKind::Mnl => {
            let (data, theta_true, source) = match &cfg.data {
                Some(path) => {
                    let schema = ChoiceSchema {
                        choice_col: cfg.choice_col.clone(),
                        covariates: cfg.covariates.clone(),
                        label_order: cfg.label_order.clone(),
                    };
                    (load_csv(path, &schema)?, None, path.display().to_string())
                }
                None => {
                    let sim = &cfg.simulation;
                    let p = param_count(sim.alternatives, sim.covariates)?;
                    let theta = draw_theta_true(cfg, p)?;
                    let data = simulate_dataset(sim.alternatives, sim.covariates, sim.n, &theta, sim_seed)?;
                    (data, Some(theta), format!("simulated (seed {sim_seed})"))
                }
            };
            let summary = DatasetSummary {
                model: "mnl".into(),
                source,
                n_obs: data.n_obs(),
                alternatives: Some(data.alternatives()),
                covariates: Some(data.covariates()),
                labels: data.labels().to_vec(),
                covariate_names: data.covariate_names().to_vec(),
            };
            Ok(PreparedData {
                parameter_names: parameter_names(data.labels(), data.covariate_names()),
                data: Prepared::Choice(data),
                summary,
                theta_true,
            })
        }
        ModelKind::GaussianMean => {
            let g = &cfg.gaussian;
            let (values, theta_true, source) = match &cfg.data {
                Some(path) => (load_values(path, &g.value_col)?, None, path.display().to_string()),
                None => {
                    if g.n == 0 {
                        return Err(Error::Config("gaussian n must be at least 1".into()));
                    }
                    let mut rng = seed::rng(sim_seed);
                    let values = (0..g.n)
                        .map(|_| g.mean + g.sigma * rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    (values, Some(vec![g.mean]), format!("simulated (seed {sim_seed})"))
                }
            };
            let summary = DatasetSummary {
                model: "gaussian-mean".into(),
                source,
                n_obs: values.len(),
                alternatives: None,
                covariates: None,
                labels: Vec::new(),
                covariate_names: vec![g.value_col.clone()],
            };
            Ok(PreparedData {
                data: Prepared::Gaussian(GaussianData { values, sigma: g.sigma }),
                summary,
                parameter_names: vec!["mu".into()],
                theta_true,
            })
        }
    }
}

/// Step 1: minimizes `−log L` with the chosen optimizer from `init`.
pub fn estimate<L: Likelihood>(
    model: &L,
    optimizer: OptimizerKind,
    cfg: &RunConfig,
    init: &[f64],
) -> Result<OptimizationResult> {
    let neg = NegLogLik(model);
    match optimizer {
        OptimizerKind::Sa => {
            let bounds = Bounds::uniform(model.dim(), cfg.bounds[0], cfg.bounds[1])?;
            simulated_annealing(objective_fn(&neg), &bounds, &cfg.schedule, init)
        }
        OptimizerKind::Bfgs => bfgs(objective_fn(&neg), gradient_fn(&neg), init, &cfg.bfgs),
        OptimizerKind::NelderMead => nelder_mead(objective_fn(&neg), init, &cfg.nelder_mead),
    }
}

/// Step 2: derivatives at `theta_hat` and the requested standard errors,
/// filled into `arm`. Per-method failures are recorded, not raised.
pub fn second_step<L: Likelihood>(model: &L, theta_hat: &[f64], methods: &[CovMethod], arm: &mut ArmReport) {
    let total = TotalLogLik(model);
    arm.theta_hat = Some(theta_hat.to_vec());
    let derivatives = (|| -> Result<_> {
        arm.loglik = Some(model.loglik(theta_hat)?);
        arm.gradient_inf_norm = Some(gradient(&total, theta_hat)?.inf_norm());
        let needs_h = methods.iter().any(|m| *m != CovMethod::Opg);
        let needs_g = methods.iter().any(|m| *m != CovMethod::Hessian);
        let h = if needs_h { Some(hessian(&total, theta_hat)?) } else { None };
        let g = if needs_g { Some(score_matrix(model, theta_hat)?) } else { None };
        Ok((h, g))
    })();
    let (h, g) = match derivatives {
        Ok(v) => v,
        Err(e) => {
            arm.failure = Some(format!("derivatives at the estimate: {e}"));
            return;
        }
    };
    for &method in methods {
        let cov = match method {
            CovMethod::Hessian => cov_from_hessian(h.as_ref().expect("hessian computed")),
            CovMethod::Opg => cov_from_opg(g.as_ref().expect("scores computed")),
            CovMethod::Sandwich => cov_sandwich(
                h.as_ref().expect("hessian computed"),
                g.as_ref().expect("scores computed"),
            ),
        };
        match cov.and_then(|c| {
            let jittered = c.jittered();
            standard_errors(&c).map(|se| (se, jittered))
        }) {
            Ok((se, jittered)) => {
                if jittered {
                    arm.jittered.push(method.to_string());
                }
                arm.standard_errors.insert(method.to_string(), se.into_vec());
            }
            Err(e) => {
                arm.covariance_failures.insert(method.to_string(), e.to_string());
            }
        }
    }
}

fn record_optimum(arm: &mut ArmReport, r: &OptimizationResult) {
    arm.evaluations = Some(r.evaluations);
    arm.converged = Some(r.converged);
    arm.message = Some(r.message.clone());
}

fn two_step_arm<D: ModelData>(data: &D, cfg: &RunConfig) -> ArmReport {
    let mut arm = ArmReport {
        name: TWO_STEP.into(),
        optimizer: cfg.optimizer.to_string(),
        ..Default::default()
    };
    let outcome = data.model().and_then(|model| {
        let init = random_init(model.dim(), cfg.stream_seed(stream::INIT))?;
        let r = estimate(&model, cfg.optimizer, cfg, &init)?;
        record_optimum(&mut arm, &r);
        second_step(&model, &r.theta_hat, &cfg.covariance, &mut arm);
        Ok(())
    });
    if let Err(e) = outcome {
        arm.failure = Some(e.to_string());
    }
    arm
}

fn gradient_arm<D: ModelData>(data: &D, cfg: &RunConfig) -> ArmReport {
    let mut arm = ArmReport {
        name: GRADIENT.into(),
        optimizer: format!("bfgs x{}", cfg.starts),
        ..Default::default()
    };
    let outcome = data.model().and_then(|model| {
        let r = multistart(model.dim(), cfg.starts, cfg.stream_seed(stream::MULTISTART), |init| {
            estimate(&model, OptimizerKind::Bfgs, cfg, init)
        })?;
        record_optimum(&mut arm, &r);
        second_step(&model, &r.theta_hat, &cfg.covariance, &mut arm);
        Ok(())
    });
    if let Err(e) = outcome {
        arm.failure = Some(e.to_string());
    }
    arm
}

fn bootstrap_arm<D: ModelData>(data: &D, cfg: &RunConfig, warm_start: &[f64]) -> ArmReport {
    let mut arm = ArmReport {
        name: BOOTSTRAP.into(),
        optimizer: cfg.bootstrap_optimizer.to_string(),
        ..Default::default()
    };
    let seed = cfg.stream_seed(stream::BOOTSTRAP);
    let refit = |sample: &D| -> Result<Vec<f64>> {
        let model = sample.model()?;
        let r = estimate(&model, cfg.bootstrap_optimizer, cfg, warm_start)?;
        if !r.converged {
            return Err(Error::Optimizer(format!("refit did not converge: {}", r.message)));
        }
        Ok(r.theta_hat)
    };
    match bootstrap_se(data, cfg.bootstrap_b, refit, seed) {
        Ok(b) => {
            arm.standard_errors.insert(BOOTSTRAP.into(), b.se.into_vec());
            arm.bootstrap = Some(BootstrapSummary {
                replicates: b.replicates,
                failures: b.failures,
                seed: b.seed,
            });
        }
        Err(e) => arm.failure = Some(e.to_string()),
    }
    arm
}

fn seconds_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn base_report(cfg: &RunConfig, prepared: &PreparedData) -> Report {
    let mut report = Report::new(&cfg.command.to_string(), cfg.clone());
    report.dataset = Some(prepared.summary.clone());
    report.parameter_names = prepared.parameter_names.clone();
    report.theta_true = prepared.theta_true.clone();
    report
}

fn dispatch_fit<D: ModelData>(data: &D, cfg: &RunConfig, report: &mut Report) {
    let t = Instant::now();
    report.arms.push(two_step_arm(data, cfg));
    report.timings.insert(TWO_STEP.into(), seconds_since(t));
}

/// Runs the two-step estimator: optimizer (annealing by default), then
/// AD derivatives and standard errors at the optimum.
pub fn run_fit(cfg: &RunConfig) -> Result<Report> {
    let cfg = RunConfig {
        command: Command::Fit,
        ..cfg.clone()
    }
    .resolve()?;
    let start = Instant::now();
    let prepared = prepare_data(&cfg)?;
    let mut report = base_report(&cfg, &prepared);
    match &prepared.data {
        Prepared::Choice(d) => dispatch_fit(d, &cfg, &mut report),
        Prepared::Gaussian(d) => dispatch_fit(d, &cfg, &mut report),
    }
    report.timings.insert("total".into(), seconds_since(start));
    Ok(report)
}

fn dispatch_compare<D: ModelData>(data: &D, cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let two_step = two_step_arm(data, cfg);
    report.timings.insert(TWO_STEP.into(), seconds_since(t));

    let t = Instant::now();
    let grad = gradient_arm(data, cfg);
    report.timings.insert(GRADIENT.into(), seconds_since(t));

    let warm = match (&grad.theta_hat, &two_step.theta_hat) {
        (Some(t), _) | (None, Some(t)) => t.clone(),
        (None, None) => {
            let dim = data.model()?.dim();
            random_init(dim, cfg.stream_seed(stream::INIT))?
        }
    };
    let t = Instant::now();
    let boot = bootstrap_arm(data, cfg, &warm);
    report.timings.insert(BOOTSTRAP.into(), seconds_since(t));
    report.arms = vec![two_step, grad, boot];
    Ok(())
}

/// Candidate comparisons, per covariance method `m`: two-step vs gradient,
/// two-step vs bootstrap, gradient vs bootstrap.
pub fn comparison_pairs(methods: &[CovMethod]) -> Vec<(String, String)> {
    methods
        .iter()
        .flat_map(|m| {
            let a = format!("{TWO_STEP}/{m}");
            let b = format!("{GRADIENT}/{m}");
            [
                (a.clone(), b.clone()),
                (a, BOOTSTRAP.to_string()),
                (b, BOOTSTRAP.to_string()),
            ]
        })
        .collect()
}

fn compare_vectors(report: &mut Report, pairs: &[(String, String)], iterations: usize, perm_seed: u64) -> Result<()> {
    for (k, (a, b)) in pairs.iter().enumerate() {
        let (Some(va), Some(vb)) = (report.vector(a), report.vector(b)) else {
            continue;
        };
        let (va, vb) = (va.to_vec(), vb.to_vec());
        report.distances.push(DistanceRecord {
            a: a.clone(),
            b: b.clone(),
            distance: euclidean_distance(&va, &vb)?,
        });
        if va.len() >= 2 {
            let test = permutation_test(&va, &vb, iterations, seed::derive(perm_seed, k as u64))?;
            report.permutation_tests.push(PermutationRecord {
                a: a.clone(),
                b: b.clone(),
                test,
            });
        }
    }
    Ok(())
}

/// Two-step, gradient multistart and bootstrap standard errors, with all
/// pairwise distances and permutation tests between surviving arms.
pub fn run_compare(cfg: &RunConfig) -> Result<Report> {
    let cfg = RunConfig {
        command: Command::Compare,
        ..cfg.clone()
    }
    .resolve()?;
    let start = Instant::now();
    let prepared = prepare_data(&cfg)?;
    let mut report = base_report(&cfg, &prepared);
    match &prepared.data {
        Prepared::Choice(d) => dispatch_compare(d, &cfg, &mut report)?,
        Prepared::Gaussian(d) => dispatch_compare(d, &cfg, &mut report)?,
    }
    let t = Instant::now();
    let pairs = comparison_pairs(&cfg.covariance);
    compare_vectors(&mut report, &pairs, cfg.perm_iters, cfg.stream_seed(stream::PERMUTATION))?;
    report.timings.insert("permutation".into(), seconds_since(t));
    report.timings.insert("total".into(), seconds_since(start));
    Ok(report)
}

/// Distance and permutation test between the configured `perm-a` and
/// `perm-b` vectors.
pub fn run_perm_test(cfg: &RunConfig) -> Result<Report> {
    let cfg = RunConfig {
        command: Command::PermTest,
        ..cfg.clone()
    }
    .resolve()?;
    let (Some(a), Some(b)) = (cfg.perm_a.clone(), cfg.perm_b.clone()) else {
        return Err(Error::Config("perm-test needs both perm-a and perm-b vectors".into()));
    };
    let start = Instant::now();
    let mut report = Report::new(&cfg.command.to_string(), cfg.clone());
    report.vectors = BTreeMap::from([("a".to_string(), a), ("b".to_string(), b)]);
    let pairs = [("a".to_string(), "b".to_string())];
    compare_vectors(&mut report, &pairs, cfg.perm_iters, cfg.stream_seed(stream::PERMUTATION))?;
    if report.permutation_tests.is_empty() {
        return Err(Error::Argument("perm-test vectors need at least 2 coordinates".into()));
    }
    report.timings.insert("total".into(), seconds_since(start));
    Ok(report)
}

/// Simulates (or loads) the configured dataset.
pub fn run_simulate(cfg: &RunConfig) -> Result<PreparedData> {
    let cfg = RunConfig {
        command: Command::Simulate,
        data: None,
        ..cfg.clone()
    }
    .resolve()?;
    prepare_data(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::AnnealingSchedule;

    fn small_mnl() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.simulation.alternatives = 3;
        cfg.simulation.covariates = 1;
        cfg.simulation.n = 300;
        cfg.schedule = AnnealingSchedule {
            cooling: 0.8,
            steps_per_temp: Some(40),
            ..Default::default()
        };
        cfg
    }

    #[test]
    fn fit_reports_every_method() {
        let report = run_fit(&small_mnl()).unwrap();
        let arm = report.arm(TWO_STEP).unwrap();
        assert!(arm.failure.is_none(), "{:?}", arm.failure);
        assert_eq!(arm.theta_hat.as_ref().unwrap().len(), 4);
        assert_eq!(arm.standard_errors.len(), 3);
        assert!(arm.standard_errors.values().all(|v| v.len() == 4));
        assert!(arm.gradient_inf_norm.unwrap() < 1e-3);
        assert_eq!(report.parameter_names.len(), 4);
    }

    #[test]
    fn gaussian_fit_matches_closed_form() {
        let mut cfg = RunConfig {
            model: ModelKind::GaussianMean,
            optimizer: OptimizerKind::Bfgs,
            ..Default::default()
        };
        cfg.gaussian.n = 100;
        cfg.gaussian.sigma = 2.0;
        let report = run_fit(&cfg).unwrap();
        let se = &report.arm(TWO_STEP).unwrap().standard_errors["hessian"];
        assert!((se[0] - 0.2).abs() < 1e-8);
    }

    #[test]
    fn perm_test_needs_vectors() {
        assert!(run_perm_test(&RunConfig::default()).is_err());
        let cfg = RunConfig {
            perm_a: Some(vec![1.0, 2.0, 3.0]),
            perm_b: Some(vec![3.0, 2.0, 1.0]),
            perm_iters: 1000,
            ..Default::default()
        };
        let report = run_perm_test(&cfg).unwrap();
        assert_eq!(report.distance("a", "b"), Some(8.0_f64.sqrt()));
    }

    #[test]
    fn pairs_cover_each_method() {
        let pairs = comparison_pairs(&[CovMethod::Hessian]);
        assert_eq!(pairs.len(), 3);
        assert_eq!(pairs[1], ("two-step/hessian".to_string(), "bootstrap".to_string()));
    }
}
