//! Paired Monte Carlo excess-risk runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ModelSpec;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::{Bandwidth, KdeModel};
use crate::neighbors::{Backend, NeighborIndex};
use crate::rng::derive_stream;
use crate::rules::{choose_k, vote_prefix, DensitySource, KSchedule};

/// Density the sliced schedules slice on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityChoice {
    /// The model's true feature density.
    Analytic,
    /// A Gaussian KDE refit on each replication's training features.
    #[default]
    Kde,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub n_train: usize,
    pub n_test: usize,
    pub replications: usize,
    pub schedules: Vec<KSchedule>,
    pub seed: u64,
    #[serde(default)]
    pub density_source: DensityChoice,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 {
            return Err(Error::InvalidArgument("n_train must be at least 1".into()));
        }
        if self.n_test == 0 {
            return Err(Error::InvalidArgument("n_test must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidArgument("replications must be at least 1".into()));
        }
        if self.schedules.is_empty() {
            return Err(Error::InvalidArgument("at least one schedule is required".into()));
        }
        Ok(())
    }
}

/// Aggregate over replications for one schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub schedule: KSchedule,
    /// `mean_risk − bayes_risk`.
    pub mean_excess: f64,
    /// Sample SD of the per-replication excess over `√R`.
    pub std_error: f64,
    pub mean_risk: f64,
    pub bayes_risk: f64,
    /// Excess against the Bayes rule's error on the same test sets.
    pub mean_excess_vs_empirical_bayes: f64,
    pub std_error_vs_empirical_bayes: f64,
    /// Mean of `|2η(X) − 1|·1{Φₙ(X) ≠ Φ*(X)}` over test points, an
    /// unbiased estimate of the conditional excess risk that does not
    /// carry label noise.
    pub mean_margin_excess: f64,
    pub std_error_margin_excess: f64,
    pub replications: usize,
    /// Per-replication test risk, for paired comparisons.
    pub risks: Vec<f64>,
    /// Per-replication margin-weighted excess.
    pub margin_excess: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub model: String,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    pub bayes_risk: f64,
    /// Per-replication Bayes-rule test risk.
    pub empirical_bayes_risks: Vec<f64>,
    pub schedules: Vec<ScheduleResult>,
}

impl ExperimentResult {
    pub fn schedule(&self, schedule: &KSchedule) -> Option<&ScheduleResult> {
        self.schedules.iter().find(|s| &s.schedule == schedule)
    }

    /// Mean and standard error of the per-replication risk difference
    /// `a − b`, evaluated on shared train/test pairs.
    pub fn paired_difference(&self, a: &KSchedule, b: &KSchedule) -> Option<(f64, f64)> {
        let (ra, rb) = (self.schedule(a)?, self.schedule(b)?);
        let diffs: Vec<f64> = ra.risks.iter().zip(&rb.risks).map(|(x, y)| x - y).collect();
        Some(mean_and_se(&diffs))
    }
}

/// Mean and `sd / √len` (SD with `len − 1` divisor; 0 for a single value).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

struct Replication {
    risks: Vec<f64>,
    margin: Vec<f64>,
    bayes_risk: f64,
}

fn run_replication(config: &ExperimentConfig, r: usize) -> Result<Replication> {
    let model = config.model.as_model();
    let train = model.sample(config.n_train, &derive_stream(config.seed, 2 * r as u64));
    let test = model.sample(config.n_test, &derive_stream(config.seed, 2 * r as u64 + 1));
    evaluate(config, &train, &test)
}

fn evaluate(config: &ExperimentConfig, train: &Dataset, test: &Dataset) -> Result<Replication> {
    let model = config.model.as_model();
    let needs_density = config.schedules.iter().any(KSchedule::is_sliced);
    let kde = match (needs_density, config.density_source) {
        (true, DensityChoice::Kde) => Some(KdeModel::fit(train.coords(), train.dim(), Bandwidth::Silverman)?),
        _ => None,
    };
    let density = match (&kde, needs_density) {
        (Some(kde), _) => Some(DensitySource::Estimated(kde)),
        (None, true) => Some(DensitySource::Analytic(model)),
        (None, false) => None,
    };
    let index = NeighborIndex::build(train, Backend::Tree)?;
    let s = config.schedules.len();
    let mut errors = vec![0usize; s];
    let mut margin = vec![0f64; s];
    let mut bayes_errors = 0usize;
    let mut ks = vec![0usize; s];
    for (x, y) in test.points() {
        for (slot, schedule) in ks.iter_mut().zip(&config.schedules) {
            *slot = choose_k(schedule, train.len(), train.dim(), Some(x), density.as_ref())?;
        }
        let k_max = *ks.iter().max().expect("non-empty schedules");
        let neighbors = index.k_nearest(x, k_max)?;
        let bayes = model.bayes_classify(x);
        let weight = (2.0 * model.eta(x) - 1.0).abs();
        bayes_errors += usize::from(bayes != y);
        for (i, &k) in ks.iter().enumerate() {
            let vote = vote_prefix(neighbors.iter().map(|nb| nb.label), k);
            errors[i] += usize::from(vote != y);
            if vote != bayes {
                margin[i] += weight;
            }
        }
    }
    let m = test.len() as f64;
    Ok(Replication {
        risks: errors.iter().map(|&e| e as f64 / m).collect(),
        margin: margin.iter().map(|&w| w / m).collect(),
        bayes_risk: bayes_errors as f64 / m,
    })
}

/// Runs `config.replications` paired replications. Replication `r` trains
/// on `derive_stream(seed, 2r)` and tests on `derive_stream(seed, 2r + 1)`;
/// every schedule sees the same pairs. Results do not depend on the size of
/// the rayon pool.
pub fn run_excess_risk(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let bayes_risk = config.model.as_model().bayes_risk()?;
    let reps: Vec<Replication> = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect::<Result<_>>()?;
    let empirical_bayes_risks: Vec<f64> = reps.iter().map(|r| r.bayes_risk).collect();
    let schedules = config
        .schedules
        .iter()
        .enumerate()
        .map(|(i, schedule)| {
            let risks: Vec<f64> = reps.iter().map(|r| r.risks[i]).collect();
            let margin_excess: Vec<f64> = reps.iter().map(|r| r.margin[i]).collect();
            let (mean_risk, std_error) = mean_and_se(&risks);
            let vs_emp: Vec<f64> = risks.iter().zip(&empirical_bayes_risks).map(|(a, b)| a - b).collect();
            let (mean_excess_vs_empirical_bayes, std_error_vs_empirical_bayes) = mean_and_se(&vs_emp);
            let (mean_margin_excess, std_error_margin_excess) = mean_and_se(&margin_excess);
            ScheduleResult {
                schedule: *schedule,
                mean_excess: mean_risk - bayes_risk,
                std_error,
                mean_risk,
                bayes_risk,
                mean_excess_vs_empirical_bayes,
                std_error_vs_empirical_bayes,
                mean_margin_excess,
                std_error_margin_excess,
                replications: config.replications,
                risks,
                margin_excess,
            }
        })
        .collect();
    Ok(ExperimentResult {
        model: config.model.name(),
        n_train: config.n_train,
        n_test: config.n_test,
        seed: config.seed,
        bayes_risk,
        empirical_bayes_risks,
        schedules,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers (`None` keeps the
/// global pool).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("thread count must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{LocationModel, ZFamily};

    fn config(model: LocationModel, n: usize, reps: usize, schedules: Vec<KSchedule>) -> ExperimentConfig {
        ExperimentConfig {
            model: model.into(),
            n_train: n,
            n_test: 50,
            replications: reps,
            schedules,
            seed: 11,
            density_source: DensityChoice::Kde,
        }
    }

    #[test]
    fn mean_and_se_hand_values() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_se(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn degenerate_model_has_zero_excess_for_one_neighbor() {
        let m = LocationModel::new(ZFamily::Degenerate, 1.0).unwrap();
        let res = run_excess_risk(&config(m, 20, 5, vec![KSchedule::Fixed { k: 1 }])).unwrap();
        let s = &res.schedules[0];
        assert_eq!(s.mean_risk, 0.0);
        assert_eq!(s.mean_excess, 0.0);
        assert_eq!(s.mean_margin_excess, 0.0);
    }

    #[test]
    fn excess_is_risk_minus_bayes() {
        let m = LocationModel::gauss(2.0, 1.0).unwrap();
        let schedules = vec![KSchedule::GeneralRateOffset { alpha: 1.0 }, KSchedule::SlicedEmpirical { alpha: 1.0 }];
        let res = run_excess_risk(&config(m, 100, 20, schedules)).unwrap();
        for s in &res.schedules {
            assert!((s.mean_excess - (s.mean_risk - s.bayes_risk)).abs() < 1e-12);
            assert!(s.mean_margin_excess >= 0.0);
            assert_eq!(s.risks.len(), 20);
        }
    }

    #[test]
    fn identical_across_thread_counts() {
        let m = LocationModel::cauchy(1.0, 0.5).unwrap();
        let cfg = config(m, 80, 12, vec![KSchedule::GeneralRate { alpha: 1.0 }, KSchedule::SlicedEmpirical { alpha: 1.0 }]);
        let one = with_threads(Some(1), || run_excess_risk(&cfg)).unwrap().unwrap();
        let four = with_threads(Some(4), || run_excess_risk(&cfg)).unwrap().unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn schedules_are_paired() {
        // The same schedule listed twice sees identical data.
        let m = LocationModel::gauss(2.0, 1.0).unwrap();
        let s = KSchedule::Fixed { k: 3 };
        let res = run_excess_risk(&config(m, 60, 10, vec![s, s])).unwrap();
        assert_eq!(res.schedules[0].risks, res.schedules[1].risks);
        assert_eq!(res.paired_difference(&s, &s).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn rejects_empty_config() {
        let m = LocationModel::gauss(2.0, 1.0).unwrap();
        assert!(run_excess_risk(&config(m, 60, 0, vec![KSchedule::Fixed { k: 1 }])).is_err());
        assert!(run_excess_risk(&config(m, 60, 3, vec![])).is_err());
    }
}
