//! Excess-risk decay under power-law tails.

use serde::{Deserialize, Serialize};

use super::experiment::{run_excess_risk, DensityChoice, ExperimentConfig};
use crate::analysis::{fit_rate, RateFit};
use crate::error::{Error, Result};
use crate::models::LocationModel;
use crate::rng::mix_seed;
use crate::rules::KSchedule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatesConfig {
    pub g_list: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub n_test: usize,
    /// Location of the class-1 center.
    pub b: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl RatesConfig {
    pub fn new(g_list: Vec<f64>, n_grid: Vec<usize>, replications: usize, seed: u64) -> Self {
        Self {
            g_list,
            n_grid,
            replications,
            n_test: 200,
            b: 0.5,
            alpha: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.g_list.is_empty() || self.g_list.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidArgument("g values must be positive".into()));
        }
        if self.n_grid.len() < 4 {
            return Err(Error::TooFewPoints { needed: 4, found: self.n_grid.len() });
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) || self.n_grid[0] == 0 {
            return Err(Error::InvalidArgument("n grid must be positive and strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: usize,
    pub mean_excess: f64,
    pub se: f64,
    /// Risk-difference estimate, for comparison with the margin-weighted one.
    pub mean_risk_excess: f64,
    pub risk_excess_se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub g: f64,
    pub points: Vec<RatePoint>,
    pub fit: RateFit,
    /// `−(1+α) / ((1+α)/g + 2 + d)` with `d = 1`.
    pub predicted_slope: f64,
}

pub fn predicted_slope(g: f64, alpha: f64, d: usize) -> f64 {
    -(1.0 + alpha) / ((1.0 + alpha) / g + 2.0 + d as f64)
}

/// For each `g`, mean margin-weighted excess risk of the `⌊n^(2/(3+α+d))⌋ + 1`
/// rule along the grid, followed by a log-log least-squares slope.
pub fn run_rates(config: &RatesConfig) -> Result<Vec<RateCurve>> {
    config.validate()?;
    let schedule = KSchedule::GeneralRateOffset { alpha: config.alpha };
    config
        .g_list
        .iter()
        .map(|&g| {
            let model = LocationModel::power_law(g, config.b)?;
            let g_seed = mix_seed(config.seed, g.to_bits());
            let points = config
                .n_grid
                .iter()
                .map(|&n| {
                    let res = run_excess_risk(&ExperimentConfig {
                        model: model.into(),
                        n_train: n,
                        n_test: config.n_test,
                        replications: config.replications,
                        schedules: vec![schedule],
                        seed: mix_seed(g_seed, n as u64),
                        density_source: DensityChoice::Analytic,
                    })?;
                    let s = &res.schedules[0];
                    Ok(RatePoint {
                        n,
                        mean_excess: s.mean_margin_excess,
                        se: s.std_error_margin_excess,
                        mean_risk_excess: s.mean_excess,
                        risk_excess_se: s.std_error,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean_excess)).collect();
            Ok(RateCurve {
                g,
                fit: fit_rate(&pairs)?,
                points,
                predicted_slope: predicted_slope(g, config.alpha, 1),
            })
        })
        .collect()
}
