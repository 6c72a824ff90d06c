//! Plug-in estimate, majority vote and the choice of `k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::{FeatureLaw, KdeModel};
use crate::neighbors::{Backend, NeighborIndex};

/// How many neighbors vote.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum KSchedule {
    Fixed { k: usize },
    /// `⌊n^(2/(2+d))⌋`.
    CompactRate,
    /// `⌊n^(2/(3+α+d))⌋`.
    GeneralRate { alpha: f64 },
    /// `⌊n^(2/(3+α+d))⌋ + 1`, the variant used for the standard rule in
    /// the published comparison.
    GeneralRateOffset { alpha: f64 },
    /// `⌊n^(2/(2+α+d)) ln n⌋`, shrunk by `2^(−2j/(2+d))` on density slice `j`.
    SlicedTheoretical { alpha: f64 },
    /// `⌊n^(2/(2+α+d)) 2^(−2j/(2+d))⌋ + 1`, no log factor.
    SlicedEmpirical { alpha: f64 },
}

impl KSchedule {
    pub fn is_sliced(&self) -> bool {
        matches!(self, KSchedule::SlicedTheoretical { .. } | KSchedule::SlicedEmpirical { .. })
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            KSchedule::Fixed { k } => format!("fixed{k}"),
            KSchedule::CompactRate => "compact".into(),
            KSchedule::GeneralRate { .. } => "general".into(),
            KSchedule::GeneralRateOffset { .. } => "standard".into(),
            KSchedule::SlicedTheoretical { .. } => "sliced_theoretical".into(),
            KSchedule::SlicedEmpirical { .. } => "sliced".into(),
        }
    }

    /// Parses the short labels above (`fixed<k>`, `compact`, `general`,
    /// `standard`, `sliced`, `sliced_theoretical`) with margin exponent `alpha`.
    pub fn parse(name: &str, alpha: f64) -> Result<Self> {
        let name = name.trim().to_ascii_lowercase();
        Ok(match name.as_str() {
            "compact" => KSchedule::CompactRate,
            "general" => KSchedule::GeneralRate { alpha },
            "standard" => KSchedule::GeneralRateOffset { alpha },
            "sliced" | "sliced_empirical" => KSchedule::SlicedEmpirical { alpha },
            "sliced_theoretical" => KSchedule::SlicedTheoretical { alpha },
            other => match other.strip_prefix("fixed").map(str::parse::<usize>) {
                Some(Ok(k)) if k > 0 => KSchedule::Fixed { k },
                _ => return Err(Error::InvalidArgument(format!("unknown schedule `{name}`"))),
            },
        })
    }
}

impl fmt::Display for KSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Density used by the sliced schedules.
#[derive(Clone, Copy)]
pub enum DensitySource<'a> {
    Analytic(&'a dyn FeatureLaw),
    Estimated(&'a KdeModel),
}

impl DensitySource<'_> {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DensitySource::Analytic(law) => law.density(x),
            DensitySource::Estimated(kde) => kde.eval(x),
        }
    }
}

/// Which dyadic density level a query falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    /// `μ̂(x) ≥ n^(−α/(2+α+d))`.
    Dense,
    /// `2^(−(j+1)) ≤ μ̂(x) n^(α/(2+α+d)) < 2^(−j)`.
    Level(u32),
    /// `μ̂(x) = 0`: deepest slice, `k = 1`.
    Vanishing,
}

pub fn slice_of(density: f64, n: usize, alpha: f64, d: usize) -> Slice {
    let scaled = density * (n as f64).powf(alpha / (2.0 + alpha + d as f64));
    if scaled >= 1.0 {
        return Slice::Dense;
    }
    if !(scaled > 0.0) {
        return Slice::Vanishing;
    }
    let mut j = (-scaled.log2()).floor().max(0.0) as i32;
    while scaled < 2f64.powi(-(j + 1)) {
        j += 1;
    }
    while j > 0 && scaled >= 2f64.powi(-j) {
        j -= 1;
    }
    Slice::Level(j as u32)
}

/// Floor that tolerates a relative rounding error of 1e-12, so that exact
/// powers such as `1000^(2/3)` are not truncated to 99.
fn floor_pow(v: f64) -> f64 {
    (v * (1.0 + 1e-12)).floor()
}

pub fn choose_k(
    schedule: &KSchedule,
    n: usize,
    d: usize,
    x: Option<&[f64]>,
    density: Option<&DensitySource<'_>>,
) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let nf = n as f64;
    let df = d as f64;
    let raw = match *schedule {
        KSchedule::Fixed { k } => k as f64,
        KSchedule::CompactRate => floor_pow(nf.powf(2.0 / (2.0 + df))),
        KSchedule::GeneralRate { alpha } => floor_pow(nf.powf(2.0 / (3.0 + alpha + df))),
        KSchedule::GeneralRateOffset { alpha } => floor_pow(nf.powf(2.0 / (3.0 + alpha + df))) + 1.0,
        KSchedule::SlicedTheoretical { alpha } | KSchedule::SlicedEmpirical { alpha } => {
            let (x, density) = match (x, density) {
                (Some(x), Some(s)) => (x, s),
                _ => return Err(Error::MissingDensity),
            };
            let base = nf.powf(2.0 / (2.0 + alpha + df));
            let theoretical = matches!(schedule, KSchedule::SlicedTheoretical { .. });
            let top = if theoretical { floor_pow(base * nf.ln()) } else { base };
            match slice_of(density.eval(x), n, alpha, d) {
                Slice::Dense => {
                    if theoretical {
                        top
                    } else {
                        floor_pow(base) + 1.0
                    }
                }
                Slice::Level(j) => {
                    let shrink = 2f64.powf(-2.0 * j as f64 / (2.0 + df));
                    if theoretical {
                        floor_pow(top * shrink)
                    } else {
                        floor_pow(base * shrink) + 1.0
                    }
                }
                Slice::Vanishing => 1.0,
            }
        }
    };
    Ok((raw as usize).clamp(1, n))
}

/// `η̂ = (1/k) Σ Y_(j)`.
pub fn eta_hat(labels: &[u8]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    Ok(labels.iter().map(|&y| y as f64).sum::<f64>() / labels.len() as f64)
}

/// 1 iff the vote share is strictly above one half.
pub fn classify_vote(eta_hat_value: f64) -> u8 {
    u8::from(eta_hat_value > 0.5)
}

/// Vote from the first `k` entries of an ordered label sequence, via the
/// integer comparison `2·Σ > k` (exactly `Σ/k > 1/2`).
pub fn vote_prefix(labels: impl Iterator<Item = u8>, k: usize) -> u8 {
    let ones: usize = labels.take(k).map(usize::from).sum();
    u8::from(2 * ones > k)
}

pub fn classify_knn(
    index: &NeighborIndex<'_>,
    x: &[f64],
    schedule: &KSchedule,
    density: Option<&DensitySource<'_>>,
) -> Result<u8> {
    let k = choose_k(schedule, index.len(), index.dim(), Some(x), density)?;
    let neighbors = index.k_nearest(x, k)?;
    let labels: Vec<u8> = neighbors.iter().map(|nb| nb.label).collect();
    Ok(classify_vote(eta_hat(&labels)?))
}

/// Aggregated rule for two fixed-size samples: `sample0` is labeled 0,
/// `sample1` is labeled 1, and the pooled sample votes with `k` neighbors.
pub fn classify_sda(sample0: &Dataset, sample1: &Dataset, x: &[f64], k: usize) -> Result<u8> {
    if sample0.is_empty() || sample1.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let pooled = sample0.relabeled(0).concat(&sample1.relabeled(1))?;
    let index = NeighborIndex::build(&pooled, Backend::Tree)?;
    classify_knn(&index, x, &KSchedule::Fixed { k }, None)
}
