//! Two-sample (smooth discriminant analysis) simulations and the
//! Poissonization identity.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::mean_and_se;
use crate::analysis::McEstimate;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::{sample_law, ClassModel, FeatureLaw};
use crate::neighbors::{euclidean, Backend, NeighborIndex};
use crate::quadrature::integrate_line;
use crate::rng::{mix_seed, RngStream, StreamRng};
use crate::rules::vote_prefix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdaResult {
    pub n: usize,
    pub k: usize,
    pub mean_risk: f64,
    pub std_error: f64,
    /// `½ ∫ min(f, g)`.
    pub bayes_risk: f64,
    pub mean_excess: f64,
    pub replications: usize,
    pub risks: Vec<f64>,
}

/// `½ ∫ min(f₀, f₁)` in one dimension.
pub fn sda_bayes_risk(f0: &dyn FeatureLaw, f1: &dyn FeatureLaw) -> Result<f64> {
    if f0.dim() != 1 || f1.dim() != 1 {
        return Err(Error::InvalidArgument("SDA Bayes risk is computed in one dimension only".into()));
    }
    let mut breaks = f0.breakpoints();
    breaks.extend(f1.breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let overlap = integrate_line(|x| f0.density(&[x]).min(f1.density(&[x])), &breaks, 1e-9)?;
    Ok(0.5 * overlap)
}

fn stream(seed: u64, r: usize, part: u64) -> RngStream {
    RngStream::new(seed, 3 * r as u64 + part)
}

/// Replication `r` draws `n` points from each law, then classifies
/// `n_test / 2` test points from `f0` and the rest from `f1` with the
/// pooled `k`-NN vote.
pub fn run_sda(
    f0: &dyn FeatureLaw,
    f1: &dyn FeatureLaw,
    n: usize,
    k: usize,
    n_test: usize,
    replications: usize,
    seed: u64,
) -> Result<SdaResult> {
    if f0.dim() != f1.dim() {
        return Err(Error::DimMismatch { expected: f0.dim(), found: f1.dim() });
    }
    if n == 0 || n_test < 2 || replications == 0 {
        return Err(Error::InvalidArgument("need n ≥ 1, n_test ≥ 2 and at least one replication".into()));
    }
    if k == 0 || k > 2 * n {
        return Err(Error::KTooLarge { k, n: 2 * n });
    }
    let bayes_risk = sda_bayes_risk(f0, f1)?;
    let risks: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, r, 0).rng();
            let pooled = sample_law(f0, n, 0, &mut rng).concat(&sample_law(f1, n, 1, &mut rng))?;
            let mut test_rng = stream(seed, r, 1).rng();
            let half = n_test / 2;
            let test = sample_law(f0, half, 0, &mut test_rng).concat(&sample_law(f1, n_test - half, 1, &mut test_rng))?;
            let index = NeighborIndex::build(&pooled, Backend::Tree)?;
            let mut errors = [0usize; 2];
            for (x, y) in test.points() {
                let neighbors = index.k_nearest(x, k)?;
                errors[y as usize] += usize::from(vote_prefix(neighbors.iter().map(|nb| nb.label), k) != y);
            }
            // Equal class weights regardless of an odd test size.
            Ok(0.5 * (errors[0] as f64 / half as f64 + errors[1] as f64 / (n_test - half) as f64))
        })
        .collect::<Result<_>>()?;
    let (mean_risk, std_error) = mean_and_se(&risks);
    Ok(SdaResult {
        n,
        k,
        mean_risk,
        std_error,
        bayes_risk,
        mean_excess: mean_risk - bayes_risk,
        replications,
        risks,
    })
}

/// Average of the labels of the `k ∧ len` points nearest to `x`
/// (`½` when there are no points).
fn nearest_label_mean(points: &[(Vec<f64>, u8)], x: &[f64], k: usize) -> f64 {
    let m = k.min(points.len());
    if m == 0 {
        return 0.5;
    }
    let mut d: Vec<(f64, usize)> = points.iter().enumerate().map(|(i, (p, _))| (euclidean(p, x), i)).collect();
    d.select_nth_unstable_by(m - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d[..m].iter().map(|&(_, i)| points[i].1 as f64).sum::<f64>() / m as f64
}

/// The pair of `η̂` samples compared by [`poissonization_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonizationResult {
    pub ks_distance: f64,
    pub two_sample: Vec<f64>,
    pub iid: Vec<f64>,
}

struct Pair<'a> {
    f0: &'a dyn FeatureLaw,
    f1: &'a dyn FeatureLaw,
}

impl Pair<'_> {
    fn eta(&self, x: &[f64]) -> f64 {
        let (a, b) = (self.f0.density(x), self.f1.density(x));
        if a + b > 0.0 {
            b / (a + b)
        } else {
            0.5
        }
    }
}

fn poisson(lambda: f64, rng: &mut StreamRng) -> usize {
    Poisson::new(lambda).expect("positive rate").sample(rng) as usize
}

/// Law of `η̂(x)` under (i) independent `Poisson(n)`-sized samples from `f0`
/// (label 0) and `f1` (label 1), and (ii) one `Poisson(2n)`-sized sample
/// from the mixture with labels `Bernoulli(f1 / (f0 + f1))`. Returns the
/// two-sample Kolmogorov–Smirnov distance between the empirical laws.
pub fn poissonization_check(
    f0: &dyn FeatureLaw,
    f1: &dyn FeatureLaw,
    x: &[f64],
    n: usize,
    k: usize,
    replications: usize,
    seed: u64,
) -> Result<PoissonizationResult> {
    if f0.dim() != f1.dim() || x.len() != f0.dim() {
        return Err(Error::DimMismatch { expected: f0.dim(), found: x.len() });
    }
    if n == 0 || k == 0 || replications == 0 {
        return Err(Error::InvalidArgument("n, k and replications must be positive".into()));
    }
    let pair = Pair { f0, f1 };
    let lambda = n as f64;
    let two_sample: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(mix_seed(seed, 1), r as u64).rng();
            let (n0, n1) = (poisson(lambda, &mut rng), poisson(lambda, &mut rng));
            let mut pts: Vec<(Vec<f64>, u8)> = (0..n0).map(|_| (f0.draw(&mut rng), 0)).collect();
            pts.extend((0..n1).map(|_| (f1.draw(&mut rng), 1)));
            // Random order: only matters for exact distance ties.
            for i in (1..pts.len()).rev() {
                pts.swap(i, rng.random_range(0..=i));
            }
            nearest_label_mean(&pts, x, k)
        })
        .collect();
    let iid: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(mix_seed(seed, 2), r as u64).rng();
            let total = poisson(2.0 * lambda, &mut rng);
            let pts: Vec<(Vec<f64>, u8)> = (0..total)
                .map(|_| {
                    let u = if rng.random_bool(0.5) { f1.draw(&mut rng) } else { f0.draw(&mut rng) };
                    let v = u8::from(rng.random_bool(pair.eta(&u)));
                    (u, v)
                })
                .collect();
            nearest_label_mean(&pts, x, k)
        })
        .collect();
    Ok(PoissonizationResult {
        ks_distance: ks_distance(&two_sample, &iid),
        two_sample,
        iid,
    })
}

/// `sup_t |F_a(t) − F_b(t)|` between two empirical distributions (ties
/// handled by stepping over equal values together).
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Empirical `P(|V − mean(V)| > t)` for each threshold.
pub fn deviation_probabilities(values: &[f64], thresholds: &[f64]) -> Vec<McEstimate> {
    let (mean, _) = mean_and_se(values);
    let n = values.len();
    thresholds
        .iter()
        .map(|&t| {
            let hits = values.iter().filter(|v| (*v - mean).abs() > t).count();
            McEstimate::from_count(hits, n)
        })
        .collect()
}

/// `η̂(x)` with `k` neighbors over `replications` fresh samples of size `n`
/// from a classification model.
pub fn eta_hat_samples(
    model: &dyn ClassModel,
    x: &[f64],
    n: usize,
    k: usize,
    replications: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let data: Dataset = model.sample(n, &RngStream::new(seed, r as u64));
            let index = NeighborIndex::build(&data, Backend::Tree)?;
            let nb = index.k_nearest(x, k)?;
            Ok(nb.iter().map(|v| v.label as f64).sum::<f64>() / k as f64)
        })
        .collect()
}

/// `η̂(x)` with `k` neighbors over fixed-size two-sample draws
/// (`n` from each law).
pub fn sda_eta_hat_samples(
    f0: &dyn FeatureLaw,
    f1: &dyn FeatureLaw,
    x: &[f64],
    n: usize,
    k: usize,
    replications: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if k == 0 || k > 2 * n {
        return Err(Error::KTooLarge { k, n: 2 * n });
    }
    (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(seed, r as u64).rng();
            let pooled = sample_law(f0, n, 0, &mut rng).concat(&sample_law(f1, n, 1, &mut rng))?;
            let index = NeighborIndex::build(&pooled, Backend::Tree)?;
            let nb = index.k_nearest(x, k)?;
            Ok(nb.iter().map(|v| v.label as f64).sum::<f64>() / k as f64)
        })
        .collect()
}
