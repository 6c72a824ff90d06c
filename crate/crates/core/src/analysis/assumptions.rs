//! Sampled checks of the margin, minimal-mass and tail conditions.
//!
//! These are evidence, not proofs: each condition quantifies over every
//! point or every small radius, and the checkers only scan probes and grids.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::models::{ClassModel, FeatureLaw};
use crate::quadrature::integrate;
use crate::rng::RngStream;

/// Monte Carlo proportion with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub mc_se: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Binomial proportion `hits / samples` with its standard error.
    pub fn from_count(hits: usize, samples: usize) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            estimate: p,
            mc_se: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }
}

/// Sorted densities `μ(X_i)` of one Monte Carlo sample; every threshold is
/// evaluated on the same draws, so the tail curve is monotone in `ε`.
#[derive(Clone, Debug)]
pub struct TailSample {
    densities: Vec<f64>,
}

impl TailSample {
    pub fn draw(law: &dyn FeatureLaw, n_mc: usize, stream: &RngStream) -> Result<Self> {
        if n_mc == 0 {
            return Err(Error::InvalidArgument("n_mc must be positive".into()));
        }
        let mut rng = stream.rng();
        let mut densities: Vec<f64> = (0..n_mc).map(|_| law.density(&law.draw(&mut rng))).collect();
        densities.sort_by(f64::total_cmp);
        Ok(Self { densities })
    }

    /// Fraction of draws with `μ(X) < eps`.
    pub fn fraction_below(&self, eps: f64) -> McEstimate {
        let hits = self.densities.partition_point(|&m| m < eps);
        McEstimate::from_count(hits, self.densities.len())
    }
}

pub fn empirical_tail(law: &dyn FeatureLaw, epsilon: f64, n_mc: usize, stream: &RngStream) -> Result<McEstimate> {
    if epsilon < 0.0 {
        return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
    }
    Ok(TailSample::draw(law, n_mc, stream)?.fraction_below(epsilon))
}

/// Sorted margins `|η(X_i) − 1/2|` of one sample.
#[derive(Clone, Debug)]
pub struct MarginSample {
    gaps: Vec<f64>,
}

impl MarginSample {
    pub fn draw(model: &dyn ClassModel, n_mc: usize, stream: &RngStream) -> Result<Self> {
        if n_mc == 0 {
            return Err(Error::InvalidArgument("n_mc must be positive".into()));
        }
        let mut rng = stream.rng();
        let mut gaps: Vec<f64> = (0..n_mc)
            .map(|_| (model.eta(&model.draw(&mut rng)) - 0.5).abs())
            .collect();
        gaps.sort_by(f64::total_cmp);
        Ok(Self { gaps })
    }

    /// Fraction of draws with `0 < |η(X) − 1/2| < t`.
    pub fn fraction_within(&self, t: f64) -> McEstimate {
        let zeros = self.gaps.partition_point(|&g| g <= 0.0);
        let below = self.gaps.partition_point(|&g| g < t);
        McEstimate::from_count(below.saturating_sub(zeros), self.gaps.len())
    }
}

pub fn empirical_margin(model: &dyn ClassModel, t: f64, n_mc: usize, stream: &RngStream) -> Result<McEstimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    Ok(MarginSample::draw(model, n_mc, stream)?.fraction_within(t))
}

/// Smallest ratio `P_X(B(x, δ)) / (μ(x) δ^d)` over the probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassRatio {
    pub ratio: f64,
    /// Zero for quadrature; Monte Carlo standard error otherwise.
    pub mc_se: f64,
    pub argmin: Vec<f64>,
}

fn check_probe(law: &dyn FeatureLaw, x: &[f64]) -> Result<f64> {
    let mu = law.density(x);
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "probe {x:?} must have finite positive density, got {mu}"
        )));
    }
    Ok(mu)
}

/// One-dimensional version: ball masses by adaptive quadrature.
pub fn minimal_mass_ratio(law: &dyn FeatureLaw, delta: f64, probes: &[Vec<f64>]) -> Result<MassRatio> {
    if law.dim() != 1 {
        return Err(Error::InvalidArgument(
            "quadrature mass ratio is one-dimensional; use minimal_mass_ratio_mc".into(),
        ));
    }
    if !(delta > 0.0) || probes.is_empty() {
        return Err(Error::InvalidArgument("need delta > 0 and at least one probe".into()));
    }
    let breaks = law.breakpoints();
    let mut best = MassRatio {
        ratio: f64::INFINITY,
        mc_se: 0.0,
        argmin: Vec::new(),
    };
    for probe in probes {
        let mu = check_probe(law, probe)?;
        let x = probe[0];
        let mass = integrate(|t| law.density(&[t]), x - delta, x + delta, &breaks, 1e-9)?;
        let ratio = mass / (mu * delta);
        if ratio < best.ratio {
            best = MassRatio {
                ratio,
                mc_se: 0.0,
                argmin: probe.clone(),
            };
        }
    }
    Ok(best)
}

/// Any dimension: ball masses by Monte Carlo on one shared sample.
pub fn minimal_mass_ratio_mc(
    law: &dyn FeatureLaw,
    delta: f64,
    probes: &[Vec<f64>],
    n_mc: usize,
    stream: &RngStream,
) -> Result<MassRatio> {
    if !(delta > 0.0) || probes.is_empty() || n_mc == 0 {
        return Err(Error::InvalidArgument("need delta > 0, probes and n_mc > 0".into()));
    }
    let mut rng = stream.rng();
    let sample: Vec<Vec<f64>> = (0..n_mc).map(|_| law.draw(&mut rng)).collect();
    let d = law.dim() as i32;
    let mut best = MassRatio {
        ratio: f64::INFINITY,
        mc_se: 0.0,
        argmin: Vec::new(),
    };
    for probe in probes {
        let mu = check_probe(law, probe)?;
        let hits = sample
            .iter()
            .filter(|s| crate::neighbors::euclidean(s, probe) <= delta)
            .count();
        let est = McEstimate::from_count(hits, n_mc);
        let scale = mu * delta.powi(d);
        if est.estimate / scale < best.ratio {
            best = MassRatio {
                ratio: est.estimate / scale,
                mc_se: est.mc_se / scale,
                argmin: probe.clone(),
            };
        }
    }
    Ok(best)
}

/// Probes for a one-dimensional law: the 1%..99% sample quantiles plus the
/// five lowest-density points of a 10⁴-point sample.
pub fn default_probes(law: &dyn FeatureLaw, stream: &RngStream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    let mut draws: Vec<(f64, Vec<f64>)> = (0..10_000)
        .map(|_| {
            let x = law.draw(&mut rng);
            (law.density(&x), x)
        })
        .filter(|(mu, _)| *mu > 0.0 && mu.is_finite())
        .collect();
    if draws.is_empty() {
        return Vec::new();
    }
    let mut probes = Vec::new();
    if law.dim() == 1 {
        let mut xs: Vec<f64> = draws.iter().map(|(_, x)| x[0]).collect();
        xs.sort_by(f64::total_cmp);
        for pct in 1..=99 {
            probes.push(vec![xs[(pct * (xs.len() - 1)) / 100]]);
        }
    } else {
        for _ in 0..99 {
            let i = rng.random_range(0..draws.len());
            probes.push(draws[i].1.clone());
        }
    }
    draws.sort_by(|a, b| a.0.total_cmp(&b.0));
    probes.extend(draws.into_iter().take(5).map(|(_, x)| x));
    probes
}

/// `max ‖∇φ(x)‖ / φ(x)^a` over the probes, with `φ = −ln μ`. Small values
/// in low-density regions indicate the tail condition can be met.
pub fn gradient_criterion<G, L>(grad_log_density: G, log_density: L, a_exponent: f64, probes: &[Vec<f64>]) -> f64
where
    G: Fn(&[f64]) -> Vec<f64>,
    L: Fn(&[f64]) -> f64,
{
    probes
        .iter()
        .map(|x| {
            let phi = -log_density(x);
            if !(phi > 0.0) {
                return f64::INFINITY;
            }
            let grad_norm = grad_log_density(x).iter().map(|g| g * g).sum::<f64>().sqrt();
            grad_norm / phi.powf(a_exponent)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No threshold was supplied; the estimate is reported as-is.
    Info,
}

/// JSON report `{assumption, parameters, estimate, mc_se, verdict}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub assumption: String,
    pub parameters: Value,
    pub estimate: f64,
    pub mc_se: Option<f64>,
    pub verdict: Verdict,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{AssouadNetwork, DensityVariant, LocationModel, UniformBox};
    use crate::rng::derive_stream;
    use approx::assert_relative_eq;

    struct HalfEverywhere;
    impl FeatureLaw for HalfEverywhere {
        fn dim(&self) -> usize {
            1
        }
        fn density(&self, x: &[f64]) -> f64 {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        }
        fn draw(&self, rng: &mut crate::rng::StreamRng) -> Vec<f64> {
            vec![rng.random::<f64>()]
        }
    }
    impl ClassModel for HalfEverywhere {
        fn eta(&self, _: &[f64]) -> f64 {
            0.5
        }
        fn draw_labeled(&self, rng: &mut crate::rng::StreamRng) -> (Vec<f64>, u8) {
            (self.draw(rng), u8::from(rng.random_bool(0.5)))
        }
        fn bayes_risk(&self) -> Result<f64> {
            Ok(0.5)
        }
    }

    #[test]
    fn tail_extremes() {
        let m = LocationModel::laplace(1.0, 1.0).unwrap();
        let s = derive_stream(1, 0);
        assert_eq!(empirical_tail(&m, 10.0, 1000, &s).unwrap().estimate, 1.0);
        assert_eq!(empirical_tail(&m, 0.0, 1000, &s).unwrap().estimate, 0.0);
    }

    #[test]
    fn laplace_tail_is_two_epsilon() {
        let m = LocationModel::laplace(1.0, 1.0).unwrap();
        let est = empirical_tail(&m, 0.01, 1_000_000, &derive_stream(2, 0)).unwrap();
        assert!((est.estimate / 0.02 - 1.0).abs() < 0.1, "{}", est.estimate);
    }

    #[test]
    fn tail_curve_monotone() {
        let m = LocationModel::cauchy(1.0, 0.5).unwrap();
        let sample = TailSample::draw(&m, 20_000, &derive_stream(3, 0)).unwrap();
        let mut prev = 0.0;
        for i in 0..200 {
            let v = sample.fraction_below(1e-4 * 1.05f64.powi(i)).estimate;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn margin_full_range_and_null_model() {
        let m = LocationModel::gauss(2.0, 1.0).unwrap();
        let s = derive_stream(4, 0);
        let full = empirical_margin(&m, 0.6, 10_000, &s).unwrap();
        assert!(full.estimate > 0.999);
        assert_eq!(empirical_margin(&HalfEverywhere, 0.4, 10_000, &s).unwrap().estimate, 0.0);
    }

    #[test]
    fn gauss_margin_is_linear_in_t() {
        let m = LocationModel::gauss(2.0, 1.0).unwrap();
        let sample = MarginSample::draw(&m, 1_000_000, &derive_stream(5, 0)).unwrap();
        let ratios: Vec<f64> = [0.05, 0.1, 0.2].iter().map(|&t| sample.fraction_within(t).estimate / t).collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 2.0, "{ratios:?}");
    }

    #[test]
    fn uniform_interior_ratio_is_two() {
        let u = UniformBox::interval(0.0, 1.0).unwrap();
        let r = minimal_mass_ratio(&u, 0.01, &[vec![0.5], vec![0.3]]).unwrap();
        assert_relative_eq!(r.ratio, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_ratio_stays_near_two() {
        let g = LocationModel::gauss(1.0, 1.0).unwrap();
        let probes: Vec<Vec<f64>> = (0..=100).map(|i| vec![-5.0 + 0.1 * i as f64]).collect();
        let r = minimal_mass_ratio(&g, 0.01, &probes).unwrap();
        assert!(r.ratio >= 1.9, "{}", r.ratio);
    }

    #[test]
    fn tent_network_ratio_at_center() {
        // P(B) = ω and μ(x_j) δ = ω q^γ δ, so the ratio is q^(a − γ) for δ = q^(−a).
        let q = 32u32;
        let net = AssouadNetwork::uniform_signs(q, 2, 0.1, DensityVariant::TentDensity { gamma: 2.0 }).unwrap();
        let delta = (q as f64).powf(-1.5);
        let r = minimal_mass_ratio(&net, delta, &[vec![net.center(0)]]).unwrap();
        assert_relative_eq!(r.ratio, (q as f64).powf(-0.5), max_relative = 1e-6);
        let r = minimal_mass_ratio(&net, 0.01, &[vec![net.center(0)]]).unwrap();
        assert!(r.ratio < 0.1, "{}", r.ratio);
    }

    #[test]
    fn mc_mass_ratio_agrees_with_quadrature() {
        let g = LocationModel::gauss(1.0, 1.0).unwrap();
        let probes = vec![vec![0.0], vec![1.5]];
        let quad = minimal_mass_ratio(&g, 0.1, &probes).unwrap();
        let mc = minimal_mass_ratio_mc(&g, 0.1, &probes, 200_000, &derive_stream(6, 0)).unwrap();
        assert!((quad.ratio - mc.ratio).abs() < 4.0 * mc.mc_se + 1e-12);
    }

    #[test]
    fn probes_have_positive_density() {
        let m = LocationModel::cauchy(0.5, 0.5).unwrap();
        let probes = default_probes(&m, &derive_stream(7, 0));
        assert_eq!(probes.len(), 104);
        assert!(probes.iter().all(|p| m.density(p) > 0.0));
        assert!(minimal_mass_ratio(&m, 0.05, &probes).unwrap().ratio > 1.5);
    }

    #[test]
    fn gradient_criterion_examples() {
        let c = 0.5 * (2.0 * std::f64::consts::PI).ln();
        let gauss = gradient_criterion(|x| vec![-x[0]], |x| -0.5 * x[0] * x[0] - c, 1.0, &[vec![10.0]]);
        assert_relative_eq!(gauss, 10.0 / (50.0 + c), epsilon = 1e-12);
        assert!((gauss - 0.2).abs() < 0.01);
        let laplace = gradient_criterion(
            |x| vec![-x[0].signum()],
            |x| -x[0].abs() - 2f64.ln(),
            1.0,
            &[vec![20.0], vec![-20.0]],
        );
        assert!(laplace < 0.1);
        let failing = gradient_criterion(|x| vec![-x[0].exp()], |x| -x[0].exp(), 1.0, &[vec![1.0], vec![3.0]]);
        assert!(failing >= 0.99);
    }
}
