//! Synthetic data generators with analytic ground truth.

mod assouad;
mod kde;
mod location;

pub use assouad::{bump, bump_derivative, AssouadNetwork, DensityVariant, BUMP_DERIVATIVE_SUP};
pub use kde::{kde_eval, kde_fit, Bandwidth, KdeModel};
pub use location::{LocationModel, ZFamily};

use crate::data::Dataset;
use crate::error::Result;
use crate::rng::{RngStream, StreamRng};

/// A law on feature space with a density.
pub trait FeatureLaw: Send + Sync {
    fn dim(&self) -> usize;

    /// Density with respect to Lebesgue measure.
    fn density(&self, x: &[f64]) -> f64;

    fn draw(&self, rng: &mut StreamRng) -> Vec<f64>;

    /// Points where the density has kinks or jumps (d = 1), used to seed
    /// quadrature.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Joint law of `(X, Y)` with known regression function and Bayes rule.
pub trait ClassModel: FeatureLaw {
    /// `η(x) = P(Y = 1 | X = x)`.
    fn eta(&self, x: &[f64]) -> f64;

    fn draw_labeled(&self, rng: &mut StreamRng) -> (Vec<f64>, u8);

    fn bayes_classify(&self, x: &[f64]) -> u8 {
        u8::from(self.eta(x) > 0.5)
    }

    /// Misclassification risk of the Bayes rule.
    fn bayes_risk(&self) -> Result<f64>;

    fn sample_with(&self, n: usize, rng: &mut StreamRng) -> Dataset {
        let mut data = Dataset::with_capacity(self.dim(), n);
        for _ in 0..n {
            let (x, y) = self.draw_labeled(rng);
            data.push(&x, y);
        }
        data
    }

    fn sample(&self, n: usize, stream: &RngStream) -> Dataset {
        self.sample_with(n, &mut stream.rng())
    }
}

/// Draws `n` unlabeled points and attaches `label` to all of them.
pub fn sample_law(law: &dyn FeatureLaw, n: usize, label: u8, rng: &mut StreamRng) -> Dataset {
    let mut data = Dataset::with_capacity(law.dim(), n);
    for _ in 0..n {
        data.push(&law.draw(rng), label);
    }
    data
}

/// Uniform law on an axis-aligned box.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UniformBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl UniformBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(crate::error::Error::InvalidModel(
                "uniform box needs lo < hi in every coordinate".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }
}

impl FeatureLaw for UniformBox {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn density(&self, x: &[f64]) -> f64 {
        let inside = x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| v >= l && v <= h);
        if inside {
            1.0 / self.volume()
        } else {
            0.0
        }
    }

    fn draw(&self, rng: &mut StreamRng) -> Vec<f64> {
        use rand::Rng;
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| l + (h - l) * rng.random::<f64>())
            .collect()
    }

    fn breakpoints(&self) -> Vec<f64> {
        if self.lo.len() == 1 {
            vec![self.lo[0], self.hi[0]]
        } else {
            Vec::new()
        }
    }
}
