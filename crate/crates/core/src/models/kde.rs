//! Gaussian kernel density estimate with a rule-of-thumb bandwidth.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    /// `h = σ̂ (4 / ((d + 2) n))^(1/(d+4))`, with `σ̂` the average over
    /// coordinates of `min(sd, IQR / 1.349)`.
    Silverman,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KdeModel {
    dim: usize,
    points: Vec<f64>,
    bandwidth: f64,
    norm: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    // Linear interpolation between order statistics.
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Robust per-coordinate scale: `min(sd, IQR/1.349)`, falling back to `sd`
/// when the interquartile range is zero.
fn robust_scale(values: &mut [f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    values.sort_by(f64::total_cmp);
    let iqr = quantile(values, 0.75) - quantile(values, 0.25);
    if iqr > 0.0 {
        sd.min(iqr / 1.349)
    } else {
        sd
    }
}

impl KdeModel {
    pub fn fit(features: &[f64], dim: usize, bandwidth: Bandwidth) -> Result<Self> {
        if dim == 0 || features.is_empty() || features.len() % dim != 0 {
            return Err(Error::EmptyDataset);
        }
        let n = features.len() / dim;
        let h = match bandwidth {
            Bandwidth::Fixed(h) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}")));
                }
                h
            }
            Bandwidth::Silverman => {
                let mut scale = 0.0;
                for j in 0..dim {
                    let mut column: Vec<f64> = features.iter().skip(j).step_by(dim).copied().collect();
                    scale += robust_scale(&mut column);
                }
                scale /= dim as f64;
                if !(scale > 0.0) {
                    return Err(Error::DegenerateSample);
                }
                let d = dim as f64;
                scale * (4.0 / ((d + 2.0) * n as f64)).powf(1.0 / (d + 4.0))
            }
        };
        let norm = 1.0 / (n as f64 * h.powi(dim as i32) * (2.0 * PI).powf(dim as f64 / 2.0));
        Ok(Self {
            dim,
            points: features.to_vec(),
            bandwidth: h,
            norm,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let inv = 1.0 / (2.0 * self.bandwidth * self.bandwidth);
        let sum: f64 = self
            .points
            .chunks_exact(self.dim)
            .map(|p| {
                let d2: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 * inv).exp()
            })
            .sum();
        sum * self.norm
    }
}

pub fn kde_fit(features: &[Vec<f64>], bandwidth: Bandwidth) -> Result<KdeModel> {
    let dim = features.first().ok_or(Error::EmptyDataset)?.len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::DimMismatch {
            expected: dim,
            found: features.iter().map(Vec::len).find(|l| *l != dim).unwrap_or(0),
        });
    }
    let flat: Vec<f64> = features.iter().flatten().copied().collect();
    KdeModel::fit(&flat, dim, bandwidth)
}

pub fn kde_eval(model: &KdeModel, x: &[f64]) -> f64 {
    model.eval(x)
}
