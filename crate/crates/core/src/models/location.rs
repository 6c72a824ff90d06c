//! One-dimensional location models `X = εZ + (2Y − 1)·b`.
//!
//! `Y ~ Bernoulli(1/2)`, `ε` is a Rademacher sign and `Z ≥ 0` follows one of
//! the families below, so the two class-conditional laws are mirror images
//! centered at `±b`.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::{ClassModel, FeatureLaw};
use crate::error::{Error, Result};
use crate::quadrature::integrate_line;
use crate::rng::StreamRng;

/// Law of the nonnegative displacement `Z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZFamily {
    /// `|N(0, σ²)|`, so that `εZ ~ N(0, σ²)`.
    GaussFolded { sigma: f64 },
    /// Exponential with rate `λ`, so that `εZ` is Laplace.
    Laplace { lambda: f64 },
    Gamma { shape: f64, scale: f64 },
    /// `|Cauchy(0, γ)|`.
    CauchyFolded { gamma: f64 },
    Pareto { x0: f64, p: f64 },
    /// `F_g(t) = 1 − (t + 1)^(−g)`.
    PowerLaw { g: f64 },
    /// `Z ≡ 0`: the `λ → ∞` limit of the Laplace family. Classes are
    /// perfectly separated; only useful as a test fixture.
    Degenerate,
}

impl ZFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ZFamily::GaussFolded { .. } => "gauss",
            ZFamily::Laplace { .. } => "laplace",
            ZFamily::Gamma { .. } => "gamma",
            ZFamily::CauchyFolded { .. } => "cauchy",
            ZFamily::Pareto { .. } => "pareto",
            ZFamily::PowerLaw { .. } => "powerlaw",
            ZFamily::Degenerate => "degenerate",
        }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ZFamily::GaussFolded { sigma } => vec![("sigma", sigma)],
            ZFamily::Laplace { lambda } => vec![("lambda", lambda)],
            ZFamily::Gamma { shape, scale } => vec![("shape", shape), ("scale", scale)],
            ZFamily::CauchyFolded { gamma } => vec![("gamma", gamma)],
            ZFamily::Pareto { x0, p } => vec![("x0", x0), ("p", p)],
            ZFamily::PowerLaw { g } => vec![("g", g)],
            ZFamily::Degenerate => vec![],
        }
    }

    fn param_names(name: &str) -> Option<&'static [&'static str]> {
        Some(match name {
            "gauss" => &["sigma"],
            "laplace" => &["lambda"],
            "gamma" => &["shape", "scale"],
            "cauchy" => &["gamma"],
            "pareto" => &["x0", "p"],
            "powerlaw" => &["g"],
            "degenerate" => &[],
            _ => return None,
        })
    }

    fn from_parts(name: &str, p: &[f64]) -> Result<Self> {
        Ok(match name {
            "gauss" => ZFamily::GaussFolded { sigma: p[0] },
            "laplace" => ZFamily::Laplace { lambda: p[0] },
            "gamma" => ZFamily::Gamma { shape: p[0], scale: p[1] },
            "cauchy" => ZFamily::CauchyFolded { gamma: p[0] },
            "pareto" => ZFamily::Pareto { x0: p[0], p: p[1] },
            "powerlaw" => ZFamily::PowerLaw { g: p[0] },
            "degenerate" => ZFamily::Degenerate,
            other => return Err(Error::InvalidModel(format!("unknown family `{other}`"))),
        })
    }

    /// Default parameters for a bare family name.
    fn default_params(name: &str) -> Option<Vec<f64>> {
        Some(match name {
            "gauss" | "laplace" | "cauchy" | "powerlaw" => vec![1.0],
            "gamma" => vec![2.0, 1.0],
            "pareto" => vec![1.0, 2.0],
            "degenerate" => vec![],
            _ => return None,
        })
    }

    /// Whether the density of `Z` is non-increasing on `[0, ∞)`. For those
    /// families the Bayes rule is the sign of `x`.
    pub fn is_monotone(&self) -> bool {
        match *self {
            ZFamily::Gamma { shape, .. } => shape <= 1.0,
            ZFamily::Pareto { .. } => false,
            _ => true,
        }
    }

    /// `ln ζ(t)` for `t ≥ 0`.
    pub fn ln_pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            ZFamily::GaussFolded { sigma } => {
                LN_2 - sigma.ln() - 0.5 * (2.0 * PI).ln() - t * t / (2.0 * sigma * sigma)
            }
            ZFamily::Laplace { lambda } => lambda.ln() - lambda * t,
            ZFamily::Gamma { shape, scale } => {
                if t == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => -scale.ln(),
                        _ => f64::NEG_INFINITY,
                    };
                }
                (shape - 1.0) * t.ln() - t / scale - ln_gamma(shape) - shape * scale.ln()
            }
            ZFamily::CauchyFolded { gamma } => {
                (2.0 / (PI * gamma)).ln() - (1.0 + (t / gamma).powi(2)).ln()
            }
            ZFamily::Pareto { x0, p } => {
                if t < x0 {
                    f64::NEG_INFINITY
                } else {
                    p.ln() + p * x0.ln() - (p + 1.0) * t.ln()
                }
            }
            ZFamily::PowerLaw { g } => g.ln() - (g + 1.0) * t.ln_1p(),
            ZFamily::Degenerate => {
                if t == 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.ln_pdf(t).exp()
    }

    /// `P(Z > t)`.
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        match *self {
            ZFamily::GaussFolded { sigma } => erfc(t / (sigma * std::f64::consts::SQRT_2)),
            ZFamily::Laplace { lambda } => (-lambda * t).exp(),
            ZFamily::Gamma { shape, scale } => gamma_ur(shape, t / scale),
            ZFamily::CauchyFolded { gamma } => 2.0 / PI * (gamma / t).atan(),
            ZFamily::Pareto { x0, p } => {
                if t < x0 {
                    1.0
                } else {
                    (x0 / t).powf(p)
                }
            }
            ZFamily::PowerLaw { g } => (1.0 + t).powf(-g),
            ZFamily::Degenerate => 0.0,
        }
    }

    pub fn draw(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            ZFamily::GaussFolded { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z.abs()
            }
            ZFamily::Laplace { lambda } => Exp::new(lambda).expect("validated").sample(rng),
            ZFamily::Gamma { shape, scale } => {
                Gamma::new(shape, scale).expect("validated").sample(rng)
            }
            ZFamily::CauchyFolded { gamma } => {
                let u: f64 = rng.random();
                gamma * (PI * (u - 0.5)).tan().abs()
            }
            ZFamily::Pareto { x0, p } => {
                let u = 1.0 - rng.random::<f64>();
                x0 * u.powf(-1.0 / p)
            }
            ZFamily::PowerLaw { g } => {
                let u = 1.0 - rng.random::<f64>();
                u.powf(-1.0 / g) - 1.0
            }
            ZFamily::Degenerate => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.params().iter().all(|(_, v)| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!(
                "{} parameters must be finite and positive: {:?}",
                self.name(),
                self.params()
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocationModel {
    pub family: ZFamily,
    /// Class-1 center; class 0 sits at `−b`.
    pub b: f64,
}

impl LocationModel {
    pub fn new(family: ZFamily, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidModel(format!("location b must be positive, got {b}")));
        }
        family.validate()?;
        Ok(Self { family, b })
    }

    pub fn gauss(sigma: f64, b: f64) -> Result<Self> {
        Self::new(ZFamily::GaussFolded { sigma }, b)
    }

    pub fn laplace(lambda: f64, b: f64) -> Result<Self> {
        Self::new(ZFamily::Laplace { lambda }, b)
    }

    pub fn cauchy(gamma: f64, b: f64) -> Result<Self> {
        Self::new(ZFamily::CauchyFolded { gamma }, b)
    }

    pub fn power_law(g: f64, b: f64) -> Result<Self> {
        Self::new(ZFamily::PowerLaw { g }, b)
    }

    fn center(&self, label: u8) -> f64 {
        if label == 1 {
            self.b
        } else {
            -self.b
        }
    }

    /// `ln f_y(x)` where `f_y(x) = ζ(|x − c_y|) / 2` is the class-`y` density.
    fn ln_class_density(&self, label: u8, x: f64) -> f64 {
        self.family.ln_pdf((x - self.center(label)).abs()) - LN_2
    }

    pub fn density_at(&self, x: f64) -> f64 {
        if let ZFamily::Degenerate = self.family {
            return if x.abs() == self.b { f64::INFINITY } else { 0.0 };
        }
        0.25 * (self.family.pdf((x - self.b).abs()) + self.family.pdf((x + self.b).abs()))
    }

    pub fn eta_at(&self, x: f64) -> f64 {
        if let ZFamily::Degenerate = self.family {
            return if x > 0.0 {
                1.0
            } else if x < 0.0 {
                0.0
            } else {
                0.5
            };
        }
        let l1 = self.ln_class_density(1, x);
        let l0 = self.ln_class_density(0, x);
        match (l0.is_finite(), l1.is_finite()) {
            (true, true) => 1.0 / (1.0 + (l0 - l1).exp()),
            _ => {
                if l0 == l1 {
                    // Both vanish (or both blow up).
                    0.5
                } else if l1 > l0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn bayes_label(&self, x: f64) -> u8 {
        if self.family.is_monotone() {
            u8::from(x > 0.0)
        } else {
            u8::from(self.eta_at(x) > 0.5)
        }
    }

    /// `R* = P(Z > b) / 2` when the Bayes rule is the sign of `x`; otherwise
    /// `R* = ¼ ∫ min(ζ(|x − b|), ζ(|x + b|)) dx` by quadrature.
    pub fn bayes_risk_value(&self) -> Result<f64> {
        if self.family.is_monotone() {
            return Ok(0.5 * self.family.survival(self.b));
        }
        self.bayes_risk_by_quadrature(1e-8)
    }

    /// Quadrature route for any family; used directly for non-monotone
    /// families and as a cross-check for the closed forms.
    pub fn bayes_risk_by_quadrature(&self, rel_tol: f64) -> Result<f64> {
        let b = self.b;
        let mut breaks = vec![-b, 0.0, b];
        if let ZFamily::Pareto { x0, .. } = self.family {
            breaks.extend([-b - x0, -b + x0, b - x0, b + x0]);
        }
        let value = integrate_line(
            |x| {
                let f1 = self.family.pdf((x - b).abs());
                let f0 = self.family.pdf((x + b).abs());
                0.25 * f1.min(f0)
            },
            &breaks,
            rel_tol,
        )?;
        Ok(value)
    }

    /// Class-conditional law of `X` given `Y = label`.
    pub fn class_law(&self, label: u8) -> ClassConditional {
        ClassConditional {
            model: *self,
            label,
        }
    }

    /// JSON descriptor `{"family": ..., "params": {...}, "b": ...}`.
    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self
            .family
            .params()
            .into_iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        json!({"family": self.family.name(), "params": params, "b": self.b})
    }

    /// Parses a descriptor. Parameters may sit under `"params"` or at the
    /// top level; unknown keys are rejected. Missing parameters take family
    /// defaults, missing `b` defaults to 1.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidModel("model descriptor must be a JSON object".into()))?;
        let name = obj
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidModel("missing string field `family`".into()))?
            .to_ascii_lowercase();
        let names = ZFamily::param_names(&name)
            .ok_or_else(|| Error::InvalidModel(format!("unknown family `{name}`")))?;
        let mut params: Map<String, Value> = Map::new();
        for (key, v) in obj {
            match key.as_str() {
                "family" | "b" => {}
                "params" => {
                    let inner = v
                        .as_object()
                        .ok_or_else(|| Error::InvalidModel("`params` must be an object".into()))?;
                    params.extend(inner.clone());
                }
                other => {
                    params.insert(other.to_string(), v.clone());
                }
            }
        }
        for key in params.keys() {
            if !names.contains(&key.as_str()) {
                return Err(Error::InvalidModel(format!(
                    "unknown parameter `{key}` for family `{name}`"
                )));
            }
        }
        let defaults = ZFamily::default_params(&name).expect("known family");
        let values = names
            .iter()
            .zip(defaults)
            .map(|(key, default)| match params.get(*key) {
                None => Ok(default),
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| Error::InvalidModel(format!("parameter `{key}` must be a number"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        let b = match obj.get("b") {
            None => 1.0,
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::InvalidModel("`b` must be a number".into()))?,
        };
        Self::new(ZFamily::from_parts(&name, &values)?, b)
    }

    /// A bare family name with default parameters and `b = 1`.
    pub fn from_name(name: &str) -> Result<Self> {
        Self::from_json(&json!({ "family": name }))
    }
}

impl Serialize for LocationModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocationModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        LocationModel::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl FeatureLaw for LocationModel {
    fn dim(&self) -> usize {
        1
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.density_at(x[0])
    }

    fn draw(&self, rng: &mut StreamRng) -> Vec<f64> {
        self.draw_labeled(rng).0
    }

    fn breakpoints(&self) -> Vec<f64> {
        let b = self.b;
        match self.family {
            ZFamily::Pareto { x0, .. } => vec![-b - x0, -b, -b + x0, b - x0, b, b + x0],
            _ => vec![-b, 0.0, b],
        }
    }
}

impl ClassModel for LocationModel {
    fn eta(&self, x: &[f64]) -> f64 {
        self.eta_at(x[0])
    }

    fn draw_labeled(&self, rng: &mut StreamRng) -> (Vec<f64>, u8) {
        let y = u8::from(rng.random_bool(0.5));
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let z = self.family.draw(rng);
        (vec![sign * z + self.center(y)], y)
    }

    fn bayes_classify(&self, x: &[f64]) -> u8 {
        self.bayes_label(x[0])
    }

    fn bayes_risk(&self) -> Result<f64> {
        self.bayes_risk_value()
    }
}

/// `X | Y = label` under a location model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassConditional {
    model: LocationModel,
    label: u8,
}

impl FeatureLaw for ClassConditional {
    fn dim(&self) -> usize {
        1
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.model.ln_class_density(self.label, x[0]).exp()
    }

    fn draw(&self, rng: &mut StreamRng) -> Vec<f64> {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        vec![sign * self.model.family.draw(rng) + self.model.center(self.label)]
    }

    fn breakpoints(&self) -> Vec<f64> {
        let c = self.model.center(self.label);
        match self.model.family {
            ZFamily::Pareto { x0, .. } => vec![c - x0, c, c + x0],
            _ => vec![c],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use crate::rng::derive_stream;
    use approx::assert_relative_eq;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn all_families() -> Vec<LocationModel> {
        vec![
            LocationModel::gauss(2.0, 1.0).unwrap(),
            LocationModel::laplace(1.5, 0.7).unwrap(),
            LocationModel::new(ZFamily::Gamma { shape: 2.0, scale: 1.0 }, 0.5).unwrap(),
            LocationModel::new(ZFamily::Gamma { shape: 0.7, scale: 1.0 }, 0.5).unwrap(),
            LocationModel::cauchy(0.5, 0.5).unwrap(),
            LocationModel::new(ZFamily::Pareto { x0: 0.3, p: 2.0 }, 0.5).unwrap(),
            LocationModel::power_law(1.0, 0.5).unwrap(),
            LocationModel::power_law(2.0, 0.5).unwrap(),
        ]
    }

    #[test]
    fn power_law_density_hand_values() {
        let m = LocationModel::power_law(1.0, 0.5).unwrap();
        assert_relative_eq!(m.density_at(0.5), 0.3125, epsilon = 1e-15);
        assert_relative_eq!(m.eta_at(0.5), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn density_is_symmetric_and_eta_mirrors() {
        for m in all_families() {
            assert_eq!(m.eta_at(0.0), 0.5);
            for i in 0..200 {
                let x = -10.0 + 0.1 * i as f64 + 0.013;
                assert_relative_eq!(m.density_at(x), m.density_at(-x), max_relative = 1e-12);
                assert_relative_eq!(m.eta_at(x) + m.eta_at(-x), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gauss_density_integrates_to_one() {
        let m = LocationModel::gauss(2.0, 1.0).unwrap();
        let mass = integrate(|x| m.density_at(x), -50.0, 50.0, &[-1.0, 0.0, 1.0], 1e-10).unwrap();
        assert!((0.99..=1.0 + 1e-9).contains(&mass), "{mass}");
    }

    #[test]
    fn every_family_integrates_to_one() {
        for m in all_families() {
            let mass = integrate_line(|x| m.density_at(x), &m.breakpoints(), 1e-9).unwrap();
            assert_relative_eq!(mass, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn bayes_risk_closed_forms() {
        let g = LocationModel::gauss(2.0, 1.0).unwrap();
        let normal = Normal::new(0.0, 1.0).unwrap();
        assert_relative_eq!(g.bayes_risk_value().unwrap(), 1.0 - normal.cdf(0.5), epsilon = 1e-12);
        assert_relative_eq!(g.bayes_risk_value().unwrap(), 0.308_537_538_725_986_9, epsilon = 1e-10);
        let p1 = LocationModel::power_law(1.0, 0.5).unwrap();
        assert_relative_eq!(p1.bayes_risk_value().unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let p2 = LocationModel::power_law(2.0, 0.5).unwrap();
        assert_relative_eq!(p2.bayes_risk_value().unwrap(), 2.0 / 9.0, epsilon = 1e-15);
        let c = LocationModel::cauchy(0.5, 0.5).unwrap();
        assert_relative_eq!(c.bayes_risk_value().unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_matches_quadrature_for_monotone_families() {
        for m in all_families().into_iter().filter(|m| m.family.is_monotone()) {
            let closed = m.bayes_risk_value().unwrap();
            let quad = m.bayes_risk_by_quadrature(1e-10).unwrap();
            assert_relative_eq!(closed, quad, max_relative = 1e-7);
        }
    }

    #[test]
    fn non_monotone_bayes_rule_is_not_the_sign() {
        let m = LocationModel::new(ZFamily::Pareto { x0: 1.0, p: 2.0 }, 0.5).unwrap();
        // Class-y support is |x − c_y| ≥ 1. At 0.4 neither class has mass;
        // at 0.6 only class 0 does, so the Bayes label is 0 despite x > 0.
        assert_eq!(m.eta_at(0.4), 0.5);
        assert_eq!(m.eta_at(0.6), 0.0);
        assert_eq!(m.bayes_label(0.6), 0);
        assert_eq!(m.bayes_label(-0.6), 1);
        let r = m.bayes_risk_value().unwrap();
        assert!(r > 0.0 && r < 0.5);
    }

    #[test]
    fn eta_monotone_for_log_concave_families() {
        for m in [LocationModel::gauss(1.0, 1.0).unwrap(), LocationModel::laplace(1.0, 1.0).unwrap()] {
            let mut prev = m.eta_at(0.0);
            for i in 1..=1000 {
                let e = m.eta_at(i as f64 * 0.02);
                assert!(e >= prev - 1e-15);
                prev = e;
            }
        }
    }

    #[test]
    fn degenerate_family_separates_by_sign() {
        let m = LocationModel::new(ZFamily::Degenerate, 0.75).unwrap();
        let data = m.sample(500, &derive_stream(3, 0));
        for (x, y) in data.points() {
            assert_eq!(x[0].abs(), 0.75);
            assert_eq!(y, u8::from(x[0] > 0.0));
        }
        assert_eq!(m.bayes_risk_value().unwrap(), 0.0);
    }

    #[test]
    fn label_balance_within_binomial_band() {
        for m in all_families() {
            let data = m.sample(10_000, &derive_stream(5, 1));
            let ones = data.labels().iter().filter(|&&y| y == 1).count() as f64 / 1e4;
            assert!((0.47..=0.53).contains(&ones), "{ones}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = LocationModel::cauchy(1.0, 0.5).unwrap();
        assert_eq!(m.sample(100, &derive_stream(9, 4)), m.sample(100, &derive_stream(9, 4)));
    }

    #[test]
    fn survival_matches_sample_frequency() {
        for m in all_families() {
            let mut rng = derive_stream(17, 0).rng();
            let t = 0.8;
            let n = 200_000;
            let hits = (0..n).filter(|_| m.family.draw(&mut rng) > t).count() as f64 / n as f64;
            let p = m.family.survival(t);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits - p).abs() < 4.0 * se + 1e-12, "{} {hits} {p}", m.family.name());
        }
    }

    #[test]
    fn json_descriptor_forms() {
        let m = LocationModel::from_json(&json!({"family": "powerlaw", "g": 1, "b": 0.5})).unwrap();
        assert_eq!(m, LocationModel::power_law(1.0, 0.5).unwrap());
        let nested = LocationModel::from_json(&m.to_json()).unwrap();
        assert_eq!(nested, m);
        let text = serde_json::to_string(&LocationModel::gauss(2.0, 1.0).unwrap()).unwrap();
        let back: LocationModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, LocationModel::gauss(2.0, 1.0).unwrap());
        assert!(LocationModel::from_json(&json!({"family": "gauss", "mu": 1})).is_err());
        assert!(LocationModel::from_json(&json!({"family": "nope"})).is_err());
        assert!(LocationModel::from_json(&json!({"family": "gauss", "b": -1})).is_err());
        assert!(LocationModel::from_json(&json!({"family": "gauss", "sigma": 0})).is_err());
    }
}
