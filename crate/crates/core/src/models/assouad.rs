//! Lower-bound networks: `m` disjoint balls of radius `2/q` carrying bump
//! perturbations `±Φ_j` of the regression function around `1/2`.
//!
//! Only the one-dimensional layout is generated: centers at `x_j = 5j/q`,
//! `j = 1..=m`, and the uniform complement `A₁` is the interval
//! `[−(5m+5)/q, (5m+5)/q]` minus the balls.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ClassModel, FeatureLaw};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::rng::StreamRng;

/// Supremum of `|φ'|`, attained at `r = 5/4`.
pub const BUMP_DERIVATIVE_SUP: f64 = 4.0;

fn smooth_zero(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn smooth_zero_derivative(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp() / (t * t)
    }
}

/// Smooth non-increasing bump: 1 on `[0, 1]`, 0 on `[3/2, ∞)`.
pub fn bump(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 1.5 {
        return 0.0;
    }
    let t = 2.0 * (r - 1.0);
    let (a, b) = (smooth_zero(t), smooth_zero(1.0 - t));
    b / (a + b)
}

/// `dφ/dr`.
pub fn bump_derivative(r: f64) -> f64 {
    if r <= 1.0 || r >= 1.5 {
        return 0.0;
    }
    let t = 2.0 * (r - 1.0);
    let (a, b) = (smooth_zero(t), smooth_zero(1.0 - t));
    let (da, db) = (smooth_zero_derivative(t), -smooth_zero_derivative(1.0 - t));
    // d/dt [b / (a + b)] = (db·a − b·da) / (a + b)²
    2.0 * (db * a - b * da) / ((a + b) * (a + b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityVariant {
    /// Constant density `ωq/4` on each ball.
    ConstantDensity,
    /// Tent `ω q^γ (1 − |x − x_j| q^γ)₊` on each ball, `γ ≥ 1`.
    TentDensity { gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssouadNetwork {
    pub q: u32,
    pub m: u32,
    pub omega: f64,
    pub sigma: Vec<i8>,
    pub c_phi: f64,
    pub variant: DensityVariant,
}

impl AssouadNetwork {
    pub fn new(q: u32, m: u32, omega: f64, sigma: Vec<i8>, c_phi: f64, variant: DensityVariant) -> Result<Self> {
        let net = Self {
            q,
            m,
            omega,
            sigma,
            c_phi,
            variant,
        };
        net.validate()?;
        Ok(net)
    }

    /// All signs `+1`, `c_φ = 1`.
    pub fn uniform_signs(q: u32, m: u32, omega: f64, variant: DensityVariant) -> Result<Self> {
        Self::new(q, m, omega, vec![1; m as usize], 1.0, variant)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidNetwork(msg));
        if self.q < 2 {
            return fail(format!("q must be at least 2, got {}", self.q));
        }
        if self.m < 1 {
            return fail("m must be at least 1".into());
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return fail(format!("omega must be positive, got {}", self.omega));
        }
        if self.m as f64 * self.omega > 1.0 + 1e-12 {
            return fail(format!("m·ω = {} exceeds 1", self.m as f64 * self.omega));
        }
        if self.sigma.len() != self.m as usize || self.sigma.iter().any(|s| *s != 1 && *s != -1) {
            return fail("sigma must hold m entries in {-1, +1}".into());
        }
        if !(self.c_phi > 0.0 && self.c_phi <= self.q as f64) {
            return fail(format!("c_phi must lie in (0, q] to keep η in [0,1], got {}", self.c_phi));
        }
        if let DensityVariant::TentDensity { gamma } = self.variant {
            if !(gamma >= 1.0 && gamma.is_finite()) {
                return fail(format!("tent exponent must be >= 1, got {gamma}"));
            }
        }
        Ok(())
    }

    fn qf(&self) -> f64 {
        self.q as f64
    }

    pub fn ball_radius(&self) -> f64 {
        2.0 / self.qf()
    }

    pub fn center(&self, j: usize) -> f64 {
        5.0 * (j + 1) as f64 / self.qf()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.m as usize).map(|j| self.center(j)).collect()
    }

    /// Half-width of the support interval.
    pub fn extent(&self) -> f64 {
        (5.0 * self.m as f64 + 5.0) / self.qf()
    }

    /// Ball containing `x`, if any. Balls are closed.
    pub fn ball_of(&self, x: f64) -> Option<usize> {
        let j = (x * self.qf() / 5.0).round() as i64 - 1;
        if j < 0 || j >= self.m as i64 {
            return None;
        }
        let j = j as usize;
        ((x - self.center(j)).abs() <= self.ball_radius()).then_some(j)
    }

    fn complement_length(&self) -> f64 {
        2.0 * self.extent() - 2.0 * self.ball_radius() * self.m as f64
    }

    fn complement_density(&self) -> f64 {
        (1.0 - self.m as f64 * self.omega) / self.complement_length()
    }

    fn tent_radius(&self, gamma: f64) -> f64 {
        self.qf().powf(-gamma)
    }

    /// `η_σ(x)`.
    pub fn eta_at(&self, x: f64) -> f64 {
        match self.ball_of(x) {
            Some(j) => {
                let phi = self.c_phi / self.qf() * bump(self.qf() * (x - self.center(j)).abs());
                0.5 * (1.0 + self.sigma[j] as f64 * phi)
            }
            None => 0.5,
        }
    }

    pub fn density_at(&self, x: f64) -> f64 {
        if x.abs() > self.extent() {
            return 0.0;
        }
        match self.ball_of(x) {
            None => self.complement_density(),
            Some(j) => match self.variant {
                DensityVariant::ConstantDensity => self.omega / (2.0 * self.ball_radius()),
                DensityVariant::TentDensity { gamma } => {
                    let s = self.qf().powf(gamma);
                    self.omega * s * (1.0 - (x - self.center(j)).abs() * s).max(0.0)
                }
            },
        }
    }

    /// Lipschitz bound `c_φ(‖φ'‖∞ + ‖φ‖∞)` for `η_σ`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.c_phi * (BUMP_DERIVATIVE_SUP + 1.0)
    }

    fn draw_x(&self, rng: &mut StreamRng) -> f64 {
        let m = self.m as usize;
        let u: f64 = rng.random();
        if u < m as f64 * self.omega {
            let j = rng.random_range(0..m);
            let c = self.center(j);
            match self.variant {
                DensityVariant::ConstantDensity => {
                    c + self.ball_radius() * (2.0 * rng.random::<f64>() - 1.0)
                }
                DensityVariant::TentDensity { gamma } => {
                    c + self.tent_radius(gamma) * (rng.random::<f64>() - rng.random::<f64>())
                }
            }
        } else {
            let r = self.extent();
            loop {
                let x = -r + 2.0 * r * rng.random::<f64>();
                if self.ball_of(x).is_none() {
                    return x;
                }
            }
        }
    }

    /// Interior break points of the density and of `η_σ`.
    pub fn break_points(&self) -> Vec<f64> {
        let mut out = vec![-self.extent(), self.extent()];
        for c in self.centers() {
            let rad = self.ball_radius();
            out.extend([c - rad, c - 1.5 / self.qf(), c - 1.0 / self.qf(), c]);
            out.extend([c + 1.0 / self.qf(), c + 1.5 / self.qf(), c + rad]);
            if let DensityVariant::TentDensity { gamma } = self.variant {
                let t = self.tent_radius(gamma);
                out.extend([c - t, c + t]);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Total mass by quadrature; equals 1 for a valid network.
    pub fn total_mass(&self) -> Result<f64> {
        let r = self.extent();
        integrate(|x| self.density_at(x), -r, r, &self.break_points(), 1e-10)
    }
}

impl FeatureLaw for AssouadNetwork {
    fn dim(&self) -> usize {
        1
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.density_at(x[0])
    }

    fn draw(&self, rng: &mut StreamRng) -> Vec<f64> {
        vec![self.draw_x(rng)]
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.break_points()
    }
}

impl ClassModel for AssouadNetwork {
    fn eta(&self, x: &[f64]) -> f64 {
        self.eta_at(x[0])
    }

    fn draw_labeled(&self, rng: &mut StreamRng) -> (Vec<f64>, u8) {
        let x = self.draw_x(rng);
        let y = u8::from(rng.random::<f64>() < self.eta_at(x));
        (vec![x], y)
    }

    /// `E[min(η, 1 − η)]` by quadrature.
    fn bayes_risk(&self) -> Result<f64> {
        let r = self.extent();
        integrate(
            |x| {
                let e = self.eta_at(x);
                e.min(1.0 - e) * self.density_at(x)
            },
            -r,
            r,
            &self.break_points(),
            1e-10,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use approx::assert_relative_eq;

    #[test]
    fn bump_values() {
        assert_eq!(bump(0.5), 1.0);
        assert_eq!(bump(1.0), 1.0);
        assert_eq!(bump(2.0), 0.0);
        assert_eq!(bump(1.5), 0.0);
        let mid = bump(1.25);
        assert!(mid > 0.0 && mid < 1.0);
        assert_relative_eq!(mid, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bump_non_increasing_on_grid() {
        let mut prev = bump(0.0);
        for i in 1..=1000 {
            let v = bump(2.0 * i as f64 / 1000.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn bump_derivative_matches_finite_difference_and_sup() {
        let h = 1e-6;
        let mut sup: f64 = 0.0;
        for i in 1..2000 {
            let r = 1.0 + 0.5 * i as f64 / 2000.0;
            let fd = (bump(r + h) - bump(r - h)) / (2.0 * h);
            assert!((fd - bump_derivative(r)).abs() < 1e-5);
            sup = sup.max(bump_derivative(r).abs());
        }
        assert_relative_eq!(sup, BUMP_DERIVATIVE_SUP, epsilon = 1e-4);
    }

    fn net(variant: DensityVariant) -> AssouadNetwork {
        AssouadNetwork::new(16, 4, 0.05, vec![1, -1, 1, -1], 1.0, variant).unwrap()
    }

    #[test]
    fn eta_at_centers_and_off_balls() {
        let n = net(DensityVariant::ConstantDensity);
        assert_relative_eq!(n.eta_at(n.center(0)), 0.5 * (1.0 + 1.0 / 16.0));
        assert_relative_eq!(n.eta_at(n.center(1)), 0.5 * (1.0 - 1.0 / 16.0));
        assert_eq!(n.eta_at(0.0), 0.5);
        assert_eq!(n.eta_at(n.center(0) + 2.5 / 16.0), 0.5);
        assert_eq!(n.eta_at(-1.0), 0.5);
    }

    #[test]
    fn both_variants_have_unit_mass() {
        for v in [DensityVariant::ConstantDensity, DensityVariant::TentDensity { gamma: 2.0 }] {
            assert_relative_eq!(net(v).total_mass().unwrap(), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn invalid_networks() {
        let v = DensityVariant::ConstantDensity;
        assert!(AssouadNetwork::new(1, 1, 0.1, vec![1], 1.0, v).is_err());
        assert!(AssouadNetwork::new(8, 4, 0.3, vec![1; 4], 1.0, v).is_err());
        assert!(AssouadNetwork::new(8, 2, 0.1, vec![1], 1.0, v).is_err());
        assert!(AssouadNetwork::new(8, 1, 0.1, vec![0], 1.0, v).is_err());
        assert!(AssouadNetwork::new(8, 1, 0.1, vec![1], 1.0, DensityVariant::TentDensity { gamma: 0.5 }).is_err());
    }

    #[test]
    fn constant_density_ball_mass_by_monte_carlo() {
        let n = net(DensityVariant::ConstantDensity);
        let mut rng = derive_stream(23, 0).rng();
        let draws = 100_000;
        let c = n.center(2);
        let hits = (0..draws)
            .filter(|_| (n.draw_x(&mut rng) - c).abs() <= n.ball_radius())
            .count() as f64;
        let p = n.omega;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((hits / draws as f64 - p).abs() <= 3.0 * se);
    }

    #[test]
    fn labels_follow_eta() {
        let n = AssouadNetwork::uniform_signs(4, 2, 0.5, DensityVariant::ConstantDensity).unwrap();
        let data = n.sample(50_000, &derive_stream(2, 0));
        let in_ball: Vec<u8> = data
            .points()
            .filter(|(x, _)| (x[0] - n.center(0)).abs() <= 1.0 / 4.0)
            .map(|(_, y)| y)
            .collect();
        let rate = in_ball.iter().map(|&y| y as f64).sum::<f64>() / in_ball.len() as f64;
        let p = n.eta_at(n.center(0));
        assert!((rate - p).abs() < 4.0 * (p * (1.0 - p) / in_ball.len() as f64).sqrt());
    }
}
