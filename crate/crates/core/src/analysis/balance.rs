//! Balance equations tying `n`, `d`, the margin exponent `α` and the tail
//! function `ψ` to the rate scale.
//!
//! Lower side: `1/n = ε^(2+d) ψ⁻¹(ε^α)`.
//! Upper side: `1/n = ψ⁻¹(ν^(1+α)) ν^(2+d)`, with `k = ν^(−2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LOWEST_SCALE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum TailForm {
    Identity,
    Power { g: f64 },
    /// `ε^g (ln(1/ε))^r`.
    PowerLog { g: f64, r: f64 },
}

/// `ψ(ε) = C · form(ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    pub form: TailForm,
    pub c: f64,
}

impl TailSpec {
    pub fn identity() -> Self {
        Self {
            form: TailForm::Identity,
            c: 1.0,
        }
    }

    pub fn power(g: f64) -> Self {
        Self {
            form: TailForm::Power { g },
            c: 1.0,
        }
    }

    pub fn power_log(g: f64, r: f64) -> Self {
        Self {
            form: TailForm::PowerLog { g, r },
            c: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.c > 0.0
            && match self.form {
                TailForm::Identity => true,
                TailForm::Power { g } => g > 0.0,
                TailForm::PowerLog { g, r } => g > 0.0 && r.is_finite(),
            };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid tail specification {self:?}")))
        }
    }

    pub fn psi(&self, eps: f64) -> f64 {
        if eps <= 0.0 {
            return 0.0;
        }
        self.c
            * match self.form {
                TailForm::Identity => eps,
                TailForm::Power { g } => eps.powf(g),
                TailForm::PowerLog { g, r } => eps.powf(g) * (1.0 / eps).ln().powf(r),
            }
    }

    /// Upper end of the interval near 0 on which `ψ` is increasing.
    fn monotone_limit(&self) -> f64 {
        match self.form {
            TailForm::PowerLog { g, r } if r > 0.0 => (-r / g).exp(),
            _ => 1.0,
        }
    }

    /// `ψ⁻¹(y)` on the increasing branch near 0. `None` if `y` exceeds the
    /// range of that branch.
    pub fn psi_inverse(&self, y: f64) -> Option<f64> {
        if y <= 0.0 {
            return Some(0.0);
        }
        let y = y / self.c;
        match self.form {
            TailForm::Identity => Some(y),
            TailForm::Power { g } => Some(y.powf(1.0 / g)),
            TailForm::PowerLog { g, r } => {
                let top = self.monotone_limit();
                let form = |e: f64| e.powf(g) * (1.0 / e).ln().powf(r);
                if top < 1.0 && y > form(top) {
                    return None;
                }
                // Bisection on ln ε; form(ε) = exp(g ln ε + r ln(−ln ε)).
                let target = y.ln();
                let h = |t: f64| g * t + r * (-t).ln() - target;
                let mut hi = if top >= 1.0 { -1e-300 } else { top.ln() };
                let mut lo = -745.0;
                if h(lo) > 0.0 {
                    return Some(lo.exp());
                }
                if h(hi) < 0.0 {
                    return None;
                }
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some((0.5 * (lo + hi)).exp())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateQuery {
    pub alpha: f64,
    pub d: usize,
    pub n: f64,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceSolution {
    /// `ε` on the lower side, `ν` on the upper side.
    pub scale: f64,
    /// `scale^(1+α)`.
    pub rate: f64,
    /// `round(ν^(−2))`, upper side only.
    pub k: Option<u64>,
}

/// Rate exponent for `ψ = Id`: `(1+α)/(2+α+d)` (lower) or `(1+α)/(3+α+d)` (upper).
pub fn closed_form_exponent(alpha: f64, d: usize, side: Side) -> f64 {
    let extra = match side {
        Side::Lower => 2.0,
        Side::Upper => 3.0,
    };
    (1.0 + alpha) / (extra + alpha + d as f64)
}

pub fn solve_balance(tail: &TailSpec, query: &RateQuery) -> Result<BalanceSolution> {
    tail.validate()?;
    if !(query.alpha > 0.0) || query.d == 0 || !(query.n >= 2.0) {
        return Err(Error::InvalidArgument(format!("invalid rate query {query:?}")));
    }
    let alpha = query.alpha;
    let d = query.d as f64;
    let target = -query.n.ln();
    // ln of the left-hand side; increasing in ln(scale).
    let lhs = |t: f64| -> f64 {
        let s = t.exp();
        let arg = match query.side {
            Side::Lower => s.powf(alpha),
            Side::Upper => s.powf(1.0 + alpha),
        };
        match tail.psi_inverse(arg) {
            Some(inv) if inv > 0.0 => (2.0 + d) * t + inv.ln(),
            Some(_) => f64::NEG_INFINITY,
            None => f64::INFINITY,
        }
    };
    let mut lo = LOWEST_SCALE.ln();
    let mut hi = 0.0f64;
    if !(lhs(lo) <= target && lhs(hi) >= target) {
        return Err(Error::NoBracket);
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let scale = (0.5 * (lo + hi)).exp();
    Ok(BalanceSolution {
        scale,
        rate: scale.powf(1.0 + alpha),
        k: match query.side {
            Side::Upper => Some(scale.powi(-2).round() as u64),
            Side::Lower => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(alpha: f64, d: usize, n: f64, side: Side) -> RateQuery {
        RateQuery { alpha, d, n, side }
    }

    #[test]
    fn identity_lower_closed_form() {
        let s = solve_balance(&TailSpec::identity(), &q(1.0, 1, 1e4, Side::Lower)).unwrap();
        assert_relative_eq!(s.scale, 0.1, max_relative = 1e-10);
        assert_relative_eq!(s.rate, 0.01, max_relative = 1e-10);
        assert_eq!(s.k, None);
    }

    #[test]
    fn identity_upper_closed_form() {
        let s = solve_balance(&TailSpec::identity(), &q(1.0, 1, 1e5, Side::Upper)).unwrap();
        assert_relative_eq!(s.scale, 0.1, max_relative = 1e-10);
        assert_relative_eq!(s.rate, 0.01, max_relative = 1e-10);
        assert_eq!(s.k, Some(100));
    }

    #[test]
    fn power_tail_upper() {
        // ν^((1+α)/g + 2 + d) = ν⁴ = 1e-4.
        let s = solve_balance(&TailSpec::power(2.0), &q(1.0, 1, 1e4, Side::Upper)).unwrap();
        assert_relative_eq!(s.scale, 0.1, max_relative = 1e-10);
        assert_relative_eq!(s.rate, 0.01, max_relative = 1e-10);
    }

    #[test]
    fn power_log_inverse_round_trips() {
        for (g, r) in [(1.0, 1.0), (1.0, 0.5), (0.5, -1.0), (2.0, 3.0)] {
            let t = TailSpec::power_log(g, r);
            for eps in [1e-8, 1e-5, 1e-3] {
                let y = t.psi(eps);
                let back = t.psi_inverse(y).unwrap();
                assert_relative_eq!(back, eps, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn power_log_solution_satisfies_equation() {
        let t = TailSpec::power_log(1.0, 0.5);
        let s = solve_balance(&t, &q(1.0, 1, 1e6, Side::Upper)).unwrap();
        let lhs = t.psi_inverse(s.scale.powi(2)).unwrap() * s.scale.powi(3);
        assert_relative_eq!(lhs, 1e-6, max_relative = 1e-9);
    }

    #[test]
    fn no_bracket_when_n_beyond_range() {
        // Solution would lie below 1e-12.
        let err = solve_balance(&TailSpec::identity(), &q(1.0, 1, 1e60, Side::Lower)).unwrap_err();
        assert!(matches!(err, Error::NoBracket));
    }

    proptest! {
        #[test]
        fn identity_matches_closed_forms(alpha in 0.1f64..4.0, d in 1usize..8, log_n in 1.0f64..14.0) {
            let n = 10f64.powf(log_n);
            for side in [Side::Lower, Side::Upper] {
                let s = solve_balance(&TailSpec::identity(), &q(alpha, d, n, side)).unwrap();
                let denom = match side { Side::Lower => 2.0, Side::Upper => 3.0 } + alpha + d as f64;
                let expected = n.powf(-1.0 / denom);
                prop_assert!((s.scale / expected - 1.0).abs() < 1e-9);
                let exponent = -s.rate.ln() / n.ln();
                prop_assert!((exponent - closed_form_exponent(alpha, d, side)).abs() < 1e-9);
            }
        }
    }
}
