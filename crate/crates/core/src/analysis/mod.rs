//! Assumption checkers, bound evaluators, the balance-equation solver and
//! log-log rate fits.

mod assumptions;
mod balance;
mod bounds;
mod fit;

pub use assumptions::{
    default_probes, empirical_margin, empirical_tail, gradient_criterion, minimal_mass_ratio,
    minimal_mass_ratio_mc, AssumptionReport, MarginSample, MassRatio, McEstimate, TailSample, Verdict,
};
pub use balance::{closed_form_exponent, solve_balance, BalanceSolution, RateQuery, Side, TailForm, TailSpec};
pub use bounds::{bias_bound, hoeffding_bound, misclass_bound, poisson_concentration_bound};
pub use fit::{fit_rate, RateFit};
