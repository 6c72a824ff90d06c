//! Monte Carlo experiments: paired excess-risk runs, the standard/sliced
//! comparison, rate curves and two-sample simulations.

mod experiment;
mod model_spec;
mod rates;
mod report;
mod sda;
mod table2;

pub use experiment::{
    mean_and_se, run_excess_risk, with_threads, DensityChoice, ExperimentConfig, ExperimentResult, ScheduleResult,
};
pub use model_spec::ModelSpec;
pub use rates::{predicted_slope, run_rates, RateCurve, RatePoint, RatesConfig};
pub use report::{
    svg_loglog, write_rates_csv, write_results_csv, write_table2_csv, Series, RATES_HEADER, RESULTS_HEADER,
    TABLE2_HEADER,
};
pub use sda::{
    deviation_probabilities, eta_hat_samples, ks_distance, poissonization_check, run_sda, sda_bayes_risk,
    sda_eta_hat_samples, PoissonizationResult, SdaResult,
};
pub use table2::{
    cell_seed, run_table2, run_table2_cell, table2_rows, Reference, Table2Cell, Table2Row, SLICED, STANDARD,
    TABLE2_REPLICATIONS, TABLE2_SIZES, TABLE2_TEST_SIZE,
};
