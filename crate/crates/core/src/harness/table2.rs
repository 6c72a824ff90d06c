//! Standard versus sliced k-NN over the five published location models.

use serde::{Deserialize, Serialize};

use super::experiment::{run_excess_risk, DensityChoice, ExperimentConfig};
use crate::error::Result;
use crate::models::LocationModel;
use crate::rng::mix_seed;
use crate::rules::KSchedule;

/// Published mean excess risk ×100 and its standard error for one cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub value: f64,
    pub se: f64,
}

const fn r(value: f64, se: f64) -> Reference {
    Reference { value, se }
}

pub const TABLE2_SIZES: [usize; 3] = [100, 500, 1000];
pub const TABLE2_TEST_SIZE: usize = 200;
pub const TABLE2_REPLICATIONS: usize = 1000;

/// One row of the comparison: a location model and its published values
/// at `n = 100, 500, 1000`.
#[derive(Clone, Debug)]
pub struct Table2Row {
    pub label: &'static str,
    pub model: LocationModel,
    pub standard: [Reference; 3],
    pub sliced: [Reference; 3],
}

pub fn table2_rows() -> Vec<Table2Row> {
    vec![
        Table2Row {
            label: "gauss_sigma2_b1",
            model: LocationModel::gauss(2.0, 1.0).expect("valid"),
            standard: [r(19.2, 0.6), r(16.4, 0.5), r(15.4, 0.5)],
            sliced: [r(18.1, 0.6), r(13.9, 0.5), r(12.0, 0.5)],
        },
        Table2Row {
            label: "cauchy_gamma0.5_b0.5",
            model: LocationModel::cauchy(0.5, 0.5).expect("valid"),
            standard: [r(2.6, 0.2), r(1.4, 0.1), r(0.9, 0.05)],
            sliced: [r(1.9, 0.2), r(1.2, 0.1), r(0.8, 0.05)],
        },
        Table2Row {
            label: "cauchy_gamma1_b0.5",
            model: LocationModel::cauchy(1.0, 0.5).expect("valid"),
            standard: [r(4.4, 0.3), r(3.1, 0.3), r(2.3, 0.2)],
            sliced: [r(3.6, 0.2), r(2.2, 0.2), r(1.4, 0.2)],
        },
        Table2Row {
            label: "power_g1_b0.5",
            model: LocationModel::power_law(1.0, 0.5).expect("valid"),
            standard: [r(3.8, 0.3), r(2.7, 0.2), r(1.9, 0.2)],
            sliced: [r(3.0, 0.3), r(2.1, 0.2), r(1.5, 0.1)],
        },
        Table2Row {
            label: "power_g2_b0.5",
            model: LocationModel::power_law(2.0, 0.5).expect("valid"),
            standard: [r(2.0, 0.2), r(1.2, 0.2), r(0.7, 0.1)],
            sliced: [r(1.7, 0.2), r(1.0, 0.1), r(0.6, 0.1)],
        },
    ]
}

/// The standard rule, `⌊n^(2/5)⌋ + 1` in one dimension with `α = 1`.
pub const STANDARD: KSchedule = KSchedule::GeneralRateOffset { alpha: 1.0 };
/// The sliced rule on a KDE of the training features.
pub const SLICED: KSchedule = KSchedule::SlicedEmpirical { alpha: 1.0 };

/// One (row, n) cell. Values are mean excess risk ×100.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Cell {
    pub row: String,
    pub model: String,
    pub n: usize,
    pub standard: f64,
    pub standard_se: f64,
    pub sliced: f64,
    pub sliced_se: f64,
    /// `(standard − sliced) / standard · 100`.
    pub improvement_pct: f64,
    /// Standard error of the paired difference `standard − sliced`, ×100.
    pub paired_se: f64,
    pub bayes_risk: f64,
    pub reps: usize,
    pub seed: u64,
    pub reference_standard: Reference,
    pub reference_sliced: Reference,
}

impl Table2Cell {
    /// `|ours − published| / √(se² + se_pub²)` for the standard rule.
    pub fn standard_z(&self) -> f64 {
        (self.standard - self.reference_standard.value).abs()
            / self.standard_se.hypot(self.reference_standard.se)
    }

    pub fn sliced_z(&self) -> f64 {
        (self.sliced - self.reference_sliced.value).abs() / self.sliced_se.hypot(self.reference_sliced.se)
    }
}

/// Seed of cell (row, n): cells are independent of each other and of which
/// subset of cells is run.
pub fn cell_seed(seed: u64, row: usize, n: usize) -> u64 {
    mix_seed(seed, ((row as u64) << 32) | n as u64)
}

pub fn run_table2_cell(
    row_index: usize,
    row: &Table2Row,
    n: usize,
    seed: u64,
    replications: usize,
    n_test: usize,
) -> Result<Table2Cell> {
    let size_index = TABLE2_SIZES.iter().position(|&s| s == n);
    let cell_seed = cell_seed(seed, row_index, n);
    let config = ExperimentConfig {
        model: row.model.into(),
        n_train: n,
        n_test,
        replications,
        schedules: vec![STANDARD, SLICED],
        seed: cell_seed,
        density_source: DensityChoice::Kde,
    };
    let res = run_excess_risk(&config)?;
    let std = res.schedule(&STANDARD).expect("scheduled");
    let sl = res.schedule(&SLICED).expect("scheduled");
    let (_, paired_se) = res.paired_difference(&STANDARD, &SLICED).expect("scheduled");
    let missing = r(f64::NAN, f64::NAN);
    Ok(Table2Cell {
        row: row.label.to_string(),
        model: res.model.clone(),
        n,
        standard: 100.0 * std.mean_excess,
        standard_se: 100.0 * std.std_error,
        sliced: 100.0 * sl.mean_excess,
        sliced_se: 100.0 * sl.std_error,
        improvement_pct: (std.mean_excess - sl.mean_excess) / std.mean_excess * 100.0,
        paired_se: 100.0 * paired_se,
        bayes_risk: res.bayes_risk,
        reps: replications,
        seed,
        reference_standard: size_index.map_or(missing, |i| row.standard[i]),
        reference_sliced: size_index.map_or(missing, |i| row.sliced[i]),
    })
}

/// All five rows over `sizes`, row-major.
pub fn run_table2(seed: u64, replications: usize, sizes: &[usize], n_test: usize) -> Result<Vec<Table2Cell>> {
    let mut cells = Vec::new();
    for (i, row) in table2_rows().iter().enumerate() {
        for &n in sizes {
            cells.push(run_table2_cell(i, row, n, seed, replications, n_test)?);
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn improvement_is_relative_difference() {
        let cells = run_table2(3, 10, &[100], 40).unwrap();
        assert_eq!(cells.len(), 5);
        for c in &cells {
            let expected = (c.standard - c.sliced) / c.standard * 100.0;
            assert!((c.improvement_pct - expected).abs() < 1e-9);
            assert_eq!(c.reference_standard, table2_rows().iter().find(|r| r.label == c.row).unwrap().standard[0]);
        }
    }

    #[test]
    fn cells_do_not_depend_on_the_size_list() {
        let a = run_table2(5, 6, &[100], 30).unwrap();
        let b = run_table2(5, 6, &[500, 100], 30).unwrap();
        let b100: Vec<_> = b.into_iter().filter(|c| c.n == 100).collect();
        assert_eq!(a, b100);
    }

    #[test]
    fn cell_seeds_differ() {
        let seeds: std::collections::HashSet<u64> =
            (0..5).flat_map(|r| TABLE2_SIZES.map(|n| cell_seed(1, r, n))).collect();
        assert_eq!(seeds.len(), 15);
    }
}
