//! Nearest-neighbor classification under margin and tail conditions.
//!
//! The crate bundles:
//! - [`data`] and [`rng`]: labeled samples and reproducible random streams;
//! - [`neighbors`]: exact k-NN search (brute force and kd-tree);
//! - [`rules`]: the plug-in estimate, majority vote, and k schedules
//!   (fixed, global rates, and density-sliced);
//! - [`models`]: location models, lower-bound networks and a KDE;
//! - [`analysis`]: assumption checkers, concentration bounds, the balance
//!   equation solver and log-log rate fits;
//! - [`harness`]: paired Monte Carlo excess-risk experiments.

pub mod analysis;
pub mod data;
pub mod error;
pub mod harness;
pub mod models;
pub mod neighbors;
pub mod quadrature;
pub mod rng;
pub mod rules;

pub use data::{make_dataset, Dataset, LabeledPoint};
pub use error::{Error, Result};
pub use neighbors::{build_index, Backend, Neighbor, NeighborIndex, NeighborList, OwnedNeighborIndex};
pub use rng::{derive_stream, RngStream};
