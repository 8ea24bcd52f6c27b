//! Broadcast algorithm constructors.
//!
//! Cooperative: [`greedy_filling`] and the grid row construction
//! [`grid_coop_rows`]. Non-cooperative: [`bip`], [`mst_broadcast`],
//! [`grid_all_nodes`] and [`single_transmission`].

mod greedy;
mod grid;
mod trees;

pub use greedy::greedy_filling;
pub use grid::{
    grid_all_nodes, grid_coop_rows, max_feasible_spacing, max_feasible_spacing_with, GridCoopParams,
};
pub use trees::{bip, mst_broadcast, single_transmission};
