//! Energy-accumulation (cooperative) broadcast in 2D wireless networks.
//!
//! A transmission of power `p` reaches a node at distance `d` with power
//! `p d^-alpha`. Under cooperation a node decodes once the powers it has
//! received from all earlier transmitters add up to the threshold; without
//! cooperation a single transmission must reach it on its own.
//!
//! - [`net`]: networks, grids and seeded placements.
//! - [`broadcast`]: schedules and the two delivery checkers.
//! - [`convert`]: turns any cooperative schedule into a non-cooperative one.
//! - [`algos`]: greedy filling, BIP, MST and the grid constructions.
//! - [`analysis`]: lattice sums, grid bounds, brightness and power transfer.
//! - [`experiment`]: reproducible experiments with CSV output.

// `!(x > 0.0)` is how parameter checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algos;
pub mod analysis;
pub mod broadcast;
pub mod convert;
pub mod error;
pub mod experiment;
pub mod net;

pub use broadcast::{
    check_cooperative, check_noncooperative, DeliveryMode, DeliveryReport, Schedule,
    DELIVERY_TOLERANCE,
};
pub use convert::{convert, ConversionTrace};
pub use error::{Error, Result};
pub use net::{GridNetwork, Network, NodeId, Point2D};
