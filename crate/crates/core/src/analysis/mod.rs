//! Closed-form quantities and property checkers used to analyse cooperative
//! broadcast: lattice sums and grid bounds, the brightening constants and
//! sampler, and the power-transfer procedure.

mod brightening;
mod lattice;
mod transfer;

pub use brightening::{
    beta_constants, check_bright, contract_disks, selected_free_disks, BetaConstants,
    BrighteningInstance, FreeDisk, SamplingSpec,
};
pub use lattice::{
    grid_coop_lower_bound, grid_l_condition, grid_l_condition_value, grid_noncoop_lower_bound,
    theorem3_ceiling, zeta_alpha,
};
pub use transfer::{power_transfer, Bucket, TransferOutcome, TransferScenario};
