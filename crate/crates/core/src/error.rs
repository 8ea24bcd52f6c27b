use thiserror::Error;

use crate::net::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("node {0} is not part of the network")]
    UnknownNode(NodeId),

    #[error("schedule is not normalized: node {0} appears more than once")]
    NotNormalized(NodeId),

    #[error("invalid transmit power {power} for node {node}")]
    InvalidPower { node: NodeId, power: f64 },

    #[error("node {0} has no earlier transmitter (the source must transmit first)")]
    NoEarlierTransmitter(NodeId),

    #[error("could not place node {index} without collision after {attempts} attempts")]
    PlacementCollision { index: usize, attempts: usize },

    #[error("network is not a grid: {0}")]
    NotAGrid(String),

    #[error("{mode} delivery fails at node {node} (received {received})")]
    DeliveryFailed {
        mode: &'static str,
        node: NodeId,
        received: f64,
    },

    #[error("converted schedule does not deliver to node {node} (received {received})")]
    ConversionNotDelivering { node: NodeId, received: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("run failed for seed {seed}: {source}")]
    Run {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True when a checker rejected a schedule or a checked property failed,
    /// directly or inside an experiment run.
    pub fn is_checker_failure(&self) -> bool {
        match self {
            Error::DeliveryFailed { .. }
            | Error::ConversionNotDelivering { .. }
            | Error::Invariant(_) => true,
            Error::Run { source, .. } => source.is_checker_failure(),
            _ => false,
        }
    }
}
