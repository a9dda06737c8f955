use thiserror::Error;

use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("`{field}` must be strictly positive (got {value})")]
    NotPositive { field: &'static str, value: f64 },
    #[error("`{field}` must not be negative (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("`{field}` must lie in [{min}, {max}] (got {value})")]
    OutOfRange {
        field: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("aggregation_capacity must be at least 1")]
    ZeroCapacity,
    #[error("num_references must be at least 1")]
    NoReferences,
    #[error("speed_max_mps ({max}) is below speed_min_mps ({min})")]
    SpeedRange { min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("grid {width}x{height} m cannot hold a {cols}x{rows} reference lattice")]
    GridTooSmall {
        width: f64,
        height: f64,
        cols: usize,
        rows: usize,
    },
    #[error("topology must contain exactly one sink (found {0})")]
    SinkCount(usize),
    #[error("node ids must be dense and ordered: slot {slot} holds {found}")]
    NodeIdMismatch { slot: usize, found: NodeId },
    #[error("no reference node can reach the sink")]
    SinkUnreachable,
    #[error("radio range must be strictly positive")]
    BadRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ChannelError {
    #[error("distance must be strictly positive (got {0})")]
    NonPositiveDistance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LocalizationError {
    #[error("{0} covering references, at least 3 are required")]
    InsufficientCoverage(usize),
    #[error("reference geometry is degenerate (smallest singular value {0:e})")]
    DegenerateGeometry(f64),
    #[error("reference and distance lists differ in length")]
    LengthMismatch,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoutingError {
    #[error("no route from {src} to {dst}")]
    Disconnected { src: NodeId, dst: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EnergyError {
    #[error("`{0}` must be strictly positive")]
    NotPositive(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ElectionError {
    #[error("leader election needs at least one candidate")]
    NoCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("reporting period f must be strictly positive (got {0})")]
    NonPositivePeriod(f64),
    #[error("`{0}` must not be negative")]
    Negative(&'static str),
    #[error("aggregation capacity must be at least 1")]
    ZeroCapacity,
}

/// Failures that abort a simulation before the first round.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}` (expected centralized, decentralized or improved)")]
pub struct UnknownStrategy(pub alloc::string::String);
