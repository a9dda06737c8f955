//! Deterministic discrete-event simulation of multi-target tracking over a
//! multi-hop wireless sensor network, together with the closed-form message
//! and energy cost model the simulator is checked against.
//!
//! Three tracking strategies are modelled:
//!
//! * **centralized**: every reference node that hears a target forwards its
//!   reading to the sink, which localizes the target;
//! * **decentralized**: each target localizes itself from reference beacons
//!   and sends one report to the sink;
//! * **improved**: targets within radio range of each other form groups, the
//!   target closest (in hops) to the sink is elected leader and forwards the
//!   aggregated locations of its group in packets of bounded capacity.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! anything else touching the OS live in the `wsntrack` companion crate.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod channel;
pub mod config;
pub mod energy;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod localization;
pub mod mobility;
pub mod protocols;
pub mod rng;
pub mod scenarios;
pub mod topology;

pub use self::config::{RawSettings, SimConfig};
pub use self::engine::{run, MetricsReport, Simulation, Strategy};
pub use self::error::*;
pub use self::geometry::Point;
pub use self::topology::{NetworkTopology, NodeId, NodeRole};
