use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    /// Reference beacon heard by a target (one hop).
    LocalExchange,
    /// Reference-to-sink RSS reading (centralized).
    Reading,
    /// Target-to-sink self-estimate (decentralized).
    LocationReport,
    /// Member-to-leader location (improved, one hop).
    GroupReport,
    /// Leader-to-sink packet of aggregated locations (improved).
    GlobalAggregate,
}

impl MessageKind {
    pub const ALL: [MessageKind; 5] = [
        MessageKind::LocalExchange,
        MessageKind::Reading,
        MessageKind::LocationReport,
        MessageKind::GroupReport,
        MessageKind::GlobalAggregate,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// Kinds whose destination is the sink.
    pub const fn is_sink_bound(self) -> bool {
        matches!(
            self,
            MessageKind::Reading | MessageKind::LocationReport | MessageKind::GlobalAggregate
        )
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            MessageKind::LocalExchange => "local_exchange",
            MessageKind::Reading => "reading",
            MessageKind::LocationReport => "location_report",
            MessageKind::GroupReport => "group_report",
            MessageKind::GlobalAggregate => "global_aggregate",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Beacon,
    Rss {
        target: NodeId,
        reference: NodeId,
        rss_dbm: f64,
    },
    Location {
        target: NodeId,
        estimate: Point,
    },
    Locations(Vec<(NodeId, Point)>),
}

/// One logical packet and the path it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageRecord {
    pub kind: MessageKind,
    pub src: NodeId,
    pub dst: NodeId,
    /// Starts at `src`, ends at `dst`; consecutive entries are adjacent.
    pub hop_path: Vec<NodeId>,
    pub round: u32,
    pub payload_locations: u32,
    pub payload: Payload,
}

impl MessageRecord {
    pub fn hops(&self) -> usize {
        self.hop_path.len().saturating_sub(1)
    }
}
