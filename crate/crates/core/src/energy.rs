//! Per-node battery accounting.
//!
//! A packet costs `draw * airtime` where airtime is the frame length over the
//! radio data rate. Only packet traffic is charged; sensing and idle listening
//! are not modelled.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::EnergyError;
use crate::topology::{NetworkTopology, NodeId, NodeRole};

/// Charge in mAh drawn by one packet at `draw_ma` milliamps.
pub fn per_packet_energy(
    draw_ma: f64,
    packet_size_bytes: u32,
    data_rate_bps: f64,
) -> Result<f64, EnergyError> {
    if !(draw_ma > 0.0) {
        return Err(EnergyError::NotPositive("draw_mA"));
    }
    if packet_size_bytes == 0 {
        return Err(EnergyError::NotPositive("packet_size_bytes"));
    }
    if !(data_rate_bps > 0.0) {
        return Err(EnergyError::NotPositive("data_rate_bps"));
    }
    Ok(draw_ma * airtime_s(packet_size_bytes, data_rate_bps) / 3600.0)
}

pub fn airtime_s(packet_size_bytes: u32, data_rate_bps: f64) -> f64 {
    f64::from(packet_size_bytes) * 8.0 / data_rate_bps
}

/// Seconds until `init` is exhausted at a constant per-round consumption.
/// Zero consumption never exhausts the battery and yields infinity.
pub fn battery_life(consumption_per_round: f64, init: f64, round_period_s: f64) -> f64 {
    if consumption_per_round <= 0.0 {
        f64::INFINITY
    } else {
        init / consumption_per_round * round_period_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketCosts {
    pub tx_mah: f64,
    pub rx_mah: f64,
}

impl PacketCosts {
    pub fn from_draws(
        tx_draw_ma: f64,
        rx_draw_ma: f64,
        packet_size_bytes: u32,
        data_rate_bps: f64,
    ) -> Result<Self, EnergyError> {
        Ok(Self {
            tx_mah: per_packet_energy(tx_draw_ma, packet_size_bytes, data_rate_bps)?,
            rx_mah: per_packet_energy(rx_draw_ma, packet_size_bytes, data_rate_bps)?,
        })
    }

    pub fn cost(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Tx => self.tx_mah,
            Direction::Rx => self.rx_mah,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Tx,
    Rx,
}

/// Neumaier-compensated running sum; keeps long charge sequences exact to a
/// few ulps.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeEnergy {
    pub role: NodeRole,
    consumed: CompensatedSum,
    pub tx_count: u64,
    pub rx_count: u64,
    /// Set once a charge has been refused.
    pub depleted: bool,
    /// Round during which the first charge was refused.
    pub depleted_at_round: Option<u32>,
}

impl NodeEnergy {
    pub fn consumed_mah(&self) -> f64 {
        self.consumed.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeOutcome {
    Charged,
    /// The node could not afford the packet; nothing was deducted.
    Depleted,
}

/// Remaining energy and traffic counters for every node of one simulation.
///
/// A charge only goes through when the node can pay for the whole packet, so
/// consumption is always an exact multiple of the per-packet costs and
/// remaining energy never goes negative. The sink is mains powered: it is
/// charged for bookkeeping but never depletes.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    init_mah: f64,
    costs: PacketCosts,
    nodes: Vec<NodeEnergy>,
}

impl EnergyLedger {
    pub fn new(topology: &NetworkTopology, init_mah: f64, costs: PacketCosts) -> Self {
        let nodes = topology
            .nodes()
            .iter()
            .map(|n| NodeEnergy {
                role: n.role,
                consumed: CompensatedSum::default(),
                tx_count: 0,
                rx_count: 0,
                depleted: false,
                depleted_at_round: None,
            })
            .collect();
        Self {
            init_mah,
            costs,
            nodes,
        }
    }

    pub fn init_mah(&self) -> f64 {
        self.init_mah
    }

    pub fn costs(&self) -> PacketCosts {
        self.costs
    }

    pub fn node(&self, id: NodeId) -> &NodeEnergy {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeEnergy)> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (NodeId(i as u32), n))
    }

    pub fn remaining_mah(&self, id: NodeId) -> f64 {
        (self.init_mah - self.nodes[id.index()].consumed_mah()).max(0.0)
    }

    pub fn consumed_mah(&self, id: NodeId) -> f64 {
        self.nodes[id.index()].consumed_mah()
    }

    /// Whether `id` can pay for one packet in `direction` right now.
    pub fn can_afford(&self, id: NodeId, direction: Direction) -> bool {
        let node = &self.nodes[id.index()];
        node.role == NodeRole::Sink
            || self.init_mah - node.consumed_mah() >= self.costs.cost(direction)
    }

    /// Deducts one packet's cost, or flags the node depleted if it cannot pay.
    pub fn charge(&mut self, id: NodeId, direction: Direction, round: u32) -> ChargeOutcome {
        if !self.can_afford(id, direction) {
            let node = &mut self.nodes[id.index()];
            node.depleted = true;
            node.depleted_at_round.get_or_insert(round);
            return ChargeOutcome::Depleted;
        }
        let cost = self.costs.cost(direction);
        let node = &mut self.nodes[id.index()];
        node.consumed.add(cost);
        match direction {
            Direction::Tx => node.tx_count += 1,
            Direction::Rx => node.rx_count += 1,
        }
        ChargeOutcome::Charged
    }

    /// Marks a node as already drained, e.g. to inject a failed relay.
    pub fn drain(&mut self, id: NodeId) {
        let remaining = self.init_mah - self.nodes[id.index()].consumed_mah();
        if remaining > 0.0 {
            self.nodes[id.index()].consumed.add(remaining);
        }
    }

    pub fn total_consumed_mah(&self) -> f64 {
        self.nodes
            .iter()
            .map(NodeEnergy::consumed_mah)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn total_tx(&self) -> u64 {
        self.nodes.iter().map(|n| n.tx_count).sum()
    }

    pub fn total_rx(&self) -> u64 {
        self.nodes.iter().map(|n| n.rx_count).sum()
    }

    /// Summed consumption over all nodes of `role`.
    pub fn class_consumed_mah(&self, role: NodeRole) -> f64 {
        self.nodes
            .iter()
            .filter(|n| n.role == role)
            .map(NodeEnergy::consumed_mah)
            .collect::<CompensatedSum>()
            .value()
    }
}
