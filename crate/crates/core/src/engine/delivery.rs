//! Hop-by-hop packet delivery with energy charging.

use rand::Rng;

use super::message::MessageRecord;
use super::metrics::MetricsCollector;
use crate::energy::{Direction, EnergyLedger};
use crate::rng::SimRng;
use crate::topology::{NetworkTopology, NodeId};

/// Independent per-hop packet loss. A rate of zero never touches the RNG.
#[derive(Debug, Clone)]
pub struct LossModel {
    rate: f64,
    rng: SimRng,
}

impl LossModel {
    pub fn new(rate: f64, rng: SimRng) -> Self {
        Self { rate, rng }
    }

    fn lost(&mut self) -> bool {
        self.rate > 0.0 && self.rng.random::<f64>() < self.rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropCause {
    /// The named node could not pay for the hop.
    Depleted(NodeId),
    /// Random channel loss after transmission.
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopOutcome {
    Forwarded,
    Arrived,
    Dropped(DropCause),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delivery {
    Arrived,
    /// Dropped while attempting hop `at_hop` (0-based).
    Dropped {
        at_hop: usize,
        cause: DropCause,
    },
}

/// Moves `message` across hop `hop` (from `hop_path[hop]` to
/// `hop_path[hop + 1]`). A hop is only attempted when the sender can pay for
/// a transmission and the receiver for a reception; otherwise the message is
/// dropped with nothing charged.
pub fn forward_hop(
    message: &MessageRecord,
    hop: usize,
    ledger: &mut EnergyLedger,
    metrics: &mut MetricsCollector,
    loss: &mut LossModel,
) -> HopOutcome {
    let (from, to) = (message.hop_path[hop], message.hop_path[hop + 1]);
    let round = message.round;
    for (node, dir) in [(from, Direction::Tx), (to, Direction::Rx)] {
        if !ledger.can_afford(node, dir) {
            // Records the depletion; deducts nothing.
            ledger.charge(node, dir, round);
            metrics.record_dropped(message.kind, round);
            return HopOutcome::Dropped(DropCause::Depleted(node));
        }
    }
    let costs = ledger.costs();
    ledger.charge(from, Direction::Tx, round);
    metrics.record_energy(round, costs.tx_mah);
    if loss.lost() {
        metrics.record_dropped(message.kind, round);
        return HopOutcome::Dropped(DropCause::Lost);
    }
    ledger.charge(to, Direction::Rx, round);
    metrics.record_energy(round, costs.rx_mah);
    if hop + 2 == message.hop_path.len() {
        metrics.record_delivered(message.kind);
        HopOutcome::Arrived
    } else {
        HopOutcome::Forwarded
    }
}

/// Delivers `message` along its whole path at once. Sink arrivals are
/// recorded in the per-round sink counters.
pub fn deliver(
    message: &MessageRecord,
    topology: &NetworkTopology,
    ledger: &mut EnergyLedger,
    metrics: &mut MetricsCollector,
    loss: &mut LossModel,
) -> Delivery {
    debug_assert_eq!(message.hop_path.first(), Some(&message.src));
    debug_assert_eq!(message.hop_path.last(), Some(&message.dst));
    debug_assert!(message
        .hop_path
        .windows(2)
        .all(|w| topology.are_adjacent(w[0], w[1])));
    if message.hops() == 0 {
        metrics.record_delivered(message.kind);
        note_sink_arrival(message, topology, metrics);
        return Delivery::Arrived;
    }
    for hop in 0..message.hops() {
        match forward_hop(message, hop, ledger, metrics, loss) {
            HopOutcome::Forwarded => {}
            HopOutcome::Arrived => {
                note_sink_arrival(message, topology, metrics);
                return Delivery::Arrived;
            }
            HopOutcome::Dropped(cause) => return Delivery::Dropped { at_hop: hop, cause },
        }
    }
    unreachable!(
        "path of {} hops neither arrived nor dropped",
        message.hops()
    )
}

pub(crate) fn note_sink_arrival(
    message: &MessageRecord,
    topology: &NetworkTopology,
    metrics: &mut MetricsCollector,
) {
    if message.dst == topology.sink() && message.kind.is_sink_bound() {
        metrics.record_sink_arrival(message.round, message.hops());
    }
}
