//! Counters collected during a run and the final report.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::message::MessageKind;
use super::Strategy;
use crate::energy::{battery_life, CompensatedSum, EnergyLedger, PacketCosts};
use crate::protocols::GroupAssignment;
use crate::topology::{NodeId, NodeRole};

/// Traffic of one reporting round. Messages are attributed to the round that
/// generated them even if their last hop lands later.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round: u32,
    /// Local exchanges sent.
    pub local_msgs: u64,
    /// Group reports sent.
    pub group_msgs: u64,
    /// Aggregate packets sent.
    pub global_msgs: u64,
    /// Messages of any sink-bound kind that reached the sink.
    pub sink_msgs: u64,
    pub drops: u64,
    /// Energy charged network-wide for this round's traffic.
    pub energy_consumed_mah: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounters {
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRecord {
    pub round: u32,
    pub target: NodeId,
    /// Distance between estimate and truth; `None` when localization failed.
    pub error_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEnergyReport {
    pub node_id: NodeId,
    pub role: NodeRole,
    pub tx_count: u64,
    pub rx_count: u64,
    pub consumed_mah: f64,
    pub remaining_mah: f64,
    pub est_lifetime_s: f64,
    pub depleted_at_round: Option<u32>,
}

#[derive(Debug, Clone, Default)]
struct RoundAcc {
    metrics: RoundMetrics,
    energy: CompensatedSum,
}

/// Mutable counters owned by a running simulation.
#[derive(Debug, Clone, Default)]
pub struct MetricsCollector {
    rounds: Vec<RoundAcc>,
    kinds: [KindCounters; 5],
    pub(crate) localization: Vec<LocalizationRecord>,
    pub(crate) groups: Vec<GroupAssignment>,
    pub localization_failures: u64,
    pub leader_fallbacks: u64,
    pub routing_errors: u64,
    pub unreachable_target_rounds: u64,
    sink_hops_total: u64,
    sink_deliveries: u64,
}

impl MetricsCollector {
    pub fn new() -> Self {
        Self::default()
    }

    fn round_mut(&mut self, round: u32) -> &mut RoundAcc {
        let slot = round.max(1) as usize - 1;
        if self.rounds.len() <= slot {
            let start = self.rounds.len() as u32;
            self.rounds.extend((start..=slot as u32).map(|i| RoundAcc {
                metrics: RoundMetrics {
                    round: i + 1,
                    ..RoundMetrics::default()
                },
                energy: CompensatedSum::default(),
            }));
        }
        &mut self.rounds[slot]
    }

    pub fn open_round(&mut self, round: u32) {
        self.round_mut(round);
    }

    pub fn record_sent(&mut self, kind: MessageKind, round: u32) {
        self.kinds[kind.index()].sent += 1;
        let r = &mut self.round_mut(round).metrics;
        match kind {
            MessageKind::LocalExchange => r.local_msgs += 1,
            MessageKind::GroupReport => r.group_msgs += 1,
            MessageKind::GlobalAggregate => r.global_msgs += 1,
            MessageKind::Reading | MessageKind::LocationReport => {}
        }
    }

    pub fn record_energy(&mut self, round: u32, mah: f64) {
        self.round_mut(round).energy.add(mah);
    }

    pub fn record_delivered(&mut self, kind: MessageKind) {
        self.kinds[kind.index()].delivered += 1;
    }

    pub fn record_sink_arrival(&mut self, round: u32, hops: usize) {
        self.round_mut(round).metrics.sink_msgs += 1;
        self.sink_hops_total += hops as u64;
        self.sink_deliveries += 1;
    }

    pub fn record_dropped(&mut self, kind: MessageKind, round: u32) {
        self.kinds[kind.index()].dropped += 1;
        self.round_mut(round).metrics.drops += 1;
    }

    pub fn record_localization(&mut self, record: LocalizationRecord) {
        if record.error_m.is_none() {
            self.localization_failures += 1;
        }
        self.localization.push(record);
    }

    pub fn kind(&self, kind: MessageKind) -> KindCounters {
        self.kinds[kind.index()]
    }

    pub fn rounds(&self) -> impl Iterator<Item = RoundMetrics> + '_ {
        self.rounds.iter().map(|acc| RoundMetrics {
            energy_consumed_mah: acc.energy.value(),
            ..acc.metrics.clone()
        })
    }

    pub fn finish(mut self, summary: RunSummary, ledger: &EnergyLedger) -> MetricsReport {
        self.localization.sort_by_key(|r| (r.round, r.target));
        let rounds_run = summary.rounds;
        let energy = ledger
            .nodes()
            .map(|(id, n)| {
                let consumed = n.consumed_mah();
                let per_round = if rounds_run == 0 {
                    0.0
                } else {
                    consumed / f64::from(rounds_run)
                };
                NodeEnergyReport {
                    node_id: id,
                    role: n.role,
                    tx_count: n.tx_count,
                    rx_count: n.rx_count,
                    consumed_mah: consumed,
                    remaining_mah: ledger.remaining_mah(id),
                    // Mains powered.
                    est_lifetime_s: if n.role == NodeRole::Sink {
                        f64::INFINITY
                    } else {
                        battery_life(per_round, ledger.init_mah(), summary.round_period_s)
                    },
                    depleted_at_round: n.depleted_at_round,
                }
            })
            .collect();
        let mut rounds: Vec<RoundMetrics> = self.rounds().collect();
        rounds.truncate(rounds_run as usize);
        MetricsReport {
            strategy: summary.strategy,
            seed: summary.seed,
            rounds_run,
            round_period_s: summary.round_period_s,
            init_energy_mah: ledger.init_mah(),
            costs: ledger.costs(),
            rounds,
            kinds: self.kinds,
            localization: self.localization,
            groups: self.groups,
            energy,
            localization_failures: self.localization_failures,
            leader_fallbacks: self.leader_fallbacks,
            routing_errors: self.routing_errors,
            unreachable_references: summary.unreachable_references,
            unreachable_target_rounds: self.unreachable_target_rounds,
            sink_hops_total: self.sink_hops_total,
            sink_deliveries: self.sink_deliveries,
            trajectory_digest: summary.trajectory_digest,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub strategy: Strategy,
    pub seed: u64,
    pub rounds: u32,
    pub round_period_s: f64,
    pub unreachable_references: usize,
    pub trajectory_digest: u64,
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub strategy: Strategy,
    pub seed: u64,
    pub rounds_run: u32,
    pub round_period_s: f64,
    pub init_energy_mah: f64,
    pub costs: PacketCosts,
    pub rounds: Vec<RoundMetrics>,
    kinds: [KindCounters; 5],
    /// Sorted by `(round, target)`.
    pub localization: Vec<LocalizationRecord>,
    pub groups: Vec<GroupAssignment>,
    pub energy: Vec<NodeEnergyReport>,
    pub localization_failures: u64,
    pub leader_fallbacks: u64,
    pub routing_errors: u64,
    /// References with no path to the sink; they take no part in rounds.
    pub unreachable_references: usize,
    pub unreachable_target_rounds: u64,
    pub sink_hops_total: u64,
    pub sink_deliveries: u64,
    /// Digest of every target position at every round start.
    pub trajectory_digest: u64,
}

impl MetricsReport {
    pub fn kind(&self, kind: MessageKind) -> KindCounters {
        self.kinds[kind.index()]
    }

    pub fn total_sink_msgs(&self) -> u64 {
        self.rounds.iter().map(|r| r.sink_msgs).sum()
    }

    pub fn total_drops(&self) -> u64 {
        self.kinds.iter().map(|k| k.dropped).sum()
    }

    /// Messages exchanged directly between mobile targets.
    pub fn target_to_target_msgs(&self) -> u64 {
        self.kind(MessageKind::GroupReport).sent
    }

    /// Mean path length of sink deliveries.
    pub fn average_hops(&self) -> Option<f64> {
        (self.sink_deliveries > 0)
            .then(|| self.sink_hops_total as f64 / self.sink_deliveries as f64)
    }

    pub fn mean_consumed_mah(&self, role: NodeRole) -> f64 {
        let (sum, n) = self.energy.iter().filter(|e| e.role == role).fold(
            (CompensatedSum::default(), 0usize),
            |(mut s, n), e| {
                s.add(e.consumed_mah);
                (s, n + 1)
            },
        );
        if n == 0 {
            0.0
        } else {
            sum.value() / n as f64
        }
    }

    /// Lifetime of an average node of `role`, extrapolated from its mean
    /// per-round consumption.
    pub fn mean_battery_life_s(&self, role: NodeRole) -> f64 {
        let per_round = if self.rounds_run == 0 {
            0.0
        } else {
            self.mean_consumed_mah(role) / f64::from(self.rounds_run)
        };
        battery_life(per_round, self.init_energy_mah, self.round_period_s)
    }

    pub fn total_consumed_mah(&self) -> f64 {
        self.energy
            .iter()
            .map(|e| e.consumed_mah)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn median_localization_error(&self) -> Option<f64> {
        let mut errs: Vec<f64> = self.localization.iter().filter_map(|r| r.error_m).collect();
        if errs.is_empty() {
            return None;
        }
        errs.sort_by(f64::total_cmp);
        let mid = errs.len() / 2;
        Some(if errs.len().is_multiple_of(2) {
            (errs[mid - 1] + errs[mid]) / 2.0
        } else {
            errs[mid]
        })
    }
}
