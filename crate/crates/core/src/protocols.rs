//! Per-round procedures of the three tracking strategies, plus group
//! formation, leader election and location aggregation for the improved one.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::engine::{LocalizationRecord, MessageKind, Payload, Simulation};
use crate::error::ElectionError;
use crate::geometry::Point;
use crate::localization::{estimate_from_rss, RssSample};
use crate::topology::NodeId;

/// A target taking part in leader election.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: NodeId,
    pub position: Point,
    /// Hops to the sink; `None` when the target has no route.
    pub hops: Option<u32>,
    pub energy_mah: f64,
}

impl Candidate {
    /// Fewer hops first, then more energy, then lower id.
    pub fn rank(&self, other: &Candidate) -> Ordering {
        let hops = |c: &Candidate| c.hops.unwrap_or(u32::MAX);
        hops(self)
            .cmp(&hops(other))
            .then_with(|| other.energy_mah.total_cmp(&self.energy_mah))
            .then_with(|| self.id.cmp(&other.id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Election {
    pub leader: NodeId,
    /// No candidate met the energy threshold; the best overall was taken.
    pub fallback: bool,
}

/// Picks the best-ranked candidate among those holding at least
/// `threshold_mah`, or among all candidates when none does.
pub fn elect_leader(
    candidates: &[Candidate],
    threshold_mah: f64,
) -> Result<Election, ElectionError> {
    let best =
        |pool: &mut dyn Iterator<Item = &Candidate>| pool.min_by(|a, b| a.rank(b)).map(|c| c.id);
    if let Some(leader) = best(&mut candidates.iter().filter(|c| c.energy_mah >= threshold_mah)) {
        return Ok(Election {
            leader,
            fallback: false,
        });
    }
    best(&mut candidates.iter())
        .map(|leader| Election {
            leader,
            fallback: true,
        })
        .ok_or(ElectionError::NoCandidates)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub leader: NodeId,
    /// Non-leader members, sorted by id.
    pub members: Vec<NodeId>,
    /// Leader was chosen without meeting the energy threshold.
    pub fallback: bool,
}

impl Group {
    /// Members including the leader.
    pub fn size(&self) -> usize {
        self.members.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub round: u32,
    pub groups: Vec<Group>,
}

/// Greedy grouping: the best-ranked ungrouped target becomes a leader and
/// absorbs every ungrouped target within `radio_range_m` of it; repeat until
/// everyone is grouped.
pub fn form_groups(
    candidates: &[Candidate],
    radio_range_m: f64,
    threshold_mah: f64,
    round: u32,
) -> GroupAssignment {
    let mut ungrouped: Vec<Candidate> = candidates.to_vec();
    ungrouped.sort_by_key(|c| c.id);
    let mut groups = Vec::new();
    while !ungrouped.is_empty() {
        let Ok(election) = elect_leader(&ungrouped, threshold_mah) else {
            break;
        };
        let leader = *ungrouped.iter().find(|c| c.id == election.leader).unwrap();
        let (joined, rest): (Vec<Candidate>, Vec<Candidate>) = ungrouped
            .into_iter()
            .partition(|c| c.position.distance(leader.position) <= radio_range_m);
        ungrouped = rest;
        groups.push(Group {
            leader: leader.id,
            members: joined
                .iter()
                .map(|c| c.id)
                .filter(|&id| id != leader.id)
                .collect(),
            fallback: election.fallback,
        });
    }
    GroupAssignment { round, groups }
}

/// Splits `locations` into consecutive packets of at most `capacity` entries.
pub fn aggregate<T: Clone>(locations: &[T], capacity: usize) -> Vec<Vec<T>> {
    let capacity = capacity.max(1);
    locations.chunks(capacity).map(<[T]>::to_vec).collect()
}

/// Every covering reference forwards its RSS reading of every target to the
/// sink, which localizes the targets once the readings are in.
pub fn centralized_round(round: u32, sim: &mut Simulation) {
    for idx in 0..sim.targets.len() {
        let (id, truth) = (sim.targets[idx].id, sim.targets[idx].true_position);
        sim.sink_observations.insert(
            (round, id),
            crate::engine::SinkObservation {
                truth,
                samples: Vec::new(),
            },
        );
        let covering = sim.targets[idx].covering_references.clone();
        for reference in covering {
            let rss_dbm = sim.measure_rss(reference, truth);
            sim.send_to_sink(
                MessageKind::Reading,
                reference,
                round,
                Payload::Rss {
                    target: id,
                    reference,
                    rss_dbm,
                },
                1,
            );
        }
    }
}

/// Each target localizes itself and sends its own estimate to the sink.
pub fn decentralized_round(round: u32, sim: &mut Simulation) {
    for idx in 0..sim.targets.len() {
        if let Some(estimate) = self_localize(idx, round, sim) {
            let id = sim.targets[idx].id;
            sim.send_to_sink(
                MessageKind::LocationReport,
                id,
                round,
                Payload::Location {
                    target: id,
                    estimate,
                },
                1,
            );
        }
    }
}

/// Self-localization, grouping, member-to-leader reports and aggregated
/// leader-to-sink packets.
pub fn improved_round(round: u32, sim: &mut Simulation) {
    let mut located: Vec<(Candidate, Point)> = Vec::new();
    for idx in 0..sim.targets.len() {
        if let Some(estimate) = self_localize(idx, round, sim) {
            let t = &sim.targets[idx];
            let candidate = Candidate {
                id: t.id,
                position: t.true_position,
                hops: sim.topology.hops_to_sink(t.id),
                energy_mah: sim.ledger.remaining_mah(t.id),
            };
            located.push((candidate, estimate));
        }
    }
    let candidates: Vec<Candidate> = located.iter().map(|(c, _)| *c).collect();
    let assignment = form_groups(
        &candidates,
        sim.config().radio_range_m,
        sim.config().leader_threshold_mah(),
        round,
    );
    let estimate_of = |id: NodeId| {
        located
            .iter()
            .find(|(c, _)| c.id == id)
            .map(|(_, p)| *p)
            .unwrap_or_default()
    };
    let capacity = sim.config().aggregation_capacity;
    for group in &assignment.groups {
        if group.fallback {
            sim.metrics.leader_fallbacks += 1;
        }
        let mut collected = Vec::with_capacity(group.size());
        collected.push((group.leader, estimate_of(group.leader)));
        for &member in &group.members {
            let estimate = estimate_of(member);
            let arrived = sim.send_now(
                MessageKind::GroupReport,
                member,
                group.leader,
                round,
                Payload::Location {
                    target: member,
                    estimate,
                },
            );
            if arrived {
                collected.push((member, estimate));
            }
        }
        collected.sort_by_key(|(id, _)| *id);
        for packet in aggregate(&collected, capacity) {
            let count = packet.len() as u32;
            sim.send_to_sink(
                MessageKind::GlobalAggregate,
                group.leader,
                round,
                Payload::Locations(packet),
                count,
            );
        }
    }
    sim.metrics.groups.push(assignment);
}

/// Beacon exchange with every covering reference, then trilateration from the
/// beacons that arrived. Logs the outcome and returns the estimate.
fn self_localize(idx: usize, round: u32, sim: &mut Simulation) -> Option<Point> {
    let (id, truth) = (sim.targets[idx].id, sim.targets[idx].true_position);
    let covering = sim.targets[idx].covering_references.clone();
    let mut samples = Vec::with_capacity(covering.len());
    for reference in covering {
        let rss_dbm = sim.measure_rss(reference, truth);
        if sim.send_now(
            MessageKind::LocalExchange,
            reference,
            id,
            round,
            Payload::Beacon,
        ) {
            samples.push(RssSample { reference, rss_dbm });
        }
    }
    let estimate = estimate_from_rss(&samples, &sim.topology, &sim.channel).ok();
    sim.targets[idx].estimated_position = estimate;
    sim.metrics.record_localization(LocalizationRecord {
        round,
        target: id,
        error_m: estimate.map(|p| p.distance(truth)),
    });
    estimate
}
