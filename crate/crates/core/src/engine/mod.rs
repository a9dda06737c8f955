//! Discrete-event engine: schedules mobility ticks, reporting rounds and
//! per-hop packet transmissions, and charges every hop to the energy ledger.

mod delivery;
mod event;
mod message;
mod metrics;
mod routing;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::hash::Hasher;
use core::str::FromStr;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

pub use self::delivery::{deliver, forward_hop, Delivery, DropCause, HopOutcome, LossModel};
pub use self::event::Scheduler;
pub use self::message::{MessageKind, MessageRecord, Payload};
pub use self::metrics::{
    KindCounters, LocalizationRecord, MetricsCollector, MetricsReport, NodeEnergyReport,
    RoundMetrics, RunSummary,
};
pub use self::routing::route;

use crate::channel::ChannelParams;
use crate::config::{whole_rounds, SimConfig};
use crate::energy::{airtime_s, EnergyLedger, PacketCosts};
use crate::error::{SimError, TopologyError, UnknownStrategy};
use crate::geometry::Point;
use crate::localization::{estimate_from_rss, measure, RssSample};
use crate::mobility::{SpeedRange, TargetState};
use crate::protocols;
use crate::rng::{self, SimRng, Stream};
use crate::topology::{build_grid_topology, NetworkTopology, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Centralized,
    Decentralized,
    Improved,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Centralized,
        Strategy::Decentralized,
        Strategy::Improved,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            Strategy::Centralized => "centralized",
            Strategy::Decentralized => "decentralized",
            Strategy::Improved => "improved",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

#[derive(Debug)]
pub enum Event {
    MobilityTick(u32),
    ReportingRound(u32),
    PacketHop {
        message: Box<MessageRecord>,
        hop: usize,
    },
}

/// What the sink collected about one target in one centralized round.
#[derive(Debug, Clone, Default)]
pub(crate) struct SinkObservation {
    pub truth: Point,
    pub samples: Vec<RssSample>,
}

/// One single-threaded simulation instance.
pub struct Simulation {
    pub(crate) config: SimConfig,
    pub(crate) strategy: Strategy,
    pub(crate) topology: NetworkTopology,
    pub(crate) targets: Vec<TargetState>,
    pub(crate) ledger: EnergyLedger,
    pub(crate) metrics: MetricsCollector,
    pub(crate) channel: ChannelParams,
    pub(crate) channel_rng: SimRng,
    pub(crate) sink_observations: BTreeMap<(u32, NodeId), SinkObservation>,
    queue: Scheduler<Event>,
    mobility_rng: SimRng,
    loss: LossModel,
    speeds: SpeedRange,
    airtime_s: f64,
    digest: FnvHasher,
}

/// Builds the grid topology for `config` and runs `strategy` to completion.
pub fn run(config: &SimConfig, strategy: Strategy) -> Result<MetricsReport, SimError> {
    Ok(Simulation::new(config.clone(), strategy)?.run())
}

impl Simulation {
    pub fn new(config: SimConfig, strategy: Strategy) -> Result<Self, SimError> {
        config.validate()?;
        let topology = build_grid_topology(&config)?;
        Self::with_topology(config, topology, strategy)
    }

    /// Runs on a caller-supplied roster; target ids in `topology` become the
    /// mobile targets.
    pub fn with_topology(
        config: SimConfig,
        topology: NetworkTopology,
        strategy: Strategy,
    ) -> Result<Self, SimError> {
        config.validate()?;
        if topology.references().count() > 0
            && topology.unreachable_references() == topology.references().count()
        {
            return Err(TopologyError::SinkUnreachable.into());
        }
        let costs = PacketCosts::from_draws(
            config.tx_draw_ma,
            config.rx_draw_ma,
            config.packet_size_bytes,
            config.data_rate_bps,
        )?;
        let ledger = EnergyLedger::new(&topology, config.init_energy_mah, costs);
        let speeds = SpeedRange {
            min_mps: config.speed_min_mps,
            max_mps: config.speed_max_mps,
        };
        let bounds = config.bounds();
        let mut mobility_rng = rng::stream(config.seed, Stream::Mobility);
        let targets = topology
            .targets()
            .map(|id| {
                TargetState::spawn(
                    id,
                    topology.position(id),
                    &bounds,
                    &speeds,
                    &mut mobility_rng,
                )
            })
            .collect();
        Ok(Self {
            channel: config.channel(),
            channel_rng: rng::stream(config.seed, Stream::Channel),
            loss: LossModel::new(config.loss_rate, rng::stream(config.seed, Stream::Loss)),
            airtime_s: airtime_s(config.packet_size_bytes, config.data_rate_bps),
            config,
            strategy,
            topology,
            targets,
            ledger,
            metrics: MetricsCollector::new(),
            sink_observations: BTreeMap::new(),
            queue: Scheduler::new(),
            mobility_rng,
            speeds,
            digest: FnvHasher::default(),
        })
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn targets(&self) -> &[TargetState] {
        &self.targets
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    /// Empties a node's battery before the run, e.g. to inject a dead relay.
    pub fn drain_node(&mut self, id: NodeId) {
        self.ledger.drain(id);
    }

    pub fn run(mut self) -> MetricsReport {
        let rounds = self.config.rounds();
        let period = self.config.reporting_period_s;
        let tick = self.config.mobility_tick_s;
        let ticks = whole_rounds(self.config.duration_s, tick);
        if rounds >= 1 {
            self.queue.schedule(period, Event::ReportingRound(1));
        }
        if ticks >= 1 && !self.targets.is_empty() {
            self.queue.schedule(tick, Event::MobilityTick(1));
        }
        while let Some((now, event)) = self.queue.pop() {
            match event {
                Event::MobilityTick(j) => {
                    let bounds = self.config.bounds();
                    for t in &mut self.targets {
                        t.random_waypoint_step(tick, &bounds, &self.speeds, &mut self.mobility_rng);
                    }
                    if j < ticks {
                        self.queue
                            .schedule(f64::from(j + 1) * tick, Event::MobilityTick(j + 1));
                    }
                }
                Event::ReportingRound(k) => {
                    self.begin_round(k);
                    match self.strategy {
                        Strategy::Centralized => protocols::centralized_round(k, &mut self),
                        Strategy::Decentralized => protocols::decentralized_round(k, &mut self),
                        Strategy::Improved => protocols::improved_round(k, &mut self),
                    }
                    if k < rounds {
                        self.queue
                            .schedule(f64::from(k + 1) * period, Event::ReportingRound(k + 1));
                    }
                }
                Event::PacketHop { message, hop } => {
                    match forward_hop(
                        &message,
                        hop,
                        &mut self.ledger,
                        &mut self.metrics,
                        &mut self.loss,
                    ) {
                        HopOutcome::Forwarded => self.queue.schedule(
                            now + self.airtime_s,
                            Event::PacketHop {
                                message,
                                hop: hop + 1,
                            },
                        ),
                        HopOutcome::Arrived => self.on_arrival(&message),
                        HopOutcome::Dropped(_) => {}
                    }
                }
            }
        }
        self.finish_sink_estimates();
        let summary = RunSummary {
            strategy: self.strategy,
            seed: self.config.seed,
            rounds,
            round_period_s: period,
            unreachable_references: self.topology.unreachable_references(),
            trajectory_digest: self.digest.finish(),
        };
        self.metrics.finish(summary, &self.ledger)
    }

    fn begin_round(&mut self, round: u32) {
        self.metrics.open_round(round);
        self.topology
            .move_targets(self.targets.iter().map(|t| (t.id, t.true_position)));
        self.digest.write_u32(round);
        for t in &mut self.targets {
            self.digest.write_u32(t.id.0);
            self.digest.write_u64(t.true_position.x.to_bits());
            self.digest.write_u64(t.true_position.y.to_bits());
            t.covering_references = self.topology.covering_references(t.id);
            t.estimated_position = None;
            if self.topology.hops_to_sink(t.id).is_none() {
                self.metrics.unreachable_target_rounds += 1;
            }
        }
    }

    fn on_arrival(&mut self, message: &MessageRecord) {
        delivery::note_sink_arrival(message, &self.topology, &mut self.metrics);
        if let Payload::Rss {
            target,
            reference,
            rss_dbm,
        } = message.payload
        {
            if let Some(obs) = self.sink_observations.get_mut(&(message.round, target)) {
                obs.samples.push(RssSample { reference, rss_dbm });
            }
        }
    }

    fn finish_sink_estimates(&mut self) {
        let observations = core::mem::take(&mut self.sink_observations);
        for ((round, target), mut obs) in observations {
            obs.samples.sort_by_key(|s| s.reference);
            let error_m = estimate_from_rss(&obs.samples, &self.topology, &self.channel)
                .ok()
                .map(|p| p.distance(obs.truth));
            self.metrics.record_localization(LocalizationRecord {
                round,
                target,
                error_m,
            });
        }
    }

    /// RSS of `target` as measured at `reference`, drawn from the channel
    /// stream.
    pub(crate) fn measure_rss(&mut self, reference: NodeId, target: Point) -> f64 {
        let d = self.topology.position(reference).distance(target);
        measure(d, &self.channel, &mut self.channel_rng)
    }

    /// Routes a packet toward the sink; hops run as scheduled events.
    pub(crate) fn send_to_sink(
        &mut self,
        kind: MessageKind,
        src: NodeId,
        round: u32,
        payload: Payload,
        locations: u32,
    ) {
        self.metrics.record_sent(kind, round);
        let sink = self.topology.sink();
        let path = match route(src, sink, &self.topology) {
            Ok(path) => path,
            Err(_) => {
                self.metrics.routing_errors += 1;
                self.metrics.record_dropped(kind, round);
                return;
            }
        };
        let message = Box::new(MessageRecord {
            kind,
            src,
            dst: sink,
            hop_path: path,
            round,
            payload_locations: locations,
            payload,
        });
        if message.hops() == 0 {
            self.metrics.record_delivered(kind);
            self.on_arrival(&message);
        } else {
            let now = self.queue.now();
            self.queue
                .schedule(now, Event::PacketHop { message, hop: 0 });
        }
    }

    /// Delivers a packet immediately; returns whether it arrived.
    pub(crate) fn send_now(
        &mut self,
        kind: MessageKind,
        src: NodeId,
        dst: NodeId,
        round: u32,
        payload: Payload,
    ) -> bool {
        self.metrics.record_sent(kind, round);
        let Ok(hop_path) = route(src, dst, &self.topology) else {
            self.metrics.routing_errors += 1;
            self.metrics.record_dropped(kind, round);
            return false;
        };
        let message = MessageRecord {
            kind,
            src,
            dst,
            hop_path,
            round,
            payload_locations: u32::from(matches!(payload, Payload::Location { .. })),
            payload,
        };
        deliver(
            &message,
            &self.topology,
            &mut self.ledger,
            &mut self.metrics,
            &mut self.loss,
        ) == Delivery::Arrived
    }

    pub(crate) fn config(&self) -> &SimConfig {
        &self.config
    }
}
