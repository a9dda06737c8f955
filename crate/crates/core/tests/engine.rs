use std::collections::BTreeSet;

use proptest::prelude::*;
use wsntrack_core::analytics::{compare_sim_to_closed_form, AnalyticsInputs};
use wsntrack_core::energy::{EnergyLedger, PacketCosts};
use wsntrack_core::engine::{
    deliver, route, Delivery, DropCause, LossModel, MessageKind, MessageRecord, MetricsCollector,
    Payload,
};
use wsntrack_core::rng::{stream, Stream};
use wsntrack_core::scenarios::calibration_scenario;
use wsntrack_core::topology::{Node, NodeRole};
use wsntrack_core::{run, NetworkTopology, NodeId, Point, SimConfig, Simulation, Strategy};

fn short_config(seed: u64) -> SimConfig {
    SimConfig {
        duration_s: 60.0,
        reporting_period_s: 2.0,
        seed,
        ..SimConfig::default()
    }
}

fn line(n_refs: u32, spacing: f64) -> NetworkTopology {
    let mut nodes = vec![Node {
        id: NodeId(0),
        role: NodeRole::Sink,
        position: Point::new(0.0, 0.0),
    }];
    for i in 1..=n_refs {
        nodes.push(Node {
            id: NodeId(i),
            role: NodeRole::Reference,
            position: Point::new(spacing * f64::from(i), 0.0),
        });
    }
    NetworkTopology::from_nodes(nodes, spacing).unwrap()
}

fn costs() -> PacketCosts {
    PacketCosts::from_draws(44.0, 49.0, 127, 250_000.0).unwrap()
}

fn message(path: &[u32]) -> MessageRecord {
    let hop_path: Vec<NodeId> = path.iter().map(|&i| NodeId(i)).collect();
    MessageRecord {
        kind: MessageKind::Reading,
        src: hop_path[0],
        dst: *hop_path.last().unwrap(),
        hop_path,
        round: 1,
        payload_locations: 1,
        payload: Payload::Beacon,
    }
}

fn no_loss() -> LossModel {
    LossModel::new(0.0, stream(0, Stream::Loss))
}

#[test]
fn sixty_seconds_every_two_is_thirty_rounds() {
    let report = run(&short_config(1), Strategy::Decentralized).unwrap();
    assert_eq!(report.rounds_run, 30);
    assert_eq!(report.rounds.len(), 30);
    assert_eq!(report.rounds.last().unwrap().round, 30);
}

#[test]
fn run_shorter_than_period_is_empty() {
    let cfg = SimConfig {
        duration_s: 1.0,
        reporting_period_s: 2.0,
        ..SimConfig::default()
    };
    let report = run(&cfg, Strategy::Improved).unwrap();
    assert_eq!(report.rounds_run, 0);
    assert!(report.rounds.is_empty());
    assert_eq!(report.total_consumed_mah(), 0.0);
    assert!(report.localization.is_empty());
}

#[test]
fn identical_inputs_identical_reports() {
    for s in Strategy::ALL {
        let a = run(&short_config(5), s).unwrap();
        let b = run(&short_config(5), s).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn isolated_sink_is_fatal() {
    let cfg = SimConfig {
        radio_range_m: 1.0,
        sink_x_m: 5.0,
        sink_y_m: 5.0,
        ..short_config(1)
    };
    assert!(Simulation::new(cfg, Strategy::Centralized).is_err());
}

#[test]
fn one_hop_costs_one_tx_and_one_rx() {
    let topo = line(5, 10.0);
    let mut ledger = EnergyLedger::new(&topo, 27.0, costs());
    let mut metrics = MetricsCollector::new();
    let out = deliver(
        &message(&[1, 0]),
        &topo,
        &mut ledger,
        &mut metrics,
        &mut no_loss(),
    );
    assert_eq!(out, Delivery::Arrived);
    assert_eq!((ledger.total_tx(), ledger.total_rx()), (1, 1));
    let c = costs();
    assert!((ledger.total_consumed_mah() - (c.tx_mah + c.rx_mah)).abs() < 1e-18);
}

#[test]
fn five_hops_cost_five_packet_pairs() {
    let topo = line(5, 10.0);
    let path = route(NodeId(5), NodeId(0), &topo).unwrap();
    assert_eq!(path.len(), 6);
    let mut ledger = EnergyLedger::new(&topo, 27.0, costs());
    let mut metrics = MetricsCollector::new();
    let out = deliver(
        &message(&[5, 4, 3, 2, 1, 0]),
        &topo,
        &mut ledger,
        &mut metrics,
        &mut no_loss(),
    );
    assert_eq!(out, Delivery::Arrived);
    assert_eq!((ledger.total_tx(), ledger.total_rx()), (5, 5));
    let c = costs();
    let p1 = c.tx_mah + c.rx_mah;
    assert!(((ledger.total_consumed_mah() - 5.0 * p1) / (5.0 * p1)).abs() < 1e-12);
    assert_eq!(metrics.rounds().next().unwrap().sink_msgs, 1);
}

#[test]
fn self_delivery_is_free() {
    let topo = line(2, 10.0);
    let mut ledger = EnergyLedger::new(&topo, 27.0, costs());
    let mut metrics = MetricsCollector::new();
    let out = deliver(
        &message(&[0]),
        &topo,
        &mut ledger,
        &mut metrics,
        &mut no_loss(),
    );
    assert_eq!(out, Delivery::Arrived);
    assert_eq!(ledger.total_consumed_mah(), 0.0);
}

#[test]
fn dead_relay_drops_and_spares_downstream() {
    let topo = line(5, 10.0);
    let mut ledger = EnergyLedger::new(&topo, 27.0, costs());
    ledger.drain(NodeId(3));
    let mut metrics = MetricsCollector::new();
    let out = deliver(
        &message(&[5, 4, 3, 2, 1, 0]),
        &topo,
        &mut ledger,
        &mut metrics,
        &mut no_loss(),
    );
    assert_eq!(
        out,
        Delivery::Dropped {
            at_hop: 1,
            cause: DropCause::Depleted(NodeId(3))
        }
    );
    // Only the 5 -> 4 hop happened.
    assert_eq!(ledger.node(NodeId(5)).tx_count, 1);
    assert_eq!(ledger.node(NodeId(4)).rx_count, 1);
    assert_eq!(ledger.node(NodeId(4)).tx_count, 0);
    for id in [2, 1, 0] {
        assert_eq!(ledger.consumed_mah(NodeId(id)), 0.0);
    }
    assert!(ledger.node(NodeId(3)).depleted);
    assert_eq!(metrics.kind(MessageKind::Reading).dropped, 1);
}

#[test]
fn certain_loss_charges_only_the_sender() {
    let topo = line(2, 10.0);
    let mut ledger = EnergyLedger::new(&topo, 27.0, costs());
    let mut metrics = MetricsCollector::new();
    let mut loss = LossModel::new(1.0, stream(0, Stream::Loss));
    let out = deliver(
        &message(&[2, 1, 0]),
        &topo,
        &mut ledger,
        &mut metrics,
        &mut loss,
    );
    assert_eq!(
        out,
        Delivery::Dropped {
            at_hop: 0,
            cause: DropCause::Lost
        }
    );
    assert_eq!((ledger.total_tx(), ledger.total_rx()), (1, 0));
}

#[test]
fn run_conserves_energy() {
    for s in Strategy::ALL {
        let r = run(&short_config(3), s).unwrap();
        let tx: u64 = r.energy.iter().map(|e| e.tx_count).sum();
        let rx: u64 = r.energy.iter().map(|e| e.rx_count).sum();
        // Drop-free, lossless: every hop charges one tx and one rx.
        assert_eq!(r.total_drops(), 0);
        assert_eq!(tx, rx);
        let expected = tx as f64 * r.costs.tx_mah + rx as f64 * r.costs.rx_mah;
        assert!(((r.total_consumed_mah() - expected) / expected).abs() < 1e-12);
        let by_round: f64 = r.rounds.iter().map(|m| m.energy_consumed_mah).sum();
        assert!(((by_round - expected) / expected).abs() < 1e-9);
        for e in &r.energy {
            assert!(e.remaining_mah >= 0.0);
            assert!(
                ((e.consumed_mah + e.remaining_mah) - r.init_energy_mah).abs() < 1e-9
                    || e.role == NodeRole::Sink
            );
        }
    }
}

#[test]
fn consumption_never_decreases_with_time() {
    // A shorter run is a prefix of a longer one with the same seed.
    let mut previous: Option<Vec<f64>> = None;
    for duration in [10.0, 20.0, 40.0, 80.0] {
        let cfg = SimConfig {
            duration_s: duration,
            ..short_config(9)
        };
        let r = run(&cfg, Strategy::Improved).unwrap();
        let consumed: Vec<f64> = r.energy.iter().map(|e| e.consumed_mah).collect();
        if let Some(prev) = &previous {
            for (a, b) in prev.iter().zip(&consumed) {
                assert!(b >= a);
            }
        }
        previous = Some(consumed);
    }
}

#[test]
fn calibration_matches_closed_form() {
    let (cfg, topo) = calibration_scenario(&[6, 3, 1], 4);
    let inputs = AnalyticsInputs {
        r: 3.0,
        m: 10.0,
        l: cfg.duration_s,
        f: cfg.reporting_period_s,
        capacity: cfg.aggregation_capacity as u32,
        ..AnalyticsInputs::default()
    };
    for s in Strategy::ALL {
        let r = Simulation::with_topology(cfg.clone(), topo.clone(), s)
            .unwrap()
            .run();
        let d = compare_sim_to_closed_form(&r, &inputs).unwrap();
        assert!(d.is_zero(), "{s}: {d:?}");
        assert_eq!(r.total_drops(), 0);
    }
    let imp = Simulation::with_topology(cfg, topo, Strategy::Improved)
        .unwrap()
        .run();
    // Groups of 6, 3, 1: ceil(6/5) + 1 + 1 aggregates and 5 + 2 + 0 reports per round.
    assert_eq!(imp.total_sink_msgs(), 4 * 180);
    assert_eq!(imp.kind(MessageKind::GroupReport).sent, 7 * 180);
}

#[test]
fn dead_relay_shows_up_as_attributed_shortfall() {
    let (cfg, topo) = calibration_scenario(&[6, 3, 1], 4);
    let inputs = AnalyticsInputs {
        r: 3.0,
        m: 10.0,
        l: cfg.duration_s,
        f: cfg.reporting_period_s,
        ..AnalyticsInputs::default()
    };
    let mut sim = Simulation::with_topology(cfg, topo, Strategy::Centralized).unwrap();
    // Backbone reference next to the sink: every reading passes through it.
    sim.drain_node(NodeId(1));
    let r = sim.run();
    let d = compare_sim_to_closed_form(&r, &inputs).unwrap();
    assert!(d.sink < 0);
    assert!(d.attributed_to_drops(), "{d:?}");
}

#[test]
fn empty_run_has_zero_deltas() {
    let cfg = SimConfig {
        num_targets: 0,
        duration_s: 1.0,
        ..SimConfig::default()
    };
    let inputs = AnalyticsInputs {
        m: 0.0,
        l: 1.0,
        ..AnalyticsInputs::default()
    };
    for s in Strategy::ALL {
        let r = run(&cfg, s).unwrap();
        assert!(compare_sim_to_closed_form(&r, &inputs).unwrap().is_zero());
    }
}

#[test]
fn sink_bound_counts_ordered_every_round() {
    for seed in 1..=3 {
        let runs: Vec<_> = Strategy::ALL
            .iter()
            .map(|&s| run(&short_config(seed), s).unwrap())
            .collect();
        assert_eq!(runs[0].trajectory_digest, runs[1].trajectory_digest);
        assert_eq!(runs[1].trajectory_digest, runs[2].trajectory_digest);
        for k in 0..30 {
            let c = runs[0].rounds[k].sink_msgs;
            let d = runs[1].rounds[k].sink_msgs;
            let i = runs[2].rounds[k].sink_msgs;
            assert!(c >= d && d >= i, "seed {seed} round {k}: {c} {d} {i}");
        }
        assert_eq!(runs[0].target_to_target_msgs(), 0);
        assert_eq!(runs[1].target_to_target_msgs(), 0);
        assert!(runs[2].target_to_target_msgs() > 0);
    }
}

#[test]
fn uncovered_target_fails_without_reporting() {
    // Two references only: localization can never succeed.
    let nodes = vec![
        Node {
            id: NodeId(0),
            role: NodeRole::Sink,
            position: Point::new(0.0, 0.0),
        },
        Node {
            id: NodeId(1),
            role: NodeRole::Reference,
            position: Point::new(10.0, 0.0),
        },
        Node {
            id: NodeId(2),
            role: NodeRole::Reference,
            position: Point::new(0.0, 10.0),
        },
        Node {
            id: NodeId(3),
            role: NodeRole::Target,
            position: Point::new(5.0, 5.0),
        },
    ];
    let topo = NetworkTopology::from_nodes(nodes, 16.0).unwrap();
    let cfg = SimConfig {
        duration_s: 2.0,
        speed_min_mps: 0.0,
        speed_max_mps: 0.0,
        ..SimConfig::default()
    };
    let r = Simulation::with_topology(cfg, topo, Strategy::Decentralized)
        .unwrap()
        .run();
    assert_eq!(r.kind(MessageKind::LocationReport).sent, 0);
    assert_eq!(r.kind(MessageKind::LocalExchange).sent, 2);
    assert_eq!(r.localization_failures, 1);
    assert_eq!(r.localization[0].error_m, None);
}

#[test]
fn noisy_localization_error_is_logged() {
    let cfg = SimConfig {
        noise_sigma_db: 2.0,
        duration_s: 200.0,
        ..short_config(2)
    };
    let r = run(&cfg, Strategy::Decentralized).unwrap();
    assert_eq!(r.rounds_run, 100);
    let median = r.median_localization_error().unwrap();
    assert!(median.is_finite() && median > 0.0);
    let noiseless = run(&short_config(2), Strategy::Decentralized).unwrap();
    for rec in &noiseless.localization {
        assert!(rec.error_m.unwrap() < 1e-6);
    }
}

#[test]
fn extrapolated_lifetime_matches_run_to_depletion() {
    let nodes = vec![
        Node {
            id: NodeId(0),
            role: NodeRole::Sink,
            position: Point::new(0.0, 0.0),
        },
        Node {
            id: NodeId(1),
            role: NodeRole::Reference,
            position: Point::new(10.0, 0.0),
        },
        Node {
            id: NodeId(2),
            role: NodeRole::Reference,
            position: Point::new(0.0, 10.0),
        },
        Node {
            id: NodeId(3),
            role: NodeRole::Reference,
            position: Point::new(10.0, 10.0),
        },
        Node {
            id: NodeId(4),
            role: NodeRole::Target,
            position: Point::new(6.0, 6.0),
        },
    ];
    let topo = NetworkTopology::from_nodes(nodes, 12.0).unwrap();
    let base = SimConfig {
        init_energy_mah: 0.0155,
        speed_min_mps: 0.0,
        speed_max_mps: 0.0,
        ..SimConfig::default()
    };
    let short = SimConfig {
        duration_s: 60.0,
        ..base.clone()
    };
    let r = Simulation::with_topology(short, topo.clone(), Strategy::Centralized)
        .unwrap()
        .run();
    let relay = r.energy.iter().find(|e| e.node_id == NodeId(1)).unwrap();
    assert!(relay.depleted_at_round.is_none());
    let predicted_rounds = relay.est_lifetime_s / r.round_period_s;

    let long = SimConfig {
        duration_s: 2000.0,
        ..base
    };
    let r = Simulation::with_topology(long, topo, Strategy::Centralized)
        .unwrap()
        .run();
    let relay = r.energy.iter().find(|e| e.node_id == NodeId(1)).unwrap();
    let died = f64::from(relay.depleted_at_round.expect("relay runs dry"));
    assert!(
        (died - predicted_rounds).abs() <= 1.0,
        "{died} vs {predicted_rounds}"
    );
}

/// Lexicographically smallest among all shortest relay paths, by enumeration.
fn enumerated_route(topo: &NetworkTopology, src: NodeId, dst: NodeId) -> Option<Vec<NodeId>> {
    fn walk(
        topo: &NetworkTopology,
        path: &mut Vec<NodeId>,
        dst: NodeId,
        found: &mut Vec<Vec<NodeId>>,
    ) {
        let at = *path.last().unwrap();
        if at == dst {
            found.push(path.clone());
            return;
        }
        if path.len() > 1 && !topo.role(at).relays() {
            return;
        }
        for &n in topo.neighbors(at) {
            if !path.contains(&n) {
                path.push(n);
                walk(topo, path, dst, found);
                path.pop();
            }
        }
    }
    let mut found = Vec::new();
    walk(topo, &mut vec![src], dst, &mut found);
    let shortest = found.iter().map(Vec::len).min()?;
    found.into_iter().filter(|p| p.len() == shortest).min()
}

proptest! {
    #[test]
    fn route_is_smallest_shortest_path(
        pts in prop::collection::vec((0.0f64..30.0, 0.0f64..30.0, 0u8..5), 2..=8),
        range in 6.0f64..16.0,
    ) {
        let nodes: Vec<Node> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y, r))| Node {
                id: NodeId(i as u32),
                role: match (i, r) {
                    (0, _) => NodeRole::Sink,
                    (_, 0) => NodeRole::Target,
                    _ => NodeRole::Reference,
                },
                position: Point::new(x, y),
            })
            .collect();
        let topo = NetworkTopology::from_nodes(nodes, range).unwrap();
        for src in topo.nodes().iter().map(|n| n.id) {
            let expected = if src == topo.sink() {
                Some(vec![src])
            } else {
                enumerated_route(&topo, src, topo.sink())
            };
            prop_assert_eq!(route(src, topo.sink(), &topo).ok(), expected);
        }
    }
}

#[test]
fn groups_partition_localized_targets_each_round() {
    let r = run(&short_config(8), Strategy::Improved).unwrap();
    assert_eq!(r.groups.len(), 30);
    for a in &r.groups {
        let located: BTreeSet<NodeId> = r
            .localization
            .iter()
            .filter(|rec| rec.round == a.round && rec.error_m.is_some())
            .map(|rec| rec.target)
            .collect();
        let mut grouped = BTreeSet::new();
        for g in &a.groups {
            assert!(grouped.insert(g.leader));
            for m in &g.members {
                assert!(grouped.insert(*m));
            }
        }
        assert_eq!(grouped, located);
    }
}
