//! Hand-built layouts with known coverage, used to check the simulator
//! against the closed-form counts.

use alloc::vec::Vec;

use crate::config::SimConfig;
use crate::geometry::Point;
use crate::topology::{NetworkTopology, Node, NodeId, NodeRole};

const CLUSTER_PITCH_M: f64 = 30.0;
const CALIBRATION_RANGE_M: f64 = 13.0;

/// A backbone line of references with one target cluster every 30 m.
///
/// Each cluster sits between two backbone references with a third
/// reference above it, so every target is covered by exactly those three
/// non-collinear references and by no other. Clusters are farther apart than
/// the radio range, so with static targets the improved strategy forms one
/// group per cluster. Targets are static and the channel is noiseless.
pub fn calibration_scenario(cluster_sizes: &[usize], seed: u64) -> (SimConfig, NetworkTopology) {
    let clusters = cluster_sizes.len().max(1);
    let width = CLUSTER_PITCH_M * clusters as f64;
    let mut nodes = Vec::new();
    let mut push = |role: NodeRole, x: f64, y: f64| {
        let id = NodeId(nodes.len() as u32);
        nodes.push(Node {
            id,
            role,
            position: Point::new(x, y),
        });
    };
    push(NodeRole::Sink, 0.0, 0.0);
    let backbone = 3 * (clusters - 1) + 2;
    for i in 1..=backbone {
        push(NodeRole::Reference, 10.0 * i as f64, 0.0);
    }
    for k in 0..cluster_sizes.len() {
        push(NodeRole::Reference, CLUSTER_PITCH_M * k as f64 + 15.0, 11.0);
    }
    for (k, &size) in cluster_sizes.iter().enumerate() {
        let center = Point::new(CLUSTER_PITCH_M * k as f64 + 15.0, 5.0);
        for j in 0..size {
            // Spread on a circle of radius 0.8 m around the cluster center.
            let angle = core::f64::consts::TAU * j as f64 / size.max(1) as f64;
            let (dx, dy) = if size == 1 {
                (0.0, 0.0)
            } else {
                (0.8 * libm::cos(angle), 0.8 * libm::sin(angle))
            };
            push(NodeRole::Target, center.x + dx, center.y + dy);
        }
    }
    let references = backbone + cluster_sizes.len();
    let targets: usize = cluster_sizes.iter().sum();
    let config = SimConfig {
        grid_width_m: width,
        grid_height_m: 20.0,
        num_references: references,
        num_targets: targets,
        radio_range_m: CALIBRATION_RANGE_M,
        noise_sigma_db: 0.0,
        speed_min_mps: 0.0,
        speed_max_mps: 0.0,
        seed,
        ..SimConfig::default()
    };
    let topology = NetworkTopology::from_nodes(nodes, CALIBRATION_RANGE_M)
        .expect("calibration roster is well formed");
    (config, topology)
}
