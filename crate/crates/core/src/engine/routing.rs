//! Static shortest-path routing over the sink/reference backbone.

use alloc::vec::Vec;

use crate::error::RoutingError;
use crate::topology::{bfs_hops, NetworkTopology, NodeId};

/// Shortest hop path from `src` to `dst`, both endpoints included. Among
/// equal-length paths the one whose first differing hop has the lower id
/// wins. Only the sink and reference nodes appear in the interior.
pub fn route(
    src: NodeId,
    dst: NodeId,
    topology: &NetworkTopology,
) -> Result<Vec<NodeId>, RoutingError> {
    for id in [src, dst] {
        if topology.node(id).is_none() {
            return Err(RoutingError::UnknownNode(id));
        }
    }
    if src == dst {
        return Ok(alloc::vec![src]);
    }
    if topology.are_adjacent(src, dst) {
        return Ok(alloc::vec![src, dst]);
    }
    let from_dst;
    let hops: &[Option<u32>] = if dst == topology.sink() {
        topology.hop_table()
    } else {
        from_dst = bfs_hops(topology, dst);
        &from_dst
    };
    let disconnected = RoutingError::Disconnected { src, dst };
    let mut h = hops[src.index()].ok_or_else(|| disconnected.clone())?;
    let mut path = Vec::with_capacity(h as usize + 1);
    let mut at = src;
    path.push(at);
    while at != dst {
        at = topology
            .neighbors(at)
            .iter()
            .copied()
            .find(|&n| hops[n.index()] == Some(h - 1) && (n == dst || topology.role(n).relays()))
            .ok_or_else(|| disconnected.clone())?;
        h -= 1;
        path.push(at);
    }
    Ok(path)
}
