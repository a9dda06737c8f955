//! RSS-based self-localization by linear least-squares multilateration.
//!
//! Subtracting the first reference's range equation from every other one
//! turns the circle intersection into a linear system `A p = b`, solved in
//! the least-squares sense over all covering references.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{distance_from_rss, in_range, rss_at_distance, ChannelParams};
use crate::error::LocalizationError;
use crate::geometry::Point;
use crate::mobility::TargetState;
use crate::topology::{NetworkTopology, NodeId};

/// Smallest admissible singular value of the linearized system.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// One RSS observation of a target by a reference node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RssSample {
    pub reference: NodeId,
    pub rss_dbm: f64,
}

/// `(A, b, origin)` with rows expressed relative to `origin`.
pub type LinearSystem = (Vec<[f64; 2]>, Vec<f64>, Point);

/// Rows of the linearized system, expressed relative to the first reference.
pub fn linearized_system(
    refs: &[Point],
    distances: &[f64],
) -> Result<LinearSystem, LocalizationError> {
    if refs.len() != distances.len() {
        return Err(LocalizationError::LengthMismatch);
    }
    if refs.len() < 3 {
        return Err(LocalizationError::InsufficientCoverage(refs.len()));
    }
    let origin = refs[0];
    let d0 = distances[0];
    let mut a = Vec::with_capacity(refs.len() - 1);
    let mut b = Vec::with_capacity(refs.len() - 1);
    for (r, &d) in refs.iter().zip(distances).skip(1) {
        let (x, y) = (r.x - origin.x, r.y - origin.y);
        a.push([2.0 * x, 2.0 * y]);
        b.push(d0 * d0 - d * d + x * x + y * y);
    }
    Ok((a, b, origin))
}

/// Least-squares position from at least three reference positions and their
/// measured distances.
pub fn trilaterate(refs: &[Point], distances: &[f64]) -> Result<Point, LocalizationError> {
    let (a, b, origin) = linearized_system(refs, distances)?;

    // Normal equations: (A^T A) p = A^T b.
    let (mut sxx, mut sxy, mut syy, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (row, &rhs) in a.iter().zip(&b) {
        sxx += row[0] * row[0];
        sxy += row[0] * row[1];
        syy += row[1] * row[1];
        bx += row[0] * rhs;
        by += row[1] * rhs;
    }
    // Singular values of A are the square roots of the eigenvalues of A^T A.
    let trace = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let disc = libm::sqrt(((sxx - syy) * (sxx - syy) + 4.0 * sxy * sxy).max(0.0));
    let lambda_min = ((trace - disc) / 2.0).max(0.0);
    let sigma_min = libm::sqrt(lambda_min);
    if sigma_min < DEGENERACY_TOLERANCE || det == 0.0 {
        return Err(LocalizationError::DegenerateGeometry(sigma_min));
    }
    let x = (syy * bx - sxy * by) / det;
    let y = (sxx * by - sxy * bx) / det;
    Ok(Point::new(origin.x + x, origin.y + y))
}

/// References whose radio disk contains `position`, sorted by id.
pub fn covering_references(
    topology: &NetworkTopology,
    position: Point,
    channel: &ChannelParams,
) -> Vec<NodeId> {
    topology
        .references()
        .filter(|&r| in_range(topology.position(r), position, channel))
        .collect()
}

/// RSS seen from each reference; noise is drawn from `rng` only when the
/// channel has a non-zero sigma.
pub fn sample_rss<R: Rng + ?Sized>(
    target: Point,
    references: &[NodeId],
    topology: &NetworkTopology,
    channel: &ChannelParams,
    rng: &mut R,
) -> Vec<RssSample> {
    references
        .iter()
        .map(|&r| RssSample {
            reference: r,
            rss_dbm: measure(topology.position(r).distance(target), channel, rng),
        })
        .collect()
}

/// A single RSS reading at distance `d`. Zero distance (target on top of a
/// reference) reads as the reference-distance power.
pub fn measure<R: Rng + ?Sized>(d: f64, channel: &ChannelParams, rng: &mut R) -> f64 {
    let noise = (channel.noise_sigma_db > 0.0).then(|| rng.sample::<f64, _>(StandardNormal));
    let d = d.max(f64::MIN_POSITIVE);
    match rss_at_distance(d, channel, noise) {
        Ok(rss) => rss,
        Err(_) => channel.rss_ref_dbm,
    }
}

/// Inverts each sample to a distance and trilaterates.
pub fn estimate_from_rss(
    samples: &[RssSample],
    topology: &NetworkTopology,
    channel: &ChannelParams,
) -> Result<Point, LocalizationError> {
    let refs: Vec<Point> = samples
        .iter()
        .map(|s| topology.position(s.reference))
        .collect();
    let dists: Vec<f64> = samples
        .iter()
        .map(|s| distance_from_rss(s.rss_dbm, channel))
        .collect();
    trilaterate(&refs, &dists)
}

/// Full self-localization of one target against every covering reference.
/// Updates `covering_references` and, on success, `estimated_position`.
pub fn localize_target<R: Rng + ?Sized>(
    target: &mut TargetState,
    topology: &NetworkTopology,
    channel: &ChannelParams,
    rng: &mut R,
) -> Result<Point, LocalizationError> {
    target.covering_references = covering_references(topology, target.true_position, channel);
    target.estimated_position = None;
    if target.covering_references.len() < 3 {
        return Err(LocalizationError::InsufficientCoverage(
            target.covering_references.len(),
        ));
    }
    let samples = sample_rss(
        target.true_position,
        &target.covering_references,
        topology,
        channel,
        rng,
    );
    let estimate = estimate_from_rss(&samples, topology, channel)?;
    target.estimated_position = Some(estimate);
    Ok(estimate)
}
