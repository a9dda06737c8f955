//! Random-waypoint motion for mobile targets.

use alloc::vec::Vec;

use rand::Rng;

use crate::geometry::{Bounds, Point};
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedRange {
    pub min_mps: f64,
    pub max_mps: f64,
}

impl SpeedRange {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.max_mps > self.min_mps {
            rng.random_range(self.min_mps..=self.max_mps)
        } else {
            self.min_mps
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    pub id: NodeId,
    pub true_position: Point,
    pub waypoint: Point,
    pub speed: f64,
    pub estimated_position: Option<Point>,
    /// References in radio range at the latest round, sorted by id.
    pub covering_references: Vec<NodeId>,
}

impl TargetState {
    /// A target at `position` with a freshly drawn waypoint and speed.
    pub fn spawn<R: Rng + ?Sized>(
        id: NodeId,
        position: Point,
        bounds: &Bounds,
        speeds: &SpeedRange,
        rng: &mut R,
    ) -> Self {
        let waypoint = random_point(bounds, rng);
        let speed = speeds.draw(rng);
        Self {
            id,
            true_position: position,
            waypoint,
            speed,
            estimated_position: None,
            covering_references: Vec::new(),
        }
    }

    /// Advances the target by `dt` seconds toward its waypoint. On arrival it
    /// stops there and draws the next waypoint and speed; the remainder of the
    /// step is not carried over.
    pub fn random_waypoint_step<R: Rng + ?Sized>(
        &mut self,
        dt: f64,
        bounds: &Bounds,
        speeds: &SpeedRange,
        rng: &mut R,
    ) {
        debug_assert!(dt > 0.0);
        let travel = self.speed * dt;
        if travel <= 0.0 {
            return;
        }
        let remaining = self.true_position.distance(self.waypoint);
        if travel >= remaining {
            self.true_position = self.waypoint;
            self.waypoint = random_point(bounds, rng);
            self.speed = speeds.draw(rng);
        } else {
            let t = travel / remaining;
            let p = self.true_position;
            let next = Point::new(
                p.x + (self.waypoint.x - p.x) * t,
                p.y + (self.waypoint.y - p.y) * t,
            );
            self.true_position = bounds.clamp(next);
        }
    }
}

fn random_point<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Point {
    Point::new(
        rng.random_range(0.0..=bounds.width),
        rng.random_range(0.0..=bounds.height),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use proptest::prelude::*;

    const FIELD: Bounds = Bounds {
        width: 75.0,
        height: 65.0,
    };
    const SPEEDS: SpeedRange = SpeedRange {
        min_mps: 0.5,
        max_mps: 1.5,
    };

    fn target_at(p: Point, waypoint: Point, speed: f64) -> TargetState {
        TargetState {
            id: NodeId(1),
            true_position: p,
            waypoint,
            speed,
            estimated_position: None,
            covering_references: Vec::new(),
        }
    }

    #[test]
    fn stationary_target_stays_put() {
        let mut rng = stream(1, Stream::Mobility);
        let mut t = target_at(Point::new(4.0, 5.0), Point::new(10.0, 10.0), 0.0);
        t.random_waypoint_step(1.0, &FIELD, &SPEEDS, &mut rng);
        assert_eq!(t.true_position, Point::new(4.0, 5.0));
    }

    #[test]
    fn moves_speed_times_dt_toward_waypoint() {
        let mut rng = stream(1, Stream::Mobility);
        let mut t = target_at(Point::new(0.0, 0.0), Point::new(10.0, 0.0), 2.0);
        t.random_waypoint_step(1.0, &FIELD, &SPEEDS, &mut rng);
        assert_eq!(t.true_position, Point::new(2.0, 0.0));
    }

    #[test]
    fn arrival_draws_new_leg() {
        let mut rng = stream(1, Stream::Mobility);
        let mut t = target_at(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 2.0);
        t.random_waypoint_step(1.0, &FIELD, &SPEEDS, &mut rng);
        assert_eq!(t.true_position, Point::new(1.0, 0.0));
        assert!((0.5..=1.5).contains(&t.speed));
        assert!(FIELD.contains(t.waypoint));
    }

    fn trajectory(seed: u64) -> Vec<Point> {
        let mut rng = stream(seed, Stream::Mobility);
        let mut t =
            TargetState::spawn(NodeId(3), Point::new(10.0, 10.0), &FIELD, &SPEEDS, &mut rng);
        (0..200)
            .map(|_| {
                t.random_waypoint_step(1.0, &FIELD, &SPEEDS, &mut rng);
                t.true_position
            })
            .collect()
    }

    #[test]
    fn same_seed_same_trajectory() {
        assert_eq!(trajectory(11), trajectory(11));
        assert_ne!(trajectory(11), trajectory(12));
    }

    proptest! {
        #[test]
        fn never_leaves_field(seed in any::<u64>(), dt in 0.05f64..5.0) {
            let mut rng = stream(seed, Stream::Mobility);
            let fast = SpeedRange { min_mps: 0.0, max_mps: 20.0 };
            let mut t = TargetState::spawn(NodeId(1), Point::new(37.0, 30.0), &FIELD, &fast, &mut rng);
            for _ in 0..300 {
                t.random_waypoint_step(dt, &FIELD, &fast, &mut rng);
                prop_assert!(FIELD.contains(t.true_position));
            }
        }
    }
}
