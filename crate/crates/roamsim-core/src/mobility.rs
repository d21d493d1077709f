//! Mobile-node movement and association transitions.
//!
//! Movement follows a seeded random-waypoint model: walk toward the current
//! waypoint at the drawn speed, pause on arrival, then draw a fresh uniform
//! waypoint and speed. Association changes are positional: a node sticks to
//! its AP until it leaves the radio range, then re-associates to the nearest
//! covering AP or drops off the network.

use rand::Rng;

use crate::geom::{Point, WorldBounds};
use crate::ids::{ApId, MnId};
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobilityModel {
    RandomWaypoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityConfig {
    pub model: MobilityModel,
    /// Uniform speed range in m/s, 0 <= min <= max.
    pub speed_min: f64,
    pub speed_max: f64,
    /// Pause at each waypoint, seconds.
    pub pause_time: f64,
    /// Step length, seconds. Must be > 0.
    pub tick: f64,
    pub seed: u64,
}

impl Default for MobilityConfig {
    /// Pedestrian walking speeds on 100 ms ticks.
    fn default() -> Self {
        MobilityConfig {
            model: MobilityModel::RandomWaypoint,
            speed_min: 0.5,
            speed_max: 1.5,
            pause_time: 0.0,
            tick: 0.1,
            seed: 0,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.speed_min >= 0.0 && self.speed_min <= self.speed_max) {
            return Err("speed range must satisfy 0 <= min <= max");
        }
        if self.tick.is_nan() || self.tick <= 0.0 {
            return Err("tick must be > 0");
        }
        if self.pause_time < 0.0 {
            return Err("pause time must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobileNode {
    pub id: MnId,
    pub position: Point,
    pub speed: f64,
    pub waypoint: Point,
    pub associated_ap: Option<ApId>,
    /// Seconds left at the current waypoint before a new one is drawn.
    pub pause_remaining: f64,
}

impl MobileNode {
    /// A freshly spawned node rests at its spawn point; the first step draws
    /// its first waypoint and speed.
    pub fn spawn(id: MnId, position: Point) -> Self {
        MobileNode {
            id,
            position,
            speed: 0.0,
            waypoint: position,
            associated_ap: None,
            pause_remaining: 0.0,
        }
    }
}

/// Advances one node by one tick of random-waypoint motion.
///
/// Waypoints are interior to the world and motion runs along straight
/// segments between them, so the position never leaves the bounds.
pub fn step<R: Rng + ?Sized>(
    mn: &mut MobileNode,
    cfg: &MobilityConfig,
    world: &WorldBounds,
    rng: &mut R,
) {
    if mn.pause_remaining > 0.0 {
        mn.pause_remaining = (mn.pause_remaining - cfg.tick).max(0.0);
        return;
    }
    if mn.position == mn.waypoint {
        mn.waypoint = world.sample_point(rng);
        mn.speed = if cfg.speed_max > cfg.speed_min {
            rng.gen_range(cfg.speed_min..=cfg.speed_max)
        } else {
            cfg.speed_min
        };
    }
    let dist = mn.position.distance(mn.waypoint);
    let step_len = mn.speed * cfg.tick;
    if dist <= 0.0 {
        return;
    }
    if step_len >= dist {
        mn.position = mn.waypoint;
        mn.pause_remaining = cfg.pause_time;
    } else if step_len > 0.0 {
        let f = step_len / dist;
        mn.position = Point::new(
            mn.position.x + (mn.waypoint.x - mn.position.x) * f,
            mn.position.y + (mn.waypoint.y - mn.position.y) * f,
        );
    }
}

/// Association change implied by a node's current position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transition {
    None,
    Associate { ap: ApId },
    Reassociate { old: ApId, new: ApId },
    Disassociate { old: ApId },
}

/// Decides the transition for a node without applying it.
///
/// Association is sticky: while the current AP still covers the node no
/// handoff happens, even if a closer AP is in range. Leaving coverage
/// re-associates to the nearest covering AP (lowest id on ties) or
/// disassociates when nothing covers the node.
pub fn classify_transition(mn: &MobileNode, t: &Topology) -> Transition {
    match &mn.associated_ap {
        Some(current) => {
            if let Some(ap) = t.get(current) {
                if ap.covers(mn.position) {
                    return Transition::None;
                }
            }
            match t.nearest_covering(mn.position) {
                Some(new_ap) => Transition::Reassociate {
                    old: current.clone(),
                    new: new_ap.id.clone(),
                },
                None => Transition::Disassociate {
                    old: current.clone(),
                },
            }
        }
        None => match t.nearest_covering(mn.position) {
            Some(ap) => Transition::Associate { ap: ap.id.clone() },
            None => Transition::None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::topology::AccessPoint;

    fn cfg(seed: u64) -> MobilityConfig {
        MobilityConfig {
            model: MobilityModel::RandomWaypoint,
            speed_min: 1.0,
            speed_max: 3.0,
            pause_time: 0.0,
            tick: 1.0,
            seed,
        }
    }

    #[test]
    fn zero_speed_never_moves() {
        let world = WorldBounds::new(100.0, 100.0);
        let mut mn = MobileNode::spawn(MnId(0), Point::new(5.0, 5.0));
        mn.waypoint = Point::new(90.0, 90.0);
        mn.speed = 0.0;
        let c = MobilityConfig {
            speed_min: 0.0,
            speed_max: 0.0,
            ..cfg(1)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            step(&mut mn, &c, &world, &mut rng);
        }
        assert_eq!(mn.position, Point::new(5.0, 5.0));
    }

    #[test]
    fn moves_linearly_toward_waypoint() {
        let world = WorldBounds::new(100.0, 100.0);
        let mut mn = MobileNode::spawn(MnId(0), Point::new(0.0, 0.0));
        mn.waypoint = Point::new(10.0, 0.0);
        mn.speed = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        step(&mut mn, &cfg(1), &world, &mut rng);
        assert_eq!(mn.position, Point::new(1.0, 0.0));
    }

    #[test]
    fn arrival_snaps_to_waypoint_and_pauses() {
        let world = WorldBounds::new(100.0, 100.0);
        let mut mn = MobileNode::spawn(MnId(0), Point::new(0.0, 0.0));
        mn.waypoint = Point::new(2.0, 0.0);
        mn.speed = 5.0;
        let c = MobilityConfig {
            pause_time: 3.0,
            ..cfg(1)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        step(&mut mn, &c, &world, &mut rng);
        assert_eq!(mn.position, Point::new(2.0, 0.0));
        assert_eq!(mn.pause_remaining, 3.0);
        // paused: two ticks pass without movement
        step(&mut mn, &c, &world, &mut rng);
        step(&mut mn, &c, &world, &mut rng);
        assert_eq!(mn.position, Point::new(2.0, 0.0));
        step(&mut mn, &c, &world, &mut rng); // pause hits zero
        assert_eq!(mn.pause_remaining, 0.0);
    }

    #[test]
    fn trajectories_are_deterministic_for_a_seed() {
        let world = WorldBounds::new(500.0, 500.0);
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut mn = MobileNode::spawn(MnId(0), Point::new(250.0, 250.0));
            let mut path = vec![];
            for _ in 0..1000 {
                step(&mut mn, &cfg(seed), &world, &mut rng);
                path.push((mn.position.x, mn.position.y));
            }
            path
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn positions_stay_inside_world() {
        let world = WorldBounds::new(80.0, 60.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut mn = MobileNode::spawn(MnId(0), Point::new(40.0, 30.0));
        let c = MobilityConfig {
            speed_max: 25.0,
            ..cfg(9)
        };
        for _ in 0..5000 {
            step(&mut mn, &c, &world, &mut rng);
            assert!(world.contains(mn.position), "{:?}", mn.position);
        }
    }

    fn two_island_topology() -> Topology {
        Topology::new(
            vec![
                AccessPoint::new("A", Point::new(0.0, 0.0), 50.0),
                AccessPoint::new("B", Point::new(200.0, 0.0), 50.0),
            ],
            WorldBounds::new(400.0, 400.0),
        )
        .unwrap()
    }

    #[test]
    fn unassociated_outside_all_radii_is_none() {
        let t = two_island_topology();
        let mn = MobileNode::spawn(MnId(0), Point::new(100.0, 100.0));
        assert_eq!(classify_transition(&mn, &t), Transition::None);
    }

    #[test]
    fn sticky_association_suppresses_handoff_inside_current_range() {
        let t = Topology::new(
            vec![
                AccessPoint::new("A", Point::new(0.0, 0.0), 100.0),
                AccessPoint::new("B", Point::new(150.0, 0.0), 100.0),
            ],
            WorldBounds::new(400.0, 400.0),
        )
        .unwrap();
        // midpoint of the overlap region, closer to B but still inside A
        let mut mn = MobileNode::spawn(MnId(0), Point::new(75.0, 0.0));
        mn.associated_ap = Some(ApId::new("A"));
        assert_eq!(classify_transition(&mn, &t), Transition::None);
    }

    /// A straight east-bound walk from inside A through a coverage gap into
    /// B. Geometry by hand: walking x = 10*t from (0,0), A (r=50 at x=0)
    /// stops covering at x >= 50, i.e. tick 5; B (r=50 at x=200) first
    /// covers at x > 150, i.e. tick 16 (x=160).
    #[test]
    fn gap_crossing_disassociates_then_associates() {
        let t = two_island_topology();
        let world = t.world();
        let c = MobilityConfig {
            speed_min: 10.0,
            speed_max: 10.0,
            ..cfg(1)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut mn = MobileNode::spawn(MnId(0), Point::new(0.0, 0.0));
        mn.waypoint = Point::new(400.0, 0.0);
        mn.speed = 10.0;

        let mut events = vec![];
        match classify_transition(&mn, &t) {
            Transition::None => {}
            tr => {
                apply(&mut mn, &tr);
                events.push((0u64, tr));
            }
        }
        for tick in 1..=20u64 {
            step(&mut mn, &c, &world, &mut rng);
            match classify_transition(&mn, &t) {
                Transition::None => {}
                tr => {
                    apply(&mut mn, &tr);
                    events.push((tick, tr));
                }
            }
        }
        assert_eq!(
            events,
            vec![
                (0, Transition::Associate { ap: ApId::new("A") }),
                (
                    5,
                    Transition::Disassociate {
                        old: ApId::new("A")
                    }
                ),
                (16, Transition::Associate { ap: ApId::new("B") }),
            ]
        );
    }

    fn apply(mn: &mut MobileNode, tr: &Transition) {
        match tr {
            Transition::None => {}
            Transition::Associate { ap } => mn.associated_ap = Some(ap.clone()),
            Transition::Reassociate { new, .. } => mn.associated_ap = Some(new.clone()),
            Transition::Disassociate { .. } => mn.associated_ap = None,
        }
    }
}
