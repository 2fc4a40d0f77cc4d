//! The five evaluation topologies: four sensors on the corners of a square
//! and four processing nodes on a second square that migrates from the
//! side midpoints (topology 1) to an axis-aligned square shifted by three
//! quarters of the side (topology 5).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub sensors: Vec<Position>,
    pub nodes: Vec<Position>,
}

/// Per-step shift of the node square, as a fraction of the sensor square side.
const SHIFT_PER_STEP: f64 = 0.1875;
/// Per-step rotation of the node square about its center, degrees.
const ROTATION_PER_STEP_DEG: f64 = -11.25;
/// Number of steps between topology 1 and topology 5.
const STEPS: f64 = 4.0;

impl Topology {
    pub fn new(sensors: Vec<Position>, nodes: Vec<Position>) -> Result<Self> {
        if sensors.is_empty() || nodes.is_empty() {
            return Err(Error::Config("topology needs at least one sensor and one node".into()));
        }
        let finite = |p: &Position| p.x.is_finite() && p.y.is_finite();
        if !sensors.iter().chain(nodes.iter()).all(finite) {
            return Err(Error::Config("topology positions must be finite".into()));
        }
        Ok(Self { sensors, nodes })
    }

    pub fn sensor_count(&self) -> usize {
        self.sensors.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Distance matrix, `[sensor][node]`.
    pub fn distances(&self) -> Vec<Vec<f64>> {
        self.sensors
            .iter()
            .map(|s| self.nodes.iter().map(|n| s.distance(n)).collect())
            .collect()
    }
}

/// Builds topology `index` (1..=5) for a sensor square of `side_length` meters.
///
/// Step `k = index - 1` shifts the node square by `0.1875 * k * side` in both
/// axes, rotates it by `-11.25 * k` degrees about its center and grows its side
/// linearly from `side / sqrt(2)` (topology 1) to `side` (topology 5), i.e. by
/// about 7.32 m per step at a 100 m side.
pub fn build_topology(index: usize, side_length: f64) -> Result<Topology> {
    if !(1..=5).contains(&index) {
        return Err(Error::TopologyIndex(index));
    }
    if !(side_length > 0.0 && side_length.is_finite()) {
        return Err(Error::Config(format!("side length must be positive, got {side_length}")));
    }
    let l = side_length;
    let sensors = vec![
        Position::new(0.0, 0.0),
        Position::new(l, 0.0),
        Position::new(l, l),
        Position::new(0.0, l),
    ];

    let k = (index - 1) as f64;
    let base_center = Position::new(l / 2.0, l / 2.0);
    let base_side = l / std::f64::consts::SQRT_2;
    let side = base_side + k * (l - base_side) / STEPS;
    let scale = side / base_side;
    let theta = (ROTATION_PER_STEP_DEG * k).to_radians();
    let (sin, cos) = theta.sin_cos();
    let center = Position::new(
        base_center.x + SHIFT_PER_STEP * k * l,
        base_center.y + SHIFT_PER_STEP * k * l,
    );

    let midpoints = [
        Position::new(l / 2.0, 0.0),
        Position::new(l, l / 2.0),
        Position::new(l / 2.0, l),
        Position::new(0.0, l / 2.0),
    ];
    let nodes = midpoints
        .iter()
        .map(|p| {
            let dx = (p.x - base_center.x) * scale;
            let dy = (p.y - base_center.y) * scale;
            Position::new(
                center.x + dx * cos - dy * sin,
                center.y + dx * sin + dy * cos,
            )
        })
        .collect();

    Topology::new(sensors, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_nodes(t: &Topology, expected: &[(f64, f64)]) {
        for (n, &(x, y)) in t.nodes.iter().zip(expected) {
            assert!((n.x - x).abs() < 1e-9 && (n.y - y).abs() < 1e-9, "{n:?} != ({x}, {y})");
        }
    }

    #[test]
    fn topology_one_uses_side_midpoints() {
        let t = build_topology(1, 100.0).unwrap();
        assert_nodes(&t, &[(50.0, 0.0), (100.0, 50.0), (50.0, 100.0), (0.0, 50.0)]);
        assert_eq!(t.sensors[2], Position::new(100.0, 100.0));
    }

    #[test]
    fn topology_five_is_shifted_unit_square() {
        let t = build_topology(5, 100.0).unwrap();
        assert_nodes(&t, &[(75.0, 75.0), (175.0, 75.0), (175.0, 175.0), (75.0, 175.0)]);
    }

    #[test]
    fn intermediate_topology_is_affine_step() {
        // Topology 3: center shifted by 37.5 m, rotated -22.5 degrees, side
        // 70.71 + 2 * 7.32 m.
        let t = build_topology(3, 100.0).unwrap();
        let base = 100.0 / std::f64::consts::SQRT_2;
        assert!((base - 70.71).abs() < 0.01);
        let side = t.nodes[0].distance(&t.nodes[1]);
        assert!((side - (base + 2.0 * (100.0 - base) / 4.0)).abs() < 1e-9);
        assert!((side - (70.71 + 14.64)).abs() < 0.01);
        let cx = t.nodes.iter().map(|p| p.x).sum::<f64>() / 4.0;
        let cy = t.nodes.iter().map(|p| p.y).sum::<f64>() / 4.0;
        assert!((cx - 87.5).abs() < 1e-9 && (cy - 87.5).abs() < 1e-9);
        // First vertex starts straight below the center at -90 degrees.
        let angle = (t.nodes[0].y - cy).atan2(t.nodes[0].x - cx).to_degrees();
        assert!((angle - (-90.0 - 22.5)).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        assert!(matches!(build_topology(0, 100.0), Err(Error::TopologyIndex(0))));
        assert!(matches!(build_topology(6, 100.0), Err(Error::TopologyIndex(6))));
    }

    #[test]
    fn coordinates_scale_with_side_length() {
        let a = build_topology(4, 100.0).unwrap();
        let b = build_topology(4, 200.0).unwrap();
        for (p, q) in a.nodes.iter().zip(&b.nodes) {
            assert!((2.0 * p.x - q.x).abs() < 1e-9 && (2.0 * p.y - q.y).abs() < 1e-9);
        }
    }
}
