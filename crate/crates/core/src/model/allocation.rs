//! Assignments and cutpoint vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Relative slack used when comparing widths against the overlap and
/// cutpoints against the pixel grid.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// One sensor's offloading decision for a frame.
///
/// `assignment[v]` is the (0-based) node receiving slice `v`; `cutpoints` has
/// one more entry than `assignment` and runs from 0 to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub assignment: Vec<usize>,
    pub cutpoints: Vec<f64>,
}

impl Allocation {
    pub fn new(assignment: Vec<usize>, cutpoints: Vec<f64>) -> Self {
        Self {
            assignment,
            cutpoints,
        }
    }

    /// Everything to one node.
    pub fn whole(node: usize) -> Self {
        Self::new(vec![node], vec![0.0, 1.0])
    }

    pub fn from_widths(assignment: Vec<usize>, widths: &[f64]) -> Self {
        let mut cutpoints = Vec::with_capacity(widths.len() + 1);
        let mut acc = 0.0;
        cutpoints.push(0.0);
        for w in &widths[..widths.len().saturating_sub(1)] {
            acc += w;
            cutpoints.push(acc);
        }
        cutpoints.push(1.0);
        Self::new(assignment, cutpoints)
    }

    pub fn slice_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.cutpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn width(&self, slice: usize) -> f64 {
        self.cutpoints[slice + 1] - self.cutpoints[slice]
    }

    /// Slice index sent to `node`, if any.
    pub fn slice_of(&self, node: usize) -> Option<usize> {
        self.assignment.iter().position(|&n| n == node)
    }

    pub fn uses(&self, node: usize) -> bool {
        self.assignment.contains(&node)
    }

    /// Transmitted data of slice `v` in normalized frame units: the slice
    /// plus its overlap strips. A single slice is the whole frame.
    pub fn slice_volume(&self, slice: usize, overlap: f64) -> f64 {
        transmitted_volume(self.width(slice), slice, self.slice_count(), overlap)
    }

    pub fn to_pixels(&self, width: u32) -> Vec<u32> {
        self.cutpoints
            .iter()
            .map(|x| (x * f64::from(width)).round() as u32)
            .collect()
    }

    pub fn from_pixels(assignment: Vec<usize>, pixels: &[u32], width: u32) -> Self {
        let w = f64::from(width);
        Self::new(assignment, pixels.iter().map(|&p| f64::from(p) / w).collect())
    }

    /// Largest cutpoint distance in pixels to `other`; infinite when the
    /// assignments differ.
    pub fn pixel_distance(&self, other: &Allocation, width: u32) -> f64 {
        if self.assignment != other.assignment {
            return f64::INFINITY;
        }
        self.cutpoints
            .iter()
            .zip(&other.cutpoints)
            .map(|(a, b)| (a - b).abs() * f64::from(width))
            .fold(0.0, f64::max)
    }

    /// Rounds interior cutpoints to the nearest pixel and repairs slices that
    /// end up narrower than the overlap by taking pixels from the wider
    /// neighbor. Returns `None` when `V` minimum-width slices do not fit.
    pub fn round_to_pixels(&self, width: u32, overlap: f64) -> Option<Allocation> {
        let v = self.slice_count();
        let min_px = min_width_pixels(overlap, width);
        if (v as u64) * u64::from(min_px) > u64::from(width) {
            return None;
        }
        let mut px: Vec<i64> = self
            .cutpoints
            .iter()
            .map(|x| (x * f64::from(width)).round() as i64)
            .collect();
        px[0] = 0;
        px[v] = i64::from(width);
        let min_px = i64::from(min_px);
        // Each pass moves one boundary by one pixel; bounded by the width.
        for _ in 0..(4 * width as usize + 8) {
            let narrow = (0..v).find(|&s| px[s + 1] - px[s] < min_px);
            let Some(s) = narrow else { break };
            let left = (s > 0).then(|| px[s] - px[s - 1]);
            let right = (s + 1 < v).then(|| px[s + 2] - px[s + 1]);
            match (left, right) {
                (Some(l), Some(r)) if l >= r => px[s] -= 1,
                (Some(_), Some(_)) => px[s + 1] += 1,
                (Some(_), None) => px[s] -= 1,
                (None, Some(_)) => px[s + 1] += 1,
                (None, None) => return None,
            }
        }
        if (0..v).any(|s| px[s + 1] - px[s] < min_px) {
            return None;
        }
        let pixels: Vec<u32> = px.into_iter().map(|p| p as u32).collect();
        Some(Allocation::from_pixels(self.assignment.clone(), &pixels, width))
    }
}

/// Data volume of slice `slice` of `count` slices with width `y`.
pub fn transmitted_volume(y: f64, slice: usize, count: usize, overlap: f64) -> f64 {
    if count == 1 {
        y
    } else if slice == 0 || slice + 1 == count {
        y + overlap
    } else {
        y + 2.0 * overlap
    }
}

/// Smallest slice width in whole pixels that still covers the overlap.
pub fn min_width_pixels(overlap: f64, width: u32) -> u32 {
    (overlap * f64::from(width) - GRID_TOLERANCE).ceil().max(1.0) as u32
}

/// One allocation per sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationProfile {
    pub allocations: Vec<Allocation>,
}

impl AllocationProfile {
    pub fn new(allocations: Vec<Allocation>) -> Self {
        Self { allocations }
    }

    pub fn sensor_count(&self) -> usize {
        self.allocations.len()
    }

    pub fn with_sensor(&self, sensor: usize, alloc: Allocation) -> Self {
        let mut p = self.clone();
        p.allocations[sensor] = alloc;
        p
    }

    pub fn pixel_distance(&self, other: &AllocationProfile, width: u32) -> f64 {
        if self.allocations.len() != other.allocations.len() {
            return f64::INFINITY;
        }
        self.allocations
            .iter()
            .zip(&other.allocations)
            .map(|(a, b)| a.pixel_distance(b, width))
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for AllocationProfile {
    type Output = Allocation;

    fn index(&self, sensor: usize) -> &Allocation {
        &self.allocations[sensor]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    SensorCount { expected: usize, found: usize },
    EmptyAssignment,
    TooManySlices { slices: usize, nodes: usize },
    NodeOutOfRange { node: usize },
    DuplicateNode { node: usize },
    CutpointCount { expected: usize, found: usize },
    Endpoints,
    NarrowSlice { slice: usize, width: f64 },
    OffGrid { cutpoint: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub sensor: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sensor {}: ", self.sensor)?;
        match &self.kind {
            ViolationKind::SensorCount { expected, found } => {
                write!(f, "profile has {found} allocations, expected {expected}")
            }
            ViolationKind::EmptyAssignment => write!(f, "empty assignment"),
            ViolationKind::TooManySlices { slices, nodes } => {
                write!(f, "{slices} slices for {nodes} nodes")
            }
            ViolationKind::NodeOutOfRange { node } => write!(f, "node {node} out of range"),
            ViolationKind::DuplicateNode { node } => write!(f, "node {node} assigned twice"),
            ViolationKind::CutpointCount { expected, found } => {
                write!(f, "{found} cutpoints, expected {expected}")
            }
            ViolationKind::Endpoints => write!(f, "cutpoints must start at 0 and end at 1"),
            ViolationKind::NarrowSlice { slice, width } => {
                write!(f, "slice {slice} width {width} below the overlap")
            }
            ViolationKind::OffGrid { cutpoint, value } => {
                write!(f, "cutpoint {cutpoint} = {value} is not on the pixel grid")
            }
        }
    }
}

/// Structural and grid checks shared by [`validate_profile`] and the engine.
pub fn check_profile(
    profile: &AllocationProfile,
    node_count: usize,
    overlap: f64,
    width: Option<u32>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (s, a) in profile.allocations.iter().enumerate() {
        let mut push = |kind| out.push(Violation { sensor: s, kind });
        let v = a.assignment.len();
        if v == 0 {
            push(ViolationKind::EmptyAssignment);
            continue;
        }
        if v > node_count {
            push(ViolationKind::TooManySlices {
                slices: v,
                nodes: node_count,
            });
        }
        for (i, &n) in a.assignment.iter().enumerate() {
            if n >= node_count {
                push(ViolationKind::NodeOutOfRange { node: n });
            } else if a.assignment[..i].contains(&n) {
                push(ViolationKind::DuplicateNode { node: n });
            }
        }
        if a.cutpoints.len() != v + 1 {
            push(ViolationKind::CutpointCount {
                expected: v + 1,
                found: a.cutpoints.len(),
            });
            continue;
        }
        if a.cutpoints[0] != 0.0 || a.cutpoints[v] != 1.0 {
            push(ViolationKind::Endpoints);
        }
        for slice in 0..v {
            let y = a.width(slice);
            if !(y > 0.0) || y < overlap - GRID_TOLERANCE {
                push(ViolationKind::NarrowSlice { slice, width: y });
            }
        }
        if let Some(w) = width {
            for (i, &x) in a.cutpoints.iter().enumerate() {
                let px = x * f64::from(w);
                if (px - px.round()).abs() > GRID_TOLERANCE * f64::from(w).max(1.0) {
                    push(ViolationKind::OffGrid {
                        cutpoint: i,
                        value: x,
                    });
                }
            }
        }
    }
    out
}
