//! Deterministic timeline of one multi-view frame.
//!
//! Transmission: every sensor unicasts its slices back to back in assignment
//! order. While `k` sensors are on the air, sensor `s` sends to node `n` at
//! `1 / (k * C[s][n])` frame units per second (airtime fairness).
//!
//! Processing: a node starts a slice once its last bit arrives. The node's
//! rate `1 / P[n]` is split across active slices in proportion to their
//! remaining load, so slices that are active together finish together.
//!
//! Simultaneous events (within [`EVENT_TOLERANCE`]) are handled in sensor,
//! then slice order.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{check_profile, AllocationProfile, FrameDistribution, ScenarioConfig};

/// Absolute tolerance when comparing event times, seconds.
pub const EVENT_TOLERANCE: f64 = 1e-12;

/// Timing of one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceTiming {
    pub node: usize,
    /// Normalized slice width `y`.
    pub width: f64,
    /// Transmitted data including overlap strips.
    pub volume: f64,
    /// Interest points inside the slice.
    pub interest_points: usize,
    /// Processing load `y + alpha_d * xi`.
    pub load: f64,
    /// First bit received.
    pub begin: f64,
    /// Last bit received.
    pub received: f64,
    /// Processing complete.
    pub completed: f64,
}

impl SliceTiming {
    /// Experienced transmission coefficient.
    pub fn experienced_transmission(&self) -> f64 {
        (self.received - self.begin) / self.volume
    }

    /// Experienced processing coefficient.
    pub fn experienced_processing(&self) -> f64 {
        (self.completed - self.received) / self.load
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameTimeline {
    /// `slices[s][v]`.
    pub slices: Vec<Vec<SliceTiming>>,
    /// `T_s`, the latest completion over the nodes sensor `s` used.
    pub sensor_completion: Vec<f64>,
    /// `T`, the latest sensor completion.
    pub system_completion: f64,
    node_count: usize,
}

/// Experienced coefficients of one (sensor, node) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experienced {
    pub transmission: f64,
    pub processing: f64,
}

impl FrameTimeline {
    pub fn sensor_count(&self) -> usize {
        self.slices.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `T_{s,n}`: completion of the slice sensor `s` sent to node `n`.
    pub fn slice_completion(&self, sensor: usize, node: usize) -> Option<f64> {
        self.slices[sensor]
            .iter()
            .find(|t| t.node == node)
            .map(|t| t.completed)
    }

    /// `[s][n]` table of experienced coefficients; `None` where `s` did not use `n`.
    pub fn experienced_coefficients(&self) -> Vec<Vec<Option<Experienced>>> {
        self.slices
            .iter()
            .map(|slices| {
                let mut row = vec![None; self.node_count];
                for t in slices {
                    row[t.node] = Some(Experienced {
                        transmission: t.experienced_transmission(),
                        processing: t.experienced_processing(),
                    });
                }
                row
            })
            .collect()
    }

    /// Latest completion among the slices processed at each node (0 if idle).
    pub fn node_completion(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.node_count];
        for t in self.slices.iter().flatten() {
            out[t.node] = f64::max(out[t.node], t.completed);
        }
        out
    }

    /// Sensor completion times sorted in decreasing order.
    pub fn sorted_sensor_completion(&self) -> Vec<f64> {
        let mut v = self.sensor_completion.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Rebuilds every `t_c` from the experienced coefficients:
    /// `sum_{u<=v} C~_u * volume_u + P~_v * load_v`.
    pub fn reconstructed_completion(&self) -> Vec<Vec<f64>> {
        self.slices
            .iter()
            .map(|slices| {
                let mut tx = 0.0;
                slices
                    .iter()
                    .map(|t| {
                        tx += t.experienced_transmission() * t.volume;
                        tx + t.experienced_processing() * t.load
                    })
                    .collect()
            })
            .collect()
    }

    /// CSV rows `sensor,slice,node,t_b,t_r,t_c` (0-based indices).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sensor", "slice", "node", "t_b", "t_r", "t_c"])?;
        for (s, slices) in self.slices.iter().enumerate() {
            for (v, t) in slices.iter().enumerate() {
                w.write_record([
                    s.to_string(),
                    v.to_string(),
                    t.node.to_string(),
                    t.begin.to_string(),
                    t.received.to_string(),
                    t.completed.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io("<timeline>", e))?;
        Ok(())
    }
}

/// Simulates one multi-view frame.
///
/// `dists` holds one interest-point distribution per sensor; an empty slice
/// means no interest points anywhere.
pub fn simulate_frame(
    profile: &AllocationProfile,
    cfg: &ScenarioConfig,
    dists: &[FrameDistribution],
) -> Result<FrameTimeline> {
    let mut violations = check_profile(profile, cfg.node_count, cfg.overlap, Some(cfg.frame_width));
    if profile.sensor_count() != cfg.sensor_count {
        violations.push(crate::model::Violation {
            sensor: 0,
            kind: crate::model::ViolationKind::SensorCount {
                expected: cfg.sensor_count,
                found: profile.sensor_count(),
            },
        });
    }
    if !violations.is_empty() {
        return Err(Error::InvalidProfile(violations));
    }
    if !dists.is_empty() && dists.len() != cfg.sensor_count {
        return Err(Error::Dimension(format!(
            "{} distributions for {} sensors",
            dists.len(),
            cfg.sensor_count
        )));
    }
    simulate_unchecked(profile, cfg, dists)
}

/// Engine core without profile validation; callers guarantee a valid profile.
pub(crate) fn simulate_unchecked(
    profile: &AllocationProfile,
    cfg: &ScenarioConfig,
    dists: &[FrameDistribution],
) -> Result<FrameTimeline> {
    let mut slices: Vec<Vec<SliceTiming>> = Vec::with_capacity(profile.sensor_count());
    for (s, alloc) in profile.allocations.iter().enumerate() {
        let v_count = alloc.slice_count();
        let mut row = Vec::with_capacity(v_count);
        for v in 0..v_count {
            let node = alloc.assignment[v];
            let c = cfg.transmission[s][node];
            if !c.is_finite() {
                return Err(Error::InfeasibleLink {
                    sensor: s,
                    node,
                    reason: "unknown or infinite transmission coefficient".into(),
                });
            }
            let width = alloc.width(v);
            let points = dists
                .get(s)
                .map_or(0, |d| d.slice_count(alloc.cutpoints[v], alloc.cutpoints[v + 1]));
            row.push(SliceTiming {
                node,
                width,
                volume: alloc.slice_volume(v, cfg.overlap),
                interest_points: points,
                load: width + cfg.alpha_d * points as f64,
                begin: 0.0,
                received: 0.0,
                completed: 0.0,
            });
        }
        slices.push(row);
    }

    transmit(&mut slices, cfg);
    for node in 0..cfg.node_count {
        process(&mut slices, node, cfg.processing[node]);
    }

    let sensor_completion: Vec<f64> = slices
        .iter()
        .map(|row| row.iter().map(|t| t.completed).fold(0.0, f64::max))
        .collect();
    let system_completion = sensor_completion.iter().copied().fold(0.0, f64::max);
    Ok(FrameTimeline {
        slices,
        sensor_completion,
        system_completion,
        node_count: cfg.node_count,
    })
}

fn transmit(slices: &mut [Vec<SliceTiming>], cfg: &ScenarioConfig) {
    let sensors = slices.len();
    // (current slice, remaining volume)
    let mut state: Vec<(usize, f64)> = slices
        .iter()
        .map(|row| (0, row.first().map_or(0.0, |t| t.volume)))
        .collect();
    let mut now = 0.0;
    let mut finish = vec![0.0; sensors];
    loop {
        let active: Vec<usize> = (0..sensors).filter(|&s| state[s].0 < slices[s].len()).collect();
        if active.is_empty() {
            break;
        }
        let k = active.len() as f64;
        let mut dt = f64::INFINITY;
        for &s in &active {
            let coeff = cfg.transmission[s][slices[s][state[s].0].node];
            finish[s] = state[s].1 * k * coeff;
            dt = dt.min(finish[s]);
        }
        let next = now + dt;
        for &s in &active {
            let (v, rem) = state[s];
            if finish[s] - dt <= EVENT_TOLERANCE {
                slices[s][v].received = next;
                let nv = v + 1;
                if let Some(t) = slices[s].get_mut(nv) {
                    t.begin = next;
                    state[s] = (nv, t.volume);
                } else {
                    state[s] = (nv, 0.0);
                }
            } else {
                let coeff = cfg.transmission[s][slices[s][v].node];
                state[s].1 = rem - dt / (k * coeff);
            }
        }
        now = next;
    }
}

fn process(slices: &mut [Vec<SliceTiming>], node: usize, rate_coeff: f64) {
    let mut arrivals: Vec<(f64, usize, usize)> = slices
        .iter()
        .enumerate()
        .flat_map(|(s, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, t)| t.node == node)
                .map(move |(v, t)| (t.received, s, v))
        })
        .collect();
    arrivals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut active: Vec<(usize, usize, f64)> = Vec::new();
    let mut next = 0;
    let mut now = 0.0;
    while next < arrivals.len() || !active.is_empty() {
        if active.is_empty() {
            now = f64::max(now, arrivals[next].0);
        } else {
            let total: f64 = active.iter().map(|a| a.2).sum();
            let done = now + rate_coeff * total;
            match arrivals.get(next) {
                Some(&(t, _, _)) if t < done - EVENT_TOLERANCE => {
                    let served = (t - now) / (rate_coeff * total);
                    for a in &mut active {
                        a.2 *= 1.0 - served;
                    }
                    now = t;
                }
                _ => {
                    for &(s, v, _) in &active {
                        slices[s][v].completed = done;
                    }
                    active.clear();
                    now = done;
                    continue;
                }
            }
        }
        while let Some(&(t, s, v)) = arrivals.get(next) {
            if t > now + EVENT_TOLERANCE {
                break;
            }
            active.push((s, v, slices[s][v].load));
            next += 1;
        }
    }
}
