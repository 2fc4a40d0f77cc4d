//! Centralized operation.
//!
//! An off-line optimizer ([`ttc_optimize`]) computes near-optimal profiles
//! for training frames; they are stored with the frames' quantile vectors in
//! a [`ProfileDictionary`]. During a coordinated run the coordinator installs,
//! every `R` frames, the stored profile whose quantiles are close to the
//! last frame's and which performs best on it; between refreshes the sensors
//! only adjust their cutpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::dynamics::{
    bootstrap_profile, engine_best_response, tt_update_knowledge, EquilibriumState, Objective, Reviser, RunState,
};
use crate::engine::simulate_frame;
use crate::error::{Error, Result};
use crate::model::{min_width_pixels, Algorithm, Allocation, AllocationProfile, FrameDistribution, ScenarioConfig};

/// Best responses allowed per sensor in [`ttc_optimize`].
pub const REVISIONS_PER_SENSOR: usize = 20;
/// Relative system-time gain below which a revision is not accepted.
pub const TTC_TOLERANCE: f64 = 1e-6;

/// Outcome of the off-line optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct TtcResult {
    pub profile: AllocationProfile,
    pub completion: f64,
    /// System completion time after each accepted revision, starting with
    /// the start profile of the winning run.
    pub trajectory: Vec<f64>,
}

/// Round-robin best responses in which every sensor minimizes the
/// engine-evaluated system completion time (then the sum of sensor
/// completion times). Runs from the bootstrap profile and from the TT/A
/// equilibrium of the frame, and keeps the better outcome. Each run stops
/// after `max_revisions` best responses or a full round without improvement.
pub fn ttc_optimize(cfg: &ScenarioConfig, dists: &[FrameDistribution], max_revisions: usize) -> Result<TtcResult> {
    let equilibrium = selfish_equilibrium(cfg, dists, max_revisions)?;
    ttc_optimize_multi(cfg, dists, max_revisions, &[bootstrap_profile(cfg), equilibrium])
}

/// Best [`ttc_optimize_from`] outcome over several start profiles; ties go
/// to the earlier start.
pub fn ttc_optimize_multi(
    cfg: &ScenarioConfig,
    dists: &[FrameDistribution],
    max_revisions: usize,
    starts: &[AllocationProfile],
) -> Result<TtcResult> {
    let mut best: Option<TtcResult> = None;
    for start in starts {
        let r = ttc_optimize_from(cfg, dists, max_revisions, start.clone())?;
        if best.as_ref().map_or(true, |b| r.completion < b.completion) {
            best = Some(r);
        }
    }
    best.ok_or(Error::Empty("start profiles"))
}

/// Profile reached by TT/A dynamics replaying `dists` every frame, stopped
/// at the first detected equilibrium or cycle, or after `max_frames`.
pub fn selfish_equilibrium(cfg: &ScenarioConfig, dists: &[FrameDistribution], max_frames: usize) -> Result<AllocationProfile> {
    let mut state = RunState::new(Algorithm::TT_A, bootstrap_profile(cfg));
    for _ in 0..max_frames.max(1) {
        state.observe(cfg, dists)?;
        if state.state() != EquilibriumState::Transient {
            break;
        }
        state.revise(cfg, false)?;
    }
    Ok(state.history.last().map_or_else(|| state.profile.clone(), |r| r.profile.clone()))
}

pub fn ttc_optimize_from(
    cfg: &ScenarioConfig,
    dists: &[FrameDistribution],
    max_revisions: usize,
    start: AllocationProfile,
) -> Result<TtcResult> {
    let mut profile = start;
    let mut timeline = simulate_frame(&profile, cfg, dists)?;
    let mut trajectory = vec![timeline.system_completion];
    let mut idle = 0;
    let mut k = 0;
    while k < max_revisions {
        if idle >= cfg.sensor_count {
            // unilateral moves are exhausted; try moving cutpoints of
            // several sensors at once
            match joint_search(cfg, dists, &profile)? {
                Some(better) => {
                    profile = better;
                    timeline = simulate_frame(&profile, cfg, dists)?;
                    trajectory.push(timeline.system_completion);
                    idle = 0;
                }
                None => break,
            }
        }
        let s = k % cfg.sensor_count;
        k += 1;
        let mut knowledge = tt_update_knowledge(None, &timeline, &profile, &cfg.processing, dists);
        knowledge.transmission = cfg.transmission.clone();
        let r = engine_best_response(s, &knowledge, cfg, None, Objective::System)?;
        let gain = r.score.primary < r.current.primary * (1.0 - TTC_TOLERANCE)
            || (r.score.primary <= r.current.primary && r.score.beats(&r.current, TTC_TOLERANCE));
        if gain && r.allocation != profile.allocations[s] {
            profile = profile.with_sensor(s, r.allocation);
            timeline = simulate_frame(&profile, cfg, dists)?;
            trajectory.push(timeline.system_completion);
            idle = 0;
        } else {
            idle += 1;
        }
    }
    Ok(TtcResult {
        completion: timeline.system_completion,
        profile,
        trajectory,
    })
}

/// Engine evaluations allowed in one [`joint_search`].
const JOINT_EVALUATIONS: usize = 20_000;

/// Pattern search on the pixel grid over all interior cutpoints of the
/// profile, moving one or two of them per trial, with the step halving from
/// 16 pixels to 1. Assignments are kept. Returns the improved profile, if
/// any, under the (T, sum of T_s) order.
fn joint_search(
    cfg: &ScenarioConfig,
    dists: &[FrameDistribution],
    profile: &AllocationProfile,
) -> Result<Option<AllocationProfile>> {
    let width = cfg.frame_width;
    let min_px = i64::from(min_width_pixels(cfg.overlap, width));
    let mut px: Vec<Vec<i64>> = profile
        .allocations
        .iter()
        .map(|a| a.to_pixels(width).into_iter().map(i64::from).collect())
        .collect();
    let coords: Vec<(usize, usize)> = px
        .iter()
        .enumerate()
        .flat_map(|(s, x)| (1..x.len() - 1).map(move |i| (s, i)))
        .collect();
    if coords.is_empty() {
        return Ok(None);
    }
    let build = |px: &[Vec<i64>]| {
        AllocationProfile::new(
            px.iter()
                .zip(&profile.allocations)
                .map(|(x, a)| {
                    let p: Vec<u32> = x.iter().map(|&v| v as u32).collect();
                    Allocation::from_pixels(a.assignment.clone(), &p, width)
                })
                .collect(),
        )
    };
    let score = |px: &[Vec<i64>]| -> Result<(f64, f64)> {
        let t = simulate_frame(&build(px), cfg, dists)?;
        Ok((t.system_completion, t.sensor_completion.iter().sum()))
    };
    let beats = |a: (f64, f64), b: (f64, f64)| {
        a.0 < b.0 * (1.0 - TTC_TOLERANCE) || (a.0 <= b.0 && a.1 < b.1 * (1.0 - TTC_TOLERANCE))
    };
    let feasible = |x: &[i64]| x.windows(2).all(|w| w[1] - w[0] >= min_px);
    let start = score(&px)?;
    let mut best = start;
    let mut evaluations = 0;
    let mut step = 16i64;
    let mut moves: Vec<Vec<(usize, i64)>> = Vec::new();
    for a in 0..coords.len() {
        moves.push(vec![(a, 1)]);
        moves.push(vec![(a, -1)]);
        for b in a + 1..coords.len() {
            for (da, db) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                moves.push(vec![(a, da), (b, db)]);
            }
        }
    }
    while step >= 1 && evaluations < JOINT_EVALUATIONS {
        let mut improved = false;
        for m in &moves {
            let mut trial = px.clone();
            for &(c, sign) in m {
                let (s, i) = coords[c];
                trial[s][i] += sign * step;
            }
            if !m.iter().all(|&(c, _)| feasible(&trial[coords[c].0])) {
                continue;
            }
            evaluations += 1;
            let t = score(&trial)?;
            if beats(t, best) {
                best = t;
                px = trial;
                improved = true;
            }
            if evaluations >= JOINT_EVALUATIONS {
                break;
            }
        }
        if !improved {
            step /= 2;
        }
    }
    Ok(beats(best, start).then(|| build(&px)))
}

/// Default revision budget: [`REVISIONS_PER_SENSOR`] per sensor.
pub fn default_revisions(cfg: &ScenarioConfig) -> usize {
    REVISIONS_PER_SENSOR * cfg.sensor_count
}

/// Per-sensor quantile vectors of a multi-view frame.
pub fn frame_quantiles(dists: &[FrameDistribution], cfg: &ScenarioConfig) -> Vec<Vec<u32>> {
    dists
        .iter()
        .map(|d| d.quantile_vector(cfg.quantile_count, cfg.frame_width))
        .collect()
}

/// Sum of squared coordinate differences between two multi-view quantile
/// vectors.
pub fn quantile_distance(a: &[Vec<u32>], b: &[Vec<u32>]) -> Result<f64> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
        return Err(Error::Dimension("quantile vectors differ in shape".into()));
    }
    Ok(a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y))
        .map(|(&p, &q)| {
            let d = f64::from(p) - f64::from(q);
            d * d
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryEntry {
    pub quantiles: Vec<Vec<u32>>,
    pub profile: AllocationProfile,
    pub completion: f64,
}

/// Stored profiles in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProfileDictionary {
    pub entries: Vec<DictionaryEntry>,
}

/// Heap key: distance first, then insertion index, so the heap top is the
/// farthest (and latest) of the kept entries.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Near {
    distance: f64,
    index: usize,
}

impl Eq for Near {}

impl PartialOrd for Near {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Near {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.index.cmp(&other.index))
    }
}

impl ProfileDictionary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: DictionaryEntry) {
        self.entries.push(entry);
    }

    /// Indices of the `l` entries nearest to `quantiles`, nearest first
    /// (ties by insertion order), kept in a bounded max-heap.
    pub fn nearest(&self, quantiles: &[Vec<u32>], l: usize) -> Result<Vec<usize>> {
        let mut heap: BinaryHeap<Near> = BinaryHeap::with_capacity(l + 1);
        for (index, e) in self.entries.iter().enumerate() {
            let near = Near {
                distance: quantile_distance(quantiles, &e.quantiles)?,
                index,
            };
            if heap.len() < l {
                heap.push(near);
            } else if heap.peek().is_some_and(|top| near < *top) {
                heap.pop();
                heap.push(near);
            }
        }
        Ok(heap.into_sorted_vec().into_iter().map(|n| n.index).collect())
    }

    /// Writes one line per entry after a `# width=<w>` line and a header:
    /// `completion`, then for every sensor its quantiles, assignment and
    /// cutpoint pixels, each a space-separated integer list.
    pub fn write<W: Write>(&self, out: W, width: u32) -> Result<()> {
        let mut out = out;
        writeln!(out, "# width={width}").map_err(|e| Error::io("<dictionary>", e))?;
        let sensors = self.entries.first().map_or(0, |e| e.quantiles.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["completion".to_string()];
        for s in 1..=sensors {
            header.extend([format!("q_s{s}"), format!("d_s{s}"), format!("x_s{s}")]);
        }
        w.write_record(&header)?;
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        for e in &self.entries {
            let mut rec = vec![e.completion.to_string()];
            for (q, a) in e.quantiles.iter().zip(&e.profile.allocations) {
                let d: Vec<u32> = a.assignment.iter().map(|&n| n as u32).collect();
                rec.extend([join(q), join(&d), join(&a.to_pixels(width))]);
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<dictionary>", e))?;
        Ok(())
    }

    /// Reads the format of [`ProfileDictionary::write`]; returns the
    /// dictionary and the frame width it was stored with.
    pub fn read<R: BufRead>(mut input: R) -> Result<(Self, u32)> {
        let mut first = String::new();
        input.read_line(&mut first).map_err(|e| Error::io("<dictionary>", e))?;
        let width: u32 = first
            .trim()
            .strip_prefix("# width=")
            .and_then(|w| w.parse().ok())
            .filter(|&w| w >= 2)
            .ok_or_else(|| Error::Dictionary {
                line: 1,
                msg: "expected `# width=<pixels>`".into(),
            })?;
        let mut r = csv::Reader::from_reader(input);
        let columns = r.headers()?.len();
        if columns == 0 || (columns - 1) % 3 != 0 {
            return Err(Error::Dictionary {
                line: 2,
                msg: format!("{columns} columns; expected 1 + 3 per sensor"),
            });
        }
        let mut dict = ProfileDictionary::default();
        for (i, rec) in r.records().enumerate() {
            let line = i + 3;
            let rec = rec?;
            let bad = |msg: String| Error::Dictionary { line, msg };
            let ints = |field: &str| -> Result<Vec<u32>> {
                field
                    .split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|e| bad(format!("`{t}`: {e}"))))
                    .collect()
            };
            let completion: f64 = rec[0].parse().map_err(|e| bad(format!("completion: {e}")))?;
            let mut quantiles = Vec::new();
            let mut allocations = Vec::new();
            for s in 0..(columns - 1) / 3 {
                quantiles.push(ints(&rec[1 + 3 * s])?);
                let d: Vec<usize> = ints(&rec[2 + 3 * s])?.into_iter().map(|n| n as usize).collect();
                let x = ints(&rec[3 + 3 * s])?;
                if d.is_empty() || x.len() != d.len() + 1 {
                    return Err(bad(format!("sensor {}: {} cutpoints for {} slices", s + 1, x.len(), d.len())));
                }
                allocations.push(Allocation::from_pixels(d, &x, width));
            }
            dict.push(DictionaryEntry {
                quantiles,
                profile: AllocationProfile::new(allocations),
                completion,
            });
        }
        Ok((dict, width))
    }

    pub fn save(&self, path: impl AsRef<Path>, width: u32) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(std::io::BufWriter::new(file), width)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, u32)> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file))
    }
}

/// Profiles of the training frames. The first frame gets a full
/// [`ttc_optimize`] run; later ones start from the bootstrap profile and
/// from the previous entry.
pub fn build_dictionary(
    training: &[Vec<FrameDistribution>],
    cfg: &ScenarioConfig,
    size: usize,
) -> Result<ProfileDictionary> {
    let mut dict = ProfileDictionary::default();
    let budget = default_revisions(cfg);
    for (i, dists) in training.iter().take(size.max(1)).enumerate() {
        let r = match dict.entries.last() {
            None => ttc_optimize(cfg, dists, budget),
            Some(prev) => ttc_optimize_multi(cfg, dists, budget, &[bootstrap_profile(cfg), prev.profile.clone()]),
        }
        .map_err(|e| Error::at_frame(i + 1, e))?;
        log::debug!("dictionary entry {}: T {:.6}", i + 1, r.completion);
        dict.push(DictionaryEntry {
            quantiles: frame_quantiles(dists, cfg),
            profile: r.profile,
            completion: r.completion,
        });
    }
    Ok(dict)
}

/// A dictionary choice.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub profile: AllocationProfile,
    /// Engine completion time on the predicted frame; `None` when only one
    /// candidate was considered.
    pub predicted: Option<f64>,
}

/// Among the `l` entries nearest to `predicted`, the one whose profile
/// completes the predicted frame soonest (ties: insertion order).
pub fn select_profile(
    predicted: &[Vec<u32>],
    dict: &ProfileDictionary,
    l: usize,
    cfg: &ScenarioConfig,
    dists: &[FrameDistribution],
) -> Result<Selection> {
    if dict.is_empty() {
        return Err(Error::Empty("profile dictionary"));
    }
    let near = dict.nearest(predicted, l.max(1))?;
    if near.len() == 1 {
        return Ok(Selection {
            index: near[0],
            profile: dict.entries[near[0]].profile.clone(),
            predicted: None,
        });
    }
    let mut best: Option<(f64, usize)> = None;
    let mut order = near;
    order.sort_unstable();
    for i in order {
        let t = simulate_frame(&dict.entries[i].profile, cfg, dists)?.system_completion;
        if best.map_or(true, |(bt, _)| t < bt) {
            best = Some((t, i));
        }
    }
    let (t, index) = best.expect("nonempty candidate set");
    Ok(Selection {
        index,
        profile: dict.entries[index].profile.clone(),
        predicted: Some(t),
    })
}

/// Runs `algorithm` with a coordinator refreshing the profile at frames
/// `1, R + 1, 2R + 1, ...`. In between, sensors revise their cutpoints only.
/// The first refresh predicts exact-uniform frames with each sensor's point
/// count; later ones use the last frame.
pub fn coordinated_run(
    cfg: &ScenarioConfig,
    frames: &[Vec<FrameDistribution>],
    algorithm: Algorithm,
    inter_refresh: usize,
    candidates: usize,
    dict: &ProfileDictionary,
) -> Result<RunState> {
    if inter_refresh == 0 {
        return Err(Error::Config("inter-refresh interval must be at least 1".into()));
    }
    let mut state = RunState::new(algorithm, bootstrap_profile(cfg));
    for (i, dists) in frames.iter().enumerate() {
        if i % inter_refresh == 0 {
            let predicted: Vec<FrameDistribution> = if i == 0 {
                dists.iter().map(|d| FrameDistribution::exact_uniform(d.point_count())).collect()
            } else {
                frames[i - 1].clone()
            };
            let q = frame_quantiles(&predicted, cfg);
            let chosen = select_profile(&q, dict, candidates, cfg, &predicted).map_err(|e| Error::at_frame(i + 1, e))?;
            state.install_from(chosen.profile, Reviser::Coordinator);
        } else {
            state.revise(cfg, true)?;
        }
        state.observe(cfg, dists)?;
    }
    Ok(state)
}
