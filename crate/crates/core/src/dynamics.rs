//! Distributed best-response dynamics.
//!
//! Each frame is simulated, every sensor updates what it knows (its own
//! experienced coefficients under MO, the broadcast intervals and widths of
//! everyone under TT), and the sensors allowed to revise propose a best
//! response computed with the last frame's interest points as prediction.

use std::cmp::Ordering;
use std::fmt;

use crate::engine::{simulate_unchecked, FrameTimeline};
use crate::error::{Error, Result};
use crate::model::{
    min_width_pixels, Algorithm, Allocation, AllocationProfile, FrameDistribution, InfoModel,
    PiecewiseCdf, RevisionMode, ScenarioConfig,
};
use crate::solver::{
    best_allocation_among, better, enumerate_assignments, optimal_widths_general,
    predicted_completion, Enumeration, PredictedCoefficients, TIE_TOLERANCE,
};

/// Relative improvement a revision must achieve to replace the current
/// allocation.
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-9;
/// Relative slack of the equilibrium certificate.
pub const CERTIFICATION_TOLERANCE: f64 = 1e-6;
/// Cutpoint tolerance of [`detect_equilibrium`], in pixels.
pub const EQUILIBRIUM_PIXELS: f64 = 1.0;
/// Experienced-coefficient re-solves per candidate assignment.
const FIXED_POINT_STEPS: usize = 3;
/// Candidate assignments refined on the pixel grid.
const POLISHED_CANDIDATES: usize = 3;

/// Starting allocation: every node, in index order, widths `max(o, 1/N)`
/// renormalized to sum to one.
pub fn bootstrap_allocation(node_count: usize, overlap: f64) -> Allocation {
    let w = overlap.max(1.0 / node_count as f64);
    let widths = vec![w / (w * node_count as f64); node_count];
    Allocation::from_widths((0..node_count).collect(), &widths)
}

/// Bootstrap allocation of every sensor on the pixel grid. Trailing nodes
/// are dropped when `N` minimum-width slices do not fit the frame.
pub fn bootstrap_profile(cfg: &ScenarioConfig) -> AllocationProfile {
    let min_px = min_width_pixels(cfg.overlap, cfg.frame_width).max(1);
    let fit = ((cfg.frame_width / min_px) as usize).clamp(1, cfg.node_count);
    let alloc = bootstrap_allocation(fit, cfg.overlap)
        .round_to_pixels(cfg.frame_width, cfg.overlap)
        .unwrap_or_else(|| Allocation::whole(0));
    AllocationProfile::new(vec![alloc; cfg.sensor_count])
}

/// Measurement-only knowledge of one sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct MoKnowledge {
    /// `C~[n]`; infinite until the sensor has used node `n`.
    pub transmission: Vec<f64>,
    pub processing: Vec<f64>,
    /// Last-value prediction of the sensor's own interest points.
    pub distribution: FrameDistribution,
}

/// Transmission-time knowledge: the broadcast of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct TtKnowledge {
    /// `C[s'][n]` recovered from broadcast intervals; infinite if never seen.
    pub transmission: Vec<Vec<f64>>,
    pub processing: Vec<f64>,
    /// Allocations of the last frame.
    pub profile: AllocationProfile,
    /// Last-value prediction of every sensor's interest points.
    pub distributions: Vec<FrameDistribution>,
    /// Sensors whose transmission windows overlapped each sensor's.
    pub contention: Vec<usize>,
    /// Width units each node processed, per sensor.
    pub node_loads: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SensorKnowledge {
    Mo(MoKnowledge),
    Tt(TtKnowledge),
}

/// Stores the experienced coefficients of the nodes `sensor` used;
/// the others keep their previous value.
pub fn mo_update_knowledge(
    previous: Option<&MoKnowledge>,
    timeline: &FrameTimeline,
    sensor: usize,
    distribution: FrameDistribution,
) -> MoKnowledge {
    let n = timeline.node_count();
    let (mut transmission, mut processing) = match previous {
        Some(k) => (k.transmission.clone(), k.processing.clone()),
        None => (vec![f64::INFINITY; n], vec![f64::INFINITY; n]),
    };
    for t in &timeline.slices[sensor] {
        transmission[t.node] = t.experienced_transmission();
        processing[t.node] = t.experienced_processing();
    }
    MoKnowledge {
        transmission,
        processing,
        distribution,
    }
}

/// Recovers `C[s][n]` for every link used in the timeline. A slice sent
/// during `[t_b, t_r]` while `k(t)` sensors transmit carries
/// `volume = (1/C) * integral dt / k(t)`.
pub fn recover_transmission(timeline: &FrameTimeline) -> Vec<Vec<Option<f64>>> {
    let windows: Vec<(f64, f64)> = timeline
        .slices
        .iter()
        .flatten()
        .map(|t| (t.begin, t.received))
        .collect();
    let mut marks: Vec<f64> = windows.iter().flat_map(|&(a, b)| [a, b]).collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let active = |t: f64| windows.iter().filter(|&&(a, b)| a <= t && t < b).count();
    // (start, end, k) pieces of the transmission phase
    let pieces: Vec<(f64, f64, usize)> = marks
        .windows(2)
        .map(|m| (m[0], m[1], active(0.5 * (m[0] + m[1]))))
        .filter(|p| p.2 > 0)
        .collect();
    timeline
        .slices
        .iter()
        .map(|row| {
            let mut out = vec![None; timeline.node_count()];
            for t in row {
                let airtime: f64 = pieces
                    .iter()
                    .map(|&(a, b, k)| (b.min(t.received) - a.max(t.begin)).max(0.0) / k as f64)
                    .sum();
                if t.volume > 0.0 && airtime > 0.0 {
                    out[t.node] = Some(airtime / t.volume);
                }
            }
            out
        })
        .collect()
}

fn contention(timeline: &FrameTimeline) -> Vec<usize> {
    let window = |row: &[crate::engine::SliceTiming]| {
        let a = row.first().map_or(0.0, |t| t.begin);
        let b = row.last().map_or(0.0, |t| t.received);
        (a, b)
    };
    let spans: Vec<(f64, f64)> = timeline.slices.iter().map(|r| window(r)).collect();
    spans
        .iter()
        .map(|&(a, b)| spans.iter().filter(|&&(c, d)| c < b && a < d).count().max(1))
        .collect()
}

pub fn tt_update_knowledge(
    previous: Option<&TtKnowledge>,
    timeline: &FrameTimeline,
    profile: &AllocationProfile,
    processing: &[f64],
    distributions: &[FrameDistribution],
) -> TtKnowledge {
    let (s_count, n) = (timeline.sensor_count(), timeline.node_count());
    let mut transmission = match previous {
        Some(k) => k.transmission.clone(),
        None => vec![vec![f64::INFINITY; n]; s_count],
    };
    for (s, row) in recover_transmission(timeline).into_iter().enumerate() {
        for (node, c) in row.into_iter().enumerate() {
            if let Some(c) = c {
                transmission[s][node] = c;
            }
        }
    }
    let mut node_loads = vec![vec![0.0; n]; s_count];
    for (s, row) in timeline.slices.iter().enumerate() {
        for t in row {
            node_loads[s][t.node] += t.width;
        }
    }
    TtKnowledge {
        transmission,
        processing: processing.to_vec(),
        profile: profile.clone(),
        distributions: distributions.to_vec(),
        contention: contention(timeline),
        node_loads,
    }
}

/// A revised allocation and the completion time its author expects.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub allocation: Allocation,
    /// MO: predicted `T_s`; TT: engine `T_s` with the others fixed.
    pub expected: f64,
    /// Expected completion of the allocation held before revising.
    pub current: f64,
}

impl Proposal {
    pub fn improves(&self) -> bool {
        self.expected < self.current * (1.0 - IMPROVEMENT_TOLERANCE)
    }
}

fn density(cfg: &ScenarioConfig, dist: &FrameDistribution) -> Option<PiecewiseCdf> {
    (cfg.alpha_d > 0.0 && !dist.is_empty())
        .then(|| PiecewiseCdf::from_distribution(dist, cfg.quantile_count, cfg.frame_width))
}

fn with_density(mut pred: PredictedCoefficients, cfg: &ScenarioConfig, dist: Option<&FrameDistribution>) -> PredictedCoefficients {
    if let Some(g) = dist.and_then(|d| density(cfg, d)) {
        pred = pred.with_density(cfg.alpha_d, g);
    }
    pred
}

fn assignments(cfg: &ScenarioConfig, restrict: Option<&[usize]>) -> Result<Vec<Vec<usize>>> {
    match restrict {
        Some(d) => Ok(vec![d.to_vec()]),
        None => enumerate_assignments(cfg.node_count, cfg.node_count, Enumeration::Exhaustive),
    }
}

/// Best allocation under the sensor's own measurements. `restrict` pins
/// the assignment. The current allocation is kept unless the new one is
/// predicted to be faster.
pub fn mo_best_response(
    knowledge: &MoKnowledge,
    current: &Allocation,
    cfg: &ScenarioConfig,
    restrict: Option<&[usize]>,
) -> Result<Proposal> {
    let pred = with_density(
        PredictedCoefficients::new(knowledge.transmission.clone(), knowledge.processing.clone(), cfg.overlap),
        cfg,
        Some(&knowledge.distribution),
    );
    let current_t = predicted_completion(current, &pred);
    let mut best: Option<(f64, Allocation)> = None;
    for d in assignments(cfg, restrict)? {
        let Ok(plan) = best_allocation_among(&pred, crate::solver::WidthMode::General, &[d]) else {
            continue;
        };
        let Some(alloc) = plan.allocation.round_to_pixels(cfg.frame_width, cfg.overlap) else {
            continue;
        };
        let t = predicted_completion(&alloc, &pred);
        if best.as_ref().map_or(true, |(bt, b)| better(t, &alloc, *bt, b)) {
            best = Some((t, alloc));
        }
    }
    Ok(match best {
        Some((t, alloc)) if t < current_t * (1.0 - IMPROVEMENT_TOLERANCE) => Proposal {
            allocation: alloc,
            expected: t,
            current: current_t,
        },
        _ => Proposal {
            allocation: current.clone(),
            expected: current_t,
            current: current_t,
        },
    })
}

/// What an engine-evaluated best response minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// The revising sensor's own completion time `T_s`, then the sum of its
    /// slice completion times.
    Sensor,
    /// The system completion time `T`, then the sum of all `T_s`.
    System,
}

/// Engine score of a candidate, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub primary: f64,
    pub secondary: f64,
}

impl Score {
    /// `self` beats `other` by more than the relative tolerance `tol`.
    pub fn beats(&self, other: &Score, tol: f64) -> bool {
        let slack = tol * other.primary.abs();
        self.primary < other.primary - slack
            || (self.primary <= other.primary + slack
                && self.secondary < other.secondary - tol * other.secondary.abs())
    }
}

/// Engine evaluation of one sensor's allocation with the others fixed.
struct Evaluator<'a> {
    cfg: ScenarioConfig,
    profile: AllocationProfile,
    sensor: usize,
    dists: &'a [FrameDistribution],
    objective: Objective,
}

impl Evaluator<'_> {
    fn timeline(&mut self, alloc: &Allocation) -> Result<FrameTimeline> {
        self.profile.allocations[self.sensor] = alloc.clone();
        simulate_unchecked(&self.profile, &self.cfg, self.dists)
    }

    fn score_of(&self, t: &FrameTimeline) -> Score {
        match self.objective {
            Objective::Sensor => Score {
                primary: t.sensor_completion[self.sensor],
                secondary: t.slices[self.sensor].iter().map(|x| x.completed).sum(),
            },
            Objective::System => Score {
                primary: t.system_completion,
                secondary: t.sensor_completion.iter().sum(),
            },
        }
    }

    fn score(&mut self, alloc: &Allocation) -> Score {
        match self.timeline(alloc) {
            Ok(t) => self.score_of(&t),
            Err(_) => Score {
                primary: f64::INFINITY,
                secondary: f64::INFINITY,
            },
        }
    }
}

/// Contention-adjusted coefficients seeding the width solver: transmission
/// inflated by the number of overlapping transmitters, processing by the
/// load the other sensors put on each node.
fn seed_coefficients(sensor: usize, k: &TtKnowledge, cfg: &ScenarioConfig) -> PredictedCoefficients {
    let kappa = k.contention.get(sensor).copied().unwrap_or(cfg.sensor_count) as f64;
    let transmission = k.transmission[sensor].iter().map(|c| kappa * c).collect();
    let processing = (0..cfg.node_count)
        .map(|n| {
            let others: f64 = (0..k.node_loads.len())
                .filter(|&s| s != sensor)
                .map(|s| k.node_loads[s][n])
                .sum();
            k.processing[n] * (1.0 + others)
        })
        .collect();
    with_density(
        PredictedCoefficients::new(transmission, processing, cfg.overlap),
        cfg,
        k.distributions.get(sensor),
    )
}

/// Local search on the pixel grid. Each move hands pixels from one slice to
/// another, shifting the cutpoints in between: a coarse scan over the whole
/// feasible range on the first pass, then finer scans around the incumbent.
fn polish(eval: &mut Evaluator<'_>, alloc: Allocation, mut best: Score, cfg: &ScenarioConfig) -> (Allocation, Score) {
    let width = cfg.frame_width;
    let min_px = min_width_pixels(cfg.overlap, width).max(1) as i64;
    let mut px: Vec<i64> = alloc.to_pixels(width).into_iter().map(i64::from).collect();
    let d = alloc.assignment.clone();
    let v = d.len();
    let to_alloc = |px: &[i64]| {
        let p: Vec<u32> = px.iter().map(|&x| x as u32).collect();
        Allocation::from_pixels(d.clone(), &p, width)
    };
    for pass in 0..3 {
        let mut moved = false;
        for i in 0..v {
            for j in i + 1..v {
                // delta pixels move from slice j to slice i
                let (wi, wj) = (px[i + 1] - px[i], px[j + 1] - px[j]);
                let (lo, hi) = (min_px - wi, wj - min_px);
                if lo >= hi {
                    continue;
                }
                let scans: &[(i64, Option<i64>)] = if pass == 0 {
                    &[(16, None), (4, Some(12)), (1, Some(3))]
                } else {
                    &[(4, Some(12)), (1, Some(3))]
                };
                let mut centre = 0;
                let base = px.clone();
                for &(step, span) in scans {
                    let (a, b) = match span {
                        None => (lo, hi),
                        Some(s) => ((centre - s).max(lo), (centre + s).min(hi)),
                    };
                    let mut delta = a;
                    while delta <= b {
                        if delta != centre {
                            let mut trial = base.clone();
                            for c in &mut trial[i + 1..=j] {
                                *c += delta;
                            }
                            let s = eval.score(&to_alloc(&trial));
                            if s.beats(&best, 1e-12) {
                                best = s;
                                px = trial;
                                centre = delta;
                                moved = true;
                            }
                        }
                        delta = if delta < b && delta + step > b { b } else { delta + step };
                    }
                }
            }
        }
        if !moved {
            break;
        }
    }
    (to_alloc(&px), best)
}

/// Candidate for one assignment: the seeded equal-finish split, re-solved a
/// few times with the coefficients it experiences in the engine.
fn candidate(
    eval: &mut Evaluator<'_>,
    d: &[usize],
    seed: &PredictedCoefficients,
    cfg: &ScenarioConfig,
) -> Option<(Allocation, Score)> {
    let width = cfg.frame_width;
    // an infeasible seed still gets a chance from the equal split
    let mut cut = optimal_widths_general(d, seed)
        .unwrap_or_else(|_| (0..=d.len()).map(|i| i as f64 / d.len() as f64).collect());
    let mut best: Option<(Allocation, Score)> = None;
    let mut last_px: Option<Vec<u32>> = None;
    for _ in 0..=FIXED_POINT_STEPS {
        let alloc = Allocation::new(d.to_vec(), cut).round_to_pixels(width, cfg.overlap)?;
        let px = alloc.to_pixels(width);
        if last_px.as_ref() == Some(&px) {
            break;
        }
        last_px = Some(px);
        let timeline = eval.timeline(&alloc).ok()?;
        let score = eval.score_of(&timeline);
        if best.as_ref().map_or(true, |(_, b)| score.beats(b, 0.0)) {
            best = Some((alloc, score));
        }
        let mut c = vec![f64::INFINITY; cfg.node_count];
        let mut p = vec![f64::INFINITY; cfg.node_count];
        for s in &timeline.slices[eval.sensor] {
            c[s.node] = s.experienced_transmission();
            p[s.node] = s.experienced_processing();
        }
        let mut pred = PredictedCoefficients::new(c, p, cfg.overlap);
        pred.alpha_d = seed.alpha_d;
        pred.density = seed.density.clone();
        match optimal_widths_general(d, &pred) {
            Ok(x) => cut = x,
            Err(_) => break,
        }
    }
    best
}

fn rank(a: &(Allocation, Score), b: &(Allocation, Score)) -> Ordering {
    if a.1.beats(&b.1, TIE_TOLERANCE) {
        Ordering::Less
    } else if b.1.beats(&a.1, TIE_TOLERANCE) {
        Ordering::Greater
    } else {
        a.0.assignment
            .cmp(&b.0.assignment)
            .then_with(|| a.0.cutpoints.partial_cmp(&b.0.cutpoints).unwrap_or(Ordering::Equal))
    }
}

/// A selfish sensor moves only for a shorter `T_s`; the system objective
/// also accepts gains in its tie-breaker.
fn accepts(objective: Objective, new: &Score, current: &Score) -> bool {
    match objective {
        Objective::Sensor => new.primary < current.primary * (1.0 - IMPROVEMENT_TOLERANCE),
        Objective::System => new.beats(current, IMPROVEMENT_TOLERANCE),
    }
}

/// Result of an engine-evaluated best response.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineResponse {
    pub allocation: Allocation,
    pub score: Score,
    /// Score of the allocation held before revising.
    pub current: Score,
}

/// Engine-evaluated best response of `sensor` against the allocations in
/// `knowledge.profile`. Candidates for every assignment come from the
/// contention-adjusted width solver, refined with experienced coefficients;
/// the best few are then searched on the pixel grid. The current
/// allocation is kept unless beaten by more than the improvement tolerance.
pub fn engine_best_response(
    sensor: usize,
    knowledge: &TtKnowledge,
    cfg: &ScenarioConfig,
    restrict: Option<&[usize]>,
    objective: Objective,
) -> Result<EngineResponse> {
    let current = knowledge.profile.allocations[sensor].clone();
    let mut believed = cfg.clone();
    believed.transmission = knowledge.transmission.clone();
    believed.processing = knowledge.processing.clone();
    let mut eval = Evaluator {
        cfg: believed,
        profile: knowledge.profile.clone(),
        sensor,
        dists: &knowledge.distributions,
        objective,
    };
    let current_score = eval.score(&current);
    let seed = seed_coefficients(sensor, knowledge, cfg);
    let known = |n: &usize| knowledge.transmission[sensor][*n].is_finite();
    let mut found: Vec<(Allocation, Score)> = Vec::new();
    for d in assignments(cfg, restrict)? {
        if !d.iter().all(known) {
            continue;
        }
        if let Some(c) = candidate(&mut eval, &d, &seed, cfg) {
            found.push(c);
        }
    }
    if current.assignment.iter().all(known) && restrict.map_or(true, |d| d == current.assignment.as_slice()) {
        found.push((current.clone(), current_score));
    }
    found.sort_by(rank);
    let mut best: Option<(Allocation, Score)> = None;
    for (alloc, score) in found.into_iter().take(POLISHED_CANDIDATES) {
        let polished = polish(&mut eval, alloc, score, cfg);
        if best.as_ref().map_or(true, |b| rank(&polished, b) == Ordering::Less) {
            best = Some(polished);
        }
    }
    Ok(match best {
        Some((allocation, score)) if accepts(objective, &score, &current_score) => EngineResponse {
            allocation,
            score,
            current: current_score,
        },
        _ => EngineResponse {
            allocation: current,
            score: current_score,
            current: current_score,
        },
    })
}

/// Best response under TT information: the allocation minimizing the
/// engine-evaluated `T_s` with every other sensor holding its last
/// allocation. `restrict` pins the assignment.
pub fn tt_best_response(
    sensor: usize,
    knowledge: &TtKnowledge,
    cfg: &ScenarioConfig,
    restrict: Option<&[usize]>,
) -> Result<Proposal> {
    let r = engine_best_response(sensor, knowledge, cfg, restrict, Objective::Sensor)?;
    Ok(Proposal {
        allocation: r.allocation,
        expected: r.score.primary,
        current: r.current.primary,
    })
}

/// Who revised the allocation used in a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reviser {
    /// Bootstrap or externally supplied profile.
    None,
    Sensor(usize),
    All,
    /// Profile installed by the coordinator.
    Coordinator,
}

impl fmt::Display for Reviser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reviser::None => f.write_str("-"),
            Reviser::Sensor(s) => write!(f, "{}", s + 1),
            Reviser::All => f.write_str("all"),
            Reviser::Coordinator => f.write_str("coordinator"),
        }
    }
}

/// Sensor revising at 1-based frame `frame` under asynchronous revision:
/// sensor `frame mod S` in 1-based numbering, sensor `S` when the residue is 0.
pub fn async_reviser(frame: usize, sensor_count: usize) -> usize {
    (frame + sensor_count - 1) % sensor_count
}

/// Merges proposals into the next profile. `proposals[s]` is `None` for
/// sensors that do not revise.
pub fn apply_revision(
    mode: RevisionMode,
    proposals: &[Option<Allocation>],
    previous: &AllocationProfile,
    cfg: &ScenarioConfig,
) -> AllocationProfile {
    let s_count = previous.sensor_count();
    let allocations = previous
        .allocations
        .iter()
        .zip(proposals)
        .map(|(prev, prop)| match (mode, prop) {
            (_, None) => prev.clone(),
            (RevisionMode::SyncS, Some(p)) if p.assignment == prev.assignment => {
                let w = 1.0 / s_count as f64;
                let cut = p
                    .cutpoints
                    .iter()
                    .zip(&prev.cutpoints)
                    .map(|(a, b)| w * a + (1.0 - w) * b)
                    .collect();
                Allocation::new(p.assignment.clone(), cut)
                    .round_to_pixels(cfg.frame_width, cfg.overlap)
                    .unwrap_or_else(|| prev.clone())
            }
            (_, Some(p)) => p.clone(),
        })
        .collect();
    AllocationProfile::new(allocations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumState {
    Transient,
    Converged,
    Cycle(usize),
}

impl fmt::Display for EquilibriumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquilibriumState::Transient => f.write_str("transient"),
            EquilibriumState::Converged => f.write_str("converged"),
            EquilibriumState::Cycle(p) => write!(f, "cycle({p})"),
        }
    }
}

/// Classifies the last `window` profiles: unchanged within `tol` pixels,
/// repeating with a period up to `window / 2`, or neither.
pub fn detect_equilibrium(history: &[AllocationProfile], window: usize, tol: f64, width: u32) -> EquilibriumState {
    if window == 0 || history.len() < window {
        return EquilibriumState::Transient;
    }
    let tail = &history[history.len() - window..];
    let close = |a: &AllocationProfile, b: &AllocationProfile| a.pixel_distance(b, width) <= tol;
    let last = &tail[window - 1];
    if tail.iter().all(|p| close(p, last)) {
        return EquilibriumState::Converged;
    }
    for period in 2..=window / 2 {
        if (period..window).all(|j| close(&tail[j], &tail[j - period])) {
            return EquilibriumState::Cycle(period);
        }
    }
    EquilibriumState::Transient
}

/// Compares completion vectors sorted in decreasing order; entries within
/// `tol` count as equal.
pub fn lexicographic_cmp(a: &[f64], b: &[f64], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x.total_cmp(y);
        }
    }
    a.len().cmp(&b.len())
}

/// One simulated frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    /// 1-based frame number.
    pub frame: usize,
    pub profile: AllocationProfile,
    pub sensor_completion: Vec<f64>,
    pub system_completion: f64,
    pub reviser: Reviser,
    pub state: EquilibriumState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunState {
    pub algorithm: Algorithm,
    /// Profile for the next frame.
    pub profile: AllocationProfile,
    pub knowledge: Vec<SensorKnowledge>,
    pub history: Vec<FrameRecord>,
    reviser: Reviser,
}

impl RunState {
    pub fn new(algorithm: Algorithm, initial: AllocationProfile) -> Self {
        Self {
            algorithm,
            profile: initial,
            knowledge: Vec::new(),
            history: Vec::new(),
            reviser: Reviser::None,
        }
    }

    /// Frames simulated so far.
    pub fn frame(&self) -> usize {
        self.history.len()
    }

    /// First frame whose record reports convergence.
    pub fn converged_at(&self) -> Option<usize> {
        self.history
            .iter()
            .find(|r| r.state == EquilibriumState::Converged)
            .map(|r| r.frame)
    }

    pub fn state(&self) -> EquilibriumState {
        self.history
            .last()
            .map_or(EquilibriumState::Transient, |r| r.state)
    }

    /// Replaces the next frame's profile, e.g. with a coordinator's choice.
    pub fn install(&mut self, profile: AllocationProfile) {
        self.install_from(profile, Reviser::None);
    }

    pub fn install_from(&mut self, profile: AllocationProfile, reviser: Reviser) {
        self.profile = profile;
        self.reviser = reviser;
    }

    /// Simulates the current profile on `dists`, records it and updates
    /// every sensor's knowledge with `dists` as next frame's prediction.
    pub fn observe(&mut self, cfg: &ScenarioConfig, dists: &[FrameDistribution]) -> Result<FrameTimeline> {
        let frame = self.history.len() + 1;
        let timeline = crate::engine::simulate_frame(&self.profile, cfg, dists)
            .map_err(|e| Error::at_frame(frame, e))?;
        let previous = std::mem::take(&mut self.knowledge);
        self.knowledge = (0..cfg.sensor_count)
            .map(|s| match self.algorithm.info {
                InfoModel::Mo => {
                    let prev = match previous.get(s) {
                        Some(SensorKnowledge::Mo(k)) => Some(k),
                        _ => None,
                    };
                    let dist = dists.get(s).cloned().unwrap_or_else(|| FrameDistribution::exact_uniform(0));
                    SensorKnowledge::Mo(mo_update_knowledge(prev, &timeline, s, dist))
                }
                InfoModel::Tt => {
                    let prev = match previous.get(s) {
                        Some(SensorKnowledge::Tt(k)) => Some(k),
                        _ => None,
                    };
                    SensorKnowledge::Tt(tt_update_knowledge(prev, &timeline, &self.profile, &cfg.processing, dists))
                }
            })
            .collect();
        let mut profiles: Vec<AllocationProfile> = self.history.iter().map(|r| r.profile.clone()).collect();
        profiles.push(self.profile.clone());
        let window = 3 * cfg.sensor_count;
        let state = detect_equilibrium(&profiles, window, EQUILIBRIUM_PIXELS, cfg.frame_width);
        log::debug!(
            "frame {frame} reviser {} T {:.6} {state}",
            self.reviser,
            timeline.system_completion
        );
        self.history.push(FrameRecord {
            frame,
            profile: self.profile.clone(),
            sensor_completion: timeline.sensor_completion.clone(),
            system_completion: timeline.system_completion,
            reviser: self.reviser,
            state,
        });
        Ok(timeline)
    }

    /// Best response of `sensor` from its current knowledge.
    pub fn propose(&self, sensor: usize, cfg: &ScenarioConfig, restrict: Option<&[usize]>) -> Result<Proposal> {
        match &self.knowledge[sensor] {
            SensorKnowledge::Mo(k) => mo_best_response(k, &self.profile.allocations[sensor], cfg, restrict),
            SensorKnowledge::Tt(k) => tt_best_response(sensor, k, cfg, restrict),
        }
    }

    /// Lets the sensors entitled to the next frame revise. With
    /// `frozen_assignments`, every sensor keeps its assignment.
    pub fn revise(&mut self, cfg: &ScenarioConfig, frozen_assignments: bool) -> Result<()> {
        let next = self.history.len() + 1;
        let revising: Vec<usize> = match self.algorithm.revision {
            RevisionMode::Async => vec![async_reviser(next, cfg.sensor_count)],
            RevisionMode::Sync | RevisionMode::SyncS => (0..cfg.sensor_count).collect(),
        };
        let mut proposals = vec![None; cfg.sensor_count];
        for &s in &revising {
            let d = self.profile.allocations[s].assignment.clone();
            let restrict = frozen_assignments.then_some(d.as_slice());
            let p = self.propose(s, cfg, restrict).map_err(|e| Error::at_frame(next, e))?;
            proposals[s] = Some(p.allocation);
        }
        self.profile = apply_revision(self.algorithm.revision, &proposals, &self.profile, cfg);
        self.reviser = match self.algorithm.revision {
            RevisionMode::Async => Reviser::Sensor(revising[0]),
            _ => Reviser::All,
        };
        Ok(())
    }

    /// Checks that no sensor can improve by a unilateral deviation: under
    /// MO by its own prediction, under TT by engine evaluation against the
    /// others' allocations. Uses the knowledge from the last observed frame.
    pub fn certify(&self, cfg: &ScenarioConfig) -> Result<bool> {
        let Some(last) = self.history.last() else {
            return Ok(false);
        };
        let slack = CERTIFICATION_TOLERANCE * last.system_completion;
        for s in 0..cfg.sensor_count {
            let mut p = self.propose(s, cfg, None)?;
            if let SensorKnowledge::Tt(k) = &self.knowledge[s] {
                if k.profile != self.profile {
                    let mut k = k.clone();
                    k.profile = self.profile.clone();
                    p = tt_best_response(s, &k, cfg, None)?;
                }
            }
            if p.expected < p.current - slack {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Runs `algorithm` from `initial` for one frame per entry of `frames`.
pub fn run_from(
    cfg: &ScenarioConfig,
    frames: &[Vec<FrameDistribution>],
    algorithm: Algorithm,
    initial: AllocationProfile,
) -> Result<RunState> {
    let mut state = RunState::new(algorithm, initial);
    for (i, dists) in frames.iter().enumerate() {
        state.observe(cfg, dists)?;
        if i + 1 < frames.len() {
            state.revise(cfg, false)?;
        }
    }
    Ok(state)
}

/// Runs `algorithm` from the bootstrap profile.
pub fn run_distributed(cfg: &ScenarioConfig, frames: &[Vec<FrameDistribution>], algorithm: Algorithm) -> Result<RunState> {
    run_from(cfg, frames, algorithm, bootstrap_profile(cfg))
}
