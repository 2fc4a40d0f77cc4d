//! Single-sensor divisible-load allocation.
//!
//! Under predicted coefficients a sensor sends its slices one after another
//! and node `d(v)` finishes at
//! `sum_{u<=v} C[d(u)] * volume_u + P[d(v)] * load_v`. The optimal widths for a
//! fixed assignment make every used node finish at the same instant; the
//! assignment is then chosen by enumeration.

use crate::engine::simulate_frame;
use crate::error::{Error, Result};
use crate::model::{
    min_width_pixels, transmitted_volume, Allocation, AllocationProfile, FrameDistribution,
    PiecewiseCdf, ScenarioConfig,
};

/// Exhaustive enumeration is refused above this many nodes.
pub const MAX_EXHAUSTIVE_NODES: usize = 6;
/// Engine evaluations allowed in [`brute_force_ctm`].
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;
/// Normalized-coordinate tolerance of the bisections.
pub const BISECTION_TOLERANCE: f64 = 1e-9;
pub const MAX_BISECTION_STEPS: usize = 200;
/// Relative gap under which two predicted completion times tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// What one sensor believes about the nodes for the coming frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedCoefficients {
    /// Per node; non-finite entries mark nodes the sensor knows nothing about.
    pub transmission: Vec<f64>,
    pub processing: Vec<f64>,
    pub overlap: f64,
    pub alpha_d: f64,
    /// Interest-point CDF; `None` means the load is the slice width alone.
    pub density: Option<PiecewiseCdf>,
}

impl PredictedCoefficients {
    pub fn new(transmission: Vec<f64>, processing: Vec<f64>, overlap: f64) -> Self {
        Self {
            transmission,
            processing,
            overlap,
            alpha_d: 0.0,
            density: None,
        }
    }

    pub fn with_density(mut self, alpha_d: f64, density: PiecewiseCdf) -> Self {
        self.alpha_d = alpha_d;
        self.density = Some(density);
        self
    }

    pub fn node_count(&self) -> usize {
        self.processing.len()
    }

    pub fn scaled(&self, sigma: f64) -> Self {
        let mut p = self.clone();
        p.transmission.iter_mut().for_each(|c| *c *= sigma);
        p.processing.iter_mut().for_each(|c| *c *= sigma);
        p
    }

    fn knows(&self, node: usize) -> bool {
        self.transmission[node].is_finite() && self.processing[node].is_finite()
    }

    fn load(&self, a: f64, b: f64) -> f64 {
        let y = b - a;
        match &self.density {
            Some(g) if self.alpha_d > 0.0 => y + self.alpha_d * g.slice_mass(a, b),
            _ => y,
        }
    }
}

/// Per-node finish times of one sensor alone under `pred`, in slice order.
pub fn node_finish_times(assignment: &[usize], cutpoints: &[f64], pred: &PredictedCoefficients) -> Vec<f64> {
    let v_count = assignment.len();
    let mut tx = 0.0;
    assignment
        .iter()
        .enumerate()
        .map(|(v, &n)| {
            let (a, b) = (cutpoints[v], cutpoints[v + 1]);
            tx += pred.transmission[n] * transmitted_volume(b - a, v, v_count, pred.overlap);
            tx + pred.processing[n] * pred.load(a, b)
        })
        .collect()
}

/// Predicted completion `T_s`: the latest node finish.
pub fn predicted_completion(alloc: &Allocation, pred: &PredictedCoefficients) -> f64 {
    node_finish_times(&alloc.assignment, &alloc.cutpoints, pred)
        .into_iter()
        .fold(0.0, f64::max)
}

/// Closed-form equal-finish widths when the load is the slice width alone.
///
/// Walks the width recursion backwards from the last slice,
/// `y_v = (o_{v+1} C[d(v+1)] + (P[d(v+1)] + C[d(v+1)]) y_{v+1}) / P[d(v)]`,
/// where `o_{v+1}` is `o` for the last slice and `2o` otherwise, and
/// normalizes so the widths sum to one. Fails when any width is below `o`.
pub fn optimal_widths_linear(assignment: &[usize], pred: &PredictedCoefficients) -> Result<Vec<f64>> {
    let v_count = assignment.len();
    if v_count <= 1 {
        return Ok(vec![0.0, 1.0]);
    }
    let o = pred.overlap;
    // y_v = a[v] + b[v] * y_last
    let mut a = vec![0.0; v_count];
    let mut b = vec![0.0; v_count];
    b[v_count - 1] = 1.0;
    for v in (0..v_count - 1).rev() {
        let next = assignment[v + 1];
        let (c_next, p_next) = (pred.transmission[next], pred.processing[next]);
        let p_here = pred.processing[assignment[v]];
        let strip = if v + 1 == v_count - 1 { o } else { 2.0 * o };
        a[v] = (strip * c_next + (p_next + c_next) * a[v + 1]) / p_here;
        b[v] = ((p_next + c_next) * b[v + 1]) / p_here;
    }
    let last = (1.0 - a.iter().sum::<f64>()) / b.iter().sum::<f64>();
    let widths: Vec<f64> = a.iter().zip(&b).map(|(a, b)| a + b * last).collect();
    if widths.iter().any(|&y| !(y >= o - BISECTION_TOLERANCE) || !(y > 0.0)) {
        return Err(Error::InfeasibleWidths { slices: v_count });
    }
    Ok(Allocation::from_widths(assignment.to_vec(), &widths).cutpoints)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Sweep {
    /// Target finish time unreachable: raise it.
    TooEarly,
    /// Target finish time leaves slack: lower it.
    TooLate,
}

struct SweepResult {
    status: Sweep,
    clamped: bool,
    last_finish: f64,
    cutpoints: Vec<f64>,
}

/// Largest `x` in `[lo, hi]` with `f(x) <= target` for a nondecreasing `f`
/// that is linear between consecutive `knots` (right-continuous at jumps),
/// given `f(lo) <= target <= f(hi)`.
fn invert_piecewise(lo: f64, hi: f64, knots: &[f64], f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut points = Vec::with_capacity(knots.len() + 2);
    points.push(lo);
    points.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
    points.push(hi);
    let j = points.partition_point(|&p| f(p) < target).clamp(1, points.len() - 1);
    let (a, b) = (points[j - 1], points[j]);
    let fa = f(a);
    if fa >= target || b <= a {
        return a;
    }
    let mid = 0.5 * (a + b);
    let slope = (f(mid) - fa) / (mid - a);
    let x = if slope > 0.0 { a + (target - fa) / slope } else { b };
    if x < b {
        x
    } else if f(b) > target {
        // the target falls inside a jump at `b`: stay left of it
        b - 1e-12
    } else {
        b
    }
}

/// Places cutpoints left to right so that every node but the last finishes
/// at `target`.
fn sweep(assignment: &[usize], pred: &PredictedCoefficients, target: f64) -> SweepResult {
    let v_count = assignment.len();
    let min_w = pred.overlap.max(1e-12);
    let mut cutpoints = vec![0.0; v_count + 1];
    cutpoints[v_count] = 1.0;
    let mut tx = 0.0;
    for v in 0..v_count - 1 {
        let n = assignment[v];
        let prev = cutpoints[v];
        let finish = |x: f64| {
            tx + pred.transmission[n] * transmitted_volume(x - prev, v, v_count, pred.overlap)
                + pred.processing[n] * pred.load(prev, x)
        };
        let lo = prev + min_w;
        let hi = 1.0 - min_w * (v_count - 1 - v) as f64;
        let (x, status) = if lo > hi || finish(lo) > target {
            (lo.min(hi), Some(Sweep::TooEarly))
        } else if finish(hi) < target {
            (hi, Some(Sweep::TooLate))
        } else {
            let knots = pred.density.as_ref().map_or(&[][..], PiecewiseCdf::knots);
            (invert_piecewise(lo, hi, knots, finish, target), None)
        };
        cutpoints[v + 1] = x;
        tx += pred.transmission[n] * transmitted_volume(x - prev, v, v_count, pred.overlap);
        if let Some(status) = status {
            for c in &mut cutpoints[v + 2..v_count] {
                *c = x;
            }
            return SweepResult {
                status,
                clamped: true,
                last_finish: f64::NAN,
                cutpoints,
            };
        }
    }
    let n = assignment[v_count - 1];
    let prev = cutpoints[v_count - 1];
    let last_finish = tx
        + pred.transmission[n] * transmitted_volume(1.0 - prev, v_count - 1, v_count, pred.overlap)
        + pred.processing[n] * pred.load(prev, 1.0);
    SweepResult {
        status: if last_finish > target {
            Sweep::TooEarly
        } else {
            Sweep::TooLate
        },
        clamped: false,
        last_finish,
        cutpoints,
    }
}

/// Equal-finish widths with interest-point load, by nested search: an outer
/// bracketed search on the common finish time and, inside it, a
/// left-to-right solve for each cutpoint (a node's finish grows strictly with
/// its right cutpoint and is linear between CDF knots). Without a density
/// this reproduces [`optimal_widths_linear`].
pub fn optimal_widths_general(assignment: &[usize], pred: &PredictedCoefficients) -> Result<Vec<f64>> {
    let v_count = assignment.len();
    if v_count <= 1 {
        return Ok(vec![0.0, 1.0]);
    }
    let total_points = pred.density.as_ref().map_or(0.0, PiecewiseCdf::total);
    let mut hi = assignment
        .iter()
        .map(|&n| pred.transmission[n] * (1.0 + 2.0 * pred.overlap))
        .sum::<f64>()
        + assignment
            .iter()
            .map(|&n| pred.processing[n] * (1.0 + pred.alpha_d * total_points))
            .fold(0.0, f64::max);
    // Bracketed search on the common finish time: false position with the
    // Illinois correction once both ends carry a residual, bisection before.
    let mut lo = 0.0;
    let (mut h_lo, mut h_hi): (Option<f64>, Option<f64>) = (None, None);
    let mut side = 0i8;
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mut t = match (h_lo, h_hi) {
            (Some(a), Some(b)) if a > b => lo + a * (hi - lo) / (a - b),
            _ => 0.5 * (lo + hi),
        };
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let r = sweep(assignment, pred, t);
        let h = (!r.clamped).then(|| r.last_finish - t);
        if h.is_some_and(|h| h.abs() <= 1e-13 * t) {
            hi = t;
            break;
        }
        match r.status {
            Sweep::TooEarly => {
                lo = t;
                h_lo = h;
                if side == -1 {
                    h_hi = h_hi.map(|v| 0.5 * v);
                }
                side = -1;
            }
            Sweep::TooLate => {
                hi = t;
                h_hi = h;
                if side == 1 {
                    h_lo = h_lo.map(|v| 0.5 * v);
                }
                side = 1;
            }
        }
    }
    // A jump in the interest-point CDF can leave no exact equal-finish split;
    // the two sides of the final bracket are then compared by latest finish.
    let worst = |cut: &[f64]| node_finish_times(assignment, cut, pred).into_iter().fold(0.0, f64::max);
    let widths_ok = |cut: &[f64]| {
        cut.windows(2)
            .all(|w| w[1] - w[0] >= pred.overlap - BISECTION_TOLERANCE)
    };
    let on_jump = |x: f64| {
        pred.density
            .as_ref()
            .is_some_and(|g| g.eval(x) - g.eval(x - 1e-12) > 1e-9 * g.total().max(1.0))
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for t in [hi, lo] {
        let r = sweep(assignment, pred, t);
        if r.clamped || !widths_ok(&r.cutpoints) {
            continue;
        }
        let balanced = (r.last_finish - t).abs() <= 1e-9 * t;
        if !balanced && !r.cutpoints[1..v_count].iter().any(|&x| on_jump(x)) {
            continue;
        }
        let m = worst(&r.cutpoints);
        if best.as_ref().map_or(true, |(bm, _)| m < *bm) {
            best = Some((m, r.cutpoints));
        }
    }
    best.map(|(_, cut)| cut)
        .ok_or(Error::InfeasibleWidths { slices: v_count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthMode {
    /// Closed-form recursion; interest points ignored.
    Linear,
    /// Nested bisection with the predicted interest-point density.
    General,
}

pub fn optimal_widths(assignment: &[usize], pred: &PredictedCoefficients, mode: WidthMode) -> Result<Vec<f64>> {
    match mode {
        WidthMode::Linear => optimal_widths_linear(assignment, pred),
        WidthMode::General => optimal_widths_general(assignment, pred),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Enumeration<'a> {
    /// Every sequence of distinct nodes.
    Exhaustive,
    /// One ordering per node subset: increasing transmission coefficient
    /// (node index breaks ties). Optimal when processing coefficients are equal.
    Pruned(&'a [f64]),
}

/// All assignments of length `1..=max_len`, by length then lexicographically.
pub fn enumerate_assignments(nodes: usize, max_len: usize, mode: Enumeration<'_>) -> Result<Vec<Vec<usize>>> {
    let max_len = max_len.min(nodes);
    let mut out = Vec::new();
    match mode {
        Enumeration::Exhaustive => {
            if nodes > MAX_EXHAUSTIVE_NODES {
                return Err(Error::SizeGuard {
                    size: nodes as u128,
                    limit: MAX_EXHAUSTIVE_NODES as u128,
                });
            }
            for len in 1..=max_len {
                let mut current = Vec::with_capacity(len);
                permutations(nodes, len, &mut current, &mut out);
            }
        }
        Enumeration::Pruned(coeffs) => {
            if coeffs.len() != nodes {
                return Err(Error::Dimension(format!("{} coefficients for {nodes} nodes", coeffs.len())));
            }
            let mut order: Vec<usize> = (0..nodes).collect();
            order.sort_by(|&a, &b| coeffs[a].total_cmp(&coeffs[b]).then(a.cmp(&b)));
            for len in 1..=max_len {
                let mut subsets = Vec::new();
                let mut current = Vec::with_capacity(len);
                combinations(&order, len, 0, &mut current, &mut subsets);
                subsets.sort();
                out.extend(subsets);
            }
        }
    }
    Ok(out)
}

fn permutations(nodes: usize, len: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    for n in 0..nodes {
        if !current.contains(&n) {
            current.push(n);
            permutations(nodes, len, current, out);
            current.pop();
        }
    }
}

fn combinations(order: &[usize], len: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    for i in start..order.len() {
        current.push(order[i]);
        combinations(order, len, i + 1, current, out);
        current.pop();
    }
}

/// An allocation with its predicted completion time.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorPlan {
    pub allocation: Allocation,
    pub predicted: f64,
}

/// `true` when `a` should replace `b` as the incumbent argmin.
pub(crate) fn better(a_t: f64, a: &Allocation, b_t: f64, b: &Allocation) -> bool {
    let tol = TIE_TOLERANCE * a_t.abs().max(b_t.abs());
    if a_t < b_t - tol {
        return true;
    }
    if a_t > b_t + tol {
        return false;
    }
    match a.assignment.cmp(&b.assignment) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            a.cutpoints.partial_cmp(&b.cutpoints) == Some(std::cmp::Ordering::Less)
        }
    }
}

/// Best plan among `assignments`; assignments touching unknown nodes or
/// without a feasible equal-finish split are skipped.
pub fn best_allocation_among(
    pred: &PredictedCoefficients,
    mode: WidthMode,
    assignments: &[Vec<usize>],
) -> Result<SensorPlan> {
    let mut best: Option<SensorPlan> = None;
    for d in assignments {
        if !d.iter().all(|&n| pred.knows(n)) {
            continue;
        }
        let cutpoints = match optimal_widths(d, pred, mode) {
            Ok(x) => x,
            Err(Error::InfeasibleWidths { .. }) => continue,
            Err(e) => return Err(e),
        };
        let allocation = Allocation::new(d.clone(), cutpoints);
        let predicted = predicted_completion(&allocation, pred);
        let replace = match &best {
            None => true,
            Some(b) => better(predicted, &allocation, b.predicted, &b.allocation),
        };
        if replace {
            best = Some(SensorPlan {
                allocation,
                predicted,
            });
        }
    }
    best.ok_or(Error::InfeasibleWidths { slices: 0 })
}

/// Enumerates every assignment, solves its widths and keeps the lowest
/// predicted completion time (ties: smallest assignment, then cutpoints).
pub fn best_single_sensor_allocation(pred: &PredictedCoefficients, mode: WidthMode) -> Result<SensorPlan> {
    let n = pred.node_count();
    let assignments = enumerate_assignments(n, n, Enumeration::Exhaustive)?;
    best_allocation_among(pred, mode, &assignments)
}

/// Every pixel-grid allocation of one sensor with interior cutpoints on
/// multiples of `stride` pixels.
/// Generation stops as soon as more than `cap` options exist.
fn grid_allocations(nodes: usize, width: u32, overlap: f64, stride: u32, cap: usize) -> Result<Vec<Allocation>> {
    let min_px = min_width_pixels(overlap, width);
    let mut out = Vec::new();
    for d in enumerate_assignments(nodes, nodes, Enumeration::Exhaustive)? {
        let mut pixels = vec![0u32];
        grid_cuts(&d, width, min_px, stride, cap, &mut pixels, &mut out);
        if out.len() > cap {
            break;
        }
    }
    Ok(out)
}

fn grid_cuts(
    d: &[usize],
    width: u32,
    min_px: u32,
    stride: u32,
    cap: usize,
    pixels: &mut Vec<u32>,
    out: &mut Vec<Allocation>,
) {
    if out.len() > cap {
        return;
    }
    let placed = pixels.len() - 1;
    let remaining = d.len() - placed;
    let last = *pixels.last().unwrap();
    if remaining == 1 {
        if width - last >= min_px {
            pixels.push(width);
            out.push(Allocation::from_pixels(d.to_vec(), pixels, width));
            pixels.pop();
        }
        return;
    }
    let lo = last + min_px;
    let mut x = lo.div_ceil(stride) * stride;
    while x + min_px * (remaining as u32 - 1) <= width {
        pixels.push(x);
        grid_cuts(d, width, min_px, stride, cap, pixels, out);
        pixels.pop();
        x += stride;
    }
}

/// Exhaustive CTM search: every assignment profile and every cutpoint grid
/// with the given pixel stride, evaluated by the engine. For tiny instances
/// only; returns the first minimizer in enumeration order.
pub fn brute_force_ctm(
    cfg: &ScenarioConfig,
    dists: &[FrameDistribution],
    stride: u32,
) -> Result<(AllocationProfile, f64)> {
    if stride == 0 {
        return Err(Error::Config("stride must be positive".into()));
    }
    let s_count = cfg.sensor_count;
    let mut cap = (BRUTE_FORCE_LIMIT as f64).powf(1.0 / s_count as f64).floor() as u128 + 1;
    while cap.checked_pow(s_count as u32).map_or(true, |v| v > BRUTE_FORCE_LIMIT) {
        cap -= 1;
    }
    let options = grid_allocations(cfg.node_count, cfg.frame_width, cfg.overlap, stride, cap as usize)?;
    let size = (options.len() as u128).checked_pow(s_count as u32).unwrap_or(u128::MAX);
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeGuard {
            size,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut index = vec![0usize; s_count];
    let mut best: Option<(AllocationProfile, f64)> = None;
    loop {
        let profile = AllocationProfile::new(index.iter().map(|&i| options[i].clone()).collect());
        let t = simulate_frame(&profile, cfg, dists)?.system_completion;
        if best.as_ref().map_or(true, |(_, bt)| t < *bt) {
            best = Some((profile, t));
        }
        // odometer increment
        let mut k = s_count;
        loop {
            if k == 0 {
                return Ok(best.expect("at least one profile"));
            }
            k -= 1;
            index[k] += 1;
            if index[k] < options.len() {
                break;
            }
            index[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(c: &[f64], p: &[f64], o: f64) -> PredictedCoefficients {
        PredictedCoefficients::new(c.to_vec(), p.to_vec(), o)
    }

    #[test]
    fn linear_widths_for_the_two_node_fixture() {
        let x = optimal_widths_linear(&[0, 1], &pred(&[2.0, 2.0], &[10.0, 10.0], 0.1)).unwrap();
        assert!((x[1] - 6.1 / 11.0).abs() < 1e-9);
        let x = optimal_widths_linear(&[0, 1], &pred(&[1.0, 1.0], &[1.0, 1.0], 0.0)).unwrap();
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(optimal_widths_linear(&[1], &pred(&[1.0, 1.0], &[1.0, 1.0], 0.1)).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn slow_second_node_is_infeasible() {
        let p = pred(&[1.0, 100.0], &[1.0, 1.0], 0.3);
        assert!(matches!(optimal_widths_linear(&[0, 1], &p), Err(Error::InfeasibleWidths { .. })));
        assert!(matches!(optimal_widths_general(&[0, 1], &p), Err(Error::InfeasibleWidths { .. })));
        assert!(matches!(optimal_widths_linear(&[1, 0], &p), Err(Error::InfeasibleWidths { .. })));
        let plan = best_single_sensor_allocation(&p, WidthMode::Linear).unwrap();
        assert_eq!(plan.allocation.assignment, vec![0]);
        assert!((plan.predicted - 2.0).abs() < 1e-12);
    }

    #[test]
    fn general_matches_linear_without_interest_points() {
        let p = pred(&[1.0, 2.0, 1.5], &[3.0, 4.0, 2.0], 0.05);
        for d in [vec![0, 1], vec![2, 0, 1], vec![1, 2, 0]] {
            let a = optimal_widths_linear(&d, &p).unwrap();
            let b = optimal_widths_general(&d, &p).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9, "{d:?}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        let two = enumerate_assignments(2, 2, Enumeration::Exhaustive).unwrap();
        assert_eq!(two, vec![vec![0], vec![1], vec![0, 1], vec![1, 0]]);
        assert_eq!(enumerate_assignments(4, 4, Enumeration::Exhaustive).unwrap().len(), 64);
        let pruned = enumerate_assignments(3, 3, Enumeration::Pruned(&[3.0, 1.0, 2.0])).unwrap();
        let full: Vec<_> = pruned.iter().filter(|d| d.len() == 3).collect();
        assert_eq!(full, vec![&vec![1, 2, 0]]);
        assert_eq!(pruned.len(), 7);
        assert!(matches!(
            enumerate_assignments(7, 7, Enumeration::Exhaustive),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn symmetric_tie_picks_smallest_assignment() {
        let plan = best_single_sensor_allocation(&pred(&[1.0, 1.0], &[5.0, 5.0], 0.1), WidthMode::Linear).unwrap();
        assert_eq!(plan.allocation.assignment, vec![0, 1]);
        assert!((plan.allocation.cutpoints[1] - 6.1 / 11.0).abs() < 1e-12);
        assert!((plan.predicted - (6.0 * 6.1 / 11.0 + 0.1)).abs() < 1e-12);
        assert!((plan.predicted - 3.425).abs() < 0.005);
    }

    #[test]
    fn unknown_nodes_are_skipped() {
        let p = pred(&[1.0, f64::INFINITY], &[5.0, 5.0], 0.1);
        let plan = best_single_sensor_allocation(&p, WidthMode::General).unwrap();
        assert_eq!(plan.allocation.assignment, vec![0]);
    }

    #[test]
    fn brute_force_single_sensor_single_node() {
        let mut cfg = ScenarioConfig::from_coefficients(vec![vec![1.0]], vec![1.0]).unwrap();
        cfg.alpha_d = 0.0;
        cfg.overlap = 0.1;
        let (profile, t) = brute_force_ctm(&cfg, &[], 10).unwrap();
        assert_eq!(profile.allocations[0], Allocation::whole(0));
        assert_eq!(t, 2.0);
    }

    #[test]
    fn brute_force_guard() {
        let cfg = ScenarioConfig::for_topology(1, 100.0, &Default::default()).unwrap();
        assert!(matches!(brute_force_ctm(&cfg, &[], 1), Err(Error::SizeGuard { .. })));
    }
}
