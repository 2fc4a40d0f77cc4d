//! Experiments: interest-point traces, synthetic frames, runs and their
//! per-frame results.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coordinator::{build_dictionary, coordinated_run};
use crate::dynamics::{run_distributed, EquilibriumState, Reviser, RunState};
use crate::error::{Error, Result};
use crate::model::{Algorithm, FrameDistribution, ScenarioConfig};

/// Interest points of every sensor in every frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSet {
    frames: Vec<Vec<FrameDistribution>>,
}

impl TraceSet {
    /// Fails unless every frame holds one nonempty distribution per sensor.
    pub fn new(frames: Vec<Vec<FrameDistribution>>) -> Result<Self> {
        let Some(first) = frames.first() else {
            return Err(Error::EmptyTrace);
        };
        let sensors = first.len();
        if sensors == 0 {
            return Err(Error::Dimension("trace frame without sensors".into()));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.len() != sensors {
                return Err(Error::Dimension(format!(
                    "frame {} has {} sensors, expected {sensors}",
                    i + 1,
                    f.len()
                )));
            }
            if f.iter().any(FrameDistribution::is_empty) {
                return Err(Error::Dimension(format!("frame {} has a sensor without points", i + 1)));
            }
        }
        Ok(Self { frames })
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn sensor_count(&self) -> usize {
        self.frames[0].len()
    }

    pub fn frames(&self) -> &[Vec<FrameDistribution>] {
        &self.frames
    }

    /// The first `count` frames.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        Self::new(self.frames.iter().take(count).cloned().collect())
    }
}

/// Reads `frame,sensor,x_norm` rows. Frame and sensor identifiers are
/// integers in any order; they are numbered in ascending order.
pub fn read_trace<R: Read>(input: R) -> Result<TraceSet> {
    use std::collections::BTreeMap;
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let expected = ["frame", "sensor", "x_norm"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(Error::Trace {
            line: 1,
            msg: "header must be `frame,sensor,x_norm`".into(),
        });
    }
    let mut points: BTreeMap<u64, BTreeMap<u64, Vec<f64>>> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |msg: String| Error::Trace { line, msg };
        if rec.len() != 3 {
            return Err(bad(format!("{} fields, expected 3", rec.len())));
        }
        let frame: u64 = rec[0].trim().parse().map_err(|e| bad(format!("frame `{}`: {e}", &rec[0])))?;
        let sensor: u64 = rec[1].trim().parse().map_err(|e| bad(format!("sensor `{}`: {e}", &rec[1])))?;
        let x: f64 = rec[2].trim().parse().map_err(|e| bad(format!("x_norm `{}`: {e}", &rec[2])))?;
        if !(0.0..=1.0).contains(&x) {
            return Err(bad(format!("x_norm {x} outside [0, 1]")));
        }
        points.entry(frame).or_default().entry(sensor).or_default().push(x);
    }
    if points.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let sensors: Vec<u64> = points
        .values()
        .flat_map(|f| f.keys().copied())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut frames = Vec::with_capacity(points.len());
    for (frame, by_sensor) in points {
        let mut row = Vec::with_capacity(sensors.len());
        for s in &sensors {
            let Some(p) = by_sensor.get(s) else {
                return Err(Error::Dimension(format!("frame {frame} has no points for sensor {s}")));
            };
            row.push(FrameDistribution::new(p.clone())?);
        }
        frames.push(row);
    }
    TraceSet::new(frames)
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<TraceSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(std::io::BufReader::new(file))
}

/// Writes 1-based frame and sensor numbers.
pub fn write_trace<W: Write>(trace: &TraceSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["frame", "sensor", "x_norm"])?;
    for (f, frame) in trace.frames.iter().enumerate() {
        for (s, dist) in frame.iter().enumerate() {
            for x in dist.points() {
                w.write_record([(f + 1).to_string(), (s + 1).to_string(), x.to_string()])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

pub fn save_trace(trace: &TraceSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(trace, std::io::BufWriter::new(file))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Synthetic {
    /// Independent uniform draws per frame and sensor.
    Uniform,
    /// Points at `(k - 0.5) / n`, identical in every frame.
    ExactUniform,
}

impl FromStr for Synthetic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Synthetic::Uniform),
            "exact-uniform" => Ok(Synthetic::ExactUniform),
            _ => Err(Error::Config(format!("unknown synthetic kind `{s}`"))),
        }
    }
}

impl fmt::Display for Synthetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Synthetic::Uniform => "uniform",
            Synthetic::ExactUniform => "exact-uniform",
        })
    }
}

/// Synthetic trace; `seed` only matters for [`Synthetic::Uniform`].
pub fn synth_uniform(kind: Synthetic, frames: usize, sensors: usize, points: usize, seed: u64) -> Result<TraceSet> {
    if points == 0 {
        return Err(Error::Config("synthetic frames need at least one point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = (0..frames)
        .map(|_| {
            (0..sensors)
                .map(|_| match kind {
                    Synthetic::ExactUniform => Ok(FrameDistribution::exact_uniform(points)),
                    Synthetic::Uniform => FrameDistribution::new((0..points).map(|_| rng.gen::<f64>()).collect()),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    TraceSet::new(frames)
}

/// Coordinator parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coordination {
    /// Frames between refreshes (`R`).
    pub inter_refresh: usize,
    /// Nearest entries compared by engine evaluation (`L`).
    pub candidates: usize,
    /// Training frames stored in the dictionary (`M`).
    pub dictionary_size: usize,
}

/// Outcome of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// 1-based.
    pub frame: usize,
    pub system_completion: f64,
    pub sensor_completion: Vec<f64>,
    pub reviser: Reviser,
    pub state: EquilibriumState,
    pub algorithm: Algorithm,
    pub topology: Option<usize>,
}

pub fn rows_from(state: &RunState, cfg: &ScenarioConfig) -> Vec<ResultRow> {
    state
        .history
        .iter()
        .map(|r| ResultRow {
            frame: r.frame,
            system_completion: r.system_completion,
            sensor_completion: r.sensor_completion.clone(),
            reviser: r.reviser,
            state: r.state,
            algorithm: state.algorithm,
            topology: cfg.topology,
        })
        .collect()
}

/// Runs `cfg.algorithm` over the trace, coordinated when asked. The
/// dictionary of a coordinated run is built from the trace's first
/// `dictionary_size` frames.
pub fn run_experiment(cfg: &ScenarioConfig, trace: &TraceSet, coordination: Option<Coordination>) -> Result<RunState> {
    if trace.sensor_count() != cfg.sensor_count {
        return Err(Error::Dimension(format!(
            "trace has {} sensors, scenario {}",
            trace.sensor_count(),
            cfg.sensor_count
        )));
    }
    match coordination {
        None => run_distributed(cfg, trace.frames(), cfg.algorithm),
        Some(c) => {
            let training = &trace.frames()[..c.dictionary_size.clamp(1, trace.frame_count())];
            let dict = build_dictionary(training, cfg, c.dictionary_size)?;
            coordinated_run(cfg, trace.frames(), cfg.algorithm, c.inter_refresh, c.candidates, &dict)
        }
    }
}

/// CSV with header `frame,system_t,t_s1..t_sS,reviser,state`.
pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let sensors = rows.first().map_or(0, |r| r.sensor_completion.len());
    let mut header = vec!["frame".to_string(), "system_t".to_string()];
    header.extend((1..=sensors).map(|s| format!("t_s{s}")));
    header.extend(["reviser".to_string(), "state".to_string()]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.frame.to_string(), r.system_completion.to_string()];
        rec.extend(r.sensor_completion.iter().map(f64::to_string));
        rec.extend([r.reviser.to_string(), r.state.to_string()]);
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<results>", e))?;
    Ok(())
}

/// Aggregate view of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// `(p, T)` at `p = 0.01, 0.02, ..., 1.00`: the smallest observed `T`
    /// with empirical CDF at least `p`.
    pub cdf: Vec<(f64, f64)>,
    pub converged_at: Option<usize>,
}

impl Summary {
    /// Empirical quantile at probability `p` from the CDF grid.
    pub fn quantile(&self, p: f64) -> f64 {
        let k = ((p * 100.0).ceil() as usize).clamp(1, 100);
        self.cdf[k - 1].1
    }

    pub fn write_cdf<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["probability", "system_t"])?;
        for (p, t) in &self.cdf {
            w.write_record([format!("{p:.2}"), t.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<summary>", e))?;
        Ok(())
    }
}

pub fn summarize(rows: &[ResultRow]) -> Result<Summary> {
    if rows.is_empty() {
        return Err(Error::Empty("result rows"));
    }
    let mut t: Vec<f64> = rows.iter().map(|r| r.system_completion).collect();
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    t.sort_by(f64::total_cmp);
    let n = t.len();
    let cdf = (1..=100)
        .map(|k| {
            let p = k as f64 / 100.0;
            let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
            (p, t[idx])
        })
        .collect();
    Ok(Summary {
        mean,
        min: t[0],
        max: t[n - 1],
        cdf,
        converged_at: rows
            .iter()
            .find(|r| r.state == EquilibriumState::Converged)
            .map(|r| r.frame),
    })
}
