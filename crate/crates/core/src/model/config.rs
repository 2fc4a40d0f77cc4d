//! Scenario configuration and its TOML file form.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::radio::{channel_coefficients, processing_coefficients, RadioParams};
use crate::model::topology::build_topology;

/// What a sensor learns between frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfoModel {
    /// Measurement only: own experienced coefficients.
    Mo,
    /// Transmission-time signaling: broadcast intervals, widths and `P_n`.
    Tt,
}

/// Which sensors may revise at a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RevisionMode {
    /// Sensor `i mod S` revises at frame `i`.
    Async,
    /// Every sensor adopts its best response outright.
    Sync,
    /// Every sensor revises; cutpoints are averaged with weight `1/S`.
    SyncS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Algorithm {
    pub info: InfoModel,
    pub revision: RevisionMode,
}

impl Algorithm {
    pub const MO_A: Algorithm = Algorithm::new(InfoModel::Mo, RevisionMode::Async);
    pub const MO_S: Algorithm = Algorithm::new(InfoModel::Mo, RevisionMode::SyncS);
    pub const TT_A: Algorithm = Algorithm::new(InfoModel::Tt, RevisionMode::Async);
    pub const TT_S: Algorithm = Algorithm::new(InfoModel::Tt, RevisionMode::SyncS);

    pub const fn new(info: InfoModel, revision: RevisionMode) -> Self {
        Self { info, revision }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let info = match self.info {
            InfoModel::Mo => "mo",
            InfoModel::Tt => "tt",
        };
        let rev = match self.revision {
            RevisionMode::Async => "a",
            RevisionMode::Sync => "sync",
            RevisionMode::SyncS => "s",
        };
        write!(f, "{info}-{rev}")
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('/', "-").as_str() {
            "mo-a" => Ok(Self::MO_A),
            "mo-s" => Ok(Self::MO_S),
            "tt-a" => Ok(Self::TT_A),
            "tt-s" => Ok(Self::TT_S),
            "mo-sync" => Ok(Self::new(InfoModel::Mo, RevisionMode::Sync)),
            "tt-sync" => Ok(Self::new(InfoModel::Tt, RevisionMode::Sync)),
            other => Err(Error::Config(format!(
                "unknown algorithm '{other}' (expected mo-a, mo-s, tt-a, tt-s, mo-sync or tt-sync)"
            ))),
        }
    }
}

/// Every static parameter of a run. Node and sensor indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub sensor_count: usize,
    pub node_count: usize,
    /// Frame width in pixels.
    pub frame_width: u32,
    /// Overlap strip width, fraction of the frame width.
    pub overlap: f64,
    /// Processing load per interest point, in frame-width units.
    pub alpha_d: f64,
    /// `transmission[s][n]`: seconds to send a full frame from `s` to `n` alone.
    pub transmission: Vec<Vec<f64>>,
    /// `processing[n]`: seconds to process one unit of load at `n` alone.
    pub processing: Vec<f64>,
    pub frame_count: usize,
    pub algorithm: Algorithm,
    /// Frames between coordinator refreshes; `None` runs uncoordinated.
    pub inter_refresh: Option<usize>,
    /// Dictionary entries compared by engine evaluation (`L`).
    pub candidates: usize,
    /// Dictionary size (`M`).
    pub dictionary_size: usize,
    /// Quantile count `Q`; `Q - 1` quantiles describe a frame.
    pub quantile_count: usize,
    pub rng_seed: u64,
    /// Topology the coefficients were derived from, for reporting.
    pub topology: Option<usize>,
}

pub const DEFAULT_FRAME_WIDTH: u32 = 720;
pub const DEFAULT_OVERLAP: f64 = 0.06;
/// 400 interest points then add half a frame of processing load.
pub const DEFAULT_ALPHA_D: f64 = 0.00125;
pub const DEFAULT_QUANTILES: usize = 16;
pub const DEFAULT_DICTIONARY_SIZE: usize = 64;
pub const DEFAULT_FRAMES: usize = 500;

impl ScenarioConfig {
    /// Scenario with explicit coefficients and default everything else.
    pub fn from_coefficients(transmission: Vec<Vec<f64>>, processing: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            sensor_count: transmission.len(),
            node_count: processing.len(),
            frame_width: DEFAULT_FRAME_WIDTH,
            overlap: DEFAULT_OVERLAP,
            alpha_d: DEFAULT_ALPHA_D,
            transmission,
            processing,
            frame_count: DEFAULT_FRAMES,
            algorithm: Algorithm::TT_A,
            inter_refresh: None,
            candidates: 1,
            dictionary_size: DEFAULT_DICTIONARY_SIZE,
            quantile_count: DEFAULT_QUANTILES,
            rng_seed: 0,
            topology: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// One of the five evaluation topologies with radio-derived coefficients.
    pub fn for_topology(index: usize, side_length: f64, radio: &RadioParams) -> Result<Self> {
        let topo = build_topology(index, side_length)?;
        let c = channel_coefficients(&topo, radio)?;
        let p = processing_coefficients(&c, topo.sensor_count())?;
        let mut cfg = Self::from_coefficients(c, p)?;
        cfg.topology = Some(index);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sensor_count == 0 || self.node_count == 0 {
            return bad("need at least one sensor and one node".into());
        }
        if self.transmission.len() != self.sensor_count
            || self.transmission.iter().any(|r| r.len() != self.node_count)
        {
            return bad(format!(
                "transmission matrix must be {}x{}",
                self.sensor_count, self.node_count
            ));
        }
        if self.processing.len() != self.node_count {
            return bad(format!("processing vector must have {} entries", self.node_count));
        }
        if !self.transmission.iter().flatten().all(|&c| c > 0.0) {
            return bad("transmission coefficients must be positive".into());
        }
        if !self.processing.iter().all(|&p| p > 0.0 && p.is_finite()) {
            return bad("processing coefficients must be positive".into());
        }
        if !(self.overlap >= 0.0 && self.overlap < 0.5) {
            return bad(format!("overlap {} outside [0, 1/2)", self.overlap));
        }
        if self.frame_width < 2 {
            return bad("frame width must be at least 2 pixels".into());
        }
        if !(self.alpha_d >= 0.0 && self.alpha_d.is_finite()) {
            return bad("alpha_d must be non-negative".into());
        }
        if self.inter_refresh == Some(0) {
            return bad("inter-refresh interval must be at least 1".into());
        }
        if self.candidates == 0 {
            return bad("candidate count must be at least 1".into());
        }
        if self.quantile_count < 2 {
            return bad("quantile count must be at least 2".into());
        }
        Ok(())
    }

    /// Same scenario with every coefficient multiplied by `sigma`.
    pub fn scaled(&self, sigma: f64) -> Self {
        let mut c = self.clone();
        c.transmission.iter_mut().flatten().for_each(|x| *x *= sigma);
        c.processing.iter_mut().for_each(|x| *x *= sigma);
        c
    }

    pub fn load_toml(path: impl AsRef<Path>) -> Result<Self> {
        ConfigFile::load(path)?.resolve()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        ConfigFile::from_toml_str(text)?.resolve()
    }
}

/// On-disk configuration. Every key is optional; unknown keys are rejected.
///
/// ```toml
/// topology = 4              # 1..=5, derives both coefficient sets
/// side_length = 100.0       # meters
/// frame_width = 720
/// overlap = 0.06
/// alpha_d = 0.00125
/// frame_count = 500
/// algorithm = "tt"          # "mo" | "tt"
/// revision = "async"        # "async" | "sync" | "sync-s"
/// inter_refresh = 16        # omit for uncoordinated runs
/// candidates = 1
/// dictionary_size = 64
/// quantile_count = 16
/// rng_seed = 7
/// # transmission_coeffs = [[...], ...]   # overrides the topology
/// # processing_coeffs = [...]
/// # sensor_count / node_count: optional cross-checks
///
/// [radio]
/// bandwidth_hz = 20e6
/// noise_dbm = -70.0
/// carrier_hz = 2.4e9
/// tx_power_dbm = 10.0
/// frame_bits = 2764800.0
/// ```
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub sensor_count: Option<usize>,
    pub node_count: Option<usize>,
    pub topology: Option<usize>,
    pub side_length: Option<f64>,
    pub radio: Option<RadioParams>,
    pub transmission_coeffs: Option<Vec<Vec<f64>>>,
    pub processing_coeffs: Option<Vec<f64>>,
    pub frame_width: Option<u32>,
    pub overlap: Option<f64>,
    pub alpha_d: Option<f64>,
    pub frame_count: Option<usize>,
    pub algorithm: Option<InfoModel>,
    pub revision: Option<RevisionMode>,
    pub inter_refresh: Option<usize>,
    pub candidates: Option<usize>,
    pub dictionary_size: Option<usize>,
    pub quantile_count: Option<usize>,
    pub rng_seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let radio = self.radio.unwrap_or_default();
        let side = self.side_length.unwrap_or(100.0);
        let mut cfg = match (&self.transmission_coeffs, self.topology) {
            (Some(c), _) => {
                let p = match &self.processing_coeffs {
                    Some(p) => p.clone(),
                    None => processing_coefficients(c, c.len())?,
                };
                let mut cfg = ScenarioConfig::from_coefficients(c.clone(), p)?;
                cfg.topology = self.topology;
                cfg
            }
            (None, Some(t)) => {
                let mut cfg = ScenarioConfig::for_topology(t, side, &radio)?;
                if let Some(p) = &self.processing_coeffs {
                    cfg.processing = p.clone();
                }
                cfg
            }
            (None, None) => ScenarioConfig::for_topology(1, side, &radio)?,
        };
        if let Some(s) = self.sensor_count.filter(|&s| s != cfg.sensor_count) {
            return Err(Error::Config(format!(
                "sensor_count = {s} but coefficients describe {} sensors",
                cfg.sensor_count
            )));
        }
        if let Some(n) = self.node_count.filter(|&n| n != cfg.node_count) {
            return Err(Error::Config(format!(
                "node_count = {n} but coefficients describe {} nodes",
                cfg.node_count
            )));
        }
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        set!(frame_width, overlap, alpha_d, frame_count, candidates, dictionary_size, quantile_count, rng_seed);
        if let Some(info) = self.algorithm {
            cfg.algorithm.info = info;
        }
        if let Some(rev) = self.revision {
            cfg.algorithm.revision = rev;
        }
        cfg.inter_refresh = self.inter_refresh;
        cfg.validate()?;
        Ok(cfg)
    }
}
