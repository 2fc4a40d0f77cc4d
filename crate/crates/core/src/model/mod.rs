//! Scenario construction: configuration, topologies, radio-derived
//! coefficients, interest-point distributions and allocations.

mod allocation;
mod config;
mod distribution;
pub mod radio;
pub mod topology;

pub use allocation::{
    check_profile, min_width_pixels, transmitted_volume, Allocation, AllocationProfile, Violation,
    ViolationKind, GRID_TOLERANCE,
};
pub use config::{
    Algorithm, ConfigFile, InfoModel, RevisionMode, ScenarioConfig, DEFAULT_ALPHA_D,
    DEFAULT_DICTIONARY_SIZE, DEFAULT_FRAMES, DEFAULT_FRAME_WIDTH, DEFAULT_OVERLAP,
    DEFAULT_QUANTILES,
};
pub use distribution::{FrameDistribution, PiecewiseCdf};
pub use radio::{channel_coefficients, processing_coefficients, RadioParams};
pub use topology::{build_topology, Position, Topology};

use crate::error::{Error, Result};

/// Full check of a profile against a scenario, including the pixel grid.
pub fn validate_profile(profile: &AllocationProfile, cfg: &ScenarioConfig) -> Result<(), Vec<Violation>> {
    let mut v = check_profile(profile, cfg.node_count, cfg.overlap, Some(cfg.frame_width));
    if profile.sensor_count() != cfg.sensor_count {
        v.insert(
            0,
            Violation {
                sensor: 0,
                kind: ViolationKind::SensorCount {
                    expected: cfg.sensor_count,
                    found: profile.sensor_count(),
                },
            },
        );
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Like [`validate_profile`] but as a crate error.
pub fn ensure_valid(profile: &AllocationProfile, cfg: &ScenarioConfig) -> Result<()> {
    validate_profile(profile, cfg).map_err(Error::InvalidProfile)
}
