//! Divisible-load offloading of visual feature extraction in multi-camera
//! sensor networks.
//!
//! Sensors cut each frame into vertical slices and ship them to processing
//! nodes over a shared, airtime-fair wireless channel. This crate provides
//!
//! - [`model`]: scenario types, topologies, radio-derived coefficients and
//!   interest-point distributions,
//! - [`engine`]: the deterministic per-frame timeline simulator,
//! - [`solver`]: single-sensor divisible-load allocation and a brute-force
//!   oracle for tiny instances,
//! - [`dynamics`]: the distributed best-response algorithms (MO/TT with
//!   asynchronous or synchronous revision) and equilibrium detection,
//! - [`coordinator`]: the centralized optimizer, the profile dictionary and
//!   coordinated operation,
//! - [`harness`]: traces, synthetic data, experiment orchestration and CSV
//!   export.

pub mod coordinator;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod harness;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    Allocation, AllocationProfile, FrameDistribution, RadioParams, ScenarioConfig, Topology,
};
pub use engine::{simulate_frame, FrameTimeline};
pub use model::{Algorithm, InfoModel, RevisionMode};
