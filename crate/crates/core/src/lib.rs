//! Shared-mental-model discrepancy analysis.
//!
//! Per-agent mental models are built from annotated dialogue updates and
//! compared against each other and against an authoritative ground truth.
//! Four kinds of misalignment are detected (belief contradictions,
//! omissions, unsupported beliefs and false beliefs), counted per episode,
//! and used to predict later episodes through a weighted sum of earlier
//! episode counts.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line tool live in the `smm` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
#[macro_use]
extern crate std;

pub mod belief;
pub mod discrepancy;
pub mod episode;
pub mod predictor;
pub mod scenario;
pub mod scoring;
pub mod stats;
pub mod synth;

pub use belief::{
    AgentId, Attitude, BeliefError, Entry, LevelId, MentalModel, Op, Polarity, PropId, Proposition,
    Snapshot, TeamId, UpdateEvent,
};
pub use discrepancy::{
    Discrepancy, DiscrepancyKey, DiscrepancyKind, EngineError, EngineState, StepDelta,
};
pub use episode::{EpisodeCounts, EpisodeError, KindCounts, TeamHistory};
pub use predictor::{Measure, PredictError, Prediction, PredictionReport, WeightScheme};
pub use scenario::{Confirmation, GroundTruth, LevelSpec, Record, Scenario, ScenarioError};
pub use scoring::{ConfirmationLog, Difficulty, ScoreCard, ScoreError, TargetSpec};
pub use stats::{CorrelationResult, StatsError};
