//! Agent-based model of traders' channel choices under peer influence.
//!
//! Sellers rank every potential buyer by a weighted mean of price, distance,
//! debt and social sub-scores. The social sub-score propagates the trading
//! scores of a seller's strongest peers, so choices feed back into each other
//! until the active network stops changing. Around the model sit baseline
//! selection rules, a real-coded genetic calibrator and policy scenarios.
//!
//! The crate is `no_std` (with `alloc`). Enable `std` for `std::error::Error`
//! impls and `parallel` to spread per-seller passes and population
//! evaluation across a rayon pool; results do not depend on the thread count.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calibration;
pub mod domain;
mod error;
pub mod metrics;
pub mod nullmodels;
mod par;
pub mod scenarios;
pub mod scoring;
pub mod simulation;
pub mod socialnet;
mod unionfind;

pub use calibration::{evaluate, ga_run, FitnessTrace, GaConfig, GaResult, Genome};
pub use domain::{
    AgentId, BuyerAgent, Dataset, DistanceMatrix, EmpiricalLink, GlobalParams, LinkKey,
    SellerAgent, ValidationReport, Violation, ViolationKind,
};
pub use error::Error;
pub use metrics::{ComponentStats, ObservationRecord, ScenarioIndicators};
pub use nullmodels::NullModelKind;
pub use scenarios::{ScenarioId, ScenarioSpec};
pub use simulation::{Model, ModelConfig, ModelState, NBuyerMode, RunReport};

/// Seeded generator used for every stochastic decision in the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub type Result<T, E = Error> = core::result::Result<T, E>;
