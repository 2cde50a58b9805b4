//! Fuzzy cellular automaton traffic model.
//!
//! Vehicle positions, velocities and gaps are ordered fuzzy numbers ([`Ofn`]),
//! four-integer tuples with componentwise arithmetic. On top of the single-lane
//! automaton ([`model`]) the crate provides fuzzy performance measures
//! ([`measures`]), fuzzy initial states from imprecise vehicle counts
//! ([`imprecision`]), a probabilistic comparison of fuzzy results
//! ([`comparison`]) and a signal-controlled work-zone case study
//! ([`workzone`]).

pub mod cli;
pub mod comparison;
pub mod config;
pub mod imprecision;
pub mod measures;
pub mod model;
pub mod ofn;
pub mod output;
pub mod workzone;

pub use comparison::{prob_less, uncertainty, Comparator, ComparisonResult};
pub use measures::{History, PerformanceReport};
pub use model::{AccelerationRule, LaneState, SignalColor, Vehicle, VehicleId};
pub use ofn::{IntPredicate, Ofn};
pub use workzone::{
    compare_strategies, run_strategy, ScenarioConfig, Strategy, StrategyComparison,
};
