//! Demand-response scheduling engine for a 24-hour microgrid horizon.
//!
//! The pipeline: ingest a day of per-load demand, solar availability, and
//! prices ([`ingest`]); detect DR event windows from price/load thresholds
//! ([`dr_events`]); build the multi-period dispatch LP ([`lp`]); solve it with
//! the embedded bounded-variable simplex ([`solver`]); convert the solution
//! back into a physical schedule with cost and savings metrics ([`schedule`]);
//! and orchestrate single days or archetype batches ([`scenario`]).

pub mod config;
pub mod dr_events;
pub mod ingest;
pub mod lp;
pub mod schedule;
pub mod scenario;
pub mod solver;
pub mod synth;

pub use config::ModelConfig;
pub use ingest::{DayProfile, LoadAggregates};
