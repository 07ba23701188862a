//! Hexagonal macro-cell RAN simulator.
//!
//! A 19-site grid serves Poisson-placed stationary UEs. Each run sweeps the
//! transmit power of a variable cell set and reports throughput, power
//! consumption, spectral efficiency and energy efficiency.

pub mod config;
pub mod energy;
pub mod engine;
pub mod metrics;
pub mod radio;
pub mod records;
pub mod rng;
pub mod scenario;
pub mod topology;
pub mod units;

pub use config::{ConfigError, RunConfig, SimContext};
pub use energy::{PowerModel, PowerModelParams};
pub use engine::{run, Command, EngineError, RicHook, RunRecord, SimView, Simulation};
pub use metrics::{aggregate_seeds, GroupKey, RunMetrics, SeedAggregate, SetMetrics};
pub use radio::{LinkBudget, LinkTables, PathlossModel};
pub use records::{CellRow, LogSink, UeRow};
pub use scenario::{PowerLevel, Scenario};
pub use topology::{NetworkConfig, Point3, Region, SitePlan};
