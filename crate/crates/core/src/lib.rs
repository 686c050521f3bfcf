//! Agent-based simulation of end-user dissatisfaction in a power grid.
//!
//! End-users are agents grouped into residential areas. Their
//! dissatisfaction rises when electricity is shed and spreads to neighbours
//! over media channels whose reach depends on Internet access. The crate
//! provides
//!
//! * [`dynamics`]: the deterministic Euler engine ([`simulate`]) and the
//!   generic feature-update rule it specialises;
//! * [`metrics`]: per-group and global satisfaction statistics;
//! * [`scenario_io`]: JSON scenario documents, the built-in 48-hour case
//!   study, and CSV/manifest output;
//! * [`planner`]: a fairness-aware rolling-blackout planner that scores
//!   candidate shedding schedules by simulating them;
//! * [`cli`]: the `socio-grid-sim` command line.
//!
//! ```
//! use socio_grid_sim::scenario_io::{builtin_case_study, CaseStudyVariant};
//! use socio_grid_sim::simulate;
//!
//! let result = simulate(&builtin_case_study(CaseStudyVariant::FullAccess)).unwrap();
//! let s48 = result.mean_satisfaction_at(48.0).unwrap();
//! assert!((0.85..=0.95).contains(&s48));
//! ```

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod planner;
pub mod scenario_io;
pub mod types;

pub use dynamics::simulate;
pub use error::{Error, Result, ValidationError, Violation};
pub use types::{
    AgentId, AgentState, ContagionNetwork, ModelParams, PiecewiseSchedule, Scenario,
    SimulationResult, WeightMatrix,
};
