//! Domain vocabulary shared by the simulator, the I/O layer and the planner.

mod network;
mod params;
mod result;
mod scenario;
mod schedule;

pub use network::{ContagionNetwork, WeightMatrix};
pub use params::{
    ModelParams, ParamsBuilder, DEFAULT_DT_HOURS, DEFAULT_HORIZON_HOURS, DEFAULT_OMEGA,
    DEFAULT_REPORT_EVERY_HOURS, DIVISIBILITY_TOLERANCE,
};
pub use result::{Manifest, SimulationResult, TOOL_NAME, TOOL_VERSION};
pub use scenario::{AgentId, AgentState, Scenario};
pub use schedule::{Breakpoint, PiecewiseSchedule};

pub(crate) use network::collect_violations as collect_network_violations;
pub(crate) use network::full_within_groups_matrix;
pub(crate) use scenario::collect_state_violations;
pub(crate) use schedule::collect_violations as collect_schedule_violations;
