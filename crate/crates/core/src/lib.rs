//! Downlink capacity planning for a public-safety network built from sparse
//! stationary base stations plus a mobile base station dispatched to an
//! incident at the cell edge.
//!
//! - [`geometry`]: square-grid layout and lattice UE placement
//! - [`channel`]: path loss and power/noise conversions
//! - [`throughput`]: closed-form aggregate rates for the conventional and
//!   the two-tier (TDRS/FDRS) architectures
//! - [`montecarlo`]: fading-sampling oracle for those closed forms
//! - [`planner`]: side-length sweeps, feasibility and fleet sizing
//! - [`scenario`]: a full parameter set, minus the side length

pub mod channel;
pub mod geometry;
pub mod montecarlo;
pub mod planner;
pub mod scenario;
pub mod throughput;

pub use channel::{dbm_to_watts, path_gain, LinkGain, PathLossModel, PowerConfig};
pub use geometry::{build_layout, distance, CellLayout, IncidentScene, Point};
pub use montecarlo::{mc_report, mc_success_probability, McConfig, McEstimate, McReport};
pub use planner::{
    fleet_comparison, max_feasible_side, sweep, Constraint, Feasibility, FleetComparison,
    Requirements, Rounding, SweepCurve,
};
pub use scenario::{GeometryParams, Scenario};
pub use throughput::{
    aggregate_throughput, conventional_throughputs, proposed_access_throughputs,
    proposed_backhaul_throughput, success_probability, validate_sharing, Architecture,
    IncidentInterferers, LinkBudget, LinkModels, RadioConfig, ResourceSharing, SharingMode,
    ThroughputReport,
};
