//! Obstacle avoidance inside a bounded superquadric workspace by
//! modulation of a first-order dynamical system.

pub mod demo;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod integrator;
pub mod linalg;
pub mod modulation;
pub mod scenario_io;
pub mod verify;

pub use error::{Error, Result};
pub use flow::{
    eval_modulated, Evaluation, FlowParams, Method, ModeState, ModulatedDs, OriginalDs, SignPref,
};
pub use geometry::{Region, Superquadric};
pub use integrator::{
    simulate, sweep_field, FieldSample, GridSpec, IntegratorConfig, Outcome, Trajectory,
    TrajectorySample, TrajectoryStats,
};
pub use linalg::{Mat3, Vec3};
pub use modulation::ModulationParams;
pub use scenario_io::{parse_scenario, parse_scenario_with_overrides, write_scenario, Scenario};
