//! Fixed-step time-domain simulation of the converter and its controller.

mod engine;
pub mod integrator;
pub mod profile;
mod record;
mod scenario;

pub use engine::{run_scenario, run_with_profile};
pub use integrator::{integrate_step, rk4_step, ChannelSource, ModelKind, OdeState, StepInputs};
pub use profile::{load_mission_profile, MissionProfile};
pub use record::{Sample, WaveformRecord};
pub use scenario::{
    ControlConfig, Event, PnoConfig, Quantity, ReferenceValue, Scenario, Sources,
};
