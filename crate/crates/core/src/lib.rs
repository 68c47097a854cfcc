//! Simulation and control of a programmable multi-input buck-boost converter
//! fed by two PV strings.
//!
//! The converter joins its two inputs in parallel, in cascade (series) or
//! uses a single input, chosen from the switch pattern. A mode selector picks
//! the structure from irradiance and temperature; perturb-and-observe MPPT
//! with dual-loop PI regulation sets the input duties.
//!
//! ```
//! use mippv::converter::{steady_state, CircuitParams, ConnectionStructure, DutyCommand, Phasing};
//!
//! let cmd = DutyCommand {
//!     d: [0.5, 0.5],
//!     d_m: 0.5,
//!     structure: ConnectionStructure::Parallel,
//!     phasing: Phasing::Interleaved,
//! };
//! let ss = steady_state(cmd.structure, &[100.0, 100.0], &cmd, &CircuitParams::default()).unwrap();
//! assert!((ss.v_o - 200.0).abs() < 1e-9);
//! assert!((ss.i_in[0] - 10.0).abs() < 1e-9);
//! ```

pub mod cli;
pub mod control;
pub mod converter;
pub mod error;
pub mod io;
pub mod pv;
pub mod sim;

pub use control::{select_mode, OperatingMode, Regime, Thresholds};
pub use converter::{CircuitParams, ConnectionStructure, ConverterState, DutyCommand};
pub use error::{Error, Result};
pub use pv::{calibrate_panel, AtmosphereSample, Datasheet, PanelParams, PvCurve};
pub use sim::{run_scenario, Scenario, WaveformRecord};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pv-strings.md")]
    mod pv_strings {}
    #[doc = include_str!("../../../book/src/structures.md")]
    mod structures {}
    #[doc = include_str!("../../../book/src/control.md")]
    mod control {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/scenario-format.md")]
    mod scenario_format {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
