use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::integrator::ModelKind;
use crate::control::{PiConfig, Thresholds};
use crate::converter::{CircuitParams, ConnectionStructure, DutyCommand, Phasing, CHANNELS, D_M_MAX};
use crate::error::{Error, Result};
use crate::pv::{AtmosphereSample, Datasheet};

/// A complete simulation run description. Serialized as TOML; see
/// [`crate::io::parse_scenario`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub duration: f64,
    /// Integration step; defaults depend on the model (see [`Scenario::dt_sim`]).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_sim: Option<f64>,
    #[serde(default = "defaults::dt_control")]
    pub dt_control: f64,
    #[serde(default = "defaults::record_interval")]
    pub record_interval: f64,
    /// Fraction of each phase discarded before steady-state means are taken.
    #[serde(default = "defaults::settle_fraction")]
    pub settle_fraction: f64,
    #[serde(default)]
    pub model: ModelKind,
    pub sources: Sources,
    #[serde(default)]
    pub panel: Datasheet,
    #[serde(default)]
    pub circuit: CircuitParams,
    #[serde(default)]
    pub control: ControlConfig,
    #[serde(default = "defaults::atmosphere")]
    pub initial_atmosphere: Vec<AtmosphereSample>,
    /// CSV file with header `t,ir1,t1,ir2,t2`, relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mission_profile: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<Event>,
    /// Published values to compare phase means against.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference: Vec<ReferenceValue>,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

mod defaults {
    use crate::pv::AtmosphereSample;

    pub fn dt_control() -> f64 {
        5e-5
    }
    pub fn record_interval() -> f64 {
        1e-4
    }
    pub fn settle_fraction() -> f64 {
        0.5
    }
    pub fn atmosphere() -> Vec<AtmosphereSample> {
        vec![AtmosphereSample::STC; crate::converter::CHANNELS]
    }
    pub fn d_m() -> f64 {
        0.5
    }
    pub fn pno_period() -> f64 {
        1e-3
    }
    pub fn start_fraction() -> f64 {
        0.8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sources {
    /// Stiff DC sources.
    Ideal { voltages: [f64; CHANNELS] },
    /// One calibrated PV string per channel.
    Pv,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    #[serde(default = "defaults::d_m")]
    pub d_m: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub pno: PnoConfig,
    #[serde(default = "ControlConfig::default_voltage_loop")]
    pub voltage_loop: PiConfig,
    #[serde(default = "ControlConfig::default_current_loop")]
    pub current_loop: PiConfig,
}

impl ControlConfig {
    pub fn default_voltage_loop() -> PiConfig {
        PiConfig {
            kp: 0.7,
            ki: 100.0,
            out_min: 0.0,
            out_max: 20.0,
        }
    }

    pub fn default_current_loop() -> PiConfig {
        PiConfig {
            kp: 0.002,
            ki: 250.0,
            out_min: 0.0,
            out_max: 1.0,
        }
    }
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig {
            d_m: defaults::d_m(),
            thresholds: Thresholds::default(),
            pno: PnoConfig::default(),
            voltage_loop: Self::default_voltage_loop(),
            current_loop: Self::default_current_loop(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PnoConfig {
    /// Time between reference updates, s.
    #[serde(default = "defaults::pno_period")]
    pub period: f64,
    /// Reference step, V. Defaults to 0.5 % of the string's STC open-circuit voltage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Starting reference as a fraction of the present open-circuit voltage.
    #[serde(default = "defaults::start_fraction")]
    pub start_fraction: f64,
}

impl Default for PnoConfig {
    fn default() -> Self {
        PnoConfig {
            period: defaults::pno_period(),
            step: None,
            start_fraction: defaults::start_fraction(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Event {
    /// Forces a connection structure with fixed duties (open loop).
    Structure {
        t: f64,
        structure: ConnectionStructure,
        duties: [f64; CHANNELS],
        #[serde(default)]
        phasing: Phasing,
    },
    /// Steps one channel's irradiance and/or temperature. `channel` is 1-based.
    Atmosphere {
        t: f64,
        channel: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        irradiance: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        temperature: Option<f64>,
    },
}

impl Event {
    pub fn t(&self) -> f64 {
        match *self {
            Event::Structure { t, .. } | Event::Atmosphere { t, .. } => t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "v_o")]
    VOut,
    #[serde(rename = "i_o")]
    IOut,
    #[serde(rename = "i_l")]
    IL,
    #[serde(rename = "v_pv1")]
    VPv1,
    #[serde(rename = "v_pv2")]
    VPv2,
    #[serde(rename = "i_pv1")]
    IPv1,
    #[serde(rename = "i_pv2")]
    IPv2,
    #[serde(rename = "p_pv1")]
    PPv1,
    #[serde(rename = "p_pv2")]
    PPv2,
    /// Total source power.
    #[serde(rename = "p_in")]
    PIn,
    /// Load power.
    #[serde(rename = "p_out")]
    POut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValue {
    /// 1-based phase index.
    pub phase: usize,
    pub quantity: Quantity,
    pub value: f64,
    /// Marks a reference that is known not to be physically consistent; it
    /// is reported but not expected to match.
    #[serde(default)]
    pub flagged: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Scenario {
    pub fn dt_sim(&self) -> f64 {
        self.dt_sim.unwrap_or(match self.model {
            ModelKind::Averaged => 1e-5,
            ModelKind::Switched => 1.0 / (100.0 * self.circuit.f_sw),
        })
    }

    pub fn is_open_loop(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, Event::Structure { .. }))
    }

    /// Events in time order; ties keep file order.
    pub fn sorted_events(&self) -> Vec<Event> {
        let mut ev = self.events.clone();
        ev.sort_by(|a, b| a.t().total_cmp(&b.t()));
        ev
    }

    /// Phase boundaries: `0`, every distinct event time inside the run, and
    /// `duration`.
    pub fn phase_bounds(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        for e in self.sorted_events() {
            let t = e.t();
            if t > 0.0 && t < self.duration && t > *b.last().unwrap() {
                b.push(t);
            }
        }
        b.push(self.duration);
        b
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be finite and > 0, got {v}")))
            }
        };
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(Error::config("duration", "must be finite and >= 0"));
        }
        positive("dt_sim", self.dt_sim())?;
        positive("dt_control", self.dt_control)?;
        positive("record_interval", self.record_interval)?;
        if self.dt_sim() > self.dt_control {
            return Err(Error::config("dt_sim", "must not exceed dt_control"));
        }
        if self.record_interval < self.dt_sim() {
            return Err(Error::config("record_interval", "must be at least dt_sim"));
        }
        if !(0.0..1.0).contains(&self.settle_fraction) {
            return Err(Error::config("settle_fraction", "must lie in [0, 1)"));
        }
        self.circuit.validate()?;
        if self.model == ModelKind::Switched && self.dt_sim() > 1.0 / (50.0 * self.circuit.f_sw) {
            return Err(Error::config(
                "dt_sim",
                "switched model needs dt_sim <= 1/(50 f_sw)",
            ));
        }

        let c = &self.control;
        if !(0.0..=D_M_MAX).contains(&c.d_m) {
            return Err(Error::config(
                "control.d_m",
                format!("boost duty must lie in [0, {D_M_MAX}], got {}", c.d_m),
            ));
        }
        c.thresholds.validate()?;
        positive("control.pno.period", c.pno.period)?;
        if c.pno.period < self.dt_control {
            return Err(Error::config("control.pno.period", "must be at least dt_control"));
        }
        if let Some(step) = c.pno.step {
            positive("control.pno.step", step)?;
        }
        if !(c.pno.start_fraction > 0.0 && c.pno.start_fraction <= 1.0) {
            return Err(Error::config("control.pno.start_fraction", "must lie in (0, 1]"));
        }
        c.voltage_loop.validate("control.voltage_loop")?;
        c.current_loop.validate("control.current_loop")?;

        if self.initial_atmosphere.len() != CHANNELS {
            return Err(Error::config(
                "initial_atmosphere",
                format!("needs exactly {CHANNELS} entries"),
            ));
        }
        for a in &self.initial_atmosphere {
            a.validate()
                .map_err(|e| Error::config("initial_atmosphere", e.to_string()))?;
        }

        if let Sources::Ideal { voltages } = self.sources {
            if voltages.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::config("sources.voltages", "must be finite and >= 0"));
            }
            if !self.is_open_loop() {
                return Err(Error::config(
                    "events",
                    "ideal sources need forced structure events",
                ));
            }
            if self.mission_profile.is_some() {
                return Err(Error::config("mission_profile", "requires pv sources"));
            }
        }

        for (k, e) in self.events.iter().enumerate() {
            let key = format!("events[{k}]");
            let t = e.t();
            if !(t.is_finite() && t >= 0.0 && t <= self.duration) {
                return Err(Error::config(format!("{key}.t"), "must lie in [0, duration]"));
            }
            match *e {
                Event::Structure {
                    structure,
                    duties,
                    phasing,
                    ..
                } => {
                    let cmd = DutyCommand {
                        d: duties,
                        d_m: c.d_m,
                        structure,
                        phasing,
                    };
                    cmd.validate()
                        .map_err(|err| Error::config(key.clone(), err.to_string()))?;
                }
                Event::Atmosphere {
                    channel,
                    irradiance,
                    temperature,
                    ..
                } => {
                    if !(1..=CHANNELS).contains(&channel) {
                        return Err(Error::config(
                            format!("{key}.channel"),
                            format!("must be 1..={CHANNELS}"),
                        ));
                    }
                    if irradiance.is_none() && temperature.is_none() {
                        return Err(Error::config(
                            key,
                            "needs irradiance and/or temperature",
                        ));
                    }
                    let a = AtmosphereSample {
                        irradiance: irradiance.unwrap_or(0.0),
                        temperature: temperature.unwrap_or(25.0),
                    };
                    a.validate()
                        .map_err(|err| Error::config(key.clone(), err.to_string()))?;
                    if self.mission_profile.is_some() {
                        return Err(Error::config(
                            key,
                            "atmosphere events cannot be combined with a mission profile",
                        ));
                    }
                }
            }
        }
        if self.is_open_loop() && self.duration > 0.0 {
            let first = self
                .sorted_events()
                .into_iter()
                .find(|e| matches!(e, Event::Structure { .. }));
            if first.map(|e| e.t()) != Some(0.0) {
                return Err(Error::config(
                    "events",
                    "open-loop runs need a structure event at t = 0",
                ));
            }
        }

        let phases = self.phase_bounds().len() - 1;
        for (k, r) in self.reference.iter().enumerate() {
            if !(1..=phases).contains(&r.phase) {
                return Err(Error::config(
                    format!("reference[{k}].phase"),
                    format!("must be 1..={phases}"),
                ));
            }
        }
        Ok(())
    }

    pub fn mission_profile_path(&self) -> Option<PathBuf> {
        self.mission_profile.as_ref().map(|p| match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        })
    }
}
