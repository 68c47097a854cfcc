//! Mode selection, perturb-and-observe MPPT and the dual-loop PI that turns
//! a PV voltage reference into an input-switch duty.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::converter::{ConnectionStructure, DutyCommand, Phasing, CHANNELS};
use crate::error::{Error, Result};
use crate::pv::AtmosphereSample;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Irradiance above which the strings are stacked in cascade, W/m².
    pub ir_th: f64,
    /// Temperature below which full parallel MPPT is allowed, °C.
    pub t_th: f64,
    /// Irradiance floor for an unshaded panel, W/m².
    pub ir_low: f64,
    /// Temperature floor for an unshaded panel, °C.
    pub t_low: f64,
    /// Largest relative irradiance spread still counted as matched.
    pub mismatch_rel: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            ir_th: 800.0,
            t_th: 45.0,
            ir_low: 100.0,
            t_low: 0.0,
            mismatch_rel: 0.1,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.ir_low < self.ir_th) {
            return Err(Error::config(
                "control.thresholds.ir_low",
                "must be below ir_th",
            ));
        }
        if !(self.t_low < self.t_th) {
            return Err(Error::config("control.thresholds.t_low", "must be below t_th"));
        }
        if !(self.mismatch_rel > 0.0 && self.mismatch_rel < 1.0) {
            return Err(Error::config(
                "control.thresholds.mismatch_rel",
                "must lie in (0, 1)",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ParallelFullMppt,
    ParallelMismatch,
    Cascade,
    Individual,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::ParallelFullMppt => "parallel_full_mppt",
            Regime::ParallelMismatch => "parallel_mismatch",
            Regime::Cascade => "cascade",
            Regime::Individual => "individual",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatingMode {
    pub regime: Regime,
    pub structure: ConnectionStructure,
    /// Zero-based index of the channel running MPPT.
    pub leader: usize,
    /// Connected channels, ascending.
    pub active: Vec<usize>,
}

impl OperatingMode {
    /// Channels whose duty comes from their own MPPT loop.
    pub fn tracking(&self) -> Vec<usize> {
        match self.regime {
            Regime::ParallelFullMppt => self.active.clone(),
            _ => vec![self.leader],
        }
    }
}

/// Chooses the operating regime from per-channel measurements.
///
/// Precedence: a single unshaded channel runs alone; otherwise bright
/// conditions stack the strings in cascade; otherwise cool, matched,
/// unshaded channels each track in interleaved parallel; everything else is
/// parallel with the best channel leading. A channel is unshaded when its
/// irradiance exceeds `ir_low` or its temperature exceeds `t_low`; "best"
/// is the highest irradiance, ties going to the lower index.
pub fn select_mode(atmos: &[AtmosphereSample], th: &Thresholds) -> Result<OperatingMode> {
    if atmos.is_empty() {
        return Err(Error::Parameter("no atmosphere samples given".into()));
    }
    let all: Vec<usize> = (0..atmos.len()).collect();
    let unshaded: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&k| atmos[k].irradiance > th.ir_low || atmos[k].temperature > th.t_low)
        .collect();

    if let [only] = unshaded[..] {
        return Ok(OperatingMode {
            regime: Regime::Individual,
            structure: ConnectionStructure::Individual(only),
            leader: only,
            active: vec![only],
        });
    }

    let best = best_channel(atmos);
    let max_ir = atmos[best].irradiance;
    if max_ir > th.ir_th {
        return Ok(OperatingMode {
            regime: Regime::Cascade,
            structure: ConnectionStructure::Cascade,
            leader: best,
            active: all,
        });
    }

    let min_ir = atmos
        .iter()
        .map(|a| a.irradiance)
        .fold(f64::INFINITY, f64::min);
    let spread = if max_ir > 0.0 {
        (max_ir - min_ir) / max_ir
    } else {
        0.0
    };
    let cool = atmos.iter().all(|a| a.temperature < th.t_th);
    let regime = if cool && spread <= th.mismatch_rel && unshaded.len() == atmos.len() {
        Regime::ParallelFullMppt
    } else {
        Regime::ParallelMismatch
    };
    Ok(OperatingMode {
        regime,
        structure: ConnectionStructure::Parallel,
        leader: best,
        active: all,
    })
}

fn best_channel(atmos: &[AtmosphereSample]) -> usize {
    let mut best = 0;
    for (k, a) in atmos.iter().enumerate().skip(1) {
        if a.irradiance > atmos[best].irradiance {
            best = k;
        }
    }
    best
}

/// Hill-climbing MPPT state for one channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PnoState {
    pub v_ref: f64,
    pub step: f64,
    pub last_power: f64,
    pub last_voltage: f64,
    /// +1 or -1.
    pub direction: f64,
    /// Upper clamp for the reference (the string's open-circuit voltage).
    pub v_max: f64,
}

impl PnoState {
    pub fn new(v_ref: f64, step: f64, v_max: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Parameter(format!("P&O step must be > 0, got {step}")));
        }
        Ok(PnoState {
            v_ref: v_ref.clamp(0.0, v_max),
            step,
            last_power: 0.0,
            last_voltage: v_ref,
            direction: -1.0,
            v_max,
        })
    }

    /// One perturb-and-observe update; returns the new voltage reference.
    pub fn update(&mut self, v_meas: f64, p_meas: f64) -> f64 {
        let (next, v_ref) = perturb_observe(*self, v_meas, p_meas);
        *self = next;
        v_ref
    }
}

/// Keeps the direction if power rose since the last call, otherwise reverses.
pub fn perturb_observe(st: PnoState, v_meas: f64, p_meas: f64) -> (PnoState, f64) {
    let direction = if p_meas > st.last_power {
        st.direction
    } else {
        -st.direction
    };
    let v_ref = (st.v_ref + direction * st.step).clamp(0.0, st.v_max);
    let next = PnoState {
        v_ref,
        direction,
        last_power: p_meas,
        last_voltage: v_meas,
        ..st
    };
    (next, v_ref)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiConfig {
    pub kp: f64,
    pub ki: f64,
    pub out_min: f64,
    pub out_max: f64,
}

impl PiConfig {
    pub fn validate(&self, key: &str) -> Result<()> {
        if !(self.kp.is_finite() && self.ki.is_finite() && self.kp >= 0.0 && self.ki >= 0.0) {
            return Err(Error::config(key, "kp and ki must be finite and >= 0"));
        }
        if !(self.out_min < self.out_max) {
            return Err(Error::config(key, "out_min must be below out_max"));
        }
        Ok(())
    }
}

/// PI stage with output saturation and conditional-integration anti-windup.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PiState {
    pub kp: f64,
    pub ki: f64,
    pub integrator: f64,
    pub out_min: f64,
    pub out_max: f64,
}

impl From<PiConfig> for PiState {
    fn from(c: PiConfig) -> Self {
        PiState {
            kp: c.kp,
            ki: c.ki,
            integrator: c.out_min.max(0.0).min(c.out_max),
            out_min: c.out_min,
            out_max: c.out_max,
        }
    }
}

impl PiState {
    pub fn step(&mut self, error: f64, dt: f64) -> f64 {
        let p = self.kp * error;
        let candidate = self.integrator + self.ki * error * dt;
        let unsat = p + candidate;
        // Integrate only up to the saturation boundary, never beyond it.
        let next = if unsat > self.out_max && error > 0.0 {
            self.integrator.max(self.out_max - p)
        } else if unsat < self.out_min && error < 0.0 {
            self.integrator.min(self.out_min - p)
        } else {
            candidate
        };
        self.integrator = next.clamp(self.out_min, self.out_max);
        (p + self.integrator).clamp(self.out_min, self.out_max)
    }

    pub fn output(&self, error: f64) -> f64 {
        (self.kp * error + self.integrator).clamp(self.out_min, self.out_max)
    }
}

/// Outer voltage loop and inner current loop of one channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualLoop {
    pub voltage: PiState,
    pub current: PiState,
}

impl DualLoop {
    pub fn new(voltage: PiConfig, current: PiConfig) -> Self {
        DualLoop {
            voltage: voltage.into(),
            current: current.into(),
        }
    }

    pub fn step(&mut self, v_ref: f64, v_meas: f64, i_meas: f64, dt: f64) -> f64 {
        dual_loop_step(&mut self.voltage, &mut self.current, v_ref, v_meas, i_meas, dt)
    }

    /// Loads the integrators so the loop resumes at `duty` with `i_meas` as
    /// its current reference.
    pub fn preset(&mut self, duty: f64, i_meas: f64) {
        self.voltage.integrator = i_meas.clamp(self.voltage.out_min, self.voltage.out_max);
        self.current.integrator = duty.clamp(self.current.out_min, self.current.out_max);
    }
}

/// One controller tick: the voltage PI maps `v_meas - v_ref` to a PV current
/// reference (raising the duty pulls the input capacitor down, hence the
/// sign), and the current PI maps `i_ref - i_meas` to the duty.
pub fn dual_loop_step(
    pi_v: &mut PiState,
    pi_c: &mut PiState,
    v_ref: f64,
    v_meas: f64,
    i_meas: f64,
    dt: f64,
) -> f64 {
    debug_assert!(dt > 0.0);
    let i_ref = pi_v.step(v_meas - v_ref, dt);
    pi_c.step(i_ref - i_meas, dt)
}

/// Builds the duty command for a mode. `duties` holds each channel's own
/// loop output; `leader_duty` is what followers copy.
pub fn assign_duties(
    mode: &OperatingMode,
    leader_duty: f64,
    duties: &[f64; CHANNELS],
    d_m: f64,
) -> DutyCommand {
    let mut d = [0.0; CHANNELS];
    let phasing = match mode.regime {
        Regime::ParallelFullMppt => {
            for &k in &mode.active {
                d[k] = duties[k].clamp(0.0, 1.0);
            }
            let sum: f64 = d.iter().sum();
            if sum > 1.0 {
                d.iter_mut().for_each(|x| *x /= sum);
                // rescaling can land one ulp above 1
                while d.iter().sum::<f64>() > 1.0 {
                    let top = d.iter_mut().max_by(|a, b| a.total_cmp(b)).unwrap();
                    *top = top.next_down();
                }
            }
            Phasing::Interleaved
        }
        Regime::ParallelMismatch | Regime::Cascade => {
            for &k in &mode.active {
                d[k] = leader_duty.clamp(0.0, 1.0);
            }
            Phasing::Synchronous
        }
        Regime::Individual => {
            d[mode.leader] = leader_duty.clamp(0.0, 1.0);
            Phasing::Synchronous
        }
    };
    DutyCommand {
        d,
        d_m,
        structure: mode.structure,
        phasing,
    }
}
