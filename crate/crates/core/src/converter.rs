//! The two-input buck-boost power stage.
//!
//! The front end steers each PV channel onto the inductor through its input
//! switch `S1`/`S2`; `Ss1` stacks the two channels in series. The boost
//! switch `Sm` with diode `D` forms the second stage into `Co` and the
//! resistive load. Two models are provided:
//!
//! * an averaged model, where every switch is replaced by its duty, and
//! * a switched model, where the same equations are driven by the
//!   instantaneous 0/1 gate states from a carrier-based PWM.
//!
//! Averaged equations for channel `k` with draw factor `σ_k`:
//!
//! ```text
//! C_pv dv_k/dt = i_pv,k - σ_k i_L
//! L di_L/dt    = Σ σ_k v_k - (1 - d_m) v_o        (i_L >= 0)
//! C_o dv_o/dt  = (1 - d_m) i_L - v_o / R
//! ```
//!
//! Parallel inputs switched on at the same instant are joined through their
//! diodes, so for that overlap `σ_k` is the channel's share of the current
//! (all of it for the higher voltage, a balancing split for equal ones); see
//! [`Drive`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of input channels with full dynamics.
pub const CHANNELS: usize = 2;

/// Upper bound on the boost duty.
pub const D_M_MAX: f64 = 0.95;

const DUTY_SUM_SLACK: f64 = 1e-12;

/// How the PV inputs are wired onto the inductor. `Individual` carries a
/// zero-based channel index; its text form is `pv1`/`pv2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ConnectionStructure {
    Parallel,
    Cascade,
    Individual(usize),
}

impl ConnectionStructure {
    pub const ALL: [ConnectionStructure; 4] = [
        ConnectionStructure::Parallel,
        ConnectionStructure::Cascade,
        ConnectionStructure::Individual(0),
        ConnectionStructure::Individual(1),
    ];

    pub fn validate(&self) -> Result<()> {
        match *self {
            ConnectionStructure::Individual(k) if k >= CHANNELS => Err(Error::Parameter(
                format!("individual channel {} does not exist", k + 1),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ConnectionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionStructure::Parallel => f.write_str("parallel"),
            ConnectionStructure::Cascade => f.write_str("cascade"),
            ConnectionStructure::Individual(k) => write!(f, "pv{}", k + 1),
        }
    }
}

impl FromStr for ConnectionStructure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "parallel" => Ok(ConnectionStructure::Parallel),
            "cascade" => Ok(ConnectionStructure::Cascade),
            other => {
                let k = other
                    .strip_prefix("pv")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| (1..=CHANNELS).contains(&n))
                    .ok_or_else(|| {
                        Error::Parameter(format!(
                            "unknown connection structure `{s}` (expected parallel, cascade, pv1, pv2)"
                        ))
                    })?;
                Ok(ConnectionStructure::Individual(k - 1))
            }
        }
    }
}

impl TryFrom<String> for ConnectionStructure {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ConnectionStructure> for String {
    fn from(s: ConnectionStructure) -> String {
        s.to_string()
    }
}

/// Switch and diode states. From [`switch_table`] these are the "operates"
/// flags of each device; from [`switched_gates`] the switch flags are the
/// instantaneous conduction states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwitchStates {
    pub s1: bool,
    pub s2: bool,
    pub ss1: bool,
    pub sm: bool,
    pub d11: bool,
    pub d21: bool,
}

impl SwitchStates {
    pub fn input_gate(&self, channel: usize) -> bool {
        match channel {
            0 => self.s1,
            1 => self.s2,
            _ => false,
        }
    }
}

impl fmt::Display for SwitchStates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = |b: bool| if b { '+' } else { '-' };
        write!(
            f,
            "s1:{} s2:{} ss1:{} sm:{} d11:{} d21:{}",
            m(self.s1),
            m(self.s2),
            m(self.ss1),
            m(self.sm),
            m(self.d11),
            m(self.d21)
        )
    }
}

/// Which devices operate in each connection structure.
pub fn switch_table(structure: ConnectionStructure) -> SwitchStates {
    use ConnectionStructure::*;
    let (s1, s2, ss1, d11, d21) = match structure {
        Parallel => (true, true, false, true, true),
        Cascade => (true, true, true, false, false),
        Individual(0) => (true, false, false, true, false),
        Individual(_) => (false, true, false, false, true),
    };
    SwitchStates {
        s1,
        s2,
        ss1,
        sm: true,
        d11,
        d21,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    /// Inductance, H.
    pub l: f64,
    /// Input capacitance per channel, F.
    pub c_pv: f64,
    pub c_o: f64,
    pub r_load: f64,
    /// Switching frequency, Hz.
    pub f_sw: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        CircuitParams {
            l: 1e-3,
            c_pv: 470e-6,
            c_o: 1e-3,
            r_load: 20.0,
            f_sw: 20e3,
        }
    }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("l", self.l),
            ("c_pv", self.c_pv),
            ("c_o", self.c_o),
            ("r_load", self.r_load),
            ("f_sw", self.f_sw),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(
                    format!("circuit.{name}"),
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        1.0 / self.f_sw
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConverterState {
    pub i_l: f64,
    pub v_cpv: [f64; CHANNELS],
    pub v_co: f64,
}

impl ConverterState {
    pub fn is_finite(&self) -> bool {
        self.i_l.is_finite() && self.v_co.is_finite() && self.v_cpv.iter().all(|v| v.is_finite())
    }

    /// Energy held in `L`, the input capacitors and `Co`.
    pub fn stored_energy(&self, params: &CircuitParams) -> f64 {
        let caps: f64 = self.v_cpv.iter().map(|v| v * v).sum();
        0.5 * params.l * self.i_l * self.i_l
            + 0.5 * params.c_pv * caps
            + 0.5 * params.c_o * self.v_co * self.v_co
    }
}

/// Relative placement of the input switches' on-times within a period.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phasing {
    /// Parallel channels take consecutive, non-overlapping slots; the duty
    /// sum is limited to 1.
    #[default]
    Interleaved,
    /// All input switches start together.
    Synchronous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DutyCommand {
    pub d: [f64; CHANNELS],
    pub d_m: f64,
    pub structure: ConnectionStructure,
    pub phasing: Phasing,
}

impl DutyCommand {
    pub fn validate(&self) -> Result<()> {
        self.structure.validate()?;
        for (k, &d) in self.d.iter().enumerate() {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::Parameter(format!(
                    "duty d{} = {d} outside [0, 1]",
                    k + 1
                )));
            }
        }
        if self.d_m >= 1.0 {
            return Err(Error::Singularity { d_m: self.d_m });
        }
        if !(0.0..=D_M_MAX).contains(&self.d_m) {
            return Err(Error::Parameter(format!(
                "boost duty d_m = {} outside [0, {D_M_MAX}]",
                self.d_m
            )));
        }
        if self.is_interleaved_parallel() {
            let sum: f64 = self.d.iter().sum();
            if sum > 1.0 + DUTY_SUM_SLACK {
                return Err(Error::Constraint(format!(
                    "interleaved parallel duties sum to {sum} > 1"
                )));
            }
        }
        Ok(())
    }

    fn is_interleaved_parallel(&self) -> bool {
        self.structure == ConnectionStructure::Parallel && self.phasing == Phasing::Interleaved
    }

    /// Cycle-averaged fraction of the inductor current drawn from each channel.
    pub fn draw_factors(&self) -> [f64; CHANNELS] {
        match self.structure {
            ConnectionStructure::Parallel | ConnectionStructure::Cascade => self.d,
            ConnectionStructure::Individual(k) => {
                let mut s = [0.0; CHANNELS];
                s[k] = self.d[k];
                s
            }
        }
    }
}

/// Voltage differences below this count as equal for paralleled inputs, V.
pub const MERGE_TOL: f64 = 1e-6;

/// How the input stage connects the channels to the inductor, as time
/// fractions over a step (duties in the averaged model, 0/1 in the switched one).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drive {
    /// Fraction of time each channel conducts on its own or in series.
    pub sigma: [f64; CHANNELS],
    /// Fraction of time the parallel channels conduct together. Their diodes
    /// then form an OR: the higher capacitor carries the inductor current,
    /// and equal capacitors share it so that they stay equal.
    pub shared: f64,
    /// Fraction of time `Sm` is open.
    pub boost_off: f64,
}

impl Drive {
    /// Cycle averages of a (valid) duty command.
    pub fn averaged(cmd: &DutyCommand) -> Drive {
        let boost_off = 1.0 - cmd.d_m;
        if cmd.structure == ConnectionStructure::Parallel && cmd.phasing == Phasing::Synchronous {
            let shared = cmd.d.iter().copied().fold(f64::INFINITY, f64::min);
            Drive {
                sigma: cmd.d.map(|d| d - shared),
                shared,
                boost_off,
            }
        } else {
            Drive {
                sigma: cmd.draw_factors(),
                shared: 0.0,
                boost_off,
            }
        }
    }

    /// Instantaneous drive for a set of gate states.
    pub fn from_gates(gates: &SwitchStates, structure: ConnectionStructure) -> Drive {
        let g = |b: bool| if b { 1.0 } else { 0.0 };
        let boost_off = 1.0 - g(gates.sm);
        if structure == ConnectionStructure::Parallel && gates.s1 && gates.s2 {
            Drive {
                sigma: [0.0; CHANNELS],
                shared: 1.0,
                boost_off,
            }
        } else {
            Drive {
                sigma: [g(gates.s1), g(gates.s2)],
                shared: 0.0,
                boost_off,
            }
        }
    }
}

/// What feeds an input capacitor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Feed {
    /// An ideal source pins the voltage and supplies whatever is drawn.
    Held,
    /// A source pushing this current into the capacitor.
    Current(f64),
}

/// Split of the shared parallel current between the channels; sums to 1.
fn or_shares(v: &[f64; CHANNELS], drive: &Drive, feeds: &[Feed; CHANNELS], i_l: f64) -> [f64; CHANNELS] {
    let dv = v[0] - v[1];
    if dv > MERGE_TOL {
        return [1.0, 0.0];
    }
    if dv < -MERGE_TOL {
        return [0.0, 1.0];
    }
    let s = drive.shared * i_l;
    if s <= 0.0 {
        return [0.5, 0.5];
    }
    // current left in each capacitor before the shared draw
    let net = |k: usize| match feeds[k] {
        Feed::Current(i) => Some(i - drive.sigma[k] * i_l),
        Feed::Held => None,
    };
    let x0 = match (net(0), net(1)) {
        (Some(a), Some(b)) => (a - b + s) / (2.0 * s),
        (Some(a), None) => a / s,
        (None, Some(b)) => 1.0 - b / s,
        (None, None) => 0.5,
    }
    .clamp(0.0, 1.0);
    [x0, 1.0 - x0]
}

/// Current drawn from each input capacitor by the input stage.
pub fn input_draws(state: &ConverterState, drive: &Drive, feeds: &[Feed; CHANNELS]) -> [f64; CHANNELS] {
    let x = or_shares(&state.v_cpv, drive, feeds, state.i_l);
    std::array::from_fn(|k| (drive.sigma[k] + drive.shared * x[k]) * state.i_l)
}

/// Cycle-averaged voltage applied to the inductor by the input stage.
/// Channels paralleled at the same instant contribute the higher voltage.
pub fn effective_input_voltage(state: &ConverterState, cmd: &DutyCommand) -> Result<f64> {
    cmd.validate()?;
    let drive = Drive::averaged(cmd);
    let solo: f64 = drive.sigma.iter().zip(&state.v_cpv).map(|(s, v)| s * v).sum();
    let top = state.v_cpv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(solo + drive.shared * top)
}

/// Averaged-model time derivative. `pv_i` is the current each source pushes
/// into its input capacitor. The command is assumed valid.
pub fn derivatives(
    state: &ConverterState,
    cmd: &DutyCommand,
    pv_i: &[f64; CHANNELS],
    params: &CircuitParams,
) -> ConverterState {
    rates(state, &Drive::averaged(cmd), &pv_i.map(Feed::Current), params)
}

/// Common right-hand side for both models. Held channels have zero voltage
/// rate.
pub fn rates(
    state: &ConverterState,
    drive: &Drive,
    feeds: &[Feed; CHANNELS],
    params: &CircuitParams,
) -> ConverterState {
    let x = or_shares(&state.v_cpv, drive, feeds, state.i_l);
    let v_in: f64 = (0..CHANNELS)
        .map(|k| (drive.sigma[k] + drive.shared * x[k]) * state.v_cpv[k])
        .sum();
    let mut di = (v_in - drive.boost_off * state.v_co) / params.l;
    // D blocks reverse inductor current.
    if state.i_l <= 0.0 && di < 0.0 {
        di = 0.0;
    }
    let mut dv = [0.0; CHANNELS];
    for k in 0..CHANNELS {
        if let Feed::Current(i) = feeds[k] {
            let draw = (drive.sigma[k] + drive.shared * x[k]) * state.i_l;
            dv[k] = (i - draw) / params.c_pv;
            // bypass path keeps the input capacitor from reverse charging
            if state.v_cpv[k] <= 0.0 && dv[k] < 0.0 {
                dv[k] = 0.0;
            }
        }
    }
    let dvo = (drive.boost_off * state.i_l - state.v_co / params.r_load) / params.c_o;
    ConverterState {
        i_l: di,
        v_cpv: dv,
        v_co: dvo,
    }
}

/// Instantaneous gate states at time `t` from a sawtooth carrier of period
/// `1/f_sw`. Interleaved parallel channels occupy `[0, d1·T)` and
/// `[d1·T, (d1+d2)·T)`; every other arrangement turns all enabled inputs on
/// at the start of the period. `Sm` conducts on `[0, d_m·T)` of its own carrier.
pub fn switched_gates(t: f64, cmd: &DutyCommand, params: &CircuitParams) -> Result<SwitchStates> {
    if !(params.f_sw.is_finite() && params.f_sw > 0.0) {
        return Err(Error::Parameter(format!(
            "switching frequency must be > 0, got {}",
            params.f_sw
        )));
    }
    cmd.validate()?;
    Ok(gates_unchecked(t, cmd, params.f_sw))
}

pub(crate) fn gates_unchecked(t: f64, cmd: &DutyCommand, f_sw: f64) -> SwitchStates {
    let phase = (t * f_sw).rem_euclid(1.0);
    let table = switch_table(cmd.structure);
    let [d1, d2] = cmd.d;
    let (s1, s2) = if cmd.is_interleaved_parallel() {
        (phase < d1, phase >= d1 && phase < d1 + d2)
    } else {
        (phase < d1, phase < d2)
    };
    SwitchStates {
        s1: table.s1 && s1,
        s2: table.s2 && s2,
        ss1: table.ss1,
        sm: phase < cmd.d_m,
        d11: table.d11,
        d21: table.d21,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyState {
    pub v_o: f64,
    pub i_o: f64,
    pub i_l: f64,
    /// Average current taken from each source.
    pub i_in: [f64; CHANNELS],
}

/// Lossless steady state with stiff input sources at `v_in`.
pub fn steady_state(
    structure: ConnectionStructure,
    v_in: &[f64; CHANNELS],
    cmd: &DutyCommand,
    params: &CircuitParams,
) -> Result<SteadyState> {
    if cmd.d_m >= 1.0 {
        return Err(Error::Singularity { d_m: cmd.d_m });
    }
    params.validate()?;
    let cmd = DutyCommand { structure, ..*cmd };
    cmd.validate()?;
    let drive = Drive::averaged(&cmd);
    let held = [Feed::Held; CHANNELS];
    let x = or_shares(v_in, &drive, &held, 1.0);
    let share: [f64; CHANNELS] = std::array::from_fn(|k| drive.sigma[k] + drive.shared * x[k]);
    let v_eff: f64 = share.iter().zip(v_in).map(|(s, v)| s * v).sum();
    let v_o = v_eff / (1.0 - cmd.d_m);
    let i_o = v_o / params.r_load;
    let i_l = i_o / (1.0 - cmd.d_m);
    Ok(SteadyState {
        v_o,
        i_o,
        i_l,
        i_in: share.map(|s| s * i_l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConnectionStructure::*;

    fn cmd(structure: ConnectionStructure, d: [f64; 2], phasing: Phasing) -> DutyCommand {
        DutyCommand {
            d,
            d_m: 0.5,
            structure,
            phasing,
        }
    }

    #[test]
    fn table_rows() {
        let rows = ConnectionStructure::ALL.map(|s| switch_table(s).to_string());
        assert_eq!(
            rows,
            [
                "s1:+ s2:+ ss1:- sm:+ d11:+ d21:+",
                "s1:+ s2:+ ss1:+ sm:+ d11:- d21:-",
                "s1:+ s2:- ss1:- sm:+ d11:+ d21:-",
                "s1:- s2:+ ss1:- sm:+ d11:- d21:+",
            ]
        );
    }

    #[test]
    fn structure_tokens_round_trip() {
        for s in ConnectionStructure::ALL {
            assert_eq!(s.to_string().parse::<ConnectionStructure>().unwrap(), s);
        }
        assert!("hexagon".parse::<ConnectionStructure>().is_err());
        assert!("pv3".parse::<ConnectionStructure>().is_err());
        assert!(Individual(2).validate().is_err());
    }

    #[test]
    fn effective_voltage_examples() {
        let st = ConverterState {
            v_cpv: [100.0, 100.0],
            ..Default::default()
        };
        let c = cmd(Parallel, [0.5, 0.5], Phasing::Interleaved);
        assert_eq!(effective_input_voltage(&st, &c).unwrap(), 100.0);
        let c = cmd(Cascade, [1.0, 1.0], Phasing::Synchronous);
        assert_eq!(effective_input_voltage(&st, &c).unwrap(), 200.0);
        let st = ConverterState {
            v_cpv: [100.0, 87.0],
            ..Default::default()
        };
        let c = cmd(Individual(0), [0.6, 0.0], Phasing::Synchronous);
        assert!((effective_input_voltage(&st, &c).unwrap() - 60.0).abs() < 1e-12);
        let c = cmd(Parallel, [0.6, 0.6], Phasing::Interleaved);
        assert!(matches!(
            effective_input_voltage(&st, &c),
            Err(Error::Constraint(_))
        ));
        // shared duty has no sum limit
        let c = cmd(Parallel, [0.6, 0.6], Phasing::Synchronous);
        assert!(effective_input_voltage(&st, &c).is_ok());
    }

    #[test]
    fn parallel_equilibrium_at_200_v() {
        let p = CircuitParams::default();
        let c = cmd(Parallel, [0.5, 0.5], Phasing::Interleaved);
        let st = ConverterState {
            i_l: 20.0,
            v_cpv: [100.0, 100.0],
            v_co: 200.0,
        };
        let d = derivatives(&st, &c, &[10.0, 10.0], &p);
        assert_eq!(d, ConverterState::default());
    }

    #[test]
    fn diode_clamps_negative_inductor_slope() {
        let p = CircuitParams::default();
        let c = cmd(Parallel, [0.1, 0.1], Phasing::Interleaved);
        let st = ConverterState {
            i_l: 0.0,
            v_cpv: [100.0, 100.0],
            v_co: 200.0,
        };
        assert_eq!(derivatives(&st, &c, &[0.0, 0.0], &p).i_l, 0.0);
    }

    #[test]
    fn disconnected_channel_only_charges() {
        let p = CircuitParams::default();
        let c = cmd(Individual(0), [0.7, 0.9], Phasing::Synchronous);
        let st = ConverterState {
            i_l: 15.0,
            v_cpv: [200.0, 150.0],
            v_co: 250.0,
        };
        let d = derivatives(&st, &c, &[8.0, 3.0], &p);
        assert_eq!(d.v_cpv[1], 3.0 / p.c_pv);
    }

    #[test]
    fn gates_interleave() {
        let p = CircuitParams::default();
        let t = p.period();
        let c = cmd(Parallel, [0.5, 0.5], Phasing::Interleaved);
        let g = switched_gates(0.25 * t, &c, &p).unwrap();
        assert!(g.s1 && !g.s2 && g.sm);
        let g = switched_gates(0.75 * t, &c, &p).unwrap();
        assert!(!g.s1 && g.s2 && !g.sm);
        let g = switched_gates(7.75 * t, &c, &p).unwrap();
        assert!(!g.s1 && g.s2);
        let c = cmd(Parallel, [0.6, 0.6], Phasing::Interleaved);
        assert!(matches!(
            switched_gates(0.0, &c, &p),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn gate_duty_matches_command() {
        let p = CircuitParams::default();
        let c = cmd(Parallel, [0.3, 0.45], Phasing::Interleaved);
        let n = 10_000;
        let (mut on1, mut on2, mut onm) = (0, 0, 0);
        for j in 0..n {
            let t = (j as f64 + 0.5) / n as f64 * p.period();
            let g = switched_gates(t, &c, &p).unwrap();
            on1 += g.s1 as usize;
            on2 += g.s2 as usize;
            onm += g.sm as usize;
            assert!(!(g.s1 && g.s2));
        }
        assert_eq!((on1, on2, onm), (3000, 4500, 5000));
    }

    #[test]
    fn steady_state_examples() {
        let p = CircuitParams::default();
        let v = [100.0, 100.0];
        let s = steady_state(Parallel, &v, &cmd(Parallel, [0.5, 0.5], Phasing::Interleaved), &p)
            .unwrap();
        assert_eq!((s.v_o, s.i_o, s.i_l, s.i_in), (200.0, 10.0, 20.0, [10.0, 10.0]));

        let s = steady_state(Cascade, &v, &cmd(Cascade, [1.0, 1.0], Phasing::Synchronous), &p)
            .unwrap();
        assert_eq!((s.v_o, s.i_o, s.i_l), (400.0, 20.0, 40.0));

        let c = cmd(Individual(0), [1.0, 0.0], Phasing::Synchronous);
        let s = steady_state(Individual(0), &v, &c, &p).unwrap();
        assert_eq!((s.v_o, s.i_o, s.i_in), (200.0, 10.0, [20.0, 0.0]));

        let c = DutyCommand { d_m: 1.0, ..c };
        assert!(matches!(
            steady_state(Individual(0), &v, &c, &p),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn cascade_draws_less_inductor_current_than_parallel() {
        // Same input power and output voltage in both structures.
        let p = CircuitParams::default();
        let v = [100.0, 100.0];
        let par = steady_state(Parallel, &v, &cmd(Parallel, [0.5, 0.5], Phasing::Interleaved), &p)
            .unwrap();
        let cas = steady_state(Cascade, &v, &cmd(Cascade, [0.5, 0.5], Phasing::Synchronous), &p)
            .unwrap();
        assert!((par.v_o - cas.v_o).abs() < 1e-9);
        let p_par: f64 = par.i_in.iter().zip(v).map(|(i, v)| i * v).sum();
        let p_cas: f64 = cas.i_in.iter().zip(v).map(|(i, v)| i * v).sum();
        assert!((p_par - p_cas).abs() < 1e-9);
        assert!(cas.i_l <= par.i_l);
    }

    #[test]
    fn steady_state_is_lossless() {
        let p = CircuitParams::default();
        for (s, d, ph) in [
            (Parallel, [0.3, 0.55], Phasing::Interleaved),
            (Cascade, [0.7, 0.7], Phasing::Synchronous),
            (Individual(1), [0.0, 0.8], Phasing::Synchronous),
        ] {
            let v = [137.0, 91.0];
            let ss = steady_state(s, &v, &cmd(s, d, ph), &p).unwrap();
            let p_in: f64 = ss.i_in.iter().zip(v).map(|(i, v)| i * v).sum();
            let p_out = ss.v_o * ss.v_o / p.r_load;
            assert!((p_in / p_out - 1.0).abs() < 1e-3);
            // boost law
            let st = ConverterState {
                v_cpv: v,
                ..Default::default()
            };
            let v_eff = effective_input_voltage(&st, &cmd(s, d, ph)).unwrap();
            assert!((ss.v_o * 0.5 / v_eff - 1.0).abs() < 5e-3);
        }
    }
}
