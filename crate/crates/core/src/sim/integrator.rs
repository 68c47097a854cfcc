//! Fixed-step RK4 over the converter state.

use serde::{Deserialize, Serialize};

use crate::converter::{
    gates_unchecked, input_draws, rates, CircuitParams, ConverterState, Drive, DutyCommand, Feed,
    CHANNELS, MERGE_TOL,
};
use crate::error::{Error, Result};
use crate::pv::PvCurve;

pub trait OdeState: Copy {
    /// `self + k * rate`
    fn axpy(&self, k: f64, rate: &Self) -> Self;
}

impl OdeState for f64 {
    fn axpy(&self, k: f64, rate: &Self) -> Self {
        self + k * rate
    }
}

impl OdeState for ConverterState {
    fn axpy(&self, k: f64, r: &Self) -> Self {
        ConverterState {
            i_l: self.i_l + k * r.i_l,
            v_cpv: [self.v_cpv[0] + k * r.v_cpv[0], self.v_cpv[1] + k * r.v_cpv[1]],
            v_co: self.v_co + k * r.v_co,
        }
    }
}

/// Classic fourth-order Runge-Kutta step.
pub fn rk4_step<S: OdeState>(x: &S, dt: f64, mut f: impl FnMut(&S) -> S) -> S {
    let k1 = f(x);
    let k2 = f(&x.axpy(0.5 * dt, &k1));
    let k3 = f(&x.axpy(0.5 * dt, &k2));
    let k4 = f(&x.axpy(dt, &k3));
    x.axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Averaged,
    Switched,
}

/// What feeds each input capacitor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelSource {
    /// Ideal voltage source holding the capacitor at a fixed voltage.
    Stiff(f64),
    Pv(PvCurve),
}

impl ChannelSource {
    /// How this source feeds its input capacitor at voltage `v`.
    pub fn feed(&self, v: f64) -> Feed {
        match self {
            ChannelSource::Stiff(_) => Feed::Held,
            ChannelSource::Pv(c) => Feed::Current(c.current(v)),
        }
    }
}

/// Per-channel source current and input-stage draw at `x`. A held source
/// supplies exactly its draw.
pub(crate) fn source_currents(
    x: &ConverterState,
    drive: &Drive,
    sources: &[ChannelSource; CHANNELS],
) -> ([f64; CHANNELS], [f64; CHANNELS]) {
    let feeds: [Feed; CHANNELS] = std::array::from_fn(|k| sources[k].feed(x.v_cpv[k]));
    let draws = input_draws(x, drive, &feeds);
    let src = std::array::from_fn(|k| match feeds[k] {
        Feed::Held => draws[k],
        Feed::Current(i) => i,
    });
    (src, draws)
}

pub struct StepInputs<'a> {
    pub t: f64,
    pub cmd: &'a DutyCommand,
    pub sources: &'a [ChannelSource; CHANNELS],
    pub circuit: &'a CircuitParams,
    pub model: ModelKind,
}

impl StepInputs<'_> {
    /// Input-stage drive held over a step starting at `t`.
    pub(crate) fn drive(&self, dt: f64) -> Drive {
        match self.model {
            ModelKind::Averaged => Drive::averaged(self.cmd),
            ModelKind::Switched => Drive::from_gates(
                &gates_unchecked(self.t + 0.5 * dt, self.cmd, self.circuit.f_sw),
                self.cmd.structure,
            ),
        }
    }
}

/// Converter state plus running source and load energy.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Tracked {
    pub x: ConverterState,
    pub e_src: f64,
    pub e_load: f64,
}

impl OdeState for Tracked {
    fn axpy(&self, k: f64, r: &Self) -> Self {
        Tracked {
            x: self.x.axpy(k, &r.x),
            e_src: self.e_src + k * r.e_src,
            e_load: self.e_load + k * r.e_load,
        }
    }
}

pub(crate) fn tracked_rates(s: &Tracked, drive: &Drive, inputs: &StepInputs) -> Tracked {
    let feeds: [Feed; CHANNELS] = std::array::from_fn(|k| inputs.sources[k].feed(s.x.v_cpv[k]));
    let dx = rates(&s.x, drive, &feeds, inputs.circuit);
    let (src, _) = source_currents(&s.x, drive, inputs.sources);
    let p_in: f64 = (0..CHANNELS).map(|k| s.x.v_cpv[k] * src[k]).sum();
    Tracked {
        x: dx,
        e_src: p_in,
        e_load: s.x.v_co * s.x.v_co / inputs.circuit.r_load,
    }
}

pub(crate) fn step_tracked(s: &Tracked, inputs: &StepInputs, dt: f64) -> Result<Tracked> {
    let drive = inputs.drive(dt);
    let mut next = rk4_step(s, dt, |y| tracked_rates(y, &drive, inputs));
    next.x.i_l = next.x.i_l.max(0.0);
    // Paralleled capacitors that crossed within the step end up joined; the
    // diode-OR conserves their charge.
    let gap = |x: &ConverterState| x.v_cpv[0] - x.v_cpv[1];
    let (g0, g1) = (gap(&s.x), gap(&next.x));
    if drive.shared > 0.0 && g0.abs() > MERGE_TOL && g0.signum() != g1.signum() {
        next.x.v_cpv = match *inputs.sources {
            [ChannelSource::Stiff(v), _] | [_, ChannelSource::Stiff(v)] => [v; CHANNELS],
            _ => [0.5 * (next.x.v_cpv[0] + next.x.v_cpv[1]); CHANNELS],
        };
    }
    for k in 0..CHANNELS {
        match inputs.sources[k] {
            ChannelSource::Stiff(v) => next.x.v_cpv[k] = v,
            ChannelSource::Pv(_) => next.x.v_cpv[k] = next.x.v_cpv[k].max(0.0),
        }
    }
    if !(next.x.is_finite() && next.e_src.is_finite() && next.e_load.is_finite()) {
        return Err(Error::BlowUp {
            t: inputs.t + dt,
            what: format!("non-finite state {:?}", next.x),
        });
    }
    Ok(next)
}

/// Advances the converter by `dt`. The averaged model integrates the
/// duty-averaged equations; the switched model holds the gate pattern at
/// the step midpoint, so `dt` should be a small fraction of the period.
pub fn integrate_step(
    state: &ConverterState,
    inputs: &StepInputs,
    dt: f64,
) -> Result<ConverterState> {
    if !(dt > 0.0) {
        return Err(Error::Parameter(format!("time step must be > 0, got {dt}")));
    }
    let s = Tracked {
        x: *state,
        ..Default::default()
    };
    Ok(step_tracked(&s, inputs, dt)?.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converter::{ConnectionStructure, Phasing};

    fn parallel() -> DutyCommand {
        DutyCommand {
            d: [0.5, 0.5],
            d_m: 0.5,
            structure: ConnectionStructure::Parallel,
            phasing: Phasing::Interleaved,
        }
    }

    #[test]
    fn rk4_is_exact_on_a_ramp_and_accurate_on_decay() {
        let x = rk4_step(&2.0, 0.1, |_| 3.0);
        assert!((x - 2.3f64).abs() < 1e-15);
        let mut y = 1.0;
        for _ in 0..100 {
            y = rk4_step(&y, 0.01, |y| -y);
        }
        assert!((y - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn fixed_point_is_preserved() {
        let circuit = CircuitParams::default();
        let sources = [ChannelSource::Stiff(100.0), ChannelSource::Stiff(100.0)];
        let cmd = parallel();
        let st = ConverterState {
            i_l: 20.0,
            v_cpv: [100.0, 100.0],
            v_co: 200.0,
        };
        let inputs = StepInputs {
            t: 0.0,
            cmd: &cmd,
            sources: &sources,
            circuit: &circuit,
            model: ModelKind::Averaged,
        };
        assert_eq!(integrate_step(&st, &inputs, 1e-5).unwrap(), st);
    }

    #[test]
    fn inductor_ramps_against_a_huge_output_capacitor() {
        let circuit = CircuitParams {
            c_o: 1e9,
            ..Default::default()
        };
        let sources = [ChannelSource::Stiff(100.0), ChannelSource::Stiff(0.0)];
        let cmd = DutyCommand {
            d: [1.0, 0.0],
            structure: ConnectionStructure::Individual(0),
            phasing: Phasing::Synchronous,
            ..parallel()
        };
        let mut st = ConverterState {
            v_cpv: [100.0, 0.0],
            ..Default::default()
        };
        let dt = 1e-5;
        for n in 1..=50 {
            let inputs = StepInputs {
                t: 0.0,
                cmd: &cmd,
                sources: &sources,
                circuit: &circuit,
                model: ModelKind::Averaged,
            };
            st = integrate_step(&st, &inputs, dt).unwrap();
            let expected = n as f64 * 100.0 * dt / circuit.l;
            assert!((st.i_l - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn inductor_current_never_goes_negative() {
        let circuit = CircuitParams::default();
        let sources = [ChannelSource::Stiff(10.0), ChannelSource::Stiff(10.0)];
        let cmd = parallel();
        let mut st = ConverterState {
            i_l: 0.5,
            v_cpv: [10.0, 10.0],
            v_co: 300.0,
        };
        for j in 0..200 {
            let inputs = StepInputs {
                t: j as f64 * 1e-5,
                cmd: &cmd,
                sources: &sources,
                circuit: &circuit,
                model: ModelKind::Averaged,
            };
            st = integrate_step(&st, &inputs, 1e-5).unwrap();
            assert!(st.i_l >= 0.0);
        }
        assert_eq!(st.i_l, 0.0);
    }

    #[test]
    fn non_finite_state_is_reported() {
        let circuit = CircuitParams::default();
        let sources = [ChannelSource::Stiff(100.0), ChannelSource::Stiff(100.0)];
        let cmd = parallel();
        let st = ConverterState {
            i_l: f64::INFINITY,
            v_cpv: [100.0, 100.0],
            v_co: 0.0,
        };
        let inputs = StepInputs {
            t: 0.5,
            cmd: &cmd,
            sources: &sources,
            circuit: &circuit,
            model: ModelKind::Averaged,
        };
        assert!(matches!(
            integrate_step(&st, &inputs, 1e-5),
            Err(Error::BlowUp { .. })
        ));
    }
}
