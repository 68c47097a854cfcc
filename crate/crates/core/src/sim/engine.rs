use std::collections::HashMap;

use super::integrator::{source_currents, step_tracked, ChannelSource, StepInputs, Tracked};
use super::profile::MissionProfile;
use super::record::{SampleAccumulator, WaveformRecord};
use super::scenario::{ControlConfig, Event, Scenario, Sources};
use crate::control::{assign_duties, select_mode, DualLoop, OperatingMode, PnoState};
use crate::converter::{ConverterState, Drive, DutyCommand, CHANNELS};
use crate::error::Result;
use crate::io::report::{summarize, ModeChange, RunTotals, Summary};
use crate::pv::{calibrate_panel, AtmosphereSample, PanelParams};

/// Oracle refresh interval under a continuously varying mission profile, s.
const PROFILE_ORACLE_INTERVAL: f64 = 0.01;

/// Runs a scenario from rest and returns the waveforms and summary. A
/// referenced mission profile is loaded from disk.
pub fn run_scenario(sc: &Scenario) -> Result<(WaveformRecord, Summary)> {
    sc.validate()?;
    let profile = sc
        .mission_profile_path()
        .map(|p| MissionProfile::from_path(&p))
        .transpose()?;
    run_with_profile(sc, profile.as_ref())
}

/// Like [`run_scenario`] with the mission profile supplied by the caller.
pub fn run_with_profile(
    sc: &Scenario,
    profile: Option<&MissionProfile>,
) -> Result<(WaveformRecord, Summary)> {
    sc.validate()?;
    Simulation::new(sc, profile)?.run()
}

struct OracleCache {
    panel: PanelParams,
    cache: HashMap<(u64, u64), f64>,
}

impl OracleCache {
    fn p_mp(&mut self, a: AtmosphereSample) -> Result<f64> {
        let key = (a.irradiance.to_bits(), a.temperature.to_bits());
        if let Some(&p) = self.cache.get(&key) {
            return Ok(p);
        }
        let p = self.panel.curve(a)?.mpp().p;
        self.cache.insert(key, p);
        Ok(p)
    }
}

enum Controller {
    OpenLoop(DutyCommand),
    Mppt(Box<Mppt>),
}

struct Mppt {
    cfg: ControlConfig,
    step: f64,
    pno_every: usize,
    ticks: usize,
    mode: Option<OperatingMode>,
    pno: [PnoState; CHANNELS],
    loops: [DualLoop; CHANNELS],
    acc_v: [f64; CHANNELS],
    acc_p: [f64; CHANNELS],
    acc_n: usize,
    cmd: DutyCommand,
}

impl Mppt {
    /// One control tick. `i_pv` is each string's terminal current (for P&O
    /// power); `i_in` is the current the converter draws from each input
    /// (the inner-loop measurement). Returns the new mode when it changed.
    fn tick(
        &mut self,
        x: &ConverterState,
        i_pv: &[f64; CHANNELS],
        i_in: &[f64; CHANNELS],
        atmos: &[AtmosphereSample; CHANNELS],
        voc: &[f64; CHANNELS],
        dt: f64,
    ) -> Result<Option<OperatingMode>> {
        for k in 0..CHANNELS {
            self.acc_v[k] += x.v_cpv[k];
            self.acc_p[k] += x.v_cpv[k] * i_pv[k];
        }
        self.acc_n += 1;

        let mut changed = None;
        if self.ticks % self.pno_every == 0 {
            let mode = select_mode(atmos, &self.cfg.thresholds)?;
            if self.mode.as_ref() != Some(&mode) {
                let before = self.mode.as_ref().map(|m| m.tracking()).unwrap_or_default();
                for k in mode.tracking() {
                    if !before.contains(&k) {
                        let v0 = self.cfg.pno.start_fraction * voc[k];
                        self.pno[k] = PnoState::new(v0, self.step, voc[k])?;
                    }
                }
                self.mode = Some(mode.clone());
                changed = Some(mode);
            } else if self.ticks > 0 {
                let n = self.acc_n as f64;
                for k in mode.tracking() {
                    self.pno[k].v_max = voc[k];
                    self.pno[k].update(self.acc_v[k] / n, self.acc_p[k] / n);
                }
            }
            self.acc_v = [0.0; CHANNELS];
            self.acc_p = [0.0; CHANNELS];
            self.acc_n = 0;
        }

        let mode = self.mode.as_ref().expect("mode chosen on first tick");
        let tracking = mode.tracking();
        let mut duties = [0.0; CHANNELS];
        for &k in &tracking {
            duties[k] = self.loops[k].step(self.pno[k].v_ref, x.v_cpv[k], i_in[k], dt);
        }
        let cmd = assign_duties(mode, duties[mode.leader], &duties, self.cfg.d_m);
        for k in 0..CHANNELS {
            if tracking.contains(&k) {
                // keep the integrator consistent with a rescaled duty
                let c = &mut self.loops[k].current;
                c.integrator = c.integrator.min(cmd.d[k]);
            } else {
                self.loops[k].preset(cmd.d[k], i_in[k]);
            }
        }
        self.cmd = cmd;
        self.ticks += 1;
        Ok(changed)
    }
}

struct Simulation<'a> {
    sc: &'a Scenario,
    profile: Option<&'a MissionProfile>,
    panel: Option<PanelParams>,
    oracle: Option<OracleCache>,
    atmos: [AtmosphereSample; CHANNELS],
    sources: [ChannelSource; CHANNELS],
    oracle_p: [f64; CHANNELS],
    controller: Controller,
    timeline: Vec<ModeChange>,
}

impl<'a> Simulation<'a> {
    fn new(sc: &'a Scenario, profile: Option<&'a MissionProfile>) -> Result<Self> {
        let panel = match sc.sources {
            Sources::Pv => Some(calibrate_panel(&sc.panel)?),
            Sources::Ideal { .. } => None,
        };
        let atmos = [sc.initial_atmosphere[0], sc.initial_atmosphere[1]];
        let placeholder = DutyCommand {
            d: [0.0; CHANNELS],
            d_m: sc.control.d_m,
            structure: crate::converter::ConnectionStructure::Parallel,
            phasing: Default::default(),
        };
        let controller = if sc.is_open_loop() {
            Controller::OpenLoop(placeholder)
        } else {
            let c = sc.control;
            let voc_stc = sc.panel.voc * sc.panel.panels_in_series as f64;
            let step = c.pno.step.unwrap_or(0.005 * voc_stc);
            let pno = PnoState::new(0.0, step, voc_stc)?;
            let pno_every = ((c.pno.period / sc.dt_control).round() as usize).max(1);
            Controller::Mppt(Box::new(Mppt {
                cfg: c,
                step,
                pno_every,
                ticks: 0,
                mode: None,
                pno: [pno; CHANNELS],
                loops: [DualLoop::new(c.voltage_loop, c.current_loop); CHANNELS],
                acc_v: [0.0; CHANNELS],
                acc_p: [0.0; CHANNELS],
                acc_n: 0,
                cmd: placeholder,
            }))
        };
        let mut sim = Simulation {
            sc,
            profile,
            oracle: panel.map(|p| OracleCache {
                panel: p,
                cache: HashMap::new(),
            }),
            panel,
            atmos,
            sources: [ChannelSource::Stiff(0.0); CHANNELS],
            oracle_p: [0.0; CHANNELS],
            controller,
            timeline: Vec::new(),
        };
        if let Some(p) = profile {
            sim.atmos = p.at(0.0);
        }
        sim.refresh_sources()?;
        sim.refresh_oracle()?;
        Ok(sim)
    }

    fn refresh_sources(&mut self) -> Result<()> {
        match (self.sc.sources, self.panel) {
            (Sources::Ideal { voltages }, _) => {
                self.sources = voltages.map(ChannelSource::Stiff);
            }
            (Sources::Pv, Some(panel)) => {
                for k in 0..CHANNELS {
                    self.sources[k] = ChannelSource::Pv(panel.curve(self.atmos[k])?);
                }
            }
            (Sources::Pv, None) => unreachable!("pv sources are calibrated up front"),
        }
        Ok(())
    }

    fn refresh_oracle(&mut self) -> Result<()> {
        if let Some(o) = self.oracle.as_mut() {
            for k in 0..CHANNELS {
                self.oracle_p[k] = o.p_mp(self.atmos[k])?;
            }
        }
        Ok(())
    }

    fn initial_state(&self) -> ConverterState {
        let mut x = ConverterState::default();
        for k in 0..CHANNELS {
            x.v_cpv[k] = match self.sources[k] {
                ChannelSource::Stiff(v) => v,
                ChannelSource::Pv(c) => c.voc(),
            };
        }
        x
    }

    fn voc(&self) -> [f64; CHANNELS] {
        self.sources.map(|s| match s {
            ChannelSource::Stiff(v) => v,
            ChannelSource::Pv(c) => c.voc(),
        })
    }

    fn apply_event(&mut self, e: &Event, t_now: f64) -> Result<()> {
        match *e {
            Event::Structure {
                structure,
                duties,
                phasing,
                ..
            } => {
                let cmd = DutyCommand {
                    d: duties,
                    d_m: self.sc.control.d_m,
                    structure,
                    phasing,
                };
                cmd.validate()?;
                self.controller = Controller::OpenLoop(cmd);
                self.timeline.push(ModeChange {
                    t: t_now,
                    structure,
                    regime: None,
                    leader: None,
                });
            }
            Event::Atmosphere {
                channel,
                irradiance,
                temperature,
                ..
            } => {
                let a = &mut self.atmos[channel - 1];
                if let Some(ir) = irradiance {
                    a.irradiance = ir;
                }
                if let Some(temp) = temperature {
                    a.temperature = temp;
                }
                a.validate()?;
                self.refresh_sources()?;
                self.refresh_oracle()?;
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<(WaveformRecord, Summary)> {
        let sc = self.sc;
        let dt = sc.dt_sim();
        let n_steps = (sc.duration / dt).round() as usize;
        let control_every = ((sc.dt_control / dt).round() as usize).max(1);
        let record_every = ((sc.record_interval / dt).round() as usize).max(1);
        let dt_control = control_every as f64 * dt;
        let oracle_every = ((PROFILE_ORACLE_INTERVAL / dt).round() as usize).max(1);
        let events = sc.sorted_events();
        let mut next_event = 0;

        let mut s = Tracked {
            x: self.initial_state(),
            ..Default::default()
        };
        let stored_initial = s.x.stored_energy(&sc.circuit);
        let mut record = WaveformRecord {
            interval: record_every as f64 * dt,
            samples: Vec::with_capacity(n_steps / record_every + 1),
        };
        let mut acc = SampleAccumulator::default();
        let mut tracked_sum = [0.0; CHANNELS];
        let mut oracle_sum = [0.0; CHANNELS];
        let mut head: Option<(f64, DutyCommand)> = None;

        for j in 0..n_steps {
            let t = j as f64 * dt;
            while next_event < events.len() && events[next_event].t() <= t + 0.5 * dt {
                let e = events[next_event];
                self.apply_event(&e, t)?;
                next_event += 1;
            }
            if let Some(p) = self.profile {
                let a = p.at(t);
                if a != self.atmos {
                    self.atmos = a;
                    self.refresh_sources()?;
                }
                if j % oracle_every == 0 {
                    self.refresh_oracle()?;
                }
            }

            if j % control_every == 0 {
                let voc = self.voc();
                if let Controller::Mppt(m) = &mut self.controller {
                    let (i_pv, i_in) =
                        source_currents(&s.x, &Drive::averaged(&m.cmd), &self.sources);
                    if let Some(mode) = m.tick(&s.x, &i_pv, &i_in, &self.atmos, &voc, dt_control)? {
                        self.timeline.push(ModeChange {
                            t,
                            structure: mode.structure,
                            regime: Some(mode.regime),
                            leader: Some(mode.leader + 1),
                        });
                    }
                }
            }
            let cmd = match &self.controller {
                Controller::OpenLoop(c) => *c,
                Controller::Mppt(m) => m.cmd,
            };

            if j % record_every == 0 {
                if let Some((t0, c0)) = head.take() {
                    let sample = acc.finish(t0, sc.circuit.r_load, c0.structure, c0.d, c0.d_m);
                    for k in 0..CHANNELS {
                        tracked_sum[k] += sample.p_pv[k];
                        oracle_sum[k] += self.oracle_p[k];
                    }
                    record.samples.push(sample);
                }
                head = Some((t, cmd));
            }

            let inputs = StepInputs {
                t,
                cmd: &cmd,
                sources: &self.sources,
                circuit: &sc.circuit,
                model: sc.model,
            };
            let (i_pv, _) = source_currents(&s.x, &inputs.drive(dt), &self.sources);
            acc.add(s.x.v_cpv, i_pv, s.x.i_l, s.x.v_co);
            s = step_tracked(&s, &inputs, dt)?;
        }
        if let Some((t0, c0)) = head.take() {
            if !acc.is_empty() {
                let sample = acc.finish(t0, sc.circuit.r_load, c0.structure, c0.d, c0.d_m);
                for k in 0..CHANNELS {
                    tracked_sum[k] += sample.p_pv[k];
                    oracle_sum[k] += self.oracle_p[k];
                }
                record.samples.push(sample);
            }
        }

        let totals = RunTotals {
            source_energy: s.e_src,
            load_energy: s.e_load,
            stored_initial,
            stored_final: s.x.stored_energy(&sc.circuit),
            tracked_power_sum: tracked_sum,
            oracle_power_sum: oracle_sum,
            timeline: self.timeline,
            pv_sources: self.panel.is_some(),
            final_state: s.x,
        };
        let summary = summarize(sc, &record, totals);
        Ok((record, summary))
    }
}
