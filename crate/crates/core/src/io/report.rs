//! Run summaries: per-phase steady-state means, energy accounting, MPPT
//! efficiency and the comparison against published reference values.

use std::fmt::Write as _;

use serde::Serialize;

use crate::control::Regime;
use crate::converter::{ConnectionStructure, ConverterState, CHANNELS};
use crate::sim::{Quantity, Sample, Scenario, WaveformRecord};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeChange {
    pub t: f64,
    pub structure: ConnectionStructure,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    /// 1-based MPPT leader.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leader: Option<usize>,
}

/// Raw totals collected by the engine.
#[derive(Clone, Debug)]
pub struct RunTotals {
    pub source_energy: f64,
    pub load_energy: f64,
    pub stored_initial: f64,
    pub stored_final: f64,
    pub tracked_power_sum: [f64; CHANNELS],
    pub oracle_power_sum: [f64; CHANNELS],
    pub timeline: Vec<ModeChange>,
    pub pv_sources: bool,
    pub final_state: ConverterState,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseSummary {
    /// 1-based.
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Start of the averaging window.
    pub window_start: f64,
    pub samples: usize,
    pub structure: Option<ConnectionStructure>,
    pub v_o: f64,
    pub i_o: f64,
    pub i_l: f64,
    pub v_pv: [f64; CHANNELS],
    pub i_pv: [f64; CHANNELS],
    pub p_pv: [f64; CHANNELS],
}

impl PhaseSummary {
    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::VOut => self.v_o,
            Quantity::IOut => self.i_o,
            Quantity::IL => self.i_l,
            Quantity::VPv1 => self.v_pv[0],
            Quantity::VPv2 => self.v_pv[1],
            Quantity::IPv1 => self.i_pv[0],
            Quantity::IPv2 => self.i_pv[1],
            Quantity::PPv1 => self.p_pv[0],
            Quantity::PPv2 => self.p_pv[1],
            Quantity::PIn => self.p_pv[0] + self.p_pv[1],
            Quantity::POut => self.v_o * self.i_o,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub phase: usize,
    pub quantity: Quantity,
    pub expected: f64,
    pub measured: f64,
    pub rel_error: f64,
    pub flagged: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub duration: f64,
    pub samples: usize,
    pub phases: Vec<PhaseSummary>,
    /// Energy dissipated in the load, J.
    pub delivered_energy: f64,
    pub source_energy: f64,
    pub stored_energy_delta: f64,
    /// `(source - load - stored delta) / source`; zero when no energy flowed.
    pub energy_balance_error: f64,
    /// Mean tracked power over mean oracle MPP power, per channel. Absent for
    /// ideal sources or channels that never saw light.
    pub mppt_efficiency: Vec<Option<f64>>,
    pub mode_timeline: Vec<ModeChange>,
    pub comparison: Vec<Comparison>,
    pub final_state: ConverterState,
}

impl Summary {
    pub fn phase(&self, index: usize) -> Option<&PhaseSummary> {
        self.phases.iter().find(|p| p.index == index)
    }
}

pub fn summarize(sc: &Scenario, rec: &WaveformRecord, totals: RunTotals) -> Summary {
    let bounds = sc.phase_bounds();
    let phases: Vec<PhaseSummary> = bounds
        .windows(2)
        .enumerate()
        .map(|(k, w)| phase_summary(k + 1, w[0], w[1], sc.settle_fraction, rec))
        .collect();

    let comparison = sc
        .reference
        .iter()
        .map(|r| {
            let measured = phases[r.phase - 1].get(r.quantity);
            let rel_error = if r.value != 0.0 {
                (measured - r.value) / r.value.abs()
            } else {
                measured
            };
            Comparison {
                phase: r.phase,
                quantity: r.quantity,
                expected: r.value,
                measured,
                rel_error,
                flagged: r.flagged,
                note: r.note.clone(),
            }
        })
        .collect();

    let stored_delta = totals.stored_final - totals.stored_initial;
    let energy_balance_error = if totals.source_energy > 0.0 {
        (totals.source_energy - totals.load_energy - stored_delta) / totals.source_energy
    } else {
        0.0
    };
    let mppt_efficiency = (0..CHANNELS)
        .map(|k| {
            (totals.pv_sources && totals.oracle_power_sum[k] > 0.0)
                .then(|| totals.tracked_power_sum[k] / totals.oracle_power_sum[k])
        })
        .collect();

    Summary {
        duration: sc.duration,
        samples: rec.len(),
        phases,
        delivered_energy: totals.load_energy,
        source_energy: totals.source_energy,
        stored_energy_delta: stored_delta,
        energy_balance_error,
        mppt_efficiency,
        mode_timeline: totals.timeline,
        comparison,
        final_state: totals.final_state,
    }
}

fn phase_summary(
    index: usize,
    t_start: f64,
    t_end: f64,
    settle: f64,
    rec: &WaveformRecord,
) -> PhaseSummary {
    let window_start = t_start + settle * (t_end - t_start);
    let samples: Vec<&Sample> = rec.window(window_start, t_end).collect();
    let n = samples.len();
    let mean = |f: &dyn Fn(&Sample) -> f64| {
        if n == 0 {
            0.0
        } else {
            samples.iter().map(|s| f(s)).sum::<f64>() / n as f64
        }
    };
    PhaseSummary {
        index,
        t_start,
        t_end,
        window_start,
        samples: n,
        structure: samples.last().map(|s| s.mode),
        v_o: mean(&|s| s.v_o),
        i_o: mean(&|s| s.i_o),
        i_l: mean(&|s| s.i_l),
        v_pv: std::array::from_fn(|k| mean(&|s| s.v_pv[k])),
        i_pv: std::array::from_fn(|k| mean(&|s| s.i_pv[k])),
        p_pv: std::array::from_fn(|k| mean(&|s| s.p_pv[k])),
    }
}

fn quantity_label(q: Quantity) -> &'static str {
    match q {
        Quantity::VOut => "v_o",
        Quantity::IOut => "i_o",
        Quantity::IL => "i_l",
        Quantity::VPv1 => "v_pv1",
        Quantity::VPv2 => "v_pv2",
        Quantity::IPv1 => "i_pv1",
        Quantity::IPv2 => "i_pv2",
        Quantity::PPv1 => "p_pv1",
        Quantity::PPv2 => "p_pv2",
        Quantity::PIn => "p_in",
        Quantity::POut => "p_out",
    }
}

/// Human-readable rendering of a summary.
pub fn render_text(s: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "duration {:.4} s, {} samples, delivered {:.3} J (source {:.3} J, storage delta {:.3} J, balance error {:.2e})",
        s.duration, s.samples, s.delivered_energy, s.source_energy, s.stored_energy_delta, s.energy_balance_error
    );
    let _ = writeln!(
        out,
        "{:>5} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10}",
        "phase", "start", "end", "struct", "v_o", "i_o", "i_l", "v_pv1", "v_pv2", "i_pv1", "i_pv2", "p_in"
    );
    for p in &s.phases {
        let st = p.structure.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:>5} {:>9.4} {:>9.4} {:>9} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>10.3} {:>10.2}",
            p.index,
            p.t_start,
            p.t_end,
            st,
            p.v_o,
            p.i_o,
            p.i_l,
            p.v_pv[0],
            p.v_pv[1],
            p.i_pv[0],
            p.i_pv[1],
            p.p_pv[0] + p.p_pv[1]
        );
    }
    for (k, e) in s.mppt_efficiency.iter().enumerate() {
        if let Some(e) = e {
            let _ = writeln!(out, "mppt efficiency pv{}: {:.4}", k + 1, e);
        }
    }
    if !s.mode_timeline.is_empty() {
        let _ = writeln!(out, "mode timeline:");
        for m in &s.mode_timeline {
            let regime = m.regime.map(|r| r.to_string()).unwrap_or_else(|| "forced".into());
            let leader = m.leader.map(|l| format!(" leader pv{l}")).unwrap_or_default();
            let _ = writeln!(out, "  {:>9.4} s  {} ({}){}", m.t, m.structure, regime, leader);
        }
    }
    if !s.comparison.is_empty() {
        let _ = writeln!(out, "reference comparison:");
        let _ = writeln!(
            out,
            "  {:>5} {:>8} {:>12} {:>12} {:>9}  note",
            "phase", "qty", "reference", "simulated", "rel.err"
        );
        for c in &s.comparison {
            let flag = if c.flagged { " [inconsistent]" } else { "" };
            let _ = writeln!(
                out,
                "  {:>5} {:>8} {:>12.3} {:>12.3} {:>8.2}%  {}{}",
                c.phase,
                quantity_label(c.quantity),
                c.expected,
                c.measured,
                100.0 * c.rel_error,
                c.note,
                flag
            );
        }
    }
    out
}
