//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;

use mippv::pv::{calibrate_panel, AtmosphereSample, Datasheet, PanelParams};
use mippv::sim::{Scenario, WaveformRecord};
use mippv::io::{load_scenario, ModeChange};
use mippv::Regime;

pub fn scenarios_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"))
}

pub fn scenario(name: &str) -> Scenario {
    load_scenario(&scenarios_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn panel() -> PanelParams {
    calibrate_panel(&Datasheet::default()).expect("default datasheet calibrates")
}

/// Maximum power found by a dense direct sweep of the string, independent
/// of the library's own MPP search.
pub fn sweep_mpp(params: &PanelParams, ir: f64, temp: f64) -> (f64, f64) {
    let curve = params
        .curve(AtmosphereSample::new(ir, temp).unwrap())
        .unwrap();
    let voc = curve.voc();
    const N: usize = 20_000;
    (0..=N)
        .map(|k| {
            let v = voc * k as f64 / N as f64;
            (v, v * curve.current(v))
        })
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

pub fn voc(params: &PanelParams, ir: f64, temp: f64) -> f64 {
    params
        .curve(AtmosphereSample::new(ir, temp).unwrap())
        .unwrap()
        .voc()
}

/// Regime in force at time `t` according to a mode timeline.
pub fn regime_at(timeline: &[ModeChange], t: f64) -> Option<Regime> {
    timeline
        .iter()
        .take_while(|m| m.t <= t)
        .last()
        .and_then(|m| m.regime)
}

/// Means of `f` over consecutive blocks of `width` seconds in `[from, to)`.
pub fn block_means(
    rec: &WaveformRecord,
    from: f64,
    to: f64,
    width: f64,
    f: impl Fn(&mippv::sim::Sample) -> f64 + Copy,
) -> Vec<(f64, f64)> {
    let n = ((to - from) / width).round() as usize;
    (0..n)
        .filter_map(|k| {
            let a = from + k as f64 * width;
            rec.mean(a, a + width, f).map(|m| (a, m))
        })
        .collect()
}

pub fn rel(measured: f64, expected: f64) -> f64 {
    ((measured - expected) / expected).abs()
}
