//! Time series of per-channel irradiance and temperature.
//!
//! File format: comma-separated with header `t,ir1,t1,ir2,t2`; time in s,
//! irradiance in W/m², temperature in °C.

use std::path::Path;

use serde::Deserialize;

use crate::converter::CHANNELS;
use crate::error::{Error, Result};
use crate::pv::AtmosphereSample;

pub const HEADER: [&str; 5] = ["t", "ir1", "t1", "ir2", "t2"];

#[derive(Clone, Debug, PartialEq)]
pub struct MissionProfile {
    times: Vec<f64>,
    samples: Vec<[AtmosphereSample; CHANNELS]>,
}

#[derive(Deserialize)]
struct Row {
    t: f64,
    ir1: f64,
    t1: f64,
    ir2: f64,
    t2: f64,
}

impl MissionProfile {
    pub fn new(times: Vec<f64>, samples: Vec<[AtmosphereSample; CHANNELS]>) -> Result<Self> {
        if times.is_empty() || times.len() != samples.len() {
            return Err(Error::Format(
                "mission profile needs at least one row and matching lengths".into(),
            ));
        }
        if let Some(k) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::Format(format!("row {}: non-finite time", k + 1)));
        }
        if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Format(format!(
                "timestamps must strictly increase (row {} has t = {} after {})",
                k + 2,
                times[k + 1],
                times[k]
            )));
        }
        for (k, row) in samples.iter().enumerate() {
            for a in row {
                a.validate()
                    .map_err(|e| Error::Format(format!("row {}: {e}", k + 1)))?;
            }
        }
        Ok(MissionProfile { times, samples })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        load_mission_profile(&text)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    /// Piecewise-linear value at `t`, clamped to the end samples.
    pub fn at(&self, t: f64) -> [AtmosphereSample; CHANNELS] {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.samples[0];
        }
        if t >= self.times[n - 1] {
            return self.samples[n - 1];
        }
        let hi = self.times.partition_point(|&x| x <= t);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        let lerp = |a: f64, b: f64| a + w * (b - a);
        let (a, b) = (&self.samples[lo], &self.samples[hi]);
        std::array::from_fn(|k| AtmosphereSample {
            irradiance: lerp(a[k].irradiance, b[k].irradiance),
            temperature: lerp(a[k].temperature, b[k].temperature),
        })
    }
}

pub fn load_mission_profile(text: &str) -> Result<MissionProfile> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(format!("mission profile header: {e}")))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Format(format!(
            "mission profile header must be `{}`, got `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (k, row) in rdr.deserialize::<Row>().enumerate() {
        let r = row.map_err(|e| Error::Format(format!("mission profile row {}: {e}", k + 1)))?;
        times.push(r.t);
        samples.push([
            AtmosphereSample {
                irradiance: r.ir1,
                temperature: r.t1,
            },
            AtmosphereSample {
                irradiance: r.ir2,
                temperature: r.t2,
            },
        ]);
    }
    MissionProfile::new(times, samples)
}
