use serde::Serialize;

use crate::converter::{ConnectionStructure, CHANNELS};

/// One recorded row. Continuous quantities are means over the record
/// interval starting at `t`; `mode` and duties are the command in force at `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub v_pv: [f64; CHANNELS],
    pub i_pv: [f64; CHANNELS],
    pub i_l: f64,
    pub v_o: f64,
    pub i_o: f64,
    pub p_pv: [f64; CHANNELS],
    pub mode: ConnectionStructure,
    pub d: [f64; CHANNELS],
    pub d_m: f64,
}

/// Uniformly spaced waveform samples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WaveformRecord {
    pub interval: f64,
    pub samples: Vec<Sample>,
}

impl WaveformRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples whose time lies in `[from, to)`.
    pub fn window(&self, from: f64, to: f64) -> impl Iterator<Item = &Sample> {
        // half-interval slack against rounding of t = k * interval
        let eps = 1e-9 * self.interval;
        self.samples
            .iter()
            .filter(move |s| s.t >= from - eps && s.t < to - eps)
    }

    /// Mean of `f` over the samples in `[from, to)`; `None` when empty.
    pub fn mean(&self, from: f64, to: f64, f: impl Fn(&Sample) -> f64) -> Option<f64> {
        let (sum, n) = self
            .window(from, to)
            .fold((0.0, 0usize), |(s, n), x| (s + f(x), n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

/// Running sums for one record interval.
#[derive(Default)]
pub(crate) struct SampleAccumulator {
    n: usize,
    v_pv: [f64; CHANNELS],
    i_pv: [f64; CHANNELS],
    p_pv: [f64; CHANNELS],
    i_l: f64,
    v_o: f64,
}

impl SampleAccumulator {
    pub fn add(&mut self, v_pv: [f64; CHANNELS], i_pv: [f64; CHANNELS], i_l: f64, v_o: f64) {
        self.n += 1;
        for k in 0..CHANNELS {
            self.v_pv[k] += v_pv[k];
            self.i_pv[k] += i_pv[k];
            self.p_pv[k] += v_pv[k] * i_pv[k];
        }
        self.i_l += i_l;
        self.v_o += v_o;
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn finish(
        &mut self,
        t: f64,
        r_load: f64,
        mode: ConnectionStructure,
        d: [f64; CHANNELS],
        d_m: f64,
    ) -> Sample {
        let n = self.n.max(1) as f64;
        let v_o = self.v_o / n;
        let s = Sample {
            t,
            v_pv: self.v_pv.map(|x| x / n),
            i_pv: self.i_pv.map(|x| x / n),
            i_l: self.i_l / n,
            v_o,
            i_o: v_o / r_load,
            p_pv: self.p_pv.map(|x| x / n),
            mode,
            d,
            d_m,
        };
        *self = SampleAccumulator::default();
        s
    }
}
