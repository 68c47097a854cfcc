use std::path::Path;

use crate::converter::ConnectionStructure;
use crate::error::{Error, Result};
use crate::sim::{Sample, WaveformRecord};

pub const WAVEFORM_HEADER: [&str; 14] = [
    "t", "v_pv1", "v_pv2", "i_pv1", "i_pv2", "i_l", "v_o", "i_o", "p_pv1", "p_pv2", "mode", "d1",
    "d2", "dm",
];

/// Writes one CSV row per sample. Floats use the shortest representation
/// that parses back to the same value.
pub fn write_waveforms(rec: &WaveformRecord, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let csv_err = |e: csv::Error| Error::Format(format!("writing {}: {e}", path.display()));
    w.write_record(WAVEFORM_HEADER).map_err(csv_err)?;
    for s in &rec.samples {
        let nums = [
            s.t, s.v_pv[0], s.v_pv[1], s.i_pv[0], s.i_pv[1], s.i_l, s.v_o, s.i_o, s.p_pv[0],
            s.p_pv[1],
        ];
        let mut row: Vec<String> = nums.iter().map(|x| x.to_string()).collect();
        row.push(s.mode.to_string());
        row.extend([s.d[0], s.d[1], s.d_m].iter().map(|x| x.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_waveforms(path: &Path) -> Result<WaveformRecord> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(std::io::BufReader::new(file));
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::Format(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != WAVEFORM_HEADER {
        return Err(Error::Format(format!("unexpected waveform header {header:?}")));
    }
    let mut samples = Vec::new();
    for (k, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::Format(e.to_string()))?;
        let num = |j: usize| -> Result<f64> {
            row[j]
                .parse()
                .map_err(|_| Error::Format(format!("row {}: bad number `{}`", k + 1, &row[j])))
        };
        samples.push(Sample {
            t: num(0)?,
            v_pv: [num(1)?, num(2)?],
            i_pv: [num(3)?, num(4)?],
            i_l: num(5)?,
            v_o: num(6)?,
            i_o: num(7)?,
            p_pv: [num(8)?, num(9)?],
            mode: row[10].parse::<ConnectionStructure>()?,
            d: [num(11)?, num(12)?],
            d_m: num(13)?,
        });
    }
    let interval = match samples.as_slice() {
        [a, b, ..] => b.t - a.t,
        _ => 0.0,
    };
    Ok(WaveformRecord { interval, samples })
}
