//! Scenario files, waveform CSV and run summaries.

mod config;
pub mod report;
mod waveform;

use std::path::Path;

pub use config::{load_scenario, parse_panel, parse_scenario, scenario_to_toml};
pub use report::{render_text, Comparison, ModeChange, PhaseSummary, Summary};
pub use waveform::{read_waveforms, write_waveforms, WAVEFORM_HEADER};

use crate::error::{Error, Result};

/// Writes `summary.json` (machine form) and `summary.txt` (table form) into `dir`.
pub fn write_summary(summary: &Summary, dir: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::Format(format!("cannot serialize summary: {e}")))?;
    let p = dir.join("summary.json");
    std::fs::write(&p, json).map_err(|e| Error::io(&p, e))?;
    let p = dir.join("summary.txt");
    std::fs::write(&p, render_text(summary)).map_err(|e| Error::io(&p, e))?;
    Ok(())
}
