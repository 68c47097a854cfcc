//! Command-line front end. Exit codes: 0 success, 1 run failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::converter::{switch_table, ConnectionStructure};
use crate::error::{Error, Result};
use crate::io::{self, Summary};
use crate::pv::{calibrate_panel, AtmosphereSample};
use crate::sim::{run_scenario, ModelKind, Scenario};

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "MIPPV_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "mippv", version, about = "Programmable multi-input buck-boost converter simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario and write waveforms.csv, summary.json and summary.txt.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario's model (its dt_sim falls back to the model default).
        #[arg(long, value_parser = parse_model)]
        model: Option<ModelKind>,
    },
    /// Print the I-V/P-V sweep and brute-force MPP of a panel string.
    Mpp {
        panel_config: PathBuf,
        #[arg(long)]
        ir: f64,
        #[arg(long)]
        temp: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Print which switches and diodes operate in a connection structure.
    Table {
        #[arg(value_parser = parse_structure)]
        structure: ConnectionStructure,
    },
    /// Run variants of a scenario with one key replaced by each value.
    Sweep {
        scenario: PathBuf,
        /// Dotted key, e.g. `circuit.r_load`.
        #[arg(long)]
        param: String,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    match s {
        "averaged" => Ok(ModelKind::Averaged),
        "switched" => Ok(ModelKind::Switched),
        _ => Err(format!("expected `averaged` or `switched`, got `{s}`")),
    }
}

fn parse_structure(s: &str) -> std::result::Result<ConnectionStructure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (including the program name) and runs the command against
/// the process's stdout/stderr.
pub fn cli_dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn dispatch_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    let w = |e: std::io::Error| Error::io("<stdout>", e);
    match cmd {
        Command::Table { structure } => {
            writeln!(out, "{}", switch_table(structure)).map_err(w)?;
        }
        Command::Mpp {
            panel_config,
            ir,
            temp,
            points,
        } => {
            let text =
                std::fs::read_to_string(&panel_config).map_err(|e| Error::io(&panel_config, e))?;
            let ds = io::parse_panel(&text)?;
            let params = calibrate_panel(&ds)?;
            let curve = params.curve(AtmosphereSample::new(ir, temp)?)?;
            writeln!(
                out,
                "# ideality {:.3}, r_series {:.5} ohm, r_shunt {:.2} ohm (per panel), {} panels",
                params.ideality, params.r_series, params.r_shunt, params.panels_in_series
            )
            .map_err(w)?;
            writeln!(out, "v,i,p").map_err(w)?;
            for pt in curve.sweep(points) {
                writeln!(out, "{:.4},{:.6},{:.4}", pt.v, pt.i, pt.p).map_err(w)?;
            }
            let mpp = curve.mpp();
            writeln!(
                out,
                "# mpp: v = {:.4} V, i = {:.4} A, p = {:.3} W (voc {:.4} V)",
                mpp.v,
                mpp.i,
                mpp.p,
                curve.voc()
            )
            .map_err(w)?;
        }
        Command::Run {
            scenario,
            out: dir,
            model,
        } => {
            let mut sc = io::load_scenario(&scenario)?;
            if let Some(m) = model {
                if m != sc.model {
                    sc.model = m;
                    sc.dt_sim = None;
                }
            }
            let dir = out_dir(dir);
            let summary = run_to_dir(&sc, &dir)?;
            write!(out, "{}", io::render_text(&summary)).map_err(w)?;
            writeln!(out, "wrote {}", dir.display()).map_err(w)?;
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out: dir,
        } => {
            let text = std::fs::read_to_string(&scenario).map_err(|e| Error::io(&scenario, e))?;
            let base: toml::Table =
                toml::from_str(&text).map_err(|e| Error::Format(e.message().to_string()))?;
            let base_dir = scenario.parent().map(Path::to_path_buf);
            let dir = out_dir(dir);
            let variants = values
                .iter()
                .map(|v| {
                    let mut doc = base.clone();
                    set_dotted(&mut doc, &param, parse_toml_scalar(v))?;
                    let text = toml::to_string(&doc)
                        .map_err(|e| Error::Format(format!("re-serializing variant: {e}")))?;
                    let mut sc = io::parse_scenario(&text)?;
                    sc.base_dir = base_dir.clone();
                    Ok(sc)
                })
                .collect::<Result<Vec<Scenario>>>()?;
            let results: Vec<Result<Summary>> = variants
                .par_iter()
                .enumerate()
                .map(|(k, sc)| run_to_dir(sc, &dir.join(format!("sweep_{k}"))))
                .collect();
            writeln!(
                out,
                "{:>4} {:>14} {:>12} {:>14} {:>10} {:>10}",
                "run", param, "final v_o", "delivered J", "eff pv1", "eff pv2"
            )
            .map_err(w)?;
            let mut failed = None;
            for (k, (v, r)) in values.iter().zip(results).enumerate() {
                match r {
                    Ok(s) => {
                        let eff = |j: usize| {
                            s.mppt_efficiency[j]
                                .map(|e| format!("{e:.4}"))
                                .unwrap_or_else(|| "-".into())
                        };
                        let v_o = s.phases.last().map(|p| p.v_o).unwrap_or(0.0);
                        writeln!(
                            out,
                            "{:>4} {:>14} {:>12.3} {:>14.3} {:>10} {:>10}",
                            k,
                            v,
                            v_o,
                            s.delivered_energy,
                            eff(0),
                            eff(1)
                        )
                        .map_err(w)?;
                    }
                    Err(e) => {
                        writeln!(out, "{k:>4} {v:>14} failed: {e}").map_err(w)?;
                        failed.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = failed {
                return Err(e);
            }
        }
    }
    Ok(())
}

fn run_to_dir(sc: &Scenario, dir: &Path) -> Result<Summary> {
    let (rec, summary) = run_scenario(sc)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    io::write_waveforms(&rec, &dir.join("waveforms.csv"))?;
    io::write_summary(&summary, dir)?;
    Ok(summary)
}

fn parse_toml_scalar(s: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {s}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(s.to_string()))
}

fn set_dotted(doc: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty());
    let Some(last) = last else {
        return Err(Error::config(key, "empty parameter key"));
    };
    let mut table = doc;
    for p in parts {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{p}` is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}
