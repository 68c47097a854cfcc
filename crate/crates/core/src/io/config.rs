use std::path::Path;

use crate::error::{Error, Result};
use crate::pv::Datasheet;
use crate::sim::Scenario;

/// Parses and validates a TOML scenario document. Omitted optional keys take
/// their defaults; unknown keys are rejected.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let sc: Scenario = toml::from_str(text).map_err(toml_error)?;
    sc.validate()?;
    Ok(sc)
}

/// Reads a scenario file; relative paths inside it resolve against its directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut sc = parse_scenario(&text)?;
    sc.base_dir = path.parent().map(Path::to_path_buf);
    Ok(sc)
}

pub fn scenario_to_toml(sc: &Scenario) -> Result<String> {
    toml::to_string(sc).map_err(|e| Error::Format(format!("cannot serialize scenario: {e}")))
}

/// A panel datasheet, either as a bare table or under a `[panel]` table
/// (so a scenario file works too).
pub fn parse_panel(text: &str) -> Result<Datasheet> {
    let value: toml::Table = toml::from_str(text).map_err(toml_error)?;
    let table = match value.get("panel") {
        Some(toml::Value::Table(t)) => t.clone(),
        Some(_) => return Err(Error::config("panel", "must be a table")),
        None => value,
    };
    table.try_into().map_err(|e: toml::de::Error| {
        let mut err = toml_error(e);
        if let Error::Config { key, .. } = &mut err {
            *key = format!("panel.{key}");
        }
        err
    })
}

fn toml_error(e: toml::de::Error) -> Error {
    let message = e.message().trim().to_string();
    // serde names the offending field in backticks
    let key = message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".into());
    Error::Config { key, message }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_misses_duration() {
        match parse_scenario("") {
            Err(Error::Config { key, message }) => {
                assert_eq!(key, "duration");
                assert!(message.contains("missing"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "duration = 1.0\nbogus = 3\n[sources]\nkind = \"pv\"\n";
        match parse_scenario(text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "bogus"),
            other => panic!("{other:?}"),
        }
        let text = "duration = 1.0\n[sources]\nkind = \"pv\"\n[circuit]\nl = 1e-3\nc_pv = 1e-4\nc_o = 1e-3\nr_load = 20\nf_sw = 2e4\nesr = 0.1\n";
        assert!(matches!(parse_scenario(text), Err(Error::Config { .. })));
    }

    #[test]
    fn boost_duty_bound() {
        let text = "duration = 1.0\n[sources]\nkind = \"pv\"\n[control]\nd_m = 1.0\n";
        match parse_scenario(text) {
            Err(Error::Config { key, message }) => {
                assert_eq!(key, "control.d_m");
                assert!(message.contains("boost duty"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_mismatch_names_key() {
        let text = "duration = \"long\"\n[sources]\nkind = \"pv\"\n";
        assert!(matches!(parse_scenario(text), Err(Error::Config { .. })));
    }

    #[test]
    fn panel_block_forms() {
        let bare = "isc = 8.9\nvoc = 22.4\nvmp = 18.5\nimp = 8.11\nalpha_isc = 0.0045\nbeta_voc = -0.078\npanels_in_series = 12\n";
        let a = parse_panel(bare).unwrap();
        let b = parse_panel(&format!("[panel]\n{bare}")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, Datasheet::default());
        assert!(parse_panel("isc = 8.9\n").is_err());
    }
}
