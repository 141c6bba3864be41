use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{input, CliError};

/// Reads the optional TOML configuration file.
pub fn load(path: Option<&Path>) -> Result<toml::Table, CliError> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| input(format!("{}: {}", path.display(), e.message())))
}

/// Overlays command-line values on the subcommand's config section. Flags
/// left unset (absent options, false switches) fall through to the file.
pub fn merged<T: Serialize + DeserializeOwned>(cli: &T, cfg: &toml::Table, section: &str) -> Result<T, CliError> {
    let mut base = match cfg.get(section) {
        Some(toml::Value::Table(t)) => serde_json::to_value(t).map_err(|e| CliError::Internal(e.to_string()))?,
        Some(_) => return Err(input(format!("config section `{section}` must be a table"))),
        None => Value::Object(Default::default()),
    };
    let flags = serde_json::to_value(cli).map_err(|e| CliError::Internal(e.to_string()))?;
    let (Value::Object(base_map), Value::Object(flag_map)) = (&mut base, flags) else {
        return Err(CliError::Internal("arguments are not a record".into()));
    };
    for (k, v) in flag_map {
        if !matches!(v, Value::Null | Value::Bool(false)) {
            base_map.insert(k, v);
        }
    }
    serde_json::from_value(base).map_err(|e| input(format!("config section `{section}`: {e}")))
}
