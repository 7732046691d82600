use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// `key = value` pairs from a config file.
pub type ConfigMap = BTreeMap<String, String>;

/// Reads `key = value` lines. `#` starts a comment; blank lines are
/// skipped; keys are lower-cased with `-` folded to `_`.
pub fn parse_config_file(path: impl AsRef<Path>) -> Result<ConfigMap> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

pub(crate) fn parse_config(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Data(format!("line {}: expected key = value", i + 1)))?;
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        if key.is_empty() {
            return Err(Error::Data(format!("line {}: empty key", i + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}
