use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Load a config file: either a flat object of flag values or a run report,
/// whose echoed configuration is used.
pub fn load(path: &Path, command: &str) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config: {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config: {}: {e}", path.display())))?;
    let Value::Object(mut obj) = value else {
        return Err(CliError::Usage("config: expected a JSON object".into()));
    };
    if let Some(Value::Object(inner)) = obj.remove("config") {
        check_command(obj.get("command"), command)?;
        return Ok(inner);
    }
    check_command(obj.remove("command").as_ref(), command)?;
    Ok(obj)
}

fn check_command(found: Option<&Value>, command: &str) -> Result<(), CliError> {
    match found {
        None => Ok(()),
        Some(Value::String(c)) if c == command => Ok(()),
        Some(other) => Err(CliError::Usage(format!(
            "command: config is for {other}, not {command}"
        ))),
    }
}

/// Overlay the flag values in `flags` on `file` and parse the result.
///
/// Unset options serialize as null and are dropped, so a flag wins only when
/// it was given.
pub fn merge<T>(file: Map<String, Value>, flags: &T) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged = file;
    if let Value::Object(f) = serde_json::to_value(flags).expect("flag struct") {
        merged.extend(f.into_iter().filter(|(_, v)| !v.is_null()));
    }
    let parsed: T = match serde_json::from_value(Value::Object(merged.clone())) {
        Ok(t) => t,
        Err(e) => return Err(CliError::Usage(offending_field::<T>(&merged, e))),
    };
    let known: BTreeSet<String> = match serde_json::to_value(&parsed) {
        Ok(Value::Object(o)) => o.into_iter().map(|(k, _)| k).collect(),
        _ => BTreeSet::new(),
    };
    if let Some(k) = merged.keys().find(|k| !known.contains(*k) && !merged[*k].is_null()) {
        return Err(CliError::Usage(format!("{k}: unknown field")));
    }
    Ok(parsed)
}

fn offending_field<T: DeserializeOwned>(merged: &Map<String, Value>, e: serde_json::Error) -> String {
    for (k, v) in merged {
        let mut single = Map::new();
        single.insert(k.clone(), v.clone());
        if let Err(err) = serde_json::from_value::<T>(Value::Object(single)) {
            return format!("{k}: {err}");
        }
    }
    e.to_string()
}
