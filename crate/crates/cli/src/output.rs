use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

use crate::error::CliError;
use crate::OutputArgs;

fn write(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Other(format!("{}: {e}", p.display()))),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())?;
            s.flush()?;
            Ok(())
        }
    }
}

/// Pretty JSON with the config echoed under `"config"`.
pub fn emit_json(args: &OutputArgs, config: Value, body: Value) -> Result<(), CliError> {
    let mut obj = serde_json::Map::new();
    obj.insert("config".into(), config);
    match body {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("json serializes");
    text.push('\n');
    write(args.out.as_deref(), &text)
}

/// CSV with `# key: value` metadata lines, then the header and rows.
pub fn emit_csv(args: &OutputArgs, meta: &[(&str, String)], header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::new();
    if !args.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        text.push_str(&format!("# generated_unix: {secs}\n"));
    }
    for (k, v) in meta {
        text.push_str(&format!("# {k}: {v}\n"));
    }
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    write(args.out.as_deref(), &text)
}
