//! `--config` files: flat `key=value` lines, `#` comments, keys named after
//! the long flags of the subcommand. Entries are spliced into the argument
//! list right after the subcommand name, so later command-line flags win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Invalid(String),
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Returns `args` with the entries of the `--config` file spliced in, or
/// `args` unchanged when there is no config file.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(Path::new(&path)).map_err(|e| {
        ConfigError::Io(format!(
            "cannot read config {}: {e}",
            path.to_string_lossy()
        ))
    })?;

    let root = Cli::command();
    let names: Vec<String> = root
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect();
    let Some(at) = args
        .iter()
        .position(|a| names.iter().any(|n| a == n.as_str()))
    else {
        // no subcommand; let clap report it
        return Ok(args);
    };
    let sub = root
        .find_subcommand(args[at].to_str().unwrap_or_default())
        .expect("listed above");

    let mut injected = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |why: String| ConfigError::Invalid(format!("config line {}: {why}", no + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got `{line}`")))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" {
            return Err(bad("config files cannot include other config files".into()));
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| bad(format!("unknown key `{key}` for `{}`", sub.get_name())))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value {
                "true" | "yes" | "1" => injected.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                other => return Err(bad(format!("`{key}` takes true or false, got `{other}`"))),
            }
        } else {
            injected.push(OsString::from(format!("--{key}={value}")));
        }
    }
    let mut out = args;
    out.splice(at + 1..at + 1, injected);
    Ok(out)
}
