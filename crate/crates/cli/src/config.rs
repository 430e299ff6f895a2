//! Optional TOML config overlay.
//!
//! The file is a flat table whose keys are long flag names. Values are
//! injected into the argument list before parsing, so clap validates them
//! exactly like flags; anything given explicitly on the command line wins.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, CommandFactory};

use crate::cli::Cli;
use crate::CliError;

/// Flags that never make sense in a config file.
const RESERVED: [&str; 3] = ["config", "help", "version"];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Locate `--config <file>` / `--config=<file>` in the raw arguments.
fn find_config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(rest.to_string()));
        }
    }
    None
}

/// The subcommand token: the first non-flag argument, skipping values of
/// the global flags.
fn find_subcommand(args: &[OsString]) -> Option<String> {
    let mut iter = args.iter().skip(1);
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" || s == "--threads" {
            iter.next();
            continue;
        }
        if s.starts_with('-') {
            continue;
        }
        return Some(s.to_string());
    }
    None
}

fn flag_present(args: &[OsString], long: &str) -> bool {
    let exact = format!("--{long}");
    let prefixed = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == exact || s.starts_with(&prefixed)
    })
}

fn value_to_string(key: &str, value: &toml::Value) -> Result<String, CliError> {
    match value {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(usage(format!(
            "config key {key:?} has unsupported type {}",
            other.type_str()
        ))),
    }
}

/// Apply the config overlay: returns the argument vector to parse, with
/// defaults appended for any applicable key the user did not pass.
pub fn effective_args(raw: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = find_config_path(&raw) else {
        return Ok(raw);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| usage(format!("cannot parse config file {}: {e}", path.display())))?;
    if table.is_empty() {
        return Ok(raw);
    }

    let command = Cli::command();
    // Keys documented anywhere in the CLI: the union of flag names over all
    // subcommands plus the global --threads.
    let mut known = BTreeSet::from(["threads".to_string()]);
    for sub in command.get_subcommands() {
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                if !RESERVED.contains(&long) {
                    known.insert(long.to_string());
                }
            }
        }
    }
    for key in table.keys() {
        if !known.contains(key.as_str()) {
            return Err(usage(format!(
                "unknown configuration key {key:?} in {}",
                path.display()
            )));
        }
    }

    // Keys applicable to the active subcommand, with their actions so that
    // boolean switches inject bare flags.
    let Some(sub_name) = find_subcommand(&raw) else {
        return Ok(raw);
    };
    let Some(sub) = command.find_subcommand(&sub_name) else {
        return Ok(raw);
    };
    let mut args = raw;
    let applicable: Vec<(String, ArgAction)> = sub
        .get_arguments()
        .filter_map(|a| {
            a.get_long()
                .filter(|l| !RESERVED.contains(l))
                .map(|l| (l.to_string(), a.get_action().clone()))
        })
        .chain(std::iter::once(("threads".to_string(), ArgAction::Set)))
        .collect();
    for (long, action) in applicable {
        let Some(value) = table.get(&long) else {
            continue;
        };
        if flag_present(&args, &long) {
            continue;
        }
        match action {
            ArgAction::SetTrue => {
                if value.as_bool() == Some(true) {
                    args.push(OsString::from(format!("--{long}")));
                } else if value.as_bool().is_none() {
                    return Err(usage(format!("config key {long:?} expects a boolean")));
                }
            }
            _ => {
                args.push(OsString::from(format!("--{long}")));
                args.push(OsString::from(value_to_string(&long, value)?));
            }
        }
    }
    Ok(args)
}
