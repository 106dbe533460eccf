//! Key-value config files and the canonical form of a run.
//!
//! A config file holds `key = value` lines; `#` starts a comment. Keys are
//! long flag names (`check-norm` or `check_norm`). The optional `command`
//! key names the subcommand. Values fill in flags missing from the command
//! line, so flags win on conflict. `true` turns on a switch, `false` leaves
//! it off.

use std::collections::BTreeMap;
use std::path::Path;

use clap::ArgMatches;

use crate::CliError;

/// Switches that take no value on the command line.
const SWITCHES: &[&str] = &["strict", "check-norm", "normalize", "dump-config"];

/// Flags that do not influence results and stay out of the canonical form.
const NON_SEMANTIC: &[&str] = &["config", "out", "dump-config", "threads"];

pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = vec![];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected `key = value`, got {raw:?}", n + 1)));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn has_flag(argv: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let with_eq = format!("--{key}=");
    argv.iter().skip(1).any(|a| *a == long || a.starts_with(&with_eq))
}

/// Merge the config file named by `--config` into `argv`.
pub fn merge_config(argv: Vec<String>, commands: &[&str]) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let entries = parse_config_text(&text)?;
    let mut out = argv.clone();
    let present = argv.iter().skip(1).find(|a| commands.contains(&a.as_str())).cloned();
    let mut extra = vec![];
    for (key, value) in entries {
        if key == "command" {
            match &present {
                Some(c) if *c != value => {
                    return Err(CliError::Usage(format!("config is for command {value:?} but {c:?} was given")));
                }
                Some(_) => {}
                None => out.insert(1, value),
            }
            continue;
        }
        if has_flag(&argv, &key) {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => extra.push(format!("--{key}")),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key {key} takes true or false, got {value:?}"))),
            }
        } else {
            extra.push(format!("--{key}={value}"));
        }
    }
    out.extend(extra);
    Ok(out)
}

/// Canonical run description: subcommand plus every semantic flag value,
/// including defaults, as given on the command line with whitespace removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

impl Canonical {
    pub fn from_matches(cmd: &clap::Command, top: &ArgMatches) -> Canonical {
        let (command, sub) = top.subcommand().expect("subcommand is required");
        let sub_cmd = cmd.find_subcommand(command).expect("matched subcommand exists");
        let mut values = BTreeMap::new();
        for (c, m) in [(cmd, top), (sub_cmd, sub)] {
            for id in m.ids() {
                // skip argument groups
                if !c.get_arguments().any(|a| a.get_id() == id) {
                    continue;
                }
                let key = id.as_str().replace('_', "-");
                if NON_SEMANTIC.contains(&key.as_str()) {
                    continue;
                }
                if m.value_source(id.as_str()).is_none() {
                    continue;
                }
                let Ok(Some(raw)) = m.try_get_raw(id.as_str()) else { continue };
                let joined = raw
                    .map(|s| s.to_string_lossy().chars().filter(|c| !c.is_whitespace()).collect::<String>())
                    .collect::<Vec<_>>()
                    .join(";");
                if SWITCHES.contains(&key.as_str()) && joined == "false" {
                    continue;
                }
                values.insert(key, joined);
            }
        }
        Canonical { command: command.to_string(), values }
    }

    /// Config-file form; feeding it back through `--config` reproduces the run.
    pub fn to_config_text(&self) -> String {
        let mut s = format!("command = {}\n", self.command);
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    /// Single-line form for CSV comment headers.
    pub fn to_line(&self) -> String {
        let mut parts = vec![format!("command={}", self.command)];
        parts.extend(self.values.iter().map(|(k, v)| format!("{k}={v}")));
        parts.join(" ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), self.command.clone().into());
        for (k, v) in &self.values {
            m.insert(k.clone(), v.clone().into());
        }
        serde_json::Value::Object(m)
    }
}
