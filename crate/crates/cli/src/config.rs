//! `--config FILE`: a TOML table whose keys are flag names. Its entries are
//! spliced in right after the subcommand, so flags given on the command line
//! come later and win.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};
use toml::Value;

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

pub fn flags_from_toml(text: &str) -> Result<Vec<OsString>> {
    let table: toml::Table = text.parse().context("config file is not valid TOML")?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{key}");
        match value {
            Value::Boolean(true) => out.push(flag.into()),
            Value::Boolean(false) => {}
            Value::String(s) => out.extend([flag.into(), s.into()]),
            Value::Integer(i) => out.extend([flag.into(), i.to_string().into()]),
            Value::Float(f) => out.extend([flag.into(), f.to_string().into()]),
            other => bail!("config key {key}: unsupported value {other}"),
        }
    }
    Ok(out)
}

/// Returns argv with the config file's flags inserted after the subcommand.
pub fn expand(args: Vec<OsString>, subcommands: &[&str]) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let injected = flags_from_toml(&text)?;
    let at = args
        .iter()
        .position(|a| subcommands.contains(&a.to_string_lossy().as_ref()))
        .map(|i| i + 1)
        .unwrap_or(args.len());
    let mut out = args[..at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}
