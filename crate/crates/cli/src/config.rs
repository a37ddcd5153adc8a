//! `key=value` config files whose entries become default options.

use std::collections::BTreeMap;

use clap::CommandFactory;

use crate::Cli;

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn flag_value(args: &[String], flag: &str) -> Option<String> {
    let long = format!("--{flag}");
    let eq = format!("--{flag}=");
    args.iter().enumerate().find_map(|(i, a)| {
        if a == &long {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix(&eq).map(str::to_string)
        }
    })
}

fn has_flag(args: &[String], flag: &str) -> bool {
    let long = format!("--{flag}");
    let eq = format!("--{flag}=");
    args.iter().any(|a| a == &long || a.starts_with(&eq))
}

/// Appends config entries as options unless given on the command line.
/// Keys unknown to the chosen subcommand are skipped; keys unknown to every
/// subcommand are an error.
pub fn inject_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = flag_value(&args, "config") else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let entries = parse_config(&text)?;
    let cmd = Cli::command();
    let longs = |c: &clap::Command| -> Vec<String> {
        c.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect()
    };
    let global = longs(&cmd);
    let sub = args
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a))
        .map(&longs)
        .unwrap_or_default();
    let all: Vec<String> = cmd.get_subcommands().flat_map(longs).chain(global.iter().cloned()).collect();
    let mut out = args.clone();
    for (k, v) in entries {
        if k == "config" {
            continue;
        }
        if !all.contains(&k) {
            return Err(format!("unknown config key {k:?}"));
        }
        if (sub.contains(&k) || global.contains(&k)) && !has_flag(&args, &k) {
            out.push(format!("--{k}={v}"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = parse_config("# defaults\nhorizon = 729\n--output=text\n\n").unwrap();
        assert_eq!(c["horizon"], "729");
        assert_eq!(c["output"], "text");
        assert!(parse_config("horizon 729").is_err());
    }
}
