//! `key = value` config files. A file entry becomes the flag `--key value`
//! (or `--key` for a true switch) unless that flag was given on the command
//! line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command};

use crate::error::{CliError, CliResult};

/// Entries in file order. Text after `#` is ignored.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut entries = Vec::new();
    let mut problems = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => entries.push((k.trim().to_string(), v.trim().to_string())),
            _ => problems.push(format!("config line {}: expected `key = value`, found `{}`", n + 1, raw.trim())),
        }
    }
    if problems.is_empty() {
        Ok(entries)
    } else {
        Err(CliError::Config(problems))
    }
}

pub fn read_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text)
}

/// The deepest subcommand selected in `matches`, with its matches.
pub fn leaf<'a>(cmd: &'a Command, matches: &'a ArgMatches) -> (&'a Command, &'a ArgMatches) {
    match matches.subcommand() {
        Some((name, sub)) => match cmd.find_subcommand(name) {
            Some(sub_cmd) => leaf(sub_cmd, sub),
            None => (cmd, matches),
        },
        None => (cmd, matches),
    }
}

/// Extra arguments for the entries of `entries` not already set on the
/// command line. `cmd` must be built so that global flags are visible on
/// every subcommand.
pub fn config_args(cmd: &Command, matches: &ArgMatches, entries: &[(String, String)]) -> CliResult<Vec<OsString>> {
    let (leaf_cmd, leaf_matches) = leaf(cmd, matches);
    let mut out = Vec::new();
    let mut problems = Vec::new();
    for (key, value) in entries {
        let long = key.replace('_', "-");
        let Some(arg) = leaf_cmd.get_arguments().find(|a| a.get_long() == Some(long.as_str())) else {
            problems.push(format!("unknown config key `{key}` for `{}`", leaf_cmd.get_name()));
            continue;
        };
        if long == "config" {
            problems.push("config files cannot include other config files".into());
            continue;
        }
        let id = arg.get_id().as_str();
        let from_cli = [leaf_matches, matches]
            .iter()
            .any(|m| m.try_contains_id(id).unwrap_or(false) && m.value_source(id) == Some(ValueSource::CommandLine));
        if from_cli {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => out.push(OsString::from(format!("--{long}"))),
                "false" | "no" | "0" => {}
                _ => problems.push(format!("config key `{key}` expects true or false, found `{value}`")),
            }
        } else {
            out.push(OsString::from(format!("--{long}")));
            out.push(OsString::from(value));
        }
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Config(problems))
    }
}

/// Explicitly present arguments of the selected subcommand, values joined by
/// commas, keyed by long flag name.
pub fn effective_config(cmd: &Command, matches: &ArgMatches) -> BTreeMap<String, String> {
    let (leaf_cmd, leaf_matches) = leaf(cmd, matches);
    let mut out = BTreeMap::new();
    for arg in leaf_cmd.get_arguments() {
        let (Some(long), id) = (arg.get_long(), arg.get_id().as_str()) else {
            continue;
        };
        if matches!(long, "help" | "version" | "json-summary" | "config") {
            continue;
        }
        if let Ok(Some(raw)) = leaf_matches.try_get_raw(id) {
            let joined = raw.map(|v| v.to_string_lossy().into_owned()).collect::<Vec<_>>().join(",");
            out.insert(long.to_string(), joined);
        }
    }
    out.insert("command".into(), command_path(matches));
    out
}

/// Subcommand names from the root, space-separated.
pub fn command_path(matches: &ArgMatches) -> String {
    let mut names = Vec::new();
    let mut m = matches;
    while let Some((name, sub)) = m.subcommand() {
        names.push(name.to_string());
        m = sub;
    }
    names.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let e = parse_config("# header\n\nalpha = 1.5  # trailing\n v=10\n").unwrap();
        assert_eq!(e, vec![("alpha".into(), "1.5".into()), ("v".into(), "10".into())]);
    }

    #[test]
    fn reports_every_malformed_line() {
        match parse_config("a = 1\nnonsense\n= 3\n") {
            Err(CliError::Config(p)) => {
                assert_eq!(p.len(), 2);
                assert!(p[0].contains("line 2") && p[1].contains("line 3"));
            }
            other => panic!("{other:?}"),
        }
    }
}
