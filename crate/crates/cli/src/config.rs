//! Flat `key = value` config files.
//!
//! Each key is the long name of a flag of the command being run, so
//! `max-steps = 500` means `--max-steps 500`. Boolean flags take `true` or
//! `false`. The optional `command` key names the command (`solve heat`) and
//! lets the file double as a recipe. Lines starting with `#` are comments.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    pub command: Option<Vec<String>>,
    pub entries: Vec<(String, String)>,
}

pub fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

pub fn parse_config(text: &str, name: &str) -> Result<ConfigFile, CliError> {
    let mut config = ConfigFile {
        command: None,
        entries: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(format!("{name}:{}: expected `key = value`", i + 1)));
        };
        let key = key.trim();
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        if key.is_empty() || key.starts_with('-') {
            return Err(CliError::config(format!("{name}:{}: bad key '{key}'", i + 1)));
        }
        if key == "command" {
            config.command = Some(value.split_whitespace().map(String::from).collect());
        } else if key == "config" {
            return Err(CliError::config(format!("{name}:{}: config files cannot nest", i + 1)));
        } else {
            config.entries.push((key.to_string(), value.to_string()));
        }
    }
    Ok(config)
}

/// Splices the flags of a `--config` file into `args`, right after the
/// command words, so that flags given on the command line come later and
/// take precedence.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let strings: Vec<Option<&str>> = args.iter().map(|a| a.to_str()).collect();
    let mut config_at = None;
    for (i, a) in strings.iter().enumerate() {
        match a {
            Some("--config") => {
                config_at = Some((i, 2, strings.get(i + 1).copied().flatten()));
                break;
            }
            Some(a) if a.starts_with("--config=") => {
                config_at = Some((i, 1, Some(&a["--config=".len()..])));
                break;
            }
            _ => {}
        }
    }
    let Some((at, width, path)) = config_at else {
        return Ok(args);
    };
    let path = path.ok_or_else(|| CliError::config("--config needs a file path"))?;
    let config = read_config(Path::new(path))?;

    let words: Vec<String> = strings[1..]
        .iter()
        .take_while(|a| a.is_some_and(|a| !a.starts_with('-')))
        .map(|a| a.unwrap().to_string())
        .collect();
    let (depth, flags) = command_flags(&words);
    if let Some(command) = &config.command {
        if command[..] != words[..depth] {
            return Err(CliError::config(format!(
                "{path} is for `{}`, not `{}`",
                command.join(" "),
                words[..depth].join(" ")
            )));
        }
    }
    let mut spliced = Vec::new();
    for (key, value) in &config.entries {
        let Some(takes_value) = flags.iter().find(|(name, _)| name == key).map(|(_, v)| *v) else {
            return Err(CliError::config(format!(
                "{path}: unknown key '{key}' for `{}`",
                words[..depth].join(" ")
            )));
        };
        if takes_value {
            spliced.push(OsString::from(format!("--{key}")));
            spliced.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" => spliced.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(CliError::config(format!("{path}: '{key}' must be true or false"))),
            }
        }
    }
    let mut out: Vec<OsString> = Vec::with_capacity(args.len() + spliced.len());
    let insert_at = 1 + depth;
    for (i, a) in args.into_iter().enumerate() {
        if i == insert_at {
            out.append(&mut spliced);
        }
        if !(at..at + width).contains(&i) {
            out.push(a);
        }
    }
    out.append(&mut spliced);
    Ok(out)
}

/// Number of leading words that name a subcommand, and the long flags of
/// that subcommand with whether each takes a value.
fn command_flags(words: &[String]) -> (usize, Vec<(String, bool)>) {
    let mut cmd = Cli::command();
    cmd.build();
    let mut current = &cmd;
    let mut depth = 0;
    for w in words {
        match current.find_subcommand(w) {
            Some(sub) => {
                current = sub;
                depth += 1;
            }
            None => break,
        }
    }
    let flags = current
        .get_arguments()
        .filter_map(|a| {
            let long = a.get_long()?;
            Some((long.to_string(), a.get_num_args().is_some_and(|n| n.takes_values())))
        })
        .filter(|(name, _)| name != "config" && name != "help")
        .collect();
    (depth, flags)
}
