//! `--config FILE`: a JSON object whose keys are flag names (`n`,
//! `adversary_a` or `adversary-a`, ...). An optional `command` key picks
//! the subcommand when none is given. Config values are spliced in front
//! of the explicit flags, so the explicit ones win.

use std::path::PathBuf;

use clap::CommandFactory;
use serde_json::Value;

use crate::{Cli, CliError, Result};

fn take_config(args: &mut Vec<String>) -> Result<Option<PathBuf>> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::Usage("--config needs a file".into()));
            }
            found = Some(PathBuf::from(args.remove(i + 1)));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

fn scalar(key: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(CliError::Config(format!("key {key}: expected a string, number or boolean"))),
    }
}

/// Flags for `sub` taken from `cfg`, in key order.
fn config_flags(sub: &str, cfg: &serde_json::Map<String, Value>) -> Result<Vec<String>> {
    let cmd = Cli::command();
    let sc = cmd
        .find_subcommand(sub)
        .ok_or_else(|| CliError::Config(format!("unknown command {sub}")))?;
    let mut out = Vec::new();
    for (key, v) in cfg {
        if key == "command" {
            continue;
        }
        let long = key.replace('_', "-");
        let arg = sc
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| CliError::Config(format!("{sub} has no flag --{long}")))?;
        let flag = format!("--{long}");
        if !arg.get_action().takes_values() {
            match v {
                Value::Bool(true) => out.push(flag),
                Value::Bool(false) | Value::Null => {}
                _ => return Err(CliError::Config(format!("key {key}: switch takes true or false"))),
            }
            continue;
        }
        match v {
            Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    out.push(flag.clone());
                    out.push(scalar(key, item)?);
                }
            }
            _ => {
                out.push(flag);
                out.push(scalar(key, v)?);
            }
        }
    }
    Ok(out)
}

/// Rewrites `argv` (program name first) with the config file spliced in.
pub fn expand_args(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let cfg: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let Value::Object(cfg) = cfg else {
        return Err(CliError::Config(format!("{}: expected a JSON object", path.display())));
    };
    let program = args.first().cloned().unwrap_or_else(|| "otable".into());
    let (sub, rest) = match args.get(1) {
        Some(s) if !s.starts_with('-') => (s.clone(), args[2..].to_vec()),
        _ => match cfg.get("command") {
            Some(Value::String(s)) => (s.clone(), args[1..].to_vec()),
            _ => return Err(CliError::Config("no command given and none in the config".into())),
        },
    };
    let mut out = vec![program, sub.clone()];
    out.extend(config_flags(&sub, &cfg)?);
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn no_config_is_identity() {
        let a = argv("otable ot --m0 1 --m1 0 --choice 1");
        assert_eq!(expand_args(a.clone()).unwrap(), a);
    }

    #[test]
    fn config_goes_before_explicit_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"command":"gen-tables","n":5,"adversary_b":"honest","seed":3}"#).unwrap();
        let args = expand_args(argv(&format!("otable --config {} --n 9", path.display()))).unwrap();
        assert_eq!(
            args,
            argv("otable gen-tables --adversary-b honest --n 5 --seed 3 --n 9")
        );
    }

    #[test]
    fn switches_and_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"endpoint":true,"samples":10}"#).unwrap();
        let args = expand_args(argv(&format!("otable holevo-scan --config={}", path.display()))).unwrap();
        assert_eq!(args, argv("otable holevo-scan --endpoint --samples 10"));
        std::fs::write(&path, r#"{"bogus":1}"#).unwrap();
        let err = expand_args(argv(&format!("otable ot --config {}", path.display()))).unwrap_err();
        assert_eq!(err.kind(), "config");
    }
}
