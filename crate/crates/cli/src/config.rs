//! Flat key=value config files.
//!
//! A config file supplies defaults for the invoked subcommand: each
//! `key=value` line is injected as `--key value` unless the flag was
//! already given on the command line, so explicit flags always win.
//! Unknown keys surface as ordinary usage errors during parsing.

use std::fs;

/// Rewrites argv, appending `--key value` pairs from the `--config` file
/// for every key not already present.
pub fn merged_argv(argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(config_path) = find_config_path(&argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&config_path)
        .map_err(|e| format!("reading config {config_path}: {e}"))?;

    let mut merged = argv;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{config_path}:{}: expected key=value", line_no + 1))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("{config_path}:{}: empty key", line_no + 1));
        }
        let flag = format!("--{key}");
        if !merged.contains(&flag) {
            merged.push(flag);
            merged.push(value.to_owned());
        }
    }
    Ok(merged)
}

fn find_config_path(argv: &[String]) -> Result<Option<String>, String> {
    for (i, arg) in argv.iter().enumerate() {
        if arg == "--config" {
            return match argv.get(i + 1) {
                Some(path) => Ok(Some(path.clone())),
                None => Err("--config requires a file path".to_owned()),
            };
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Ok(Some(path.to_owned()));
        }
    }
    Ok(None)
}
