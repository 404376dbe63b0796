//! `gravdec CONFIG [--key value ...]`
//!
//! Exit status: 0 on success, 1 when a verify check fails, 2 on any error.

use std::process::ExitCode;

use gravdec::config::parse_config_with_overrides;
use gravdec::runner::{resolve_output, run_with_env};

const USAGE: &str = "usage: gravdec CONFIG [--key value ...]";

fn parse_args(args: &[String]) -> Result<(String, Vec<(String, String)>), String> {
    let mut path = None;
    let mut overrides = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        if arg == "-h" || arg == "--help" {
            return Err(USAGE.to_string());
        }
        if let Some(key) = arg.strip_prefix("--") {
            let (key, value) = match key.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it
                        .next()
                        .ok_or_else(|| format!("--{key} needs a value\n{USAGE}"))?;
                    (key.to_string(), v.clone())
                }
            };
            overrides.push((key, value));
        } else if path.replace(arg.clone()).is_some() {
            return Err(format!("only one config path is accepted\n{USAGE}"));
        }
    }
    let path = path.ok_or_else(|| USAGE.to_string())?;
    Ok((path, overrides))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (path, overrides) = match parse_args(&args) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match run_file(&path, &overrides) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gravdec: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_file(path: &str, overrides: &[(String, String)]) -> gravdec::Result<bool> {
    let text =
        std::fs::read_to_string(path).map_err(|e| gravdec::Error::Io(format!("{path}: {e}")))?;
    let cfg = parse_config_with_overrides(&text, overrides)?;
    let outcome = run_with_env(&cfg)?;
    let destination = resolve_output(&cfg);

    for (side_path, table) in &outcome.side_tables {
        table.write_to(side_path)?;
    }
    match (&outcome.table, &destination) {
        (Some(table), Some(dest)) => {
            table.write_to(dest)?;
            print!("{}", outcome.report);
        }
        (Some(table), None) => {
            print!("{}", table.render()?);
            eprint!("{}", outcome.report);
        }
        (None, Some(dest)) => {
            if let Some(dir) = dest.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(dest, &outcome.report)?;
            print!("{}", outcome.report);
        }
        (None, None) => print!("{}", outcome.report),
    }
    Ok(outcome.success)
}
