//! Command-line front end: mesh and config ingestion, verification suites,
//! simulation runs, convergence sweeps, spectrum reports, CSV and static
//! SVG emission.

pub mod commands;
pub mod config;
pub mod svg;

use commands::{cmd_mesh, cmd_run, cmd_spectrum, cmd_sweep, cmd_verify, CommandOptions};
use config::{FormatKind, RunConfig};
use std::path::PathBuf;

const USAGE: &str = "usage: phdec <verify|run|sweep|spectrum|mesh> --config <path> \
                     [--out <dir>] [--seed <u64>] [--format csv|svg|both]";

/// Parse arguments (without the program name) and dispatch; returns the
/// process exit code.
pub fn run_cli(args: &[String]) -> i32 {
    let mut subcommand: Option<String> = None;
    let mut config_path: Option<String> = None;
    let mut opts = CommandOptions::default();
    let mut seed_override: Option<u64> = None;
    let mut out_override = false;
    let mut format_override = false;

    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--config" => match iter.next() {
                Some(p) => config_path = Some(p.clone()),
                None => return usage_error("--config needs a path"),
            },
            "--out" => match iter.next() {
                Some(p) => {
                    opts.out_dir = PathBuf::from(p);
                    out_override = true;
                }
                None => return usage_error("--out needs a directory"),
            },
            "--seed" => match iter.next().and_then(|s| s.parse::<u64>().ok()) {
                Some(s) => seed_override = Some(s),
                None => return usage_error("--seed needs an unsigned integer"),
            },
            "--format" => {
                match iter.next().map(|s| s.as_str()) {
                    Some("csv") => opts.format = FormatKind::Csv,
                    Some("svg") => opts.format = FormatKind::Svg,
                    Some("both") => opts.format = FormatKind::Both,
                    _ => return usage_error("--format must be csv, svg, or both"),
                }
                format_override = true;
            }
            "--help" | "-h" => {
                println!("{USAGE}");
                return 0;
            }
            other if subcommand.is_none() && !other.starts_with('-') => {
                subcommand = Some(other.to_string());
            }
            other => return usage_error(&format!("unknown argument '{other}'")),
        }
    }

    let Some(sub) = subcommand else {
        return usage_error("missing subcommand");
    };
    let Some(path) = config_path else {
        return usage_error("missing --config");
    };
    let cfg = match RunConfig::from_file(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    // Flags take precedence over config values.
    opts.seed = seed_override.or(cfg.seed).unwrap_or(0);
    if let Some(out) = cfg.output.as_ref() {
        if !out_override {
            if let Some(dir) = &out.dir {
                opts.out_dir = PathBuf::from(dir);
            }
        }
        if !format_override {
            if let Some(f) = out.format {
                opts.format = f;
            }
        }
    }

    match sub.as_str() {
        "verify" => cmd_verify(&cfg, &opts),
        "run" => cmd_run(&cfg, &opts),
        "sweep" => cmd_sweep(&cfg, &opts),
        "spectrum" => cmd_spectrum(&cfg, &opts),
        "mesh" => cmd_mesh(&cfg, &opts),
        other => usage_error(&format!("unknown subcommand '{other}'")),
    }
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    eprintln!("{USAGE}");
    2
}
