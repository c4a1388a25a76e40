use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use goscope_core::diff::{diff_reports, render_diff, DiffFormat};
use goscope_core::report::{render_json, render_table};
use goscope_core::{scan_path, ScanOutcome, ScanReport};

use crate::args::{DiffCmd, FetchCmd, ScanArgs, ScanCmd};
use crate::target;

pub const EXIT_DEGRADED: u8 = 2;
pub const EXIT_INCREASE: u8 = 3;

pub fn scan_target(target: &str, version: Option<String>, args: &ScanArgs) -> Result<ScanOutcome> {
    let opts = target::scan_options(args)?;
    let at = target::timestamp(args)?;
    let (root, version) = target::resolve(target, version, &args.proxy)?;
    let outcome = scan_path(&root, version, &opts, at)?;
    for w in &outcome.warnings {
        log::warn!("{w}");
    }
    Ok(outcome)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn scan(cmd: ScanCmd) -> Result<ExitCode> {
    let outcome = scan_target(&cmd.target, cmd.module_version.clone(), &cmd.scan)?;
    if let Some(path) = &cmd.json {
        write_file(path, &render_json(&outcome.report))?;
    }
    std::io::stdout().write_all(render_table(&outcome.report).as_bytes())?;
    if cmd.strict && outcome.degraded() {
        log::warn!(
            "{} of {} files failed to parse",
            outcome.report.files_failed,
            outcome.report.files_scanned
        );
        return Ok(ExitCode::from(EXIT_DEGRADED));
    }
    Ok(ExitCode::SUCCESS)
}

/// A saved report when `input` is a file, otherwise a fresh scan.
fn load_or_scan(input: &str, args: &ScanArgs) -> Result<ScanReport> {
    let path = Path::new(input);
    if path.is_file() {
        let bytes = fs::read(path).with_context(|| format!("reading {input}"))?;
        return ScanReport::from_json(&bytes).with_context(|| format!("loading report {input}"));
    }
    Ok(scan_target(input, None, args)?.report)
}

pub fn diff(cmd: DiffCmd) -> Result<ExitCode> {
    let baseline = load_or_scan(&cmd.baseline, &cmd.scan)?;
    let candidate = load_or_scan(&cmd.candidate, &cmd.scan)?;
    let diff = diff_reports(&baseline, &candidate)?;
    if let Some(path) = &cmd.json {
        write_file(path, &render_diff(&diff, DiffFormat::Json))?;
    }
    std::io::stdout().write_all(&render_diff(&diff, DiffFormat::Table))?;
    if cmd.fail_on_increase && diff.any_increase() {
        return Ok(ExitCode::from(EXIT_INCREASE));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn fetch(cmd: FetchCmd) -> Result<ExitCode> {
    let client = target::proxy_client(&cmd.proxy)?;
    let (module, version) = target::split_module(&cmd.module)?;
    let mut out = std::io::stdout().lock();
    if cmd.list {
        for v in client.resolve_versions(module)? {
            writeln!(out, "{v}")?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let version = target::pick_version(&client, module, version)?;
    let root = client.fetch_module(module, &version)?;
    writeln!(out, "{}", root.display())?;
    Ok(ExitCode::SUCCESS)
}
