use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use goscope_core::fetch::{escape_module_path, ProxyClient};
use goscope_core::report::render_json;
use goscope_core::{scan_path, AttackVector, ScanOptions};
use rayon::prelude::*;

use crate::args::CorpusCmd;
use crate::target;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    FetchError,
    ParseDegraded,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::FetchError => "fetch_error",
            Status::ParseDegraded => "parse_degraded",
        }
    }
}

struct Row {
    module: String,
    version: String,
    counts: [u64; 12],
    loc: u64,
    files: u64,
    status: Status,
}

impl Row {
    fn failed(module: &str, version: &str) -> Self {
        Row {
            module: module.to_string(),
            version: version.to_string(),
            counts: [0; 12],
            loc: 0,
            files: 0,
            status: Status::FetchError,
        }
    }

    fn record(&self) -> Vec<String> {
        let mut rec = vec![self.module.clone(), self.version.clone()];
        rec.extend(self.counts.iter().map(u64::to_string));
        rec.push(self.loc.to_string());
        rec.push(self.files.to_string());
        rec.push(self.status.as_str().to_string());
        rec
    }
}

fn header() -> Vec<String> {
    let mut h = vec!["module".to_string(), "version".to_string()];
    h.extend(AttackVector::ALL.iter().map(|v| v.id().to_string()));
    h.extend(["loc", "files", "status"].map(String::from));
    h
}

/// Entries of a corpus list: one `module@version` per line.
fn read_list(path: &Path) -> Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading list {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn scan_entry(entry: &str, client: &ProxyClient, opts: &ScanOptions, cmd: &CorpusCmd) -> Row {
    let at = match target::timestamp(&cmd.scan) {
        Ok(t) => t,
        Err(e) => {
            log::warn!("{entry}: {e:#}");
            return Row::failed(entry, "");
        }
    };
    let (module, version) = match target::split_module(entry) {
        Ok(parts) => parts,
        Err(e) => {
            log::warn!("{e:#}");
            return Row::failed(entry, "");
        }
    };
    let version = match target::pick_version(client, module, version) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("{module}: {e:#}");
            return Row::failed(module, version.unwrap_or(""));
        }
    };
    let root = match client.fetch_module(module, &version) {
        Ok(root) => root,
        Err(e) => {
            log::warn!("{module}@{version}: {e}");
            return Row::failed(module, &version);
        }
    };
    let outcome = match scan_path(&root, Some(version.clone()), opts, at) {
        Ok(o) => o,
        Err(e) => {
            log::warn!("{module}@{version}: {e}");
            return Row::failed(module, &version);
        }
    };
    for w in &outcome.warnings {
        log::warn!("{module}@{version}: {w}");
    }
    let report = &outcome.report;
    if let Some(dir) = &cmd.report_dir {
        if let Err(e) = archive(dir, module, &version, &render_json(report)) {
            log::warn!("{module}@{version}: {e:#}");
        }
    }
    let status = if outcome.degraded() || report.files_scanned == 0 {
        Status::ParseDegraded
    } else {
        Status::Ok
    };
    Row {
        module: module.to_string(),
        version,
        counts: report.counts(),
        loc: report.loc,
        files: report.files_scanned,
        status,
    }
}

fn archive(dir: &Path, module: &str, version: &str, json: &[u8]) -> Result<()> {
    let escaped = escape_module_path(module)?;
    let path = dir.join(format!("{escaped}@{version}.json"));
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(&path, json).with_context(|| format!("writing {}", path.display()))
}

pub fn run(cmd: CorpusCmd) -> Result<ExitCode> {
    let entries = read_list(&cmd.list)?;
    let client = target::proxy_client(&cmd.scan.proxy)?;
    let mut opts = target::scan_options(&cmd.scan)?;
    // module-level parallelism replaces per-module worker threads
    let jobs = opts.jobs.take().unwrap_or(1).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("starting worker pool")?;
    let rows: Vec<Row> = pool.install(|| {
        entries
            .par_iter()
            .map(|e| scan_entry(e, &client, &opts, &cmd))
            .collect()
    });

    let mut total = Row::failed("TOTAL", "");
    total.status = Status::Ok;
    for row in rows.iter().filter(|r| r.status == Status::Ok) {
        for (t, c) in total.counts.iter_mut().zip(row.counts) {
            *t += c;
        }
        total.loc += row.loc;
        total.files += row.files;
    }

    let sink: Box<dyn std::io::Write> = match &cmd.out {
        Some(path) => Box::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    csv.write_record(header())?;
    for row in &rows {
        csv.write_record(row.record())?;
    }
    let mut last = total.record();
    *last.last_mut().unwrap() = String::new();
    csv.write_record(last)?;
    csv.flush()?;
    Ok(ExitCode::SUCCESS)
}
