//! One-call scan of a module tree: discover, analyze, aggregate.

use std::path::Path;

use chrono::{DateTime, Utc};

use crate::error::{Error, Result};
use crate::report::{aggregate, ModuleInfo, ScanMeta, ScanReport};
use crate::source_model::{count_loc, discover, read_module_identity, DiscoveryOptions, ModuleRef};
use crate::vectors::{analyze_module, VectorSet};

#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    pub discovery: DiscoveryOptions,
    pub vectors: VectorSet,
    /// Worker threads for parsing and analysis; `None` uses the ambient pool.
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub struct ScanOutcome {
    pub report: ScanReport,
    /// Non-fatal problems: unparsable files, unreadable assembly, bad go.mod.
    pub warnings: Vec<String>,
}

impl ScanOutcome {
    /// Some Go file could not be parsed.
    pub fn degraded(&self) -> bool {
        self.report.files_failed > 0
    }
}

/// Scans `root`, taking the module path from its go.mod.
pub fn scan_path(
    root: &Path,
    version: Option<String>,
    opts: &ScanOptions,
    scanned_at: DateTime<Utc>,
) -> Result<ScanOutcome> {
    let (module, warning) = read_module_identity(root, version)?;
    let mut outcome = scan_module(&module, opts, scanned_at)?;
    if let Some(w) = warning {
        outcome.warnings.insert(0, w);
    }
    Ok(outcome)
}

pub fn scan_module(
    module: &ModuleRef,
    opts: &ScanOptions,
    scanned_at: DateTime<Utc>,
) -> Result<ScanOutcome> {
    match opts.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::io(&module.root, std::io::Error::other(e)))?;
            pool.install(|| run(module, opts, scanned_at))
        }
        None => run(module, opts, scanned_at),
    }
}

fn run(module: &ModuleRef, opts: &ScanOptions, scanned_at: DateTime<Utc>) -> Result<ScanOutcome> {
    let discovery = discover(&module.root, &opts.discovery)?;
    let analysis = analyze_module(&module.root, &discovery.packages, opts.vectors);

    let files_scanned = discovery.files().count() as u64;
    let files_failed = discovery.files().filter(|f| !f.parse_ok()).count() as u64;
    let stray_loc: usize = discovery.stray_files.iter().map(|f| f.line_count).sum();
    let loc = (count_loc(&discovery.packages) + stray_loc) as u64;

    let report = aggregate(
        ModuleInfo::from(module),
        &analysis.occurrences,
        ScanMeta {
            scanned_at,
            files_scanned,
            files_failed,
            loc,
        },
    );
    let mut warnings = discovery.warnings;
    warnings.extend(analysis.warnings);
    Ok(ScanOutcome { report, warnings })
}
