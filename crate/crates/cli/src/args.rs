use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Measure the supply-chain attack surface of Go modules.
///
/// Exit codes: 0 success, 1 error, 2 degraded scan under --strict,
/// 3 attack surface grew under --fail-on-increase.
#[derive(Debug, Parser)]
#[command(name = "goscope", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan a module directory or a module@version fetched from the proxy.
    Scan(ScanCmd),
    /// Compare two reports (or targets) of the same module.
    Diff(DiffCmd),
    /// Fetch and scan every module@version listed in a file, writing CSV.
    Corpus(CorpusCmd),
    /// Download a module into the cache and print its directory.
    Fetch(FetchCmd),
}

#[derive(Debug, Clone, Args)]
pub struct ProxyArgs {
    /// Module proxy base URL; overrides GOPROXY.
    #[arg(long, value_name = "URL")]
    pub proxy: Option<String>,
    /// Where fetched modules and version lists are kept.
    #[arg(long, value_name = "DIR", env = "GOSCOPE_CACHE")]
    pub cache_dir: Option<PathBuf>,
    /// HTTP timeout in seconds.
    #[arg(long, value_name = "SECS", default_value_t = 60)]
    pub timeout: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Comma-separated vector ids to report, e.g. P1,E7,E8.
    #[arg(long, value_name = "IDS")]
    pub vectors: Option<String>,
    /// Directory-name glob to skip; repeatable.
    #[arg(long, value_name = "GLOB")]
    pub exclude: Vec<String>,
    /// Scan testdata directories too.
    #[arg(long)]
    pub include_testdata: bool,
    /// Skip files marked "Code generated ... DO NOT EDIT."
    #[arg(long)]
    pub skip_generated: bool,
    /// Worker threads for parsing and analysis.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// Fixed report timestamp (RFC 3339), for reproducible output.
    #[arg(long, hide = true, value_name = "TIME")]
    pub timestamp: Option<String>,
    #[command(flatten)]
    pub proxy: ProxyArgs,
}

#[derive(Debug, Args)]
pub struct ScanCmd {
    /// Module directory, or module@version.
    pub target: String,
    /// Also write the JSON report to FILE.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Exit with 2 when some Go file could not be parsed.
    #[arg(long)]
    pub strict: bool,
    /// Version recorded for a local directory.
    #[arg(long, value_name = "VERSION")]
    pub module_version: Option<String>,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args)]
pub struct DiffCmd {
    /// Baseline: a JSON report, a module directory, or module@version.
    pub baseline: String,
    /// Candidate: a JSON report, a module directory, or module@version.
    pub candidate: String,
    /// Also write the diff as JSON to FILE.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Exit with 3 when any vector count increased.
    #[arg(long)]
    pub fail_on_increase: bool,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args)]
pub struct CorpusCmd {
    /// File with one module@version per line; '#' starts a comment.
    pub list: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Keep each module's JSON report under DIR.
    #[arg(long, value_name = "DIR")]
    pub report_dir: Option<PathBuf>,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args)]
pub struct FetchCmd {
    /// module@version; the latest listed version when @version is omitted.
    pub module: String,
    /// Print the published versions instead of downloading.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub proxy: ProxyArgs,
}
