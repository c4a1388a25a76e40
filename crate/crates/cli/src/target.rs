use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use goscope_core::fetch::{ProxyClient, ProxyConfig};
use goscope_core::source_model::DiscoveryOptions;
use goscope_core::{ScanOptions, VectorSet};

use crate::args::{ProxyArgs, ScanArgs};

pub fn proxy_client(args: &ProxyArgs) -> Result<ProxyClient> {
    let cache = args
        .cache_dir
        .clone()
        .unwrap_or_else(ProxyConfig::default_cache_dir);
    let mut config = match &args.proxy {
        Some(url) => ProxyConfig::new(url, cache),
        None => ProxyConfig::from_env(cache)?,
    };
    config.timeout = Duration::from_secs(args.timeout.max(1));
    Ok(ProxyClient::new(config)?)
}

pub fn scan_options(args: &ScanArgs) -> Result<ScanOptions> {
    let vectors = match &args.vectors {
        Some(list) => VectorSet::parse_list(list)?,
        None => VectorSet::all(),
    };
    if vectors.is_empty() {
        bail!("--vectors selects no vector");
    }
    Ok(ScanOptions {
        discovery: DiscoveryOptions {
            excludes: args.exclude.clone(),
            include_testdata: args.include_testdata,
            skip_generated: args.skip_generated,
        },
        vectors,
        jobs: args.jobs,
    })
}

pub fn timestamp(args: &ScanArgs) -> Result<DateTime<Utc>> {
    match &args.timestamp {
        Some(t) => Ok(DateTime::parse_from_rfc3339(t)
            .with_context(|| format!("bad --timestamp `{t}`"))?
            .with_timezone(&Utc)),
        None => Ok(Utc::now()),
    }
}

/// Splits `module@version`; the version is `None` when absent.
pub fn split_module(spec: &str) -> Result<(&str, Option<&str>)> {
    match spec.rsplit_once('@') {
        Some((module, version)) if !module.is_empty() && !version.is_empty() => {
            Ok((module, Some(version)))
        }
        Some(_) => bail!("malformed module spec `{spec}`"),
        None => Ok((spec, None)),
    }
}

/// Resolves `latest` or a missing version to the newest listed release.
pub fn pick_version(client: &ProxyClient, module: &str, version: Option<&str>) -> Result<String> {
    match version {
        Some(v) if v != "latest" => Ok(v.to_string()),
        _ => client
            .resolve_versions(module)?
            .pop()
            .with_context(|| format!("{module}: proxy lists no versions")),
    }
}

/// Module root and version for a scan target: an existing directory, or a
/// `module@version` downloaded through the proxy.
pub fn resolve(
    target: &str,
    local_version: Option<String>,
    proxy: &ProxyArgs,
) -> Result<(PathBuf, Option<String>)> {
    let path = Path::new(target);
    if path.is_dir() {
        return Ok((path.to_path_buf(), local_version));
    }
    let (module, version) = split_module(target)?;
    if version.is_none() {
        bail!("`{target}` is not a directory; use module@version to fetch from the proxy");
    }
    let client = proxy_client(proxy)?;
    let version = pick_version(&client, module, version)?;
    let root = client
        .fetch_module(module, &version)
        .with_context(|| format!("fetching {module}@{version}"))?;
    Ok((root, Some(version)))
}
