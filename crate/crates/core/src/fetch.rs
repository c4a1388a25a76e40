//! Go module proxy client with an on-disk cache.
//!
//! Speaks the two read endpoints of the proxy protocol:
//! `{base}/{module}/@v/list` and `{base}/{module}/@v/{version}.zip`, with
//! module paths case-escaped (`A` -> `!a`). Archives are unpacked under
//! `{cache_dir}/{escaped}@{version}/`, mirroring the Go module cache layout.

use std::fs::{self, File};
use std::io::{Cursor, Read};
use std::path::{Component, Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};

pub const DEFAULT_PROXY: &str = "https://proxy.golang.org";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProxyConfig {
    /// Proxy base URL without a trailing slash.
    pub base_url: String,
    pub cache_dir: PathBuf,
    pub timeout: Duration,
}

impl ProxyConfig {
    pub fn new(base_url: &str, cache_dir: impl Into<PathBuf>) -> Self {
        ProxyConfig {
            base_url: base_url.trim_end_matches('/').to_string(),
            cache_dir: cache_dir.into(),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    /// `$XDG_CACHE_HOME/goscope`, `~/.cache/goscope`, or a temp directory.
    pub fn default_cache_dir() -> PathBuf {
        if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
            return PathBuf::from(dir).join("goscope");
        }
        if let Some(home) = std::env::var_os("HOME").filter(|d| !d.is_empty()) {
            return PathBuf::from(home).join(".cache").join("goscope");
        }
        std::env::temp_dir().join("goscope-cache")
    }

    /// Applies a `GOPROXY` value: its first entry replaces the base URL.
    /// `off` and `direct` cannot be served by this client.
    pub fn with_goproxy(mut self, goproxy: Option<&str>) -> Result<Self> {
        let Some(value) = goproxy.map(str::trim).filter(|v| !v.is_empty()) else {
            return Ok(self);
        };
        let first = value.split([',', '|']).next().unwrap_or(value).trim();
        if first == "off" || first == "direct" {
            return Err(Error::ProxyDisabled(first.to_string()));
        }
        self.base_url = first.trim_end_matches('/').to_string();
        Ok(self)
    }

    /// Default proxy overridden by the `GOPROXY` environment variable.
    pub fn from_env(cache_dir: impl Into<PathBuf>) -> Result<Self> {
        let goproxy = std::env::var("GOPROXY").ok();
        ProxyConfig::new(DEFAULT_PROXY, cache_dir).with_goproxy(goproxy.as_deref())
    }
}

/// Case-encodes a module path for proxy URLs and cache paths: every
/// uppercase ASCII letter becomes `!` plus its lowercase form.
pub fn escape_module_path(path: &str) -> Result<String> {
    let mut out = String::with_capacity(path.len() + 4);
    let mut after_bang = false;
    for c in path.chars() {
        if after_bang && c.is_ascii_uppercase() {
            return Err(Error::AmbiguousModulePath(path.to_string()));
        }
        after_bang = c == '!';
        if c.is_ascii_uppercase() {
            out.push('!');
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Sorts proxy versions ascending by semantic-version precedence. Strings
/// that are not semantic versions go last, in byte order.
pub fn sort_versions(versions: &mut [String]) {
    let key = |v: &String| semver::Version::parse(v.strip_prefix('v').unwrap_or(v)).ok();
    versions.sort_by(|a, b| match (key(a), key(b)) {
        (Some(x), Some(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.cmp(b),
    });
}

pub struct ProxyClient {
    config: ProxyConfig,
    http: reqwest::blocking::Client,
}

impl ProxyClient {
    pub fn new(config: ProxyConfig) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .user_agent(concat!("goscope/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| Error::Network {
                url: config.base_url.clone(),
                reason: e.to_string(),
            })?;
        Ok(ProxyClient { config, http })
    }

    pub fn config(&self) -> &ProxyConfig {
        &self.config
    }

    fn get(&self, url: &str) -> Result<Vec<u8>> {
        let network = |e: reqwest::Error| Error::Network {
            url: url.to_string(),
            reason: e.to_string(),
        };
        let response = self.http.get(url).send().map_err(network)?;
        let status = response.status();
        if status != reqwest::StatusCode::OK {
            return Err(Error::HttpStatus {
                url: url.to_string(),
                status: status.as_u16(),
            });
        }
        Ok(response.bytes().map_err(network)?.to_vec())
    }

    /// Published versions of a module, ascending. The list is cached on
    /// first success and not refreshed.
    pub fn resolve_versions(&self, module: &str) -> Result<Vec<String>> {
        let escaped = escape_module_path(module)?;
        let cached = self.config.cache_dir.join(&escaped).join("@v").join("list");
        let body = match fs::read(&cached) {
            Ok(bytes) => bytes,
            Err(_) => {
                let url = format!("{}/{escaped}/@v/list", self.config.base_url);
                let bytes = self.get(&url)?;
                write_atomically(&cached, &bytes)?;
                bytes
            }
        };
        let mut versions: Vec<String> = String::from_utf8_lossy(&body)
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        sort_versions(&mut versions);
        versions.dedup();
        Ok(versions)
    }

    /// Downloads and unpacks `module@version`, returning the module root.
    /// A complete extraction in the cache is reused without network access.
    pub fn fetch_module(&self, module: &str, version: &str) -> Result<PathBuf> {
        if version.trim().is_empty() {
            return Err(Error::BadArchive(format!("{module}: empty version")));
        }
        let escaped = escape_module_path(module)?;
        let escaped_version = escape_module_path(version)?;
        let dest = self
            .config
            .cache_dir
            .join(format!("{escaped}@{escaped_version}"));
        if dest.is_dir() {
            return Ok(dest);
        }
        let parent = dest
            .parent()
            .unwrap_or(&self.config.cache_dir)
            .to_path_buf();
        fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;

        let lock_path = dest.with_file_name(format!(
            "{}.lock",
            dest.file_name().unwrap_or_default().to_string_lossy()
        ));
        let lock = File::create(&lock_path).map_err(|e| Error::io(&lock_path, e))?;
        lock.lock().map_err(|e| Error::io(&lock_path, e))?;
        if dest.is_dir() {
            return Ok(dest);
        }

        let url = format!(
            "{}/{escaped}/@v/{escaped_version}.zip",
            self.config.base_url
        );
        let archive = self.get(&url)?;
        let staging = parent.join(format!(".extract-{}", unique_suffix()));
        let prefix = format!("{module}@{version}/");
        if let Err(e) = extract_module_zip(&archive, &prefix, &staging) {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
        fs::rename(&staging, &dest).map_err(|e| {
            let _ = fs::remove_dir_all(&staging);
            Error::io(&dest, e)
        })?;
        Ok(dest)
    }
}

fn unique_suffix() -> String {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or_default();
    format!("{}-{nanos}", std::process::id())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let tmp = parent.join(format!(".tmp-{}", unique_suffix()));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Relative path of an archive entry, or an error if it could escape.
fn contained_path(name: &str) -> Result<PathBuf> {
    let unsafe_path = || Error::UnsafeArchivePath(name.to_string());
    if name.contains('\\') || name.contains('\0') {
        return Err(unsafe_path());
    }
    let mut rel = PathBuf::new();
    for component in Path::new(name).components() {
        match component {
            Component::Normal(part) => rel.push(part),
            Component::CurDir => {}
            Component::ParentDir | Component::RootDir | Component::Prefix(_) => {
                return Err(unsafe_path())
            }
        }
    }
    Ok(rel)
}

/// Unpacks a module zip into `dest`, dropping the `module@version/` prefix
/// every entry must carry. Entries that would land outside `dest` abort the
/// extraction; the caller removes the partial directory.
pub fn extract_module_zip(bytes: &[u8], prefix: &str, dest: &Path) -> Result<()> {
    let mut archive =
        zip::ZipArchive::new(Cursor::new(bytes)).map_err(|e| Error::BadArchive(e.to_string()))?;
    fs::create_dir_all(dest).map_err(|e| Error::io(dest, e))?;

    // validate every name before writing anything
    let mut plan = Vec::with_capacity(archive.len());
    for i in 0..archive.len() {
        let entry = archive
            .by_index_raw(i)
            .map_err(|e| Error::BadArchive(e.to_string()))?;
        let name = entry.name().to_string();
        let rel = contained_path(&name)?;
        let Some(inner) = name.strip_prefix(prefix) else {
            return Err(Error::BadArchive(format!(
                "entry `{name}` is outside `{prefix}`"
            )));
        };
        plan.push((i, inner.is_empty() || entry.is_dir(), rel));
    }

    let top = Path::new(prefix.trim_end_matches('/'));
    let top_len = top.components().count();
    for (i, is_dir, rel) in plan {
        let inner: PathBuf = rel.components().skip(top_len).collect();
        if inner.as_os_str().is_empty() {
            continue;
        }
        let target = dest.join(&inner);
        if !target.starts_with(dest) {
            return Err(Error::UnsafeArchivePath(rel.display().to_string()));
        }
        if is_dir {
            fs::create_dir_all(&target).map_err(|e| Error::io(&target, e))?;
            continue;
        }
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let mut entry = archive
            .by_index(i)
            .map_err(|e| Error::BadArchive(e.to_string()))?;
        let mut content = Vec::with_capacity(entry.size() as usize);
        entry
            .read_to_end(&mut content)
            .map_err(|e| Error::BadArchive(format!("{}: {e}", rel.display())))?;
        fs::write(&target, content).map_err(|e| Error::io(&target, e))?;
    }
    Ok(())
}
