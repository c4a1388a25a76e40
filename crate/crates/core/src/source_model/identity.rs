use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Placeholder module path for trees without a usable `go.mod`.
pub const UNNAMED_MODULE: &str = "(unnamed)";

/// A module tree on disk together with its import path and version label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleRef {
    pub path: String,
    pub version: Option<String>,
    pub root: PathBuf,
}

impl ModuleRef {
    pub fn new(
        path: impl Into<String>,
        version: Option<String>,
        root: impl Into<PathBuf>,
    ) -> Result<Self> {
        let root = root.into();
        check_root(&root)?;
        Ok(ModuleRef {
            path: path.into(),
            version,
            root,
        })
    }
}

pub(crate) fn check_root(root: &Path) -> Result<()> {
    let unreadable = |reason: String| Error::RootUnreadable {
        path: root.to_path_buf(),
        reason,
    };
    let meta = std::fs::metadata(root).map_err(|e| unreadable(e.to_string()))?;
    if !meta.is_dir() {
        return Err(unreadable("not a directory".to_string()));
    }
    std::fs::read_dir(root).map_err(|e| unreadable(e.to_string()))?;
    Ok(())
}

/// Reads the module path from `root/go.mod`. The version always comes from
/// the caller. A missing manifest yields [`UNNAMED_MODULE`]; a manifest
/// without a `module` directive yields the same plus a warning.
pub fn read_module_identity(
    root: &Path,
    version: Option<String>,
) -> Result<(ModuleRef, Option<String>)> {
    let manifest = root.join("go.mod");
    let (path, warning) = match std::fs::read_to_string(&manifest) {
        Ok(text) => match parse_module_directive(&text) {
            Some(path) => (path, None),
            None => (
                UNNAMED_MODULE.to_string(),
                Some(format!("{}: no module directive", manifest.display())),
            ),
        },
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => (UNNAMED_MODULE.to_string(), None),
        Err(e) => (
            UNNAMED_MODULE.to_string(),
            Some(format!("{}: {e}", manifest.display())),
        ),
    };
    Ok((ModuleRef::new(path, version, root)?, warning))
}

/// Module path declared by a go.mod text, if any.
pub fn parse_module_directive(text: &str) -> Option<String> {
    let mut in_block = false;
    for raw in text.lines() {
        let line = strip_line_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if in_block {
            return unquote(line.split_whitespace().next()?);
        }
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("module") {
            // `module(` without a space is legal too
            if let Some(rest) = line.strip_prefix("module(") {
                in_block = true;
                if let Some(tok) = rest.split_whitespace().next() {
                    return unquote(tok);
                }
            }
            continue;
        }
        match tokens.next() {
            Some("(") => in_block = true,
            Some(tok) => return unquote(tok),
            None => continue,
        }
    }
    None
}

fn strip_line_comment(line: &str) -> &str {
    match line.find("//") {
        Some(i) => &line[..i],
        None => line,
    }
}

fn unquote(token: &str) -> Option<String> {
    let t = token
        .trim_matches('"')
        .trim_matches('`')
        .trim_end_matches(')');
    (!t.is_empty()).then(|| t.to_string())
}
