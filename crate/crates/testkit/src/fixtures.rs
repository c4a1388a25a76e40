use std::fs;
use std::path::{Path, PathBuf};

/// Workspace-level `fixtures/` directory.
pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("fixtures")
        .canonicalize()
        .expect("fixtures directory")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

/// One line of an `expected.txt` annotation:
/// `VECTOR file:line:column detail`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expected {
    pub file: String,
    pub line: u64,
    pub column: u64,
    pub vector: String,
    pub detail: String,
}

pub fn parse_expected(text: &str) -> Vec<Expected> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed =
            parse_line(line).unwrap_or_else(|| panic!("expected.txt line {}: `{raw}`", n + 1));
        out.push(parsed);
    }
    out.sort();
    out
}

fn parse_line(line: &str) -> Option<Expected> {
    let (vector, rest) = line.split_once(' ')?;
    let (loc, detail) = rest.split_once(' ')?;
    let mut parts = loc.rsplitn(3, ':');
    let column = parts.next()?.parse().ok()?;
    let lineno = parts.next()?.parse().ok()?;
    let file = parts.next()?;
    Some(Expected {
        file: file.to_string(),
        line: lineno,
        column,
        vector: vector.to_string(),
        detail: detail.to_string(),
    })
}

/// Annotations of a fixture; empty when it has no `expected.txt`.
pub fn read_expected(fixture_dir: &Path) -> Vec<Expected> {
    match fs::read_to_string(fixture_dir.join("expected.txt")) {
        Ok(text) => parse_expected(&text),
        Err(_) => Vec::new(),
    }
}
