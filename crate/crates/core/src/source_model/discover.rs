use std::collections::BTreeMap;
use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use walkdir::WalkDir;

use super::identity::check_root;
use super::parse::{parse_file, SourceFile};
use super::PackageUnit;
use crate::error::{Error, Result};

const DEFAULT_EXCLUDES: [&str; 2] = ["vendor", ".git"];
const TESTDATA: &str = "testdata";

#[derive(Debug, Clone, Default)]
pub struct DiscoveryOptions {
    /// Extra directory-name globs to skip, on top of `vendor` and `.git`.
    pub excludes: Vec<String>,
    /// Scan `testdata` directories, which are skipped by default.
    pub include_testdata: bool,
    /// Drop files carrying a `Code generated ... DO NOT EDIT.` header.
    pub skip_generated: bool,
}

impl DiscoveryOptions {
    fn exclude_set(&self) -> Result<GlobSet> {
        let mut builder = GlobSetBuilder::new();
        let defaults = DEFAULT_EXCLUDES
            .iter()
            .copied()
            .chain((!self.include_testdata).then_some(TESTDATA));
        for pattern in defaults.chain(self.excludes.iter().map(String::as_str)) {
            let glob = Glob::new(pattern).map_err(|e| Error::InvalidExclude {
                pattern: pattern.to_string(),
                reason: e.to_string(),
            })?;
            builder.add(glob);
        }
        builder.build().map_err(|e| Error::InvalidExclude {
            pattern: self.excludes.join(","),
            reason: e.to_string(),
        })
    }
}

/// Everything found under a module root.
#[derive(Debug, Default)]
pub struct Discovery {
    pub packages: Vec<PackageUnit>,
    /// `.go` files in directories where no file has a usable package clause.
    pub stray_files: Vec<SourceFile>,
    pub warnings: Vec<String>,
}

impl Discovery {
    pub fn files(&self) -> impl Iterator<Item = &SourceFile> {
        self.packages
            .iter()
            .flat_map(|p| p.go_files.iter())
            .chain(self.stray_files.iter())
    }
}

pub fn discover_packages(root: &Path, opts: &DiscoveryOptions) -> Result<Vec<PackageUnit>> {
    discover(root, opts).map(|d| d.packages)
}

/// Walks `root` without following symlinks and parses every `.go` file.
pub fn discover(root: &Path, opts: &DiscoveryOptions) -> Result<Discovery> {
    check_root(root)?;
    let excludes = opts.exclude_set()?;
    let mut warnings = Vec::new();

    // dir -> (go files, asm files), all relative and sorted
    let mut dirs: BTreeMap<String, (Vec<String>, Vec<String>)> = BTreeMap::new();
    let walker = WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| {
            e.depth() == 0 || !(e.file_type().is_dir() && excludes.is_match(e.file_name()))
        });
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                warnings.push(format!("skipping unreadable entry: {e}"));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy();
        let is_go = name.ends_with(".go");
        let is_asm = name.ends_with(".s");
        if !is_go && !is_asm {
            continue;
        }
        let Some(rel) = relative(root, entry.path()) else {
            continue;
        };
        let dir = match rel.rfind('/') {
            Some(i) => rel[..i].to_string(),
            None => ".".to_string(),
        };
        let slot = dirs.entry(dir).or_default();
        if is_go {
            slot.0.push(rel);
        } else {
            slot.1.push(rel);
        }
    }

    let go_paths: Vec<&String> = dirs.values().flat_map(|(go, _)| go).collect();
    let parsed: Vec<SourceFile> = go_paths
        .par_iter()
        .map(|rel| parse_file(root, rel))
        .collect();
    let mut parsed = parsed.into_iter();

    let mut discovery = Discovery {
        warnings,
        ..Discovery::default()
    };
    for (dir, (go, asm)) in dirs {
        let mut files: Vec<SourceFile> = parsed.by_ref().take(go.len()).collect();
        if opts.skip_generated {
            files.retain(|f| !f.generated);
        }
        for f in files.iter().filter(|f| !f.parse_ok()) {
            discovery.warnings.push(format!(
                "{}: {}",
                f.path,
                f.parse_error().unwrap_or("parse failed")
            ));
        }
        group_directory(dir, files, asm, &mut discovery);
    }
    Ok(discovery)
}

fn relative(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let parts: Vec<_> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    (!parts.is_empty()).then(|| parts.join("/"))
}

/// Package name a file belongs to, folding `x_test` into `x` for test files.
fn base_package(file: &SourceFile) -> Option<&str> {
    let name = file.package_name.as_deref()?;
    if file.is_test_file() {
        if let Some(base) = name.strip_suffix("_test") {
            if !base.is_empty() {
                return Some(base);
            }
        }
    }
    Some(name)
}

fn group_directory(dir: String, files: Vec<SourceFile>, asm: Vec<String>, out: &mut Discovery) {
    let mut groups: BTreeMap<String, Vec<SourceFile>> = BTreeMap::new();
    let mut nameless = Vec::new();
    for f in files {
        match base_package(&f) {
            Some(name) => groups.entry(name.to_string()).or_default().push(f),
            None => nameless.push(f),
        }
    }

    // Files without a usable clause and the assembly of the directory go to
    // the largest package of the directory (ties: smallest name).
    let primary = groups
        .iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0)))
        .map(|(name, _)| name.clone());
    let Some(primary) = primary else {
        out.stray_files.extend(nameless);
        return;
    };

    for (name, mut go_files) in groups {
        let asm_files = if name == primary {
            go_files.append(&mut nameless);
            go_files.sort_by(|a, b| a.path.cmp(&b.path));
            asm.clone()
        } else {
            Vec::new()
        };
        out.packages.push(PackageUnit {
            import_dir: dir.clone(),
            package_name: name,
            go_files,
            asm_files,
        });
    }
}

/// Total lines of every Go file of the packages, parsed or not.
pub fn count_loc(packages: &[PackageUnit]) -> usize {
    packages
        .iter()
        .flat_map(|p| p.go_files.iter())
        .map(|f| f.line_count)
        .sum()
}
