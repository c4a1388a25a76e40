//! Package discovery and parsing of a Go module tree.
//!
//! Every `.go` file under a non-excluded directory becomes exactly one
//! [`SourceFile`], whether or not it parsed. Files are grouped into
//! [`PackageUnit`]s by directory and declared package name, with external
//! `_test` packages folded into the package they test.

mod discover;
mod identity;
mod parse;

pub use discover::{count_loc, discover, discover_packages, Discovery, DiscoveryOptions};
pub use identity::{parse_module_directive, read_module_identity, ModuleRef, UNNAMED_MODULE};
pub use parse::{parse_file, parse_source, Position, SourceFile, Syntax};

/// Go files found in one directory that declare the same package.
#[derive(Debug)]
pub struct PackageUnit {
    /// Directory relative to the module root, `/`-separated; `.` for the root.
    pub import_dir: String,
    pub package_name: String,
    pub go_files: Vec<SourceFile>,
    /// Assembly sources (`.s`) of the directory, relative to the module root.
    pub asm_files: Vec<String>,
}

impl PackageUnit {
    pub fn parsed_files(&self) -> impl Iterator<Item = &SourceFile> {
        self.go_files.iter().filter(|f| f.parse_ok())
    }
}
