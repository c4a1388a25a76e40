//! Static measurement of the supply-chain attack surface of Go modules.
//!
//! A scan walks a module tree ([`source_model`]), runs one syntactic analyzer
//! per attack vector over every parsed file ([`vectors`]), and aggregates the
//! occurrences into a [`report::ScanReport`]. Reports of two releases of the
//! same module can be compared with [`diff`]. Modules that are not on disk are
//! downloaded from a Go module proxy by [`fetch`].

pub mod diff;
pub mod error;
pub mod fetch;
pub mod report;
pub mod scan;
pub mod source_model;
pub mod vectors;

pub use error::{Error, Result};
pub use report::ScanReport;
pub use scan::{scan_module, scan_path, ScanOptions, ScanOutcome};
pub use source_model::{ModuleRef, PackageUnit, SourceFile};
pub use vectors::{AttackVector, Occurrence, Phase, VectorSet};
