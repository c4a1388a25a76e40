//! Shared test support: a stub Go module proxy, fixture annotations, and
//! plain-text oracles that count vector sites without a Go parser.

pub mod fixtures;
pub mod oracle;
pub mod proxy;
pub mod synth;

pub use fixtures::{fixture, fixtures_dir, read_expected, Expected};
pub use proxy::{module_zip, raw_zip, StubProxy};
