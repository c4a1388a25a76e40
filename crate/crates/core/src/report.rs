//! Module-level aggregation of occurrences and its two renderings.
//!
//! The JSON form is a frozen contract (`schema_version` "1", schema shipped
//! as [`SCHEMA`]): two-space indentation, LF line endings, members in a fixed
//! order, and a caller-supplied timestamp so identical scans give identical
//! bytes.

use std::fmt::Write as _;

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::source_model::ModuleRef;
use crate::vectors::{AttackVector, Occurrence, Phase};

pub const SCHEMA_VERSION: &str = "1";

/// JSON Schema of the report document.
pub const SCHEMA: &str = include_str!("../schema/scan-report.v1.json");

/// Module identity as it appears in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleInfo {
    pub path: String,
    pub version: Option<String>,
}

impl ModuleInfo {
    pub fn new(path: impl Into<String>, version: Option<String>) -> Self {
        ModuleInfo {
            path: path.into(),
            version,
        }
    }

    /// `path@version`, or just the path when unversioned.
    pub fn label(&self) -> String {
        match &self.version {
            Some(v) => format!("{}@{v}", self.path),
            None => self.path.clone(),
        }
    }
}

impl From<&ModuleRef> for ModuleInfo {
    fn from(m: &ModuleRef) -> Self {
        ModuleInfo::new(m.path.clone(), m.version.clone())
    }
}

/// Scan-level facts copied into the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanMeta {
    pub scanned_at: DateTime<Utc>,
    pub files_scanned: u64,
    pub files_failed: u64,
    pub loc: u64,
}

/// An occurrence inside a vector entry; the vector is implied by the entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub package: String,
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorEntry {
    pub id: AttackVector,
    pub name: String,
    pub phase: Phase,
    pub count: u64,
    pub occurrences: Vec<Site>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: String,
    pub module: ModuleInfo,
    #[serde(with = "seconds_utc")]
    pub scanned_at: DateTime<Utc>,
    pub files_scanned: u64,
    pub files_failed: u64,
    pub loc: u64,
    /// Always twelve entries, in taxonomy order.
    pub vectors: Vec<VectorEntry>,
}

/// Partitions occurrences by vector into the twelve report entries.
pub fn aggregate(module: ModuleInfo, occurrences: &[Occurrence], meta: ScanMeta) -> ScanReport {
    let mut vectors: Vec<VectorEntry> = AttackVector::ALL
        .into_iter()
        .map(|v| VectorEntry {
            id: v,
            name: v.name().to_string(),
            phase: v.phase(),
            count: 0,
            occurrences: Vec::new(),
        })
        .collect();
    for occ in occurrences {
        vectors[occ.vector.index()].occurrences.push(Site {
            package: occ.package_name.clone(),
            file: occ.file.clone(),
            line: occ.line,
            column: occ.column,
            detail: occ.detail.clone(),
        });
    }
    for entry in &mut vectors {
        entry.occurrences.sort_by(|a, b| {
            (&a.file, a.line, a.column, &a.detail).cmp(&(&b.file, b.line, b.column, &b.detail))
        });
        entry.count = entry.occurrences.len() as u64;
    }
    ScanReport {
        schema_version: SCHEMA_VERSION.to_string(),
        module,
        scanned_at: meta
            .scanned_at
            .with_nanosecond(0)
            .unwrap_or(meta.scanned_at),
        files_scanned: meta.files_scanned,
        files_failed: meta.files_failed,
        loc: meta.loc,
        vectors,
    }
}

impl ScanReport {
    pub fn count(&self, vector: AttackVector) -> u64 {
        self.vectors[vector.index()].count
    }

    pub fn counts(&self) -> [u64; 12] {
        std::array::from_fn(|i| self.vectors[i].count)
    }

    pub fn total(&self) -> u64 {
        self.vectors.iter().map(|e| e.count).sum()
    }

    /// All occurrences with their vector, in taxonomy then location order.
    pub fn occurrences(&self) -> impl Iterator<Item = Occurrence> + '_ {
        self.vectors.iter().flat_map(|entry| {
            entry.occurrences.iter().map(move |s| Occurrence {
                vector: entry.id,
                package_name: s.package.clone(),
                file: s.file.clone(),
                line: s.line,
                column: s.column,
                detail: s.detail.clone(),
            })
        })
    }

    /// Checks the structural invariants a loaded document must satisfy.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidReport(format!(
                "unsupported schema_version `{}`",
                self.schema_version
            )));
        }
        if self.vectors.len() != AttackVector::ALL.len() {
            return Err(Error::InvalidReport(format!(
                "expected 12 vector entries, found {}",
                self.vectors.len()
            )));
        }
        for (entry, v) in self.vectors.iter().zip(AttackVector::ALL) {
            if entry.id != v || entry.name != v.name() || entry.phase != v.phase() {
                return Err(Error::InvalidReport(format!(
                    "entry `{}` out of taxonomy order (expected {v})",
                    entry.id
                )));
            }
            if entry.count != entry.occurrences.len() as u64 {
                return Err(Error::InvalidReport(format!(
                    "{v}: count {} but {} occurrences",
                    entry.count,
                    entry.occurrences.len()
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let report: ScanReport = serde_json::from_slice(bytes)?;
        report.validate()?;
        Ok(report)
    }
}

pub fn render_json(report: &ScanReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

pub fn render_table(report: &ScanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "module: {}", report.module.label());
    let _ = writeln!(
        out,
        "{:<3} {:<22} {:<14} {:>8}",
        "ID", "VECTOR", "PHASE", "COUNT"
    );
    for entry in &report.vectors {
        let _ = writeln!(
            out,
            "{:<3} {:<22} {:<14} {:>8}",
            entry.id.id(),
            entry.name,
            entry.phase.as_str(),
            entry.count
        );
    }
    let _ = writeln!(
        out,
        "files: {} scanned, {} failed; loc: {}",
        report.files_scanned, report.files_failed, report.loc
    );
    out
}

mod seconds_utc {
    use chrono::{DateTime, NaiveDateTime, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    const FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&t.format(FORMAT))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let text = String::deserialize(d)?;
        NaiveDateTime::parse_from_str(&text, FORMAT)
            .map(|t| t.and_utc())
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn meta() -> ScanMeta {
        ScanMeta {
            scanned_at: Utc.with_ymd_and_hms(2024, 6, 1, 12, 0, 0).unwrap(),
            files_scanned: 3,
            files_failed: 0,
            loc: 42,
        }
    }

    fn occ(vector: AttackVector, file: &str, line: u32, detail: &str) -> Occurrence {
        Occurrence {
            vector,
            package_name: "main".into(),
            file: file.into(),
            line,
            column: 1,
            detail: detail.into(),
        }
    }

    #[test]
    fn empty_input_gives_twelve_zero_entries() {
        let r = aggregate(ModuleInfo::new("example.com/x", None), &[], meta());
        assert_eq!(r.vectors.len(), 12);
        assert!(r
            .vectors
            .iter()
            .all(|e| e.count == 0 && e.occurrences.is_empty()));
        r.validate().unwrap();
    }

    #[test]
    fn partition_counts() {
        let input = [
            occ(AttackVector::ExternalExec, "b.go", 3, "exec.Command"),
            occ(
                AttackVector::StaticCodeGeneration,
                "a.go",
                1,
                "//go:generate x",
            ),
            occ(AttackVector::ExternalExec, "a.go", 9, "syscall.Exec"),
        ];
        let r = aggregate(ModuleInfo::new("m", None), &input, meta());
        assert_eq!(r.count(AttackVector::StaticCodeGeneration), 1);
        assert_eq!(r.count(AttackVector::ExternalExec), 2);
        assert_eq!(r.total(), 3);
        let files: Vec<_> = r.vectors[11]
            .occurrences
            .iter()
            .map(|s| s.file.as_str())
            .collect();
        assert_eq!(files, ["a.go", "b.go"]);
        // idempotent
        let again: Vec<_> = r.occurrences().collect();
        assert_eq!(aggregate(r.module.clone(), &again, meta()), r);
    }

    #[test]
    fn json_member_order_and_layout() {
        let input = [
            occ(AttackVector::CgoLinking, "gollvm.go", 10, "C.LLVMInit"),
            occ(
                AttackVector::AssemblyLinking,
                "cpu.go",
                4,
                "cpuid [cpu_x86.s]",
            ),
        ];
        let r = aggregate(ModuleInfo::new("m", Some("v1.0.0".into())), &input, meta());
        let text = String::from_utf8(render_json(&r)).unwrap();
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
        let keys = [
            "\"schema_version\"",
            "\"module\"",
            "\"path\"",
            "\"version\"",
            "\"scanned_at\"",
            "\"files_scanned\"",
            "\"files_failed\"",
            "\"loc\"",
            "\"vectors\"",
        ];
        let positions: Vec<_> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
        assert!(text.contains("  \"scanned_at\": \"2024-06-01T12:00:00Z\""));
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["vectors"][8]["name"], "cgo_linking");
        assert_eq!(value["vectors"][8]["count"], 1);
        assert_eq!(value["vectors"][9]["name"], "assembly_linking");
        assert_eq!(value["vectors"][9]["count"], 1);
        let raw = &text[text.find("cpuid").unwrap() - 120..];
        let order = [
            "\"package\"",
            "\"file\"",
            "\"line\"",
            "\"column\"",
            "\"detail\"",
        ];
        let at: Vec<_> = order.iter().map(|k| raw.find(k).unwrap()).collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn subsecond_timestamps_are_truncated() {
        let mut m = meta();
        m.scanned_at = Utc.timestamp_opt(1_700_000_000, 999_000_000).unwrap();
        let r = aggregate(ModuleInfo::new("m", None), &[], m);
        let back = ScanReport::from_json(&render_json(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let r = aggregate(ModuleInfo::new("m", None), &[], meta());
        let mut v: serde_json::Value = serde_json::from_slice(&render_json(&r)).unwrap();
        v["vectors"][0]["count"] = 5.into();
        let bytes = serde_json::to_vec(&v).unwrap();
        assert!(matches!(
            ScanReport::from_json(&bytes),
            Err(Error::InvalidReport(_))
        ));
        v["vectors"].as_array_mut().unwrap().pop();
        let bytes = serde_json::to_vec(&v).unwrap();
        assert!(ScanReport::from_json(&bytes).is_err());
        assert!(ScanReport::from_json(b"{}").is_err());
    }

    #[test]
    fn table_rows_follow_taxonomy_order() {
        let r = aggregate(ModuleInfo::new("m", None), &[], meta());
        let table = render_table(&r);
        let rows: Vec<_> = table.lines().skip(2).take(12).collect();
        assert_eq!(rows.len(), 12);
        for (row, v) in rows.iter().zip(AttackVector::ALL) {
            assert!(row.starts_with(v.id()));
            assert!(row.ends_with(" 0"), "{row}");
        }
        assert!(table.lines().last().unwrap().contains("loc: 42"));
    }
}
