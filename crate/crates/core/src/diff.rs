//! Attack-surface deltas between two reports of the same module.
//!
//! Occurrences are matched across versions by `(vector, file, detail)`; line
//! and column are left out so that code which merely moved does not show up
//! as added or removed. When a key occurs several times on a side, the
//! occurrences are paired in position order and the surplus is reported.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{ModuleInfo, ScanReport, SCHEMA_VERSION};
use crate::vectors::{AttackVector, Occurrence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffRow {
    pub id: AttackVector,
    pub name: String,
    pub before: u64,
    pub after: u64,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub schema_version: String,
    pub baseline: ModuleInfo,
    pub candidate: ModuleInfo,
    pub rows: Vec<DiffRow>,
    /// Occurrences present only in the candidate.
    pub added: Vec<Occurrence>,
    /// Occurrences present only in the baseline.
    pub removed: Vec<Occurrence>,
    pub loc_before: u64,
    pub loc_after: u64,
}

impl DiffReport {
    pub fn delta(&self, vector: AttackVector) -> i64 {
        self.rows[vector.index()].delta
    }

    pub fn any_increase(&self) -> bool {
        self.rows.iter().any(|r| r.delta > 0)
    }
}

type Key = (AttackVector, String, String);

fn by_identity(report: &ScanReport) -> BTreeMap<Key, Vec<Occurrence>> {
    let mut map: BTreeMap<Key, Vec<Occurrence>> = BTreeMap::new();
    for occ in report.occurrences() {
        map.entry((occ.vector, occ.file.clone(), occ.detail.clone()))
            .or_default()
            .push(occ);
    }
    for list in map.values_mut() {
        list.sort_by_key(|o| (o.line, o.column));
    }
    map
}

pub fn diff_reports(baseline: &ScanReport, candidate: &ScanReport) -> Result<DiffReport> {
    if baseline.module.path != candidate.module.path {
        return Err(Error::ModuleMismatch {
            baseline: baseline.module.path.clone(),
            candidate: candidate.module.path.clone(),
        });
    }

    let rows = AttackVector::ALL
        .into_iter()
        .map(|v| {
            let before = baseline.count(v);
            let after = candidate.count(v);
            DiffRow {
                id: v,
                name: v.name().to_string(),
                before,
                after,
                delta: after as i64 - before as i64,
            }
        })
        .collect();

    let mut old = by_identity(baseline);
    let mut new = by_identity(candidate);
    let mut keys: Vec<Key> = old.keys().chain(new.keys()).cloned().collect();
    keys.sort();
    keys.dedup();

    let mut added = Vec::new();
    let mut removed = Vec::new();
    for key in keys {
        let before = old.remove(&key).unwrap_or_default();
        let after = new.remove(&key).unwrap_or_default();
        let paired = before.len().min(after.len());
        removed.extend(before.into_iter().skip(paired));
        added.extend(after.into_iter().skip(paired));
    }

    Ok(DiffReport {
        schema_version: SCHEMA_VERSION.to_string(),
        baseline: baseline.module.clone(),
        candidate: candidate.module.clone(),
        rows,
        added,
        removed,
        loc_before: baseline.loc,
        loc_after: candidate.loc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffFormat {
    Table,
    Json,
}

pub fn render_diff(diff: &DiffReport, format: DiffFormat) -> Vec<u8> {
    match format {
        DiffFormat::Json => {
            let mut out = serde_json::to_vec_pretty(diff).expect("diff serializes");
            out.push(b'\n');
            out
        }
        DiffFormat::Table => render_diff_table(diff).into_bytes(),
    }
}

fn signed(n: i64) -> String {
    if n > 0 {
        format!("+{n}")
    } else {
        n.to_string()
    }
}

fn render_diff_table(diff: &DiffReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "baseline:  {}", diff.baseline.label());
    let _ = writeln!(out, "candidate: {}", diff.candidate.label());
    let _ = writeln!(
        out,
        "{:<3} {:<22} {:>9} {:>9} {:>9}",
        "ID", "VECTOR", "BEFORE", "AFTER", "DELTA"
    );
    for row in &diff.rows {
        let _ = writeln!(
            out,
            "{:<3} {:<22} {:>9} {:>9} {:>9}",
            row.id.id(),
            row.name,
            row.before,
            row.after,
            signed(row.delta)
        );
    }
    let _ = writeln!(
        out,
        "{:<26} {:>9} {:>9} {:>9}",
        "LOC",
        diff.loc_before,
        diff.loc_after,
        signed(diff.loc_after as i64 - diff.loc_before as i64)
    );
    for (mark, list) in [('+', &diff.added), ('-', &diff.removed)] {
        for o in list {
            let _ = writeln!(
                out,
                "{mark} {} {}:{}:{} {}",
                o.vector, o.file, o.line, o.column, o.detail
            );
        }
    }
    out
}
