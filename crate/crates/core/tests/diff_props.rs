use std::collections::BTreeMap;

use chrono::{TimeZone, Utc};
use goscope_core::diff::{diff_reports, render_diff, DiffFormat};
use goscope_core::report::{aggregate, ModuleInfo, ScanMeta};
use goscope_core::{scan_path, AttackVector, Occurrence, ScanOptions, ScanReport};
use goscope_testkit::fixture;
use proptest::prelude::*;

fn report(version: &str, occurrences: &[Occurrence], loc: u64) -> ScanReport {
    aggregate(
        ModuleInfo::new("example.com/m", Some(version.into())),
        occurrences,
        ScanMeta {
            scanned_at: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
            files_scanned: 3,
            files_failed: 0,
            loc,
        },
    )
}

fn occurrence() -> impl Strategy<Value = Occurrence> {
    (0usize..12, 0usize..3, 1u32..40, 1u32..20, 0usize..3).prop_map(|(v, f, line, column, d)| {
        Occurrence {
            vector: AttackVector::ALL[v],
            package_name: "m".into(),
            file: format!("f{f}.go"),
            line,
            column,
            detail: format!("d{d}"),
        }
    })
}

fn occurrences() -> impl Strategy<Value = Vec<Occurrence>> {
    prop::collection::vec(occurrence(), 0..40).prop_map(|mut v| {
        // one occurrence per position, as a real scan produces
        v.sort_by_key(|o| (o.file.clone(), o.line, o.column, o.vector));
        v.dedup_by_key(|o| (o.file.clone(), o.line, o.column, o.vector));
        v
    })
}

fn key_multiset(occs: &[Occurrence]) -> BTreeMap<(AttackVector, String, String), i64> {
    let mut m = BTreeMap::new();
    for o in occs {
        *m.entry((o.vector, o.file.clone(), o.detail.clone()))
            .or_default() += 1;
    }
    m
}

proptest! {
    #[test]
    fn diff_with_self_is_zero(a in occurrences()) {
        let r = report("v1", &a, 10);
        let d = diff_reports(&r, &r).unwrap();
        prop_assert!(d.rows.iter().all(|row| row.delta == 0 && row.before == row.after));
        prop_assert!(d.added.is_empty() && d.removed.is_empty());
    }

    #[test]
    fn diff_is_antisymmetric(a in occurrences(), b in occurrences()) {
        let (ra, rb) = (report("v1", &a, 10), report("v2", &b, 20));
        let ab = diff_reports(&ra, &rb).unwrap();
        let ba = diff_reports(&rb, &ra).unwrap();
        for (x, y) in ab.rows.iter().zip(&ba.rows) {
            prop_assert_eq!(x.delta, -y.delta);
        }
        prop_assert_eq!(&ab.added, &ba.removed);
        prop_assert_eq!(&ab.removed, &ba.added);
        prop_assert_eq!((ab.loc_before, ab.loc_after), (ba.loc_after, ba.loc_before));
    }

    #[test]
    fn added_minus_removed_is_delta(a in occurrences(), b in occurrences()) {
        let d = diff_reports(&report("v1", &a, 1), &report("v2", &b, 1)).unwrap();
        for v in AttackVector::ALL {
            let added = d.added.iter().filter(|o| o.vector == v).count() as i64;
            let removed = d.removed.iter().filter(|o| o.vector == v).count() as i64;
            prop_assert_eq!(added - removed, d.delta(v));
            prop_assert_eq!(
                d.delta(v),
                b.iter().filter(|o| o.vector == v).count() as i64
                    - a.iter().filter(|o| o.vector == v).count() as i64
            );
        }
    }

    #[test]
    fn added_and_removed_are_the_key_multiset_difference(a in occurrences(), b in occurrences()) {
        let d = diff_reports(&report("v1", &a, 1), &report("v2", &b, 1)).unwrap();
        let (ma, mb) = (key_multiset(&a), key_multiset(&b));
        let mut keys: Vec<_> = ma.keys().chain(mb.keys()).cloned().collect();
        keys.sort();
        keys.dedup();
        let (madd, mrem) = (key_multiset(&d.added), key_multiset(&d.removed));
        for k in keys {
            let diff = mb.get(&k).copied().unwrap_or(0) - ma.get(&k).copied().unwrap_or(0);
            prop_assert_eq!(madd.get(&k).copied().unwrap_or(0), diff.max(0));
            prop_assert_eq!(mrem.get(&k).copied().unwrap_or(0), (-diff).max(0));
        }
    }

    #[test]
    fn renderers_agree_on_counts(a in occurrences(), b in occurrences()) {
        let d = diff_reports(&report("v1", &a, 1), &report("v2", &b, 1)).unwrap();
        let json: serde_json::Value =
            serde_json::from_slice(&render_diff(&d, DiffFormat::Json)).unwrap();
        let table = String::from_utf8(render_diff(&d, DiffFormat::Table)).unwrap();
        for (i, v) in AttackVector::ALL.into_iter().enumerate() {
            prop_assert_eq!(json["rows"][i]["delta"].as_i64().unwrap(), d.delta(v));
            let row = table.lines().find(|l| l.starts_with(v.id())).unwrap();
            let cells: Vec<&str> = row.split_whitespace().collect();
            let delta = d.delta(v);
            let signed = if delta > 0 { format!("+{delta}") } else { delta.to_string() };
            prop_assert_eq!(cells.last().copied(), Some(signed.as_str()));
        }
    }
}

#[test]
fn two_version_fixture_adds_one_init() {
    let at = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
    let scan = |dir: &str, v: &str| {
        scan_path(&fixture(dir), Some(v.into()), &ScanOptions::default(), at)
            .unwrap()
            .report
    };
    let (v1, v2) = (scan("versions/v1", "v1.0.0"), scan("versions/v2", "v2.0.0"));
    let d = diff_reports(&v1, &v2).unwrap();
    assert_eq!(d.delta(AttackVector::InitHook), 1);
    assert!(d.any_increase());
    assert_eq!(d.added.len(), 1);
    assert!(d.removed.is_empty());
    assert_eq!(
        diff_reports(&v2, &v1)
            .unwrap()
            .delta(AttackVector::InitHook),
        -1
    );
    let same = diff_reports(&v1, &v1).unwrap();
    assert!(!same.any_increase());
}

#[test]
fn module_mismatch_names_both_paths() {
    let a = report("v1", &[], 1);
    let mut b = report("v1", &[], 1);
    b.module.path = "example.com/other".into();
    let err = diff_reports(&a, &b).unwrap_err().to_string();
    assert!(
        err.contains("example.com/m") && err.contains("example.com/other"),
        "{err}"
    );
}
