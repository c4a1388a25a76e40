use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use goscope_testkit::{fixture, fixtures_dir, StubProxy};
use tempfile::TempDir;

const PINNED: &str = "2024-01-01T00:00:00Z";

fn goscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goscope"))
        .args(args)
        .env_remove("GOPROXY")
        .env_remove("GOSCOPE_LOG")
        .env_remove("GOSCOPE_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn row_count(table: &str, id: &str) -> u64 {
    let row = table
        .lines()
        .find(|l| l.starts_with(&format!("{id} ")))
        .unwrap_or_else(|| panic!("no {id} row in\n{table}"));
    row.split_whitespace().last().unwrap().parse().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn scan_prints_table_and_stays_quiet() {
    let out = goscope(&["scan", p(&fixture("e7_plugin"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(row_count(&stdout(&out), "E7"), 1);
    assert!(stdout(&out).starts_with("module: example.com/fixtures/e7plugin\n"));
    assert_eq!(stderr(&out), "");
}

#[test]
fn scan_json_matches_golden() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("out.json");
    let out = goscope(&[
        "scan",
        p(&fixture("empty")),
        "--json",
        p(&json),
        "--timestamp",
        PINNED,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(json).unwrap(),
        fs::read_to_string(fixtures_dir().join("golden/empty.json")).unwrap()
    );
}

#[test]
fn vector_filter_limits_rows() {
    let out = goscope(&["scan", p(&fixtures_dir()), "--vectors", "P1,P2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = stdout(&out);
    assert!(row_count(&table, "P1") > 0);
    assert!(row_count(&table, "P2") > 0);
    for id in ["I1", "I2", "E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8"] {
        assert_eq!(row_count(&table, id), 0, "{id}");
    }
}

#[test]
fn unknown_vector_is_fatal_and_named() {
    let out = goscope(&["scan", p(&fixture("empty")), "--vectors", "P1,Z7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Z7"), "{}", stderr(&out));
    assert_eq!(stdout(&out), "");
}

#[test]
fn usage_errors_and_missing_targets_exit_1() {
    assert_eq!(goscope(&["scan"]).status.code(), Some(1));
    assert_eq!(goscope(&["frobnicate"]).status.code(), Some(1));
    let out = goscope(&["scan", "/definitely/not/here"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not a directory"));
    assert_eq!(goscope(&["--help"]).status.code(), Some(0));
}

#[test]
fn strict_mode_flags_degraded_scans() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("go.mod"), "module example.com/broken\n").unwrap();
    fs::write(dir.path().join("ok.go"), "package main\n\nfunc main() {}\n").unwrap();
    fs::write(dir.path().join("bad.go"), "package main\n\nfunc (\n").unwrap();
    let lenient = goscope(&["scan", p(dir.path())]);
    assert_eq!(lenient.status.code(), Some(0));
    assert!(stderr(&lenient).contains("bad.go"));
    assert_eq!(
        goscope(&["scan", p(dir.path()), "--strict"]).status.code(),
        Some(2)
    );
    assert_eq!(
        goscope(&["scan", p(&fixture("empty")), "--strict"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn diff_exit_codes() {
    let dir = TempDir::new().unwrap();
    let v1 = dir.path().join("v1.json");
    let v2 = dir.path().join("v2.json");
    for (src, dst, ver) in [
        ("versions/v1", &v1, "v1.0.0"),
        ("versions/v2", &v2, "v2.0.0"),
    ] {
        let out = goscope(&[
            "scan",
            p(&fixture(src)),
            "--json",
            p(dst),
            "--module-version",
            ver,
        ]);
        assert_eq!(out.status.code(), Some(0));
    }

    let same = goscope(&["diff", p(&v1), p(&v1), "--fail-on-increase"]);
    assert_eq!(same.status.code(), Some(0));
    let table = stdout(&same);
    for line in table
        .lines()
        .filter(|l| l.len() > 2 && l.as_bytes()[2] == b' ' && !l.starts_with("ID"))
    {
        if line.starts_with("LOC") {
            continue;
        }
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells[cells.len() - 1], "0", "{line}");
    }

    let grew = goscope(&["diff", p(&v1), p(&v2), "--fail-on-increase"]);
    assert_eq!(grew.status.code(), Some(3));
    assert_eq!(row_count(&stdout(&grew), "I2"), 1);
    assert!(stdout(&grew).contains("+1"));
    assert_eq!(goscope(&["diff", p(&v1), p(&v2)]).status.code(), Some(0));
    assert_eq!(
        goscope(&["diff", p(&v2), p(&v1), "--fail-on-increase"])
            .status
            .code(),
        Some(0)
    );

    let other = dir.path().join("other.json");
    goscope(&["scan", p(&fixture("empty")), "--json", p(&other)]);
    let mismatch = goscope(&["diff", p(&v1), p(&other)]);
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(stderr(&mismatch).contains("example.com/fixtures/empty"));
}

#[test]
fn diff_accepts_directories_and_writes_json() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("d.json");
    let out = goscope(&[
        "diff",
        p(&fixture("versions/v1")),
        p(&fixture("versions/v2")),
        "--json",
        p(&json),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let d: serde_json::Value = serde_json::from_slice(&fs::read(json).unwrap()).unwrap();
    assert_eq!(d["rows"][3]["id"], "I2");
    assert_eq!(d["rows"][3]["delta"], 1);
    assert_eq!(d["added"].as_array().unwrap().len(), 1);
}

#[test]
fn scanned_reports_diff_losslessly() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("all.json");
    goscope(&[
        "scan",
        p(&fixtures_dir()),
        "--json",
        p(&json),
        "--timestamp",
        PINNED,
    ]);
    let out = goscope(&[
        "diff",
        p(&json),
        p(&json),
        "--json",
        p(&dir.path().join("d.json")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let d: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("d.json")).unwrap()).unwrap();
    assert!(d["added"].as_array().unwrap().is_empty());
    assert!(d["removed"].as_array().unwrap().is_empty());
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

const HEADER: &str = "module,version,P1,P2,I1,I2,E1,E2,E3,E4,E5,E6,E7,E8,loc,files,status";

fn stub_corpus() -> StubProxy {
    let proxy = StubProxy::start();
    proxy.add_module(
        "example.com/alpha",
        "v1.0.0",
        &[
            ("go.mod", "module example.com/alpha\n"),
            ("main.go", "package main\n\nimport \"os/exec\"\n\nfunc init() {}\n\nfunc main() {\n\t_ = exec.Command(\"ls\").Run()\n}\n"),
        ],
    );
    proxy.add_module(
        "github.com/Acme/Beta",
        "v0.2.0",
        &[
            ("go.mod", "module github.com/Acme/Beta\n"),
            ("beta.go", "//go:generate echo hi\npackage beta\n\nimport \"reflect\"\n\nvar T = reflect.TypeOf(0)\n"),
        ],
    );
    proxy.add_module(
        "example.com/gamma",
        "v2.1.0",
        &[
            ("go.mod", "module example.com/gamma\n"),
            (
                "a.go",
                "package gamma\n\nfunc init() {}\n\nfunc init() {}\n",
            ),
        ],
    );
    proxy
}

#[test]
fn corpus_over_stub_proxy() {
    let proxy = stub_corpus();
    let dir = TempDir::new().unwrap();
    let list = dir.path().join("list.txt");
    fs::write(
        &list,
        "# corpus\nexample.com/alpha@v1.0.0\n\ngithub.com/Acme/Beta@v0.2.0  # mixed case\nexample.com/gamma@v2.1.0\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let reports = dir.path().join("reports");
    let cache = dir.path().join("cache");
    let out = goscope(&[
        "corpus",
        p(&list),
        "--out",
        p(&csv),
        "--report-dir",
        p(&reports),
        "--proxy",
        proxy.url(),
        "--cache-dir",
        p(&cache),
        "--jobs",
        "2",
        "--timestamp",
        PINNED,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stderr(&out), "");
    let text = fs::read_to_string(&csv).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(text.lines().next(), Some(HEADER));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1][..2], ["example.com/alpha", "v1.0.0"]);
    assert_eq!(rows[2][..2], ["github.com/Acme/Beta", "v0.2.0"]);
    assert_eq!(rows[3][..2], ["example.com/gamma", "v2.1.0"]);
    // alpha: I2 1, E8 1; beta: P1 1, I1 1, E2 1; gamma: I2 2
    let expect: [[u64; 12]; 3] = [
        [0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1],
        [1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0],
    ];
    for (row, want) in rows[1..4].iter().zip(expect) {
        let got: Vec<u64> = row[2..14].iter().map(|c| c.parse().unwrap()).collect();
        assert_eq!(got, want, "{row:?}");
        assert_eq!(row[16], "ok");
    }
    let total = &rows[4];
    assert_eq!(total[0], "TOTAL");
    for col in 2..16 {
        let sum: u64 = rows[1..4]
            .iter()
            .map(|r| r[col].parse::<u64>().unwrap())
            .sum();
        assert_eq!(
            total[col].parse::<u64>().unwrap(),
            sum,
            "column {}",
            rows[0][col]
        );
    }
    assert_eq!(proxy.hits("/github.com/!acme/!beta/@v/v0.2.0.zip"), 1);
    assert!(reports.join("github.com/!acme/!beta@v0.2.0.json").is_file());
    assert!(reports.join("example.com/alpha@v1.0.0.json").is_file());
}

#[test]
fn corpus_tolerates_bad_modules() {
    let proxy = stub_corpus();
    proxy.add_raw(
        "/example.com/evil/@v/v1.0.0.zip",
        goscope_testkit::raw_zip(&[("example.com/evil@v1.0.0/../../x.go", b"package x\n")]),
    );
    let dir = TempDir::new().unwrap();
    let list = dir.path().join("list.txt");
    fs::write(
        &list,
        "example.com/alpha@v1.0.0\nexample.com/missing@v1.0.0\nexample.com/evil@v1.0.0\n",
    )
    .unwrap();
    let out = goscope(&[
        "corpus",
        p(&list),
        "--proxy",
        proxy.url(),
        "--cache-dir",
        p(&dir.path().join("c")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("404"), "{}", stderr(&out));
    assert!(
        stderr(&out).contains("unsafe archive path"),
        "{}",
        stderr(&out)
    );
    assert!(!dir.path().join("x.go").exists());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 5);
    for row in &rows[2..4] {
        assert_eq!(row[16], "fetch_error");
        assert!(row[2..16].iter().all(|c| c == "0"), "{row:?}");
    }
    assert_eq!(rows[4][2..16], rows[1][2..16]);
}

#[test]
fn corpus_edge_cases() {
    let dir = TempDir::new().unwrap();
    let list = dir.path().join("empty.txt");
    fs::write(&list, "# nothing\n\n").unwrap();
    let out = goscope(&["corpus", p(&list), "--proxy", "http://127.0.0.1:9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        format!("{HEADER}\nTOTAL,,0,0,0,0,0,0,0,0,0,0,0,0,0,0,\n")
    );

    let missing = goscope(&["corpus", p(&dir.path().join("nope.txt"))]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn scan_and_fetch_remote_targets() {
    let proxy = stub_corpus();
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let out = goscope(&[
        "scan",
        "example.com/gamma@v2.1.0",
        "--proxy",
        proxy.url(),
        "--cache-dir",
        p(&cache),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("module: example.com/gamma@v2.1.0\n"));
    assert_eq!(row_count(&stdout(&out), "I2"), 2);

    let fetched = goscope(&[
        "fetch",
        "example.com/gamma",
        "--proxy",
        proxy.url(),
        "--cache-dir",
        p(&cache),
    ]);
    assert_eq!(fetched.status.code(), Some(0));
    assert_eq!(
        stdout(&fetched).trim(),
        p(&cache.join("example.com/gamma@v2.1.0"))
    );

    let listed = goscope(&[
        "fetch",
        "github.com/Acme/Beta",
        "--list",
        "--proxy",
        proxy.url(),
        "--cache-dir",
        p(&cache),
    ]);
    assert_eq!(stdout(&listed), "v0.2.0\n");
}

#[test]
fn goproxy_off_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_goscope"))
        .args(["fetch", "example.com/x@v1.0.0"])
        .env("GOPROXY", "off")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("off"), "{}", stderr(&out));
}
