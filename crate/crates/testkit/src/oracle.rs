//! Line-oriented counters. They see only text, so they are usable as a
//! second opinion on sources written in a plain style: one statement per
//! line, no vector syntax inside strings or block comments.

use std::fs;
use std::path::Path;

use regex::Regex;

/// Number of lines, with a final unterminated line counted.
pub fn count_lines(text: &str) -> u64 {
    text.lines().count() as u64
}

fn code_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim_start().starts_with("//"))
}

pub fn go_generate(text: &str) -> u64 {
    text.lines()
        .filter(|l| l.trim_start().starts_with("//go:generate"))
        .count() as u64
}

pub fn init_funcs(text: &str) -> u64 {
    let re = Regex::new(r"^func init\(\)").unwrap();
    text.lines().filter(|l| re.is_match(l)).count() as u64
}

pub fn plugin_opens(text: &str) -> u64 {
    code_lines(text)
        .map(|l| l.matches("plugin.Open(").count() as u64)
        .sum()
}

pub const EXEC_CALLS: [&str; 5] = [
    "exec.Command(",
    "exec.CommandContext(",
    "syscall.ForkExec(",
    "syscall.Exec(",
    "os.StartProcess(",
];

pub fn exec_calls(text: &str) -> u64 {
    code_lines(text)
        .map(|l| {
            EXEC_CALLS
                .iter()
                .map(|needle| {
                    l.match_indices(needle)
                        .filter(|(i, _)| {
                            // reject `myexec.Command(` and similar
                            l[..*i]
                                .chars()
                                .next_back()
                                .is_none_or(|c| !(c.is_alphanumeric() || c == '_' || c == '.'))
                        })
                        .count() as u64
                })
                .sum::<u64>()
        })
        .sum()
}

pub fn reflect_imports(text: &str) -> u64 {
    let re = Regex::new(r#"^\s*(import\s+)?(\w+\s+)?"reflect"\s*$"#).unwrap();
    text.lines().filter(|l| re.is_match(l)).count() as u64
}

/// Per-vector oracle counts over every `.go` file under `root`, skipping
/// `vendor` and `testdata` directories, plus total line count of those files.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct TextCounts {
    pub p1: u64,
    pub i2: u64,
    pub e2: u64,
    pub e7: u64,
    pub e8: u64,
    pub go_lines: u64,
    pub go_files: u64,
}

pub fn count_tree(root: &Path) -> TextCounts {
    let mut counts = TextCounts::default();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let Ok(entries) = fs::read_dir(&dir) else {
            continue;
        };
        for entry in entries.flatten() {
            let path = entry.path();
            let name = entry.file_name().to_string_lossy().into_owned();
            let Ok(kind) = entry.file_type() else {
                continue;
            };
            if kind.is_dir() {
                if !matches!(name.as_str(), "vendor" | "testdata" | ".git") {
                    stack.push(path);
                }
            } else if kind.is_file() && name.ends_with(".go") {
                let Ok(text) = fs::read_to_string(&path) else {
                    continue;
                };
                counts.p1 += go_generate(&text);
                counts.i2 += init_funcs(&text);
                counts.e2 += reflect_imports(&text);
                counts.e7 += plugin_opens(&text);
                counts.e8 += exec_calls(&text);
                counts.go_lines += count_lines(&text);
                counts.go_files += 1;
            }
        }
    }
    counts
}
