//! Generated Go modules of arbitrary size with vector counts known by
//! construction.

use std::fs;
use std::path::Path;

/// Counts per vector id in `P1 P2 I1 I2 E1 E2 E3 E4 E5 E6 E7 E8` order.
pub type Counts = [u64; 12];

fn unit(pkg: usize, file: usize) -> String {
    format!(
        r#"package pkg{pkg}

//go:generate stringer -type=Mode{file}

import (
	"os"
	"os/exec"
	"reflect"
	"strings"
)

type Mode{file} int

var env{file} = os.Getenv("HOME{file}")

var plain{file} = 42

type Worker{file} struct {{
	name string
	args []string
}}

func NewWorker{file}(name string) *Worker{file} {{
	return &Worker{file}{{name: name}}
}}

func init() {{
	_ = reflect.TypeOf(plain{file})
}}

func (w *Worker{file}) Describe() string {{
	parts := make([]string, 0, len(w.args)+1)
	parts = append(parts, w.name)
	for _, a := range w.args {{
		if a == "" {{
			continue
		}}
		parts = append(parts, a)
	}}
	return strings.Join(parts, " ")
}}

func (w *Worker{file}) Run() error {{
	cmd := exec.Command(w.name, w.args...)
	return cmd.Run()
}}

func Sum{file}(values []int) int {{
	total := 0
	for _, v := range values {{
		total += v
	}}
	return total
}}

func Spawn{file}() error {{
	w := NewWorker{file}("true")
	w.args = append(w.args, env{file})
	return w.Run()
}}
"#
    )
}

/// Per-file vector counts of [`unit`]. `Run` has a distinct receiver in
/// every file, so with two or more files both `.Run()` calls are dynamic.
const UNIT_COUNTS: Counts = [1, 0, 1, 1, 1, 1, 2, 0, 0, 0, 0, 1];

/// Writes a module of `packages * files_per_package` files under `root`
/// and returns `(total lines, expected counts)`.
pub fn write_module(root: &Path, packages: usize, files_per_package: usize) -> (u64, Counts) {
    assert!(packages * files_per_package >= 2, "need at least two files");
    fs::create_dir_all(root).unwrap();
    fs::write(
        root.join("go.mod"),
        "module example.com/synthetic\n\ngo 1.22\n",
    )
    .unwrap();
    let mut lines = 0u64;
    let mut counts = [0u64; 12];
    for p in 0..packages {
        let dir = root.join(format!("pkg{p}"));
        fs::create_dir_all(&dir).unwrap();
        for f in 0..files_per_package {
            let text = unit(p, f);
            lines += text.lines().count() as u64;
            fs::write(dir.join(format!("file{f}.go")), text).unwrap();
            for (c, u) in counts.iter_mut().zip(UNIT_COUNTS) {
                *c += u;
            }
        }
    }
    (lines, counts)
}

/// Smallest `(packages, files)` layout reaching `min_lines`.
pub fn write_module_of_size(root: &Path, min_lines: u64) -> (u64, Counts) {
    let per_file = unit(0, 0).lines().count() as u64;
    let files = min_lines.div_ceil(per_file) as usize;
    let files_per_package = 40;
    let packages = files.div_ceil(files_per_package);
    write_module(root, packages, files_per_package)
}
