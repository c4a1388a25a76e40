use std::collections::HashSet;

use tree_sitter::Node;

use super::{imports, AsmFunctionSet, AttackVector, Occurrence, PolymorphicMethodSet};
use crate::source_model::{SourceFile, Syntax};

/// Qualified callees that spawn processes.
const EXEC_CALLEES: [(&str, &str); 5] = [
    ("exec", "Command"),
    ("exec", "CommandContext"),
    ("syscall", "ForkExec"),
    ("syscall", "Exec"),
    ("os", "StartProcess"),
];

/// The callee of a call expression.
enum Callee<'t> {
    Ident(&'t str),
    Selector {
        /// Operand text when the operand is a plain identifier.
        qualifier: Option<&'t str>,
        field: &'t str,
    },
    Other,
}

struct Call<'t> {
    node: Node<'t>,
    function: Node<'t>,
    callee: Callee<'t>,
}

fn for_each_call<'t>(syntax: &'t Syntax, mut visit: impl FnMut(Call<'t>)) {
    syntax.walk(|node| {
        if node.kind() == "call_expression" {
            if let Some(function) = node.child_by_field_name("function") {
                let callee = classify(syntax, function);
                visit(Call {
                    node,
                    function,
                    callee,
                });
            }
        }
        true
    });
}

fn classify<'t>(syntax: &'t Syntax, function: Node<'t>) -> Callee<'t> {
    match function.kind() {
        "identifier" => Callee::Ident(syntax.node_text(function)),
        "selector_expression" => {
            let (Some(operand), Some(field)) = (
                function.child_by_field_name("operand"),
                function.child_by_field_name("field"),
            ) else {
                return Callee::Other;
            };
            let qualifier = (operand.kind() == "identifier").then(|| syntax.node_text(operand));
            Callee::Selector {
                qualifier,
                field: syntax.node_text(field),
            }
        }
        _ => Callee::Other,
    }
}

fn is_constructor_name(name: &str) -> bool {
    match name.strip_prefix("New") {
        Some("") => true,
        Some(rest) => rest.chars().next().is_some_and(char::is_uppercase),
        None => false,
    }
}

/// E1: calls to `New` or `New` + uppercase suffix, bare or qualified.
pub fn analyze_constructors(file: &SourceFile) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for_each_call(syntax, |call| {
        let name = match call.callee {
            Callee::Ident(name) => name,
            Callee::Selector { field, .. } => field,
            Callee::Other => return,
        };
        if is_constructor_name(name) {
            out.push(Occurrence::at(
                AttackVector::Constructor,
                file,
                call.node,
                syntax.node_text(call.function),
            ));
        }
    });
    out
}

/// Names a file can use to qualify package-level identifiers: explicit
/// import names plus guesses for unnamed imports (`gopkg.in/yaml.v3` ->
/// `yaml`, `github.com/x/go-redis/v9` -> `redis`).
fn import_names(syntax: &Syntax) -> HashSet<&str> {
    let mut names = HashSet::new();
    for spec in imports(syntax) {
        match spec.name {
            Some("." | "_") => {}
            Some(name) => {
                names.insert(name);
            }
            None => {
                let mut segments = spec.path.rsplit('/');
                let mut last = segments.next().unwrap_or(spec.path);
                if is_major_version(last) {
                    last = segments.next().unwrap_or(last);
                }
                names.insert(last);
                let mut guess = last;
                if let Some((stem, suffix)) = guess.rsplit_once('.') {
                    if is_major_version(suffix) || suffix == "go" {
                        guess = stem;
                    }
                }
                guess = guess.strip_prefix("go-").unwrap_or(guess);
                guess = guess.strip_suffix("-go").unwrap_or(guess);
                names.insert(guess);
            }
        }
    }
    names
}

fn is_major_version(s: &str) -> bool {
    s.len() > 1 && s.starts_with('v') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// E3: `recv.M(...)` where `M` is a polymorphic method and `recv` is not an
/// imported package name of this file.
pub fn analyze_interface_calls(
    file: &SourceFile,
    methods: &PolymorphicMethodSet,
) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    if methods.is_empty() {
        return Vec::new();
    }
    let packages = import_names(syntax);
    let mut out = Vec::new();
    for_each_call(syntax, |call| {
        if let Callee::Selector { qualifier, field } = call.callee {
            if !methods.contains(field) || qualifier.is_some_and(|q| packages.contains(q)) {
                return;
            }
            out.push(Occurrence::at(
                AttackVector::InterfacePolymorphism,
                file,
                call.node,
                syntax.node_text(call.function),
            ));
        }
    });
    out
}

/// E4: `unsafe.X(...)`, which covers `unsafe.Pointer` conversions.
pub fn analyze_unsafe(file: &SourceFile) -> Vec<Occurrence> {
    qualified_calls(
        file,
        AttackVector::UnsafePointer,
        |q, _| q == "unsafe",
        |_, _, f, _| f.to_string(),
    )
}

/// E5: `C.f(...)` in files that import the cgo pseudo-package.
pub fn analyze_cgo(file: &SourceFile) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    if !imports(syntax).iter().any(|s| s.path == "C") {
        return Vec::new();
    }
    qualified_calls(
        file,
        AttackVector::CgoLinking,
        |q, _| q == "C",
        |_, _, f, _| format!("C.{f}"),
    )
}

/// E7: `plugin.Open(path)`; the detail is the path argument.
pub fn analyze_plugin(file: &SourceFile) -> Vec<Occurrence> {
    qualified_calls(
        file,
        AttackVector::PluginLinking,
        |q, f| q == "plugin" && f == "Open",
        |syntax, _, _, call| {
            call.child_by_field_name("arguments")
                .map(|args| {
                    let text = syntax.node_text(args);
                    let inner = text.strip_prefix('(').unwrap_or(text);
                    inner.strip_suffix(')').unwrap_or(inner).trim().to_string()
                })
                .unwrap_or_default()
        },
    )
}

/// E8: process execution through the qualified callees in [`EXEC_CALLEES`].
pub fn analyze_exec(file: &SourceFile) -> Vec<Occurrence> {
    qualified_calls(
        file,
        AttackVector::ExternalExec,
        |q, f| EXEC_CALLEES.contains(&(q, f)),
        |_, q, f, _| format!("{q}.{f}"),
    )
}

/// Calls `q.f(...)` with `q` a plain identifier accepted by `matches`.
fn qualified_calls(
    file: &SourceFile,
    vector: AttackVector,
    matches: impl Fn(&str, &str) -> bool,
    detail: impl Fn(&Syntax, &str, &str, Node<'_>) -> String,
) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for_each_call(syntax, |call| {
        if let Callee::Selector {
            qualifier: Some(q),
            field,
        } = call.callee
        {
            if matches(q, field) {
                out.push(Occurrence::at(
                    vector,
                    file,
                    call.node,
                    detail(syntax, q, field, call.node),
                ));
            }
        }
    });
    out
}

/// E6: bare calls to functions defined in the package's assembly.
pub fn analyze_asm_calls(file: &SourceFile, asm: &AsmFunctionSet) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    if asm.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for_each_call(syntax, |call| {
        if let Callee::Ident(name) = call.callee {
            if let Some(symbol) = asm.get(name) {
                out.push(Occurrence::at(
                    AttackVector::AssemblyLinking,
                    file,
                    call.node,
                    format!("{name} [{}]", symbol.file),
                ));
            }
        }
    });
    out
}
