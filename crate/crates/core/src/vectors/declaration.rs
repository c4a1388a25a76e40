use tree_sitter::Node;

use super::{imports, AttackVector, Occurrence};
use crate::source_model::{SourceFile, Syntax};

const TEST_PREFIXES: [&str; 4] = ["Test", "Benchmark", "Example", "Fuzz"];

/// P2: top-level functions whose name starts with a `go test` prefix. The
/// rule is purely on the name; `Testify` in a non-test file counts too.
pub fn analyze_test_functions(file: &SourceFile) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    let marker = if file.is_test_file() {
        "[test-file]"
    } else {
        "[non-test-file]"
    };
    function_declarations(syntax)
        .filter(|(_, name)| TEST_PREFIXES.iter().any(|p| name.starts_with(p)))
        .map(|(decl, name)| {
            Occurrence::at(
                AttackVector::TestingFunctions,
                file,
                decl,
                format!("{name} {marker}"),
            )
        })
        .collect()
}

/// I2: every `func init()`. Methods named `init` are not initializers.
pub fn analyze_init_funcs(file: &SourceFile) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    function_declarations(syntax)
        .filter(|(_, name)| *name == "init")
        .map(|(decl, _)| Occurrence::at(AttackVector::InitHook, file, decl, "init"))
        .collect()
}

/// Receiver-less function declarations with their names.
fn function_declarations(syntax: &Syntax) -> impl Iterator<Item = (Node<'_>, &str)> {
    syntax
        .declarations()
        .filter(|d| d.kind() == "function_declaration")
        .filter_map(|d| Some((d, syntax.node_text(d.child_by_field_name("name")?))))
}

/// I1: one occurrence per package-level `var` spec whose initializer makes
/// a call. Bodies of function literals are not searched unless the literal
/// itself is invoked, since an uncalled literal runs nothing at init time.
pub fn analyze_global_vars(file: &SourceFile) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for decl in syntax
        .declarations()
        .filter(|d| d.kind() == "var_declaration")
    {
        for spec in var_specs(decl) {
            let Some(value) = spec.child_by_field_name("value") else {
                continue;
            };
            if !contains_call(value) {
                continue;
            }
            let mut cursor = spec.walk();
            let names: Vec<&str> = spec
                .children_by_field_name("name", &mut cursor)
                .map(|n| syntax.node_text(n))
                .collect();
            out.push(Occurrence::at(
                AttackVector::GlobalVarInit,
                file,
                spec,
                names.join(", "),
            ));
        }
    }
    out
}

fn var_specs(decl: Node<'_>) -> Vec<Node<'_>> {
    let mut specs = Vec::new();
    let mut cursor = decl.walk();
    for child in decl.named_children(&mut cursor) {
        match child.kind() {
            "var_spec" => specs.push(child),
            "var_spec_list" => {
                let mut inner = child.walk();
                specs.extend(
                    child
                        .named_children(&mut inner)
                        .filter(|n| n.kind() == "var_spec"),
                );
            }
            _ => {}
        }
    }
    specs
}

fn contains_call(node: Node<'_>) -> bool {
    if node.kind() == "call_expression" {
        return true;
    }
    if node.kind() == "func_literal" {
        return false;
    }
    let mut cursor = node.walk();
    let found = node.named_children(&mut cursor).any(contains_call);
    found
}

/// E2: imports whose path is exactly `reflect`, whatever their local name.
pub fn analyze_reflect(file: &SourceFile) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    imports(syntax)
        .into_iter()
        .filter(|spec| spec.path == "reflect")
        .map(|spec| Occurrence::at(AttackVector::Reflection, file, spec.node, "import reflect"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_model::parse_source;

    fn parse(path: &str, src: &str) -> SourceFile {
        parse_source(path, src.as_bytes())
    }

    #[test]
    fn canonical_test_function() {
        let f = parse(
            "auth_test.go",
            "package auth\n\nimport \"testing\"\n\nfunc TestLogin(t *testing.T) {}\n",
        );
        let occ = analyze_test_functions(&f);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].detail, "TestLogin [test-file]");
        assert_eq!((occ[0].line, occ[0].column), (5, 1));
    }

    #[test]
    fn prefix_rule_is_syntactic() {
        let f = parse("x.go", "package x\n\nfunc Testify() {}\n");
        let occ = analyze_test_functions(&f);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].detail, "Testify [non-test-file]");
    }

    #[test]
    fn four_prefixes_and_no_methods() {
        let src = "package x\n\nfunc TestA() {}\nfunc BenchmarkA() {}\nfunc ExampleA() {}\nfunc FuzzA() {}\nfunc helper() {}\nfunc (s S) TestMethod() {}\n";
        let decls = src
            .lines()
            .filter(|l| {
                ["func Test", "func Benchmark", "func Example", "func Fuzz"]
                    .iter()
                    .any(|p| l.starts_with(p))
            })
            .count();
        assert_eq!(decls, 4);
        assert_eq!(
            analyze_test_functions(&parse("x_test.go", src)).len(),
            decls
        );
    }

    #[test]
    fn init_functions() {
        let one = parse("a.go", "package a\n\nfunc init() {}\n");
        assert_eq!(analyze_init_funcs(&one).len(), 1);
        let two = parse("a.go", "package a\n\nfunc init() {}\n\nfunc init() {}\n");
        let occ = analyze_init_funcs(&two);
        assert_eq!(occ.iter().map(|o| o.line).collect::<Vec<_>>(), [3, 5]);
        let method = parse(
            "a.go",
            "package a\n\ntype S struct{}\n\nfunc (s S) init() {}\n",
        );
        assert!(analyze_init_funcs(&method).is_empty());
    }

    #[test]
    fn global_var_with_regular_and_anonymous_calls() {
        let src = "package main\n\nvar a = compute()\n\nvar b = func() int {\n\treturn 1\n}()\n\nvar c = 5\n";
        let occ = analyze_global_vars(&parse("x.go", src));
        let details: Vec<_> = occ.iter().map(|o| o.detail.as_str()).collect();
        assert_eq!(details, ["a", "b"]);
        assert_eq!((occ[0].line, occ[0].column), (3, 5));
    }

    #[test]
    fn literal_initializer_runs_nothing() {
        assert!(analyze_global_vars(&parse("x.go", "package main\n\nvar x = 5\n")).is_empty());
        let uncalled = "package main\n\nvar h = func() { run() }\nvar t = T{Name: \"x\"}\n";
        assert!(analyze_global_vars(&parse("x.go", uncalled)).is_empty());
    }

    #[test]
    fn one_occurrence_per_spec() {
        let occ = analyze_global_vars(&parse("x.go", "package main\n\nvar a, b = f(), g()\n"));
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].detail, "a, b");
        let grouped = "package main\n\nvar (\n\tx = f()\n\ty int\n\tz = []int{g()}\n)\n";
        let occ = analyze_global_vars(&parse("x.go", grouped));
        assert_eq!(
            occ.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>(),
            ["x", "z"]
        );
    }

    #[test]
    fn locals_and_constants_are_ignored() {
        let src =
            "package main\n\nconst k = len(\"abc\")\n\nfunc main() {\n\tvar v = f()\n\t_ = v\n}\n";
        assert!(analyze_global_vars(&parse("x.go", src)).is_empty());
    }

    #[test]
    fn reflect_imports_by_path() {
        let src = "package x\n\nimport (\n\t\"fmt\"\n\tr \"reflect\"\n)\n";
        let occ = analyze_reflect(&parse("x.go", src));
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].detail, "import reflect");
        assert_eq!((occ[0].line, occ[0].column), (5, 2));
        let other = "package x\n\nimport \"reflection-utils/reflect2\"\n";
        assert!(analyze_reflect(&parse("x.go", other)).is_empty());
    }
}
