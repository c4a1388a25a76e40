//! The twelve attack-vector analyzers.
//!
//! Analyzers fall into three families by the syntax they inspect:
//! comments ([`analyze_go_generate`]), top-level declarations
//! ([`analyze_test_functions`], [`analyze_global_vars`],
//! [`analyze_init_funcs`], [`analyze_reflect`]) and call expressions (the
//! rest). Matching is purely syntactic: selector qualifiers are compared as
//! text, so an aliased import such as `import x "os/exec"` is not recognized
//! and a local variable named like a package is.
//!
//! Interface calls (E3) and assembly calls (E6) depend on collectors that see
//! more than one file: polymorphic methods are gathered over the whole module,
//! assembly symbols per package. [`analyze_module`] runs the collectors before
//! any file analyzer.

mod collectors;
mod comment;
mod declaration;
mod invocation;
mod taxonomy;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tree_sitter::Node;

pub use collectors::{
    collect_asm_functions, collect_asm_symbols, collect_polymorphic_methods, AsmFunctionSet,
    AsmSymbol, PolymorphicMethodSet, ReceiverType,
};
pub use comment::analyze_go_generate;
pub use declaration::{
    analyze_global_vars, analyze_init_funcs, analyze_reflect, analyze_test_functions,
};
pub use invocation::{
    analyze_asm_calls, analyze_cgo, analyze_constructors, analyze_exec, analyze_interface_calls,
    analyze_plugin, analyze_unsafe,
};
pub use taxonomy::{AttackVector, Phase, VectorSet};

use crate::source_model::{PackageUnit, SourceFile, Syntax};

/// Longest detail string kept on an occurrence, in characters.
pub const DETAIL_LIMIT: usize = 200;

/// One detected use of an attack vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub vector: AttackVector,
    #[serde(rename = "package")]
    pub package_name: String,
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub detail: String,
}

impl Occurrence {
    pub(crate) fn at(
        vector: AttackVector,
        file: &SourceFile,
        node: Node<'_>,
        detail: impl AsRef<str>,
    ) -> Self {
        let pos = Syntax::position(node);
        Occurrence {
            vector,
            package_name: file.package_name.clone().unwrap_or_default(),
            file: file.path.clone(),
            line: pos.line,
            column: pos.column,
            detail: clip(detail.as_ref()),
        }
    }

    /// Report order: file, then position, then taxonomy order.
    pub fn sort_key(&self) -> (&str, u32, u32, AttackVector) {
        (&self.file, self.line, self.column, self.vector)
    }
}

/// Collapses whitespace runs and truncates to [`DETAIL_LIMIT`] characters.
pub(crate) fn clip(text: &str) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    match collapsed.char_indices().nth(DETAIL_LIMIT) {
        Some((cut, _)) => collapsed[..cut].to_string(),
        None => collapsed,
    }
}

/// Result of running the selected analyzers over a module.
#[derive(Debug, Default)]
pub struct ModuleAnalysis {
    pub occurrences: Vec<Occurrence>,
    pub warnings: Vec<String>,
}

/// Runs the selected analyzers over every parsed file of the module.
///
/// `root` is only used to read the assembly files of each package.
pub fn analyze_module(
    root: &Path,
    packages: &[PackageUnit],
    selected: VectorSet,
) -> ModuleAnalysis {
    let mut warnings = Vec::new();

    // Collector barrier: both sets are complete before any file is analyzed.
    let methods = if selected.contains(AttackVector::InterfacePolymorphism) {
        collect_polymorphic_methods(packages)
    } else {
        PolymorphicMethodSet::default()
    };
    let asm_sets: Vec<AsmFunctionSet> = packages
        .iter()
        .map(|pkg| {
            if !selected.contains(AttackVector::AssemblyLinking) || pkg.asm_files.is_empty() {
                return AsmFunctionSet::default();
            }
            let (set, mut w) = collect_asm_functions(root, &pkg.asm_files);
            warnings.append(&mut w);
            set
        })
        .collect();

    let jobs: Vec<(&SourceFile, &AsmFunctionSet)> = packages
        .iter()
        .zip(&asm_sets)
        .flat_map(|(pkg, asm)| pkg.parsed_files().map(move |f| (f, asm)))
        .collect();

    let mut occurrences: Vec<Occurrence> = jobs
        .par_iter()
        .flat_map_iter(|(file, asm)| analyze_file(file, selected, &methods, asm))
        .collect();
    occurrences.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    ModuleAnalysis {
        occurrences,
        warnings,
    }
}

fn analyze_file(
    file: &SourceFile,
    selected: VectorSet,
    methods: &PolymorphicMethodSet,
    asm: &AsmFunctionSet,
) -> Vec<Occurrence> {
    let mut out = Vec::new();
    for vector in selected.iter() {
        let found = match vector {
            AttackVector::StaticCodeGeneration => analyze_go_generate(file),
            AttackVector::TestingFunctions => analyze_test_functions(file),
            AttackVector::GlobalVarInit => analyze_global_vars(file),
            AttackVector::InitHook => analyze_init_funcs(file),
            AttackVector::Constructor => analyze_constructors(file),
            AttackVector::Reflection => analyze_reflect(file),
            AttackVector::InterfacePolymorphism => analyze_interface_calls(file, methods),
            AttackVector::UnsafePointer => analyze_unsafe(file),
            AttackVector::CgoLinking => analyze_cgo(file),
            AttackVector::AssemblyLinking => analyze_asm_calls(file, asm),
            AttackVector::PluginLinking => analyze_plugin(file),
            AttackVector::ExternalExec => analyze_exec(file),
        };
        out.extend(found);
    }
    out
}

/// Import specs of a file: explicit name (if any) and unquoted path.
pub(crate) struct ImportSpec<'t> {
    pub node: Node<'t>,
    pub name: Option<&'t str>,
    pub path: &'t str,
}

pub(crate) fn imports(syntax: &Syntax) -> Vec<ImportSpec<'_>> {
    let mut specs = Vec::new();
    for decl in syntax
        .declarations()
        .filter(|d| d.kind() == "import_declaration")
    {
        let mut stack = vec![decl];
        while let Some(node) = stack.pop() {
            if node.kind() == "import_spec" {
                let name = node
                    .child_by_field_name("name")
                    .map(|n| syntax.node_text(n));
                let Some(path) = node.child_by_field_name("path") else {
                    continue;
                };
                let path = syntax
                    .node_text(path)
                    .trim_matches(|c| c == '"' || c == '`');
                specs.push(ImportSpec { node, name, path });
                continue;
            }
            let mut cursor = node.walk();
            let children: Vec<_> = node.named_children(&mut cursor).collect();
            stack.extend(children.into_iter().rev());
        }
    }
    specs
}
