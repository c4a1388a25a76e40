use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use tree_sitter::Node;

use crate::source_model::{PackageUnit, Syntax};

/// A receiver base type, qualified by the directory of its package so that
/// equally named types of different packages stay distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReceiverType {
    pub package_dir: String,
    pub name: String,
}

/// Method names declared on two or more distinct receiver base types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolymorphicMethodSet {
    methods: BTreeMap<String, BTreeSet<ReceiverType>>,
}

impl PolymorphicMethodSet {
    pub fn contains(&self, method: &str) -> bool {
        self.methods.contains_key(method)
    }

    pub fn receivers(&self, method: &str) -> Option<&BTreeSet<ReceiverType>> {
        self.methods.get(method)
    }

    pub fn len(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<ReceiverType>)> {
        self.methods.iter().map(|(k, v)| (k.as_str(), v))
    }
}

pub fn collect_polymorphic_methods(packages: &[PackageUnit]) -> PolymorphicMethodSet {
    let mut all: BTreeMap<String, BTreeSet<ReceiverType>> = BTreeMap::new();
    for pkg in packages {
        for file in pkg.parsed_files() {
            let Some(syntax) = file.syntax() else {
                continue;
            };
            for decl in syntax.declarations() {
                if decl.kind() != "method_declaration" {
                    continue;
                }
                let Some(name) = decl.child_by_field_name("name") else {
                    continue;
                };
                let Some(receiver) = receiver_base_type(syntax, decl) else {
                    continue;
                };
                all.entry(syntax.node_text(name).to_string())
                    .or_default()
                    .insert(ReceiverType {
                        package_dir: pkg.import_dir.clone(),
                        name: receiver.to_string(),
                    });
            }
        }
    }
    all.retain(|_, receivers| receivers.len() >= 2);
    PolymorphicMethodSet { methods: all }
}

/// `(s *T[K])` -> `T`: pointer, generic and parenthesized wrappers removed.
fn receiver_base_type<'t>(syntax: &'t Syntax, method: Node<'t>) -> Option<&'t str> {
    let params = method.child_by_field_name("receiver")?;
    let mut cursor = params.walk();
    let param = params
        .named_children(&mut cursor)
        .find(|n| n.kind() == "parameter_declaration")?;
    let mut ty = param.child_by_field_name("type")?;
    loop {
        ty = match ty.kind() {
            "pointer_type" | "parenthesized_type" => ty.named_child(0)?,
            "generic_type" => ty.child_by_field_name("type")?,
            "type_identifier" => return Some(syntax.node_text(ty)),
            _ => return None,
        };
    }
}

/// Where an assembly function is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsmSymbol {
    pub file: String,
    pub line: u32,
}

/// Package-level functions defined by `TEXT` directives in `.s` files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AsmFunctionSet {
    symbols: BTreeMap<String, AsmSymbol>,
}

impl AsmFunctionSet {
    pub fn get(&self, symbol: &str) -> Option<&AsmSymbol> {
        self.symbols.get(symbol)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &AsmSymbol)> {
        self.symbols.iter().map(|(k, v)| (k.as_str(), v))
    }
}

// TEXT ·Add(SB), NOSPLIT, $0-24   (U+00B7 or the older U+2219 prefix)
static TEXT_DIRECTIVE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*TEXT\s+[\x{00B7}\x{2219}]?([\p{L}_][\p{L}\p{Nd}_]*)(?:<[^>]*>)?\(SB\)")
        .unwrap()
});

/// Reads every `.s` file (paths relative to `root`). Unreadable files are
/// skipped with a warning. When a symbol is defined in several files (one
/// per architecture, typically) the first file in path order is kept.
pub fn collect_asm_functions(root: &Path, asm_files: &[String]) -> (AsmFunctionSet, Vec<String>) {
    let mut set = AsmFunctionSet::default();
    let mut warnings = Vec::new();
    for rel in asm_files {
        match std::fs::read(root.join(rel)) {
            Ok(bytes) => collect_asm_symbols(rel, &String::from_utf8_lossy(&bytes), &mut set),
            Err(e) => warnings.push(format!("{rel}: skipping assembly file: {e}")),
        }
    }
    (set, warnings)
}

pub fn collect_asm_symbols(file: &str, text: &str, set: &mut AsmFunctionSet) {
    for (i, line) in text.lines().enumerate() {
        if let Some(caps) = TEXT_DIRECTIVE.captures(line) {
            set.symbols
                .entry(caps[1].to_string())
                .or_insert_with(|| AsmSymbol {
                    file: file.to_string(),
                    line: i as u32 + 1,
                });
        }
    }
}
