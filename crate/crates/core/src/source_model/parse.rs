use std::cell::RefCell;
use std::path::Path;

use regex::Regex;
use std::sync::LazyLock;
use tree_sitter::{Node, Parser, Tree};

/// A 1-based line and column. Columns count bytes, as the Go toolchain does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

/// A successfully parsed file: the concrete syntax tree and the text it covers.
///
/// Comments are kept in the tree as `comment` nodes wherever they appear.
pub struct Syntax {
    tree: Tree,
    text: String,
}

impl std::fmt::Debug for Syntax {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Syntax")
            .field("bytes", &self.text.len())
            .finish_non_exhaustive()
    }
}

impl Syntax {
    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn node_text(&self, node: Node<'_>) -> &str {
        &self.text[node.byte_range()]
    }

    pub fn position(node: Node<'_>) -> Position {
        let p = node.start_position();
        Position {
            line: p.row as u32 + 1,
            column: p.column as u32 + 1,
        }
    }

    /// Pre-order traversal. `visit` returns whether to descend into the node.
    pub fn walk<'t>(&'t self, mut visit: impl FnMut(Node<'t>) -> bool) {
        let mut cursor = self.tree.walk();
        loop {
            let descend = visit(cursor.node());
            if descend && cursor.goto_first_child() {
                continue;
            }
            loop {
                if cursor.goto_next_sibling() {
                    break;
                }
                if !cursor.goto_parent() {
                    return;
                }
            }
        }
    }

    /// Top-level declarations, skipping comments and the package clause.
    pub fn declarations(&self) -> impl Iterator<Item = Node<'_>> {
        let root = self.root();
        (0..root.named_child_count())
            .filter_map(move |i| root.named_child(i))
            .filter(|n| !matches!(n.kind(), "comment" | "package_clause"))
    }
}

/// One `.go` file of the module.
#[derive(Debug)]
pub struct SourceFile {
    /// Path relative to the module root, `/`-separated.
    pub path: String,
    /// Name from the package clause, when the clause itself is well formed.
    pub package_name: Option<String>,
    pub line_count: usize,
    /// Carries a `Code generated ... DO NOT EDIT.` header.
    pub generated: bool,
    syntax: Option<Syntax>,
    parse_error: Option<String>,
}

impl SourceFile {
    pub fn parse_ok(&self) -> bool {
        self.syntax.is_some()
    }

    pub fn parse_error(&self) -> Option<&str> {
        self.parse_error.as_deref()
    }

    pub fn syntax(&self) -> Option<&Syntax> {
        self.syntax.as_ref()
    }

    pub fn is_test_file(&self) -> bool {
        self.path.ends_with("_test.go")
    }

    fn failed(path: String, line_count: usize, message: String) -> Self {
        SourceFile {
            path,
            package_name: None,
            line_count,
            generated: false,
            syntax: None,
            parse_error: Some(message),
        }
    }
}

thread_local! {
    static PARSER: RefCell<Parser> = RefCell::new({
        let mut parser = Parser::new();
        parser
            .set_language(&tree_sitter_go::LANGUAGE.into())
            .expect("bundled Go grammar matches the tree-sitter ABI");
        parser
    });
}

static GENERATED_HEADER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^// Code generated .* DO NOT EDIT\.$").unwrap());

/// Reads and parses `root/rel`. Never fails: I/O and syntax problems are
/// recorded on the returned file.
pub fn parse_file(root: &Path, rel: &str) -> SourceFile {
    match std::fs::read(root.join(rel)) {
        Ok(bytes) => parse_source(rel, &bytes),
        Err(e) => SourceFile::failed(rel.to_string(), 0, format!("read failed: {e}")),
    }
}

pub fn parse_source(path: impl Into<String>, bytes: &[u8]) -> SourceFile {
    let path = path.into();
    let line_count = count_lines(bytes);
    let text = match String::from_utf8(bytes.to_vec()) {
        Ok(t) => t,
        Err(e) => {
            return SourceFile::failed(path, line_count, format!("invalid UTF-8: {e}"));
        }
    };
    let Some(tree) = PARSER.with(|p| p.borrow_mut().parse(&text, None)) else {
        return SourceFile::failed(path, line_count, "parser gave up".to_string());
    };

    let root = tree.root_node();
    let package = package_clause(root, &text);
    let generated = match package {
        Some((_, clause_start)) => GENERATED_HEADER.is_match(&text[..clause_start]),
        None => false,
    };
    let package_name = package.map(|(name, _)| name);

    let parse_error = if root.has_error() {
        Some(first_error(root).unwrap_or_else(|| "syntax error".to_string()))
    } else if package_name.is_none() {
        Some("missing package clause".to_string())
    } else {
        None
    };

    match parse_error {
        Some(message) => SourceFile {
            package_name,
            generated,
            ..SourceFile::failed(path, line_count, message)
        },
        None => SourceFile {
            path,
            package_name,
            line_count,
            generated,
            syntax: Some(Syntax { tree, text }),
            parse_error: None,
        },
    }
}

/// Lines in the file, counting a final unterminated line.
fn count_lines(bytes: &[u8]) -> usize {
    let newlines = bytes.iter().filter(|&&b| b == b'\n').count();
    match bytes.last() {
        Some(b'\n') | None => newlines,
        Some(_) => newlines + 1,
    }
}

/// The package name and the byte offset of the clause, if the first
/// non-comment item of the file is a well-formed package clause.
fn package_clause(root: Node<'_>, text: &str) -> Option<(String, usize)> {
    let mut cursor = root.walk();
    let first = root.children(&mut cursor).find(|n| n.kind() != "comment")?;
    if first.kind() != "package_clause" || first.has_error() {
        return None;
    }
    let mut inner = first.walk();
    let name = first
        .named_children(&mut inner)
        .find(|n| n.kind() == "package_identifier")?;
    Some((text[name.byte_range()].to_string(), first.start_byte()))
}

fn first_error(root: Node<'_>) -> Option<String> {
    let mut cursor = root.walk();
    loop {
        let node = cursor.node();
        if node.is_missing() {
            let p = Syntax::position(node);
            return Some(format!(
                "{}:{}: missing `{}`",
                p.line,
                p.column,
                node.kind()
            ));
        }
        if node.is_error() {
            let p = Syntax::position(node);
            return Some(format!("{}:{}: syntax error", p.line, p.column));
        }
        if node.has_error() && cursor.goto_first_child() {
            continue;
        }
        loop {
            if cursor.goto_next_sibling() {
                break;
            }
            if !cursor.goto_parent() {
                return None;
            }
        }
    }
}
