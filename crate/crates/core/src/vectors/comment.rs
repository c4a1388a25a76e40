use super::{AttackVector, Occurrence};
use crate::source_model::SourceFile;

const DIRECTIVE: &str = "//go:generate";

/// P1: one occurrence per line comment starting exactly with `//go:generate`.
pub fn analyze_go_generate(file: &SourceFile) -> Vec<Occurrence> {
    let Some(syntax) = file.syntax() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    syntax.walk(|node| {
        if node.kind() == "comment" {
            let text = syntax.node_text(node);
            if text.starts_with(DIRECTIVE) {
                out.push(Occurrence::at(
                    AttackVector::StaticCodeGeneration,
                    file,
                    node,
                    text.trim_end(),
                ));
            }
        }
        true
    });
    out
}
