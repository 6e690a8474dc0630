//! DOT export for FMT models: one digraph per explicit index, worlds
//! annotated with their true atoms. Edges of a total default are suppressed
//! behind a legend note to keep graphs readable; an explicit default edge
//! set gets its own digraph.

use std::fmt::Write;

use crate::json::ModelDoc;
use crate::semantics::{EdgeSet, RelationDefault, RelationFamily, Valuation, World};

fn world_label(w: World, valuation: &Valuation) -> String {
    match valuation.get(&w) {
        Some(atoms) if !atoms.is_empty() => {
            let list: Vec<&str> = atoms.iter().map(|a| a.as_str()).collect();
            format!("{w} {{{}}}", list.join(","))
        }
        _ => w.to_string(),
    }
}

fn digraph(
    out: &mut String,
    name: &str,
    label: &str,
    worlds: &[World],
    valuation: &Valuation,
    edges: &EdgeSet,
    root: Option<World>,
) {
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  label=\"{}\";", label.replace('"', "\\\""));
    for &w in worlds {
        let shape = if root == Some(w) {
            " shape=doublecircle"
        } else {
            ""
        };
        let _ = writeln!(out, "  n{w} [label=\"{}\"{shape}];", world_label(w, valuation));
    }
    for &(a, b) in edges {
        let _ = writeln!(out, "  n{a} -> n{b};");
    }
    let _ = writeln!(out, "}}");
}

fn family_to_dot<F: Ord + Clone + std::fmt::Display>(
    family: &RelationFamily<F>,
    worlds: &[World],
    valuation: &Valuation,
    root: Option<World>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "// FMT model: one digraph per explicit relation index"
    );
    for (i, (index, edges)) in family.explicit_entries().enumerate() {
        digraph(
            &mut out,
            &format!("rel{i}"),
            &format!("index: {index}"),
            worlds,
            valuation,
            edges,
            root,
        );
    }
    match family.default_edges() {
        RelationDefault::Total => {
            let _ = writeln!(
                out,
                "// default relation: total (edges omitted; every pair of worlds is related)"
            );
        }
        RelationDefault::Edges(edges) => {
            digraph(
                &mut out,
                "default_relation",
                "default",
                worlds,
                valuation,
                edges,
                root,
            );
        }
    }
    out
}

/// Render a model as a sequence of DOT digraphs.
pub fn model_to_dot(doc: &ModelDoc) -> String {
    match doc {
        ModelDoc::Prop(m) => {
            let worlds: Vec<World> = m.frame().worlds().iter().copied().collect();
            family_to_dot(
                m.frame().relations(),
                &worlds,
                m.valuation(),
                Some(m.frame().root()),
            )
        }
        ModelDoc::Modal(m) => {
            let worlds: Vec<World> = m.frame().worlds().iter().copied().collect();
            family_to_dot(m.frame().relations(), &worlds, m.valuation(), None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::fig1_model;

    #[test]
    fn fig1_dot_lists_both_indices_and_the_legend() {
        let dot = model_to_dot(&ModelDoc::Prop(fig1_model()));
        assert_eq!(dot.matches("digraph").count(), 2);
        assert!(dot.contains("index: top -> p & q"));
        assert!(dot.contains("index: top -> q & p"));
        assert!(dot.contains("default relation: total"));
        assert!(dot.contains("n2 [label=\"2 {p}\""));
        // root is marked
        assert!(dot.contains("n0 [label=\"0\" shape=doublecircle]"));
    }
}
