//! Model transformations between propositional and modal FMT semantics.
//!
//! Going up, an implication index `C -> D` becomes the box-body index
//! `C^c -> D^c` with the same edges; forcing of `A` then agrees with forcing
//! of the translation of `A` at every world. Going down, a fresh root is
//! added that reaches everything, old worlds keep the edges of the matching
//! translated index among themselves and never reach the root; forcing
//! agrees at the old worlds. Both directions are exact when the source
//! default is total, which is the only default the constructions in this
//! crate produce; a carried-over explicit default still gives agreement for
//! every formula whose implications are explicitly indexed.

use std::collections::BTreeSet;

use crate::formula::{corsi, ModalFormula, PropFormula};
use crate::semantics::{
    EdgeSet, ModalFmtFrame, ModalFmtModel, PropFmtFrame, PropFmtModel, RelationDefault,
    RelationFamily, Valuation, World,
};

/// The unique `A` with `corsi(A) = b`, when `b` is in the image of the
/// translation. Bare implications are never in the image (the translation
/// boxes them), and a box is in the image only over an implication whose
/// halves are.
pub fn inverse_corsi(b: &ModalFormula) -> Option<PropFormula> {
    match b {
        ModalFormula::Atom(p) => Some(PropFormula::Atom(p.clone())),
        ModalFormula::Falsum => Some(PropFormula::Falsum),
        ModalFormula::And(l, r) => Some(PropFormula::and(inverse_corsi(l)?, inverse_corsi(r)?)),
        ModalFormula::Or(l, r) => Some(PropFormula::or(inverse_corsi(l)?, inverse_corsi(r)?)),
        ModalFormula::Imp(..) => None,
        ModalFormula::Box(inner) => match inner.as_ref() {
            ModalFormula::Imp(l, r) => {
                Some(PropFormula::imp(inverse_corsi(l)?, inverse_corsi(r)?))
            }
            _ => None,
        },
    }
}

// A modal index consulted by boxes of translated formulas: `C^c -> D^c`.
fn image_implication(index: &ModalFormula) -> Option<PropFormula> {
    match index {
        ModalFormula::Imp(l, r) => Some(PropFormula::imp(inverse_corsi(l)?, inverse_corsi(r)?)),
        _ => None,
    }
}

/// Lift a propositional model to a modal one over the same worlds and
/// valuation: each explicit implication index moves to its translated
/// box-body index, edges unchanged; the default carries over.
pub fn prop_to_modal(m: &PropFmtModel) -> ModalFmtModel {
    let frame = m.frame();
    let mut relations = RelationFamily::with_default(frame.relations().default_edges().clone());
    for (index, edges) in frame.relations().explicit_entries() {
        let PropFormula::Imp(c, d) = index else {
            // non-implication indices are never consulted by propositional
            // forcing, so they carry no information worth transporting
            continue;
        };
        let modal_index = ModalFormula::imp(corsi(c), corsi(d));
        assert!(
            relations.explicit_get(&modal_index).is_none(),
            "corsi is injective, translated indices cannot collide"
        );
        relations.insert(modal_index, edges.clone());
    }
    let modal_frame = ModalFmtFrame::new(frame.worlds().clone(), relations)
        .expect("worlds and edges are copied from a valid frame");
    ModalFmtModel::new(modal_frame, m.valuation().clone())
        .expect("valuation is copied from a valid model")
}

/// Lower a modal model to a propositional one by adjoining a fresh root
/// that reaches every world under every index and forces every atom of
/// `root_atoms`. Old worlds keep the translated edges among themselves and
/// never reach the root.
pub fn modal_to_prop(m: &ModalFmtModel, root_atoms: &BTreeSet<String>) -> PropFmtModel {
    let frame = m.frame();
    let old: Vec<World> = frame.worlds().iter().copied().collect();
    let root = old.iter().max().unwrap() + 1;
    let mut worlds: BTreeSet<World> = frame.worlds().clone();
    worlds.insert(root);

    let root_edges: EdgeSet = worlds.iter().map(|&w| (root, w)).collect();
    let old_square: EdgeSet = old
        .iter()
        .flat_map(|&x| old.iter().map(move |&y| (x, y)))
        .collect();

    let default: EdgeSet = root_edges.union(&old_square).copied().collect();
    let mut relations = RelationFamily::with_default(RelationDefault::Edges(default));
    for (index, edges) in frame.relations().explicit_entries() {
        let Some(prop_index) = image_implication(index) else {
            // indices outside the image are not consulted by translated
            // formulas, and propositional forcing only consults implications
            continue;
        };
        let transferred: EdgeSet = root_edges
            .iter()
            .copied()
            .chain(edges.iter().copied())
            .collect();
        relations.insert(prop_index, transferred);
    }

    let mut valuation: Valuation = m.valuation().clone();
    if !root_atoms.is_empty() {
        valuation.insert(root, root_atoms.clone());
    }
    let prop_frame =
        PropFmtFrame::new(worlds, relations, root).expect("the fresh root reaches every world");
    PropFmtModel::new(prop_frame, valuation).expect("old valuation keys remain declared")
}

/// One row of a forcing-agreement table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferRow {
    pub world: World,
    pub formula: PropFormula,
    pub source: bool,
    pub target: bool,
}

/// Per-world, per-formula agreement between a model and its transfer.
#[derive(Debug, Clone, Default)]
pub struct TransferReport {
    pub rows: Vec<TransferRow>,
}

impl TransferReport {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| r.source != r.target).count()
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements() == 0
    }
}

/// Compare forcing of each formula against its translation in the lifted
/// model, at every world.
pub fn check_prop_to_modal(
    source: &PropFmtModel,
    target: &ModalFmtModel,
    formulas: &[PropFormula],
) -> TransferReport {
    let mut report = TransferReport::default();
    for formula in formulas {
        let translated = corsi(formula);
        for &x in source.frame().worlds() {
            report.rows.push(TransferRow {
                world: x,
                formula: formula.clone(),
                source: source.forces(x, formula).expect("declared world"),
                target: target.forces(x, &translated).expect("same world set"),
            });
        }
    }
    report
}

/// Compare forcing of each translated formula against the lowered model, at
/// every old world (the fresh root has no modal counterpart).
pub fn check_modal_to_prop(
    source: &ModalFmtModel,
    target: &PropFmtModel,
    formulas: &[PropFormula],
) -> TransferReport {
    let mut report = TransferReport::default();
    for formula in formulas {
        let translated = corsi(formula);
        for &x in source.frame().worlds() {
            report.rows.push(TransferRow {
                world: x,
                formula: formula.clone(),
                source: source.forces(x, &translated).expect("declared world"),
                target: target.forces(x, formula).expect("old worlds are kept"),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_modal, parse_prop};
    use crate::semantics::fig1_model;

    fn f(s: &str) -> PropFormula {
        parse_prop(s).unwrap()
    }

    #[test]
    fn inverse_recognizes_the_image() {
        assert_eq!(
            inverse_corsi(&parse_modal("[](p -> q)").unwrap()),
            Some(f("p -> q"))
        );
        assert_eq!(inverse_corsi(&parse_modal("p & q").unwrap()), Some(f("p & q")));
        assert_eq!(inverse_corsi(&parse_modal("[]p").unwrap()), None);
        assert_eq!(inverse_corsi(&parse_modal("p -> q").unwrap()), None);
        // round trip on translations
        for text in ["p", "~~top", "(p -> q) & r", "p | ~p"] {
            let a = f(text);
            assert_eq!(inverse_corsi(&corsi(&a)), Some(a));
        }
    }

    #[test]
    fn lifted_fig1_carries_the_translated_index() {
        let m = fig1_model();
        let lifted = prop_to_modal(&m);
        let index = ModalFormula::imp(corsi(&f("top")), corsi(&f("p & q")));
        let edges = lifted.frame().relations().explicit_get(&index).unwrap();
        assert_eq!(
            edges,
            m.frame()
                .relations()
                .explicit_get(&f("top -> (p & q)"))
                .unwrap()
        );
    }

    #[test]
    fn lifting_preserves_forcing_on_fig1() {
        let m = fig1_model();
        let lifted = prop_to_modal(&m);
        let formulas: Vec<PropFormula> = [
            "p",
            "q",
            "top -> p & q",
            "top -> q & p",
            "(top -> p & q) <-> (top -> q & p)",
            "p | ~p",
            "~~top",
        ]
        .iter()
        .map(|s| f(s))
        .collect();
        let report = check_prop_to_modal(&m, &lifted, &formulas);
        assert!(report.all_agree());
    }

    #[test]
    fn lifted_models_validate_the_neg2k_axioms() {
        let m = fig1_model();
        let lifted = prop_to_modal(&m);
        for k in 0..3 {
            assert!(
                lifted.valid(&crate::formula::neg2k_axiom(k)),
                "neg2k axiom {k} must hold in every lifted model"
            );
        }
    }

    #[test]
    fn lowering_preserves_forcing_at_old_worlds() {
        // a small modal model with an explicit translated index
        let worlds: BTreeSet<World> = [0, 1].into();
        let mut relations = RelationFamily::total();
        relations.insert(
            ModalFormula::imp(corsi(&f("p")), corsi(&f("q"))),
            [(0, 0), (1, 1)].into(),
        );
        let frame = ModalFmtFrame::new(worlds, relations).unwrap();
        let mut valuation = Valuation::new();
        valuation.insert(0, ["p".to_string()].into());
        valuation.insert(1, ["q".to_string()].into());
        let m = ModalFmtModel::new(frame, valuation).unwrap();

        let atoms: BTreeSet<String> = ["p".to_string(), "q".to_string()].into();
        let lowered = modal_to_prop(&m, &atoms);
        assert_eq!(lowered.frame().root(), 2);
        let formulas: Vec<PropFormula> = ["p", "q", "p -> q", "~p", "p & (p -> q)"]
            .iter()
            .map(|s| f(s))
            .collect();
        let report = check_modal_to_prop(&m, &lowered, &formulas);
        assert!(report.all_agree());
    }

    #[test]
    fn lowering_keeps_closed_negative_validity() {
        // a modal model validating the translated ~~top axiom: no world of
        // the lowered model may force ~top, not even the fresh root
        let axiom = f("~~top");
        let star = crate::formula::x_star(&[axiom]).unwrap();
        let worlds: BTreeSet<World> = [0].into();
        let frame = ModalFmtFrame::new(worlds, RelationFamily::total()).unwrap();
        let m = ModalFmtModel::new(frame, Valuation::new()).unwrap();
        assert!(m.valid(&star[0]));
        let lowered = modal_to_prop(&m, &BTreeSet::new());
        for &x in lowered.frame().worlds() {
            assert!(!lowered.forces(x, &f("~top")).unwrap());
        }
    }

    #[test]
    fn old_worlds_do_not_reach_the_root() {
        let worlds: BTreeSet<World> = [0].into();
        let frame = ModalFmtFrame::new(worlds, RelationFamily::total()).unwrap();
        let m = ModalFmtModel::new(frame, Valuation::new()).unwrap();
        let lowered = modal_to_prop(&m, &BTreeSet::new());
        let root = lowered.frame().root();
        assert!(!lowered.frame().has_edge(&f("p -> q"), 0, root));
        assert!(lowered.frame().has_edge(&f("p -> q"), root, 0));
        assert!(lowered.frame().has_edge(&f("p -> q"), root, root));
    }
}
