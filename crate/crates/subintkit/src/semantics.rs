//! FMT frames and models, propositional and modal.
//!
//! The accessibility relation of an FMT frame is a family of binary
//! relations indexed by formulas. A finite family is represented by an
//! explicit map from index formulas to edge sets plus a default that covers
//! every other index; the constructions in this crate list finitely many
//! special indices and let the default carry the rest.
//!
//! Propositional frames carry a root that must reach every world under every
//! index, including the default; modal frames are rootless. The forcing
//! clauses differ in one place: propositional implication quantifies over
//! successors under the implication's own index, while the modal language is
//! classical at each world and only `[]A` quantifies, under the index `A`.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{validate_closed_negative, ModalFormula, PropFormula};

pub type World = u64;
pub type EdgeSet = BTreeSet<(World, World)>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("frame has no worlds")]
    NoWorlds,
    #[error("world {0} is not declared in the frame")]
    UnknownWorld(World),
    #[error("edge ({0}, {1}) of index `{2}` mentions an undeclared world")]
    BadEdge(World, World, String),
    #[error("root condition fails: missing edge ({root}, {world}) under index `{index}`")]
    RootCondition {
        root: World,
        world: World,
        index: String,
    },
    #[error("valuation mentions undeclared world {0}")]
    BadValuationWorld(World),
    #[error("frame validity would enumerate 2^{bits} valuations, cap is 2^{cap}")]
    ValuationCap { bits: usize, cap: usize },
    #[error("`{0}` is not a closed negative axiom")]
    NotClosedNegative(String),
}

/// Edge set applied to every index without an explicit entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationDefault {
    Total,
    Edges(EdgeSet),
}

/// A formula-indexed relation family: finitely many explicit entries over a
/// default. Lookup is purely extensional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationFamily<F> {
    explicit: BTreeMap<F, EdgeSet>,
    default: RelationDefault,
}

impl<F: Ord + Clone + std::fmt::Display> RelationFamily<F> {
    pub fn total() -> Self {
        RelationFamily {
            explicit: BTreeMap::new(),
            default: RelationDefault::Total,
        }
    }

    pub fn with_default(default: RelationDefault) -> Self {
        RelationFamily {
            explicit: BTreeMap::new(),
            default,
        }
    }

    pub fn insert(&mut self, index: F, edges: EdgeSet) {
        self.explicit.insert(index, edges);
    }

    pub fn default_edges(&self) -> &RelationDefault {
        &self.default
    }

    pub fn explicit_entries(&self) -> impl Iterator<Item = (&F, &EdgeSet)> {
        self.explicit.iter()
    }

    pub fn explicit_get(&self, index: &F) -> Option<&EdgeSet> {
        self.explicit.get(index)
    }

    /// Is there an `index`-edge from `x` to `y`? Callers pass declared
    /// worlds; under a `Total` default every such pair is related.
    pub fn has_edge(&self, index: &F, x: World, y: World) -> bool {
        match self.explicit.get(index) {
            Some(edges) => edges.contains(&(x, y)),
            None => match &self.default {
                RelationDefault::Total => true,
                RelationDefault::Edges(edges) => edges.contains(&(x, y)),
            },
        }
    }

    fn check_endpoints(&self, worlds: &BTreeSet<World>) -> Result<(), SemanticsError> {
        for (index, edges) in &self.explicit {
            for &(x, y) in edges {
                if !worlds.contains(&x) {
                    return Err(SemanticsError::BadEdge(x, y, index.to_string()));
                }
                if !worlds.contains(&y) {
                    return Err(SemanticsError::BadEdge(x, y, index.to_string()));
                }
            }
        }
        if let RelationDefault::Edges(edges) = &self.default {
            for &(x, y) in edges {
                if !worlds.contains(&x) || !worlds.contains(&y) {
                    return Err(SemanticsError::BadEdge(x, y, "default".to_string()));
                }
            }
        }
        Ok(())
    }
}

/// A propositional FMT frame: worlds, relation family, and a root related to
/// every world under every index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropFmtFrame {
    worlds: BTreeSet<World>,
    relations: RelationFamily<PropFormula>,
    root: World,
}

impl PropFmtFrame {
    pub fn new(
        worlds: BTreeSet<World>,
        relations: RelationFamily<PropFormula>,
        root: World,
    ) -> Result<Self, SemanticsError> {
        if worlds.is_empty() {
            return Err(SemanticsError::NoWorlds);
        }
        if !worlds.contains(&root) {
            return Err(SemanticsError::UnknownWorld(root));
        }
        relations.check_endpoints(&worlds)?;
        for (index, edges) in &relations.explicit {
            for &w in &worlds {
                if !edges.contains(&(root, w)) {
                    return Err(SemanticsError::RootCondition {
                        root,
                        world: w,
                        index: index.to_string(),
                    });
                }
            }
        }
        if let RelationDefault::Edges(edges) = &relations.default {
            for &w in &worlds {
                if !edges.contains(&(root, w)) {
                    return Err(SemanticsError::RootCondition {
                        root,
                        world: w,
                        index: "default".to_string(),
                    });
                }
            }
        }
        Ok(PropFmtFrame {
            worlds,
            relations,
            root,
        })
    }

    pub fn worlds(&self) -> &BTreeSet<World> {
        &self.worlds
    }

    pub fn root(&self) -> World {
        self.root
    }

    pub fn relations(&self) -> &RelationFamily<PropFormula> {
        &self.relations
    }

    pub fn has_edge(&self, index: &PropFormula, x: World, y: World) -> bool {
        self.relations.has_edge(index, x, y)
    }

    /// `A`-seriality: every world has an `A`-successor.
    pub fn is_serial(&self, index: &PropFormula) -> bool {
        self.worlds.iter().all(|&x| {
            self.worlds
                .iter()
                .any(|&y| self.relations.has_edge(index, x, y))
        })
    }
}

/// A modal FMT frame: worlds and a relation family, no root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalFmtFrame {
    worlds: BTreeSet<World>,
    relations: RelationFamily<ModalFormula>,
}

impl ModalFmtFrame {
    pub fn new(
        worlds: BTreeSet<World>,
        relations: RelationFamily<ModalFormula>,
    ) -> Result<Self, SemanticsError> {
        if worlds.is_empty() {
            return Err(SemanticsError::NoWorlds);
        }
        relations.check_endpoints(&worlds)?;
        Ok(ModalFmtFrame { worlds, relations })
    }

    pub fn worlds(&self) -> &BTreeSet<World> {
        &self.worlds
    }

    pub fn relations(&self) -> &RelationFamily<ModalFormula> {
        &self.relations
    }

    pub fn has_edge(&self, index: &ModalFormula, x: World, y: World) -> bool {
        self.relations.has_edge(index, x, y)
    }
}

pub type Valuation = BTreeMap<World, BTreeSet<String>>;

fn check_valuation(valuation: &Valuation, worlds: &BTreeSet<World>) -> Result<(), SemanticsError> {
    for w in valuation.keys() {
        if !worlds.contains(w) {
            return Err(SemanticsError::BadValuationWorld(*w));
        }
    }
    Ok(())
}

/// A propositional FMT model. Valuations store only the atoms that matter;
/// absent atoms are false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropFmtModel {
    frame: PropFmtFrame,
    valuation: Valuation,
}

impl PropFmtModel {
    pub fn new(frame: PropFmtFrame, valuation: Valuation) -> Result<Self, SemanticsError> {
        check_valuation(&valuation, &frame.worlds)?;
        Ok(PropFmtModel { frame, valuation })
    }

    pub fn frame(&self) -> &PropFmtFrame {
        &self.frame
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn holds_atom(&self, x: World, atom: &str) -> bool {
        self.valuation.get(&x).is_some_and(|s| s.contains(atom))
    }

    /// The forcing relation at world `x`.
    pub fn forces(&self, x: World, a: &PropFormula) -> Result<bool, SemanticsError> {
        if !self.frame.worlds.contains(&x) {
            return Err(SemanticsError::UnknownWorld(x));
        }
        Ok(self.forces_unchecked(x, a))
    }

    fn forces_unchecked(&self, x: World, a: &PropFormula) -> bool {
        match a {
            PropFormula::Atom(p) => self.holds_atom(x, p),
            PropFormula::Falsum => false,
            PropFormula::And(l, r) => {
                self.forces_unchecked(x, l) && self.forces_unchecked(x, r)
            }
            PropFormula::Or(l, r) => self.forces_unchecked(x, l) || self.forces_unchecked(x, r),
            PropFormula::Imp(..) => self.frame.worlds.iter().all(|&y| {
                !self.frame.relations.has_edge(a, x, y)
                    || !self.forces_unchecked(y, imp_left(a))
                    || self.forces_unchecked(y, imp_right(a))
            }),
        }
    }

    /// Valid in the model: forced at every world.
    pub fn valid(&self, a: &PropFormula) -> bool {
        self.frame
            .worlds
            .iter()
            .all(|&x| self.forces_unchecked(x, a))
    }
}

fn imp_left(a: &PropFormula) -> &PropFormula {
    match a {
        PropFormula::Imp(l, _) => l,
        _ => unreachable!(),
    }
}

fn imp_right(a: &PropFormula) -> &PropFormula {
    match a {
        PropFormula::Imp(_, r) => r,
        _ => unreachable!(),
    }
}

/// A modal FMT model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalFmtModel {
    frame: ModalFmtFrame,
    valuation: Valuation,
}

impl ModalFmtModel {
    pub fn new(frame: ModalFmtFrame, valuation: Valuation) -> Result<Self, SemanticsError> {
        check_valuation(&valuation, &frame.worlds)?;
        Ok(ModalFmtModel { frame, valuation })
    }

    pub fn frame(&self) -> &ModalFmtFrame {
        &self.frame
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn holds_atom(&self, x: World, atom: &str) -> bool {
        self.valuation.get(&x).is_some_and(|s| s.contains(atom))
    }

    pub fn forces(&self, x: World, a: &ModalFormula) -> Result<bool, SemanticsError> {
        if !self.frame.worlds.contains(&x) {
            return Err(SemanticsError::UnknownWorld(x));
        }
        Ok(self.forces_unchecked(x, a))
    }

    fn forces_unchecked(&self, x: World, a: &ModalFormula) -> bool {
        match a {
            ModalFormula::Atom(p) => self.holds_atom(x, p),
            ModalFormula::Falsum => false,
            ModalFormula::And(l, r) => {
                self.forces_unchecked(x, l) && self.forces_unchecked(x, r)
            }
            ModalFormula::Or(l, r) => self.forces_unchecked(x, l) || self.forces_unchecked(x, r),
            ModalFormula::Imp(l, r) => {
                !self.forces_unchecked(x, l) || self.forces_unchecked(x, r)
            }
            ModalFormula::Box(body) => self.frame.worlds.iter().all(|&y| {
                !self.frame.relations.has_edge(body, x, y) || self.forces_unchecked(y, body)
            }),
        }
    }

    pub fn valid(&self, a: &ModalFormula) -> bool {
        self.frame
            .worlds
            .iter()
            .all(|&x| self.forces_unchecked(x, a))
    }
}

// Enumerate valuations of the given atoms over the given worlds. Each bit of
// the counter decides one (atom, world) pair.
fn valuations(atoms: &[String], worlds: &[World], bits: u64) -> Valuation {
    let mut valuation = Valuation::new();
    let mut bit = 0;
    for atom in atoms {
        for &w in worlds {
            if bits >> bit & 1 == 1 {
                valuation.entry(w).or_default().insert(atom.clone());
            }
            bit += 1;
        }
    }
    valuation
}

/// Valid in every model based on the frame. Enumerates all valuations of the
/// formula's atoms over the worlds, so the work is `2^(atoms * worlds)`
/// evaluations; closed formulas collapse to a single one. Refuses when the
/// exponent would exceed `cap_bits`.
pub fn prop_frame_valid(
    frame: &PropFmtFrame,
    a: &PropFormula,
    cap_bits: usize,
) -> Result<bool, SemanticsError> {
    let atoms: Vec<String> = a.atoms().into_iter().collect();
    let worlds: Vec<World> = frame.worlds.iter().copied().collect();
    let bits = atoms.len() * worlds.len();
    if bits > cap_bits {
        return Err(SemanticsError::ValuationCap {
            bits,
            cap: cap_bits,
        });
    }
    for counter in 0..(1u64 << bits) {
        let model = PropFmtModel {
            frame: frame.clone(),
            valuation: valuations(&atoms, &worlds, counter),
        };
        if !model.valid(a) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Modal counterpart of [`prop_frame_valid`].
pub fn modal_frame_valid(
    frame: &ModalFmtFrame,
    a: &ModalFormula,
    cap_bits: usize,
) -> Result<bool, SemanticsError> {
    let atoms: Vec<String> = a.atoms().into_iter().collect();
    let worlds: Vec<World> = frame.worlds.iter().copied().collect();
    let bits = atoms.len() * worlds.len();
    if bits > cap_bits {
        return Err(SemanticsError::ValuationCap {
            bits,
            cap: cap_bits,
        });
    }
    for counter in 0..(1u64 << bits) {
        let model = ModalFmtModel {
            frame: frame.clone(),
            valuation: valuations(&atoms, &worlds, counter),
        };
        if !model.valid(a) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both sides of the frame-condition equivalence for a closed negative
/// axiom: the left component is frame validity, the right component is the
/// matching first-order condition on the relation family. The two always
/// agree; callers assert it.
pub fn check_frame_condition(
    frame: &PropFmtFrame,
    axiom: &PropFormula,
    cap_bits: usize,
) -> Result<(bool, bool), SemanticsError> {
    if !validate_closed_negative(axiom) {
        return Err(SemanticsError::NotClosedNegative(axiom.to_string()));
    }
    let lhs = prop_frame_valid(frame, axiom, cap_bits)?;
    let PropFormula::Imp(body, _) = axiom else {
        unreachable!("validated closed negative axiom is an implication")
    };
    // closed formulas force independently of the valuation
    let empty = PropFmtModel {
        frame: frame.clone(),
        valuation: Valuation::new(),
    };
    let not_top = PropFormula::neg(PropFormula::top());
    let rhs = if **body == not_top {
        // ~~top: the ~top relation is serial
        frame.is_serial(&not_top)
    } else {
        match body.as_ref() {
            PropFormula::Imp(c, d) if **d == PropFormula::Falsum => {
                // ~~C: every world has a ~C-successor forcing C
                frame.worlds.iter().all(|&x| {
                    frame.worlds.iter().any(|&y| {
                        frame.has_edge(body, x, y) && empty.forces_unchecked(y, c)
                    })
                })
            }
            PropFormula::Imp(c, d) => {
                // ~(C -> D): every world has a C->D-successor forcing C, not D
                frame.worlds.iter().all(|&x| {
                    frame.worlds.iter().any(|&y| {
                        frame.has_edge(body, x, y)
                            && empty.forces_unchecked(y, c)
                            && !empty.forces_unchecked(y, d)
                    })
                })
            }
            // ~C with C not an implication: no world forces C
            _ => frame
                .worlds
                .iter()
                .all(|&x| !empty.forces_unchecked(x, body)),
        }
    };
    Ok((lhs, rhs))
}

/// The three-world model separating VF from WF: the biconditional
/// `(top -> p & q) <-> (top -> q & p)` fails at the root.
///
/// The two special relations follow the refutation itself: world 1 reaches 2
/// under the `top -> p & q` index (so `p & q` fails there) and has no
/// successor at all under the `top -> q & p` index (so that implication
/// holds at 1 vacuously).
pub fn fig1_model() -> PropFmtModel {
    let top = PropFormula::top();
    let p = PropFormula::atom("p");
    let q = PropFormula::atom("q");
    let idx_pq = PropFormula::imp(top.clone(), PropFormula::and(p.clone(), q.clone()));
    let idx_qp = PropFormula::imp(top, PropFormula::and(q, p));

    let worlds: BTreeSet<World> = [0, 1, 2].into();
    let mut relations = RelationFamily::total();
    let le: EdgeSet = worlds
        .iter()
        .flat_map(|&x| worlds.iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| x <= y)
        .collect();
    let ne1: EdgeSet = worlds
        .iter()
        .flat_map(|&x| worlds.iter().map(move |&y| (x, y)))
        .filter(|&(x, _)| x != 1)
        .collect();
    relations.insert(idx_pq, le);
    relations.insert(idx_qp, ne1);

    let frame = PropFmtFrame::new(worlds, relations, 0).expect("fig1 frame is well-formed");
    let mut valuation = Valuation::new();
    valuation.insert(2, ["p".to_string()].into());
    PropFmtModel::new(frame, valuation).expect("fig1 valuation is well-formed")
}
