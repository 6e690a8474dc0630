//! Decision procedure for VF and its closed negative extensions, tableau
//! countermodels, the slash relation, and the disjunction-property splitter.
//!
//! Provability is decided through the modal companion: `VF+X` proves `A`
//! exactly when `N+X*` proves the Corsi translation of `A`. That verdict is
//! in turn the consistency oracle for the tableau construction, which
//! rebuilds the canonical finite countermodel out of all saturated
//! consistent tableaux over the subformula closure.

use std::collections::BTreeSet;

use crate::caps::Caps;
use crate::formula::{corsi, sub_x, validate_closed_negative, x_star, FormulaError, PropFormula};
use crate::nec::{DecideError, NSession};
use crate::semantics::{
    prop_frame_valid, PropFmtFrame, PropFmtModel, RelationFamily, Valuation, World,
};

/// Left fold of a set in its canonical order; the empty conjunction is `top`.
pub fn big_and(set: &BTreeSet<PropFormula>) -> PropFormula {
    let mut iter = set.iter().cloned();
    match iter.next() {
        None => PropFormula::top(),
        Some(first) => iter.fold(first, PropFormula::and),
    }
}

/// Left fold of a set in its canonical order; the empty disjunction is `bot`.
pub fn big_or(set: &BTreeSet<PropFormula>) -> PropFormula {
    let mut iter = set.iter().cloned();
    match iter.next() {
        None => PropFormula::Falsum,
        Some(first) => iter.fold(first, PropFormula::or),
    }
}

/// A pair of finite formula sets over the subformula closure. Consistent
/// when the logic does not prove `/\gamma -> \/delta`; saturated when the
/// two sides exhaust the closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    pub gamma: BTreeSet<PropFormula>,
    pub delta: BTreeSet<PropFormula>,
}

impl Tableau {
    pub fn empty() -> Self {
        Tableau {
            gamma: BTreeSet::new(),
            delta: BTreeSet::new(),
        }
    }

    pub fn refuting(a: &PropFormula) -> Self {
        Tableau {
            gamma: BTreeSet::new(),
            delta: [a.clone()].into(),
        }
    }

    /// The formula whose unprovability is this tableau's consistency.
    pub fn implication(&self) -> PropFormula {
        PropFormula::imp(big_and(&self.gamma), big_or(&self.delta))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TableauError {
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("input tableau is inconsistent")]
    InconsistentInput,
    #[error("tableau mentions `{0}`, which is outside the subformula closure")]
    OutOfScope(PropFormula),
}

/// Verdict of the disjunction-property splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpSplit {
    Left,
    Right,
    NotProvable,
}

/// One decision session for a fixed set of closed negative axioms.
#[derive(Debug, Clone)]
pub struct VfSession {
    axioms: Vec<PropFormula>,
    modal: NSession,
    caps: Caps,
}

impl VfSession {
    /// Requires every axiom to be a closed negative axiom.
    pub fn new(axioms: Vec<PropFormula>, caps: Caps) -> Result<Self, FormulaError> {
        let star = x_star(&axioms)?;
        let modal = NSession::new(star, caps).expect("x-star output is closed");
        Ok(VfSession {
            axioms,
            modal,
            caps,
        })
    }

    pub fn axioms(&self) -> &[PropFormula] {
        &self.axioms
    }

    /// The companion session over N+X*.
    pub fn modal_session(&mut self) -> &mut NSession {
        &mut self.modal
    }

    /// Is `a` a theorem of VF+X? Decided on the modal companion.
    pub fn decide(&mut self, a: &PropFormula) -> Result<bool, DecideError> {
        self.modal.decide(&corsi(a))
    }

    pub fn closure(&self, a: &PropFormula) -> BTreeSet<PropFormula> {
        sub_x(a, &self.axioms)
    }

    pub fn is_consistent_tableau(&mut self, t: &Tableau) -> Result<bool, DecideError> {
        Ok(!self.decide(&t.implication())?)
    }

    /// Lindenbaum pass: walk the closure in canonical order, adding each
    /// formula to gamma when that stays consistent and to delta otherwise.
    /// The result is saturated, consistent, and extends the input.
    pub fn saturate(&mut self, t: &Tableau, a: &PropFormula) -> Result<Tableau, TableauError> {
        let closure = self.closure(a);
        if let Some(f) = t.gamma.union(&t.delta).find(|f| !closure.contains(*f)) {
            return Err(TableauError::OutOfScope(f.clone()));
        }
        if !self.is_consistent_tableau(t)? {
            return Err(TableauError::InconsistentInput);
        }
        let mut current = t.clone();
        for b in &closure {
            if current.gamma.contains(b) || current.delta.contains(b) {
                continue;
            }
            let mut widened = current.clone();
            widened.gamma.insert(b.clone());
            if self.is_consistent_tableau(&widened)? {
                current = widened;
            } else {
                current.delta.insert(b.clone());
            }
        }
        Ok(current)
    }

    /// All saturated consistent tableaux over the closure of `a`: every
    /// two-coloring of the closure, kept when the consistency oracle admits
    /// it. Guarded by the closure cap.
    pub fn enumerate_worlds(&mut self, a: &PropFormula) -> Result<Vec<Tableau>, DecideError> {
        let closure = self.closure(a);
        if closure.len() > self.caps.closure {
            return Err(DecideError::ClosureCap {
                size: closure.len(),
                cap: self.caps.closure,
            });
        }
        let members: Vec<PropFormula> = closure.iter().cloned().collect();
        let n = members.len();
        let mut worlds = Vec::new();
        for mask in 0u32..(1 << n) {
            let mut t = Tableau::empty();
            for (i, f) in members.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    t.gamma.insert(f.clone());
                } else {
                    t.delta.insert(f.clone());
                }
            }
            if self.is_consistent_tableau(&t)? {
                worlds.push(t);
            }
        }
        Ok(worlds)
    }

    /// The root: saturate the tableau whose delta collects every closure
    /// implication falsified inside some world. Consistency of that seed is
    /// the disjunction property at work; failure is an implementation bug.
    pub fn root_tableau(
        &mut self,
        worlds: &[Tableau],
        a: &PropFormula,
    ) -> Result<Tableau, TableauError> {
        let closure = self.closure(a);
        let mut delta = BTreeSet::new();
        for f in &closure {
            let PropFormula::Imp(b, c) = f else { continue };
            if worlds
                .iter()
                .any(|t| t.gamma.contains(b) && t.delta.contains(c))
            {
                delta.insert(f.clone());
            }
        }
        let seed = Tableau {
            gamma: BTreeSet::new(),
            delta,
        };
        match self.saturate(&seed, a) {
            Ok(t) => Ok(t),
            Err(TableauError::InconsistentInput) => Err(TableauError::Decide(
                DecideError::Internal("root tableau seed is inconsistent".to_string()),
            )),
            Err(e) => Err(e),
        }
    }

    /// Build the canonical countermodel for an unprovable `a` and run its
    /// verification gates: the root condition (checked by the frame
    /// constructor), the truth lemma, frame validity of each axiom, and the
    /// refutation at the world extending `(0, {a})`.
    pub fn build_countermodel(&mut self, a: &PropFormula) -> Result<VfOutcome, TableauError> {
        if self.decide(a)? {
            return Ok(VfOutcome::Theorem);
        }
        let closure = self.closure(a);
        let worlds = self.enumerate_worlds(a)?;
        let root = self.root_tableau(&worlds, a)?;
        let root_id = position_of(&worlds, &root)?;
        let refuting = self.saturate(&Tableau::refuting(a), a)?;
        let refuting_id = position_of(&worlds, &refuting)?;

        let mut relations = RelationFamily::total();
        for f in &closure {
            let PropFormula::Imp(c, d) = f else { continue };
            let edges = worlds
                .iter()
                .enumerate()
                .flat_map(|(i, t1)| worlds.iter().enumerate().map(move |(j, t2)| (i, j, t1, t2)))
                .filter(|(_, _, t1, t2)| {
                    t1.delta.contains(f) || t2.delta.contains(c) || t2.gamma.contains(d)
                })
                .map(|(i, j, _, _)| (i as World, j as World))
                .collect();
            relations.insert(f.clone(), edges);
        }
        let world_ids: BTreeSet<World> = (0..worlds.len() as World).collect();
        let mut valuation = Valuation::new();
        for (i, t) in worlds.iter().enumerate() {
            let atoms: BTreeSet<String> = t
                .gamma
                .iter()
                .filter_map(|f| match f {
                    PropFormula::Atom(p) => Some(p.clone()),
                    _ => None,
                })
                .collect();
            if !atoms.is_empty() {
                valuation.insert(i as World, atoms);
            }
        }
        let frame = PropFmtFrame::new(world_ids, relations, root_id)
            .map_err(|e| DecideError::Internal(format!("root condition failed: {e}")))?;
        let model = PropFmtModel::new(frame, valuation)
            .map_err(|e| DecideError::Internal(e.to_string()))?;

        let mut report = CountermodelReport {
            model,
            worlds,
            root: root_id,
            refuting: refuting_id,
            root_condition_ok: true,
            truth_lemma_ok: true,
            axiom_flags: Vec::new(),
            refutation_ok: false,
        };
        report.truth_lemma_ok = verify_truth_lemma_vf(&report, a, &self.axioms).is_none();
        for axiom in &self.axioms {
            let valid = prop_frame_valid(report.model.frame(), axiom, self.caps.valuation_bits)
                .map_err(|e| DecideError::Internal(e.to_string()))?;
            report.axiom_flags.push((axiom.clone(), valid));
        }
        report.refutation_ok = !report
            .model
            .forces(refuting_id, a)
            .map_err(|e| DecideError::Internal(e.to_string()))?;
        Ok(VfOutcome::Countermodel(Box::new(report)))
    }

    /// Aczel's slash: atoms and `bot` are never slashed, conjunction and
    /// disjunction distribute, and an implication is slashed when it is
    /// provable and its slash conditional holds.
    pub fn slash(&mut self, a: &PropFormula) -> Result<bool, DecideError> {
        Ok(match a {
            PropFormula::Atom(_) | PropFormula::Falsum => false,
            PropFormula::And(l, r) => self.slash(l)? && self.slash(r)?,
            PropFormula::Or(l, r) => self.slash(l)? || self.slash(r)?,
            PropFormula::Imp(l, r) => {
                self.decide(a)? && (!self.slash(l)? || self.slash(r)?)
            }
        })
    }

    /// The disjunction property, constructively: when `a | b` is provable,
    /// return a provable disjunct (the slashed one).
    pub fn dp_split(&mut self, a: &PropFormula, b: &PropFormula) -> Result<DpSplit, DecideError> {
        if !self.decide(&PropFormula::or(a.clone(), b.clone()))? {
            return Ok(DpSplit::NotProvable);
        }
        if self.slash(a)? {
            Ok(DpSplit::Left)
        } else if self.slash(b)? {
            Ok(DpSplit::Right)
        } else {
            Err(DecideError::Internal(
                "disjunction provable but neither disjunct slashed".to_string(),
            ))
        }
    }
}

fn position_of(worlds: &[Tableau], t: &Tableau) -> Result<World, DecideError> {
    worlds
        .iter()
        .position(|w| w == t)
        .map(|i| i as World)
        .ok_or_else(|| {
            DecideError::Internal("saturated tableau missing from world enumeration".to_string())
        })
}

#[derive(Debug, Clone)]
pub enum VfOutcome {
    Theorem,
    Countermodel(Box<CountermodelReport>),
}

/// The constructed countermodel with its verification gates. `worlds[i]` is
/// the tableau behind world `i`.
#[derive(Debug, Clone)]
pub struct CountermodelReport {
    pub model: PropFmtModel,
    pub worlds: Vec<Tableau>,
    pub root: World,
    pub refuting: World,
    pub root_condition_ok: bool,
    pub truth_lemma_ok: bool,
    pub axiom_flags: Vec<(PropFormula, bool)>,
    pub refutation_ok: bool,
}

impl CountermodelReport {
    pub fn all_gates_pass(&self) -> bool {
        self.root_condition_ok
            && self.truth_lemma_ok
            && self.refutation_ok
            && self.axiom_flags.iter().all(|(_, ok)| *ok)
    }
}

/// A world where forcing and gamma-membership disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VfTruthLemmaViolation {
    pub world: World,
    pub formula: PropFormula,
}

/// Check the truth lemma on a constructed countermodel. Returns the first
/// violation; any violation indicates an implementation bug.
pub fn verify_truth_lemma_vf(
    report: &CountermodelReport,
    a: &PropFormula,
    axioms: &[PropFormula],
) -> Option<VfTruthLemmaViolation> {
    let closure = sub_x(a, axioms);
    for (i, t) in report.worlds.iter().enumerate() {
        for b in &closure {
            let forced = report
                .model
                .forces(i as World, b)
                .expect("world ids index the tableaux");
            if forced != t.gamma.contains(b) {
                return Some(VfTruthLemmaViolation {
                    world: i as World,
                    formula: b.clone(),
                });
            }
        }
    }
    None
}

/// Convenience constructor checking the axioms.
pub fn validated_axioms(texts: &[PropFormula]) -> Result<Vec<PropFormula>, FormulaError> {
    for b in texts {
        if !validate_closed_negative(b) {
            return Err(FormulaError::NotClosedNegative(b.to_string()));
        }
    }
    Ok(texts.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_prop;

    fn f(s: &str) -> PropFormula {
        parse_prop(s).unwrap()
    }

    fn session(axioms: &[&str]) -> VfSession {
        VfSession::new(axioms.iter().map(|s| f(s)).collect(), Caps::default()).unwrap()
    }

    #[test]
    fn commutativity_is_provable() {
        let mut s = session(&[]);
        assert!(s.decide(&f("(p & q) -> (q & p)")).unwrap());
        assert!(s.decide(&f("(p | q) -> (q | p)")).unwrap());
        assert!(s.decide(&f("(p | q) & (p | r) -> p | (q & r)")).unwrap());
    }

    #[test]
    fn the_separating_biconditional_is_refutable() {
        let mut s = session(&[]);
        assert!(!s
            .decide(&f("(top -> p & q) <-> (top -> q & p)"))
            .unwrap());
    }

    #[test]
    fn excluded_middle_fails() {
        let mut s = session(&[]);
        assert!(!s.decide(&f("p | ~p")).unwrap());
    }

    #[test]
    fn axioms_are_provable() {
        let mut s = session(&["~~top"]);
        assert!(s.decide(&f("~~top")).unwrap());
        assert!(!s.decide(&f("~top")).unwrap());
    }

    #[test]
    fn saturation_places_bot_and_top() {
        let mut s = session(&[]);
        let t = s.saturate(&Tableau::empty(), &f("p")).unwrap();
        assert!(t.delta.contains(&PropFormula::Falsum));
        assert!(t.gamma.contains(&PropFormula::top()));
        assert_eq!(
            t.gamma.union(&t.delta).count(),
            s.closure(&f("p")).len()
        );
    }

    #[test]
    fn saturating_an_inconsistent_tableau_fails() {
        let mut s = session(&[]);
        let t = Tableau {
            gamma: [PropFormula::Falsum].into(),
            delta: BTreeSet::new(),
        };
        assert_eq!(
            s.saturate(&t, &f("p")).unwrap_err(),
            TableauError::InconsistentInput
        );
    }

    #[test]
    fn saturation_extends_refuting_seed() {
        let mut s = session(&[]);
        let a = f("p | ~p");
        let t = s.saturate(&Tableau::refuting(&a), &a).unwrap();
        assert!(t.delta.contains(&a));
    }

    #[test]
    fn worlds_partition_the_closure() {
        let mut s = session(&[]);
        let a = f("p -> q");
        let closure = s.closure(&a);
        let worlds = s.enumerate_worlds(&a).unwrap();
        assert!(!worlds.is_empty());
        for t in &worlds {
            assert!(t.gamma.is_disjoint(&t.delta));
            let union: BTreeSet<_> = t.gamma.union(&t.delta).cloned().collect();
            assert_eq!(union, closure);
        }
    }

    #[test]
    fn root_delta_for_an_atom_has_no_implications() {
        // the only implication in the closure of p is top = bot -> bot,
        // and no consistent tableau puts bot in gamma
        let mut s = session(&[]);
        let a = f("p");
        let worlds = s.enumerate_worlds(&a).unwrap();
        let mut delta0 = BTreeSet::new();
        for g in &s.closure(&a) {
            if let PropFormula::Imp(b, c) = g {
                if worlds
                    .iter()
                    .any(|t| t.gamma.contains(b) && t.delta.contains(c))
                {
                    delta0.insert(g.clone());
                }
            }
        }
        assert!(delta0.is_empty());
    }

    #[test]
    fn root_delta_collects_falsified_implications() {
        let mut s = session(&[]);
        let a = f("p -> q");
        let worlds = s.enumerate_worlds(&a).unwrap();
        let root = s.root_tableau(&worlds, &a).unwrap();
        assert!(root.delta.contains(&a));
    }

    #[test]
    fn countermodel_for_excluded_middle_passes_all_gates() {
        let mut s = session(&[]);
        let a = f("p | ~p");
        let VfOutcome::Countermodel(report) = s.build_countermodel(&a).unwrap() else {
            panic!("p | ~p is not a VF theorem");
        };
        assert!(report.all_gates_pass());
        assert!(report.worlds[report.refuting as usize].delta.contains(&a));
        assert_eq!(verify_truth_lemma_vf(&report, &a, s.axioms()), None);
    }

    #[test]
    fn theorems_yield_no_countermodel() {
        let mut s = session(&[]);
        assert!(matches!(
            s.build_countermodel(&f("(p & q) -> (q & p)")).unwrap(),
            VfOutcome::Theorem
        ));
    }

    #[test]
    fn countermodel_frame_is_serial_under_the_axiom() {
        let mut s = session(&["~~top"]);
        let a = f("~top");
        let VfOutcome::Countermodel(report) = s.build_countermodel(&a).unwrap() else {
            panic!("~top is refutable over VF + ~~top");
        };
        assert!(report.all_gates_pass());
        assert!(report
            .model
            .frame()
            .is_serial(&PropFormula::neg(PropFormula::top())));
    }

    #[test]
    fn slash_base_cases() {
        let mut s = session(&[]);
        assert!(!s.slash(&f("p")).unwrap());
        assert!(s.slash(&f("top")).unwrap());
        assert!(s.slash(&f("(p & q) -> (q & p)")).unwrap());
    }

    #[test]
    fn dp_split_examples() {
        let mut s = session(&[]);
        assert_eq!(
            s.dp_split(&f("p -> p"), &PropFormula::Falsum).unwrap(),
            DpSplit::Left
        );
        assert_eq!(
            s.dp_split(&PropFormula::Falsum, &PropFormula::Falsum)
                .unwrap(),
            DpSplit::NotProvable
        );
        let mut s = session(&["~~top"]);
        assert_eq!(
            s.dp_split(&f("~~top"), &f("~top")).unwrap(),
            DpSplit::Left
        );
    }

    #[test]
    fn closure_cap_guards_world_enumeration() {
        let caps = Caps {
            closure: 3,
            ..Caps::default()
        };
        let mut s = VfSession::new(vec![], caps).unwrap();
        assert!(matches!(
            s.enumerate_worlds(&f("p -> q")),
            Err(DecideError::ClosureCap { .. })
        ));
    }
}
