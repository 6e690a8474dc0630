//! Decision procedure and finite countermodels for the pure logic of
//! necessitation N extended by finitely many closed modal axioms.
//!
//! Provability in N+Y coincides with being a tautological consequence of
//! Y together with the boxes of provable formulas, and only boxes occurring
//! in the `Sub_Y` closure of the goal can matter. The decision procedure
//! therefore marks box bodies of the closure provable by a monotone
//! saturation loop (a least fixed point, so self-referential closures such
//! as deciding `bot` under `~[]bot` settle correctly) and finishes with one
//! tautological-consequence check for the goal. An inconsistent axiom set
//! needs no special treatment: the premises become classically
//! unsatisfiable and every formula is declared provable.

use std::collections::{BTreeMap, BTreeSet};

use crate::boolsat::{taut_consequence, AtomCapError};
use crate::caps::Caps;
use crate::formula::{complementary, sub_y, FormulaError, ModalFormula};
use crate::semantics::{ModalFmtFrame, ModalFmtModel, RelationFamily, Valuation, World};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    AtomCap(#[from] AtomCapError),
    #[error("subformula closure has {size} members, cap is {cap}")]
    ClosureCap { size: usize, cap: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// One decision session for a fixed axiom set Y. Verdicts for box bodies are
/// definitive and cached for the lifetime of the session; sessions are
/// independent and may run on separate threads.
#[derive(Debug, Clone)]
pub struct NSession {
    axioms: Vec<ModalFormula>,
    caps: Caps,
    verdicts: BTreeMap<ModalFormula, bool>,
}

impl NSession {
    /// Requires every axiom to be closed.
    pub fn new(axioms: Vec<ModalFormula>, caps: Caps) -> Result<Self, FormulaError> {
        for a in &axioms {
            if !a.is_closed() {
                return Err(FormulaError::NotClosedModal(a.to_string()));
            }
        }
        Ok(NSession {
            axioms,
            caps,
            verdicts: BTreeMap::new(),
        })
    }

    pub fn axioms(&self) -> &[ModalFormula] {
        &self.axioms
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    /// Is `goal` a theorem of N+Y?
    pub fn decide(&mut self, goal: &ModalFormula) -> Result<bool, DecideError> {
        if let Some(&v) = self.verdicts.get(goal) {
            return Ok(v);
        }
        let closure = sub_y(goal, &self.axioms);
        let bodies: Vec<ModalFormula> = closure
            .iter()
            .filter_map(|f| match f {
                ModalFormula::Box(inner) => Some((**inner).clone()),
                _ => None,
            })
            .collect();
        self.saturate_bodies(&bodies)?;
        let premises = self.premises(&bodies);
        let verdict = taut_consequence(&premises, goal, self.caps.sat_atoms)?;
        self.verdicts.insert(goal.clone(), verdict);
        Ok(verdict)
    }

    // Mark every provable member of `bodies`, smallest first, repeating
    // until no new box becomes available as a premise.
    fn saturate_bodies(&mut self, bodies: &[ModalFormula]) -> Result<(), DecideError> {
        loop {
            let mut changed = false;
            for body in bodies {
                if self.verdicts.get(body) == Some(&true) {
                    continue;
                }
                let premises = self.premises(bodies);
                if taut_consequence(&premises, body, self.caps.sat_atoms)? {
                    self.verdicts.insert(body.clone(), true);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // at the fixed point, the unproved bodies are unprovable
        for body in bodies {
            self.verdicts.entry(body.clone()).or_insert(false);
        }
        Ok(())
    }

    fn premises(&self, bodies: &[ModalFormula]) -> Vec<ModalFormula> {
        let mut premises = self.axioms.clone();
        for body in bodies {
            if self.verdicts.get(body) == Some(&true) {
                premises.push(ModalFormula::Box(Box::new(body.clone())));
            }
        }
        premises
    }

    /// N+Y is consistent iff `bot` is not a theorem.
    pub fn is_consistent(&mut self) -> Result<bool, DecideError> {
        Ok(!self.decide(&ModalFormula::Falsum)?)
    }

    /// The canonical finite countermodel for an unprovable formula: worlds
    /// are the maximal consistent subsets of the closure, a `B`-edge runs
    /// from `G` to `D` unless `[]B` in `G` demands `B` in `D`, and the
    /// valuation reads atoms off the worlds.
    pub fn build_countermodel(&mut self, goal: &ModalFormula) -> Result<NOutcome, DecideError> {
        if self.decide(goal)? {
            return Ok(NOutcome::Theorem);
        }
        let closure = sub_y(goal, &self.axioms);
        if closure.len() > self.caps.closure {
            return Err(DecideError::ClosureCap {
                size: closure.len(),
                cap: self.caps.closure,
            });
        }
        let members: Vec<ModalFormula> = closure.iter().cloned().collect();
        let n = members.len();
        let complement_at: Vec<usize> = members
            .iter()
            .map(|b| {
                members
                    .iter()
                    .position(|c| *c == complementary(b))
                    .expect("closure is closed under the complementary operation")
            })
            .collect();

        let mut world_sets: Vec<BTreeSet<ModalFormula>> = Vec::new();
        for mask in 0u32..(1 << n) {
            let maximal = (0..n).all(|i| mask >> i & 1 == 1 || mask >> complement_at[i] & 1 == 1);
            if !maximal {
                continue;
            }
            let gamma: BTreeSet<ModalFormula> = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, f)| f.clone())
                .collect();
            let refutes = ModalFormula::imp(big_and(&gamma), ModalFormula::Falsum);
            if !self.decide(&refutes)? {
                world_sets.push(gamma);
            }
        }

        let worlds: BTreeSet<World> = (0..world_sets.len() as World).collect();
        let mut relations = RelationFamily::total();
        for f in &members {
            let ModalFormula::Box(body) = f else { continue };
            let edges = world_sets
                .iter()
                .enumerate()
                .flat_map(|(i, g)| {
                    world_sets.iter().enumerate().map(move |(j, d)| (i, j, g, d))
                })
                .filter(|(_, _, g, d)| !g.contains(f) || d.contains(body))
                .map(|(i, j, _, _)| (i as World, j as World))
                .collect();
            relations.insert((**body).clone(), edges);
        }
        let mut valuation = Valuation::new();
        for (i, gamma) in world_sets.iter().enumerate() {
            let atoms: BTreeSet<String> = gamma
                .iter()
                .filter_map(|f| match f {
                    ModalFormula::Atom(p) => Some(p.clone()),
                    _ => None,
                })
                .collect();
            if !atoms.is_empty() {
                valuation.insert(i as World, atoms);
            }
        }

        let refuting = world_sets
            .iter()
            .position(|g| g.contains(&complementary(goal)))
            .ok_or_else(|| {
                DecideError::Internal("no maximal consistent set refutes the goal".to_string())
            })? as World;

        let frame = ModalFmtFrame::new(worlds, relations)
            .map_err(|e| DecideError::Internal(e.to_string()))?;
        let model = ModalFmtModel::new(frame, valuation)
            .map_err(|e| DecideError::Internal(e.to_string()))?;
        Ok(NOutcome::Countermodel(NCountermodel {
            model,
            world_sets,
            refuting,
        }))
    }
}

/// Left fold of a set in its canonical order; the empty conjunction is `top`.
pub fn big_and(set: &BTreeSet<ModalFormula>) -> ModalFormula {
    let mut iter = set.iter().cloned();
    match iter.next() {
        None => ModalFormula::top(),
        Some(first) => iter.fold(first, ModalFormula::and),
    }
}

/// Left fold of a set in its canonical order; the empty disjunction is `bot`.
pub fn big_or(set: &BTreeSet<ModalFormula>) -> ModalFormula {
    let mut iter = set.iter().cloned();
    match iter.next() {
        None => ModalFormula::Falsum,
        Some(first) => iter.fold(first, ModalFormula::or),
    }
}

#[derive(Debug, Clone)]
pub enum NOutcome {
    Theorem,
    Countermodel(NCountermodel),
}

/// A canonical countermodel together with the maximal consistent set behind
/// each world (world `i` is `world_sets[i]`).
#[derive(Debug, Clone)]
pub struct NCountermodel {
    pub model: ModalFmtModel,
    pub world_sets: Vec<BTreeSet<ModalFormula>>,
    pub refuting: World,
}

/// A world where forcing and membership disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthLemmaViolation {
    pub world: World,
    pub formula: ModalFormula,
}

/// Check the truth lemma on a constructed countermodel: for every world and
/// every closure formula, forcing coincides with membership. Returns the
/// first violation; any violation indicates an implementation bug.
pub fn verify_truth_lemma_n(
    countermodel: &NCountermodel,
    goal: &ModalFormula,
    axioms: &[ModalFormula],
) -> Option<TruthLemmaViolation> {
    let closure = sub_y(goal, axioms);
    for (i, gamma) in countermodel.world_sets.iter().enumerate() {
        for b in &closure {
            let forced = countermodel
                .model
                .forces(i as World, b)
                .expect("world ids index the world sets");
            if forced != gamma.contains(b) {
                return Some(TruthLemmaViolation {
                    world: i as World,
                    formula: b.clone(),
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_modal;

    fn f(s: &str) -> ModalFormula {
        parse_modal(s).unwrap()
    }

    fn session(axioms: &[&str]) -> NSession {
        NSession::new(axioms.iter().map(|s| f(s)).collect(), Caps::default()).unwrap()
    }

    #[test]
    fn necessitation_of_a_tautology() {
        let mut s = session(&[]);
        assert!(s.decide(&f("[](p -> p)")).unwrap());
        assert!(s.decide(&f("[][](p -> p)")).unwrap());
    }

    #[test]
    fn reflection_fails_in_n() {
        let mut s = session(&[]);
        assert!(!s.decide(&f("[]p -> p")).unwrap());
    }

    #[test]
    fn axiom_is_its_own_premise() {
        let mut s = session(&["~[]bot"]);
        assert!(s.decide(&f("~[]bot")).unwrap());
        assert!(s.decide(&f("[]~[]bot")).unwrap());
    }

    #[test]
    fn box_is_not_monotone_in_n() {
        let mut s = session(&[]);
        assert!(!s.decide(&f("[](p & q) -> []p")).unwrap());
    }

    #[test]
    fn self_referential_closure_terminates() {
        // Sub_Y(bot) contains []bot via the axiom, whose body is bot again.
        let mut s = session(&["~[]bot"]);
        assert!(s.is_consistent().unwrap());
        assert!(!s.decide(&f("[]bot")).unwrap());
    }

    #[test]
    fn inconsistent_axioms_prove_everything() {
        // top is provable, so []top is provable, and ~[]top then closes
        // the circle.
        let mut s = session(&["~[]top"]);
        assert!(!s.is_consistent().unwrap());
        assert!(s.decide(&f("p")).unwrap());
        assert!(s.decide(&f("[]bot")).unwrap());
    }

    #[test]
    fn distinct_closed_indices_are_independent() {
        // bot, ~top, and ~[]top index different relations, so the three
        // negated boxes are pairwise independent over N.
        let mut s = session(&[]);
        assert!(!s.decide(&f("~[]bot")).unwrap());
        assert!(!s.decide(&f("~[]bot -> ~[]~top")).unwrap());
        assert!(!s.decide(&f("~[]~top -> ~[]~[]top")).unwrap());
    }

    #[test]
    fn countermodel_for_reflection() {
        let mut s = session(&[]);
        let goal = f("[]p -> p");
        let NOutcome::Countermodel(cm) = s.build_countermodel(&goal).unwrap() else {
            panic!("[]p -> p is not a theorem of N");
        };
        // some world carries []p together with ~p
        assert!(cm
            .world_sets
            .iter()
            .any(|g| g.contains(&f("[]p")) && g.contains(&f("~p"))));
        assert!(!cm.model.forces(cm.refuting, &goal).unwrap());
        assert_eq!(verify_truth_lemma_n(&cm, &goal, s.axioms()), None);
    }

    #[test]
    fn theorem_reports_no_countermodel() {
        let mut s = session(&[]);
        assert!(matches!(
            s.build_countermodel(&f("[](p -> p)")).unwrap(),
            NOutcome::Theorem
        ));
    }

    #[test]
    fn countermodel_validates_the_axioms() {
        let mut s = session(&["~[]bot"]);
        let goal = f("[]bot");
        let NOutcome::Countermodel(cm) = s.build_countermodel(&goal).unwrap() else {
            panic!("[]bot is refutable over N + ~[]bot");
        };
        assert!(cm.model.valid(&f("~[]bot")));
        assert!(!cm.model.forces(cm.refuting, &goal).unwrap());
        assert_eq!(verify_truth_lemma_n(&cm, &goal, s.axioms()), None);
    }

    #[test]
    fn truth_lemma_catches_corruption() {
        let mut s = session(&[]);
        let goal = f("[]p -> p");
        let NOutcome::Countermodel(mut cm) = s.build_countermodel(&goal).unwrap() else {
            panic!("refutable");
        };
        // flip one valuation bit: membership and forcing now disagree
        let world = cm
            .world_sets
            .iter()
            .position(|g| g.contains(&f("p")))
            .unwrap() as World;
        let mut valuation = cm.model.valuation().clone();
        valuation.get_mut(&world).unwrap().remove("p");
        cm.model = ModalFmtModel::new(cm.model.frame().clone(), valuation).unwrap();
        assert!(verify_truth_lemma_n(&cm, &goal, s.axioms()).is_some());
    }

    #[test]
    fn closure_cap_guards_the_enumeration() {
        let caps = Caps {
            closure: 4,
            ..Caps::default()
        };
        let mut s = NSession::new(vec![], caps).unwrap();
        assert!(matches!(
            s.build_countermodel(&f("[]p -> p")),
            Err(DecideError::ClosureCap { .. })
        ));
    }

    #[test]
    fn monotone_in_the_axiom_set() {
        for goal in ["[](p -> p)", "~[]bot -> ~[]bot", "[]~[]bot"] {
            let mut weak = session(&["~[]bot"]);
            let mut strong = session(&["~[]bot", "~[]~~bot"]);
            if weak.decide(&f(goal)).unwrap() {
                assert!(strong.decide(&f(goal)).unwrap());
            }
        }
    }
}
