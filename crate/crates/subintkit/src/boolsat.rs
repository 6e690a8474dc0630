//! Classical propositional reasoning over modal formulas, with maximal boxed
//! subformulas treated as opaque atoms.
//!
//! This is the engine behind tautological-consequence checks: a backtracking
//! search with unit propagation over the box-as-atom alphabet. Alphabets in
//! this toolkit are tiny, so no external solver is involved.

use std::collections::BTreeMap;

use crate::formula::ModalFormula;

/// The alphabet entry a boolean variable stands for.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum AtomKey {
    Var(String),
    Boxed(ModalFormula),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("box-as-atom alphabet needs {needed} atoms, cap is {cap}")]
pub struct AtomCapError {
    pub needed: usize,
    pub cap: usize,
}

/// Boolean skeleton of a modal formula; `usize` indexes the atom table.
#[derive(Debug, Clone)]
enum Skel {
    Atom(usize),
    False,
    And(Box<Skel>, Box<Skel>),
    Or(Box<Skel>, Box<Skel>),
    Imp(Box<Skel>, Box<Skel>),
}

#[derive(Default)]
struct AtomTable {
    ids: BTreeMap<AtomKey, usize>,
}

impl AtomTable {
    fn intern(&mut self, key: AtomKey) -> usize {
        let next = self.ids.len();
        *self.ids.entry(key).or_insert(next)
    }

    fn abstract_formula(&mut self, f: &ModalFormula) -> Skel {
        match f {
            ModalFormula::Atom(p) => Skel::Atom(self.intern(AtomKey::Var(p.clone()))),
            ModalFormula::Falsum => Skel::False,
            ModalFormula::Box(_) => Skel::Atom(self.intern(AtomKey::Boxed(f.clone()))),
            ModalFormula::And(a, b) => Skel::And(
                Box::new(self.abstract_formula(a)),
                Box::new(self.abstract_formula(b)),
            ),
            ModalFormula::Or(a, b) => Skel::Or(
                Box::new(self.abstract_formula(a)),
                Box::new(self.abstract_formula(b)),
            ),
            ModalFormula::Imp(a, b) => Skel::Imp(
                Box::new(self.abstract_formula(a)),
                Box::new(self.abstract_formula(b)),
            ),
        }
    }
}

// Three-valued view of a constraint under a partial assignment.
enum Reduced {
    True,
    False,
    Residual(Skel),
}

fn reduce(s: &Skel, assignment: &[Option<bool>]) -> Reduced {
    match s {
        Skel::False => Reduced::False,
        Skel::Atom(i) => match assignment[*i] {
            Some(true) => Reduced::True,
            Some(false) => Reduced::False,
            None => Reduced::Residual(Skel::Atom(*i)),
        },
        Skel::And(a, b) => match (reduce(a, assignment), reduce(b, assignment)) {
            (Reduced::False, _) | (_, Reduced::False) => Reduced::False,
            (Reduced::True, r) | (r, Reduced::True) => r,
            (Reduced::Residual(x), Reduced::Residual(y)) => {
                Reduced::Residual(Skel::And(Box::new(x), Box::new(y)))
            }
        },
        Skel::Or(a, b) => match (reduce(a, assignment), reduce(b, assignment)) {
            (Reduced::True, _) | (_, Reduced::True) => Reduced::True,
            (Reduced::False, r) | (r, Reduced::False) => r,
            (Reduced::Residual(x), Reduced::Residual(y)) => {
                Reduced::Residual(Skel::Or(Box::new(x), Box::new(y)))
            }
        },
        Skel::Imp(a, b) => match (reduce(a, assignment), reduce(b, assignment)) {
            (Reduced::False, _) | (_, Reduced::True) => Reduced::True,
            (Reduced::True, r) => r,
            (Reduced::Residual(x), Reduced::False) => {
                Reduced::Residual(Skel::Imp(Box::new(x), Box::new(Skel::False)))
            }
            (Reduced::Residual(x), Reduced::Residual(y)) => {
                Reduced::Residual(Skel::Imp(Box::new(x), Box::new(y)))
            }
        },
    }
}

// A residual that pins a single atom: `x` or `x -> bot`.
fn as_unit(s: &Skel) -> Option<(usize, bool)> {
    match s {
        Skel::Atom(i) => Some((*i, true)),
        Skel::Imp(a, b) => match (a.as_ref(), b.as_ref()) {
            (Skel::Atom(i), Skel::False) => Some((*i, false)),
            _ => None,
        },
        _ => None,
    }
}

fn satisfiable(constraints: Vec<Skel>, assignment: &mut Vec<Option<bool>>) -> bool {
    let mut residuals = Vec::with_capacity(constraints.len());
    for c in &constraints {
        match reduce(c, assignment) {
            Reduced::True => {}
            Reduced::False => return false,
            Reduced::Residual(r) => residuals.push(r),
        }
    }
    if residuals.is_empty() {
        return true;
    }
    if let Some((atom, value)) = residuals.iter().find_map(as_unit) {
        assignment[atom] = Some(value);
        let ok = satisfiable(residuals, assignment);
        assignment[atom] = None;
        return ok;
    }
    // branch on the lowest unassigned atom mentioned by a residual
    let atom = lowest_atom(&residuals).expect("non-trivial residual mentions an atom");
    for value in [true, false] {
        assignment[atom] = Some(value);
        if satisfiable(residuals.clone(), assignment) {
            assignment[atom] = None;
            return true;
        }
    }
    assignment[atom] = None;
    false
}

fn lowest_atom(residuals: &[Skel]) -> Option<usize> {
    fn go(s: &Skel, best: &mut Option<usize>) {
        match s {
            Skel::Atom(i) => {
                if best.map_or(true, |b| *i < b) {
                    *best = Some(*i);
                }
            }
            Skel::False => {}
            Skel::And(a, b) | Skel::Or(a, b) | Skel::Imp(a, b) => {
                go(a, best);
                go(b, best);
            }
        }
    }
    let mut best = None;
    for r in residuals {
        go(r, &mut best);
    }
    best
}

/// Does every assignment over the box-as-atom alphabet that satisfies all
/// `premises` also satisfy `goal`?
pub fn taut_consequence(
    premises: &[ModalFormula],
    goal: &ModalFormula,
    atom_cap: usize,
) -> Result<bool, AtomCapError> {
    let mut table = AtomTable::default();
    let mut constraints: Vec<Skel> = premises
        .iter()
        .map(|p| table.abstract_formula(p))
        .collect();
    let goal_skel = table.abstract_formula(goal);
    constraints.push(Skel::Imp(Box::new(goal_skel), Box::new(Skel::False)));
    let n = table.ids.len();
    if n > atom_cap {
        return Err(AtomCapError {
            needed: n,
            cap: atom_cap,
        });
    }
    let mut assignment = vec![None; n];
    Ok(!satisfiable(constraints, &mut assignment))
}

/// Tautology over the box-as-atom alphabet.
pub fn tautology(goal: &ModalFormula, atom_cap: usize) -> Result<bool, AtomCapError> {
    taut_consequence(&[], goal, atom_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_modal;

    const CAP: usize = 24;

    fn f(s: &str) -> ModalFormula {
        parse_modal(s).unwrap()
    }

    #[test]
    fn excluded_middle_is_tautology() {
        assert!(taut_consequence(&[], &f("p | ~p"), CAP).unwrap());
    }

    #[test]
    fn boxed_formula_is_one_atom() {
        assert!(taut_consequence(&[f("[]p")], &f("[]p | q"), CAP).unwrap());
        // a lone boxed atom is not a tautology
        assert!(!taut_consequence(&[], &f("[](p | ~p)"), CAP).unwrap());
        // distinct boxes are distinct atoms
        assert!(!taut_consequence(&[f("[](p & q)")], &f("[]p"), CAP).unwrap());
    }

    #[test]
    fn nested_boxes_are_opaque() {
        assert!(!taut_consequence(&[f("[]p")], &f("[][]p"), CAP).unwrap());
        assert!(taut_consequence(&[f("[][]p")], &f("[][]p"), CAP).unwrap());
    }

    #[test]
    fn unsatisfiable_premises_entail_anything() {
        assert!(taut_consequence(&[f("[]bot"), f("~[]bot")], &f("q"), CAP).unwrap());
    }

    #[test]
    fn atom_cap_is_enforced() {
        let e = taut_consequence(&[], &f("p | q | r"), 2).unwrap_err();
        assert_eq!(e.needed, 3);
        assert_eq!(e.cap, 2);
    }

    #[test]
    fn agrees_with_truth_tables_on_small_formulas() {
        // cross-check the search against direct enumeration
        let cases = [
            "p -> q -> p",
            "(p -> q) -> p",
            "(p -> q) -> (q -> r) -> p -> r",
            "~(p & q) <-> ~p | ~q",
            "(p | q) & ~p -> q",
            "p <-> ~~q",
        ];
        for text in cases {
            let formula = f(text);
            let atoms: Vec<String> = formula.atoms().into_iter().collect();
            let mut all_true = true;
            for bits in 0..(1u32 << atoms.len()) {
                let value = eval(&formula, &|name| {
                    let i = atoms.iter().position(|a| a == name).unwrap();
                    bits >> i & 1 == 1
                });
                all_true &= value;
            }
            assert_eq!(
                tautology(&formula, CAP).unwrap(),
                all_true,
                "mismatch on {text}"
            );
        }
    }

    fn eval(formula: &ModalFormula, v: &dyn Fn(&str) -> bool) -> bool {
        match formula {
            ModalFormula::Atom(p) => v(p),
            ModalFormula::Falsum => false,
            ModalFormula::And(a, b) => eval(a, v) && eval(b, v),
            ModalFormula::Or(a, b) => eval(a, v) || eval(b, v),
            ModalFormula::Imp(a, b) => !eval(a, v) || eval(b, v),
            ModalFormula::Box(_) => unreachable!("box-free test formulas"),
        }
    }
}
