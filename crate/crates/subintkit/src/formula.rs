//! Formula syntax for the two languages of the toolkit.
//!
//! Propositional formulas are built from atoms and `bot` with `&`, `|`, and
//! `->`; modal formulas additionally allow `[]`. Negation, `top`, and `<->`
//! are surface sugar only: the parser expands `~A` to `A -> bot`, `top` to
//! `bot -> bot`, and `A <-> B` to `(A -> B) & (B -> A)`, so core trees never
//! contain them. Structural equality on the expanded core is the only notion
//! of formula identity; in particular it is what indexes relation families.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// A propositional formula in core syntax (no `~`, `top`, or `<->` nodes).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Atom(String),
    Falsum,
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Imp(Box<PropFormula>, Box<PropFormula>),
}

/// A modal formula in core syntax: the propositional constructors plus `[]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModalFormula {
    Atom(String),
    Falsum,
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Imp(Box<ModalFormula>, Box<ModalFormula>),
    Box(Box<ModalFormula>),
}

macro_rules! constructors {
    ($ty:ident) => {
        impl $ty {
            pub fn atom(name: &str) -> Self {
                $ty::Atom(name.to_string())
            }

            pub fn and(left: $ty, right: $ty) -> Self {
                $ty::And(Box::new(left), Box::new(right))
            }

            pub fn or(left: $ty, right: $ty) -> Self {
                $ty::Or(Box::new(left), Box::new(right))
            }

            pub fn imp(left: $ty, right: $ty) -> Self {
                $ty::Imp(Box::new(left), Box::new(right))
            }

            /// `~A`, expanded: `A -> bot`.
            pub fn neg(inner: $ty) -> Self {
                $ty::imp(inner, $ty::Falsum)
            }

            /// `top`, expanded: `bot -> bot`.
            pub fn top() -> Self {
                $ty::imp($ty::Falsum, $ty::Falsum)
            }

            /// `A <-> B`, expanded: `(A -> B) & (B -> A)`.
            pub fn iff(left: $ty, right: $ty) -> Self {
                $ty::and(
                    $ty::imp(left.clone(), right.clone()),
                    $ty::imp(right, left),
                )
            }
        }
    };
}

constructors!(PropFormula);
constructors!(ModalFormula);

impl PropFormula {
    pub fn node_count(&self) -> usize {
        match self {
            PropFormula::Atom(_) | PropFormula::Falsum => 1,
            PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Imp(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// No propositional variables occur.
    pub fn is_closed(&self) -> bool {
        match self {
            PropFormula::Atom(_) => false,
            PropFormula::Falsum => true,
            PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Imp(a, b) => {
                a.is_closed() && b.is_closed()
            }
        }
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_atoms(&mut acc);
        acc
    }

    fn collect_atoms(&self, acc: &mut BTreeSet<String>) {
        match self {
            PropFormula::Atom(p) => {
                acc.insert(p.clone());
            }
            PropFormula::Falsum => {}
            PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Imp(a, b) => {
                a.collect_atoms(acc);
                b.collect_atoms(acc);
            }
        }
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<PropFormula> {
        let mut acc = BTreeSet::new();
        self.collect_subformulas(&mut acc);
        acc
    }

    fn collect_subformulas(&self, acc: &mut BTreeSet<PropFormula>) {
        if acc.insert(self.clone()) {
            match self {
                PropFormula::Atom(_) | PropFormula::Falsum => {}
                PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Imp(a, b) => {
                    a.collect_subformulas(acc);
                    b.collect_subformulas(acc);
                }
            }
        }
    }

    /// Two-valued evaluation of a closed formula.
    ///
    /// The free Heyting algebra on zero generators is the two-element
    /// algebra, so for closed formulas this coincides with Int-provability.
    ///
    /// # Panics
    ///
    /// Panics if the formula contains an atom.
    pub fn eval_closed(&self) -> bool {
        match self {
            PropFormula::Atom(p) => panic!("eval_closed on open formula (atom {p})"),
            PropFormula::Falsum => false,
            PropFormula::And(a, b) => a.eval_closed() && b.eval_closed(),
            PropFormula::Or(a, b) => a.eval_closed() || b.eval_closed(),
            PropFormula::Imp(a, b) => !a.eval_closed() || b.eval_closed(),
        }
    }
}

impl ModalFormula {
    pub fn node_count(&self) -> usize {
        match self {
            ModalFormula::Atom(_) | ModalFormula::Falsum => 1,
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Imp(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            ModalFormula::Box(a) => 1 + a.node_count(),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            ModalFormula::Atom(_) => false,
            ModalFormula::Falsum => true,
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Imp(a, b) => {
                a.is_closed() && b.is_closed()
            }
            ModalFormula::Box(a) => a.is_closed(),
        }
    }

    /// Maximum nesting depth of `[]`.
    pub fn modal_depth(&self) -> usize {
        match self {
            ModalFormula::Atom(_) | ModalFormula::Falsum => 0,
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Imp(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
            ModalFormula::Box(a) => 1 + a.modal_depth(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_atoms(&mut acc);
        acc
    }

    fn collect_atoms(&self, acc: &mut BTreeSet<String>) {
        match self {
            ModalFormula::Atom(p) => {
                acc.insert(p.clone());
            }
            ModalFormula::Falsum => {}
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Imp(a, b) => {
                a.collect_atoms(acc);
                b.collect_atoms(acc);
            }
            ModalFormula::Box(a) => a.collect_atoms(acc),
        }
    }

    pub fn subformulas(&self) -> BTreeSet<ModalFormula> {
        let mut acc = BTreeSet::new();
        self.collect_subformulas(&mut acc);
        acc
    }

    fn collect_subformulas(&self, acc: &mut BTreeSet<ModalFormula>) {
        if acc.insert(self.clone()) {
            match self {
                ModalFormula::Atom(_) | ModalFormula::Falsum => {}
                ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Imp(a, b) => {
                    a.collect_subformulas(acc);
                    b.collect_subformulas(acc);
                }
                ModalFormula::Box(a) => a.collect_subformulas(acc),
            }
        }
    }
}

// The canonical order on formulas: node count first, then the lexicographic
// order of the core-syntax rendering. Total and stable across runs, which
// makes every set enumeration in the toolkit (Lindenbaum passes, conjunction
// and disjunction operands, world listings) reproducible. The rendering is
// injective on core trees, so the order is consistent with structural
// equality.

impl Ord for PropFormula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.node_count()
            .cmp(&other.node_count())
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

impl PartialOrd for PropFormula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ModalFormula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.node_count()
            .cmp(&other.node_count())
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

impl PartialOrd for ModalFormula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Precedence levels for printing with minimal parentheses. `->` is
// right-associative; `&` and `|` associate to the left; `[]` binds tightest.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(form: &PropFormula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let prec = match form {
                PropFormula::Atom(_) | PropFormula::Falsum => PREC_UNARY,
                PropFormula::And(..) => PREC_AND,
                PropFormula::Or(..) => PREC_OR,
                PropFormula::Imp(..) => PREC_IMP,
            };
            if prec < min {
                write!(f, "(")?;
                go(form, PREC_IMP, f)?;
                return write!(f, ")");
            }
            match form {
                PropFormula::Atom(p) => write!(f, "{p}"),
                PropFormula::Falsum => write!(f, "bot"),
                PropFormula::And(a, b) => {
                    go(a, PREC_AND, f)?;
                    write!(f, " & ")?;
                    go(b, PREC_AND + 1, f)
                }
                PropFormula::Or(a, b) => {
                    go(a, PREC_OR, f)?;
                    write!(f, " | ")?;
                    go(b, PREC_OR + 1, f)
                }
                PropFormula::Imp(a, b) => {
                    go(a, PREC_IMP + 1, f)?;
                    write!(f, " -> ")?;
                    go(b, PREC_IMP, f)
                }
            }
        }
        go(self, PREC_IMP, f)
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(form: &ModalFormula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let prec = match form {
                ModalFormula::Atom(_) | ModalFormula::Falsum | ModalFormula::Box(_) => PREC_UNARY,
                ModalFormula::And(..) => PREC_AND,
                ModalFormula::Or(..) => PREC_OR,
                ModalFormula::Imp(..) => PREC_IMP,
            };
            if prec < min {
                write!(f, "(")?;
                go(form, PREC_IMP, f)?;
                return write!(f, ")");
            }
            match form {
                ModalFormula::Atom(p) => write!(f, "{p}"),
                ModalFormula::Falsum => write!(f, "bot"),
                ModalFormula::Box(a) => {
                    write!(f, "[]")?;
                    go(a, PREC_UNARY, f)
                }
                ModalFormula::And(a, b) => {
                    go(a, PREC_AND, f)?;
                    write!(f, " & ")?;
                    go(b, PREC_AND + 1, f)
                }
                ModalFormula::Or(a, b) => {
                    go(a, PREC_OR, f)?;
                    write!(f, " | ")?;
                    go(b, PREC_OR + 1, f)
                }
                ModalFormula::Imp(a, b) => {
                    go(a, PREC_IMP + 1, f)?;
                    write!(f, " -> ")?;
                    go(b, PREC_IMP, f)
                }
            }
        }
        go(self, PREC_IMP, f)
    }
}

/// `Sub_X(A)`: the subformulas of `A` and of every member of `X`, together
/// with `bot` and `top`. Finite and closed under subformulas.
pub fn sub_x(a: &PropFormula, x: &[PropFormula]) -> BTreeSet<PropFormula> {
    let mut acc = a.subformulas();
    for b in x {
        acc.extend(b.subformulas());
    }
    acc.insert(PropFormula::Falsum);
    acc.insert(PropFormula::top());
    acc
}

/// `~B`: the body `C` when `B` has the shape `C -> bot`, otherwise `B -> bot`.
pub fn complementary(b: &ModalFormula) -> ModalFormula {
    match b {
        ModalFormula::Imp(c, d) if **d == ModalFormula::Falsum => (**c).clone(),
        _ => ModalFormula::neg(b.clone()),
    }
}

/// `Sub_Y(A)`: the smallest set containing `A` and every member of `Y` that
/// is closed under subformulas and under [`complementary`].
pub fn sub_y(a: &ModalFormula, y: &[ModalFormula]) -> BTreeSet<ModalFormula> {
    let mut acc: BTreeSet<ModalFormula> = BTreeSet::new();
    let mut work: Vec<ModalFormula> = vec![a.clone()];
    work.extend(y.iter().cloned());
    while let Some(f) = work.pop() {
        if !acc.insert(f.clone()) {
            continue;
        }
        work.push(complementary(&f));
        match &f {
            ModalFormula::Atom(_) | ModalFormula::Falsum => {}
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::Imp(l, r) => {
                work.push((**l).clone());
                work.push((**r).clone());
            }
            ModalFormula::Box(inner) => work.push((**inner).clone()),
        }
    }
    acc
}

/// Corsi's modified Gödel translation: atoms stay fixed, implications are
/// boxed.
pub fn corsi(a: &PropFormula) -> ModalFormula {
    match a {
        PropFormula::Atom(p) => ModalFormula::Atom(p.clone()),
        PropFormula::Falsum => ModalFormula::Falsum,
        PropFormula::And(l, r) => ModalFormula::and(corsi(l), corsi(r)),
        PropFormula::Or(l, r) => ModalFormula::or(corsi(l), corsi(r)),
        PropFormula::Imp(l, r) => ModalFormula::Box(Box::new(ModalFormula::imp(
            corsi(l),
            corsi(r),
        ))),
    }
}

/// The original Gödel translation: atoms are boxed as well. Provided as a
/// syntactic utility only.
pub fn godel(a: &PropFormula) -> ModalFormula {
    match a {
        PropFormula::Atom(p) => ModalFormula::Box(Box::new(ModalFormula::Atom(p.clone()))),
        PropFormula::Falsum => ModalFormula::Falsum,
        PropFormula::And(l, r) => ModalFormula::and(godel(l), godel(r)),
        PropFormula::Or(l, r) => ModalFormula::or(godel(l), godel(r)),
        PropFormula::Imp(l, r) => ModalFormula::Box(Box::new(ModalFormula::imp(
            godel(l),
            godel(r),
        ))),
    }
}

/// A closed negative axiom: closed, of the shape `~C`, and true under the
/// two-valued evaluation of closed formulas (equivalently, provable in Int).
pub fn validate_closed_negative(b: &PropFormula) -> bool {
    if !b.is_closed() {
        return false;
    }
    match b {
        PropFormula::Imp(_, d) if **d == PropFormula::Falsum => b.eval_closed(),
        _ => false,
    }
}

/// Errors raised by syntactic preconditions in this module.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("`{0}` is not a closed negative axiom")]
    NotClosedNegative(String),
    #[error("`{0}` is not a closed modal formula")]
    NotClosedModal(String),
}

/// `X*`: for each axiom `~C` in `X`, the closed modal formula `~(C^c)`.
/// The body is translated; the outer negation stays an implication into
/// `bot` and is not boxed.
pub fn x_star(x: &[PropFormula]) -> Result<Vec<ModalFormula>, FormulaError> {
    let mut out = Vec::with_capacity(x.len());
    for b in x {
        if !validate_closed_negative(b) {
            return Err(FormulaError::NotClosedNegative(b.to_string()));
        }
        let PropFormula::Imp(c, _) = b else {
            unreachable!("validated closed negative axiom has implication shape")
        };
        out.push(ModalFormula::neg(corsi(c)));
    }
    Ok(out)
}

/// `~[](~^2k bot)`: the k-th axiom of the family that pins down the modal
/// companions of VF above N.
pub fn neg2k_axiom(k: usize) -> ModalFormula {
    let mut body = ModalFormula::Falsum;
    for _ in 0..2 * k {
        body = ModalFormula::neg(body);
    }
    ModalFormula::neg(ModalFormula::Box(Box::new(body)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_modal, parse_prop};

    fn p() -> PropFormula {
        PropFormula::atom("p")
    }

    #[test]
    fn display_minimal_parens() {
        let f = PropFormula::imp(PropFormula::and(p(), PropFormula::atom("q")), p());
        assert_eq!(f.to_string(), "p & q -> p");
        let g = PropFormula::imp(PropFormula::imp(p(), p()), p());
        assert_eq!(g.to_string(), "(p -> p) -> p");
        let h = ModalFormula::Box(Box::new(ModalFormula::imp(
            ModalFormula::atom("p"),
            ModalFormula::atom("p"),
        )));
        assert_eq!(h.to_string(), "[](p -> p)");
    }

    #[test]
    fn order_is_node_count_then_rendering() {
        let small = PropFormula::Falsum;
        let big = PropFormula::top();
        assert!(small < big);
        // same node count: "bot" < "p" lexicographically
        assert!(PropFormula::Falsum < p());
    }

    #[test]
    fn sub_x_of_atom() {
        let got = sub_x(&p(), &[]);
        let want: BTreeSet<_> = [p(), PropFormula::Falsum, PropFormula::top()]
            .into_iter()
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn sub_x_of_implication() {
        let got = sub_x(&parse_prop("p -> q").unwrap(), &[]);
        let want: BTreeSet<_> = [
            p(),
            PropFormula::atom("q"),
            parse_prop("p -> q").unwrap(),
            PropFormula::Falsum,
            PropFormula::top(),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn sub_x_with_axiom_unfolds_sugar() {
        // ~~top expands to ((bot -> bot) -> bot) -> bot; its subformulas
        // are the three nested implications and bot itself.
        let axiom = parse_prop("~~top").unwrap();
        let got = sub_x(&p(), &[axiom]);
        let want: BTreeSet<_> = [
            p(),
            PropFormula::Falsum,
            parse_prop("bot -> bot").unwrap(),
            parse_prop("(bot -> bot) -> bot").unwrap(),
            parse_prop("((bot -> bot) -> bot) -> bot").unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn complementary_peels_one_negation() {
        let not_p = parse_modal("~p").unwrap();
        assert_eq!(complementary(&not_p), ModalFormula::atom("p"));
        assert_eq!(complementary(&ModalFormula::atom("p")), not_p);
    }

    #[test]
    fn sub_y_closure_of_boxed_atom() {
        // Hand-closing the two rules from []p: subformulas give p, the
        // complementary rule gives ~[]p and ~p, their subformulas give bot,
        // and ~bot = top joins as well.
        let got = sub_y(&parse_modal("[]p").unwrap(), &[]);
        let want: BTreeSet<_> = [
            parse_modal("[]p").unwrap(),
            parse_modal("p").unwrap(),
            parse_modal("~[]p").unwrap(),
            parse_modal("~p").unwrap(),
            ModalFormula::Falsum,
            ModalFormula::top(),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn sub_y_is_a_fixpoint() {
        let a = parse_modal("[](p -> []q) | ~[]bot").unwrap();
        let y = vec![parse_modal("~[]bot").unwrap()];
        let set = sub_y(&a, &y);
        for b in &set {
            assert!(set.contains(&complementary(b)), "missing ~({b})");
            for s in b.subformulas() {
                assert!(set.contains(&s), "missing subformula {s} of {b}");
            }
        }
    }

    #[test]
    fn corsi_clauses() {
        assert_eq!(corsi(&p()), ModalFormula::atom("p"));
        assert_eq!(
            corsi(&parse_prop("p -> q").unwrap()),
            parse_modal("[](p -> q)").unwrap()
        );
        // ~~top = ((bot->bot)->bot)->bot translates clause by clause
        assert_eq!(
            corsi(&parse_prop("~~top").unwrap()),
            parse_modal("[]([]([](bot -> bot) -> bot) -> bot)").unwrap()
        );
    }

    #[test]
    fn godel_clauses() {
        assert_eq!(godel(&p()), parse_modal("[]p").unwrap());
        assert_eq!(godel(&PropFormula::Falsum), ModalFormula::Falsum);
        assert_eq!(
            godel(&parse_prop("p -> q").unwrap()),
            parse_modal("[]([]p -> []q)").unwrap()
        );
    }

    #[test]
    fn closed_negative_validation() {
        assert!(validate_closed_negative(&parse_prop("~~top").unwrap()));
        assert!(validate_closed_negative(&parse_prop("~(top -> ~top)").unwrap()));
        assert!(validate_closed_negative(&parse_prop("~bot").unwrap()));
        assert!(!validate_closed_negative(&parse_prop("~top").unwrap()));
        assert!(!validate_closed_negative(&parse_prop("~p").unwrap()));
        // top expands to bot -> bot, which is exactly ~bot
        assert!(validate_closed_negative(&parse_prop("top").unwrap()));
        assert!(!validate_closed_negative(&parse_prop("p -> bot").unwrap()));
    }

    #[test]
    fn x_star_translates_bodies_only() {
        let got = x_star(&[parse_prop("~~top").unwrap()]).unwrap();
        assert_eq!(got, vec![parse_modal("[]([](bot -> bot) -> bot) -> bot").unwrap()]);
        assert_eq!(x_star(&[]).unwrap(), Vec::new());
        let got = x_star(&[parse_prop("~bot").unwrap()]).unwrap();
        assert_eq!(got, vec![parse_modal("bot -> bot").unwrap()]);
        assert!(x_star(&[parse_prop("~p").unwrap()]).is_err());
    }

    #[test]
    fn neg2k_instances() {
        assert_eq!(neg2k_axiom(0), parse_modal("~[]bot").unwrap());
        assert_eq!(neg2k_axiom(1), parse_modal("~[]~~bot").unwrap());
        assert_eq!(neg2k_axiom(2), parse_modal("~[]~~~~bot").unwrap());
    }

    #[test]
    fn modal_depth_counts_nesting() {
        assert_eq!(parse_modal("[][]p & []q").unwrap().modal_depth(), 2);
        assert_eq!(parse_modal("p -> q").unwrap().modal_depth(), 0);
    }
}
