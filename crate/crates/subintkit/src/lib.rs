//! A decision-procedure and countermodel toolkit for the very weak
//! subintuitionistic logic VF with closed negative axiom extensions, and for
//! the pure logic of necessitation N with closed modal extensions, over FMT
//! (formula-indexed relation) semantics.
//!
//! The pieces fit together like this:
//!
//! - [`formula`] and [`parse`]: the two formula languages, their grammar,
//!   subformula closures, and the Gödel-style translations between them.
//! - [`semantics`]: finite FMT frames and models, forcing, validity, and the
//!   frame conditions matching closed negative axioms.
//! - [`nec`]: the decision procedure and canonical finite countermodels for
//!   N plus closed axioms.
//! - [`vf`]: the decision procedure for VF plus closed negative axioms (via
//!   the modal companion), tableau countermodels, the slash relation, and
//!   the disjunction-property splitter.
//! - [`bridge`]: the model transformations connecting the two semantics.
//! - [`hilbert`]: checkable Hilbert-style proof certificates and a bounded
//!   proof search.
//! - [`json`], [`dot`]: the file formats spoken by the `subintkit` binary.
//! - [`corpus`]: seeded random corpora and the fuzz property harness.
//!
//! The `book/` directory of the repository walks through the same material
//! chapter by chapter; its code snippets compile as doctests via [`guide`].

pub mod boolsat;
pub mod bridge;
pub mod caps;
pub mod corpus;
pub mod dot;
pub mod formula;
pub mod guide;
pub mod hilbert;
pub mod json;
pub mod nec;
pub mod parse;
pub mod semantics;
pub mod vf;

pub use caps::Caps;
pub use formula::{ModalFormula, PropFormula};
pub use nec::NSession;
pub use vf::VfSession;
