//! HyperLTL model checking by automata-based quantifier elimination.
//!
//! The pipeline translates the quantifier-free body of a formula into a
//! Büchi automaton over tuples of traces and eliminates quantifiers from the
//! innermost outwards against a finite transition system. A leading block of
//! universal quantifiers is discharged by a single language-inclusion query.

pub mod automata;
pub mod bench;
pub mod budget;
pub mod checker;
pub mod formula;
pub mod inclusion;
pub mod oracle;
pub mod system;
