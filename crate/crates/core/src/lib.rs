//! Decision procedures for validity and admissibility of inference rules
//! in the modal logic S4.
//!
//! The pipeline: parse rules over `p1, p2, ...` ([`formula`]), bring them
//! into a reduced normal form whose premise and conclusion are disjunctions
//! of complete modal conjunctions ([`rnf`]), then decide validity and
//! admissibility by searching for support sets in finite canonical Kripke
//! models ([`model`], [`supp`], [`decide`]). Theoremhood itself is decided
//! by a signed tableau with loop checking ([`prover`]), explicit sequent
//! derivations can be checked against the G1s schemas ([`g1s`]), and the
//! algebra of substitution sets rejecting rule systems lives in
//! [`sdecomp`].

pub mod catalog;
pub mod decide;
pub mod error;
pub mod formula;
pub mod g1s;
pub mod kripke;
pub mod model;
pub mod prover;
pub mod rnf;
pub mod sdecomp;
pub mod supp;

pub use decide::{
    invalidity_witness, is_admissible, is_valid_rule, joint_inadmissible,
    joint_reflexive_extension, reflexive_extension, rejects,
};
pub use error::{Error, Limits};
pub use formula::{apply_substitution, Formula, Substitution};
pub use g1s::{check_derivation, CheckFailure, Derivation, RuleName, Sequent};
pub use kripke::KripkeModel;
pub use prover::{countermodel, has_property_star, has_property_star_star, is_theorem};
pub use rnf::{
    all_disjuncts, consistent_disjuncts, disjunct_formula, to_rnf, Conclusion, Disjunct, RnfRule,
};
pub use sdecomp::{decompose, Decomposition, Entry, Leaf, LeafKind, RuleSystem};
pub use supp::{find_supp2_witness, in_supp1, in_supp2, SuppConstraint};
