//! A fixed catalog of one-variable formulas useful as rejecting
//! substitutions.
//!
//! Every entry A satisfies `is_theorem(<>A)`. Most entries are not
//! themselves theorems, which makes σ(p1):=A reject the rule `<>p1 / p1`:
//! the premise instance is provable, the conclusion instance is not.
//! Entries that in addition satisfy `is_theorem(A <-> []A)` also handle
//! the premise `p1 <-> []p1` and so reject `<>p1, p1 <-> []p1 / p1`.
//! These two combinations are exactly [`has_property_star`] and
//! [`has_property_star_star`] from the prover module.

use serde::Serialize;

use crate::error::{Error, Limits};
use crate::formula::{parse, Formula};
use crate::prover::{has_property_star, has_property_star_star, is_theorem};

/// One catalog formula with its conventional 1-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub index: usize,
    pub formula: Formula,
}

const SOURCES: [&str; 18] = [
    "p1 -> []p1",
    "p1 -> []<>p1",
    "p1 -> <>[]p1",
    "p1 -> []<>[]p1",
    "p1 -> <>[]<>p1",
    "<>p1 -> []<>p1",
    "<>p1 -> <>[]<>p1",
    "<>[]p1 -> []<>[]p1",
    "<>[]<>p1 -> []<>p1",
    "[](p1 -> []<>p1)",
    "[](p1 -> <>[]<>p1)",
    "[]([]p1 -> []<>[]p1)",
    "[](<>p1 -> []<>p1)",
    "[](<>p1 -> <>[]<>p1)",
    "[](<>[]p1 -> []<>[]p1)",
    "[](<>[]<>p1 -> []<>p1)",
    "[]<>(p1 -> []<>[]p1)",
    "[]<>(<>p1 -> []<>p1)",
];

/// The 18 catalog formulas in index order.
pub fn entries() -> Vec<CatalogEntry> {
    SOURCES
        .iter()
        .enumerate()
        .map(|(i, s)| CatalogEntry {
            index: i + 1,
            formula: parse(s).expect("catalog source parses"),
        })
        .collect()
}

/// Prover-computed classification of one catalog entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryStatus {
    pub index: usize,
    pub formula: String,
    /// `|- A`
    pub theorem: bool,
    /// `|- <>A`
    pub diamond_theorem: bool,
    /// `|- A <-> []A`
    pub box_equivalent: bool,
    /// refutable with provable possibilitation
    pub star: bool,
    /// `star` plus box equivalence
    pub star_star: bool,
}

/// Classifies every catalog entry with the prover.
pub fn classify(limits: &Limits) -> Result<Vec<EntryStatus>, Error> {
    entries()
        .into_iter()
        .map(|e| {
            let a = &e.formula;
            Ok(EntryStatus {
                index: e.index,
                formula: a.to_string(),
                theorem: is_theorem(a, limits)?,
                diamond_theorem: is_theorem(&Formula::dia(a.clone()), limits)?,
                box_equivalent: is_theorem(
                    &Formula::iff(a.clone(), Formula::boxed(a.clone())),
                    limits,
                )?,
                star: has_property_star(a, limits)?,
                star_star: has_property_star_star(a, limits)?,
            })
        })
        .collect()
}
