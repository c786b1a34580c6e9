//! Shared benchmark inputs: formulas from the one-variable catalog, rule
//! texts for the full normalize-and-decide pipeline, and small rule
//! systems for the decomposition driver.

use s4adm_core::{catalog, Entry, Formula, RuleSystem};

/// Catalog formulas paired with their display strings.
pub fn catalog_formulas() -> Vec<(String, Formula)> {
    catalog::entries()
        .into_iter()
        .map(|e| (e.formula.to_string(), e.formula))
        .collect()
}

/// Rule texts covering valid, admissible-only and inadmissible cases.
pub const RULES: [&str; 4] = [
    "p1 / p1",
    "p1 / []p1",
    "<>p1 / p1",
    "<>p1, p1 <-> []p1 / p1",
];

/// Systems the decomposition driver fans out on: a two-leaf toy and the
/// six-state instance that mixes splits, subtractions and simplification.
pub fn systems() -> Vec<(&'static str, RuleSystem)> {
    let entry = |w: &[u32], j: &[u32]| Entry::new(w.iter().copied(), j.iter().copied());
    vec![
        (
            "two_leaf_n1",
            RuleSystem::new(1, [entry(&[2, 3], &[3])]).unwrap(),
        ),
        (
            "six_state_n2",
            RuleSystem::new(2, [entry(&[1, 2, 3, 4, 10, 12], &[1])]).unwrap(),
        ),
    ]
}
