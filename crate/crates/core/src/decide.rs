//! Top-level rule verdicts: validity, admissibility, joint
//! inadmissibility, substitution checks, and reflexive extensions.
//!
//! A rule in reduced normal form has premise P (disjunct ids) and
//! conclusion J ⊆ P or a bare variable; write I = P − J. The rule is
//! invalid exactly when some first-family set W fits inside P and still
//! meets I, and inadmissible when such a W exists in the second family.
//! Variable conclusions use the variant condition instead: some member
//! of W misses the variable among its plain signs. Searches run
//! smallest-first over the consistent disjuncts of P, so witnesses are
//! canonical and verdicts deterministic.

use std::collections::BTreeSet;

use crate::error::{Error, Limits};
use crate::formula::{apply_substitution, Formula, Substitution};
use crate::prover::is_theorem;
use crate::rnf::{Conclusion, Disjunct, RnfRule};
use crate::supp::{search_family, Family};

/// Rejection condition a counter-set must meet for one rule.
enum Cond {
    /// W must contain one of these ids (premise ids outside the
    /// conclusion).
    Meets(BTreeSet<u32>),
    /// W must contain a member whose plain signs miss this variable bit.
    MissesVar(u32),
}

impl Cond {
    fn of(rule: &RnfRule) -> Cond {
        match &rule.conclusion {
            Conclusion::Set(j) => Cond::Meets(rule.premise.difference(j).copied().collect()),
            Conclusion::Var(k) => Cond::MissesVar(1 << (k - 1)),
        }
    }

    fn satisfiable(&self) -> bool {
        match self {
            Cond::Meets(ids) => !ids.is_empty(),
            Cond::MissesVar(_) => true,
        }
    }

    fn holds(&self, n: u32, w: &BTreeSet<u32>) -> bool {
        match self {
            Cond::Meets(ids) => w.iter().any(|id| ids.contains(id)),
            Cond::MissesVar(bit) => w
                .iter()
                .any(|&id| Disjunct::from_id(n, id).is_ok_and(|d| d.theta & bit == 0)),
        }
    }
}

fn counter_set(
    rule: &RnfRule,
    family: Family,
    limits: &Limits,
) -> Result<Option<BTreeSet<u32>>, Error> {
    rule.validate()?;
    let cond = Cond::of(rule);
    if !cond.satisfiable() {
        return Ok(None);
    }
    search_family(rule.n, &rule.premise, family, |w| cond.holds(rule.n, w), limits)
}

/// True when no first-family counter-set exists: every model making the
/// premise globally true makes the conclusion globally true.
pub fn is_valid_rule(rule: &RnfRule, limits: &Limits) -> Result<bool, Error> {
    Ok(counter_set(rule, Family::Supp1, limits)?.is_none())
}

/// Smallest first-family counter-set; None means the rule is valid.
pub fn invalidity_witness(
    rule: &RnfRule,
    limits: &Limits,
) -> Result<Option<BTreeSet<u32>>, Error> {
    counter_set(rule, Family::Supp1, limits)
}

/// Admissibility verdict, with the counter-set for the negative case.
pub fn is_admissible(
    rule: &RnfRule,
    limits: &Limits,
) -> Result<(bool, Option<BTreeSet<u32>>), Error> {
    let w = counter_set(rule, Family::Supp2, limits)?;
    Ok((w.is_none(), w))
}

/// Whether one substitution rejects every rule at once: a single
/// second-family set inside every premise that meets every rule's
/// condition. All rules must share one variable count.
pub fn joint_inadmissible(
    rules: &[RnfRule],
    limits: &Limits,
) -> Result<(bool, Option<BTreeSet<u32>>), Error> {
    let n = match rules.first() {
        Some(r) => r.n,
        None => return Err(Error::invalid("joint check needs at least one rule")),
    };
    let mut universe = rules[0].premise.clone();
    let mut conds = Vec::with_capacity(rules.len());
    for rule in rules {
        rule.validate()?;
        if rule.n != n {
            return Err(Error::invalid("joint rules must share one variable count"));
        }
        let cond = Cond::of(rule);
        if !cond.satisfiable() {
            return Ok((false, None));
        }
        universe = universe.intersection(&rule.premise).copied().collect();
        conds.push(cond);
    }
    let w = search_family(
        n,
        &universe,
        Family::Supp2,
        |w| conds.iter().all(|c| c.holds(n, w)),
        limits,
    )?;
    Ok((w.is_some(), w))
}

/// Whether sigma turns every premise into a theorem but not the
/// conclusion.
pub fn rejects(
    sigma: &Substitution,
    premises: &[Formula],
    conclusion: &Formula,
    limits: &Limits,
) -> Result<bool, Error> {
    for premise in premises {
        if !is_theorem(&apply_substitution(sigma, premise), limits)? {
            return Ok(false);
        }
    }
    Ok(!is_theorem(&apply_substitution(sigma, conclusion), limits)?)
}

/// Extends an invalid set-conclusion rule with a reflexive disjunct x
/// (equal plain and diamond signs) added to both premise and conclusion,
/// chosen so the extended rule is inadmissible. The mirror of a witness
/// member outside the conclusion is preferred; when that choice
/// degenerates (the extension erodes the whole premise/conclusion
/// difference), the remaining reflexive disjuncts are tried in id order.
pub fn reflexive_extension(rule: &RnfRule, limits: &Limits) -> Result<RnfRule, Error> {
    let j = match &rule.conclusion {
        Conclusion::Set(j) => j.clone(),
        Conclusion::Var(_) => {
            return Err(Error::invalid(
                "reflexive extension applies to set-conclusion rules only",
            ))
        }
    };
    let witness = counter_set(rule, Family::Supp1, limits)?
        .ok_or_else(|| Error::invalid("rule is valid; nothing to extend"))?;
    let n = rule.n;

    let mut candidates: Vec<u32> = Vec::new();
    for &z in witness.iter().filter(|id| !j.contains(id)) {
        let dia = Disjunct::from_id(n, z)?.theta_dia;
        let x = Disjunct::new(n, dia, dia)?.id();
        if !candidates.contains(&x) {
            candidates.push(x);
        }
    }
    for dia in 0..1u32 << n {
        let x = Disjunct::new(n, dia, dia)?.id();
        if !candidates.contains(&x) {
            candidates.push(x);
        }
    }

    for x in candidates {
        let mut premise = rule.premise.clone();
        premise.insert(x);
        let mut conclusion = j.clone();
        conclusion.insert(x);
        let extended = RnfRule {
            n,
            premise,
            conclusion: Conclusion::Set(conclusion),
        };
        if !is_admissible(&extended, limits)?.0 {
            return Ok(extended);
        }
    }
    Err(Error::invalid(
        "no reflexive extension of this rule is inadmissible",
    ))
}

/// Extends a jointly invalid family of set-conclusion rules with one
/// shared reflexive disjunct x so the extended family is jointly
/// inadmissible. Independent per-rule extensions can pick clashing
/// disjuncts and lose the common counter-set; sharing x restores it.
pub fn joint_reflexive_extension(
    rules: &[RnfRule],
    limits: &Limits,
) -> Result<Vec<RnfRule>, Error> {
    let n = match rules.first() {
        Some(r) => r.n,
        None => return Err(Error::invalid("joint extension needs at least one rule")),
    };
    let mut universe = rules[0].premise.clone();
    let mut conds = Vec::with_capacity(rules.len());
    let mut conclusions = Vec::with_capacity(rules.len());
    for rule in rules {
        rule.validate()?;
        if rule.n != n {
            return Err(Error::invalid("joint rules must share one variable count"));
        }
        match &rule.conclusion {
            Conclusion::Set(j) => conclusions.push(j.clone()),
            Conclusion::Var(_) => {
                return Err(Error::invalid(
                    "reflexive extension applies to set-conclusion rules only",
                ))
            }
        }
        let cond = Cond::of(rule);
        if !cond.satisfiable() {
            return Err(Error::invalid("rules are jointly valid; nothing to extend"));
        }
        universe = universe.intersection(&rule.premise).copied().collect();
        conds.push(cond);
    }
    let witness = search_family(
        n,
        &universe,
        Family::Supp1,
        |w| conds.iter().all(|c| c.holds(n, w)),
        limits,
    )?
    .ok_or_else(|| Error::invalid("rules are jointly valid; nothing to extend"))?;

    let mut candidates: Vec<u32> = Vec::new();
    for &z in &witness {
        let dia = Disjunct::from_id(n, z)?.theta_dia;
        let x = Disjunct::new(n, dia, dia)?.id();
        if !candidates.contains(&x) {
            candidates.push(x);
        }
    }
    for dia in 0..1u32 << n {
        let x = Disjunct::new(n, dia, dia)?.id();
        if !candidates.contains(&x) {
            candidates.push(x);
        }
    }

    for x in candidates {
        let extended: Vec<RnfRule> = rules
            .iter()
            .zip(&conclusions)
            .map(|(rule, j)| {
                let mut premise = rule.premise.clone();
                premise.insert(x);
                let mut conclusion = j.clone();
                conclusion.insert(x);
                RnfRule {
                    n,
                    premise,
                    conclusion: Conclusion::Set(conclusion),
                }
            })
            .collect();
        if joint_inadmissible(&extended, limits)?.0 {
            return Ok(extended);
        }
    }
    Err(Error::invalid(
        "no shared reflexive extension of these rules is jointly inadmissible",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;
    use crate::rnf::{parse_rule, to_rnf};

    fn ids(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    fn set_rule(n: u32, premise: &[u32], j: &[u32]) -> RnfRule {
        RnfRule {
            n,
            premise: ids(premise),
            conclusion: Conclusion::Set(ids(j)),
        }
    }

    fn var_rule(n: u32, premise: &[u32], k: u32) -> RnfRule {
        RnfRule {
            n,
            premise: ids(premise),
            conclusion: Conclusion::Var(k),
        }
    }

    fn pipeline(text: &str) -> RnfRule {
        let (premises, conclusion) = parse_rule(text).unwrap();
        to_rnf(&premises, &conclusion, &Limits::default()).unwrap()
    }

    fn f(text: &str) -> Formula {
        text.parse().unwrap()
    }

    #[test]
    fn identity_rule_is_valid() {
        let lim = Limits::default();
        let r = set_rule(1, &[3], &[3]);
        assert!(is_valid_rule(&r, &lim).unwrap());
        assert_eq!(is_admissible(&r, &lim).unwrap(), (true, None));
    }

    #[test]
    fn dropping_a_disjunct_spoils_validity() {
        let lim = Limits::default();
        let r = set_rule(1, &[2, 3], &[3]);
        assert!(!is_valid_rule(&r, &lim).unwrap());
        assert_eq!(invalidity_witness(&r, &lim).unwrap(), Some(ids(&[2, 3])));
        let (adm, w) = is_admissible(&r, &lim).unwrap();
        assert!(!adm);
        assert_eq!(w, Some(ids(&[2, 3])));
    }

    #[test]
    fn flagship_verdicts_through_the_pipeline() {
        let lim = Limits::default();

        let r = pipeline("<>p1 / p1");
        assert!(!is_valid_rule(&r, &lim).unwrap());
        assert_eq!(is_admissible(&r, &lim).unwrap(), (false, Some(ids(&[2, 3]))));

        let r = pipeline("p1 / p1");
        assert_eq!(is_admissible(&r, &lim).unwrap(), (true, None));

        // Premise-globally-true forces the boxed conclusion globally,
        // so this one is even valid, not merely admissible.
        let r = pipeline("p1 / []p1");
        assert!(is_valid_rule(&r, &lim).unwrap());
        assert_eq!(is_admissible(&r, &lim).unwrap(), (true, None));

        let r = pipeline("<>p1, p1 <-> []p1 / p1");
        assert_eq!(is_admissible(&r, &lim).unwrap(), (false, Some(ids(&[5, 14]))));
    }

    #[test]
    fn joint_examples() {
        let lim = Limits::default();

        let single = [pipeline("<>p1 / p1")];
        assert_eq!(
            joint_inadmissible(&single, &lim).unwrap(),
            (true, Some(ids(&[2, 3])))
        );

        let pair = [set_rule(1, &[2, 3], &[3]), set_rule(1, &[2, 3], &[2])];
        assert_eq!(
            joint_inadmissible(&pair, &lim).unwrap(),
            (true, Some(ids(&[2, 3])))
        );

        // A rule whose premise equals its conclusion can never fail.
        let blocked = [set_rule(1, &[2, 3], &[3]), set_rule(1, &[3], &[3])];
        assert_eq!(joint_inadmissible(&blocked, &lim).unwrap(), (false, None));

        assert!(joint_inadmissible(&[], &lim).is_err());
        let mismatched = [set_rule(1, &[2, 3], &[3]), set_rule(2, &[5], &[5])];
        assert!(joint_inadmissible(&mismatched, &lim).is_err());
    }

    #[test]
    fn substitution_route_agrees_on_the_flagships() {
        let lim = Limits::default();

        let premises = [f("<>p1")];
        let conclusion = f("p1");
        let mut sigma = Substitution::new();
        sigma.insert(1, f("p1 -> []p1"));
        assert!(rejects(&sigma, &premises, &conclusion, &lim).unwrap());
        sigma.insert(1, Formula::top());
        assert!(!rejects(&sigma, &premises, &conclusion, &lim).unwrap());

        let premises = [f("<>p1"), f("p1 <-> []p1")];
        let mut sigma = Substitution::new();
        sigma.insert(1, f("[](<>p2 -> []<>p2)"));
        assert!(rejects(&sigma, &premises, &conclusion, &lim).unwrap());
    }

    #[test]
    fn reflexive_extension_examples() {
        let lim = Limits::default();

        // The mirror of the witness member is already present; the rule
        // comes back unchanged and is indeed inadmissible.
        let r = set_rule(1, &[2, 3], &[3]);
        let ext = reflexive_extension(&r, &lim).unwrap();
        assert_eq!(ext, r);
        assert!(!is_admissible(&ext, &lim).unwrap().0);

        // Witness member with empty diamond signs: (∅,∅) is appended.
        let r = set_rule(1, &[0, 2, 3], &[]);
        let ext = reflexive_extension(&r, &lim).unwrap();
        assert_eq!(ext, set_rule(1, &[0, 2, 3], &[0]));
        assert!(!is_admissible(&ext, &lim).unwrap().0);

        // Degenerate mirror (the witness member is its own mirror and
        // the only premise/conclusion difference): another reflexive
        // disjunct is chosen instead.
        let r = set_rule(1, &[2, 3], &[2]);
        let ext = reflexive_extension(&r, &lim).unwrap();
        assert_eq!(ext, set_rule(1, &[0, 2, 3], &[0, 2]));
        assert!(!is_admissible(&ext, &lim).unwrap().0);

        assert!(reflexive_extension(&set_rule(1, &[3], &[3]), &lim).is_err());
        assert!(reflexive_extension(&var_rule(1, &[3], 1), &lim).is_err());
    }

    #[test]
    fn exhaustive_one_variable_scan() {
        let lim = Limits::default();
        let pool = [0u32, 2, 3];
        let mut seen_valid = 0;
        let mut seen_invalid = 0;

        for pmask in 1u32..8 {
            let premise: Vec<u32> = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| pmask & (1 << i) != 0)
                .map(|(_, &id)| id)
                .collect();

            let mut rules = vec![var_rule(1, &premise, 1)];
            for jmask in 0u32..1 << premise.len() {
                let j: Vec<u32> = premise
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| jmask & (1 << i) != 0)
                    .map(|(_, &id)| id)
                    .collect();
                rules.push(set_rule(1, &premise, &j));
            }

            for rule in rules {
                let valid = is_valid_rule(&rule, &lim).unwrap();
                let (adm, witness) = is_admissible(&rule, &lim).unwrap();
                if valid {
                    seen_valid += 1;
                    assert!(adm, "valid but inadmissible: {rule:?}");
                } else {
                    seen_invalid += 1;
                }
                if let Some(w) = &witness {
                    assert!(!valid);
                    assert!(w.is_subset(&rule.premise));
                }

                if valid {
                    continue;
                }
                if let Conclusion::Set(j) = &rule.conclusion {
                    // Some witness member outside the conclusion refutes
                    // the conclusion disjunction at its own world.
                    let w = invalidity_witness(&rule, &lim).unwrap().unwrap();
                    let m = build_model(rule.n, &w).unwrap();
                    let concl = rule.conclusion_formula();
                    assert!(w
                        .iter()
                        .filter(|id| !j.contains(id))
                        .any(|&id| !m.eval(id as u64, &concl).unwrap()));

                    let ext = reflexive_extension(&rule, &lim).unwrap();
                    assert!(
                        !is_admissible(&ext, &lim).unwrap().0,
                        "extension of {rule:?} stayed admissible"
                    );
                }
            }
        }
        assert!(seen_valid > 0 && seen_invalid > 0);
    }

    #[test]
    fn jointly_invalid_pairs_extend_to_jointly_inadmissible() {
        let lim = Limits::default();
        let pool = [0u32, 2, 3];
        let mut all_rules = Vec::new();
        for pmask in 1u32..8 {
            let premise: Vec<u32> = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| pmask & (1 << i) != 0)
                .map(|(_, &id)| id)
                .collect();
            for jmask in 0u32..1 << premise.len() {
                let j: Vec<u32> = premise
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| jmask & (1 << i) != 0)
                    .map(|(_, &id)| id)
                    .collect();
                if j.len() < premise.len() {
                    all_rules.push(set_rule(1, &premise, &j));
                }
            }
        }

        let mut exercised = 0;
        for a in &all_rules {
            for b in &all_rules {
                let conds = [Cond::of(a), Cond::of(b)];
                let universe: BTreeSet<u32> =
                    a.premise.intersection(&b.premise).copied().collect();
                let jointly_invalid = search_family(
                    1,
                    &universe,
                    Family::Supp1,
                    |w| conds.iter().all(|c| c.holds(1, w)),
                    &lim,
                )
                .unwrap()
                .is_some();
                if !jointly_invalid {
                    continue;
                }
                exercised += 1;
                match joint_reflexive_extension(&[a.clone(), b.clone()], &lim) {
                    Ok(exts) => {
                        assert!(
                            joint_inadmissible(&exts, &lim).unwrap().0,
                            "extensions of {a:?} and {b:?} lost joint rejection"
                        );
                        // The shared disjunct is the only addition.
                        for (ext, orig) in exts.iter().zip([a, b]) {
                            let added: BTreeSet<u32> =
                                ext.premise.difference(&orig.premise).copied().collect();
                            assert!(added.len() <= 1);
                        }
                    }
                    Err(_) => {
                        // The candidate loop is a complete search, so
                        // failure must mean no shared reflexive disjunct
                        // admits a common counter-set. Certify that by
                        // direct enumeration.
                        for x in [0u32, 3] {
                            for smask in 1u32..8 {
                                let s: BTreeSet<u32> = [0u32, 2, 3]
                                    .iter()
                                    .enumerate()
                                    .filter(|(i, _)| smask & (1 << i) != 0)
                                    .map(|(_, &id)| id)
                                    .collect();
                                let inside = [a, b].iter().all(|r| {
                                    let mut p = r.premise.clone();
                                    p.insert(x);
                                    s.is_subset(&p)
                                });
                                let meets = [a, b].iter().all(|r| {
                                    let j = match &r.conclusion {
                                        Conclusion::Set(j) => j,
                                        Conclusion::Var(_) => unreachable!(),
                                    };
                                    s.iter().any(|id| !j.contains(id) && *id != x)
                                });
                                assert!(
                                    !(inside
                                        && meets
                                        && crate::supp::in_supp2(1, &s).unwrap()),
                                    "search missed x={x} W={s:?} for {a:?} and {b:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
        assert!(exercised > 50);
    }

    #[test]
    fn independent_extensions_can_clash_but_a_shared_one_cannot() {
        let lim = Limits::default();
        // These two are jointly invalid via W = {0}, yet their
        // independently chosen extensions pick different reflexive
        // disjuncts and no longer share a counter-set.
        let a = set_rule(1, &[0], &[]);
        let b = set_rule(1, &[0, 2, 3], &[3]);
        let independent = [
            reflexive_extension(&a, &lim).unwrap(),
            reflexive_extension(&b, &lim).unwrap(),
        ];
        assert!(!joint_inadmissible(&independent, &lim).unwrap().0);

        let shared = joint_reflexive_extension(&[a, b], &lim).unwrap();
        assert!(joint_inadmissible(&shared, &lim).unwrap().0);
        assert_eq!(shared[0], set_rule(1, &[0, 3], &[3]));
        assert_eq!(shared[1], set_rule(1, &[0, 2, 3], &[3]));
    }

    #[test]
    fn variable_conclusion_uses_the_sign_condition() {
        let lim = Limits::default();
        // Premise is the single disjunct that makes p1 true everywhere.
        assert!(is_valid_rule(&var_rule(1, &[3], 1), &lim).unwrap());
        // Adding the diamond-only disjunct breaks it: that member's
        // plain signs miss p1.
        let r = var_rule(1, &[2, 3], 1);
        assert!(!is_valid_rule(&r, &lim).unwrap());
        assert_eq!(is_admissible(&r, &lim).unwrap().1, Some(ids(&[2, 3])));
    }

    #[test]
    fn malformed_rules_are_rejected() {
        let lim = Limits::default();
        let bad = RnfRule {
            n: 1,
            premise: ids(&[2, 3]),
            conclusion: Conclusion::Set(ids(&[1])),
        };
        assert!(is_valid_rule(&bad, &lim).is_err());
        let bad = var_rule(1, &[2, 3], 2);
        assert!(is_admissible(&bad, &lim).is_err());
    }
}
