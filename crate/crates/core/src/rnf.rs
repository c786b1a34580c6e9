//! Disjuncts over n variables and reduction of rules to normal form.
//!
//! A disjunct fixes, for each of the variables p1..pn, the truth value of
//! both the variable and its possibilitation: it is the conjunction
//! `⋀ pᵢ^±  ∧  ⋀ <>pᵢ^±`. The two sign vectors are kept as n-bit masks
//! `theta` (plain) and `theta_dia` (diamonded). Reflexivity forces
//! `theta ⊆ theta_dia` on satisfiable disjuncts; those are the
//! "consistent" ones, and there are exactly 3ⁿ of them among the 4ⁿ.
//!
//! A rule in reduced normal form has a disjunction of disjuncts as its
//! premise and either a sub-disjunction or a bare variable as its
//! conclusion. [`to_rnf`] brings an arbitrary rule into this shape by
//! renaming diamonded subformulas into fresh variables (with defining
//! equivalences added to the premise) and then selecting the consistent
//! disjuncts whose sign pattern propositionally entails the renamed
//! premise.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Limits};
use crate::formula::Formula;

/// Sign pattern for the variables p1..pn and their possibilitations.
/// Bit i-1 of `theta` is the sign of pᵢ, bit i-1 of `theta_dia` the sign
/// of `<>pᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Disjunct {
    pub n: u32,
    pub theta: u32,
    pub theta_dia: u32,
}

/// Hard ceiling on the variable count; 4ⁿ disjuncts otherwise.
pub const MAX_VARS: u32 = 6;

fn check_n(n: u32) -> Result<(), Error> {
    if (1..=MAX_VARS).contains(&n) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "variable count {n} outside the supported range 1..={MAX_VARS}"
        )))
    }
}

impl Disjunct {
    pub fn new(n: u32, theta: u32, theta_dia: u32) -> Result<Self, Error> {
        check_n(n)?;
        let full = (1u32 << n) - 1;
        if theta > full || theta_dia > full {
            return Err(Error::invalid(format!(
                "sign mask wider than {n} variable(s)"
            )));
        }
        Ok(Disjunct { n, theta, theta_dia })
    }

    /// Canonical id: low n bits `theta`, next n bits `theta_dia`.
    pub fn id(&self) -> u32 {
        (self.theta_dia << self.n) | self.theta
    }

    pub fn from_id(n: u32, id: u32) -> Result<Self, Error> {
        check_n(n)?;
        if id >= 1u32 << (2 * n) {
            return Err(Error::invalid(format!(
                "disjunct id {id} out of range for {n} variable(s)"
            )));
        }
        let full = (1u32 << n) - 1;
        Ok(Disjunct {
            n,
            theta: id & full,
            theta_dia: id >> n,
        })
    }

    /// Satisfiable at a reflexive world: every plain-true variable is
    /// also diamond-true.
    pub fn consistent(&self) -> bool {
        self.theta & !self.theta_dia == 0
    }

    /// The literal conjunction `p1^± & … & pn^± & <>p1^± & … & <>pn^±`.
    pub fn formula(&self) -> Formula {
        let lit = |i: u32, mask: u32, modal: bool| {
            let base = if modal {
                Formula::dia(Formula::var(i))
            } else {
                Formula::var(i)
            };
            if mask & (1 << (i - 1)) != 0 {
                base
            } else {
                Formula::not(base)
            }
        };
        Formula::conj(
            (1..=self.n)
                .map(|i| lit(i, self.theta, false))
                .chain((1..=self.n).map(|i| lit(i, self.theta_dia, true))),
        )
    }
}

/// All 4ⁿ disjuncts in ascending id order.
pub fn all_disjuncts(n: u32) -> Result<Vec<Disjunct>, Error> {
    check_n(n)?;
    Ok((0..1u32 << (2 * n))
        .map(|id| Disjunct::from_id(n, id).unwrap())
        .collect())
}

/// The 3ⁿ consistent disjuncts in ascending id order.
pub fn consistent_disjuncts(n: u32) -> Result<Vec<Disjunct>, Error> {
    Ok(all_disjuncts(n)?
        .into_iter()
        .filter(Disjunct::consistent)
        .collect())
}

/// Convenience wrapper for [`Disjunct::formula`] on an id.
pub fn disjunct_formula(n: u32, id: u32) -> Result<Formula, Error> {
    Ok(Disjunct::from_id(n, id)?.formula())
}

/// Conclusion of a rule in reduced normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conclusion {
    /// A sub-disjunction of the premise, as disjunct ids.
    Set(BTreeSet<u32>),
    /// A bare variable pₖ.
    Var(u32),
}

/// Rule whose premise is a disjunction of disjuncts (given by id) and
/// whose conclusion is either a sub-disjunction or a variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnfRule {
    pub n: u32,
    pub premise: BTreeSet<u32>,
    pub conclusion: Conclusion,
}

impl RnfRule {
    /// Structural soundness: ids in range, set conclusions inside the
    /// premise, variable conclusions within arity.
    pub fn validate(&self) -> Result<(), Error> {
        check_n(self.n)?;
        for &id in &self.premise {
            Disjunct::from_id(self.n, id)?;
        }
        match &self.conclusion {
            Conclusion::Set(j) => {
                if !j.is_subset(&self.premise) {
                    return Err(Error::invalid(
                        "conclusion ids must be a subset of the premise ids",
                    ));
                }
            }
            Conclusion::Var(k) => {
                if !(1..=self.n).contains(k) {
                    return Err(Error::invalid(format!(
                        "conclusion variable p{k} outside arity {}",
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }

    /// The premise as a formula (disjunction in ascending id order).
    pub fn premise_formula(&self) -> Formula {
        Formula::disj(
            self.premise
                .iter()
                .map(|&id| disjunct_formula(self.n, id).expect("validated id")),
        )
    }

    /// The conclusion as a formula.
    pub fn conclusion_formula(&self) -> Formula {
        match &self.conclusion {
            Conclusion::Var(k) => Formula::var(*k),
            Conclusion::Set(j) => Formula::disj(
                j.iter()
                    .map(|&id| disjunct_formula(self.n, id).expect("validated id")),
            ),
        }
    }
}

/// Parses the rule text format `f1, f2, ... / g`.
pub fn parse_rule(text: &str) -> Result<(Vec<Formula>, Formula), Error> {
    let slash = match text.find('/') {
        Some(i) => i,
        None => {
            return Err(Error::invalid(
                "a rule is written `premise, ..., premise / conclusion`",
            ))
        }
    };
    if text[slash + 1..].contains('/') {
        return Err(Error::invalid("a rule contains exactly one '/'"));
    }
    let at = |base: usize, e: Error| match e {
        Error::Parse { pos, msg } => Error::Parse {
            pos: base + pos,
            msg,
        },
        other => other,
    };
    let mut premises = Vec::new();
    let left = &text[..slash];
    if !left.trim().is_empty() {
        let mut start = 0;
        for chunk in left.split(',') {
            premises.push(crate::formula::parse(chunk).map_err(|e| at(start, e))?);
            start += chunk.len() + 1;
        }
    }
    let conclusion =
        crate::formula::parse(&text[slash + 1..]).map_err(|e| at(slash + 1, e))?;
    Ok((premises, conclusion))
}

/// Replaces every `[]A` by `~<>~A`.
fn box_free(g: &Formula) -> Formula {
    match g {
        Formula::Bot | Formula::Var(_) => g.clone(),
        Formula::Not(a) => Formula::not(box_free(a)),
        Formula::And(a, b) => Formula::and(box_free(a), box_free(b)),
        Formula::Or(a, b) => Formula::or(box_free(a), box_free(b)),
        Formula::Imp(a, b) => Formula::imp(box_free(a), box_free(b)),
        Formula::Iff(a, b) => Formula::iff(box_free(a), box_free(b)),
        Formula::Box(a) => Formula::not(Formula::dia(Formula::not(box_free(a)))),
        Formula::Dia(a) => Formula::dia(box_free(a)),
    }
}

/// Rewrites a box-free formula so every `<>` applies to a variable,
/// naming each compound diamond body with a fresh variable. Shared
/// bodies share their name.
struct Renamer {
    next: u32,
    defs: Vec<(u32, Formula)>,
    memo: HashMap<Formula, u32>,
}

impl Renamer {
    fn flatten(&mut self, g: &Formula) -> Formula {
        match g {
            Formula::Bot | Formula::Var(_) => g.clone(),
            Formula::Not(a) => Formula::not(self.flatten(a)),
            Formula::And(a, b) => Formula::and(self.flatten(a), self.flatten(b)),
            Formula::Or(a, b) => Formula::or(self.flatten(a), self.flatten(b)),
            Formula::Imp(a, b) => Formula::imp(self.flatten(a), self.flatten(b)),
            Formula::Iff(a, b) => Formula::iff(self.flatten(a), self.flatten(b)),
            Formula::Dia(a) => {
                let body = self.flatten(a);
                if let Formula::Var(k) = body {
                    Formula::dia(Formula::var(k))
                } else {
                    let k = match self.memo.get(&body) {
                        Some(&k) => k,
                        None => {
                            self.next += 1;
                            let k = self.next;
                            self.memo.insert(body.clone(), k);
                            self.defs.push((k, body));
                            k
                        }
                    };
                    Formula::dia(Formula::var(k))
                }
            }
            Formula::Box(_) => unreachable!("boxes were rewritten away"),
        }
    }
}

/// Truth of a flattened formula under a disjunct's sign pattern: pᵢ reads
/// bit i of `theta`, `<>pᵢ` bit i of `theta_dia`.
fn holds_under(g: &Formula, theta: u32, theta_dia: u32) -> bool {
    match g {
        Formula::Bot => false,
        Formula::Var(i) => theta & (1 << (i - 1)) != 0,
        Formula::Dia(a) => match a.as_ref() {
            Formula::Var(i) => theta_dia & (1 << (i - 1)) != 0,
            _ => unreachable!("diamonds apply to variables after flattening"),
        },
        Formula::Not(a) => !holds_under(a, theta, theta_dia),
        Formula::And(a, b) => holds_under(a, theta, theta_dia) && holds_under(b, theta, theta_dia),
        Formula::Or(a, b) => holds_under(a, theta, theta_dia) || holds_under(b, theta, theta_dia),
        Formula::Imp(a, b) => !holds_under(a, theta, theta_dia) || holds_under(b, theta, theta_dia),
        Formula::Iff(a, b) => holds_under(a, theta, theta_dia) == holds_under(b, theta, theta_dia),
        Formula::Box(_) => unreachable!("boxes were rewritten away"),
    }
}

/// Transforms an arbitrary rule into reduced normal form over
/// n′ ≥ n variables.
///
/// The rule and its image reject together: any substitution rejecting the
/// input extends (on the fresh variables) to one rejecting the output,
/// and conversely any rejecting substitution of the output restricts to
/// one of the input. Fresh variables continue the input numbering; an
/// input without variables is treated as using p1. The growth guard is
/// `limits.var_cap`.
pub fn to_rnf(
    premises: &[Formula],
    conclusion: &Formula,
    limits: &Limits,
) -> Result<RnfRule, Error> {
    let base_n = premises
        .iter()
        .chain(std::iter::once(conclusion))
        .map(Formula::max_var)
        .max()
        .unwrap_or(0)
        .max(1);

    let mut renamer = Renamer {
        next: base_n,
        defs: Vec::new(),
        memo: HashMap::new(),
    };
    let premise_flat = renamer.flatten(&box_free(&Formula::conj(premises.iter().cloned())));
    let conclusion_flat = renamer.flatten(&box_free(conclusion));

    let n = renamer.next;
    if n > limits.var_cap.min(MAX_VARS) {
        return Err(Error::limit(format!(
            "reduced form needs {n} variables, cap is {}",
            limits.var_cap.min(MAX_VARS)
        )));
    }

    let constraint = Formula::conj(
        std::iter::once(premise_flat).chain(
            renamer
                .defs
                .iter()
                .map(|(k, body)| Formula::iff(Formula::var(*k), body.clone())),
        ),
    );

    let mut premise_ids = BTreeSet::new();
    let mut kept = Vec::new();
    for d in consistent_disjuncts(n)? {
        if holds_under(&constraint, d.theta, d.theta_dia) {
            premise_ids.insert(d.id());
            kept.push(d);
        }
    }

    let conclusion = if let Formula::Var(k) = conclusion_flat {
        Conclusion::Var(k)
    } else {
        Conclusion::Set(
            kept.iter()
                .filter(|d| holds_under(&conclusion_flat, d.theta, d.theta_dia))
                .map(Disjunct::id)
                .collect(),
        )
    };

    let rule = RnfRule {
        n,
        premise: premise_ids,
        conclusion,
    };
    rule.validate()?;
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::prover::is_theorem;

    #[test]
    fn disjunct_counts_and_guards() {
        assert_eq!(all_disjuncts(1).unwrap().len(), 4);
        assert_eq!(all_disjuncts(2).unwrap().len(), 16);
        assert_eq!(all_disjuncts(3).unwrap().len(), 64);
        for n in 1..=4 {
            assert_eq!(
                consistent_disjuncts(n).unwrap().len(),
                3usize.pow(n),
                "n={n}"
            );
        }
        assert!(all_disjuncts(0).is_err());
        assert!(all_disjuncts(7).is_err());
        assert!(Disjunct::from_id(1, 4).is_err());
        assert!(Disjunct::new(1, 2, 0).is_err());
    }

    #[test]
    fn ids_are_stable_and_ordered() {
        for n in 1..=3 {
            for (i, d) in all_disjuncts(n).unwrap().iter().enumerate() {
                assert_eq!(d.id() as usize, i);
                assert_eq!(Disjunct::from_id(n, d.id()).unwrap(), *d);
            }
        }
        // n=1: (∅,∅)=0, ({p1},∅)=1 inconsistent, (∅,{p1})=2, ({p1},{p1})=3.
        let ids: Vec<u32> = consistent_disjuncts(1)
            .unwrap()
            .iter()
            .map(Disjunct::id)
            .collect();
        assert_eq!(ids, vec![0, 2, 3]);
    }

    #[test]
    fn formulas_spell_out_every_literal() {
        let d = Disjunct::new(2, 0b11, 0b11).unwrap();
        assert_eq!(d.formula().to_string(), "p1 & p2 & <>p1 & <>p2");
        let d = Disjunct::new(2, 0b10, 0b01).unwrap();
        assert_eq!(d.formula().to_string(), "~p1 & p2 & <>p1 & ~<>p2");
        let d = Disjunct::new(2, 0, 0).unwrap();
        assert_eq!(d.formula().to_string(), "~p1 & ~p2 & ~<>p1 & ~<>p2");
    }

    #[test]
    fn consistency_agrees_with_the_prover_for_small_n() {
        let lim = Limits::default();
        for n in 1..=2 {
            for d in all_disjuncts(n).unwrap() {
                let refuted = is_theorem(&Formula::not(d.formula()), &lim).unwrap();
                assert_eq!(refuted, !d.consistent(), "n={n} id={}", d.id());
            }
        }
    }

    #[test]
    fn distinct_disjuncts_are_pairwise_contradictory() {
        let lim = Limits::default();
        let ds = consistent_disjuncts(1).unwrap();
        for a in &ds {
            for b in &ds {
                if a.id() != b.id() {
                    let both = Formula::and(a.formula(), b.formula());
                    assert!(is_theorem(&Formula::not(both), &lim).unwrap());
                }
            }
        }
    }

    #[test]
    fn rule_text_parses_and_reports_positions() {
        let (ps, c) = parse_rule("<>p1, p1 <-> []p1 / p1").unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[1].to_string(), "p1 <-> []p1");
        assert_eq!(c.to_string(), "p1");
        let (ps, _) = parse_rule("/ []p1").unwrap();
        assert!(ps.is_empty());
        assert!(parse_rule("p1 , / p2").is_err());
        assert!(parse_rule("p1").is_err());
        assert!(parse_rule("p1 / p2 / p3").is_err());
        match parse_rule("p1, p0 / p2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected adjusted parse error, got {other:?}"),
        }
    }

    #[test]
    fn diamond_rule_reduces_to_two_disjuncts() {
        let lim = Limits::default();
        let r = to_rnf(&[parse("<>p1").unwrap()], &parse("p1").unwrap(), &lim).unwrap();
        assert_eq!(r.n, 1);
        assert_eq!(r.premise, BTreeSet::from([2, 3]));
        assert_eq!(r.conclusion, Conclusion::Var(1));
        // The premise disjunction is provably equivalent to <>p1.
        let equiv = Formula::iff(parse("<>p1").unwrap(), r.premise_formula());
        assert!(is_theorem(&equiv, &lim).unwrap());
    }

    #[test]
    fn identity_rule_keeps_only_the_true_disjunct() {
        let lim = Limits::default();
        let r = to_rnf(&[parse("p1").unwrap()], &parse("p1").unwrap(), &lim).unwrap();
        assert_eq!(r.premise, BTreeSet::from([3]));
        assert_eq!(r.conclusion, Conclusion::Var(1));
    }

    #[test]
    fn necessitation_rule_names_the_boxed_body() {
        let lim = Limits::default();
        let r = to_rnf(&[parse("p1").unwrap()], &parse("[]p1").unwrap(), &lim).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.premise, BTreeSet::from([5, 13]));
        assert_eq!(r.conclusion, Conclusion::Set(BTreeSet::from([5])));
    }

    #[test]
    fn two_premise_rule_matches_the_hand_computation() {
        let lim = Limits::default();
        let (ps, c) = parse_rule("<>p1, p1 <-> []p1 / p1").unwrap();
        let r = to_rnf(&ps, &c, &lim).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.premise, BTreeSet::from([5, 14]));
        assert_eq!(r.conclusion, Conclusion::Var(1));
    }

    #[test]
    fn rnf_input_is_a_fixed_point() {
        let lim = Limits::default();
        for (n, ids) in [(1, vec![2u32, 3]), (2, vec![5, 13, 15])] {
            let input = RnfRule {
                n,
                premise: ids.iter().copied().collect(),
                conclusion: Conclusion::Set(ids.iter().copied().collect()),
            };
            let r = to_rnf(
                &[input.premise_formula()],
                &input.conclusion_formula(),
                &lim,
            )
            .unwrap();
            assert_eq!(r, input);
        }
    }

    #[test]
    fn variable_cap_is_enforced() {
        let lim = Limits {
            var_cap: 2,
            ..Limits::default()
        };
        let (ps, c) = parse_rule("<>(p1 & p2) / <>(p2 & <>(p1 | p2))").unwrap();
        match to_rnf(&ps, &c, &lim) {
            Err(Error::ResourceLimit(_)) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn shared_diamond_bodies_share_their_name() {
        let lim = Limits::default();
        let (ps, c) = parse_rule("<>(p1 & p1), <>(p1 & p1) | p1 / p1").unwrap();
        let r = to_rnf(&ps, &c, &lim).unwrap();
        assert_eq!(r.n, 2);
    }

    #[test]
    fn variable_free_rules_are_lifted_to_one_variable() {
        let lim = Limits::default();
        let r = to_rnf(&[parse("~_|_").unwrap()], &parse("~_|_").unwrap(), &lim).unwrap();
        assert_eq!(r.n, 1);
        assert_eq!(r.premise.len(), 3);
        if let Conclusion::Set(j) = &r.conclusion {
            assert_eq!(j, &r.premise);
        } else {
            panic!("expected a set conclusion");
        }
    }

    #[test]
    fn serde_uses_ids_and_tagged_conclusions() {
        let r = RnfRule {
            n: 1,
            premise: BTreeSet::from([2, 3]),
            conclusion: Conclusion::Var(1),
        };
        let js = serde_json::to_string(&r).unwrap();
        assert_eq!(js, r#"{"n":1,"premise":[2,3],"conclusion":{"var":1}}"#);
        let r2 = RnfRule {
            conclusion: Conclusion::Set(BTreeSet::from([3])),
            ..r.clone()
        };
        let js2 = serde_json::to_string(&r2).unwrap();
        assert_eq!(js2, r#"{"n":1,"premise":[2,3],"conclusion":{"set":[3]}}"#);
        assert_eq!(serde_json::from_str::<RnfRule>(&js).unwrap(), r);
        assert_eq!(serde_json::from_str::<RnfRule>(&js2).unwrap(), r2);
    }

    #[test]
    fn validation_rejects_malformed_rules() {
        let bad = RnfRule {
            n: 1,
            premise: BTreeSet::from([2, 9]),
            conclusion: Conclusion::Var(1),
        };
        assert!(bad.validate().is_err());
        let bad = RnfRule {
            n: 1,
            premise: BTreeSet::from([2]),
            conclusion: Conclusion::Set(BTreeSet::from([3])),
        };
        assert!(bad.validate().is_err());
        let bad = RnfRule {
            n: 1,
            premise: BTreeSet::from([2]),
            conclusion: Conclusion::Var(2),
        };
        assert!(bad.validate().is_err());
    }
}
