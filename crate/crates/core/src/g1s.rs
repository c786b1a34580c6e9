//! Checker for explicit sequent derivations in the system G1s.
//!
//! A derivation is a tree of sequents, each node labeled with the rule
//! that produced its conclusion from its premises. Sequents are multisets
//! on both sides (the system has explicit weakening), so matching is done
//! with bag arithmetic. The checker verifies that every node instantiates
//! its named schema exactly, including the side conditions of the modal
//! rules: the retained context of `BoxR` must be boxed and of `DiaL`
//! diamonded, while arbitrary extra context enters only through the
//! designated slots written Γ′ and Δ′ below.
//!
//! Nodes may carry optional instantiation hints (the principal formula
//! and the Γ′/Δ′ splits); hints are verified when present, and the
//! matcher otherwise searches the finitely many candidates itself.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::Formula;

/// A two-sided sequent; both sides are multisets, order irrelevant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequent {
    #[serde(rename = "ant")]
    pub antecedent: Vec<Formula>,
    #[serde(rename = "suc")]
    pub succedent: Vec<Formula>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Vec<Formula>) -> Self {
        Sequent {
            antecedent,
            succedent,
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |w: &mut fmt::Formatter<'_>, fs: &[Formula]| -> fmt::Result {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(w, ", ")?;
                }
                write!(w, "{g}")?;
            }
            Ok(())
        };
        side(w, &self.antecedent)?;
        if !self.antecedent.is_empty() {
            write!(w, " ")?;
        }
        write!(w, "|-")?;
        if !self.succedent.is_empty() {
            write!(w, " ")?;
        }
        side(w, &self.succedent)
    }
}

/// The seventeen rule labels of G1s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleName {
    Ax,
    BotL,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    ImpR,
    NegL,
    NegR,
    LW,
    RW,
    Cut,
    BoxL,
    BoxR,
    DiaL,
    DiaR,
}

impl RuleName {
    pub fn arity(self) -> usize {
        match self {
            RuleName::Ax | RuleName::BotL => 0,
            RuleName::AndR | RuleName::OrL | RuleName::ImpL | RuleName::Cut => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleName::Ax => "Ax",
            RuleName::BotL => "BotL",
            RuleName::AndL => "AndL",
            RuleName::AndR => "AndR",
            RuleName::OrL => "OrL",
            RuleName::OrR => "OrR",
            RuleName::ImpL => "ImpL",
            RuleName::ImpR => "ImpR",
            RuleName::NegL => "NegL",
            RuleName::NegR => "NegR",
            RuleName::LW => "LW",
            RuleName::RW => "RW",
            RuleName::Cut => "Cut",
            RuleName::BoxL => "BoxL",
            RuleName::BoxR => "BoxR",
            RuleName::DiaL => "DiaL",
            RuleName::DiaR => "DiaR",
        }
    }
}

/// One node of a derivation tree. `premises` are the subderivations of
/// the rule's premise sequents, in schema order. The optional fields pin
/// down the instantiation when the conclusion alone leaves a choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: RuleName,
    pub conclusion: Sequent,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Derivation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<Formula>,
    #[serde(
        default,
        rename = "gammaPrime",
        skip_serializing_if = "Option::is_none"
    )]
    pub gamma_prime: Option<Vec<Formula>>,
    #[serde(
        default,
        rename = "deltaPrime",
        skip_serializing_if = "Option::is_none"
    )]
    pub delta_prime: Option<Vec<Formula>>,
}

/// First schema violation found, located by the premise-index path from
/// the root (empty path = the root node itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub path: Vec<usize>,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(w, "at the root: {}", self.reason)
        } else {
            let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(w, "at premise path {}: {}", path.join("."), self.reason)
        }
    }
}

/// Multiset of formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bag(BTreeMap<Formula, usize>);

impl Bag {
    fn from_slice(v: &[Formula]) -> Self {
        let mut m = BTreeMap::new();
        for g in v {
            *m.entry(g.clone()).or_insert(0) += 1;
        }
        Bag(m)
    }

    fn plus(&self, g: &Formula) -> Self {
        let mut m = self.0.clone();
        *m.entry(g.clone()).or_insert(0) += 1;
        Bag(m)
    }

    fn minus_one(&self, g: &Formula) -> Option<Self> {
        let mut m = self.0.clone();
        match m.get_mut(g) {
            Some(k) if *k > 1 => *k -= 1,
            Some(_) => {
                m.remove(g);
            }
            None => return None,
        }
        Some(Bag(m))
    }

    /// self − other, or None unless other ⊆ self.
    fn minus(&self, other: &Bag) -> Option<Self> {
        let mut m = self.0.clone();
        for (g, k) in &other.0 {
            match m.get_mut(g) {
                Some(have) if *have > *k => *have -= k,
                Some(have) if *have == *k => {
                    m.remove(g);
                }
                _ => return None,
            }
        }
        Some(Bag(m))
    }

    fn distinct(&self) -> impl Iterator<Item = &Formula> {
        self.0.keys()
    }

    fn total(&self) -> usize {
        self.0.values().sum()
    }
}

fn all_boxed(b: &Bag) -> bool {
    b.distinct().all(|g| matches!(g, Formula::Box(_)))
}

fn all_diamonded(b: &Bag) -> bool {
    b.distinct().all(|g| matches!(g, Formula::Dia(_)))
}

/// Verifies every node of `d` against its named schema; `Ok(())` means
/// the tree is a correct G1s derivation of its root sequent.
pub fn check_derivation(d: &Derivation) -> Result<(), CheckFailure> {
    let mut path = Vec::new();
    check_node(d, &mut path)
}

fn fail<T>(path: &[usize], reason: impl Into<String>) -> Result<T, CheckFailure> {
    Err(CheckFailure {
        path: path.to_vec(),
        reason: reason.into(),
    })
}

fn check_node(d: &Derivation, path: &mut Vec<usize>) -> Result<(), CheckFailure> {
    let want = d.rule.arity();
    if d.premises.len() != want {
        return fail(
            path,
            format!(
                "{} takes {} premise(s), found {}",
                d.rule.name(),
                want,
                d.premises.len()
            ),
        );
    }
    check_rule(d, path)?;
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, path)?;
        path.pop();
    }
    Ok(())
}

/// Candidate principal formulas: the hint alone when given, otherwise
/// every distinct formula of `side` accepted by `pick`.
fn candidates<'a>(
    d: &'a Derivation,
    side: &'a Bag,
    pick: fn(&Formula) -> bool,
    path: &[usize],
    side_name: &str,
) -> Result<Vec<&'a Formula>, CheckFailure> {
    if let Some(p) = &d.principal {
        if !pick(p) {
            return fail(
                path,
                format!("principal formula {p} has the wrong shape for {}", d.rule.name()),
            );
        }
        if !side.0.contains_key(p) {
            return fail(
                path,
                format!("principal formula {p} does not occur in the {side_name}"),
            );
        }
        Ok(vec![d.principal.as_ref().unwrap()])
    } else {
        Ok(side.distinct().filter(|g| pick(g)).collect())
    }
}

fn check_rule(d: &Derivation, path: &[usize]) -> Result<(), CheckFailure> {
    let c_ant = Bag::from_slice(&d.conclusion.antecedent);
    let c_suc = Bag::from_slice(&d.conclusion.succedent);
    let prem: Vec<(Bag, Bag)> = d
        .premises
        .iter()
        .map(|p| {
            (
                Bag::from_slice(&p.conclusion.antecedent),
                Bag::from_slice(&p.conclusion.succedent),
            )
        })
        .collect();

    let ok = match d.rule {
        RuleName::Ax => {
            // A |- A, nothing else.
            c_ant.total() == 1 && c_suc.total() == 1 && c_ant == c_suc
        }
        RuleName::BotL => c_suc.total() == 0 && c_ant == Bag::from_slice(&[Formula::Bot]),
        RuleName::AndL => {
            let cands = candidates(d, &c_ant, |g| matches!(g, Formula::And(..)), path, "antecedent")?;
            cands.iter().any(|g| {
                let Formula::And(a, b) = g else { unreachable!() };
                let rest = c_ant.minus_one(g).unwrap();
                prem[0].0 == rest.plus(a).plus(b) && prem[0].1 == c_suc
            })
        }
        RuleName::AndR => {
            let cands = candidates(d, &c_suc, |g| matches!(g, Formula::And(..)), path, "succedent")?;
            cands.iter().any(|g| {
                let Formula::And(a, b) = g else { unreachable!() };
                let rest = c_suc.minus_one(g).unwrap();
                prem[0].0 == c_ant
                    && prem[1].0 == c_ant
                    && prem[0].1 == rest.plus(a)
                    && prem[1].1 == rest.plus(b)
            })
        }
        RuleName::OrL => {
            let cands = candidates(d, &c_ant, |g| matches!(g, Formula::Or(..)), path, "antecedent")?;
            cands.iter().any(|g| {
                let Formula::Or(a, b) = g else { unreachable!() };
                let rest = c_ant.minus_one(g).unwrap();
                prem[0].0 == rest.plus(a)
                    && prem[1].0 == rest.plus(b)
                    && prem[0].1 == c_suc
                    && prem[1].1 == c_suc
            })
        }
        RuleName::OrR => {
            let cands = candidates(d, &c_suc, |g| matches!(g, Formula::Or(..)), path, "succedent")?;
            cands.iter().any(|g| {
                let Formula::Or(a, b) = g else { unreachable!() };
                let rest = c_suc.minus_one(g).unwrap();
                prem[0].0 == c_ant && prem[0].1 == rest.plus(a).plus(b)
            })
        }
        RuleName::ImpL => {
            let cands = candidates(d, &c_ant, |g| matches!(g, Formula::Imp(..)), path, "antecedent")?;
            cands.iter().any(|g| {
                let Formula::Imp(a, b) = g else { unreachable!() };
                let rest = c_ant.minus_one(g).unwrap();
                prem[0].0 == rest
                    && prem[0].1 == c_suc.plus(a)
                    && prem[1].0 == rest.plus(b)
                    && prem[1].1 == c_suc
            })
        }
        RuleName::ImpR => {
            let cands = candidates(d, &c_suc, |g| matches!(g, Formula::Imp(..)), path, "succedent")?;
            cands.iter().any(|g| {
                let Formula::Imp(a, b) = g else { unreachable!() };
                let rest = c_suc.minus_one(g).unwrap();
                prem[0].0 == c_ant.plus(a) && prem[0].1 == rest.plus(b)
            })
        }
        RuleName::NegL => {
            let cands = candidates(d, &c_ant, |g| matches!(g, Formula::Not(..)), path, "antecedent")?;
            cands.iter().any(|g| {
                let Formula::Not(a) = g else { unreachable!() };
                let rest = c_ant.minus_one(g).unwrap();
                prem[0].0 == rest && prem[0].1 == c_suc.plus(a)
            })
        }
        RuleName::NegR => {
            let cands = candidates(d, &c_suc, |g| matches!(g, Formula::Not(..)), path, "succedent")?;
            cands.iter().any(|g| {
                let Formula::Not(a) = g else { unreachable!() };
                let rest = c_suc.minus_one(g).unwrap();
                prem[0].0 == c_ant.plus(a) && prem[0].1 == rest
            })
        }
        RuleName::LW => {
            let cands = candidates(d, &c_ant, |_| true, path, "antecedent")?;
            cands.iter().any(|g| {
                prem[0].0 == c_ant.minus_one(g).unwrap() && prem[0].1 == c_suc
            })
        }
        RuleName::RW => {
            let cands = candidates(d, &c_suc, |_| true, path, "succedent")?;
            cands.iter().any(|g| {
                prem[0].1 == c_suc.minus_one(g).unwrap() && prem[0].0 == c_ant
            })
        }
        RuleName::Cut => {
            // (Γ |- A, Δ)  (A, Γ |- Δ)  /  Γ |- Δ, cut formula A.
            match prem[0].1.minus(&c_suc) {
                Some(extra) if extra.total() == 1 => {
                    let a = extra.distinct().next().unwrap();
                    let hint_ok = d.principal.as_ref().map_or(true, |p| p == a);
                    hint_ok
                        && prem[0].0 == c_ant
                        && prem[1].0 == c_ant.plus(a)
                        && prem[1].1 == c_suc
                }
                _ => false,
            }
        }
        RuleName::BoxL => {
            let cands = candidates(d, &c_ant, |g| matches!(g, Formula::Box(..)), path, "antecedent")?;
            cands.iter().any(|g| {
                let Formula::Box(a) = g else { unreachable!() };
                prem[0].0 == c_ant.plus(a) && prem[0].1 == c_suc
            })
        }
        RuleName::BoxR => {
            // □Γ |- A, ◇Δ  /  □Γ, Γ′ |- □A, ◇Δ, Δ′
            let cands = candidates(d, &c_suc, |g| matches!(g, Formula::Box(..)), path, "succedent")?;
            cands.iter().any(|g| {
                let Formula::Box(a) = g else { unreachable!() };
                let Some(dia_part) = prem[0].1.minus_one(a) else {
                    return false;
                };
                if !all_boxed(&prem[0].0) || !all_diamonded(&dia_part) {
                    return false;
                }
                let Some(gamma_rest) = c_ant.minus(&prem[0].0) else {
                    return false;
                };
                let suc_rest = c_suc.minus_one(g).unwrap();
                let Some(delta_rest) = suc_rest.minus(&dia_part) else {
                    return false;
                };
                hint_split_ok(&d.gamma_prime, &gamma_rest)
                    && hint_split_ok(&d.delta_prime, &delta_rest)
            })
        }
        RuleName::DiaL => {
            // A, □Γ |- ◇Δ  /  ◇A, □Γ, Γ′ |- ◇Δ, Δ′
            let cands = candidates(d, &c_ant, |g| matches!(g, Formula::Dia(..)), path, "antecedent")?;
            cands.iter().any(|g| {
                let Formula::Dia(a) = g else { unreachable!() };
                let Some(box_part) = prem[0].0.minus_one(a) else {
                    return false;
                };
                if !all_boxed(&box_part) || !all_diamonded(&prem[0].1) {
                    return false;
                }
                let ant_rest = c_ant.minus_one(g).unwrap();
                let Some(gamma_rest) = ant_rest.minus(&box_part) else {
                    return false;
                };
                let Some(delta_rest) = c_suc.minus(&prem[0].1) else {
                    return false;
                };
                hint_split_ok(&d.gamma_prime, &gamma_rest)
                    && hint_split_ok(&d.delta_prime, &delta_rest)
            })
        }
        RuleName::DiaR => {
            let cands = candidates(d, &c_suc, |g| matches!(g, Formula::Dia(..)), path, "succedent")?;
            cands.iter().any(|g| {
                let Formula::Dia(a) = g else { unreachable!() };
                prem[0].0 == c_ant && prem[0].1 == c_suc.plus(a)
            })
        }
    };
    if ok {
        Ok(())
    } else {
        fail(
            path,
            format!(
                "premises do not instantiate {} with conclusion {}",
                d.rule.name(),
                d.conclusion
            ),
        )
    }
}

fn hint_split_ok(hint: &Option<Vec<Formula>>, actual: &Bag) -> bool {
    match hint {
        None => true,
        Some(fs) => Bag::from_slice(fs) == *actual,
    }
}
