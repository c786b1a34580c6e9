//! Finite Kripke models: evaluation, frame checks, JSON and DOT export.
//!
//! Worlds carry numeric names (`u64`). For canonical models the names are
//! disjunct ids; prover countermodels use 0-based ordinals with 0 as the
//! world where the refuted formula fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    /// World names; also the iteration order for quantifiers.
    pub worlds: Vec<u64>,
    /// Accessibility relation as ordered pairs of world names.
    pub edges: BTreeSet<(u64, u64)>,
    /// Variable index -> names of the worlds where it is true. A variable
    /// is only meaningful for evaluation if it has an entry here, possibly
    /// an empty one.
    pub valuation: BTreeMap<u32, BTreeSet<u64>>,
    /// Set by constructors that guarantee a reflexive-transitive frame;
    /// [`KripkeModel::frame_is_s4`] re-checks from scratch.
    #[serde(skip, default = "default_true")]
    pub s4: bool,
}

fn default_true() -> bool {
    true
}

impl KripkeModel {
    pub fn new(worlds: Vec<u64>) -> Self {
        KripkeModel {
            worlds,
            edges: BTreeSet::new(),
            valuation: BTreeMap::new(),
            s4: false,
        }
    }

    pub fn add_edge(&mut self, from: u64, to: u64) {
        self.edges.insert((from, to));
    }

    pub fn set_true(&mut self, var: u32, world: u64) {
        self.valuation.entry(var).or_default().insert(world);
    }

    /// Declare a variable relevant without making it true anywhere.
    pub fn declare_var(&mut self, var: u32) {
        self.valuation.entry(var).or_default();
    }

    pub fn contains_world(&self, w: u64) -> bool {
        self.worlds.contains(&w)
    }

    fn successors(&self, w: u64) -> impl Iterator<Item = u64> + '_ {
        self.edges
            .range((w, u64::MIN)..=(w, u64::MAX))
            .map(|&(_, v)| v)
    }

    /// Reflexivity and transitivity of the relation, checked directly.
    pub fn frame_is_s4(&self) -> bool {
        for &w in &self.worlds {
            if !self.edges.contains(&(w, w)) {
                return false;
            }
        }
        for &(a, b) in &self.edges {
            for c in self.successors(b) {
                if !self.edges.contains(&(a, c)) {
                    return false;
                }
            }
        }
        true
    }

    /// Replace the relation with its reflexive-transitive closure.
    pub fn close_reflexive_transitive(&mut self) {
        for &w in &self.worlds {
            self.edges.insert((w, w));
        }
        // Warshall over the (sparse) world list.
        loop {
            let mut added = false;
            let current: Vec<(u64, u64)> = self.edges.iter().copied().collect();
            for &(a, b) in &current {
                for c in self.successors(b).collect::<Vec<_>>() {
                    if self.edges.insert((a, c)) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        self.s4 = true;
    }

    /// Standard Kripke satisfaction at a world.
    pub fn eval(&self, w: u64, f: &Formula) -> Result<bool, Error> {
        if !self.contains_world(w) {
            return Err(Error::invalid(format!("unknown world {w}")));
        }
        self.eval_at(w, f)
    }

    fn eval_at(&self, w: u64, f: &Formula) -> Result<bool, Error> {
        match f {
            Formula::Bot => Ok(false),
            Formula::Var(i) => match self.valuation.get(i) {
                Some(set) => Ok(set.contains(&w)),
                None => Err(Error::invalid(format!(
                    "variable p{i} is outside the valuation domain"
                ))),
            },
            Formula::Not(a) => Ok(!self.eval_at(w, a)?),
            Formula::And(a, b) => Ok(self.eval_at(w, a)? && self.eval_at(w, b)?),
            Formula::Or(a, b) => Ok(self.eval_at(w, a)? || self.eval_at(w, b)?),
            Formula::Imp(a, b) => Ok(!self.eval_at(w, a)? || self.eval_at(w, b)?),
            Formula::Iff(a, b) => Ok(self.eval_at(w, a)? == self.eval_at(w, b)?),
            Formula::Box(a) => {
                for v in self.successors(w) {
                    if !self.eval_at(v, a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Dia(a) => {
                for v in self.successors(w) {
                    if self.eval_at(v, a)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Truth at every world.
    pub fn eval_global(&self, f: &Formula) -> Result<bool, Error> {
        for &w in &self.worlds {
            if !self.eval(w, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// DOT text for inspection; deterministic output order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph model {\n");
        for &w in &self.worlds {
            let mut label = format!("{w}");
            let trues: Vec<String> = self
                .valuation
                .iter()
                .filter(|(_, set)| set.contains(&w))
                .map(|(v, _)| format!("p{v}"))
                .collect();
            if !trues.is_empty() {
                write!(label, ": {}", trues.join(" ")).unwrap();
            }
            writeln!(out, "  w{w} [label=\"{label}\"];").unwrap();
        }
        for &(a, b) in &self.edges {
            if a != b {
                writeln!(out, "  w{a} -> w{b};").unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}
