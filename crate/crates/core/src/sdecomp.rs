//! The algebra of substitution sets that reject whole rule systems.
//!
//! A [`RuleSystem`] is a finite set of entries W/J (disjunct id sets,
//! J ⊆ W) and denotes the set of substitutions rejecting every rule
//! ⋁W/⋁J. Denotations are never materialized; the observable interface
//! is emptiness ([`is_empty`], decided through the second support
//! family), the two branching actions [`action_plus`] and
//! [`action_minus`], entry-level [`simplify`], and [`intersect`] (union
//! of entry sets). [`decompose`] drives the actions to a worklist
//! fixpoint whose leaves are empty or canonical systems.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Limits};
use crate::rnf::{consistent_disjuncts, Disjunct};
use crate::supp::{search_family, Family};

/// One rule W/J of a system, as disjunct id sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entry {
    #[serde(rename = "W")]
    pub w: BTreeSet<u32>,
    #[serde(rename = "J")]
    pub j: BTreeSet<u32>,
}

impl Entry {
    pub fn new(w: impl IntoIterator<Item = u32>, j: impl IntoIterator<Item = u32>) -> Entry {
        Entry {
            w: w.into_iter().collect(),
            j: j.into_iter().collect(),
        }
    }

    fn validate(&self, n: u32) -> Result<(), Error> {
        for &id in self.w.iter().chain(self.j.iter()) {
            Disjunct::from_id(n, id)?;
        }
        if !self.j.is_subset(&self.w) {
            return Err(Error::invalid(
                "entry conclusion must be a subset of its premise",
            ));
        }
        Ok(())
    }
}

/// A deduplicated set of entries over one arity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSystem {
    pub n: u32,
    pub entries: BTreeSet<Entry>,
}

impl RuleSystem {
    pub fn new(n: u32, entries: impl IntoIterator<Item = Entry>) -> Result<RuleSystem, Error> {
        let sys = RuleSystem {
            n,
            entries: entries.into_iter().collect(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for e in &self.entries {
            e.validate(self.n)?;
        }
        Ok(())
    }

    /// All entries share one premise W and the conclusions are exactly
    /// the sets W minus one element. Entry-free systems count as
    /// canonical (they denote every substitution).
    pub fn is_canonical(&self) -> bool {
        let w = match self.entries.iter().next() {
            None => return true,
            Some(first) => &first.w,
        };
        if self.entries.iter().any(|e| e.w != *w) {
            return false;
        }
        let expected: BTreeSet<BTreeSet<u32>> = w
            .iter()
            .map(|&i| w.iter().copied().filter(|&x| x != i).collect())
            .collect();
        let actual: BTreeSet<BTreeSet<u32>> =
            self.entries.iter().map(|e| e.j.clone()).collect();
        expected == actual
    }
}

/// Smallest second-family set rejecting every entry: inside every
/// premise and outside every conclusion. None means no substitution
/// rejects the whole system.
pub fn nonemptiness_witness(
    a: &RuleSystem,
    limits: &Limits,
) -> Result<Option<BTreeSet<u32>>, Error> {
    a.validate()?;
    let mut universe: BTreeSet<u32> = consistent_disjuncts(a.n)?
        .iter()
        .map(Disjunct::id)
        .collect();
    for e in &a.entries {
        universe = universe.intersection(&e.w).copied().collect();
    }
    search_family(
        a.n,
        &universe,
        Family::Supp2,
        |w| a.entries.iter().all(|e| !w.is_subset(&e.j)),
        limits,
    )
}

/// Whether no substitution rejects every entry. Entry-free systems are
/// never empty.
pub fn is_empty(a: &RuleSystem, limits: &Limits) -> Result<bool, Error> {
    if a.entries.is_empty() {
        a.validate()?;
        return Ok(false);
    }
    Ok(nonemptiness_witness(a, limits)?.is_none())
}

/// Hard ceiling on the entry count for the exponential plus-split.
const MAX_PLUS_ENTRIES: usize = 16;

/// Splits on whether the added conclusion part J is rejected together
/// with each entry: 2^m branches, entry i of branch α being Wᵢ/(Jᵢ∪J)
/// when bit i−1 of α is clear and (Jᵢ∪J)/Jᵢ when set. Requires J ⊆ Wᵢ
/// for every entry.
pub fn action_plus(a: &RuleSystem, j: &BTreeSet<u32>) -> Result<Vec<RuleSystem>, Error> {
    a.validate()?;
    for &id in j {
        Disjunct::from_id(a.n, id)?;
    }
    let entries: Vec<&Entry> = a.entries.iter().collect();
    for e in &entries {
        if !j.is_subset(&e.w) {
            return Err(Error::invalid(
                "the split set must sit inside every entry premise",
            ));
        }
    }
    if entries.len() > MAX_PLUS_ENTRIES {
        return Err(Error::limit(format!(
            "plus action would fan out over 2^{} branches",
            entries.len()
        )));
    }
    let mut out = Vec::with_capacity(1 << entries.len());
    for alpha in 0..1u32 << entries.len() {
        let mut branch = BTreeSet::new();
        for (i, e) in entries.iter().enumerate() {
            let grown: BTreeSet<u32> = e.j.union(j).copied().collect();
            if alpha & (1 << i) == 0 {
                branch.insert(Entry {
                    w: e.w.clone(),
                    j: grown,
                });
            } else {
                branch.insert(Entry {
                    w: grown,
                    j: e.j.clone(),
                });
            }
        }
        out.push(RuleSystem {
            n: a.n,
            entries: branch,
        });
    }
    Ok(out)
}

/// Splits on whether J is rejected at all: the subtracted system
/// {(Wᵢ−J)/(Jᵢ−J)} first, then for each entry the original system
/// augmented with Wᵢ/(Wᵢ−J). Requires a strict premise/conclusion gap
/// in every entry.
pub fn action_minus(a: &RuleSystem, j: &BTreeSet<u32>) -> Result<Vec<RuleSystem>, Error> {
    a.validate()?;
    for &id in j {
        Disjunct::from_id(a.n, id)?;
    }
    for e in &a.entries {
        if e.j == e.w {
            return Err(Error::invalid(
                "every entry needs a strict premise/conclusion gap",
            ));
        }
    }
    let mut out = Vec::with_capacity(a.entries.len() + 1);
    let subtracted: BTreeSet<Entry> = a
        .entries
        .iter()
        .map(|e| Entry {
            w: e.w.difference(j).copied().collect(),
            j: e.j.difference(j).copied().collect(),
        })
        .collect();
    out.push(RuleSystem {
        n: a.n,
        entries: subtracted,
    });
    for e in &a.entries {
        let mut augmented = a.entries.clone();
        augmented.insert(Entry {
            w: e.w.clone(),
            j: e.w.difference(j).copied().collect(),
        });
        out.push(RuleSystem {
            n: a.n,
            entries: augmented,
        });
    }
    Ok(out)
}

/// Entry-level normal form with the same denotation: all premises are
/// replaced by their intersection W (conclusions clipped to W), then
/// entries subsumed by another (smaller-or-equal premise, larger-or-equal
/// conclusion) are dropped. Iterated to a fixpoint.
pub fn simplify(a: &RuleSystem) -> RuleSystem {
    let mut entries = a.entries.clone();
    loop {
        let mut changed = false;

        if let Some(first) = entries.iter().next() {
            let mut shared = first.w.clone();
            for e in entries.iter().skip(1) {
                shared = shared.intersection(&e.w).copied().collect();
            }
            let rewritten: BTreeSet<Entry> = entries
                .iter()
                .map(|e| Entry {
                    w: shared.clone(),
                    j: e.j.intersection(&shared).copied().collect(),
                })
                .collect();
            if rewritten != entries {
                entries = rewritten;
                changed = true;
            }
        }

        let kept: BTreeSet<Entry> = entries
            .iter()
            .filter(|e| {
                !entries
                    .iter()
                    .any(|f| f != *e && e.j.is_subset(&f.j) && f.w.is_subset(&e.w))
            })
            .cloned()
            .collect();
        if kept != entries {
            entries = kept;
            changed = true;
        }

        if !changed {
            return RuleSystem { n: a.n, entries };
        }
    }
}

/// The system rejected by exactly the substitutions rejecting both: the
/// union of the entry sets, simplified.
pub fn intersect(a: &RuleSystem, b: &RuleSystem) -> Result<RuleSystem, Error> {
    if a.n != b.n {
        return Err(Error::invalid("systems must share one variable count"));
    }
    a.validate()?;
    b.validate()?;
    let entries: BTreeSet<Entry> = a.entries.union(&b.entries).cloned().collect();
    Ok(simplify(&RuleSystem { n: a.n, entries }))
}

/// How a decomposition branch ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafKind {
    /// No substitution rejects the branch system.
    Empty,
    /// One shared premise W with conclusions {W minus one element}.
    Canonical,
    /// Unprocessed: the step cap ran out first.
    Pending,
}

/// One finished branch with the action trace that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    pub system: RuleSystem,
    pub trace: Vec<String>,
    pub kind: LeafKind,
}

/// Result of driving a system to leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub root: RuleSystem,
    pub leaves: Vec<Leaf>,
    /// False when the step cap cut exploration short; pending leaves
    /// then carry the unfinished branches.
    pub complete: bool,
}

/// Worklist driver. Each branch is simplified (an "s" trace step when
/// that changes it), closed as an empty or canonical leaf when possible,
/// and otherwise split: a plus action on the smallest id in a
/// premise/conclusion difference of size two or more, else a minus
/// action on the smallest conclusion id whose augmented branch makes
/// progress. Branches appear in depth-first order, siblings in action
/// order; each action costs one step against `limits.step_cap`.
pub fn decompose(a: &RuleSystem, limits: &Limits) -> Result<Decomposition, Error> {
    a.validate()?;
    let mut leaves = Vec::new();
    let mut work: Vec<(RuleSystem, Vec<String>)> = vec![(a.clone(), Vec::new())];
    let mut steps = 0u64;
    let mut complete = true;

    while let Some((sys, mut trace)) = work.pop() {
        let simplified = simplify(&sys);
        if simplified.entries != sys.entries {
            trace.push("s".to_string());
        }
        let sys = simplified;

        if is_empty(&sys, limits)? {
            leaves.push(Leaf {
                system: sys,
                trace,
                kind: LeafKind::Empty,
            });
            continue;
        }
        if sys.is_canonical() {
            leaves.push(Leaf {
                system: sys,
                trace,
                kind: LeafKind::Canonical,
            });
            continue;
        }
        if steps >= limits.step_cap {
            complete = false;
            leaves.push(Leaf {
                system: sys,
                trace,
                kind: LeafKind::Pending,
            });
            continue;
        }
        steps += 1;

        let plus_target = sys
            .entries
            .iter()
            .filter(|e| e.w.len() >= e.j.len() + 2)
            .flat_map(|e| e.w.difference(&e.j).copied())
            .min();
        let (step, branches) = if let Some(i) = plus_target {
            let split: BTreeSet<u32> = [i].into_iter().collect();
            (format!("+{i}"), action_plus(&sys, &split)?)
        } else {
            // Skip targets whose augmented entry W/(W−{i}) is already
            // present: those branches would reproduce the parent and
            // never terminate.
            let shared = &sys.entries.iter().next().expect("nonempty system").w;
            let progressing = |i: u32| {
                let grown = Entry {
                    w: (*shared).clone(),
                    j: shared.iter().copied().filter(|&x| x != i).collect(),
                };
                !sys.entries.contains(&grown)
            };
            let candidates: BTreeSet<u32> =
                sys.entries.iter().flat_map(|e| e.j.iter().copied()).collect();
            let i = candidates
                .iter()
                .copied()
                .find(|&i| progressing(i))
                .or_else(|| candidates.iter().next().copied())
                .expect("a non-canonical nonempty system has a conclusion id");
            let split: BTreeSet<u32> = [i].into_iter().collect();
            let mut out = Vec::new();
            for branch in action_minus(&sys, &split)? {
                if !out.contains(&branch) {
                    out.push(branch);
                }
            }
            (format!("-{i}"), out)
        };

        for branch in branches.into_iter().rev() {
            let mut t = trace.clone();
            t.push(step.clone());
            work.push((branch, t));
        }
    }

    Ok(Decomposition {
        root: a.clone(),
        leaves,
        complete,
    })
}
