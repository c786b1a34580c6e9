//! Canonical models over a set of disjuncts.
//!
//! A set W of disjuncts (all of one arity) induces a Kripke model whose
//! worlds are the disjuncts themselves: φ sees ψ exactly when
//! `theta_dia(ψ) ⊆ theta_dia(φ)`, and pᵢ holds at φ when `i ∈ theta(φ)`.
//! Inclusion is a preorder, so the frame is always reflexive and
//! transitive. The interesting questions about W are whether every
//! disjunct satisfies its own formula at its own world, and whether the
//! closure equation below has a witness for every achievable union of
//! diamond signs.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::kripke::KripkeModel;
use crate::rnf::Disjunct;

pub(crate) fn decode_ids(n: u32, w: &BTreeSet<u32>) -> Result<Vec<Disjunct>, Error> {
    if w.is_empty() {
        return Err(Error::invalid("the disjunct set must be nonempty"));
    }
    w.iter().map(|&id| Disjunct::from_id(n, id)).collect()
}

/// The model induced by W; worlds are named by disjunct id.
pub fn build_model(n: u32, w: &BTreeSet<u32>) -> Result<KripkeModel, Error> {
    let ds = decode_ids(n, w)?;
    let mut m = KripkeModel::new(ds.iter().map(|d| d.id() as u64).collect());
    for i in 1..=n {
        m.declare_var(i);
    }
    for a in &ds {
        for b in &ds {
            if b.theta_dia & !a.theta_dia == 0 {
                m.add_edge(a.id() as u64, b.id() as u64);
            }
        }
        for i in 1..=n {
            if a.theta & (1 << (i - 1)) != 0 {
                m.set_true(i, a.id() as u64);
            }
        }
    }
    m.s4 = true;
    Ok(m)
}

/// Whether every member satisfies its own disjunct formula at its own
/// world of [`build_model`].
pub fn self_satisfying(n: u32, w: &BTreeSet<u32>) -> Result<bool, Error> {
    let ds = decode_ids(n, w)?;
    let m = build_model(n, w)?;
    for d in &ds {
        if !m.eval(d.id() as u64, &d.formula())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mask-level equivalent of [`self_satisfying`] for consistent members:
/// each member's diamond signs must be exactly the plain signs it can
/// see. Used on search-hot paths; agreement with the model-theoretic
/// version is pinned by tests.
pub(crate) fn masks_self_satisfying(members: &[(u32, u32)]) -> bool {
    members.iter().all(|&(_, dia)| {
        let seen = members
            .iter()
            .filter(|&&(_, d2)| d2 & !dia == 0)
            .fold(0, |acc, &(t2, _)| acc | t2);
        seen == dia
    })
}

/// All unions of diamond-sign masks achievable from subsets of `members`
/// (the empty union included), ascending.
fn achievable_unions(members: &[(u32, u32)]) -> Vec<u32> {
    let mut family = BTreeSet::from([0u32]);
    loop {
        let mut grew = false;
        let snapshot: Vec<u32> = family.iter().copied().collect();
        for u in snapshot {
            for &(_, dia) in members {
                if family.insert(u | dia) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    family.into_iter().collect()
}

pub(crate) fn masks_closure_failures(members: &[(u32, u32)]) -> Vec<u32> {
    achievable_unions(members)
        .into_iter()
        .filter(|&u| !members.iter().any(|&(t, d)| d == t | u))
        .collect()
}

/// The unions `u` of member diamond signs for which no member z has
/// `theta_dia(z) = theta(z) ∪ u`, ascending. Empty means the closure
/// condition holds.
pub fn closure_failures(n: u32, w: &BTreeSet<u32>) -> Result<Vec<u32>, Error> {
    let ds = decode_ids(n, w)?;
    let members: Vec<(u32, u32)> = ds.iter().map(|d| (d.theta, d.theta_dia)).collect();
    Ok(masks_closure_failures(&members))
}

/// Whether for every subset D ⊆ W (including ∅) some member z satisfies
/// `theta_dia(z) = theta(z) ∪ ⋃_{x∈D} theta_dia(x)`. The condition
/// depends on D only through its union, so it is evaluated over the
/// union-closed family of diamond-sign masks rather than all 2^|W|
/// subsets.
pub fn closure_condition(n: u32, w: &BTreeSet<u32>) -> Result<bool, Error> {
    Ok(closure_failures(n, w)?.is_empty())
}
