//! The two families of disjunct sets that witness rule failures.
//!
//! A set W is in the first family when every member satisfies its own
//! formula in the model induced by W; such sets witness invalidity. The
//! second family additionally requires the closure condition of the
//! model module; its members witness inadmissibility, because the
//! closure equation is what allows a rejecting substitution to be built
//! from W. Membership is decided through these semantic
//! characterizations directly.
//!
//! [`find_supp2_witness`] searches for a second-family set between given
//! bounds, smallest first, so returned witnesses are canonical. The
//! module also ships a randomized generator ([`random_supp1_set`]) that
//! builds first-family sets by construction: unions of cluster coverings
//! extended cluster by cluster. Tests use it to exercise the closed-form
//! membership tests from an independent direction.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Limits};
use crate::model::{self, masks_closure_failures, masks_self_satisfying};
use crate::rnf::{consistent_disjuncts, Disjunct};

/// Whether every member of W satisfies its own disjunct formula in the
/// model induced by W.
pub fn in_supp1(n: u32, w: &BTreeSet<u32>) -> Result<bool, Error> {
    model::self_satisfying(n, w)
}

/// [`in_supp1`] plus the closure condition.
pub fn in_supp2(n: u32, w: &BTreeSet<u32>) -> Result<bool, Error> {
    Ok(model::self_satisfying(n, w)? && model::closure_condition(n, w)?)
}

/// Some member has equal plain and diamond signs (the closure instance
/// for the empty subset).
pub fn has_stable_point(n: u32, w: &BTreeSet<u32>) -> Result<bool, Error> {
    let ds = decode(n, w)?;
    Ok(ds.iter().any(|d| d.theta == d.theta_dia))
}

/// Every two members x, y are both seen from some member z whose diamond
/// signs stay within `theta(z) ∪ theta_dia(x) ∪ theta_dia(y)`.
pub fn pair_cover_condition(n: u32, w: &BTreeSet<u32>) -> Result<bool, Error> {
    let ds = decode(n, w)?;
    Ok(ds.iter().all(|x| {
        ds.iter().all(|y| {
            ds.iter().any(|z| {
                let sees = |t: &Disjunct| t.theta_dia & !z.theta_dia == 0;
                sees(x) && sees(y) && z.theta_dia & !(z.theta | x.theta_dia | y.theta_dia) == 0
            })
        })
    }))
}

fn decode(n: u32, w: &BTreeSet<u32>) -> Result<Vec<Disjunct>, Error> {
    w.iter().map(|&id| Disjunct::from_id(n, id)).collect()
}

/// One interval constraint on the searched set: `lower ⊊ W ⊆ upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuppConstraint {
    pub upper: BTreeSet<u32>,
    #[serde(rename = "lower")]
    pub lower_strict: BTreeSet<u32>,
}

impl SuppConstraint {
    pub fn validate(&self, n: u32) -> Result<(), Error> {
        for &id in self.upper.iter().chain(self.lower_strict.iter()) {
            Disjunct::from_id(n, id)?;
        }
        if !self.lower_strict.is_subset(&self.upper) {
            return Err(Error::invalid("constraint lower bound exceeds its upper bound"));
        }
        Ok(())
    }
}

/// Which membership test a search uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Family {
    Supp1,
    Supp2,
}

/// Smallest set from `family` drawn from `universe` (consistent ids)
/// satisfying `extra`, in canonical subset order: size first, then
/// lexicographic on the ascending id tuple. Counts candidates against
/// `limits.subset_cap`; exceeding it is an inconclusive-search error,
/// never a verdict.
pub(crate) fn search_family(
    n: u32,
    universe: &BTreeSet<u32>,
    family: Family,
    extra: impl Fn(&BTreeSet<u32>) -> bool,
    limits: &Limits,
) -> Result<Option<BTreeSet<u32>>, Error> {
    let members: Vec<Disjunct> = decode(n, universe)?
        .into_iter()
        .filter(Disjunct::consistent)
        .collect();
    let mut budget = limits.subset_cap;
    let mut spend = |k: usize| -> Result<(), Error> {
        let k = k as u64;
        if budget < k {
            Err(Error::limit(format!(
                "witness search inconclusive: more than {} candidate sets",
                limits.subset_cap
            )))
        } else {
            budget -= k;
            Ok(())
        }
    };

    for size in 1..=members.len() {
        let mut pick: Vec<usize> = (0..size).collect();
        'combos: loop {
            spend(1)?;
            let chosen: Vec<Disjunct> = pick.iter().map(|&i| members[i]).collect();
            // A second-family set must contain a stable point (closure
            // instance for the empty subset); skip candidates without one
            // before the full membership test.
            let plausible = match family {
                Family::Supp1 => true,
                Family::Supp2 => chosen.iter().any(|d| d.theta == d.theta_dia),
            };
            if plausible {
                let masks: Vec<(u32, u32)> =
                    chosen.iter().map(|d| (d.theta, d.theta_dia)).collect();
                let ok = masks_self_satisfying(&masks)
                    && (family == Family::Supp1 || masks_closure_failures(&masks).is_empty());
                if ok {
                    let set: BTreeSet<u32> = chosen.iter().map(Disjunct::id).collect();
                    if extra(&set) {
                        return Ok(Some(set));
                    }
                }
            }
            // Next combination of `size` indices in lexicographic order.
            let mut i = size;
            while i > 0 {
                i -= 1;
                if pick[i] < i + members.len() - size {
                    pick[i] += 1;
                    for j in i + 1..size {
                        pick[j] = pick[j - 1] + 1;
                    }
                    continue 'combos;
                }
            }
            break;
        }
    }
    Ok(None)
}

/// Smallest second-family W with `lower ⊊ W ⊆ upper` for every
/// constraint, or None when no such set exists.
pub fn find_supp2_witness(
    n: u32,
    constraints: &[SuppConstraint],
    limits: &Limits,
) -> Result<Option<BTreeSet<u32>>, Error> {
    for c in constraints {
        c.validate(n)?;
    }
    let mut universe: BTreeSet<u32> = consistent_disjuncts(n)?
        .iter()
        .map(Disjunct::id)
        .collect();
    for c in constraints {
        universe = universe.intersection(&c.upper).copied().collect();
    }
    search_family(
        n,
        &universe,
        Family::Supp2,
        |w| {
            constraints
                .iter()
                .all(|c| c.lower_strict.is_subset(w) && c.lower_strict != *w)
        },
        limits,
    )
}

/// Random first-family set, built by the inductive construction: cluster
/// coverings unioned together, then a few cluster extensions on top.
/// Every returned set passes [`in_supp1`] by construction.
pub fn random_supp1_set(n: u32, rng: &mut impl Rng) -> BTreeSet<u32> {
    // A covering of the cluster with diamond signs `dia`, as ids; extra
    // members beyond the covering are allowed.
    fn cover(n: u32, dia: u32, mut already: u32, rng: &mut impl Rng) -> BTreeSet<u32> {
        let full = (1u32 << n) - 1;
        let mut out = BTreeSet::new();
        let mut guard = 0;
        while already != dia || out.is_empty() {
            guard += 1;
            let theta = if guard > 6 { dia } else { rng.gen_range(0..=full) & dia };
            out.insert((dia << n) | theta);
            already |= theta;
        }
        out
    }

    let full = (1u32 << n) - 1;
    let mut w = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=3) {
        let dia = rng.gen_range(0..=full);
        w.extend(cover(n, dia, 0, rng));
    }
    for _ in 0..rng.gen_range(0..=2) {
        // Extend by a cluster that sees a chosen part of W: its diamond
        // signs are the union of that part's diamond signs plus the
        // part's plain signs, with the rest covered by new members.
        let part: Vec<u32> = w.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let dia_union = part.iter().fold(0, |acc, id| acc | (id >> n));
        let theta_union = part.iter().fold(0, |acc, id| acc | (id & full));
        let dia = dia_union | (rng.gen_range(0..=full) & !dia_union) | theta_union;
        w.extend(cover(n, dia, theta_union, rng));
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn ids(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    fn constraint(upper: &[u32], lower: &[u32]) -> SuppConstraint {
        SuppConstraint {
            upper: ids(upper),
            lower_strict: ids(lower),
        }
    }

    #[test]
    fn membership_examples() {
        assert!(in_supp1(1, &ids(&[2, 3])).unwrap());
        assert!(!in_supp1(1, &ids(&[2])).unwrap());
        assert!(in_supp2(1, &ids(&[2, 3])).unwrap());
        assert!(in_supp2(1, &ids(&[3])).unwrap());
        assert!(!in_supp2(1, &ids(&[2])).unwrap());
    }

    #[test]
    fn one_variable_families_enumerated() {
        // Consistent ids are 0, 2, 3; both families agree here.
        let expected: Vec<BTreeSet<u32>> = [
            vec![0u32],
            vec![3],
            vec![0, 3],
            vec![2, 3],
            vec![0, 2, 3],
        ]
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect();
        let mut supp1 = Vec::new();
        let mut supp2 = Vec::new();
        let pool = [0u32, 2, 3];
        for mask in 1u32..8 {
            let w: BTreeSet<u32> = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &id)| id)
                .collect();
            if in_supp1(1, &w).unwrap() {
                supp1.push(w.clone());
            }
            if in_supp2(1, &w).unwrap() {
                supp2.push(w);
            }
        }
        assert_eq!(supp1, expected);
        assert_eq!(supp2, expected);
    }

    #[test]
    fn witness_search_examples() {
        let lim = Limits::default();
        let w = find_supp2_witness(1, &[constraint(&[2, 3], &[2])], &lim).unwrap();
        assert_eq!(w, Some(ids(&[2, 3])));
        let w = find_supp2_witness(1, &[constraint(&[2, 3], &[2, 3])], &lim).unwrap();
        assert_eq!(w, None);
        let w = find_supp2_witness(1, &[constraint(&[2], &[])], &lim).unwrap();
        assert_eq!(w, None);
    }

    #[test]
    fn witness_is_smallest_in_canonical_order() {
        let lim = Limits::default();
        // Unconstrained: the singleton {(∅,∅)} is the first hit.
        let w = find_supp2_witness(1, &[], &lim).unwrap();
        assert_eq!(w, Some(ids(&[0])));
        // Forbidden to be a subset of {0}: next come the other singletons.
        let w = find_supp2_witness(1, &[constraint(&[0, 2, 3], &[0])], &lim).unwrap();
        assert_eq!(w, Some(ids(&[0, 3])));
    }

    #[test]
    fn inconsistent_ids_are_ignored_by_the_search() {
        let lim = Limits::default();
        // Universe {1} holds only the inconsistent disjunct.
        let w = find_supp2_witness(1, &[constraint(&[1], &[])], &lim).unwrap();
        assert_eq!(w, None);
    }

    #[test]
    fn search_cap_reports_inconclusive() {
        let tight = Limits {
            subset_cap: 3,
            ..Limits::default()
        };
        // lower == upper leaves nothing to find, so the search has to
        // walk all 7 candidate subsets, more than the budget allows.
        match find_supp2_witness(2, &[constraint(&[5, 13, 15], &[5, 13, 15])], &tight) {
            Err(Error::ResourceLimit(_)) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn constraint_validation() {
        assert!(constraint(&[2], &[3]).validate(1).is_err());
        assert!(constraint(&[9], &[]).validate(1).is_err());
        assert!(constraint(&[2, 3], &[2]).validate(1).is_ok());
    }

    #[test]
    fn generated_sets_self_satisfy() {
        let mut rng = StdRng::seed_from_u64(42);
        for n in 1..=4u32 {
            for _ in 0..60 {
                let w = random_supp1_set(n, &mut rng);
                assert!(!w.is_empty());
                assert!(in_supp1(n, &w).unwrap(), "n={n} w={w:?}");
            }
        }
    }

    #[test]
    fn first_family_is_union_closed() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..80 {
            let n = rng.gen_range(1..=3u32);
            let a = random_supp1_set(n, &mut rng);
            let b = random_supp1_set(n, &mut rng);
            let union: BTreeSet<u32> = a.union(&b).copied().collect();
            assert!(in_supp1(n, &union).unwrap(), "n={n} a={a:?} b={b:?}");
        }
    }

    #[test]
    fn second_family_is_inside_the_first() {
        let mut rng = StdRng::seed_from_u64(44);
        let all: Vec<u32> = consistent_disjuncts(2)
            .unwrap()
            .iter()
            .map(Disjunct::id)
            .collect();
        let mut seen_member = false;
        for _ in 0..300 {
            let w: BTreeSet<u32> = all
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.3))
                .collect();
            if w.is_empty() {
                continue;
            }
            if in_supp2(2, &w).unwrap() {
                seen_member = true;
                assert!(in_supp1(2, &w).unwrap());
            }
        }
        assert!(seen_member);
    }

    #[test]
    fn cone_restriction_lands_in_the_second_family() {
        // Restricting a first-family set to what a stable point sees
        // yields a second-family set.
        let mut rng = StdRng::seed_from_u64(45);
        let mut exercised = 0;
        for _ in 0..120 {
            let n = rng.gen_range(1..=3u32);
            let w = random_supp1_set(n, &mut rng);
            let ds = decode(n, &w).unwrap();
            for x in ds.iter().filter(|d| d.theta == d.theta_dia) {
                let cone: BTreeSet<u32> = ds
                    .iter()
                    .filter(|d| d.theta_dia & !x.theta_dia == 0)
                    .map(Disjunct::id)
                    .collect();
                assert!(in_supp2(n, &cone).unwrap(), "n={n} w={w:?} x={}", x.id());
                exercised += 1;
            }
        }
        assert!(exercised > 20);
    }

    #[test]
    fn stable_point_and_pair_cover_conditions() {
        assert!(has_stable_point(1, &ids(&[2, 3])).unwrap());
        assert!(!has_stable_point(1, &ids(&[2])).unwrap());
        assert!(pair_cover_condition(1, &ids(&[2, 3])).unwrap());
        // Two incomparable singleton clusters: nothing sees both.
        let w = ids(&[(0b01 << 2) | 0b01, (0b10 << 2) | 0b10]);
        assert!(!pair_cover_condition(2, &w).unwrap());
    }

    #[test]
    fn constraint_serde_shape() {
        let c = constraint(&[2, 3], &[2]);
        let js = serde_json::to_string(&c).unwrap();
        assert_eq!(js, r#"{"upper":[2,3],"lower":[2]}"#);
        assert_eq!(serde_json::from_str::<SuppConstraint>(&js).unwrap(), c);
    }
}
