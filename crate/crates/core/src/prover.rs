//! S4 theoremhood via a signed tableau with loop checking.
//!
//! A formula is a theorem iff the signed set {F formula} has no S4 model.
//! Search alternates two phases: propositional saturation (alpha rules
//! applied eagerly, beta rules by branching) and world creation for the
//! unfulfilled F[]A obligations of a saturated set. Jumping to a successor
//! keeps only the T[]B formulas (with their unboxings) plus the negated
//! obligation, which is complete for reflexive-transitive frames. A
//! saturated set that reappears is a loop and counts as satisfied; failed
//! saturated sets are memoized. Satisfying assignments are assembled into
//! an explicit countermodel.
//!
//! Diamonds are normalized to `~[]~` when formulas are interned here;
//! surface syntax elsewhere keeps them first class.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Limits};
use crate::formula::Formula;
use crate::kripke::KripkeModel;

/// Interned formula node. Children are arena indices. No `Dia`: diamonds
/// become `Not(Box(Not(_)))` during interning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Bot,
    Var(u32),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Iff(u32, u32),
    Box(u32),
}

/// A signed formula: arena index shifted left once, low bit 1 for T.
type Signed = u64;

fn t(id: u32) -> Signed {
    ((id as u64) << 1) | 1
}

fn f(id: u32) -> Signed {
    (id as u64) << 1
}

fn is_t(s: Signed) -> bool {
    s & 1 == 1
}

fn node_of(s: Signed) -> u32 {
    (s >> 1) as u32
}

struct Tableau<'a> {
    nodes: Vec<Node>,
    ids: HashMap<Node, u32>,
    limits: &'a Limits,
    spent: u64,
    /// Committed worlds plus the open ones on the current path.
    worlds: Vec<WorldRec>,
    by_key: HashMap<Vec<Signed>, usize>,
    unsat: HashSet<Vec<Signed>>,
}

struct WorldRec {
    key: Vec<Signed>,
    succs: Vec<usize>,
}

impl<'a> Tableau<'a> {
    fn new(limits: &'a Limits) -> Self {
        Tableau {
            nodes: Vec::new(),
            ids: HashMap::new(),
            limits,
            spent: 0,
            worlds: Vec::new(),
            by_key: HashMap::new(),
            unsat: HashSet::new(),
        }
    }

    fn tick(&mut self) -> Result<(), Error> {
        self.spent += 1;
        if self.spent > self.limits.node_cap {
            Err(Error::limit(format!(
                "tableau node cap of {} exhausted",
                self.limits.node_cap
            )))
        } else {
            Ok(())
        }
    }

    fn mk(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.ids.insert(n, id);
        id
    }

    fn intern(&mut self, g: &Formula) -> u32 {
        match g {
            Formula::Bot => self.mk(Node::Bot),
            Formula::Var(i) => self.mk(Node::Var(*i)),
            Formula::Not(a) => {
                let a = self.intern(a);
                self.mk(Node::Not(a))
            }
            Formula::And(a, b) => {
                let a = self.intern(a);
                let b = self.intern(b);
                self.mk(Node::And(a, b))
            }
            Formula::Or(a, b) => {
                let a = self.intern(a);
                let b = self.intern(b);
                self.mk(Node::Or(a, b))
            }
            Formula::Imp(a, b) => {
                let a = self.intern(a);
                let b = self.intern(b);
                self.mk(Node::Imp(a, b))
            }
            Formula::Iff(a, b) => {
                let a = self.intern(a);
                let b = self.intern(b);
                self.mk(Node::Iff(a, b))
            }
            Formula::Box(a) => {
                let a = self.intern(a);
                self.mk(Node::Box(a))
            }
            Formula::Dia(a) => {
                let a = self.intern(a);
                let na = self.mk(Node::Not(a));
                let bna = self.mk(Node::Box(na));
                self.mk(Node::Not(bna))
            }
        }
    }

    /// Insert a signed formula; false means the branch closed.
    fn add(
        &mut self,
        set: &mut BTreeSet<Signed>,
        queue: &mut VecDeque<Signed>,
        s: Signed,
    ) -> Result<bool, Error> {
        if set.contains(&s) {
            return Ok(true);
        }
        self.tick()?;
        if set.contains(&(s ^ 1)) {
            return Ok(false);
        }
        if is_t(s) && matches!(self.nodes[node_of(s) as usize], Node::Bot) {
            return Ok(false);
        }
        set.insert(s);
        queue.push_back(s);
        Ok(true)
    }

    /// Satisfiability of a signed-formula set; on success returns the
    /// index of a world satisfying it.
    fn satisfy(&mut self, base: &[Signed]) -> Result<Option<usize>, Error> {
        let mut set = BTreeSet::new();
        let mut queue = VecDeque::new();
        for &s in base {
            if !self.add(&mut set, &mut queue, s)? {
                return Ok(None);
            }
        }
        self.saturate(set, queue)
    }

    fn saturate(
        &mut self,
        mut set: BTreeSet<Signed>,
        mut queue: VecDeque<Signed>,
    ) -> Result<Option<usize>, Error> {
        while let Some(s) = queue.pop_front() {
            let node = self.nodes[node_of(s) as usize];
            let tv = is_t(s);
            // Alpha components, or None when the formula branches or is
            // inert at this phase.
            let alpha: Option<Vec<Signed>> = match (node, tv) {
                (Node::Bot, _) | (Node::Var(_), _) => Some(vec![]),
                (Node::Not(a), _) => Some(vec![f(a) ^ (!tv as u64)]),
                (Node::And(a, b), true) => Some(vec![t(a), t(b)]),
                (Node::Or(a, b), false) => Some(vec![f(a), f(b)]),
                (Node::Imp(a, b), false) => Some(vec![t(a), f(b)]),
                (Node::Box(a), true) => Some(vec![t(a)]), // reflexivity
                (Node::Box(_), false) => Some(vec![]),    // handled at world creation
                _ => None,
            };
            if let Some(parts) = alpha {
                for part in parts {
                    if !self.add(&mut set, &mut queue, part)? {
                        return Ok(None);
                    }
                }
                continue;
            }
            let branches: [Vec<Signed>; 2] = match (node, tv) {
                (Node::And(a, b), false) => [vec![f(a)], vec![f(b)]],
                (Node::Or(a, b), true) => [vec![t(a)], vec![t(b)]],
                (Node::Imp(a, b), true) => [vec![f(a)], vec![t(b)]],
                (Node::Iff(a, b), true) => [vec![t(a), t(b)], vec![f(a), f(b)]],
                (Node::Iff(a, b), false) => [vec![t(a), f(b)], vec![f(a), t(b)]],
                _ => unreachable!("alpha cases already handled"),
            };
            for branch in branches {
                let mut set2 = set.clone();
                let mut queue2 = queue.clone();
                let mut open = true;
                for part in branch {
                    if !self.add(&mut set2, &mut queue2, part)? {
                        open = false;
                        break;
                    }
                }
                if open {
                    if let Some(w) = self.saturate(set2, queue2)? {
                        return Ok(Some(w));
                    }
                }
            }
            return Ok(None);
        }
        self.world_for(set)
    }

    /// A fully saturated set becomes a world; its F[]A obligations spawn
    /// successor sets. Failure rolls the arena back and memoizes the key.
    fn world_for(&mut self, set: BTreeSet<Signed>) -> Result<Option<usize>, Error> {
        let key: Vec<Signed> = set.iter().copied().collect();
        if self.unsat.contains(&key) {
            return Ok(None);
        }
        if let Some(&w) = self.by_key.get(&key) {
            return Ok(Some(w)); // committed world or a loop to an open one
        }
        self.tick()?;
        let id = self.worlds.len();
        self.worlds.push(WorldRec {
            key: key.clone(),
            succs: Vec::new(),
        });
        self.by_key.insert(key.clone(), id);

        let mut jump_base: Vec<Signed> = Vec::new();
        let mut obligations: Vec<u32> = Vec::new();
        for &s in &set {
            if let Node::Box(a) = self.nodes[node_of(s) as usize] {
                if is_t(s) {
                    jump_base.push(s);
                    jump_base.push(t(a));
                } else if !set.contains(&f(a)) {
                    // F a present would discharge F[]a by reflexivity.
                    obligations.push(a);
                }
            }
        }

        for a in obligations {
            let mut base = jump_base.clone();
            base.push(f(a));
            match self.satisfy(&base)? {
                Some(w) => self.worlds[id].succs.push(w),
                None => {
                    // Everything allocated at or above `id` belongs to this
                    // attempt; edges never point forward out of it.
                    for w in (id..self.worlds.len()).rev() {
                        let k = std::mem::take(&mut self.worlds[w].key);
                        self.by_key.remove(&k);
                    }
                    self.worlds.truncate(id);
                    self.unsat.insert(key);
                    return Ok(None);
                }
            }
        }
        Ok(Some(id))
    }

    /// Explicit model over the worlds reachable from `root`, with worlds
    /// renumbered in visit order so `root` becomes 0.
    fn extract_model(&self, root: usize, declared: &BTreeSet<u32>) -> KripkeModel {
        let mut order: Vec<usize> = vec![root];
        let mut index: HashMap<usize, u64> = HashMap::new();
        index.insert(root, 0);
        let mut head = 0;
        while head < order.len() {
            let w = order[head];
            head += 1;
            for &s in &self.worlds[w].succs {
                if !index.contains_key(&s) {
                    index.insert(s, order.len() as u64);
                    order.push(s);
                }
            }
        }
        let mut model = KripkeModel::new((0..order.len() as u64).collect());
        for v in declared {
            model.declare_var(*v);
        }
        for (&w, &label) in &index {
            for &s in &self.worlds[w].succs {
                model.add_edge(label, index[&s]);
            }
            for &sf in &self.worlds[w].key {
                if is_t(sf) {
                    if let Node::Var(v) = self.nodes[node_of(sf) as usize] {
                        model.set_true(v, label);
                    }
                }
            }
        }
        model.close_reflexive_transitive();
        model
    }
}

fn refute(g: &Formula, limits: &Limits) -> Result<Option<KripkeModel>, Error> {
    let mut tab = Tableau::new(limits);
    let id = tab.intern(g);
    match tab.satisfy(&[f(id)])? {
        Some(root) => Ok(Some(tab.extract_model(root, &g.vars()))),
        None => Ok(None),
    }
}

/// Whether `g` holds in every world of every reflexive-transitive model.
pub fn is_theorem(g: &Formula, limits: &Limits) -> Result<bool, Error> {
    Ok(refute(g, limits)?.is_none())
}

/// A model refuting `g` at world 0, or None when `g` is a theorem. The
/// model is reflexive-transitive with the closure made explicit, and
/// declares every variable of `g`.
pub fn countermodel(g: &Formula, limits: &Limits) -> Result<Option<KripkeModel>, Error> {
    refute(g, limits)
}

/// `g` is refutable yet `<>g` is a theorem.
pub fn has_property_star(g: &Formula, limits: &Limits) -> Result<bool, Error> {
    Ok(!is_theorem(g, limits)? && is_theorem(&Formula::dia(g.clone()), limits)?)
}

/// Property `star` plus provable equivalence of `g` with `[]g`.
pub fn has_property_star_star(g: &Formula, limits: &Limits) -> Result<bool, Error> {
    Ok(has_property_star(g, limits)?
        && is_theorem(
            &Formula::iff(g.clone(), Formula::boxed(g.clone())),
            limits,
        )?)
}
