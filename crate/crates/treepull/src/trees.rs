//! Downward-closed trees over [`GString`]s and the Kleene–Brouwer order.
//!
//! Two tree representations live here: [`FiniteTree`] (an explicit finite
//! set) and [`LazyTree`] (a membership callback under depth/branch budgets,
//! always consumed through a validating wrapper that fails loudly on
//! downward-closure violations instead of repairing them).
//!
//! On top of those sit the order-theoretic tools: [`kb_less`], the budgeted
//! `T⁺` fragment, `η`, the KB-successor, the niceness checker, the niceness
//! embedding, and [`kb_rank`] — the exact rank oracle assigning each fragment
//! position its order type of KB-predecessors as a CNF ordinal.

use crate::ordinal::OrdinalCnf;
use crate::strings::GString;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("tree is not downward closed: contains {child} but not {parent}")]
    NotDownwardClosed { child: GString, parent: GString },
    #[error("lazy membership violates downward closure: {child} is in but {parent} is out")]
    ClosureViolation { child: GString, parent: GString },
    #[error("query {query} exceeds budget ({kind})")]
    BudgetExceeded { query: GString, kind: String },
    #[error("{0} lies outside the T⁺ fragment")]
    OutsideFragment(GString),
    #[error("predecessor of ε requested")]
    EmptyPredecessor,
}

// ---------------------------------------------------------------------------
// FiniteTree
// ---------------------------------------------------------------------------

/// An explicitly finite, downward-closed set of strings.
///
/// Iteration order is Gödel-code order.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteTree {
    members: BTreeSet<GString>,
}

impl FiniteTree {
    pub fn empty() -> Self {
        FiniteTree {
            members: BTreeSet::new(),
        }
    }

    /// Validates downward closure; errors name the offending pair.
    pub fn new<I: IntoIterator<Item = GString>>(members: I) -> Result<Self, TreeError> {
        let members: BTreeSet<GString> = members.into_iter().collect();
        for m in &members {
            if !m.is_empty() {
                let p = m.predecessor().unwrap();
                if !members.contains(&p) {
                    return Err(TreeError::NotDownwardClosed {
                        child: m.clone(),
                        parent: p,
                    });
                }
            }
        }
        Ok(FiniteTree { members })
    }

    /// Downward closure of the given strings.
    pub fn downward_closure<I: IntoIterator<Item = GString>>(strings: I) -> Self {
        let mut members = BTreeSet::new();
        for s in strings {
            for i in 0..=s.len() {
                members.insert(s.restrict(i));
            }
        }
        FiniteTree { members }
    }

    pub fn contains(&self, s: &GString) -> bool {
        self.members.contains(s)
    }

    pub fn insert_closed(&mut self, s: &GString) {
        for i in 0..=s.len() {
            self.members.insert(s.restrict(i));
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in code order.
    pub fn iter(&self) -> impl Iterator<Item = &GString> {
        self.members.iter()
    }

    /// Max member length.
    pub fn depth(&self) -> usize {
        self.members.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// T↾n: members of length ≤ n.
    pub fn restrict(&self, n: usize) -> FiniteTree {
        FiniteTree {
            members: self.members.iter().filter(|s| s.len() <= n).cloned().collect(),
        }
    }

    /// Child labels of σ present in the tree, ascending.
    pub fn child_labels(&self, s: &GString) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .members
            .iter()
            .filter(|m| m.len() == s.len() + 1 && m.extends(s))
            .map(|m| m.last().unwrap())
            .collect();
        out.sort_unstable();
        out
    }

    /// ⊑-maximal members (leaves), in code order.
    pub fn leaves(&self) -> Vec<GString> {
        self.members
            .iter()
            .filter(|m| self.child_labels(m).is_empty())
            .cloned()
            .collect()
    }

    // ---- named generators, matching scenario-file literals ----

    /// All binary strings of length ≤ d.
    pub fn full_binary(d: usize) -> Self {
        let mut members = vec![GString::empty()];
        let mut level = vec![GString::empty()];
        for _ in 0..d {
            let mut next = Vec::new();
            for s in &level {
                for b in 0..2 {
                    let c = s.child(b);
                    members.push(c.clone());
                    next.push(c);
                }
            }
            level = next;
        }
        FiniteTree {
            members: members.into_iter().collect(),
        }
    }

    /// The single path 0^d.
    pub fn single_path(d: usize) -> Self {
        FiniteTree::downward_closure([GString::repeated(0, d)])
    }

    /// The two paths 0^d and 1^d.
    pub fn two_path(d: usize) -> Self {
        FiniteTree::downward_closure([GString::repeated(0, d), GString::repeated(1, d)])
    }

    /// Binary strings of length ≤ d with at most one 1.
    pub fn finitely_many_ones(d: usize) -> Self {
        let mut strings = vec![GString::repeated(0, d)];
        for pos in 0..d {
            let mut v = vec![0u64; d];
            v[pos] = 1;
            strings.push(GString::from_entries(v));
        }
        FiniteTree::downward_closure(strings)
    }
}

impl std::fmt::Debug for FiniteTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl Serialize for FiniteTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.members.iter())
    }
}

// ---------------------------------------------------------------------------
// LazyTree
// ---------------------------------------------------------------------------

/// A tree given by a membership callback, with explicit budgets.
///
/// Always queried through [`ValidatingLazyTree`], which memoizes answers and
/// rejects downward-closure violations loudly; a repairing wrapper would mask
/// scenario bugs.
#[derive(Clone)]
pub struct LazyTree {
    membership: Arc<dyn Fn(&GString) -> bool + Send + Sync>,
    pub depth_budget: usize,
    pub branch_budget: u64,
}

impl LazyTree {
    pub fn new(
        membership: impl Fn(&GString) -> bool + Send + Sync + 'static,
        depth_budget: usize,
        branch_budget: u64,
    ) -> Self {
        LazyTree {
            membership: Arc::new(membership),
            depth_budget,
            branch_budget,
        }
    }

    pub fn from_finite(tree: FiniteTree, branch_budget: u64) -> Self {
        let depth = tree.depth();
        LazyTree::new(move |s| tree.contains(s), depth + 1, branch_budget)
    }
}

/// Memoizing, closure-validating view of a [`LazyTree`].
pub struct ValidatingLazyTree {
    inner: LazyTree,
    memo: Mutex<HashMap<GString, bool>>,
}

impl ValidatingLazyTree {
    pub fn new(inner: LazyTree) -> Self {
        ValidatingLazyTree {
            inner,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn depth_budget(&self) -> usize {
        self.inner.depth_budget
    }

    pub fn branch_budget(&self) -> u64 {
        self.inner.branch_budget
    }

    fn raw(&self, s: &GString) -> bool {
        let mut memo = self.memo.lock().unwrap();
        if let Some(&v) = memo.get(s) {
            return v;
        }
        let v = (self.inner.membership)(s);
        memo.insert(s.clone(), v);
        v
    }

    /// Membership with budget enforcement and closure validation.
    pub fn member(&self, s: &GString) -> Result<bool, TreeError> {
        if s.len() > self.inner.depth_budget {
            return Err(TreeError::BudgetExceeded {
                query: s.clone(),
                kind: "depth".into(),
            });
        }
        if s.entries().iter().any(|&x| x > self.inner.branch_budget) {
            return Err(TreeError::BudgetExceeded {
                query: s.clone(),
                kind: "branch".into(),
            });
        }
        let v = self.raw(s);
        if v && !s.is_empty() {
            let p = s.predecessor().unwrap();
            if !self.raw(&p) {
                return Err(TreeError::ClosureViolation {
                    child: s.clone(),
                    parent: p,
                });
            }
        }
        Ok(v)
    }

    /// Materialize the budgeted portion as a [`FiniteTree`].
    pub fn materialize(&self, depth: usize, branch: u64) -> Result<FiniteTree, TreeError> {
        let mut members = Vec::new();
        let mut frontier = vec![GString::empty()];
        if !self.member(&GString::empty())? {
            return Ok(FiniteTree::empty());
        }
        members.push(GString::empty());
        for _ in 0..depth.min(self.inner.depth_budget.saturating_sub(1)) {
            let mut next = Vec::new();
            for s in &frontier {
                for x in 0..=branch.min(self.inner.branch_budget) {
                    let c = s.child(x);
                    if self.member(&c)? {
                        members.push(c.clone());
                        next.push(c);
                    }
                }
            }
            frontier = next;
        }
        FiniteTree::new(members)
    }
}

// ---------------------------------------------------------------------------
// Kleene–Brouwer order and the T⁺ fragment
// ---------------------------------------------------------------------------

/// σ <KB τ iff σ ⊋ τ or σ ⊲ τ.
pub fn kb_less(s: &GString, t: &GString) -> bool {
    s.properly_extends(t) || s.left_of(t)
}

/// η(σ): σ⌢0^k for the least k (possibly 0) with the result outside T.
///
/// This is the KB-least fragment element weakly extending σ.
pub fn eta(tree: &FiniteTree, s: &GString) -> GString {
    let mut cur = s.clone();
    while tree.contains(&cur) {
        cur = cur.child(0);
    }
    cur
}

/// Is σ in the full fragment T⁺ = T ∪ {τ⌢n : τ ∈ T}?
pub fn in_fragment(tree: &FiniteTree, s: &GString) -> bool {
    tree.contains(s)
        || (!s.is_empty() && tree.contains(&s.predecessor().unwrap()))
        || (s.is_empty() && !tree.is_empty())
}

/// σ⁺: the immediate KB-successor of σ in T⁺ (for σ ≠ ε).
///
/// By convention ε⁺ = η(ε) even though ε is KB-maximal in T⁺ — the bootstrap
/// case feeding the base of hierarchy definitions downstream.
pub fn kb_succ(tree: &FiniteTree, s: &GString) -> Result<GString, TreeError> {
    if !in_fragment(tree, s) {
        return Err(TreeError::OutsideFragment(s.clone()));
    }
    if s.is_empty() {
        return Ok(eta(tree, s));
    }
    let x = s.last().unwrap();
    let p = s.predecessor().unwrap();
    Ok(eta(tree, &p.child(x + 1)))
}

/// The finite slice of T⁺: base members plus `{σ⌢n : σ ∈ base, n ≤ budget}`,
/// carrying a strict total order agreeing with [`kb_less`].
#[derive(Clone, Debug)]
pub struct KbFragment {
    pub base: FiniteTree,
    pub plus_entries: Vec<GString>,
    /// All fragment elements, KB-ascending.
    pub order: Vec<GString>,
}

impl KbFragment {
    pub fn build(base: &FiniteTree, branch_budget: u64) -> KbFragment {
        let mut elems: BTreeSet<GString> = base.iter().cloned().collect();
        let mut plus = Vec::new();
        for s in base.iter() {
            for n in 0..=branch_budget {
                let c = s.child(n);
                if !base.contains(&c) && elems.insert(c.clone()) {
                    plus.push(c);
                }
            }
        }
        let mut order: Vec<GString> = elems.into_iter().collect();
        order.sort_by(|a, b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if kb_less(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        plus.sort();
        KbFragment {
            base: base.clone(),
            plus_entries: plus,
            order,
        }
    }

    pub fn contains(&self, s: &GString) -> bool {
        self.base.contains(s) || self.plus_entries.contains(s)
    }

    /// Position of σ in the KB-ascending order.
    pub fn position(&self, s: &GString) -> Option<usize> {
        self.order.iter().position(|t| t == s)
    }
}

// ---------------------------------------------------------------------------
// Niceness
// ---------------------------------------------------------------------------

/// Verdict of the niceness check with the first counterexample, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NicenessReport {
    pub nice: bool,
    pub counterexample: Option<GString>,
}

impl NicenessReport {
    fn ok() -> Self {
        NicenessReport {
            nice: true,
            counterexample: None,
        }
    }
    fn bad(s: GString) -> Self {
        NicenessReport {
            nice: false,
            counterexample: Some(s),
        }
    }
}

/// Checks, for every σ with |σ| ≡ 3 (mod 4) and |σ| ≤ depth, the biconditional
/// σ ∈ T ⟺ (σ⁻ ∈ T and σ ∈ {σ⁻⌢0, σ⁻⌢1}).
pub fn is_nice(tree: &FiniteTree, depth: usize) -> NicenessReport {
    // Forward direction: members at level ≡ 3 must be 0/1 children.
    for s in tree.iter() {
        if s.len() % 4 == 3 && s.len() <= depth && s.last().unwrap() > 1 {
            return NicenessReport::bad(s.clone());
        }
    }
    // Backward direction: both 0/1 children present under level ≡ 2 members.
    for s in tree.iter() {
        if s.len() % 4 == 2 && s.len() + 1 <= depth {
            for b in 0..2 {
                if !tree.contains(&s.child(b)) {
                    return NicenessReport::bad(s.child(b));
                }
            }
        }
    }
    NicenessReport::ok()
}

/// Budgeted niceness check over a lazy tree.
pub fn is_nice_lazy(tree: &ValidatingLazyTree, depth: usize) -> Result<NicenessReport, TreeError> {
    let depth = depth.min(tree.depth_budget());
    let finite = tree.materialize(depth, tree.branch_budget())?;
    Ok(is_nice(&finite, depth))
}

/// Niceness embedding: turns any finite tree into a nice one.
///
/// Each input edge labeled x becomes the 4-block x⌢0⌢0⌢0, with the level ≡ 3
/// sibling ..x⌢0⌢1 kept as a leaf; the literal one-edge-per-two-levels map
/// fails the niceness biconditional at input leaves, the 4-block form does
/// not. The returned map is expansionary and sends paths to paths bijectively
/// at every finite depth.
pub fn nice_embed(tree: &FiniteTree) -> (FiniteTree, BTreeMap<GString, GString>) {
    let mut map = BTreeMap::new();
    let mut members: BTreeSet<GString> = BTreeSet::new();
    if tree.is_empty() {
        return (FiniteTree::empty(), map);
    }
    members.insert(GString::empty());
    map.insert(GString::empty(), GString::empty());
    // code order visits parents before children
    for s in tree.iter() {
        if s.is_empty() {
            continue;
        }
        let p = s.predecessor().unwrap();
        let x = s.last().unwrap();
        let img_p: GString = map[&p].clone();
        let block = img_p.child(x);
        let b0 = block.child(0);
        for t in [block.clone(), b0.clone(), b0.child(0), b0.child(1)] {
            members.insert(t);
        }
        let img = b0.child(0).child(0);
        members.insert(img.clone());
        map.insert(s.clone(), img);
    }
    (
        FiniteTree::new(members).expect("embedding is closed by construction"),
        map,
    )
}

// ---------------------------------------------------------------------------
// KB rank oracle
// ---------------------------------------------------------------------------

/// Exact KB ranks over a finite tree's fragment.
#[derive(Clone, Debug)]
pub struct RankTable {
    /// Rank (order type of KB-predecessors in the full T⁺) per element.
    /// Covers all of T plus fan leaves σ⌢n for n ≤ the branch budget.
    pub ranks: BTreeMap<GString, OrdinalCnf>,
    /// Order type of the full T⁺ under KB.
    pub order_type: OrdinalCnf,
}

/// Assigns every fragment element its exact KB rank, as a CNF ordinal.
///
/// Since T is finite, KB on the full T⁺ (including every infinite fan) is a
/// well-order; the recursion below walks T in KB order and accounts for each
/// fan tail as a single ω. This is the independent oracle that ρ heights are
/// measured against.
pub fn kb_rank(tree: &FiniteTree, branch_budget: u64) -> RankTable {
    let mut ranks = BTreeMap::new();
    if tree.is_empty() {
        return RankTable {
            ranks,
            order_type: OrdinalCnf::zero(),
        };
    }
    let order_type = rank_walk(
        tree,
        &GString::empty(),
        OrdinalCnf::zero(),
        branch_budget,
        &mut ranks,
    );
    RankTable { ranks, order_type }
}

/// Returns `base + order type of the segment of σ` (strict extensions of
/// σ in T⁺, then σ itself).
fn rank_walk(
    tree: &FiniteTree,
    s: &GString,
    base: OrdinalCnf,
    branch_budget: u64,
    ranks: &mut BTreeMap<GString, OrdinalCnf>,
) -> OrdinalCnf {
    let labels = tree.child_labels(s);
    let mut cur = base;
    let mut next_fan = 0u64;
    for n in labels {
        // fan leaves strictly between tree children
        for m in next_fan..n {
            ranks.insert(s.child(m), cur.clone());
            cur = cur.succ();
        }
        cur = rank_walk(tree, &s.child(n), cur, branch_budget, ranks);
        next_fan = n + 1;
    }
    // infinite tail fan: ranks cur, cur+1, …, contributing ω in total
    for m in next_fan..=branch_budget.max(next_fan) {
        ranks.insert(s.child(m), cur.add_finite(m - next_fan));
    }
    let rank_s = cur.add(&OrdinalCnf::omega());
    ranks.insert(s.clone(), rank_s.clone());
    rank_s.succ()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gs;

    fn w() -> OrdinalCnf {
        OrdinalCnf::omega()
    }

    #[test]
    fn kb_order_examples() {
        assert!(kb_less(&gs![0, 1], &gs![0])); // proper extension clause
        assert!(kb_less(&gs![0, 9], &gs![1])); // left-of clause
        let s = gs![2, 2];
        assert!(!kb_less(&s, &s)); // irreflexive
    }

    #[test]
    fn kb_total_and_transitive_small() {
        let mut all = vec![GString::empty()];
        for a in 0..4u64 {
            all.push(gs![a]);
            for b in 0..4u64 {
                all.push(gs![a, b]);
                for c in 0..4u64 {
                    all.push(gs![a, b, c]);
                }
            }
        }
        for s in &all {
            for t in &all {
                if s != t {
                    assert!(
                        kb_less(s, t) ^ kb_less(t, s),
                        "totality failed for {s}, {t}"
                    );
                }
                for u in &all {
                    if kb_less(s, t) && kb_less(t, u) {
                        assert!(kb_less(s, u), "transitivity failed: {s} {t} {u}");
                    }
                }
            }
        }
    }

    #[test]
    fn eta_examples() {
        let just_root = FiniteTree::downward_closure([gs![]]);
        assert_eq!(eta(&just_root, &GString::empty()), gs![0]); // least k = 1
        assert_eq!(eta(&just_root, &gs![3]), gs![3]); // k = 0, ⟨3⟩ ∉ T

        let with_zero = FiniteTree::downward_closure([gs![0]]);
        assert_eq!(eta(&with_zero, &GString::empty()), gs![0, 0]); // least k = 2
    }

    #[test]
    fn kb_succ_examples() {
        let just_root = FiniteTree::downward_closure([gs![]]);
        assert_eq!(kb_succ(&just_root, &gs![2]).unwrap(), gs![3]);

        let with_zero = FiniteTree::downward_closure([gs![0]]);
        assert_eq!(kb_succ(&with_zero, &gs![0, 1]).unwrap(), gs![0, 2]);
        assert_eq!(kb_succ(&with_zero, &gs![0]).unwrap(), gs![1]);

        assert!(kb_succ(&with_zero, &gs![5, 5]).is_err());
    }

    /// Brute-force immediacy: nothing in the budgeted fragment lies strictly
    /// KB-between σ and σ⁺.
    #[test]
    fn kb_succ_immediate_in_fragment() {
        for tree in [
            FiniteTree::downward_closure([gs![]]),
            FiniteTree::downward_closure([gs![0]]),
            FiniteTree::downward_closure([gs![0, 0], gs![2]]),
        ] {
            let frag = KbFragment::build(&tree, 6);
            for s in &frag.order {
                if s.is_empty() {
                    continue;
                }
                let succ = kb_succ(&tree, s).unwrap();
                for t in &frag.order {
                    assert!(
                        !(kb_less(s, t) && kb_less(t, &succ)),
                        "{t} lies between {s} and its successor {succ}"
                    );
                }
            }
        }
    }

    #[test]
    fn fragment_order_is_strict_total() {
        let tree = FiniteTree::downward_closure([gs![0, 1], gs![2]]);
        let frag = KbFragment::build(&tree, 5);
        for (i, s) in frag.order.iter().enumerate() {
            for t in frag.order.iter().skip(i + 1) {
                assert!(kb_less(s, t) && !kb_less(t, s));
            }
        }
        // every plus entry is a leaf of the fragment
        for p in &frag.plus_entries {
            assert!(!frag.base.contains(p));
            assert!(frag.base.contains(&p.predecessor().unwrap()));
        }
    }

    #[test]
    fn niceness_examples() {
        let just_root = FiniteTree::downward_closure([gs![]]);
        assert!(is_nice(&just_root, 8).nice); // vacuous at level 3

        let bad = FiniteTree::downward_closure([gs![0, 0, 2]]);
        let rep = is_nice(&bad, 8);
        assert!(!rep.nice);
        assert_eq!(rep.counterexample, Some(gs![0, 0, 2]));

        let good = FiniteTree::downward_closure([gs![0, 0, 0], gs![0, 0, 1]]);
        assert!(is_nice(&good, 8).nice);

        // missing sibling at level 3
        let half = FiniteTree::downward_closure([gs![0, 0, 0]]);
        let rep = is_nice(&half, 8);
        assert!(!rep.nice);
        assert_eq!(rep.counterexample, Some(gs![0, 0, 1]));
    }

    #[test]
    fn nice_embed_trivial() {
        let just_root = FiniteTree::downward_closure([gs![]]);
        let (img, map) = nice_embed(&just_root);
        assert_eq!(img, just_root);
        assert_eq!(map[&GString::empty()], GString::empty());
    }

    #[test]
    fn nice_embed_two_branches() {
        let t = FiniteTree::downward_closure([gs![0], gs![1]]);
        let (img, map) = nice_embed(&t);
        assert!(is_nice(&img, img.depth() + 4).nice);
        assert_eq!(map[&gs![0]], gs![0, 0, 0, 0]);
        assert_eq!(map[&gs![1]], gs![1, 0, 0, 0]);
        // both 0/1 children exist at level 3
        assert!(img.contains(&gs![0, 0, 1]));
        assert!(img.contains(&gs![1, 0, 1]));
        // expansionary shape on all pairs
        check_expansionary_map(&map);
    }

    #[test]
    fn nice_embed_path() {
        let t = FiniteTree::downward_closure([gs![0, 0]]);
        let (img, map) = nice_embed(&t);
        assert!(is_nice(&img, 12).nice);
        assert_eq!(map[&gs![0, 0]].len(), 8);
        check_expansionary_map(&map);
        // path stubs correspond bijectively: input leaves map onto the
        // maximal image strings, and the only other maximal image strings
        // are the dead level ≡ 3 siblings the embedding keeps as leaves.
        for leaf in t.leaves() {
            assert!(img.leaves().contains(&map[&leaf]));
        }
        for m in img.leaves() {
            let from_input = map.values().any(|v| v == &m);
            let dead_sibling = m.len() % 4 == 3 && m.last() == Some(1);
            assert!(from_input || dead_sibling, "unexpected maximal string {m}");
        }
    }

    fn check_expansionary_map(map: &BTreeMap<GString, GString>) {
        for (s, fs) in map {
            for (t, ft) in map {
                assert_eq!(s.properly_extends(t), fs.properly_extends(ft));
                assert_eq!(s.left_of(t), fs.left_of(ft));
                if !s.compatible(t) {
                    assert_eq!(map.get(&s.meet(t)), Some(&fs.meet(ft)));
                }
            }
        }
    }

    #[test]
    fn rank_single_root() {
        let t = FiniteTree::downward_closure([gs![]]);
        let table = kb_rank(&t, 4);
        for n in 0..=4u64 {
            assert_eq!(table.ranks[&gs![n]], OrdinalCnf::finite(n));
        }
        assert_eq!(table.ranks[&GString::empty()], w());
        assert_eq!(table.order_type, w().succ());
    }

    #[test]
    fn rank_one_child() {
        let t = FiniteTree::downward_closure([gs![0]]);
        let table = kb_rank(&t, 4);
        for n in 0..=4u64 {
            assert_eq!(table.ranks[&gs![0, n]], OrdinalCnf::finite(n));
        }
        assert_eq!(table.ranks[&gs![0]], w());
        for k in 1..=4u64 {
            assert_eq!(table.ranks[&gs![k]], w().add_finite(k));
        }
        assert_eq!(table.ranks[&GString::empty()], w().add(&w()));
    }

    #[test]
    fn rank_depth_two_path() {
        let t = FiniteTree::downward_closure([gs![0, 0]]);
        let table = kb_rank(&t, 3);
        // ε sits above ⟨0,0⟩'s fan (ω), ⟨0,0⟩, ⟨0⟩'s tail fan (ω), ⟨0⟩,
        // then its own tail fan: ω·3 total predecessors.
        let w3 = w().add(&w()).add(&w());
        assert_eq!(table.ranks[&GString::empty()], w3);
    }

    #[test]
    fn rank_positions_limit_vs_successor() {
        // T-members get limit ranks; fan leaves get successor (or zero) ranks.
        let t = FiniteTree::downward_closure([gs![0, 0], gs![2]]);
        let table = kb_rank(&t, 4);
        let frag = KbFragment::build(&t, 4);
        let least = eta(&t, &GString::empty());
        for s in &frag.order {
            let r = &table.ranks[s];
            if t.contains(s) {
                assert!(r.is_limit(), "{s} should have limit rank, got {r}");
            } else if *s == least {
                assert!(r.is_zero());
            } else {
                assert!(r.is_successor(), "{s} should be a successor, got {r}");
            }
        }
    }

    #[test]
    fn lazy_tree_validation() {
        // accepts a genuine tree
        let ok = ValidatingLazyTree::new(LazyTree::new(
            |s: &GString| s.entries().iter().all(|&x| x == 0),
            8,
            8,
        ));
        assert!(ok.member(&gs![0, 0]).unwrap());
        assert!(!ok.member(&gs![1]).unwrap());

        // rejects closure violations loudly
        let bad = ValidatingLazyTree::new(LazyTree::new(|s: &GString| s.len() == 2, 8, 8));
        match bad.member(&gs![0, 0]) {
            Err(TreeError::ClosureViolation { child, parent }) => {
                assert_eq!(child, gs![0, 0]);
                assert_eq!(parent, gs![0]);
            }
            other => panic!("expected closure violation, got {other:?}"),
        }

        // budget enforcement
        let deep = ValidatingLazyTree::new(LazyTree::new(|_| true, 3, 3));
        assert!(matches!(
            deep.member(&gs![0, 0, 0, 0]),
            Err(TreeError::BudgetExceeded { .. })
        ));
    }
}
