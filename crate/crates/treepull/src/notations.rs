//! Apparent ordinal notations as structured terms.
//!
//! A [`NotationTerm`] is zero, a successor, or a limit carrying a named,
//! deterministic fundamental sequence. Nothing here decides membership in the
//! genuine notation system (that question is not decidable); instead all
//! comparisons are budgeted three-valued descents and all heights are
//! pattern-recognized suprema over a window of the fundamental sequence,
//! measured in [`OrdinalCnf`].
//!
//! The two bridges to trees live here as well: [`rho`] assigns notations to
//! the positions of a finite tree's `T⁺` fragment by direct recursion on the
//! Kleene–Brouwer order, and [`notation_to_tree`] runs the stagewise
//! construction converting a limit notation into a labeled tree fragment
//! whose KB order mirrors the notations below it.

use crate::ordinal::OrdinalCnf;
use crate::strings::GString;
use crate::trees::FiniteTree;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NotationError {
    #[error("notation_to_tree requires a limit term, got {0}")]
    NotALimit(String),
    #[error("cannot parse notation literal {0:?}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// An apparent ordinal notation: zero, successor, or limit-with-sequence.
///
/// Equality is structural and ignores limit serials and tags, so two terms
/// built by the same route compare equal; distinct routes to the same height
/// are distinct notations and stay incomparable, as they should.
#[derive(Clone, PartialEq, Eq)]
pub enum NotationTerm {
    Zero,
    Succ(Arc<NotationTerm>),
    Lim(Arc<LimitTerm>),
}

/// A limit notation: a pure fundamental sequence plus bookkeeping.
#[derive(Clone)]
pub struct LimitTerm {
    /// Monotone witness serial; ρ allocates these in KB order so that codes
    /// of its images strictly increase. Ignored by equality.
    pub serial: u64,
    /// Human-readable identifier for logs. Ignored by equality.
    pub tag: String,
    pub seq: LimSeq,
}

/// Deterministic fundamental sequences. Same input, same output, always.
#[derive(Clone, PartialEq, Eq)]
pub enum LimSeq {
    /// n ↦ n.
    Naturals,
    /// n ↦ base repeated n times under ⊕ (so `Multiples(ω)` names ω²).
    Multiples(NotationTerm),
    /// n ↦ ω^n.
    OmegaPowers,
    /// n ↦ left ⊕ inner(n); how ⊕ acts on a limit.
    AddLeft {
        left: NotationTerm,
        inner: Arc<LimitTerm>,
    },
    /// ρ's fragment tails: explicit terms for the child positions that exist,
    /// then `base ⊕ k` along the infinite fan.
    Tail {
        prefix: Arc<Vec<NotationTerm>>,
        base: NotationTerm,
    },
}

impl PartialEq for LimitTerm {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for LimitTerm {}

impl std::hash::Hash for LimitTerm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.seq.hash(state)
    }
}

impl std::hash::Hash for NotationTerm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            NotationTerm::Zero => 0u8.hash(state),
            NotationTerm::Succ(inner) => {
                1u8.hash(state);
                inner.hash(state);
            }
            NotationTerm::Lim(l) => {
                2u8.hash(state);
                l.hash(state);
            }
        }
    }
}

impl std::hash::Hash for LimSeq {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            LimSeq::Naturals => 0u8.hash(state),
            LimSeq::Multiples(b) => {
                1u8.hash(state);
                b.hash(state);
            }
            LimSeq::OmegaPowers => 2u8.hash(state),
            LimSeq::AddLeft { left, inner } => {
                3u8.hash(state);
                left.hash(state);
                inner.hash(state);
            }
            LimSeq::Tail { prefix, base } => {
                4u8.hash(state);
                prefix.hash(state);
                base.hash(state);
            }
        }
    }
}

impl LimitTerm {
    /// The n-th element of the fundamental sequence.
    pub fn at(&self, n: u64) -> NotationTerm {
        match &self.seq {
            LimSeq::Naturals => finite(n),
            LimSeq::Multiples(base) => {
                let mut acc = NotationTerm::Zero;
                for _ in 0..n {
                    acc = o_add(&acc, base);
                }
                acc
            }
            LimSeq::OmegaPowers => omega_pow(n),
            LimSeq::AddLeft { left, inner } => o_add(left, &inner.at(n)),
            LimSeq::Tail { prefix, base } => {
                let k = prefix.len() as u64;
                if n < k {
                    prefix[n as usize].clone()
                } else {
                    o_add(base, &finite(n - k))
                }
            }
        }
    }
}

impl NotationTerm {
    pub fn lim(seq: LimSeq, serial: u64, tag: impl Into<String>) -> Self {
        NotationTerm::Lim(Arc::new(LimitTerm {
            serial,
            tag: tag.into(),
            seq,
        }))
    }

    pub fn succ(self) -> Self {
        NotationTerm::Succ(Arc::new(self))
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, NotationTerm::Lim(_))
    }

    /// Strip successor wrappers down to the non-successor core.
    pub fn non_successor_core(&self) -> &NotationTerm {
        let mut cur = self;
        while let NotationTerm::Succ(inner) = cur {
            cur = inner;
        }
        cur
    }

    /// A monotone code: limit terms are dominated by their serials, so terms
    /// whose limits were allocated later compare larger.
    pub fn term_code(&self) -> u128 {
        match self {
            NotationTerm::Zero => 0,
            NotationTerm::Succ(inner) => inner.term_code() + 1,
            NotationTerm::Lim(l) => (u128::from(l.serial) + 1) << 64,
        }
    }
}

impl fmt::Display for NotationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotationTerm::Zero => write!(f, "0"),
            NotationTerm::Succ(_) => {
                let mut k = 0u64;
                let mut cur = self;
                while let NotationTerm::Succ(inner) = cur {
                    k += 1;
                    cur = inner;
                }
                match cur {
                    NotationTerm::Zero => write!(f, "{k}"),
                    other => write!(f, "{other}+{k}"),
                }
            }
            NotationTerm::Lim(l) => write!(f, "{}", l.tag),
        }
    }
}

impl fmt::Debug for NotationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

pub fn finite(n: u64) -> NotationTerm {
    let mut t = NotationTerm::Zero;
    for _ in 0..n {
        t = t.succ();
    }
    t
}

pub fn omega() -> NotationTerm {
    NotationTerm::lim(LimSeq::Naturals, 0, "omega")
}

/// ω·k via repeated ⊕.
pub fn omega_times(k: u64) -> NotationTerm {
    let w = omega();
    let mut acc = NotationTerm::Zero;
    for _ in 0..k {
        acc = o_add(&acc, &w);
    }
    acc
}

/// ω^k as a term (ω^0 = 1).
pub fn omega_pow(k: u64) -> NotationTerm {
    match k {
        0 => finite(1),
        1 => omega(),
        _ => NotationTerm::lim(
            LimSeq::Multiples(omega_pow(k - 1)),
            0,
            format!("omega^{k}"),
        ),
    }
}

/// ω^ω.
pub fn omega_omega() -> NotationTerm {
    NotationTerm::lim(LimSeq::OmegaPowers, 0, "omega^omega")
}

/// Named limit generators for scenario files.
pub fn catalog(name: &str) -> Option<NotationTerm> {
    match name {
        "omega" => Some(omega()),
        "omega^2" => Some(omega_pow(2)),
        "omega^3" => Some(omega_pow(3)),
        "omega^omega" => Some(omega_omega()),
        _ => {
            let k: u64 = name.strip_prefix("omega*")?.parse().ok()?;
            (k >= 1).then(|| omega_times(k))
        }
    }
}

/// Notation literals: `"0"`, `"succ(t)"`, `"lim:<catalog-name>"`.
pub fn parse_notation(s: &str) -> Result<NotationTerm, NotationError> {
    let s = s.trim();
    if s == "0" {
        return Ok(NotationTerm::Zero);
    }
    if let Some(inner) = s.strip_prefix("succ(").and_then(|r| r.strip_suffix(')')) {
        return Ok(parse_notation(inner)?.succ());
    }
    if let Some(name) = s.strip_prefix("lim:") {
        return catalog(name).ok_or_else(|| NotationError::Parse(s.into()));
    }
    Err(NotationError::Parse(s.into()))
}

// ---------------------------------------------------------------------------
// Arithmetic and comparison
// ---------------------------------------------------------------------------

/// Effective addition of notations: structural, with `Zero ⊕ β = β` and
/// `α ⊕ Lim(f) = Lim(n ↦ α ⊕ f(n))`.
pub fn o_add(a: &NotationTerm, b: &NotationTerm) -> NotationTerm {
    if matches!(a, NotationTerm::Zero) {
        return b.clone();
    }
    match b {
        NotationTerm::Zero => a.clone(),
        NotationTerm::Succ(inner) => o_add(a, inner).succ(),
        NotationTerm::Lim(l) => NotationTerm::lim(
            LimSeq::AddLeft {
                left: a.clone(),
                inner: l.clone(),
            },
            l.serial,
            format!("{a}+{}", l.tag),
        ),
    }
}

/// Verdict of a budgeted `<O` comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OLess {
    Less,
    /// Definitive "not less": the predecessor structure of the right side was
    /// exhausted without finding the left side below it.
    Geq,
    /// Budget ran out while expanding limit sequences.
    Unresolved,
}

/// Decide α <O β by structural descent, expanding each limit up to `budget`
/// indices. Steps are fueled, so adversarial sequence handles cannot hang the
/// comparison; exhausted fuel reports `Unresolved`.
pub fn o_less(a: &NotationTerm, b: &NotationTerm, budget: u64) -> OLess {
    let mut fuel = budget
        .saturating_mul(budget)
        .saturating_mul(16)
        .saturating_add(512);
    o_less_fueled(a, b, budget, &mut fuel)
}

fn o_less_fueled(a: &NotationTerm, b: &NotationTerm, budget: u64, fuel: &mut u64) -> OLess {
    if *fuel == 0 {
        return OLess::Unresolved;
    }
    *fuel -= 1;
    if a == b {
        return OLess::Geq;
    }
    match b {
        NotationTerm::Zero => OLess::Geq,
        NotationTerm::Succ(inner) => {
            // α <O β+1 iff α ≤O β
            if a == inner.as_ref() {
                OLess::Less
            } else {
                o_less_fueled(a, inner, budget, fuel)
            }
        }
        NotationTerm::Lim(l) => {
            for n in 0..=budget {
                let t = l.at(n);
                if a == &t || o_less_fueled(a, &t, budget, fuel) == OLess::Less {
                    return OLess::Less;
                }
                if *fuel == 0 {
                    break;
                }
            }
            // no witness within budget; a larger index may still work
            OLess::Unresolved
        }
    }
}

/// The least limit index witnessing α ≤O Olim(β)(n), if β is a limit and a
/// witness exists within budget.
pub fn o_less_witness(a: &NotationTerm, b: &NotationTerm, budget: u64) -> Option<u64> {
    if let NotationTerm::Lim(l) = b {
        for n in 0..=budget {
            let t = l.at(n);
            if a == &t || o_less(a, &t, budget) == OLess::Less {
                return Some(n);
            }
        }
    }
    None
}

/// Comparable under ≤O within budget (in either direction, or equal).
pub fn o_comparable(a: &NotationTerm, b: &NotationTerm, budget: u64) -> bool {
    a == b || o_less(a, b, budget) == OLess::Less || o_less(b, a, budget) == OLess::Less
}

/// |α| as a CNF ordinal, when the limit sequences stabilize into recognizable
/// patterns within the budget.
///
/// Heights are memoized structurally within one call: fundamental sequences
/// rebuild the same terms over and over (`ω·n` is an n-fold ⊕), and without
/// the cache the window recursion is exponential in nesting depth.
pub fn height(a: &NotationTerm, budget: u64) -> Option<OrdinalCnf> {
    let mut memo = std::collections::HashMap::new();
    height_memo(a, budget, &mut memo)
}

fn height_memo(
    a: &NotationTerm,
    budget: u64,
    memo: &mut std::collections::HashMap<NotationTerm, Option<OrdinalCnf>>,
) -> Option<OrdinalCnf> {
    match a {
        NotationTerm::Zero => Some(OrdinalCnf::zero()),
        NotationTerm::Succ(inner) => Some(height_memo(inner, budget, memo)?.succ()),
        NotationTerm::Lim(l) => {
            if let Some(h) = memo.get(a) {
                return h.clone();
            }
            // α ⊕ β has height |α| + |β| exactly; evaluating it through the
            // window would branch once per nesting level of the ⊕ folds.
            let h = if let LimSeq::AddLeft { left, inner } = &l.seq {
                let hl = height_memo(left, budget, memo);
                let hr = height_memo(&NotationTerm::Lim(inner.clone()), budget, memo);
                match (hl, hr) {
                    (Some(x), Some(y)) => Some(x.add(&y)),
                    _ => None,
                }
            } else {
                let lo = budget.saturating_sub(4);
                let window: Option<Vec<OrdinalCnf>> = (lo..=budget)
                    .map(|n| height_memo(&l.at(n), budget, memo))
                    .collect();
                window.and_then(|w| OrdinalCnf::limit_of_window(&w))
            };
            memo.insert(a.clone(), h.clone());
            h
        }
    }
}

// ---------------------------------------------------------------------------
// ρ: KB fragments → notations
// ---------------------------------------------------------------------------

/// ρ over a finite tree: notation terms for every fragment position.
#[derive(Clone)]
pub struct RhoTable {
    /// Terms for all of T and for fan leaves σ⌢n with n ≤ the branch budget.
    pub terms: BTreeMap<GString, NotationTerm>,
}

/// Assign notations to the `T⁺` fragment of a finite tree by direct recursion
/// along the KB order: the KB-least element η(ε) gets 0, every other leaf
/// gets its KB-predecessor's term ⊕ 1, and every tree node gets the limit of
/// its child-position sequence. Limit serials are allocated in KB order, so
/// term codes strictly increase along KB on T.
pub fn rho(tree: &FiniteTree, branch_budget: u64) -> RhoTable {
    let mut terms = BTreeMap::new();
    if tree.is_empty() {
        return RhoTable { terms };
    }
    let mut serial = 1u64;
    let mut last: Option<NotationTerm> = None;
    rho_walk(
        tree,
        &GString::empty(),
        branch_budget,
        &mut serial,
        &mut last,
        &mut terms,
    );
    RhoTable { terms }
}

fn rho_walk(
    tree: &FiniteTree,
    s: &GString,
    branch_budget: u64,
    serial: &mut u64,
    last: &mut Option<NotationTerm>,
    terms: &mut BTreeMap<GString, NotationTerm>,
) -> NotationTerm {
    let labels = tree.child_labels(s);
    let mut prefix: Vec<NotationTerm> = Vec::new();
    let mut next_fan = 0u64;
    for n in labels {
        for m in next_fan..n {
            let t = leaf_term(last);
            terms.insert(s.child(m), t.clone());
            *last = Some(t.clone());
            prefix.push(t);
        }
        let t = rho_walk(tree, &s.child(n), branch_budget, serial, last, terms);
        prefix.push(t);
        next_fan = n + 1;
    }
    // base of the infinite tail: the term of position M+1
    let base = leaf_term(last);
    for m in next_fan..=branch_budget.max(next_fan) {
        terms.insert(s.child(m), o_add(&base, &finite(m - next_fan)));
    }
    let term = NotationTerm::lim(
        LimSeq::Tail {
            prefix: Arc::new(prefix),
            base,
        },
        *serial,
        format!("rho{s}"),
    );
    *serial += 1;
    terms.insert(s.clone(), term.clone());
    *last = Some(term.clone());
    term
}

/// Zero for the globally KB-least position, else predecessor's term ⊕ 1.
fn leaf_term(last: &Option<NotationTerm>) -> NotationTerm {
    match last {
        None => NotationTerm::Zero,
        Some(t) => t.clone().succ(),
    }
}

/// Label of the KB-greatest tree node strictly KB-below `node`, or Zero.
fn kb_predecessor_label(
    tree: &FiniteTree,
    labels: &BTreeMap<GString, NotationTerm>,
    node: &GString,
) -> NotationTerm {
    tree.iter()
        .filter(|t| crate::trees::kb_less(t, node))
        .fold(None::<&GString>, |best, t| match best {
            Some(b) if crate::trees::kb_less(t, b) => Some(b),
            _ => Some(t),
        })
        .map_or(NotationTerm::Zero, |t| labels[t].clone())
}

// ---------------------------------------------------------------------------
// notation_to_tree
// ---------------------------------------------------------------------------

/// A labeled tree fragment produced by [`notation_to_tree`].
#[derive(Clone)]
pub struct NotationFragment {
    pub tree: FiniteTree,
    pub labels: BTreeMap<GString, NotationTerm>,
    /// Stage at which each node entered, for replay inspection.
    pub entered: BTreeMap<GString, u64>,
}

/// Stagewise conversion of a limit notation α into a tree fragment whose KB
/// order is isomorphic to `{β ⊴ α}`.
///
/// Per stage, each node σ with label β gets at most one fresh child: writing
/// γ for the label of the KB-greatest node strictly KB-below σ (its last
/// child when children exist, the content to its left otherwise, 0 when
/// nothing is below), if γ <O β′_m for some m below the stage — β′_m being
/// the non-successor core of Olim(β)(m) — a child labeled β′_m (least such m)
/// is appended at an index large enough that its code exceeds the stage
/// number, keeping the enumeration consistent with permanent exclusion of
/// unentered codes. Comparing against the KB-global γ rather than only σ's
/// own children is what keeps labels strictly increasing along KB: a node
/// whose target is already realized to its left appends nothing, so each
/// notation below α is placed exactly once and the fans fill in the
/// successors.
pub fn notation_to_tree(
    alpha: &NotationTerm,
    stages: u64,
    o_budget: u64,
) -> Result<NotationFragment, NotationError> {
    if !alpha.is_limit() {
        return Err(NotationError::NotALimit(alpha.to_string()));
    }
    let mut tree = FiniteTree::downward_closure([GString::empty()]);
    let mut labels = BTreeMap::new();
    let mut entered = BTreeMap::new();
    labels.insert(GString::empty(), alpha.clone());
    entered.insert(GString::empty(), 0u64);
    // Verdicts are deterministic, so an index that failed against the current
    // γ stays failed; resume each node's scan where it left off and restart
    // only when γ changes.
    let mut scan: BTreeMap<GString, (NotationTerm, u64)> = BTreeMap::new();

    for s in 1..=stages {
        let snapshot: Vec<GString> = tree.iter().cloned().collect();
        for node in snapshot {
            let beta = labels[&node].clone();
            let NotationTerm::Lim(lim) = &beta else {
                continue;
            };
            let gamma = kb_predecessor_label(&tree, &labels, &node);
            let start = match scan.get(&node) {
                Some((g, m)) if *g == gamma => *m,
                _ => 0,
            };
            let mut chosen: Option<NotationTerm> = None;
            let mut reached = start;
            for m in start..s {
                let core = lim.at(m).non_successor_core().clone();
                if o_less(&gamma, &core, o_budget) == OLess::Less {
                    chosen = Some(core);
                    break;
                }
                reached = m + 1;
            }
            scan.insert(node.clone(), (gamma, reached));
            if let Some(label) = chosen {
                let children = tree.child_labels(&node);
                let stage_code = num_bigint::BigUint::from(s);
                let mut idx = children.last().map_or(0, |&x| x + 1);
                while *node.child(idx).code() <= stage_code {
                    idx += 1;
                }
                let child = node.child(idx);
                tree.insert_closed(&child);
                labels.insert(child.clone(), label);
                entered.insert(child.clone(), s);
            }
        }
    }
    Ok(NotationFragment {
        tree,
        labels,
        entered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gs;
    use crate::trees::kb_rank;

    #[test]
    fn o_add_examples() {
        let b = omega();
        assert_eq!(o_add(&b, &NotationTerm::Zero), b); // identity
        assert_eq!(o_add(&finite(2), &finite(1)), finite(3));
        assert_eq!(o_add(&omega(), &finite(1)), omega().succ());
        assert_eq!(o_add(&NotationTerm::Zero, &omega()), omega());
    }

    #[test]
    fn o_less_examples() {
        assert_eq!(o_less(&NotationTerm::Zero, &finite(1), 5), OLess::Less);
        // Succ³(0) <O ω with the witness found by expanding the sequence
        assert_eq!(o_less(&finite(3), &omega(), 5), OLess::Less);
        assert_eq!(o_less_witness(&finite(3), &omega(), 5), Some(3));
        // exhaustive descent on the successor side is definitive
        assert_eq!(o_less(&omega(), &finite(3), 5), OLess::Geq);
        // insufficient budget leaves the limit side unresolved
        assert_eq!(o_less(&finite(9), &omega(), 5), OLess::Unresolved);
    }

    #[test]
    fn o_less_catalog_chain() {
        let b = 16;
        assert_eq!(o_less(&omega(), &omega_times(2), b), OLess::Less);
        assert_eq!(o_less(&omega_times(2), &omega_pow(2), b), OLess::Less);
        assert_eq!(o_less(&omega_pow(2), &omega_omega(), b), OLess::Less);
        assert_eq!(o_less(&omega_times(2), &omega(), b), OLess::Unresolved);
    }

    #[test]
    fn heights() {
        assert_eq!(height(&NotationTerm::Zero, 8), Some(OrdinalCnf::zero()));
        assert_eq!(height(&finite(4), 8), Some(OrdinalCnf::finite(4)));
        assert_eq!(height(&omega(), 8), Some(OrdinalCnf::omega()));
        assert_eq!(
            height(&omega_times(2), 8),
            Some(OrdinalCnf::omega().add(&OrdinalCnf::omega()))
        );
        assert_eq!(
            height(&omega_pow(2), 8),
            Some(OrdinalCnf::omega_pow(OrdinalCnf::finite(2)))
        );
        assert_eq!(
            height(&omega_omega(), 8),
            Some(OrdinalCnf::omega_pow(OrdinalCnf::omega()))
        );
    }

    #[test]
    fn rho_root_only() {
        let t = FiniteTree::downward_closure([gs![]]);
        let table = rho(&t, 4);
        assert_eq!(table.terms[&gs![0]], NotationTerm::Zero); // ρ(η(ε)) = 0
        assert_eq!(table.terms[&gs![3]], finite(3));
        assert!(table.terms[&GString::empty()].is_limit());
        assert_eq!(
            height(&table.terms[&GString::empty()], 8),
            Some(OrdinalCnf::omega())
        );
    }

    #[test]
    fn rho_one_child_heights_match_ranks() {
        let t = FiniteTree::downward_closure([gs![0]]);
        let budget = 4;
        let table = rho(&t, budget);
        let ranks = kb_rank(&t, budget);
        for (s, term) in &table.terms {
            let h = height(term, 12).unwrap_or_else(|| panic!("height unresolved at {s}"));
            assert_eq!(h, ranks.ranks[s], "height/rank mismatch at {s}");
        }
        // ρ(ε) is a limit of height ω·2
        let eps = &table.terms[&GString::empty()];
        assert!(eps.is_limit());
        assert_eq!(
            height(eps, 12),
            Some(OrdinalCnf::omega().add(&OrdinalCnf::omega()))
        );
    }

    #[test]
    fn rho_codes_increase_along_kb_on_tree_nodes() {
        let t = FiniteTree::downward_closure([gs![0, 0], gs![2]]);
        let table = rho(&t, 3);
        let mut tree_nodes: Vec<&GString> = t.iter().collect();
        tree_nodes.sort_by(|a, b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if crate::trees::kb_less(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let codes: Vec<u128> = tree_nodes
            .iter()
            .map(|s| table.terms[*s].term_code())
            .collect();
        for w in codes.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn notation_tree_omega() {
        let frag = notation_to_tree(&omega(), 50, 16).unwrap();
        assert_eq!(frag.tree.len(), 1); // just ε: β′_m = 0 never exceeds γ
        assert_eq!(frag.labels[&GString::empty()], omega());
    }

    #[test]
    fn notation_tree_omega_times_2() {
        let frag = notation_to_tree(&omega_times(2), 50, 16).unwrap();
        assert_eq!(frag.tree.len(), 2); // ε plus one child labeled ω
        let child = frag
            .tree
            .iter()
            .find(|s| s.len() == 1)
            .expect("one child")
            .clone();
        assert_eq!(frag.labels[&child], omega());
        // full fragment order type ω·2 + 1
        let ranks = kb_rank(&frag.tree, 3);
        let w2 = OrdinalCnf::omega().add(&OrdinalCnf::omega());
        assert_eq!(ranks.order_type, w2.succ());
    }

    #[test]
    fn notation_tree_omega_squared() {
        let frag = notation_to_tree(&omega_pow(2), 50, 16).unwrap();
        let children = frag.tree.child_labels(&GString::empty());
        assert!(children.len() >= 10, "expected many children within budget");
        // children labeled ω, ω·2, ω·3, … and ranks match label heights
        let ranks = kb_rank(&frag.tree, 2);
        for (i, &c) in children.iter().enumerate() {
            let label = &frag.labels[&gs![c]];
            assert_eq!(label, &omega_times(i as u64 + 1));
            let h = height(label, 20).unwrap();
            assert_eq!(h, ranks.ranks[&gs![c]]);
        }
    }

    #[test]
    fn notation_tree_rejects_non_limits() {
        assert!(notation_to_tree(&finite(3), 10, 8).is_err());
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_notation("0").unwrap(), NotationTerm::Zero);
        assert_eq!(parse_notation("succ(succ(0))").unwrap(), finite(2));
        assert_eq!(parse_notation("lim:omega").unwrap(), omega());
        assert_eq!(parse_notation("lim:omega*3").unwrap(), omega_times(3));
        assert_eq!(parse_notation("succ(lim:omega)").unwrap(), omega().succ());
        assert!(parse_notation("lim:nope").is_err());
    }
}
