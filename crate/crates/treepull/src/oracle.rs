//! Desk-scale stand-ins for jump oracles.
//!
//! Nothing here computes a jump. Every oracle-dependent quantity consumed by
//! the pulldown is a declared fixture: a staged tree approximation with
//! explicit flips, an r.e. enumeration as a stage-tagged event list, or a
//! staged partial string functional as an entry list. Fixtures are validated
//! at load (downward-closed slices, monotone entries) and immutable after,
//! which is what makes every run replayable and every verification
//! decidable.

use crate::strings::GString;
use crate::trees::FiniteTree;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("flip at stage {stage} touches {string} inside the frozen prefix (length ≤ {frozen})")]
    FlipInFrozenPrefix {
        stage: u64,
        string: GString,
        frozen: usize,
    },
    #[error("stage-{stage} slice is not downward closed: contains {child} but not {parent}")]
    SliceNotClosed {
        stage: u64,
        child: GString,
        parent: GString,
    },
    #[error("functional entry (stage {stage}, {input} ↦ {output}) violates |output| ≤ |input|")]
    OutputTooLong {
        stage: u64,
        input: GString,
        output: GString,
    },
    #[error("functional is not stage-monotone at input {input}: output {earlier} (stage {s0}) vs {later} (stage {s1})")]
    NotStageMonotone {
        input: GString,
        earlier: GString,
        s0: u64,
        later: GString,
        s1: u64,
    },
    #[error("functional is not input-monotone at stage {stage}: {short} ↦ {short_out} but {long} ↦ {long_out}")]
    NotInputMonotone {
        stage: u64,
        short: GString,
        short_out: GString,
        long: GString,
        long_out: GString,
    },
}

// ---------------------------------------------------------------------------
// Staged tree approximations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipDir {
    In,
    Out,
}

/// One membership flip: `string` enters or leaves the approximation at
/// `stage` (inclusive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flip {
    pub stage: u64,
    pub string: GString,
    pub dir: FlipDir,
}

/// A stagewise approximation `T′_s`: a base tree plus a finite flip list.
///
/// Slices are finite, downward closed, and agree with the frozen prefix on
/// all strings of length ≤ `frozen_len` at every stage; violations are
/// rejected at load.
#[derive(Debug, Clone)]
pub struct StagedTree {
    base: FiniteTree,
    flips: Vec<Flip>,
    pub frozen_len: usize,
    /// Fixture metadata: stage from which a string's verdict never changes.
    pub stable_at: BTreeMap<GString, u64>,
}

impl StagedTree {
    pub fn constant(base: FiniteTree, frozen_len: usize) -> Self {
        StagedTree {
            base,
            flips: Vec::new(),
            frozen_len,
            stable_at: BTreeMap::new(),
        }
    }

    pub fn new(
        base: FiniteTree,
        frozen_len: usize,
        mut flips: Vec<Flip>,
        stable_at: BTreeMap<GString, u64>,
    ) -> Result<Self, OracleError> {
        flips.sort_by(|a, b| (a.stage, a.string.clone()).cmp(&(b.stage, b.string.clone())));
        for f in &flips {
            if f.string.len() <= frozen_len {
                return Err(OracleError::FlipInFrozenPrefix {
                    stage: f.stage,
                    string: f.string.clone(),
                    frozen: frozen_len,
                });
            }
        }
        let tree = StagedTree {
            base,
            flips,
            frozen_len,
            stable_at,
        };
        // every slice that can differ from its predecessor must be closed
        let mut stages: Vec<u64> = tree.flips.iter().map(|f| f.stage).collect();
        stages.push(0);
        stages.sort_unstable();
        stages.dedup();
        for s in stages {
            let members = tree.slice_members(s);
            for m in &members {
                if !m.is_empty() {
                    let p = m.predecessor().unwrap();
                    if !members.contains(&p) {
                        return Err(OracleError::SliceNotClosed {
                            stage: s,
                            child: m.clone(),
                            parent: p,
                        });
                    }
                }
            }
        }
        Ok(tree)
    }

    fn slice_members(&self, stage: u64) -> BTreeSet<GString> {
        let mut members: BTreeSet<GString> = self.base.iter().cloned().collect();
        for f in &self.flips {
            if f.stage > stage {
                break;
            }
            match f.dir {
                FlipDir::In => {
                    members.insert(f.string.clone());
                }
                FlipDir::Out => {
                    members.remove(&f.string);
                }
            }
        }
        members
    }

    /// The stage-s verdict for σ.
    pub fn query(&self, s: &GString, stage: u64) -> bool {
        let mut v = self.base.contains(s);
        for f in &self.flips {
            if f.stage > stage {
                break;
            }
            if &f.string == s {
                v = matches!(f.dir, FlipDir::In);
            }
        }
        v
    }

    /// The full stage-s slice as a finite tree.
    pub fn slice(&self, stage: u64) -> FiniteTree {
        // slices at every flip stage were validated closed at load
        FiniteTree::new(self.slice_members(stage)).expect("validated slice")
    }

    /// Least t ≤ `stage` such that σ is in every slice from t through `stage`,
    /// on the raw (ungated) approximation.
    pub fn raw_entry(&self, s: &GString, stage: u64) -> Option<u64> {
        let mut since = if self.base.contains(s) { Some(0) } else { None };
        for f in &self.flips {
            if f.stage > stage {
                break;
            }
            if &f.string == s {
                since = match f.dir {
                    FlipDir::In => since.or(Some(f.stage)),
                    FlipDir::Out => None,
                };
            }
        }
        since
    }

    pub fn frozen_prefix(&self) -> FiniteTree {
        self.base.restrict(self.frozen_len)
    }

    pub fn flips(&self) -> &[Flip] {
        &self.flips
    }
}

/// Attention-gated view of a [`StagedTree`].
///
/// Once a string is tracked, its verdict as seen through the gate changes
/// only when `refresh` is called for it — the construction calls that exactly
/// at the string's attention stages, which realizes the usual simplifying
/// assumption that approximations to a string change only when it is looked
/// at. Untracked strings pass through raw.
#[derive(Debug, Clone)]
pub struct AttentionGate {
    inner: StagedTree,
    committed: HashMap<GString, (bool, Option<u64>)>,
}

impl AttentionGate {
    pub fn new(inner: StagedTree) -> Self {
        AttentionGate {
            inner,
            committed: HashMap::new(),
        }
    }

    pub fn inner(&self) -> &StagedTree {
        &self.inner
    }

    /// Gated verdict at `stage`.
    pub fn query(&self, s: &GString, stage: u64) -> bool {
        match self.committed.get(s) {
            Some((v, _)) => *v,
            None => self.inner.query(s, stage),
        }
    }

    /// Re-commit σ's verdict from the raw approximation (an attention event).
    /// Returns the fresh verdict.
    pub fn refresh(&mut self, s: &GString, stage: u64) -> bool {
        let v = self.inner.query(s, stage);
        let entry = if v {
            match self.committed.get(s) {
                Some((true, e)) => *e,
                Some((false, _)) => Some(stage),
                None => self.inner.raw_entry(s, stage),
            }
        } else {
            None
        };
        self.committed.insert(s.clone(), (v, entry));
        v
    }

    pub fn untrack(&mut self, s: &GString) {
        self.committed.remove(s);
    }

    pub fn is_tracked(&self, s: &GString) -> bool {
        self.committed.contains_key(s)
    }

    /// "Appears to enter at stage t": least t with σ in the gated view on all
    /// of [t, stage].
    pub fn apparent_entry(&self, s: &GString, stage: u64) -> Option<u64> {
        match self.committed.get(s) {
            Some((true, e)) => *e,
            Some((false, _)) => None,
            None => self.inner.raw_entry(s, stage),
        }
    }
}

// ---------------------------------------------------------------------------
// r.e. enumeration fixtures
// ---------------------------------------------------------------------------

/// A stage-tagged enumeration of strings; once enumerated, always enumerated.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EnumFixture {
    events: Vec<(u64, GString)>,
}

impl EnumFixture {
    pub fn new(mut events: Vec<(u64, GString)>) -> Self {
        events.sort();
        EnumFixture { events }
    }

    /// All strings enumerated by stage s.
    pub fn enumerated(&self, stage: u64) -> BTreeSet<GString> {
        self.events
            .iter()
            .filter(|(t, _)| *t <= stage)
            .map(|(_, s)| s.clone())
            .collect()
    }

    pub fn contains_at(&self, s: &GString, stage: u64) -> bool {
        self.events.iter().any(|(t, w)| *t <= stage && w == s)
    }

    pub fn events(&self) -> &[(u64, GString)] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Staged partial string functionals
// ---------------------------------------------------------------------------

/// One committed computation: at `stage`, inputs extending `input` map to (at
/// least) `output`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnEntry {
    pub stage: u64,
    pub input: GString,
    pub output: GString,
}

/// A staged monotone string functional given by finitely many entries.
///
/// Validation enforces the use convention `|output| ≤ |input|`, stage
/// monotonicity (outputs on a fixed input only extend as the stage grows) and
/// input monotonicity at each stage (longer inputs yield extending outputs).
#[derive(Debug, Clone, Default)]
pub struct StagedFunctional {
    entries: Vec<FnEntry>,
}

impl StagedFunctional {
    pub fn empty() -> Self {
        StagedFunctional::default()
    }

    pub fn new(mut entries: Vec<FnEntry>) -> Result<Self, OracleError> {
        entries.sort_by(|a, b| {
            (a.stage, a.input.clone(), a.output.clone())
                .cmp(&(b.stage, b.input.clone(), b.output.clone()))
        });
        for e in &entries {
            if e.output.len() > e.input.len() {
                return Err(OracleError::OutputTooLong {
                    stage: e.stage,
                    input: e.input.clone(),
                    output: e.output.clone(),
                });
            }
        }
        let f = StagedFunctional { entries };
        let mut stages: Vec<u64> = f.entries.iter().map(|e| e.stage).collect();
        stages.sort_unstable();
        stages.dedup();
        for e in &f.entries {
            for e2 in &f.entries {
                if e.input == e2.input && e.stage <= e2.stage && !e2.output.extends(&e.output) {
                    return Err(OracleError::NotStageMonotone {
                        input: e.input.clone(),
                        earlier: e.output.clone(),
                        s0: e.stage,
                        later: e2.output.clone(),
                        s1: e2.stage,
                    });
                }
            }
        }
        for &s in &stages {
            for e in &f.entries {
                for e2 in &f.entries {
                    if e.stage <= s && e2.stage <= s && e2.input.properly_extends(&e.input) {
                        let short_out = f.eval(&e.input, s);
                        let long_out = f.eval(&e2.input, s);
                        if !long_out.extends(&short_out) {
                            return Err(OracleError::NotInputMonotone {
                                stage: s,
                                short: e.input.clone(),
                                short_out,
                                long: e2.input.clone(),
                                long_out,
                            });
                        }
                    }
                }
            }
        }
        Ok(f)
    }

    /// The longest committed output at `stage` for the longest entry input
    /// that is a prefix of τ; ε when nothing applies.
    pub fn eval(&self, tau: &GString, stage: u64) -> GString {
        let mut best: Option<&FnEntry> = None;
        for e in &self.entries {
            if e.stage <= stage && tau.extends(&e.input) {
                let better = match best {
                    None => true,
                    Some(b) => {
                        (e.input.len(), e.output.len(), e.stage)
                            > (b.input.len(), b.output.len(), b.stage)
                    }
                };
                if better {
                    best = Some(e);
                }
            }
        }
        best.map_or_else(GString::empty, |e| e.output.clone())
    }

    /// Do τ₀, τ₁ produce incompatible outputs at `stage`?
    pub fn splits(&self, t0: &GString, t1: &GString, stage: u64) -> bool {
        let o0 = self.eval(t0, stage);
        let o1 = self.eval(t1, stage);
        o0.incompatible(&o1)
    }

    pub fn entries(&self) -> &[FnEntry] {
        &self.entries
    }

    pub fn max_stage(&self) -> Option<u64> {
        self.entries.iter().map(|e| e.stage).max()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gs;

    fn base() -> FiniteTree {
        FiniteTree::downward_closure([gs![0, 0], gs![1]])
    }

    #[test]
    fn constant_fixture_query() {
        let t = StagedTree::constant(base(), 0);
        for s in [0u64, 5, 100] {
            assert!(t.query(&gs![0, 0], s));
            assert!(!t.query(&gs![2], s));
        }
    }

    #[test]
    fn flip_fixture() {
        let t = StagedTree::new(
            base(),
            0,
            vec![Flip {
                stage: 7,
                string: gs![0, 0],
                dir: FlipDir::Out,
            }],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(t.query(&gs![0, 0], 6));
        assert!(!t.query(&gs![0, 0], 8));
        assert_eq!(t.raw_entry(&gs![0, 0], 6), Some(0));
        assert_eq!(t.raw_entry(&gs![0, 0], 9), None);
    }

    #[test]
    fn slice_closure_validated() {
        // flipping out an interior string breaks closure of the slice
        let r = StagedTree::new(
            base(),
            0,
            vec![Flip {
                stage: 3,
                string: gs![0],
                dir: FlipDir::Out,
            }],
            BTreeMap::new(),
        );
        assert!(matches!(r, Err(OracleError::SliceNotClosed { .. })));
    }

    #[test]
    fn frozen_prefix_protected() {
        let r = StagedTree::new(
            base(),
            2,
            vec![Flip {
                stage: 3,
                string: gs![1],
                dir: FlipDir::Out,
            }],
            BTreeMap::new(),
        );
        assert!(matches!(r, Err(OracleError::FlipInFrozenPrefix { .. })));
    }

    #[test]
    fn gate_delays_flips_until_refresh() {
        let t = StagedTree::new(
            base(),
            0,
            vec![Flip {
                stage: 7,
                string: gs![0, 0],
                dir: FlipDir::Out,
            }],
            BTreeMap::new(),
        )
        .unwrap();
        let mut gate = AttentionGate::new(t);
        let s = gs![0, 0];
        gate.refresh(&s, 5); // tracked, in
        assert!(gate.query(&s, 8)); // flip at 7 not yet observed
        assert_eq!(gate.apparent_entry(&s, 8), Some(0));
        assert!(!gate.refresh(&s, 9)); // first attention ≥ 7 observes it
        assert!(!gate.query(&s, 9));
        assert_eq!(gate.apparent_entry(&s, 9), None);
    }

    #[test]
    fn gate_passthrough_when_untracked() {
        let t = StagedTree::new(
            base(),
            0,
            vec![Flip {
                stage: 7,
                string: gs![0, 0],
                dir: FlipDir::Out,
            }],
            BTreeMap::new(),
        )
        .unwrap();
        let gate = AttentionGate::new(t);
        assert!(gate.query(&gs![0, 0], 6));
        assert!(!gate.query(&gs![0, 0], 7));
    }

    #[test]
    fn enum_fixture() {
        let w = EnumFixture::new(vec![(3, gs![5])]);
        assert!(w.enumerated(2).is_empty());
        assert_eq!(w.enumerated(3).len(), 1);
        assert!(w.contains_at(&gs![5], 3));
        // monotone by construction
        for s in 0..6 {
            assert!(w.enumerated(s).is_subset(&w.enumerated(s + 1)));
        }
    }

    #[test]
    fn functional_eval_prefix_rule() {
        let f = StagedFunctional::new(vec![FnEntry {
            stage: 1,
            input: gs![0],
            output: gs![4],
        }])
        .unwrap();
        assert_eq!(f.eval(&gs![0, 9], 1), gs![4]);
        assert_eq!(f.eval(&gs![0, 9], 0), GString::empty());
        assert_eq!(f.eval(&gs![1], 1), GString::empty());
        assert!(StagedFunctional::empty().eval(&gs![3, 3], 9).is_empty());
    }

    #[test]
    fn functional_split_detection() {
        let f = StagedFunctional::new(vec![
            FnEntry {
                stage: 1,
                input: gs![0],
                output: gs![4],
            },
            FnEntry {
                stage: 1,
                input: gs![1],
                output: gs![5],
            },
        ])
        .unwrap();
        assert!(f.splits(&gs![0, 0], &gs![1, 0], 1));
        assert!(!f.splits(&gs![0, 0], &gs![0, 1], 1));
    }

    #[test]
    fn functional_validation() {
        // output longer than input
        assert!(matches!(
            StagedFunctional::new(vec![FnEntry {
                stage: 0,
                input: gs![1],
                output: gs![1, 2],
            }]),
            Err(OracleError::OutputTooLong { .. })
        ));
        // stage-monotonicity violation
        assert!(matches!(
            StagedFunctional::new(vec![
                FnEntry {
                    stage: 0,
                    input: gs![1],
                    output: gs![0],
                },
                FnEntry {
                    stage: 2,
                    input: gs![1],
                    output: gs![3],
                },
            ]),
            Err(OracleError::NotStageMonotone { .. })
        ));
        // input-monotonicity violation
        assert!(matches!(
            StagedFunctional::new(vec![
                FnEntry {
                    stage: 0,
                    input: gs![1],
                    output: gs![0],
                },
                FnEntry {
                    stage: 0,
                    input: gs![1, 1],
                    output: gs![2, 2],
                },
            ]),
            Err(OracleError::NotInputMonotone { .. })
        ));
    }
}
