//! Desk-scale combinatorics of tree pulldown constructions.
//!
//! This crate implements, over finite and budgeted data, the machinery that
//! turns a staged approximation of a tree into a computable tree plus an
//! expansionary map, together with everything needed to state and check the
//! surrounding invariants:
//!
//! - [`strings`]: finite strings over ω with a canonical monotone Gödel code;
//! - [`ordinal`]: Cantor normal form ordinals, the exact rank arithmetic;
//! - [`trees`]: downward-closed trees, Kleene–Brouwer order, `T⁺` fragments,
//!   niceness, the niceness embedding and the KB rank oracle;
//! - [`notations`]: structured ordinal notations, their comparison and
//!   heights, the ρ map from KB fragments to notations and the
//!   notation → tree converter;
//! - [`oracle`]: staged set approximations, r.e. enumeration fixtures, staged
//!   partial functionals and the attention gate;
//! - [`pulldown`]: the stagewise construction of a tree and expansionary Γ
//!   from a staged higher tree, with a replayable event log and post-hoc
//!   checkers;
//! - [`tower`]: copy-length functions, the uniformized `T*` view, finite
//!   tower assembly by iterated pulldown and the tower property checkers;
//! - [`scenario`]: the JSON scenario/result formats and the batch runner
//!   behind the `treepull` binary.
//!
//! Everything is deterministic: identical scenarios produce bit-identical
//! event logs. The oracle-dependent objects of the underlying constructions
//! are replaced throughout by declared fixtures, so every run is replayable
//! and every verification decidable.
//!
//! Start with the runnable examples (`cargo run --example kb_rank`, etc.);
//! each major capability has one.

pub mod notations;
pub mod oracle;
pub mod pulldown;
pub mod ordinal;
pub mod strings;
pub mod trees;

pub use ordinal::OrdinalCnf;
pub use strings::{decode, decode_big, GString};
pub use trees::{
    eta, is_nice, kb_less, kb_rank, kb_succ, nice_embed, FiniteTree, KbFragment, LazyTree,
    NicenessReport, RankTable, TreeError, ValidatingLazyTree,
};
