//! Finite strings over ω and their canonical Gödel coding.
//!
//! A [`GString`] is an immutable finite sequence of naturals. The coding is
//! pinned to `code(ε) = 0` and `code(σ⌢x) = pair(code(σ), x) + 1` with
//! `pair(a, b) = (a+b)(a+b+1)/2 + b`, which makes `code` a bijection between
//! strings and ω that is strictly monotone along proper extension. Codes are
//! computed lazily and memoized; they grow roughly quadratically per appended
//! entry, so they are kept as big integers.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

struct Inner {
    entries: Vec<u64>,
    code: OnceLock<BigUint>,
}

/// An immutable finite string of naturals with a memoized Gödel code.
///
/// Cloning is cheap (shared storage). Equality and hashing go by entries;
/// [`Ord`] compares Gödel codes, so sorted containers iterate in code order.
#[derive(Clone)]
pub struct GString {
    inner: Arc<Inner>,
}

impl GString {
    /// The empty string ε.
    pub fn empty() -> Self {
        GString::from_entries(Vec::new())
    }

    pub fn from_entries(entries: Vec<u64>) -> Self {
        GString {
            inner: Arc::new(Inner {
                entries,
                code: OnceLock::new(),
            }),
        }
    }

    pub fn single(x: u64) -> Self {
        GString::from_entries(vec![x])
    }

    pub fn entries(&self) -> &[u64] {
        &self.inner.entries
    }

    pub fn len(&self) -> usize {
        self.inner.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.entries.is_empty()
    }

    pub fn last(&self) -> Option<u64> {
        self.inner.entries.last().copied()
    }

    /// σ⌢x.
    pub fn child(&self, x: u64) -> Self {
        let mut v = self.inner.entries.clone();
        v.push(x);
        GString::from_entries(v)
    }

    /// σ⌢τ.
    pub fn concat(&self, other: &GString) -> Self {
        let mut v = self.inner.entries.clone();
        v.extend_from_slice(other.entries());
        GString::from_entries(v)
    }

    /// σ⁻, the immediate predecessor under extension. Errors on ε.
    pub fn predecessor(&self) -> Result<GString, StringError> {
        if self.is_empty() {
            return Err(StringError::PredecessorOfEmpty);
        }
        let mut v = self.inner.entries.clone();
        v.pop();
        Ok(GString::from_entries(v))
    }

    /// σ↾n, the initial segment of length `min(n, |σ|)`.
    pub fn restrict(&self, n: usize) -> GString {
        if n >= self.len() {
            self.clone()
        } else {
            GString::from_entries(self.inner.entries[..n].to_vec())
        }
    }

    /// Non-strict extension: self ⊒ other.
    pub fn extends(&self, other: &GString) -> bool {
        self.len() >= other.len() && self.inner.entries[..other.len()] == *other.entries()
    }

    pub fn properly_extends(&self, other: &GString) -> bool {
        self.len() > other.len() && self.extends(other)
    }

    /// Compatibility: one extends the other.
    pub fn compatible(&self, other: &GString) -> bool {
        self.extends(other) || other.extends(self)
    }

    pub fn incompatible(&self, other: &GString) -> bool {
        !self.compatible(other)
    }

    /// Left-of: σ ⊲ τ iff σ lexicographically precedes τ *and* σ ⊥ τ.
    pub fn left_of(&self, other: &GString) -> bool {
        let n = self.len().min(other.len());
        for i in 0..n {
            match self.inner.entries[i].cmp(&other.entries()[i]) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        false // comparable strings are never left-of
    }

    /// σ ⋏ τ, the longest common initial segment.
    pub fn meet(&self, other: &GString) -> GString {
        let n = self.len().min(other.len());
        let mut i = 0;
        while i < n && self.inner.entries[i] == other.entries()[i] {
            i += 1;
        }
        GString::from_entries(self.inner.entries[..i].to_vec())
    }

    /// ⟨m⟩^k, the string of `k` copies of `m`.
    pub fn repeated(m: u64, k: usize) -> GString {
        GString::from_entries(vec![m; k])
    }

    /// The canonical Gödel code ⌜σ⌝ (memoized).
    pub fn code(&self) -> &BigUint {
        self.inner.code.get_or_init(|| {
            let mut c = BigUint::zero();
            for &x in &self.inner.entries {
                c = cantor_pair(&c, x) + BigUint::one();
            }
            c
        })
    }

    /// Code as `u64` when it fits.
    pub fn code_u64(&self) -> Option<u64> {
        u64::try_from(self.code()).ok()
    }

    pub fn cmp_code(&self, other: &GString) -> Ordering {
        if self.entries() == other.entries() {
            return Ordering::Equal;
        }
        self.code().cmp(other.code())
    }
}

/// `pair(a, b) = (a+b)(a+b+1)/2 + b`.
fn cantor_pair(a: &BigUint, b: u64) -> BigUint {
    let s = a + b;
    (&s * (&s + BigUint::one())) / 2u32 + b
}

fn cantor_unpair(z: &BigUint) -> (BigUint, u64) {
    // w = floor((sqrt(8z+1) - 1) / 2), then b = z - w(w+1)/2, a = w - b.
    let w = ((z * 8u32 + BigUint::one()).sqrt() - BigUint::one()) / 2u32;
    let t = (&w * (&w + BigUint::one())) / 2u32;
    let b = z - t;
    let a = &w - &b;
    let b: u64 = u64::try_from(&b).expect("pairing second component exceeds u64");
    (a, b)
}

/// Inverse of [`GString::code`] for small codes. Pure integer math; the
/// pulldown decodes one stage number per stage, so this is kept cheap.
pub fn decode(n: u64) -> GString {
    let mut rev = Vec::new();
    let mut cur = n as u128;
    while cur != 0 {
        let z = cur - 1;
        let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u128;
        while w * (w + 1) / 2 > z {
            w -= 1;
        }
        while (w + 1) * (w + 2) / 2 <= z {
            w += 1;
        }
        let b = z - w * (w + 1) / 2;
        rev.push(b as u64);
        cur = w - b;
    }
    rev.reverse();
    GString::from_entries(rev)
}

/// Inverse of [`GString::code`].
pub fn decode_big(n: &BigUint) -> GString {
    let mut rev = Vec::new();
    let mut cur = n.clone();
    while !cur.is_zero() {
        let (a, b) = cantor_unpair(&(cur - BigUint::one()));
        rev.push(b);
        cur = a;
    }
    rev.reverse();
    GString::from_entries(rev)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StringError {
    #[error("predecessor of the empty string is undefined")]
    PredecessorOfEmpty,
}

impl PartialEq for GString {
    fn eq(&self, other: &Self) -> bool {
        self.entries() == other.entries()
    }
}
impl Eq for GString {}

impl std::hash::Hash for GString {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.entries().hash(state)
    }
}

impl PartialOrd for GString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Code order. Prefix-monotone but *not* shortlex: e.g. ⌜⟨1,0⟩⌝ = 7 < 10 = ⌜⟨3⟩⌝.
impl Ord for GString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_code(other)
    }
}

impl fmt::Display for GString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        write!(f, "⟨")?;
        for (i, x) in self.entries().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "⟩")
    }
}

impl fmt::Debug for GString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&[u64]> for GString {
    fn from(v: &[u64]) -> Self {
        GString::from_entries(v.to_vec())
    }
}

impl<const N: usize> From<[u64; N]> for GString {
    fn from(v: [u64; N]) -> Self {
        GString::from_entries(v.to_vec())
    }
}

impl Serialize for GString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(GString::from_entries(Vec::<u64>::deserialize(d)?))
    }
}

/// Convenience constructor used all over the tests: `gs![0, 1, 2]`.
#[macro_export]
macro_rules! gs {
    () => { $crate::strings::GString::empty() };
    ($($x:expr),+ $(,)?) => { $crate::strings::GString::from_entries(vec![$($x as u64),+]) };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_codes_to_zero() {
        assert_eq!(GString::empty().code(), &BigUint::zero());
        assert_eq!(decode(0), GString::empty());
    }

    #[test]
    fn first_codes() {
        // pair(0,0)+1 = 1, pair(1,0)+1 = 2
        assert_eq!(gs![0].code_u64(), Some(1));
        assert_eq!(gs![0, 0].code_u64(), Some(2));
        assert_eq!(decode(1), gs![0]);
    }

    #[test]
    fn roundtrip() {
        let s = gs![7, 3, 1];
        assert_eq!(decode_big(s.code()), s);
        for n in 0..2000u64 {
            assert_eq!(decode(n).code_u64(), Some(n));
        }
    }

    #[test]
    fn prefix_monotone() {
        let s = gs![4, 9, 1];
        let t = s.child(12);
        assert!(t.code() > s.code());
        assert!(gs![0, 0].code() > gs![0].code());
    }

    #[test]
    fn meet_and_left_of() {
        assert_eq!(gs![0, 1, 2].meet(&gs![0, 1, 5]), gs![0, 1]);
        let s = gs![3, 3];
        assert_eq!(s.meet(&s), s);
        assert_eq!(gs![3].meet(&gs![4]), GString::empty());

        assert!(gs![0, 9].left_of(&gs![1]));
        assert!(!gs![0].left_of(&gs![0, 1])); // comparable
        assert!(!gs![1].left_of(&gs![0, 9]));
    }

    #[test]
    fn string_algebra() {
        assert!(gs![0, 1].extends(&gs![0]));
        assert_eq!(gs![2].concat(&gs![5, 5]), gs![2, 5, 5]);
        assert_eq!(gs![4, 4].predecessor().unwrap(), gs![4]);
        assert!(GString::empty().predecessor().is_err());
    }

    #[test]
    fn trichotomy_on_small_strings() {
        // For any pair, exactly one of σ ⊑ τ, τ ⊏ σ, σ ⊲ τ, τ ⊲ σ holds.
        let mut all = vec![GString::empty()];
        for a in 0..4u64 {
            all.push(gs![a]);
            for b in 0..4u64 {
                all.push(gs![a, b]);
            }
        }
        for s in &all {
            for t in &all {
                let cases = [
                    t.extends(s),
                    s.properly_extends(t),
                    s.left_of(t),
                    t.left_of(s),
                ];
                assert_eq!(
                    cases.iter().filter(|&&c| c).count(),
                    1,
                    "trichotomy failed for {s} vs {t}"
                );
            }
        }
    }
}
