//! Ordinals below ε₀ in Cantor normal form.
//!
//! This is the concrete arithmetic that backs the rank oracle: ranks of
//! Kleene–Brouwer positions on finite trees land well below ε₀, so a list of
//! `(exponent, coefficient)` pairs with strictly decreasing exponents is an
//! exact representation. Addition implements the usual absorption rule
//! (e.g. `ω + 1 + ω = ω·2`).

use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

/// A Cantor normal form ordinal: `Σ ω^eᵢ · cᵢ` with `e₀ > e₁ > …` and `cᵢ ≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrdinalCnf {
    terms: Vec<(OrdinalCnf, u64)>,
}

impl OrdinalCnf {
    pub fn zero() -> Self {
        OrdinalCnf { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            OrdinalCnf {
                terms: vec![(Self::zero(), n)],
            }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::finite(1))
    }

    /// ω^e.
    pub fn omega_pow(e: OrdinalCnf) -> Self {
        OrdinalCnf { terms: vec![(e, 1)] }
    }

    /// ω^e · c (zero when `c = 0`).
    pub fn omega_pow_times(e: OrdinalCnf, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            OrdinalCnf { terms: vec![(e, c)] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Limit ordinal: nonzero with no finite part.
    pub fn is_limit(&self) -> bool {
        match self.terms.last() {
            None => false,
            Some((e, _)) => !e.is_zero(),
        }
    }

    /// Successor ordinal: nonzero finite part.
    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some((e, _)) if e.is_zero())
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    /// Ordinal addition with absorption.
    pub fn add(&self, other: &OrdinalCnf) -> OrdinalCnf {
        let Some((lead, lead_c)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(OrdinalCnf, u64)> = self
            .terms
            .iter()
            .take_while(|(e, _)| e >= lead)
            .cloned()
            .collect();
        match terms.last_mut() {
            Some((e, c)) if e == lead => {
                *c += lead_c;
                terms.extend(other.terms[1..].iter().cloned());
            }
            _ => terms.extend(other.terms.iter().cloned()),
        }
        OrdinalCnf { terms }
    }

    pub fn add_finite(&self, n: u64) -> OrdinalCnf {
        self.add(&Self::finite(n))
    }

    pub fn succ(&self) -> OrdinalCnf {
        self.add_finite(1)
    }

    /// Guess the supremum of a strictly increasing window of ordinals.
    ///
    /// Recognizes the patterns that arise from fans and fundamental sequences:
    /// a fixed prefix followed by a growing coefficient (sup bumps the
    /// exponent) or by growing exponents (sup of the exponents, recursively).
    /// Returns `None` when the window is too short, not strictly increasing,
    /// or the last steps don't agree on a pattern.
    pub fn limit_of_window(window: &[OrdinalCnf]) -> Option<OrdinalCnf> {
        if window.len() < 3 {
            return None;
        }
        for pair in window.windows(2) {
            if pair[0] >= pair[1] {
                return None;
            }
        }
        let cand = Self::limit_step(&window[window.len() - 2], &window[window.len() - 1])?;
        let check = Self::limit_step(&window[window.len() - 3], &window[window.len() - 2])?;
        if cand != check {
            return None;
        }
        if window.iter().any(|h| h >= &cand) {
            return None;
        }
        Some(cand)
    }

    /// Sup candidate from two consecutive elements of an increasing sequence.
    fn limit_step(a: &OrdinalCnf, b: &OrdinalCnf) -> Option<OrdinalCnf> {
        let mut i = 0;
        while i < a.terms.len() && i < b.terms.len() && a.terms[i] == b.terms[i] {
            i += 1;
        }
        let prefix = OrdinalCnf {
            terms: b.terms[..i].to_vec(),
        };
        match (a.terms.get(i), b.terms.get(i)) {
            (Some((ea, ca)), Some((eb, cb))) if ea == eb && cb > ca => {
                // growing coefficient at a fixed exponent: sup is ω^(e+1)
                Some(prefix.add(&Self::omega_pow(ea.succ())))
            }
            (Some((ea, _)), Some((eb, _))) if eb > ea => {
                // growing exponent: recurse on the exponent pair
                let e = Self::limit_step(ea, eb)?;
                Some(prefix.add(&Self::omega_pow(e)))
            }
            (None, Some((eb, _))) => {
                // a is a proper prefix of b: treat as exponent-step from below
                Some(prefix.add(&Self::omega_pow(eb.succ())))
            }
            _ => None,
        }
    }
}

impl PartialOrd for OrdinalCnf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdinalCnf {
    fn cmp(&self, other: &Self) -> Ordering {
        for (x, y) in self.terms.iter().zip(other.terms.iter()) {
            match x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl fmt::Display for OrdinalCnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                if e.as_finite() == Some(1) {
                    write!(f, "w")?;
                } else if e.as_finite().is_some() {
                    write!(f, "w^{e}")?;
                } else {
                    write!(f, "w^({e})")?;
                }
                if *c != 1 {
                    write!(f, "*{c}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OrdinalCnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> OrdinalCnf {
        OrdinalCnf::omega()
    }

    #[test]
    fn absorption() {
        // ω + 1 + ω = ω·2
        let a = w().add_finite(1).add(&w());
        assert_eq!(a, w().add(&w()));
        assert_eq!(a.to_string(), "w*2");
    }

    #[test]
    fn ordering() {
        assert!(OrdinalCnf::finite(5) < w());
        assert!(w() < w().add_finite(1));
        assert!(w().add_finite(9) < w().add(&w()));
        assert!(w().add(&w()) < OrdinalCnf::omega_pow(OrdinalCnf::finite(2)));
    }

    #[test]
    fn limit_and_successor() {
        assert!(w().is_limit());
        assert!(!w().is_successor());
        assert!(w().add_finite(3).is_successor());
        assert!(!OrdinalCnf::zero().is_limit());
        assert!(!OrdinalCnf::zero().is_successor());
    }

    #[test]
    fn window_limits() {
        let fin: Vec<_> = (5..9).map(OrdinalCnf::finite).collect();
        assert_eq!(OrdinalCnf::limit_of_window(&fin), Some(w()));

        let mults: Vec<_> = (1..5)
            .map(|k| {
                let mut a = OrdinalCnf::zero();
                for _ in 0..k {
                    a = a.add(&w());
                }
                a.add_finite(2)
            })
            .collect();
        // ω+2, ω·2+2, ω·3+2, … → ω²
        assert_eq!(
            OrdinalCnf::limit_of_window(&mults),
            Some(OrdinalCnf::omega_pow(OrdinalCnf::finite(2)))
        );

        let pows: Vec<_> = (1..5)
            .map(|k| OrdinalCnf::omega_pow(OrdinalCnf::finite(k)))
            .collect();
        // ω, ω², ω³, … → ω^ω
        assert_eq!(
            OrdinalCnf::limit_of_window(&pows),
            Some(OrdinalCnf::omega_pow(w()))
        );

        // not strictly increasing
        let flat = vec![w(), w(), w()];
        assert_eq!(OrdinalCnf::limit_of_window(&flat), None);
    }
}
