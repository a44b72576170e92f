//! Finite multisets and the multiset extension of a strict order.
//!
//! A [`Multiset`] maps elements to positive multiplicities; an absent
//! element has multiplicity 0. The multiset extension lifts a relation
//! `rel` to multisets: `M` is greater than `N` when there is a
//! decomposition `M = X + Z`, `N = Y + Z` with `X` nonempty and every
//! element of `Y` below some element of `X`.
//!
//! Three equivalent tests are provided and serve as mutual oracles:
//!
//! * [`mulex_bruteforce`] enumerates every decomposition (test oracle,
//!   size-guarded),
//! * [`mulex_canonical`] checks the single decomposition that maximizes
//!   the common part `Z = M ∩ N`,
//! * [`mulex_finite`] checks a pointwise condition over an explicit
//!   finite carrier, the form the constraint encoding is built on.
//!
//! For irreflexive and transitive `rel` all three agree. Only finite
//! multisets and finite carriers appear here; well-foundedness of the
//! extension is a property of the math, not something the code needs to
//! witness at runtime.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Elements of `M` and `N` may sum to at most this many occurrences
/// before [`mulex_bruteforce`] refuses to enumerate.
pub const BRUTEFORCE_SIZE_LIMIT: usize = 12;

/// A finite multiset over `T`.
///
/// Invariant: the underlying map never stores a zero count, so `size`
/// is always the sum of the stored multiplicities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, usize>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset {
            counts: BTreeMap::new(),
        }
    }
}

impl<T: Ord> Multiset<T> {
    /// The empty multiset.
    pub fn new() -> Self {
        Self::default()
    }

    /// The multiset containing `x` exactly once.
    pub fn singleton(x: T) -> Self {
        let mut m = Self::new();
        m.insert(x);
        m
    }

    /// Adds one occurrence of `x`.
    pub fn insert(&mut self, x: T) {
        self.insert_many(x, 1);
    }

    /// Adds `n` occurrences of `x`. A zero count is a no-op.
    pub fn insert_many(&mut self, x: T, n: usize) {
        if n > 0 {
            *self.counts.entry(x).or_insert(0) += n;
        }
    }

    /// The multiplicity of `x`; 0 when absent.
    pub fn multiplicity(&self, x: &T) -> usize {
        self.counts.get(x).copied().unwrap_or(0)
    }

    /// Whether `x` occurs at least once.
    pub fn contains(&self, x: &T) -> bool {
        self.counts.contains_key(x)
    }

    /// Total number of occurrences (sum of multiplicities).
    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Iterates over `(element, multiplicity)` in element order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> {
        self.counts.iter().map(|(x, &n)| (x, n))
    }

    /// Iterates over the distinct elements in order.
    pub fn distinct(&self) -> impl Iterator<Item = &T> {
        self.counts.keys()
    }

    /// The set of distinct elements.
    pub fn support(&self) -> BTreeSet<&T> {
        self.counts.keys().collect()
    }
}

impl<T: Ord + Clone> Multiset<T> {
    /// Multiset sum `self + other`.
    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, n) in other.iter() {
            out.insert_many(x.clone(), n);
        }
        out
    }

    /// Pointwise minimum `self ∩ other`.
    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (x, n) in self.iter() {
            let m = other.multiplicity(x);
            out.insert_many(x.clone(), n.min(m));
        }
        out
    }

    /// Saturating pointwise difference `self - other`.
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (x, n) in self.iter() {
            let m = other.multiplicity(x);
            out.insert_many(x.clone(), n.saturating_sub(m));
        }
        out
    }

    /// Every multiplicity scaled by `k`; `k = 0` yields the empty multiset.
    pub fn scaled(&self, k: usize) -> Self {
        let mut out = Self::new();
        for (x, n) in self.iter() {
            out.insert_many(x.clone(), n * k);
        }
        out
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Self::new();
        for x in iter {
            m.insert(x);
        }
        m
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (x, n) in self.iter() {
            for _ in 0..n {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "{x:?}")?;
                first = false;
            }
        }
        write!(f, "}}")
    }
}

/// An oracle predicate over some carrier. Callers that need a strict
/// order (irreflexive and transitive) can verify it on a finite carrier
/// with [`check_strict_order`].
pub trait Relation<T> {
    fn holds(&self, x: &T, y: &T) -> bool;
}

impl<T, F: Fn(&T, &T) -> bool> Relation<T> for F {
    fn holds(&self, x: &T, y: &T) -> bool {
        self(x, y)
    }
}

/// Verifies by enumeration that `rel` is irreflexive and transitive on
/// `domain`.
pub fn check_strict_order<T: Ord>(rel: &impl Relation<T>, domain: &BTreeSet<T>) -> bool {
    for x in domain {
        if rel.holds(x, x) {
            return false;
        }
    }
    for x in domain {
        for y in domain {
            if !rel.holds(x, y) {
                continue;
            }
            for z in domain {
                if rel.holds(y, z) && !rel.holds(x, z) {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MulexError {
    #[error("multisets too large for brute-force enumeration ({size} > {limit} occurrences)")]
    TooLarge { size: usize, limit: usize },
    #[error("multiset element does not belong to the carrier set")]
    OutsideCarrier,
}

/// Decides the multiset extension by enumerating decompositions.
///
/// Enumerates every sub-multiset `Z` of `M ∩ N` and accepts when some
/// `X = M - Z`, `Y = N - Z` has `X` nonempty and every element of `Y`
/// below some element of `X`. Restricting `Z` to sub-multisets of
/// `M ∩ N` loses no witnesses, since any decomposition can be shrunk to
/// one of that shape. This is a test oracle and refuses inputs with more
/// than [`BRUTEFORCE_SIZE_LIMIT`] occurrences in total.
pub fn mulex_bruteforce<T: Ord + Clone>(
    m: &Multiset<T>,
    n: &Multiset<T>,
    rel: &impl Relation<T>,
) -> Result<bool, MulexError> {
    let size = m.size() + n.size();
    if size > BRUTEFORCE_SIZE_LIMIT {
        return Err(MulexError::TooLarge {
            size,
            limit: BRUTEFORCE_SIZE_LIMIT,
        });
    }
    let common = m.intersection(n);
    let elems: Vec<(&T, usize)> = common.iter().collect();
    // Mixed-radix counter over the candidate counts for Z.
    let mut z_counts = vec![0usize; elems.len()];
    loop {
        let mut z = Multiset::new();
        for (i, &(x, _)) in elems.iter().enumerate() {
            z.insert_many(x.clone(), z_counts[i]);
        }
        let x_part = m.difference(&z);
        let y_part = n.difference(&z);
        if !x_part.is_empty()
            && y_part
                .distinct()
                .all(|y| x_part.distinct().any(|x| rel.holds(x, y)))
        {
            return Ok(true);
        }
        // Advance the counter; on overflow every Z has been tried.
        let mut i = elems.len();
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            if z_counts[i] < elems[i].1 {
                z_counts[i] += 1;
                break;
            }
            z_counts[i] = 0;
        }
    }
}

/// Decides the multiset extension via the canonical decomposition that
/// maximizes the common part: `X = M - M ∩ N`, `Y = N - M ∩ N`.
///
/// Requires `rel` to be irreflexive and transitive on the elements of
/// `M` and `N`; under that assumption it agrees with
/// [`mulex_bruteforce`].
pub fn mulex_canonical<T: Ord + Clone>(
    m: &Multiset<T>,
    n: &Multiset<T>,
    rel: &impl Relation<T>,
) -> bool {
    let common = m.intersection(n);
    let x_part = m.difference(&common);
    let y_part = n.difference(&common);
    !x_part.is_empty()
        && y_part
            .distinct()
            .all(|y| x_part.distinct().any(|x| rel.holds(x, y)))
}

/// Decides the multiset extension over an explicit finite carrier `D`
/// containing all elements of `M` and `N`:
///
/// `M > N` iff `M ≠ N` and `M(d) ≥ N(d)` for every `d ∈ D` whose
/// strict upper closure agrees on both sides, where `d` counts as
/// "upper" when `M(v) = N(v)` for every `v ∈ D` with `v rel d`.
///
/// Requires `rel` irreflexive and transitive on `D`; then it agrees
/// with [`mulex_canonical`]. This pointwise form is what the constraint
/// encoding mirrors symbolically.
pub fn mulex_finite<T: Ord + Clone>(
    m: &Multiset<T>,
    n: &Multiset<T>,
    carrier: &BTreeSet<T>,
    rel: &impl Relation<T>,
) -> Result<bool, MulexError> {
    if m.distinct().any(|x| !carrier.contains(x)) || n.distinct().any(|x| !carrier.contains(x)) {
        return Err(MulexError::OutsideCarrier);
    }
    if m == n {
        return Ok(false);
    }
    let upper = |x: &T| {
        carrier
            .iter()
            .all(|v| !rel.holds(v, x) || m.multiplicity(v) == n.multiplicity(v))
    };
    Ok(carrier
        .iter()
        .all(|d| !upper(d) || m.multiplicity(d) >= n.multiplicity(d)))
}
