//! Multiprojections: maps from function symbols to multisets of argument
//! positions.
//!
//! Applying a multiprojection to a term produces a multiset of terms.
//! When `π(f)` is nonempty, `π(f(t1,...,tn))` is the multiset sum of
//! `π(t_i)` over the chosen positions `i`, each taken as often as the
//! position occurs in `π(f)`; variables and symbols with an empty
//! projection stay put as singletons. Simple projections (exactly one
//! position per relevant symbol, applied once at the root) and recursive
//! projections (at most one position per symbol, unit weight, applied
//! recursively) are the restricted search modes built on top.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::multiset::Multiset;
use crate::term::{Symbol, Term};

/// Restriction on the projection search.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ProjectionMode {
    /// Exactly one position per pair-root symbol, nothing elsewhere,
    /// unit weights.
    Simple,
    /// At most one position per symbol, unit weights.
    Recursive,
    /// Arbitrary position multisets.
    Multi,
}

impl fmt::Display for ProjectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProjectionMode::Simple => "simple",
            ProjectionMode::Recursive => "recursive",
            ProjectionMode::Multi => "multi",
        };
        f.pad(s)
    }
}

impl FromStr for ProjectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simple" => Ok(ProjectionMode::Simple),
            "recursive" => Ok(ProjectionMode::Recursive),
            "multi" => Ok(ProjectionMode::Multi),
            other => Err(format!("unknown projection mode '{other}'")),
        }
    }
}

/// A multiprojection. Symbols without an entry project to the empty
/// multiset. Every stored position `i` satisfies `1 <= i <= arity`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Multiprojection {
    map: BTreeMap<Symbol, Multiset<usize>>,
}

impl Multiprojection {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `π(f)`; panics if a position is out of the symbol's range.
    pub fn set(&mut self, f: Symbol, positions: Multiset<usize>) {
        for (&i, _) in positions.iter() {
            assert!(
                i >= 1 && i <= f.arity(),
                "position {i} out of range for {} of arity {}",
                f.display_name(),
                f.arity()
            );
        }
        if positions.is_empty() {
            self.map.remove(&f);
        } else {
            self.map.insert(f, positions);
        }
    }

    /// The position multiset for `f`; `None` means the empty projection.
    pub fn get(&self, f: &Symbol) -> Option<&Multiset<usize>> {
        self.map.get(f)
    }

    /// Whether `π(f)` is nonempty.
    pub fn projects(&self, f: &Symbol) -> bool {
        self.map.contains_key(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Multiset<usize>)> {
        self.map.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// The positions of `π(f)` as a sorted list with repeats.
    pub fn positions_of(&self, f: &Symbol) -> Vec<usize> {
        match self.map.get(f) {
            None => Vec::new(),
            Some(ms) => {
                let mut out = Vec::new();
                for (&i, n) in ms.iter() {
                    out.extend(std::iter::repeat_n(i, n));
                }
                out
            }
        }
    }

    /// Applies the projection to a term, yielding a multiset of terms.
    pub fn apply(&self, t: &Term) -> Multiset<Term> {
        match t {
            Term::Var(_) => Multiset::singleton(t.clone()),
            Term::App(f, args) => match self.map.get(f) {
                None => Multiset::singleton(t.clone()),
                Some(positions) => {
                    let mut out = Multiset::new();
                    for (&i, weight) in positions.iter() {
                        let sub = self.apply(&args[i - 1]);
                        out = out.sum(&sub.scaled(weight));
                    }
                    out
                }
            },
        }
    }
}

impl fmt::Display for Multiprojection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (sym, _) in self.iter() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{}: {:?}", sym.display_name(), self.positions_of(sym))?;
            first = false;
        }
        Ok(())
    }
}
