//! First-order terms, rewrite rules, and term rewrite systems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A function symbol. Marked symbols are the fresh "sharp" copies that
/// dependency pair extraction introduces for root symbols; a marked
/// symbol is distinct from its unmarked original and is rendered with a
/// trailing `#`. Within one system, `(name, marked)` determines the
/// arity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol {
    name: String,
    arity: usize,
    marked: bool,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
            marked: false,
        }
    }

    /// The marked (sharp) copy of this symbol.
    pub fn marked(&self) -> Self {
        Symbol {
            name: self.name.clone(),
            arity: self.arity,
            marked: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_marked(&self) -> bool {
        self.marked
    }

    /// Printable name; marked symbols carry a `#` suffix, which cannot
    /// occur in parsed input and therefore never collides.
    pub fn display_name(&self) -> String {
        if self.marked {
            format!("{}#", self.name)
        } else {
            self.name.clone()
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_name())
    }
}

/// A first-order term: a variable or a function application whose
/// argument count matches the symbol arity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(String),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    /// Builds an application; panics if the argument count does not
    /// match the symbol arity.
    pub fn app(sym: Symbol, args: Vec<Term>) -> Self {
        assert_eq!(
            args.len(),
            sym.arity(),
            "arity mismatch constructing {}",
            sym.display_name()
        );
        Term::App(sym, args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// The root symbol, or `None` for a variable.
    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// All variable names occurring in the term.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// All subterms including the term itself, as a set.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        out.insert(self.clone());
        if let Term::App(_, args) = self {
            for a in args {
                a.collect_subterms(out);
            }
        }
    }

    /// Whether `u` occurs in `self` (including `u == self`).
    pub fn contains_subterm(&self, u: &Term) -> bool {
        self == u || self.args().iter().any(|a| a.contains_subterm(u))
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.args().iter().map(Term::node_count).sum::<usize>()
    }
}

/// Whether `u` is a proper subterm of `v`. Irreflexive and transitive on
/// any set of terms, which qualifies it as the base order for the
/// multiset extension.
pub fn strict_superterm(v: &Term, u: &Term) -> bool {
    v != u && v.contains_subterm(u)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::App(sym, args) if args.is_empty() => write!(f, "{sym}"),
            Term::App(sym, args) => {
                write!(f, "{sym}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("left-hand side of a rule is a variable")]
    VariableLhs,
    #[error("variable '{0}' occurs only on the right-hand side")]
    ExtraRhsVariable(String),
}

/// A rewrite rule `lhs -> rhs`. The left-hand side is not a variable and
/// every right-hand-side variable occurs on the left.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rule {
    lhs: Term,
    rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self, RuleError> {
        if lhs.is_var() {
            return Err(RuleError::VariableLhs);
        }
        let lhs_vars = lhs.vars();
        if let Some(x) = rhs.vars().into_iter().find(|x| !lhs_vars.contains(x)) {
            return Err(RuleError::ExtraRhsVariable(x));
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrsError {
    #[error("symbol '{name}' used with arities {first} and {second}")]
    InconsistentArity {
        name: String,
        first: usize,
        second: usize,
    },
}

/// A term rewrite system: a list of rules together with the signature
/// and variable names occurring in them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trs {
    rules: Vec<Rule>,
    signature: BTreeSet<Symbol>,
    variables: BTreeSet<String>,
}

impl Trs {
    /// Builds a system from rules, checking that each `(name, marked)`
    /// pair is used with one arity throughout.
    pub fn new(rules: Vec<Rule>) -> Result<Self, TrsError> {
        let mut arities: BTreeMap<(String, bool), usize> = BTreeMap::new();
        let mut signature = BTreeSet::new();
        let mut variables = BTreeSet::new();
        for rule in &rules {
            for term in [rule.lhs(), rule.rhs()] {
                for sub in term.subterms() {
                    match sub {
                        Term::Var(x) => {
                            variables.insert(x);
                        }
                        Term::App(f, _) => {
                            let key = (f.name().to_string(), f.is_marked());
                            if let Some(&known) = arities.get(&key) {
                                if known != f.arity() {
                                    return Err(TrsError::InconsistentArity {
                                        name: f.display_name(),
                                        first: known,
                                        second: f.arity(),
                                    });
                                }
                            } else {
                                arities.insert(key, f.arity());
                            }
                            signature.insert(f);
                        }
                    }
                }
            }
        }
        Ok(Trs {
            rules,
            signature,
            variables,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn signature(&self) -> &BTreeSet<Symbol> {
        &self.signature
    }

    pub fn variables(&self) -> &BTreeSet<String> {
        &self.variables
    }

    /// Symbols that occur as the root of some left-hand side.
    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.rules
            .iter()
            .filter_map(|r| r.lhs().root().cloned())
            .collect()
    }

    /// Renders the system in TPDB syntax; parsing the result yields an
    /// equal system.
    pub fn to_tpdb(&self) -> String {
        let mut out = String::from("(VAR");
        for v in &self.variables {
            out.push(' ');
            out.push_str(v);
        }
        out.push_str(")\n(RULES\n");
        for rule in &self.rules {
            out.push_str(&format!("  {rule}\n"));
        }
        out.push_str(")\n");
        out
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_tpdb())
    }
}
