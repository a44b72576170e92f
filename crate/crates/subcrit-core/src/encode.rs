//! Constraint encoding of the subterm criterion.
//!
//! For a set of pairs `P` and rules `R`, the encoding constrains the
//! `Pos`/`Wt` unknowns so that any satisfying assignment decodes to a
//! multiprojection under which every pair weakly decreases, at least one
//! pair strictly decreases, and every rule whose root is projected weakly
//! decreases as well.
//!
//! The pieces:
//!
//! * [`encode_mul`] gives the symbolic multiplicity of a subterm `t` in
//!   the projected multiset of `s`, by recursion over `s`.
//! * [`encode_geq`] states the weak multiset decrease between two terms:
//!   over the finite carrier of their subterms, every element whose
//!   strict upper closure agrees on both sides must not gain occurrences.
//! * [`encode_neq`] states that the projected multisets differ, which
//!   together with [`encode_geq`] is exactly strict decrease.
//! * [`encode_rt`] guards a rule's constraint on its root being projected,
//!   and [`encode_san`] ties selected positions to positive weights.
//! * [`mode_constraints`] restricts the search to simple or recursive
//!   projections.
//!
//! Decoded models are never trusted: [`verify_solution`] re-checks the
//! decrease conditions directly with [`Multiprojection::apply`] and the
//! multiset extension over the proper-superterm order, and recomputes
//! which pairs are strict. Pair removal is always based on that semantic
//! check, not on the formula.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{Assignment, BoolExpr, IntExpr};
use crate::multiset::{mulex_canonical, Multiset};
use crate::projection::{Multiprojection, ProjectionMode};
use crate::term::{strict_superterm, Rule, RuleError, Symbol, Term, Trs};

/// Symbolic multiplicity of `t` in the projection of `s`.
pub fn mult(s: &Term, t: &Term) -> IntExpr {
    encode_mul(IntExpr::Const(1), s, t)
}

/// Symbolic multiplicity of `t` in the projection of `s`, where `w`
/// scales every occurrence (the product of the weights along the path
/// taken so far).
pub fn encode_mul(w: IntExpr, s: &Term, t: &Term) -> IntExpr {
    if s == t {
        return match s {
            Term::Var(_) => w,
            Term::App(f, _) => {
                let nothing_selected = BoolExpr::and(
                    (1..=f.arity())
                        .map(|i| BoolExpr::not(BoolExpr::Pos(f.clone(), i)))
                        .collect(),
                );
                IntExpr::ite(nothing_selected, w, IntExpr::Const(0))
            }
        };
    }
    match s {
        Term::App(f, args) if s.contains_subterm(t) => IntExpr::sum(
            args.iter()
                .enumerate()
                .map(|(idx, arg)| {
                    let i = idx + 1;
                    let scaled = IntExpr::prod(vec![w.clone(), IntExpr::Wt(f.clone(), i)]);
                    IntExpr::ite(
                        BoolExpr::Pos(f.clone(), i),
                        encode_mul(scaled, arg, t),
                        IntExpr::Const(0),
                    )
                })
                .collect(),
        ),
        _ => IntExpr::Const(0),
    }
}

/// The joint subterm carrier of two terms, in term order.
fn subterm_universe(s: &Term, t: &Term) -> Vec<Term> {
    let mut set = s.subterms();
    set.extend(t.subterms());
    set.into_iter().collect()
}

/// Weak decrease: for every subterm `u` of `s` or `t` whose strict
/// superterms all have equal multiplicities on both sides, the
/// multiplicity of `u` must not grow from `s` to `t`.
pub fn encode_geq(s: &Term, t: &Term) -> BoolExpr {
    let universe = subterm_universe(s, t);
    let mult_s: Vec<IntExpr> = universe.iter().map(|u| mult(s, u)).collect();
    let mult_t: Vec<IntExpr> = universe.iter().map(|u| mult(t, u)).collect();
    BoolExpr::and(
        universe
            .iter()
            .enumerate()
            .map(|(ui, u)| {
                let upper = BoolExpr::and(
                    universe
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| strict_superterm(v, u))
                        .map(|(vi, _)| BoolExpr::int_eq(mult_s[vi].clone(), mult_t[vi].clone()))
                        .collect(),
                );
                BoolExpr::implies(upper, BoolExpr::geq(mult_s[ui].clone(), mult_t[ui].clone()))
            })
            .collect(),
    )
}

/// The projections of `s` and `t` differ somewhere on the joint subterm
/// carrier.
pub fn encode_neq(s: &Term, t: &Term) -> BoolExpr {
    let universe = subterm_universe(s, t);
    BoolExpr::or(
        universe
            .iter()
            .map(|u| BoolExpr::not(BoolExpr::int_eq(mult(s, u), mult(t, u))))
            .collect(),
    )
}

/// The root of `lhs` has at least one selected position. Guards the
/// weak-decrease constraint of a rewrite rule.
pub fn encode_rt(lhs: &Term) -> Result<BoolExpr, RuleError> {
    match lhs {
        Term::Var(_) => Err(RuleError::VariableLhs),
        Term::App(f, _) => Ok(BoolExpr::or(
            (1..=f.arity())
                .map(|i| BoolExpr::Pos(f.clone(), i))
                .collect(),
        )),
    }
}

/// Sanity: a selected position has positive weight, and weights are
/// never negative.
pub fn encode_san(f: &Symbol) -> BoolExpr {
    BoolExpr::and(
        (1..=f.arity())
            .flat_map(|i| {
                [
                    BoolExpr::implies(
                        BoolExpr::Pos(f.clone(), i),
                        BoolExpr::gt(IntExpr::Wt(f.clone(), i), IntExpr::Const(0)),
                    ),
                    BoolExpr::geq(IntExpr::Wt(f.clone(), i), IntExpr::Const(0)),
                ]
            })
            .collect(),
    )
}

fn unit_weights(signature: &BTreeSet<Symbol>) -> Vec<BoolExpr> {
    signature
        .iter()
        .flat_map(|f| {
            (1..=f.arity()).map(|i| {
                BoolExpr::implies(
                    BoolExpr::Pos(f.clone(), i),
                    BoolExpr::int_eq(IntExpr::Wt(f.clone(), i), IntExpr::Const(1)),
                )
            })
        })
        .collect()
}

fn at_most_one(f: &Symbol) -> Vec<BoolExpr> {
    let mut out = Vec::new();
    for i in 1..=f.arity() {
        for j in (i + 1)..=f.arity() {
            out.push(BoolExpr::or(vec![
                BoolExpr::not(BoolExpr::Pos(f.clone(), i)),
                BoolExpr::not(BoolExpr::Pos(f.clone(), j)),
            ]));
        }
    }
    out
}

/// Extra constraints for the restricted search modes.
///
/// Simple: every marked root selects exactly one position, all other
/// symbols select none, and selected weights are 1. Recursive: every
/// symbol selects at most one position, selected weights are 1. Multi:
/// no restriction.
pub fn mode_constraints(
    mode: ProjectionMode,
    signature: &BTreeSet<Symbol>,
    marked_roots: &BTreeSet<Symbol>,
) -> BoolExpr {
    match mode {
        ProjectionMode::Multi => BoolExpr::Const(true),
        ProjectionMode::Recursive => {
            let mut parts: Vec<BoolExpr> = signature.iter().flat_map(at_most_one).collect();
            parts.extend(unit_weights(signature));
            BoolExpr::and(parts)
        }
        ProjectionMode::Simple => {
            let mut parts = Vec::new();
            for f in signature {
                if marked_roots.contains(f) {
                    parts.push(BoolExpr::or(
                        (1..=f.arity())
                            .map(|i| BoolExpr::Pos(f.clone(), i))
                            .collect(),
                    ));
                    parts.extend(at_most_one(f));
                } else {
                    for i in 1..=f.arity() {
                        parts.push(BoolExpr::not(BoolExpr::Pos(f.clone(), i)));
                    }
                }
            }
            parts.extend(unit_weights(signature));
            BoolExpr::and(parts)
        }
    }
}

/// All symbols occurring in the pairs or the rules.
pub fn problem_signature(pairs: &[Rule], trs: &Trs) -> BTreeSet<Symbol> {
    let mut signature = trs.signature().clone();
    for pair in pairs {
        for term in [pair.lhs(), pair.rhs()] {
            for sub in term.subterms() {
                if let Term::App(f, _) = sub {
                    signature.insert(f);
                }
            }
        }
    }
    signature
}

/// The full constraint for one subterm-criterion step on `(pairs, trs)`:
/// weak decrease of every pair, strict decrease of at least one pair,
/// weak decrease of every rule with projected root, sanity for every
/// symbol, and the mode restriction.
pub fn encode_problem(pairs: &[Rule], trs: &Trs, mode: ProjectionMode) -> BoolExpr {
    let signature = problem_signature(pairs, trs);
    let marked_roots: BTreeSet<Symbol> = pairs
        .iter()
        .flat_map(|p| {
            [p.lhs(), p.rhs()]
                .into_iter()
                .filter_map(|t| t.root().cloned())
        })
        .collect();

    let mut parts = Vec::new();
    parts.push(BoolExpr::and(
        pairs.iter().map(|p| encode_geq(p.lhs(), p.rhs())).collect(),
    ));
    parts.push(BoolExpr::or(
        pairs.iter().map(|p| encode_neq(p.lhs(), p.rhs())).collect(),
    ));
    parts.push(BoolExpr::and(
        trs.rules()
            .iter()
            .map(|r| {
                let guard = encode_rt(r.lhs()).expect("rule left-hand sides are applications");
                BoolExpr::implies(guard, encode_geq(r.lhs(), r.rhs()))
            })
            .collect(),
    ));
    parts.push(BoolExpr::and(signature.iter().map(encode_san).collect()));
    parts.push(mode_constraints(mode, &signature, &marked_roots));
    BoolExpr::and(parts)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error(
        "model violates the sanity constraint: position {position} of '{symbol}' selected with weight {weight}"
    )]
    SanViolation {
        symbol: String,
        position: usize,
        weight: i64,
    },
}

/// Reads a multiprojection off a model: position `i` of `f` occurs in
/// `π(f)` with the weight's multiplicity whenever `Pos(f, i)` holds.
/// A selected position with non-positive weight is a solver-integration
/// bug and is rejected.
pub fn decode_model(
    model: &Assignment,
    signature: &BTreeSet<Symbol>,
) -> Result<Multiprojection, DecodeError> {
    let mut pi = Multiprojection::new();
    for f in signature {
        let mut positions = Multiset::new();
        for i in 1..=f.arity() {
            if model.pos(f, i) {
                let w = model.wt(f, i);
                if w <= 0 {
                    return Err(DecodeError::SanViolation {
                        symbol: f.display_name(),
                        position: i,
                        weight: w,
                    });
                }
                positions.insert_many(i, w as usize);
            }
        }
        pi.set(f.clone(), positions);
    }
    Ok(pi)
}

/// Result of the semantic re-check of a decoded projection.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verification {
    /// Every pair and every rule with projected root weakly decreases.
    pub ok: bool,
    /// The pairs that strictly decrease.
    pub strict: Vec<Rule>,
}

/// Checks a projection against the multiset semantics: every pair must
/// satisfy strict decrease or projected equality, and so must every rule
/// whose left-hand root is projected. Strictness is decided by the
/// multiset extension of the proper-superterm order.
pub fn verify_solution(pi: &Multiprojection, pairs: &[Rule], trs: &Trs) -> Verification {
    let mut ok = true;
    let mut strict = Vec::new();
    for pair in pairs {
        let m = pi.apply(pair.lhs());
        let n = pi.apply(pair.rhs());
        if mulex_canonical(&m, &n, &strict_superterm) {
            strict.push(pair.clone());
        } else if m != n {
            ok = false;
        }
    }
    for rule in trs.rules() {
        let root = rule
            .lhs()
            .root()
            .expect("rule left-hand sides are applications");
        if !pi.projects(root) {
            continue;
        }
        let m = pi.apply(rule.lhs());
        let n = pi.apply(rule.rhs());
        if m != n && !mulex_canonical(&m, &n, &strict_superterm) {
            ok = false;
        }
    }
    Verification { ok, strict }
}
