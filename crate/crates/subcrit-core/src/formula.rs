//! Boolean and integer constraint expressions.
//!
//! Formulas range over two kinds of unknowns, both indexed by a function
//! symbol and an argument position: a boolean `Pos(f, i)` that is true
//! when the projection picks position `i` of `f`, and an integer
//! `Wt(f, i)` giving how often it picks it. The constructors normalize
//! as they build: integer products fold constants, sums flatten and drop
//! zeros, and conditionals with constant or equal branches collapse.
//! Normalization preserves the value under every assignment.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::Symbol;

/// An integer-valued expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum IntExpr {
    Const(i64),
    Wt(Symbol, usize),
    Ite(Box<BoolExpr>, Box<IntExpr>, Box<IntExpr>),
    Sum(Vec<IntExpr>),
    Prod(Vec<IntExpr>),
}

/// A boolean-valued expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BoolExpr {
    Const(bool),
    Pos(Symbol, usize),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
    IntEq(IntExpr, IntExpr),
    Geq(IntExpr, IntExpr),
    Gt(IntExpr, IntExpr),
}

impl IntExpr {
    /// Flattening, zero-dropping, constant-folding sum.
    pub fn sum(items: Vec<IntExpr>) -> IntExpr {
        let mut flat = Vec::new();
        let mut constant = 0i64;
        for item in items {
            match item {
                IntExpr::Const(c) => constant += c,
                IntExpr::Sum(inner) => {
                    for x in inner {
                        match x {
                            IntExpr::Const(c) => constant += c,
                            other => flat.push(other),
                        }
                    }
                }
                other => flat.push(other),
            }
        }
        if constant != 0 {
            flat.push(IntExpr::Const(constant));
        }
        match flat.len() {
            0 => IntExpr::Const(0),
            1 => flat.pop().expect("one element"),
            _ => IntExpr::Sum(flat),
        }
    }

    /// Flattening, constant-folding product; a zero factor collapses the
    /// whole product.
    pub fn prod(items: Vec<IntExpr>) -> IntExpr {
        let mut flat = Vec::new();
        let mut constant = 1i64;
        for item in items {
            match item {
                IntExpr::Const(c) => constant *= c,
                IntExpr::Prod(inner) => {
                    for x in inner {
                        match x {
                            IntExpr::Const(c) => constant *= c,
                            other => flat.push(other),
                        }
                    }
                }
                other => flat.push(other),
            }
        }
        if constant == 0 {
            return IntExpr::Const(0);
        }
        if constant != 1 {
            flat.push(IntExpr::Const(constant));
        }
        match flat.len() {
            0 => IntExpr::Const(1),
            1 => flat.pop().expect("one element"),
            _ => IntExpr::Prod(flat),
        }
    }

    /// Conditional; constant conditions and equal branches collapse.
    pub fn ite(cond: BoolExpr, then: IntExpr, els: IntExpr) -> IntExpr {
        match cond {
            BoolExpr::Const(true) => then,
            BoolExpr::Const(false) => els,
            _ if then == els => then,
            cond => IntExpr::Ite(Box::new(cond), Box::new(then), Box::new(els)),
        }
    }
}

impl BoolExpr {
    pub fn and(items: Vec<BoolExpr>) -> BoolExpr {
        let mut flat = Vec::new();
        for item in items {
            match item {
                BoolExpr::Const(true) => {}
                BoolExpr::Const(false) => return BoolExpr::Const(false),
                BoolExpr::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => BoolExpr::Const(true),
            1 => flat.pop().expect("one element"),
            _ => BoolExpr::And(flat),
        }
    }

    pub fn or(items: Vec<BoolExpr>) -> BoolExpr {
        let mut flat = Vec::new();
        for item in items {
            match item {
                BoolExpr::Const(false) => {}
                BoolExpr::Const(true) => return BoolExpr::Const(true),
                BoolExpr::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => BoolExpr::Const(false),
            1 => flat.pop().expect("one element"),
            _ => BoolExpr::Or(flat),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(item: BoolExpr) -> BoolExpr {
        match item {
            BoolExpr::Const(b) => BoolExpr::Const(!b),
            BoolExpr::Not(inner) => *inner,
            other => BoolExpr::Not(Box::new(other)),
        }
    }

    pub fn implies(lhs: BoolExpr, rhs: BoolExpr) -> BoolExpr {
        match (lhs, rhs) {
            (BoolExpr::Const(true), rhs) => rhs,
            (BoolExpr::Const(false), _) => BoolExpr::Const(true),
            (_, BoolExpr::Const(true)) => BoolExpr::Const(true),
            (lhs, BoolExpr::Const(false)) => BoolExpr::not(lhs),
            (lhs, rhs) => BoolExpr::Implies(Box::new(lhs), Box::new(rhs)),
        }
    }

    pub fn int_eq(lhs: IntExpr, rhs: IntExpr) -> BoolExpr {
        match (&lhs, &rhs) {
            (IntExpr::Const(a), IntExpr::Const(b)) => BoolExpr::Const(a == b),
            _ if lhs == rhs => BoolExpr::Const(true),
            _ => BoolExpr::IntEq(lhs, rhs),
        }
    }

    pub fn geq(lhs: IntExpr, rhs: IntExpr) -> BoolExpr {
        match (&lhs, &rhs) {
            (IntExpr::Const(a), IntExpr::Const(b)) => BoolExpr::Const(a >= b),
            _ if lhs == rhs => BoolExpr::Const(true),
            _ => BoolExpr::Geq(lhs, rhs),
        }
    }

    pub fn gt(lhs: IntExpr, rhs: IntExpr) -> BoolExpr {
        match (&lhs, &rhs) {
            (IntExpr::Const(a), IntExpr::Const(b)) => BoolExpr::Const(a > b),
            _ => BoolExpr::Gt(lhs, rhs),
        }
    }
}

/// A total assignment of the `Pos` and `Wt` unknowns. Lookups default to
/// `false` and `0` for variables that were never set, matching how
/// solvers may omit don't-cares from models.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Assignment {
    pos: std::collections::BTreeMap<(Symbol, usize), bool>,
    wt: std::collections::BTreeMap<(Symbol, usize), i64>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_pos(&mut self, f: Symbol, i: usize, value: bool) {
        self.pos.insert((f, i), value);
    }

    pub fn set_wt(&mut self, f: Symbol, i: usize, value: i64) {
        self.wt.insert((f, i), value);
    }

    pub fn pos(&self, f: &Symbol, i: usize) -> bool {
        self.pos.get(&(f.clone(), i)).copied().unwrap_or(false)
    }

    pub fn wt(&self, f: &Symbol, i: usize) -> i64 {
        self.wt.get(&(f.clone(), i)).copied().unwrap_or(0)
    }

    pub fn with_pos(mut self, f: Symbol, i: usize, value: bool) -> Self {
        self.set_pos(f, i, value);
        self
    }

    pub fn with_wt(mut self, f: Symbol, i: usize, value: i64) -> Self {
        self.set_wt(f, i, value);
        self
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((sym, i), v) in &self.pos {
            writeln!(f, "pos {} {} = {}", sym.display_name(), i, v)?;
        }
        for ((sym, i), v) in &self.wt {
            writeln!(f, "wt {} {} = {}", sym.display_name(), i, v)?;
        }
        Ok(())
    }
}

pub fn eval_int(e: &IntExpr, a: &Assignment) -> i64 {
    match e {
        IntExpr::Const(c) => *c,
        IntExpr::Wt(f, i) => a.wt(f, *i),
        IntExpr::Ite(c, t, e) => {
            if eval_bool(c, a) {
                eval_int(t, a)
            } else {
                eval_int(e, a)
            }
        }
        IntExpr::Sum(items) => items.iter().map(|x| eval_int(x, a)).sum(),
        IntExpr::Prod(items) => items.iter().map(|x| eval_int(x, a)).product(),
    }
}

pub fn eval_bool(e: &BoolExpr, a: &Assignment) -> bool {
    match e {
        BoolExpr::Const(b) => *b,
        BoolExpr::Pos(f, i) => a.pos(f, *i),
        BoolExpr::Not(x) => !eval_bool(x, a),
        BoolExpr::And(items) => items.iter().all(|x| eval_bool(x, a)),
        BoolExpr::Or(items) => items.iter().any(|x| eval_bool(x, a)),
        BoolExpr::Implies(l, r) => !eval_bool(l, a) || eval_bool(r, a),
        BoolExpr::IntEq(l, r) => eval_int(l, a) == eval_int(r, a),
        BoolExpr::Geq(l, r) => eval_int(l, a) >= eval_int(r, a),
        BoolExpr::Gt(l, r) => eval_int(l, a) > eval_int(r, a),
    }
}

/// A set of `(symbol, position)` variable indices.
pub type VarSet = BTreeSet<(Symbol, usize)>;

/// The sets of `Pos` and `Wt` variables occurring in a formula.
pub fn collect_vars(e: &BoolExpr) -> (VarSet, VarSet) {
    let mut pos = BTreeSet::new();
    let mut wt = BTreeSet::new();
    collect_bool(e, &mut pos, &mut wt);
    (pos, wt)
}

fn collect_bool(e: &BoolExpr, pos: &mut VarSet, wt: &mut VarSet) {
    match e {
        BoolExpr::Const(_) => {}
        BoolExpr::Pos(f, i) => {
            pos.insert((f.clone(), *i));
        }
        BoolExpr::Not(x) => collect_bool(x, pos, wt),
        BoolExpr::And(items) | BoolExpr::Or(items) => {
            for x in items {
                collect_bool(x, pos, wt);
            }
        }
        BoolExpr::Implies(l, r) => {
            collect_bool(l, pos, wt);
            collect_bool(r, pos, wt);
        }
        BoolExpr::IntEq(l, r) | BoolExpr::Geq(l, r) | BoolExpr::Gt(l, r) => {
            collect_int(l, pos, wt);
            collect_int(r, pos, wt);
        }
    }
}

fn collect_int(e: &IntExpr, pos: &mut VarSet, wt: &mut VarSet) {
    match e {
        IntExpr::Const(_) => {}
        IntExpr::Wt(f, i) => {
            wt.insert((f.clone(), *i));
        }
        IntExpr::Ite(c, t, e) => {
            collect_bool(c, pos, wt);
            collect_int(t, pos, wt);
            collect_int(e, pos, wt);
        }
        IntExpr::Sum(items) | IntExpr::Prod(items) => {
            for x in items {
                collect_int(x, pos, wt);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f1() -> Symbol {
        Symbol::new("f", 1)
    }

    #[test]
    fn sums_flatten_and_fold() {
        let e = IntExpr::sum(vec![
            IntExpr::Const(1),
            IntExpr::sum(vec![IntExpr::Const(2), IntExpr::Wt(f1(), 1)]),
            IntExpr::Const(0),
        ]);
        assert_eq!(
            e,
            IntExpr::Sum(vec![IntExpr::Wt(f1(), 1), IntExpr::Const(3)])
        );
    }

    #[test]
    fn products_fold_units_and_zeros() {
        assert_eq!(
            IntExpr::prod(vec![IntExpr::Const(1), IntExpr::Wt(f1(), 1)]),
            IntExpr::Wt(f1(), 1)
        );
        assert_eq!(
            IntExpr::prod(vec![IntExpr::Const(0), IntExpr::Wt(f1(), 1)]),
            IntExpr::Const(0)
        );
        assert_eq!(
            IntExpr::prod(vec![IntExpr::Const(2), IntExpr::Const(3)]),
            IntExpr::Const(6)
        );
    }

    #[test]
    fn ite_collapses_constants_and_equal_branches() {
        let p = BoolExpr::Pos(f1(), 1);
        assert_eq!(
            IntExpr::ite(BoolExpr::Const(true), IntExpr::Const(1), IntExpr::Const(0)),
            IntExpr::Const(1)
        );
        assert_eq!(
            IntExpr::ite(p.clone(), IntExpr::Const(0), IntExpr::Const(0)),
            IntExpr::Const(0)
        );
        assert!(matches!(
            IntExpr::ite(p, IntExpr::Const(1), IntExpr::Const(0)),
            IntExpr::Ite(..)
        ));
    }

    #[test]
    fn empty_connectives_are_units() {
        assert_eq!(BoolExpr::and(vec![]), BoolExpr::Const(true));
        assert_eq!(BoolExpr::or(vec![]), BoolExpr::Const(false));
        assert_eq!(IntExpr::sum(vec![]), IntExpr::Const(0));
        assert_eq!(IntExpr::prod(vec![]), IntExpr::Const(1));
    }

    /// Raw (unnormalized) integer expressions over one symbol.
    fn raw_int_expr() -> impl Strategy<Value = IntExpr> {
        let leaf = prop_oneof![
            (-3i64..4).prop_map(IntExpr::Const),
            (1usize..3).prop_map(|i| IntExpr::Wt(Symbol::new("f", 2), i)),
        ];
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..4).prop_map(IntExpr::Sum),
                proptest::collection::vec(inner.clone(), 0..3).prop_map(IntExpr::Prod),
                ((1usize..3), inner.clone(), inner).prop_map(|(i, t, e)| IntExpr::Ite(
                    Box::new(BoolExpr::Pos(Symbol::new("f", 2), i)),
                    Box::new(t),
                    Box::new(e)
                )),
            ]
        })
    }

    /// Rebuilds an expression through the normalizing constructors.
    fn renormalize(e: &IntExpr) -> IntExpr {
        match e {
            IntExpr::Const(c) => IntExpr::Const(*c),
            IntExpr::Wt(f, i) => IntExpr::Wt(f.clone(), *i),
            IntExpr::Ite(c, t, e) => IntExpr::ite((**c).clone(), renormalize(t), renormalize(e)),
            IntExpr::Sum(items) => IntExpr::sum(items.iter().map(renormalize).collect()),
            IntExpr::Prod(items) => IntExpr::prod(items.iter().map(renormalize).collect()),
        }
    }

    proptest! {
        /// Normalization never changes the value of an expression.
        #[test]
        fn normalization_preserves_evaluation(
            e in raw_int_expr(),
            p1 in any::<bool>(),
            p2 in any::<bool>(),
            w1 in -2i64..3,
            w2 in -2i64..3,
        ) {
            let f = Symbol::new("f", 2);
            let a = Assignment::new()
                .with_pos(f.clone(), 1, p1)
                .with_pos(f.clone(), 2, p2)
                .with_wt(f.clone(), 1, w1)
                .with_wt(f, 2, w2);
            prop_assert_eq!(eval_int(&e, &a), eval_int(&renormalize(&e), &a));
        }
    }
}
