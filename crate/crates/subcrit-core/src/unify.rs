//! Syntactic first-order unification with occurs check.

use std::collections::BTreeMap;

use crate::term::Term;

/// A substitution from variable names to terms.
pub type Substitution = BTreeMap<String, Term>;

/// Applies a substitution to a term.
pub fn apply(subst: &Substitution, term: &Term) -> Term {
    match term {
        Term::Var(x) => subst.get(x).cloned().unwrap_or_else(|| term.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| apply(subst, a)).collect()),
    }
}

fn occurs(x: &str, term: &Term) -> bool {
    match term {
        Term::Var(y) => x == y,
        Term::App(_, args) => args.iter().any(|a| occurs(x, a)),
    }
}

/// Computes a most general unifier of `s` and `t`, or `None` when the
/// terms do not unify.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    let mut queue = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = queue.pop() {
        let a = apply(&subst, &a);
        let b = apply(&subst, &b);
        if a == b {
            continue;
        }
        match (a, b) {
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs(&x, &t) {
                    return None;
                }
                // Keep the substitution idempotent by rewriting existing bindings.
                let single: Substitution = [(x.clone(), t.clone())].into_iter().collect();
                for v in subst.values_mut() {
                    *v = apply(&single, v);
                }
                subst.insert(x, t);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g {
                    return None;
                }
                queue.extend(fa.into_iter().zip(ga));
            }
        }
    }
    Some(subst)
}
