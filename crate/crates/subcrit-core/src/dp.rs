//! Dependency pairs, the estimated dependency graph, and its strongly
//! connected components.

use std::collections::BTreeSet;

use crate::term::{Rule, Symbol, Term, Trs};
use crate::unify::unify;

/// A dependency pair problem: the pairs under scrutiny and the rules of
/// the original system. Pair roots are marked symbols; marked symbols
/// never occur below a root or inside the rules.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DpProblem {
    pub pairs: Vec<Rule>,
    pub trs: Trs,
}

fn mark_root(t: &Term) -> Term {
    match t {
        Term::Var(_) => panic!("cannot mark a variable"),
        Term::App(f, args) => Term::App(f.marked(), args.clone()),
    }
}

/// Computes the dependency pairs of a system: for every rule `l -> r`
/// and every subterm `u` of `r` whose root is defined, the pair
/// `l# -> u#`. Duplicate pairs are kept once.
pub fn dependency_pairs(trs: &Trs) -> DpProblem {
    let defined = trs.defined_symbols();
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    for rule in trs.rules() {
        for sub in rule.rhs().subterms() {
            let Some(root) = sub.root() else { continue };
            if !defined.contains(root) {
                continue;
            }
            let pair = Rule::new(mark_root(rule.lhs()), mark_root(&sub))
                .expect("marking preserves rule well-formedness");
            if seen.insert(pair.clone()) {
                pairs.push(pair);
            }
        }
    }
    DpProblem {
        pairs,
        trs: trs.clone(),
    }
}

/// Replaces every subterm with a defined (unmarked) root by a fresh
/// variable placeholder; variables are renamed apart afterwards.
fn cap(t: &Term, defined: &BTreeSet<Symbol>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => {
            if !f.is_marked() && defined.contains(f) {
                Term::var("%hole")
            } else {
                Term::App(f.clone(), args.iter().map(|a| cap(a, defined)).collect())
            }
        }
    }
}

/// Renames every variable occurrence to a fresh name from `prefix`.
fn rename_occurrences(t: &Term, prefix: &str, counter: &mut usize) -> Term {
    match t {
        Term::Var(_) => {
            let name = format!("%{prefix}{counter}");
            *counter += 1;
            Term::Var(name)
        }
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| rename_occurrences(a, prefix, counter))
                .collect(),
        ),
    }
}

/// Renames variables consistently per name, apart from the other side.
fn rename_consistent(t: &Term, prefix: &str) -> Term {
    match t {
        Term::Var(x) => Term::Var(format!("%{prefix}_{x}")),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| rename_consistent(a, prefix)).collect(),
        ),
    }
}

/// The estimated dependency graph over `pairs`, as an adjacency list:
/// there is an edge from `s1 -> t1` to `s2 -> t2` when `t1`, with
/// defined-root subterms abstracted away and variables renamed apart,
/// unifies with a renamed copy of `s2`. The `%` prefix of the fresh
/// variables cannot occur in parsed input, so no capture is possible.
pub fn estimated_dependency_graph(pairs: &[Rule], trs: &Trs) -> Vec<Vec<usize>> {
    let defined = trs.defined_symbols();
    let abstracted: Vec<Term> = pairs
        .iter()
        .map(|p| {
            let capped = cap(p.rhs(), &defined);
            let mut counter = 0;
            rename_occurrences(&capped, "r", &mut counter)
        })
        .collect();
    let lhss: Vec<Term> = pairs
        .iter()
        .map(|p| rename_consistent(p.lhs(), "l"))
        .collect();
    (0..pairs.len())
        .map(|from| {
            (0..pairs.len())
                .filter(|&to| unify(&abstracted[from], &lhss[to]).is_some())
                .collect()
        })
        .collect()
}

/// Nontrivial strongly connected components of a graph (a single node
/// counts only with a self-loop), in topological order of the
/// condensation: components closer to the sources come first. Node
/// indices inside each component are sorted.
pub fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut state = Tarjan {
        adj,
        index: 0,
        indices: vec![None; adj.len()],
        lowlinks: vec![0; adj.len()],
        on_stack: vec![false; adj.len()],
        stack: Vec::new(),
        components: Vec::new(),
    };
    for v in 0..adj.len() {
        if state.indices[v].is_none() {
            state.visit(v);
        }
    }
    // Tarjan emits sinks first; reverse for topological order.
    state.components.reverse();
    state
        .components
        .into_iter()
        .filter(|c| c.len() > 1 || adj[c[0]].contains(&c[0]))
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect()
}

struct Tarjan<'a> {
    adj: &'a [Vec<usize>],
    index: usize,
    indices: Vec<Option<usize>>,
    lowlinks: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    components: Vec<Vec<usize>>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: usize) {
        self.indices[v] = Some(self.index);
        self.lowlinks[v] = self.index;
        self.index += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for &w in &self.adj[v] {
            if self.indices[w].is_none() {
                self.visit(w);
                self.lowlinks[v] = self.lowlinks[v].min(self.lowlinks[w]);
            } else if self.on_stack[w] {
                self.lowlinks[v] = self.lowlinks[v].min(self.indices[w].expect("visited"));
            }
        }
        if Some(self.lowlinks[v]) == self.indices[v] {
            let mut component = Vec::new();
            loop {
                let w = self.stack.pop().expect("nonempty stack");
                self.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            self.components.push(component);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tpdb::parse_trs;

    const QUOT_MINUS: &str = "(VAR x y)\
        (RULES minus(x,0) -> x \
               minus(s(x),s(y)) -> minus(x,y) \
               quot(0,s(y)) -> 0 \
               quot(s(x),s(y)) -> s(quot(minus(x,y),s(y))))";

    #[test]
    fn quot_minus_has_three_pairs() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let problem = dependency_pairs(&trs);
        let rendered: BTreeSet<String> = problem.pairs.iter().map(|p| p.to_string()).collect();
        let expected: BTreeSet<String> = [
            "minus#(s(x),s(y)) -> minus#(x,y)",
            "quot#(s(x),s(y)) -> quot#(minus(x,y),s(y))",
            "quot#(s(x),s(y)) -> minus#(x,y)",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(rendered, expected);
    }

    #[test]
    fn projection_rule_yields_no_pairs() {
        let trs = parse_trs("(VAR x)(RULES f(x) -> x)").unwrap();
        assert!(dependency_pairs(&trs).pairs.is_empty());
    }

    #[test]
    fn nested_defined_symbols_yield_two_pairs() {
        let trs = parse_trs("(VAR x)(RULES f(x) -> f(f(x)))").unwrap();
        let problem = dependency_pairs(&trs);
        let rendered: BTreeSet<String> = problem.pairs.iter().map(|p| p.to_string()).collect();
        let expected: BTreeSet<String> = ["f#(x) -> f#(f(x))", "f#(x) -> f#(x)"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(rendered, expected);
    }

    #[test]
    fn quot_minus_graph_and_components() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let problem = dependency_pairs(&trs);
        let adj = estimated_dependency_graph(&problem.pairs, &trs);

        let idx = |needle: &str| {
            problem
                .pairs
                .iter()
                .position(|p| p.to_string() == needle)
                .expect("pair present")
        };
        let minus_loop = idx("minus#(s(x),s(y)) -> minus#(x,y)");
        let quot_loop = idx("quot#(s(x),s(y)) -> quot#(minus(x,y),s(y))");
        let quot_to_minus = idx("quot#(s(x),s(y)) -> minus#(x,y)");

        assert!(adj[minus_loop].contains(&minus_loop));
        assert!(adj[quot_loop].contains(&quot_loop));
        assert!(adj[quot_loop].contains(&quot_to_minus));
        assert!(adj[quot_to_minus].contains(&minus_loop));
        assert!(!adj[minus_loop].contains(&quot_loop));

        let components = sccs(&adj);
        assert_eq!(components, vec![vec![quot_loop], vec![minus_loop]]);
    }

    #[test]
    fn identical_sides_give_self_loop() {
        let trs = parse_trs("(VAR x)(RULES f(x) -> f(x))").unwrap();
        let problem = dependency_pairs(&trs);
        assert_eq!(problem.pairs.len(), 1);
        let adj = estimated_dependency_graph(&problem.pairs, &trs);
        assert!(adj[0].contains(&0));
        assert_eq!(sccs(&adj), vec![vec![0]]);
    }

    #[test]
    fn root_clash_gives_no_outgoing_edges() {
        // The only pair is f#(x) -> g#(x) and no pair has root g# on the
        // left, so the pair cannot be followed by anything.
        let trs = parse_trs("(VAR x)(RULES f(x) -> g(x) g(x) -> x)").unwrap();
        let problem = dependency_pairs(&trs);
        assert_eq!(problem.pairs.len(), 1);
        assert_eq!(problem.pairs[0].to_string(), "f#(x) -> g#(x)");
        let adj = estimated_dependency_graph(&problem.pairs, &trs);
        assert!(adj[0].is_empty());
        assert!(sccs(&adj).is_empty());
    }

    #[test]
    fn acyclic_graph_has_no_components() {
        let adj = vec![vec![1], vec![2], vec![]];
        assert!(sccs(&adj).is_empty());
    }

    #[test]
    fn components_come_out_in_topological_order() {
        // 0 and 1 form a cycle reaching the self-looped 2.
        let adj = vec![vec![1], vec![0, 2], vec![2]];
        assert_eq!(sccs(&adj), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn cap_abstracts_defined_roots_only() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let problem = dependency_pairs(&trs);
        let quot_loop = problem
            .pairs
            .iter()
            .find(|p| p.to_string() == "quot#(s(x),s(y)) -> quot#(minus(x,y),s(y))")
            .unwrap();
        let defined = trs.defined_symbols();
        let capped = cap(quot_loop.rhs(), &defined);
        // The minus argument is abstracted, the constructor argument stays.
        assert_eq!(capped.to_string(), "quot#(%hole,s(y))");
    }
}
