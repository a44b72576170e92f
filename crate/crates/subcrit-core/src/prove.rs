//! The subterm-criterion processor and the surrounding proof search.
//!
//! One processor step takes the pairs of a strongly connected component,
//! asks a solver for a projection satisfying the encoded side conditions,
//! re-verifies the decoded projection semantically, and removes the pairs
//! that strictly decrease. The search loop alternates graph decomposition
//! and processor steps until every component is gone (`YES`), some
//! component admits no projection (`MAYBE`), or the budget runs out
//! (`TIMEOUT`).
//!
//! The combined `all` mode runs the three projection searches on their
//! own threads. A finished `YES` from a cheaper mode cancels the more
//! expensive modes; results are merged deterministically, preferring
//! `simple` over `recursive` over `multi`, so repeated runs report the
//! same proof even though the tasks race. The graph is re-estimated from
//! scratch on the surviving pairs after every removal.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use serde_json::json;
use thiserror::Error;

use crate::dp::{dependency_pairs, estimated_dependency_graph, sccs};
use crate::encode::{
    decode_model, encode_problem, problem_signature, verify_solution, DecodeError,
};
use crate::projection::{Multiprojection, ProjectionMode};
use crate::smt::{solve, SolveResult, SolverHandle};
use crate::term::{Rule, Trs};

/// Outcome of a termination proof attempt.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Yes,
    Maybe,
    Timeout,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Yes => "YES",
            Verdict::Maybe => "MAYBE",
            Verdict::Timeout => "TIMEOUT",
        };
        f.pad(s)
    }
}

/// One successful processor application.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofStep {
    /// The pairs of the component the step was applied to.
    pub scc: Vec<Rule>,
    /// The projection the solver found, after semantic verification.
    pub projection: Multiprojection,
    /// The strictly decreasing pairs that were removed; a subset of
    /// `scc`, recomputed from the projection rather than the formula.
    pub removed: Vec<Rule>,
}

/// A linearized proof: the processor steps in application order plus the
/// final verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofTree {
    pub steps: Vec<ProofStep>,
    pub verdict: Verdict,
}

impl ProofTree {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "steps": self.steps.iter().map(|step| {
                let projection: serde_json::Map<String, serde_json::Value> = step
                    .projection
                    .iter()
                    .map(|(f, _)| {
                        (
                            f.display_name(),
                            json!(step.projection.positions_of(f)),
                        )
                    })
                    .collect();
                json!({
                    "scc": step.scc.iter().map(Rule::to_string).collect::<Vec<_>>(),
                    "projection": projection,
                    "removed": step.removed.iter().map(Rule::to_string).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
            "verdict": self.verdict.to_string(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("proof trees serialize")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(&format!("step {}\n", i + 1));
            out.push_str("  component:\n");
            for pair in &step.scc {
                out.push_str(&format!("    {pair}\n"));
            }
            out.push_str("  projection:\n");
            for (f, _) in step.projection.iter() {
                out.push_str(&format!(
                    "    {}: {:?}\n",
                    f.display_name(),
                    step.projection.positions_of(f)
                ));
            }
            out.push_str("  removed:\n");
            for pair in &step.removed {
                out.push_str(&format!("    {pair}\n"));
            }
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProveError {
    #[error("solver model rejected: {0}")]
    Decode(#[from] DecodeError),
    #[error("decoded projection failed semantic verification")]
    UnsoundProjection,
    #[error("decoded projection orients no pair strictly")]
    NoStrictPair,
}

/// Result of one processor attempt on a component.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepOutcome {
    /// A verified projection; `removed` are the strict pairs.
    Applied {
        projection: Multiprojection,
        removed: Vec<Rule>,
    },
    /// No projection exists (or the solver gave up) for this mode.
    Exhausted,
    /// The solver hit its time limit.
    TimedOut,
}

/// Runs one subterm-criterion step on the pairs of a component.
///
/// A satisfying model is decoded and re-verified before anything is
/// trusted: a projection that fails the semantic check or orients no
/// pair strictly is an internal error, never a removal.
pub fn subterm_processor(
    pairs: &[Rule],
    trs: &Trs,
    mode: ProjectionMode,
    solver: &SolverHandle,
    deadline: Option<Instant>,
) -> Result<StepOutcome, ProveError> {
    let formula = encode_problem(pairs, trs, mode);
    match solve(&formula, solver, deadline) {
        SolveResult::Sat(model) => {
            let signature = problem_signature(pairs, trs);
            let projection = decode_model(&model, &signature)?;
            let verification = verify_solution(&projection, pairs, trs);
            if !verification.ok {
                return Err(ProveError::UnsoundProjection);
            }
            if verification.strict.is_empty() {
                return Err(ProveError::NoStrictPair);
            }
            Ok(StepOutcome::Applied {
                projection,
                removed: verification.strict,
            })
        }
        SolveResult::Unsat | SolveResult::Unknown(_) => Ok(StepOutcome::Exhausted),
        SolveResult::TimedOut => Ok(StepOutcome::TimedOut),
    }
}

/// What the user asks for: one projection class, or the race of all
/// three.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum SearchMode {
    Simple,
    Recursive,
    Multi,
    All,
}

impl From<ProjectionMode> for SearchMode {
    fn from(mode: ProjectionMode) -> Self {
        match mode {
            ProjectionMode::Simple => SearchMode::Simple,
            ProjectionMode::Recursive => SearchMode::Recursive,
            ProjectionMode::Multi => SearchMode::Multi,
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SearchMode::Simple => "simple",
            SearchMode::Recursive => "recursive",
            SearchMode::Multi => "multi",
            SearchMode::All => "all",
        };
        f.pad(s)
    }
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simple" => Ok(SearchMode::Simple),
            "recursive" => Ok(SearchMode::Recursive),
            "multi" => Ok(SearchMode::Multi),
            "all" => Ok(SearchMode::All),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

enum TaskOutcome {
    Done(ProofTree),
    Cancelled,
}

/// The processor loop for one projection mode. Checks the cancel flag
/// and the deadline between steps; shared inputs are immutable, so
/// stopping at any point is safe.
fn run_mode(
    trs: &Trs,
    mode: ProjectionMode,
    solver: &SolverHandle,
    deadline: Instant,
    cancel: &AtomicBool,
) -> Result<TaskOutcome, ProveError> {
    let problem = dependency_pairs(trs);
    let mut steps = Vec::new();
    let mut verdict = Verdict::Yes;
    let mut queue: VecDeque<Vec<Rule>> = VecDeque::new();
    queue.push_back(problem.pairs);
    'outer: while let Some(pairs) = queue.pop_front() {
        if pairs.is_empty() {
            continue;
        }
        if cancel.load(Ordering::Relaxed) {
            return Ok(TaskOutcome::Cancelled);
        }
        if Instant::now() >= deadline {
            verdict = Verdict::Timeout;
            break;
        }
        let adj = estimated_dependency_graph(&pairs, trs);
        for component in sccs(&adj) {
            if cancel.load(Ordering::Relaxed) {
                return Ok(TaskOutcome::Cancelled);
            }
            if Instant::now() >= deadline {
                verdict = Verdict::Timeout;
                break 'outer;
            }
            let scc: Vec<Rule> = component.iter().map(|&i| pairs[i].clone()).collect();
            match subterm_processor(&scc, trs, mode, solver, Some(deadline))? {
                StepOutcome::Applied {
                    projection,
                    removed,
                } => {
                    let survivors: Vec<Rule> = scc
                        .iter()
                        .filter(|p| !removed.contains(p))
                        .cloned()
                        .collect();
                    // The strict set is nonempty, so the pair count drops
                    // with every applied step and the loop terminates.
                    debug_assert!(survivors.len() < scc.len());
                    steps.push(ProofStep {
                        scc,
                        projection,
                        removed,
                    });
                    if !survivors.is_empty() {
                        queue.push_back(survivors);
                    }
                }
                StepOutcome::Exhausted => {
                    verdict = Verdict::Maybe;
                    break 'outer;
                }
                StepOutcome::TimedOut => {
                    verdict = Verdict::Timeout;
                    break 'outer;
                }
            }
        }
    }
    Ok(TaskOutcome::Done(ProofTree { steps, verdict }))
}

/// Proves termination of `trs` within `budget`.
///
/// `YES` means every component of the estimated dependency graph was
/// emptied by verified processor steps; `MAYBE` means some component
/// admits no projection in the requested mode; `TIMEOUT` means the
/// budget ran out first. The returned tree records every step taken.
pub fn prove_termination(
    trs: &Trs,
    mode: SearchMode,
    solver: &SolverHandle,
    budget: Duration,
) -> Result<ProofTree, ProveError> {
    let deadline = Instant::now() + budget;
    let unset = AtomicBool::new(false);
    let single = |projection_mode| match run_mode(trs, projection_mode, solver, deadline, &unset)? {
        TaskOutcome::Done(tree) => Ok(tree),
        TaskOutcome::Cancelled => unreachable!("single-mode runs are never cancelled"),
    };
    match mode {
        SearchMode::Simple => single(ProjectionMode::Simple),
        SearchMode::Recursive => single(ProjectionMode::Recursive),
        SearchMode::Multi => single(ProjectionMode::Multi),
        SearchMode::All => prove_all(trs, solver, deadline),
    }
}

/// Runs the three modes concurrently. A `YES` from `simple` cancels the
/// other two, a `YES` from `recursive` cancels `multi`; `simple` itself
/// is never cancelled. Since a task is only cancelled when a
/// higher-priority task has already proven `YES`, the merged result does
/// not depend on scheduling.
fn prove_all(trs: &Trs, solver: &SolverHandle, deadline: Instant) -> Result<ProofTree, ProveError> {
    let cancel_recursive = AtomicBool::new(false);
    let cancel_multi = AtomicBool::new(false);
    let never = AtomicBool::new(false);

    let (simple, recursive, multi) = std::thread::scope(|scope| {
        let simple_task = scope.spawn(|| {
            let result = run_mode(trs, ProjectionMode::Simple, solver, deadline, &never);
            if matches!(&result, Ok(TaskOutcome::Done(t)) if t.verdict == Verdict::Yes) {
                cancel_recursive.store(true, Ordering::Relaxed);
                cancel_multi.store(true, Ordering::Relaxed);
            }
            result
        });
        let recursive_task = scope.spawn(|| {
            let result = run_mode(
                trs,
                ProjectionMode::Recursive,
                solver,
                deadline,
                &cancel_recursive,
            );
            if matches!(&result, Ok(TaskOutcome::Done(t)) if t.verdict == Verdict::Yes) {
                cancel_multi.store(true, Ordering::Relaxed);
            }
            result
        });
        let multi_task =
            scope.spawn(|| run_mode(trs, ProjectionMode::Multi, solver, deadline, &cancel_multi));
        (
            simple_task.join().expect("simple prover task panicked"),
            recursive_task
                .join()
                .expect("recursive prover task panicked"),
            multi_task.join().expect("multi prover task panicked"),
        )
    });

    let ordered = [simple?, recursive?, multi?];
    // First YES in priority order wins.
    for task in &ordered {
        if let TaskOutcome::Done(tree) = task {
            if tree.verdict == Verdict::Yes {
                return Ok(tree.clone());
            }
        }
    }
    // No YES: nothing was cancelled, so every task completed. Report the
    // first timeout, otherwise the simple tree (a MAYBE).
    for task in &ordered {
        if let TaskOutcome::Done(tree) = task {
            if tree.verdict == Verdict::Timeout {
                return Ok(tree.clone());
            }
        }
    }
    for task in ordered {
        if let TaskOutcome::Done(tree) = task {
            return Ok(tree);
        }
    }
    unreachable!("the simple task cannot be cancelled")
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

    fn internal() -> SolverHandle {
        SolverHandle::internal()
    }

    fn budget() -> Duration {
        Duration::from_secs(60)
    }

    #[test]
    fn minus_component_is_removed_in_every_mode() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let problem = dependency_pairs(&trs);
        let minus_pair: Vec<Rule> = problem
            .pairs
            .iter()
            .filter(|p| p.to_string() == "minus#(s(x),s(y)) -> minus#(x,y)")
            .cloned()
            .collect();
        for mode in [
            ProjectionMode::Simple,
            ProjectionMode::Recursive,
            ProjectionMode::Multi,
        ] {
            match subterm_processor(&minus_pair, &trs, mode, &internal(), None).unwrap() {
                StepOutcome::Applied { removed, .. } => assert_eq!(removed, minus_pair),
                other => panic!("expected a removal in mode {mode}, got {other:?}"),
            }
        }
    }

    #[test]
    fn quot_component_needs_recursion() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let problem = dependency_pairs(&trs);
        let quot_pair: Vec<Rule> = problem
            .pairs
            .iter()
            .filter(|p| p.to_string() == "quot#(s(x),s(y)) -> quot#(minus(x,y),s(y))")
            .cloned()
            .collect();
        assert_eq!(
            subterm_processor(&quot_pair, &trs, ProjectionMode::Simple, &internal(), None).unwrap(),
            StepOutcome::Exhausted
        );
        match subterm_processor(
            &quot_pair,
            &trs,
            ProjectionMode::Recursive,
            &internal(),
            None,
        )
        .unwrap()
        {
            StepOutcome::Applied {
                projection,
                removed,
            } => {
                assert_eq!(removed, quot_pair);
                let quot_sharp = crate::term::Symbol::new("quot", 2).marked();
                let minus = crate::term::Symbol::new("minus", 2);
                assert_eq!(projection.positions_of(&quot_sharp), vec![1]);
                assert_eq!(projection.positions_of(&minus), vec![1]);
            }
            other => panic!("expected a removal, got {other:?}"),
        }
    }

    #[test]
    fn quot_minus_verdicts_by_mode() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let simple = prove_termination(&trs, SearchMode::Simple, &internal(), budget()).unwrap();
        assert_eq!(simple.verdict, Verdict::Maybe);
        let recursive =
            prove_termination(&trs, SearchMode::Recursive, &internal(), budget()).unwrap();
        assert_eq!(recursive.verdict, Verdict::Yes);
        assert_eq!(recursive.steps.len(), 2);
        let multi = prove_termination(&trs, SearchMode::Multi, &internal(), budget()).unwrap();
        assert_eq!(multi.verdict, Verdict::Yes);
        let all = prove_termination(&trs, SearchMode::All, &internal(), budget()).unwrap();
        assert_eq!(all.verdict, Verdict::Yes);
    }

    #[test]
    fn swap_system_needs_multiprojections() {
        let trs = parse_trs("(VAR x y)(RULES f(s(x),y) -> f(y,x))").unwrap();
        for (mode, want) in [
            (SearchMode::Simple, Verdict::Maybe),
            (SearchMode::Recursive, Verdict::Maybe),
            (SearchMode::Multi, Verdict::Yes),
            (SearchMode::All, Verdict::Yes),
        ] {
            let tree = prove_termination(&trs, mode, &internal(), budget()).unwrap();
            assert_eq!(tree.verdict, want, "mode {mode}");
        }
        let tree = prove_termination(&trs, SearchMode::Multi, &internal(), budget()).unwrap();
        let f_sharp = crate::term::Symbol::new("f", 2).marked();
        assert_eq!(tree.steps[0].projection.positions_of(&f_sharp), vec![1, 2]);
    }

    #[test]
    fn self_loop_is_maybe_in_every_mode() {
        let trs = parse_trs("(VAR x)(RULES f(x) -> f(x))").unwrap();
        for mode in [
            SearchMode::Simple,
            SearchMode::Recursive,
            SearchMode::Multi,
            SearchMode::All,
        ] {
            let tree = prove_termination(&trs, mode, &internal(), budget()).unwrap();
            assert_eq!(tree.verdict, Verdict::Maybe);
        }
    }

    #[test]
    fn empty_and_pairless_systems_are_yes() {
        let trs = parse_trs("(VAR x)(RULES )").unwrap();
        let tree = prove_termination(&trs, SearchMode::All, &internal(), budget()).unwrap();
        assert_eq!(tree.verdict, Verdict::Yes);
        assert!(tree.steps.is_empty());

        let trs = parse_trs("(VAR x)(RULES f(x) -> x)").unwrap();
        let tree = prove_termination(&trs, SearchMode::Simple, &internal(), budget()).unwrap();
        assert_eq!(tree.verdict, Verdict::Yes);
        assert!(tree.steps.is_empty());
    }

    #[test]
    fn proof_steps_replay_through_verification() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let tree = prove_termination(&trs, SearchMode::Recursive, &internal(), budget()).unwrap();
        assert_eq!(tree.verdict, Verdict::Yes);
        for step in &tree.steps {
            let v = verify_solution(&step.projection, &step.scc, &trs);
            assert!(v.ok);
            assert_eq!(v.strict, step.removed);
        }
    }

    #[test]
    fn proof_json_has_expected_shape() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let tree = prove_termination(&trs, SearchMode::Recursive, &internal(), budget()).unwrap();
        let value = tree.to_json();
        assert_eq!(value["verdict"], "YES");
        let steps = value["steps"].as_array().unwrap();
        assert_eq!(steps.len(), 2);
        for step in steps {
            assert!(step["scc"].is_array());
            assert!(step["projection"].is_object());
            assert!(step["removed"].is_array());
        }
        // The quot step projects quot# and minus on their first argument.
        assert_eq!(steps[0]["projection"]["quot#"], json!([1]));
        assert_eq!(steps[0]["projection"]["minus"], json!([1]));
    }

    #[test]
    fn zero_budget_times_out() {
        let trs = parse_trs(QUOT_MINUS).unwrap();
        let tree = prove_termination(&trs, SearchMode::Multi, &internal(), Duration::ZERO).unwrap();
        assert_eq!(tree.verdict, Verdict::Timeout);
    }
}
