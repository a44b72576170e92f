//! Termination proving for first-order term rewrite systems.
//!
//! The prover works inside the dependency pair framework: it extracts
//! dependency pairs from a rewrite system, builds the estimated dependency
//! graph, decomposes it into strongly connected components, and removes
//! pairs from each component with the subterm criterion. Projections map
//! every function symbol to a multiset of argument positions; applying one
//! to a term yields a multiset of subterms, and pairs are compared in the
//! multiset extension of the proper-superterm order.
//!
//! Searching for a suitable projection is delegated to an SMT solver: the
//! side conditions of the criterion are encoded as a quantifier-free
//! formula over linear integer arithmetic whose models are exactly the
//! usable projections. Both an external SMT-LIB 2 solver and a built-in
//! bounded enumerator are supported, and every model is re-verified
//! against the multiset semantics before any pair is removed.
//!
//! Modules:
//!
//! * [`multiset`] - finite multisets and the multiset extension
//! * [`term`] - terms, rules, rewrite systems
//! * [`tpdb`] - parser for the legacy TPDB `.trs` format
//! * [`unify`] - syntactic unification with occurs check
//! * [`projection`] - multiprojections and their application
//! * [`formula`] - boolean/integer constraint expressions
//! * [`encode`] - the constraint encoding of the subterm criterion
//! * [`smt`] - SMT-LIB serialization and solver backends
//! * [`dp`] - dependency pairs, graph estimation, SCCs
//! * [`prove`] - the processor loop and proof output

pub mod dp;
pub mod encode;
pub mod formula;
pub mod multiset;
pub mod projection;
pub mod prove;
pub mod smt;
pub mod term;
pub mod tpdb;
pub mod unify;

pub use dp::{dependency_pairs, estimated_dependency_graph, sccs, DpProblem};
pub use encode::{encode_problem, verify_solution, Verification};
pub use multiset::Multiset;
pub use projection::{Multiprojection, ProjectionMode};
pub use prove::{prove_termination, ProofStep, ProofTree, SearchMode, Verdict};
pub use smt::{SolveResult, SolverHandle};
pub use term::{Rule, Symbol, Term, Trs};
pub use tpdb::parse_trs;
