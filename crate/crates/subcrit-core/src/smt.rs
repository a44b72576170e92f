//! SMT-LIB serialization and solver backends.
//!
//! Formulas are emitted as one-shot QF_LIA scripts. Two backends answer
//! them: an external solver run as a subprocess (reading the script on
//! stdin, or from a temporary file when the command template contains
//! `{file}`), and a built-in bounded enumerator that tries every
//! position assignment and every active weight up to a bound. The
//! enumerator is deterministic and doubles as a test oracle for the
//! external path.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{collect_vars, eval_bool, Assignment, BoolExpr, IntExpr};
use crate::term::Symbol;

/// How many boolean variables the internal enumerator accepts.
pub const INTERNAL_POS_LIMIT: usize = 20;

/// Default weight bound of the internal solver.
pub const DEFAULT_WEIGHT_BOUND: i64 = 2;

/// A solver configuration. Handles are plain values; every query spawns
/// its own process or enumeration, so a handle may be shared freely.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolverHandle {
    /// An external SMT-LIB 2 solver. The command is split on whitespace;
    /// a `{file}` placeholder is replaced by the path of the script,
    /// otherwise the script is piped to stdin.
    External { command: String, timeout: Duration },
    /// The built-in enumerator with the given bound on active weights.
    Internal { weight_bound: i64 },
}

impl SolverHandle {
    pub fn internal() -> Self {
        SolverHandle::Internal {
            weight_bound: DEFAULT_WEIGHT_BOUND,
        }
    }

    pub fn external(command: impl Into<String>, timeout: Duration) -> Self {
        SolverHandle::External {
            command: command.into(),
            timeout,
        }
    }
}

/// Outcome of a query.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
    Unknown(String),
    TimedOut,
}

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum VarKind {
    Pos,
    Wt,
}

/// Deterministic mapping between formula variables and mangled SMT-LIB
/// names (`p_<f>_<i>` / `w_<f>_<i>`). Symbol names are sanitized by
/// replacing every character outside `[A-Za-z0-9_]` with `_x<hex>`;
/// colliding names are disambiguated with a `#k` suffix, which the
/// emitter quotes.
#[derive(Clone, Debug, Default)]
pub struct VarTable {
    pos_names: BTreeMap<(Symbol, usize), String>,
    wt_names: BTreeMap<(Symbol, usize), String>,
    by_name: BTreeMap<String, (VarKind, Symbol, usize)>,
}

fn sanitize(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c);
        } else {
            out.push_str(&format!("_x{:x}", c as u32));
        }
    }
    out
}

impl VarTable {
    pub fn build(formula: &BoolExpr) -> VarTable {
        let (pos, wt) = collect_vars(formula);
        let mut table = VarTable::default();
        for (f, i) in pos {
            table.add(VarKind::Pos, f, i);
        }
        for (f, i) in wt {
            table.add(VarKind::Wt, f, i);
        }
        table
    }

    fn add(&mut self, kind: VarKind, f: Symbol, i: usize) {
        let prefix = match kind {
            VarKind::Pos => "p",
            VarKind::Wt => "w",
        };
        let base = format!("{prefix}_{}_{i}", sanitize(&f.display_name()));
        let mut name = base.clone();
        let mut k = 2;
        while self.by_name.contains_key(&name) {
            name = format!("{base}#{k}");
            k += 1;
        }
        self.by_name.insert(name.clone(), (kind, f.clone(), i));
        match kind {
            VarKind::Pos => self.pos_names.insert((f, i), name),
            VarKind::Wt => self.wt_names.insert((f, i), name),
        };
    }

    pub fn pos_name(&self, f: &Symbol, i: usize) -> &str {
        &self.pos_names[&(f.clone(), i)]
    }

    pub fn wt_name(&self, f: &Symbol, i: usize) -> &str {
        &self.wt_names[&(f.clone(), i)]
    }

    /// Position variables sorted by mangled name.
    pub fn pos_vars(&self) -> Vec<(String, Symbol, usize)> {
        let mut out: Vec<_> = self
            .pos_names
            .iter()
            .map(|((f, i), name)| (name.clone(), f.clone(), *i))
            .collect();
        out.sort();
        out
    }

    /// Weight variables sorted by mangled name.
    pub fn wt_vars(&self) -> Vec<(String, Symbol, usize)> {
        let mut out: Vec<_> = self
            .wt_names
            .iter()
            .map(|((f, i), name)| (name.clone(), f.clone(), *i))
            .collect();
        out.sort();
        out
    }

    /// All declared names in declaration order.
    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.pos_names.values().chain(self.wt_names.values())
    }
}

/// Quotes a name when it is not a bare SMT-LIB symbol.
fn smt_symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn emit_int(e: &IntExpr, table: &VarTable, out: &mut String) {
    match e {
        IntExpr::Const(c) => {
            if *c < 0 {
                out.push_str(&format!("(- {})", -c));
            } else {
                out.push_str(&c.to_string());
            }
        }
        IntExpr::Wt(f, i) => out.push_str(&smt_symbol(table.wt_name(f, *i))),
        IntExpr::Ite(c, t, e) => {
            out.push_str("(ite ");
            emit_bool(c, table, out);
            out.push(' ');
            emit_int(t, table, out);
            out.push(' ');
            emit_int(e, table, out);
            out.push(')');
        }
        IntExpr::Sum(items) => emit_nary_int("+", items, table, out),
        IntExpr::Prod(items) => emit_nary_int("*", items, table, out),
    }
}

fn emit_nary_int(op: &str, items: &[IntExpr], table: &VarTable, out: &mut String) {
    match items.len() {
        0 => out.push_str(if op == "+" { "0" } else { "1" }),
        1 => emit_int(&items[0], table, out),
        _ => {
            out.push('(');
            out.push_str(op);
            for item in items {
                out.push(' ');
                emit_int(item, table, out);
            }
            out.push(')');
        }
    }
}

fn emit_bool(e: &BoolExpr, table: &VarTable, out: &mut String) {
    match e {
        BoolExpr::Const(b) => out.push_str(if *b { "true" } else { "false" }),
        BoolExpr::Pos(f, i) => out.push_str(&smt_symbol(table.pos_name(f, *i))),
        BoolExpr::Not(x) => {
            out.push_str("(not ");
            emit_bool(x, table, out);
            out.push(')');
        }
        BoolExpr::And(items) => emit_nary_bool("and", items, table, out),
        BoolExpr::Or(items) => emit_nary_bool("or", items, table, out),
        BoolExpr::Implies(l, r) => {
            out.push_str("(=> ");
            emit_bool(l, table, out);
            out.push(' ');
            emit_bool(r, table, out);
            out.push(')');
        }
        BoolExpr::IntEq(l, r) => emit_cmp("=", l, r, table, out),
        BoolExpr::Geq(l, r) => emit_cmp(">=", l, r, table, out),
        BoolExpr::Gt(l, r) => emit_cmp(">", l, r, table, out),
    }
}

fn emit_nary_bool(op: &str, items: &[BoolExpr], table: &VarTable, out: &mut String) {
    match items.len() {
        0 => out.push_str(if op == "and" { "true" } else { "false" }),
        1 => emit_bool(&items[0], table, out),
        _ => {
            out.push('(');
            out.push_str(op);
            for item in items {
                out.push(' ');
                emit_bool(item, table, out);
            }
            out.push(')');
        }
    }
}

fn emit_cmp(op: &str, l: &IntExpr, r: &IntExpr, table: &VarTable, out: &mut String) {
    out.push('(');
    out.push_str(op);
    out.push(' ');
    emit_int(l, table, out);
    out.push(' ');
    emit_int(r, table, out);
    out.push(')');
}

/// A serialized query together with its variable table.
#[derive(Clone, Debug)]
pub struct SmtScript {
    pub text: String,
    pub vars: VarTable,
}

/// Serializes a formula as a QF_LIA script ending in `(check-sat)` and
/// `(get-model)`.
pub fn to_smtlib(formula: &BoolExpr) -> SmtScript {
    let vars = VarTable::build(formula);
    let mut text = String::from("(set-logic QF_LIA)\n");
    for (_, f, i) in vars.pos_vars() {
        text.push_str(&format!(
            "(declare-fun {} () Bool)\n",
            smt_symbol(vars.pos_name(&f, i))
        ));
    }
    for (_, f, i) in vars.wt_vars() {
        text.push_str(&format!(
            "(declare-fun {} () Int)\n",
            smt_symbol(vars.wt_name(&f, i))
        ));
    }
    text.push_str("(assert ");
    emit_bool(formula, &vars, &mut text);
    text.push_str(")\n(check-sat)\n(get-model)\n");
    SmtScript { text, vars }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelParseError {
    #[error("model parse error at offset {offset}: {msg}")]
    Malformed { offset: usize, msg: String },
}

/// A parsed s-expression.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

/// Parses a sequence of s-expressions. Quoted symbols `|...|` become
/// atoms holding the quoted text; `;` comments run to end of line.
pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>, ModelParseError> {
    let bytes: Vec<char> = text.chars().collect();
    let mut pos = 0usize;
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    let mut top: Vec<Sexp> = Vec::new();
    while pos < bytes.len() {
        let c = bytes[pos];
        match c {
            c if c.is_whitespace() => pos += 1,
            ';' => {
                while pos < bytes.len() && bytes[pos] != '\n' {
                    pos += 1;
                }
            }
            '(' => {
                stack.push(std::mem::take(&mut top));
                pos += 1;
            }
            ')' => {
                let list = Sexp::List(std::mem::take(&mut top));
                top = stack.pop().ok_or(ModelParseError::Malformed {
                    offset: pos,
                    msg: "unbalanced ')'".into(),
                })?;
                top.push(list);
                pos += 1;
            }
            '|' => {
                let start = pos;
                pos += 1;
                let mut atom = String::new();
                loop {
                    if pos >= bytes.len() {
                        return Err(ModelParseError::Malformed {
                            offset: start,
                            msg: "unterminated quoted symbol".into(),
                        });
                    }
                    if bytes[pos] == '|' {
                        pos += 1;
                        break;
                    }
                    atom.push(bytes[pos]);
                    pos += 1;
                }
                top.push(Sexp::Atom(atom));
            }
            _ => {
                let mut atom = String::new();
                while pos < bytes.len() {
                    let c = bytes[pos];
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '|' {
                        break;
                    }
                    atom.push(c);
                    pos += 1;
                }
                top.push(Sexp::Atom(atom));
            }
        }
    }
    if !stack.is_empty() {
        return Err(ModelParseError::Malformed {
            offset: bytes.len(),
            msg: "unbalanced '('".into(),
        });
    }
    Ok(top)
}

fn int_value(sexp: &Sexp, offset_hint: usize) -> Result<i64, ModelParseError> {
    match sexp {
        Sexp::Atom(a) => a.parse::<i64>().map_err(|_| ModelParseError::Malformed {
            offset: offset_hint,
            msg: format!("expected an integer, found '{a}'"),
        }),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(minus), inner] if minus == "-" => Ok(-int_value(inner, offset_hint)?),
            _ => Err(ModelParseError::Malformed {
                offset: offset_hint,
                msg: "expected an integer value".into(),
            }),
        },
    }
}

/// Extracts an assignment from `get-model` output. Declared variables
/// missing from the model default to `false` / `0`; unknown definitions
/// are ignored.
pub fn parse_model(output: &str, vars: &VarTable) -> Result<Assignment, ModelParseError> {
    let sexps = parse_sexps(output)?;
    let mut model = Assignment::new();
    // Complete assignment up front; solvers may omit don't-cares.
    for (_, f, i) in vars.pos_vars() {
        model.set_pos(f, i, false);
    }
    for (_, f, i) in vars.wt_vars() {
        model.set_wt(f, i, 0);
    }
    let mut entries: Vec<&Sexp> = Vec::new();
    for top in &sexps {
        match top {
            Sexp::List(items) => match items.first() {
                Some(Sexp::Atom(head)) if head == "define-fun" => entries.push(top),
                Some(Sexp::Atom(head)) if head == "model" => {
                    entries.extend(items.iter().skip(1));
                }
                _ => entries.extend(items.iter()),
            },
            Sexp::Atom(_) => {}
        }
    }
    for entry in entries {
        let Sexp::List(items) = entry else { continue };
        let [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(params), _sort, value] =
            items.as_slice()
        else {
            continue;
        };
        if head != "define-fun" || !params.is_empty() {
            continue;
        }
        match vars.by_name.get(name) {
            Some((VarKind::Pos, f, i)) => {
                let b = match value {
                    Sexp::Atom(a) if a == "true" => true,
                    Sexp::Atom(a) if a == "false" => false,
                    _ => {
                        return Err(ModelParseError::Malformed {
                            offset: 0,
                            msg: format!("expected a boolean for '{name}'"),
                        })
                    }
                };
                model.set_pos(f.clone(), *i, b);
            }
            Some((VarKind::Wt, f, i)) => {
                model.set_wt(f.clone(), *i, int_value(value, 0)?);
            }
            None => {}
        }
    }
    Ok(model)
}

/// Answers a query with the backend selected by the handle.
pub fn solve(formula: &BoolExpr, handle: &SolverHandle, deadline: Option<Instant>) -> SolveResult {
    match handle {
        SolverHandle::Internal { weight_bound } => solve_internal(formula, *weight_bound, deadline),
        SolverHandle::External { command, timeout } => {
            solve_external(formula, command, *timeout, deadline)
        }
    }
}

/// Bounded enumeration. Position assignments are tried in lexicographic
/// order over the variables sorted by mangled name (false before true);
/// for each, active weights run ascending from 1 to the bound while
/// inactive weights stay at 1. The first satisfying assignment is
/// returned, which makes the result a pure function of the formula and
/// the bound.
pub fn solve_internal(
    formula: &BoolExpr,
    weight_bound: i64,
    deadline: Option<Instant>,
) -> SolveResult {
    let table = VarTable::build(formula);
    let pos_vars = table.pos_vars();
    let wt_vars = table.wt_vars();
    if pos_vars.len() > INTERNAL_POS_LIMIT {
        return SolveResult::Unknown(format!(
            "formula too large for the internal solver: {} boolean variables (limit {})",
            pos_vars.len(),
            INTERNAL_POS_LIMIT
        ));
    }
    let weight_bound = weight_bound.max(1);
    let n = pos_vars.len();
    let mut checked = 0u64;
    for mask in 0..(1u64 << n) {
        let mut base = Assignment::new();
        let mut active: Vec<(Symbol, usize)> = Vec::new();
        for (j, (_, f, i)) in pos_vars.iter().enumerate() {
            // The first variable in name order is the most significant bit,
            // so masks count through assignments lexicographically.
            let value = (mask >> (n - 1 - j)) & 1 == 1;
            base.set_pos(f.clone(), *i, value);
            if value {
                active.push((f.clone(), *i));
            }
        }
        for (_, f, i) in &wt_vars {
            base.set_wt(f.clone(), *i, 1);
        }
        // Ascending mixed-radix counter over the active weights; the last
        // position cycles fastest.
        let mut weights = vec![1i64; active.len()];
        'weights: loop {
            let mut candidate = base.clone();
            for ((f, i), w) in active.iter().zip(&weights) {
                candidate.set_wt(f.clone(), *i, *w);
            }
            checked += 1;
            if checked.is_multiple_of(1024) {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return SolveResult::TimedOut;
                    }
                }
            }
            if eval_bool(formula, &candidate) {
                return SolveResult::Sat(candidate);
            }
            let mut idx = weights.len();
            loop {
                if idx == 0 {
                    // Every combination has been tried.
                    break 'weights;
                }
                idx -= 1;
                if weights[idx] < weight_bound {
                    weights[idx] += 1;
                    continue 'weights;
                }
                weights[idx] = 1;
            }
        }
    }
    SolveResult::Unsat
}

/// Runs an external solver on the serialized formula.
pub fn solve_external(
    formula: &BoolExpr,
    command: &str,
    timeout: Duration,
    deadline: Option<Instant>,
) -> SolveResult {
    let script = to_smtlib(formula);
    let budget = match deadline {
        None => timeout,
        Some(d) => {
            let left = d.saturating_duration_since(Instant::now());
            if left.is_zero() {
                return SolveResult::TimedOut;
            }
            timeout.min(left)
        }
    };

    let mut argv: Vec<String> = command.split_whitespace().map(str::to_string).collect();
    if argv.is_empty() {
        return SolveResult::Unknown("empty solver command".into());
    }
    let uses_file = argv.iter().any(|a| a.contains("{file}"));
    let mut _script_file = None;
    if uses_file {
        let mut file = match tempfile::Builder::new().suffix(".smt2").tempfile() {
            Ok(f) => f,
            Err(e) => return SolveResult::Unknown(format!("cannot create script file: {e}")),
        };
        if let Err(e) = file.write_all(script.text.as_bytes()) {
            return SolveResult::Unknown(format!("cannot write script file: {e}"));
        }
        let path = file.path().display().to_string();
        for arg in &mut argv {
            *arg = arg.replace("{file}", &path);
        }
        _script_file = Some(file);
    }

    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .stdin(if uses_file {
            Stdio::null()
        } else {
            Stdio::piped()
        })
        .stdout(Stdio::piped())
        .stderr(Stdio::null());
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return SolveResult::Unknown(format!("spawn failure for '{}': {e}", argv[0])),
    };

    if !uses_file {
        if let Some(mut stdin) = child.stdin.take() {
            if let Err(e) = stdin.write_all(script.text.as_bytes()) {
                let _ = child.kill();
                let _ = child.wait();
                return SolveResult::Unknown(format!("cannot write to solver stdin: {e}"));
            }
        }
    }

    match wait_with_timeout(&mut child, budget) {
        Err(e) => {
            let _ = child.kill();
            let _ = child.wait();
            SolveResult::Unknown(format!("error waiting for solver: {e}"))
        }
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            SolveResult::TimedOut
        }
        Ok(Some(_status)) => {
            let mut output = String::new();
            if let Some(mut stdout) = child.stdout.take() {
                use std::io::Read as _;
                let _ = stdout.read_to_string(&mut output);
            }
            interpret_solver_output(&output, &script.vars)
        }
    }
}

fn wait_with_timeout(
    child: &mut Child,
    timeout: Duration,
) -> std::io::Result<Option<std::process::ExitStatus>> {
    let start = Instant::now();
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(Some(status));
        }
        if start.elapsed() >= timeout {
            return Ok(None);
        }
        std::thread::sleep(Duration::from_millis(5));
    }
}

fn interpret_solver_output(output: &str, vars: &VarTable) -> SolveResult {
    let mut lines = output.lines().filter(|l| !l.trim().is_empty());
    let verdict = match lines.next() {
        Some(l) => l.trim(),
        None => return SolveResult::Unknown("no output from solver".into()),
    };
    match verdict {
        "unsat" => SolveResult::Unsat,
        "unknown" => SolveResult::Unknown("solver returned unknown".into()),
        "timeout" => SolveResult::TimedOut,
        "sat" => {
            let rest: String = lines.collect::<Vec<_>>().join("\n");
            match parse_model(&rest, vars) {
                Ok(model) => SolveResult::Sat(model),
                Err(e) => SolveResult::Unknown(format!("cannot parse model: {e}")),
            }
        }
        other => SolveResult::Unknown(format!("unexpected solver output: '{other}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> Symbol {
        Symbol::new("f", 1)
    }

    #[test]
    fn smtlib_spec_examples() {
        let f = f1();
        let san = BoolExpr::implies(
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::gt(IntExpr::Wt(f.clone(), 1), IntExpr::Const(0)),
        );
        let script = to_smtlib(&san);
        assert!(script.text.contains("(set-logic QF_LIA)"));
        assert!(script.text.contains("(declare-fun p_f_1 () Bool)"));
        assert!(script.text.contains("(declare-fun w_f_1 () Int)"));
        assert!(script.text.contains("(assert (=> p_f_1 (> w_f_1 0)))"));
        assert!(script.text.contains("(check-sat)"));
        assert!(script.text.contains("(get-model)"));

        let ite = BoolExpr::Geq(
            IntExpr::Ite(
                Box::new(BoolExpr::Not(Box::new(BoolExpr::Pos(f.clone(), 1)))),
                Box::new(IntExpr::Const(1)),
                Box::new(IntExpr::Const(0)),
            ),
            IntExpr::Const(1),
        );
        let script = to_smtlib(&ite);
        assert!(script
            .text
            .contains("(assert (>= (ite (not p_f_1) 1 0) 1))"));

        let script = to_smtlib(&BoolExpr::Const(true));
        assert!(script.text.contains("(assert true)"));
    }

    #[test]
    fn mangling_sanitizes_and_disambiguates() {
        let marked = Symbol::new("minus", 2).marked();
        let formula = BoolExpr::Pos(marked, 1);
        let script = to_smtlib(&formula);
        assert!(script.text.contains("p_minus_x23_1"));

        // A user symbol that collides with a sanitized marked name gets a
        // deterministic quoted suffix.
        let a = Symbol::new("g", 1).marked();
        let b = Symbol::new("g_x23", 1);
        let formula = BoolExpr::and(vec![BoolExpr::Pos(a, 1), BoolExpr::Pos(b, 1)]);
        let script = to_smtlib(&formula);
        assert!(script.text.contains("(declare-fun p_g_x23_1 () Bool)"));
        assert!(script.text.contains("(declare-fun |p_g_x23_1#2| () Bool)"));
    }

    #[test]
    fn model_parse_spec_examples() {
        let f = f1();
        let formula = BoolExpr::and(vec![
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::gt(IntExpr::Wt(f.clone(), 1), IntExpr::Const(-10)),
        ]);
        let vars = VarTable::build(&formula);

        let model = parse_model("(define-fun p_f_1 () Bool true)", &vars).unwrap();
        assert!(model.pos(&f, 1));

        let model = parse_model("(define-fun w_f_1 () Int 2)", &vars).unwrap();
        assert_eq!(model.wt(&f, 1), 2);

        let model = parse_model("(model (define-fun w_f_1 () Int (- 1)))", &vars).unwrap();
        assert_eq!(model.wt(&f, 1), -1);

        // Missing variables default to false / 0.
        let model = parse_model("(model )", &vars).unwrap();
        assert!(!model.pos(&f, 1));
        assert_eq!(model.wt(&f, 1), 0);

        let err = parse_model("(define-fun p_f_1 () Bool", &vars).unwrap_err();
        assert!(matches!(err, ModelParseError::Malformed { .. }));
    }

    #[test]
    fn script_variable_set_round_trips() {
        let f = Symbol::new("f", 2);
        let g = Symbol::new("g", 1).marked();
        let formula = BoolExpr::and(vec![
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::Pos(f.clone(), 2),
            BoolExpr::implies(
                BoolExpr::Pos(g.clone(), 1),
                BoolExpr::gt(IntExpr::Wt(g.clone(), 1), IntExpr::Const(0)),
            ),
        ]);
        let script = to_smtlib(&formula);
        let sexps = parse_sexps(&script.text).unwrap();
        let mut declared = Vec::new();
        for sexp in sexps {
            if let Sexp::List(items) = sexp {
                if let [Sexp::Atom(head), Sexp::Atom(name), ..] = items.as_slice() {
                    if head == "declare-fun" {
                        declared.push(name.clone());
                    }
                }
            }
        }
        declared.sort();
        let mut expected: Vec<String> = script.vars.names().cloned().collect();
        expected.sort();
        assert_eq!(declared, expected);
    }

    #[test]
    fn internal_finds_first_model_in_order() {
        let f = f1();
        // p_f_1 OR (w tie): the all-false assignment is first and fails,
        // the next one selects the position.
        let formula = BoolExpr::Pos(f.clone(), 1);
        match solve_internal(&formula, 2, None) {
            SolveResult::Sat(model) => {
                assert!(model.pos(&f, 1));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn internal_reports_unsat_for_contradiction() {
        let f = f1();
        let formula = BoolExpr::And(vec![
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::Not(Box::new(BoolExpr::Pos(f, 1))),
        ]);
        assert_eq!(solve_internal(&formula, 2, None), SolveResult::Unsat);
    }

    #[test]
    fn internal_enumerates_weights_ascending() {
        let f = f1();
        // Requires weight exactly 2 on the active position.
        let formula = BoolExpr::and(vec![
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::int_eq(IntExpr::Wt(f.clone(), 1), IntExpr::Const(2)),
        ]);
        match solve_internal(&formula, 2, None) {
            SolveResult::Sat(model) => assert_eq!(model.wt(&f, 1), 2),
            other => panic!("expected sat, got {other:?}"),
        }
        // Out of reach with bound 1.
        assert_eq!(solve_internal(&formula, 1, None), SolveResult::Unsat);
    }

    #[test]
    fn internal_guards_variable_count() {
        let wide = Symbol::new("wide", 21);
        let formula = BoolExpr::or((1..=21).map(|i| BoolExpr::Pos(wide.clone(), i)).collect());
        assert!(matches!(
            solve_internal(&formula, 2, None),
            SolveResult::Unknown(_)
        ));
    }

    #[test]
    fn external_spawn_failure_is_unknown() {
        let formula = BoolExpr::Const(true);
        let result = solve_external(
            &formula,
            "definitely-not-a-solver-binary-7f3a",
            Duration::from_secs(1),
            None,
        );
        match result {
            SolveResult::Unknown(msg) => assert!(msg.contains("spawn failure")),
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    /// Writes an executable shell script standing in for a solver.
    #[cfg(unix)]
    fn fake_solver(dir: &std::path::Path, name: &str, body: &str) -> String {
        use std::os::unix::fs::PermissionsExt;
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        let mut perms = std::fs::metadata(&path).unwrap().permissions();
        perms.set_mode(0o755);
        std::fs::set_permissions(&path, perms).unwrap();
        path.display().to_string()
    }

    #[test]
    #[cfg(unix)]
    fn external_stdin_solver_round_trips_a_model() {
        let dir = tempfile::tempdir().unwrap();
        let script = fake_solver(
            dir.path(),
            "fake-sat.sh",
            "#!/bin/sh\ncat > /dev/null\necho sat\n\
             echo '(model (define-fun p_f_1 () Bool true) (define-fun w_f_1 () Int 2))'\n",
        );
        let f = f1();
        let formula = BoolExpr::and(vec![
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::int_eq(IntExpr::Wt(f.clone(), 1), IntExpr::Const(2)),
        ]);
        match solve_external(&formula, &script, Duration::from_secs(10), None) {
            SolveResult::Sat(model) => {
                assert!(model.pos(&f, 1));
                assert_eq!(model.wt(&f, 1), 2);
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    #[cfg(unix)]
    fn external_file_template_passes_the_script_path() {
        let dir = tempfile::tempdir().unwrap();
        let script = fake_solver(
            dir.path(),
            "fake-file.sh",
            "#!/bin/sh\ngrep -q 'check-sat' \"$1\" || { echo unknown; exit 0; }\n\
             echo unsat\n",
        );
        let command = format!("{script} {{file}}");
        let formula = BoolExpr::Const(false);
        assert_eq!(
            solve_external(&formula, &command, Duration::from_secs(10), None),
            SolveResult::Unsat
        );
    }

    #[test]
    #[cfg(unix)]
    fn external_garbage_output_is_unknown() {
        let dir = tempfile::tempdir().unwrap();
        let script = fake_solver(
            dir.path(),
            "fake-garbage.sh",
            "#!/bin/sh\ncat > /dev/null\necho flagrant error\n",
        );
        match solve_external(&BoolExpr::Const(true), &script, Duration::from_secs(10), None) {
            SolveResult::Unknown(msg) => assert!(msg.contains("unexpected solver output")),
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    #[test]
    #[cfg(unix)]
    fn external_timeout_kills_the_subprocess() {
        let dir = tempfile::tempdir().unwrap();
        let script = fake_solver(
            dir.path(),
            "fake-sleep.sh",
            "#!/bin/sh\ncat > /dev/null\nsleep 30\n",
        );
        let start = Instant::now();
        let result =
            solve_external(&BoolExpr::Const(true), &script, Duration::from_millis(200), None);
        assert_eq!(result, SolveResult::TimedOut);
        assert!(start.elapsed() < Duration::from_secs(5), "kill did not take effect");
    }

    #[test]
    fn external_agrees_with_internal_when_solver_present() {
        let Some(command) = find_test_solver() else {
            eprintln!("skipping: no external SMT solver on PATH");
            return;
        };
        let f = f1();
        let sat_formula = BoolExpr::and(vec![
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::gt(IntExpr::Wt(f.clone(), 1), IntExpr::Const(0)),
        ]);
        let unsat_formula = BoolExpr::and(vec![
            BoolExpr::Pos(f.clone(), 1),
            BoolExpr::not(BoolExpr::Pos(f.clone(), 1)),
        ]);
        for (formula, want_sat) in [(&sat_formula, true), (&unsat_formula, false)] {
            let external = solve_external(formula, &command, Duration::from_secs(10), None);
            let internal = solve_internal(formula, 2, None);
            match (external, internal, want_sat) {
                (SolveResult::Sat(_), SolveResult::Sat(_), true) => {}
                (SolveResult::Unsat, SolveResult::Unsat, false) => {}
                (e, i, _) => panic!("backend disagreement: external {e:?}, internal {i:?}"),
            }
        }
    }

    /// Probes for a usable external solver; shared with the acceptance
    /// suite's conventions.
    pub fn find_test_solver() -> Option<String> {
        for candidate in ["z3 -in", "cvc5 --lang=smt2", "cvc4 --lang=smt2"] {
            let binary = candidate.split_whitespace().next().expect("nonempty");
            let probe = Command::new(binary)
                .arg("--version")
                .stdout(Stdio::null())
                .stderr(Stdio::null())
                .spawn();
            if let Ok(mut child) = probe {
                let _ = child.wait();
                return Some(candidate.to_string());
            }
        }
        None
    }
}
