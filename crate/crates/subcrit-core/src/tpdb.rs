//! Parser for the legacy TPDB `.trs` format.
//!
//! Supported input consists of top-level parenthesized blocks: `(VAR x y)`
//! declares variable names, `(RULES l -> r ...)` lists rules separated by
//! whitespace, and `(COMMENT ...)` or any other unrecognized block is
//! skipped. `THEORY`, `STRATEGY`, `EQUATIONS`, and `CONDITIONTYPE` blocks
//! are rejected: equational theories, strategy annotations, and
//! conditional rules are out of scope.
//!
//! Identifiers consist of `[A-Za-z0-9_'+*/.!-]` and constants may be
//! written with or without an empty argument list (`0` or `0()`).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::{Rule, RuleError, Symbol, Term, Trs};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: symbol '{name}' used with arity {found}, but it has arity {expected}")]
    InconsistentArity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: left-hand side of a rule is a variable")]
    VariableLhs { line: usize, col: usize },
    #[error("{line}:{col}: variable '{name}' occurs only on the right-hand side")]
    ExtraRhsVariable {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: unsupported block '{name}': {hint}")]
    UnsupportedBlock {
        line: usize,
        col: usize,
        name: String,
        hint: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Arrow,
    Ident(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '+' | '*' | '/' | '.' | '!' | '-')
}

struct Scanner {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    peeked: Option<Spanned>,
}

impl Scanner {
    fn new(text: &str) -> Self {
        Scanner {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            peeked: None,
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek_char(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn lex(&mut self) -> Result<Option<Spanned>, ParseError> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let c = match self.peek_char() {
            None => return Ok(None),
            Some(c) => c,
        };
        let tok = match c {
            '(' => {
                self.bump();
                Tok::LParen
            }
            ')' => {
                self.bump();
                Tok::RParen
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '-' if self.chars.get(self.pos + 1) == Some(&'>') => {
                self.bump();
                self.bump();
                Tok::Arrow
            }
            '=' => {
                return Err(self.err(
                    line,
                    col,
                    "unexpected character '=' (relative rules are not supported)",
                ));
            }
            '|' => {
                return Err(self.err(
                    line,
                    col,
                    "unexpected character '|' (conditional rules are not supported)",
                ));
            }
            c if is_ident_char(c) => {
                let mut name = String::new();
                while let Some(c) = self.peek_char() {
                    if !is_ident_char(c) {
                        break;
                    }
                    // An identifier stops before an arrow: `x->y` is three tokens.
                    if c == '-' && self.chars.get(self.pos + 1) == Some(&'>') {
                        break;
                    }
                    name.push(c);
                    self.bump();
                }
                Tok::Ident(name)
            }
            other => {
                return Err(self.err(line, col, format!("unexpected character '{other}'")));
            }
        };
        Ok(Some(Spanned { tok, line, col }))
    }

    fn next(&mut self) -> Result<Option<Spanned>, ParseError> {
        if let Some(t) = self.peeked.take() {
            return Ok(Some(t));
        }
        self.lex()
    }

    fn peek(&mut self) -> Result<Option<&Spanned>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = self.lex()?;
        }
        Ok(self.peeked.as_ref())
    }

    /// Consumes raw characters up to and including the `)` matching an
    /// already-consumed `(`. Used for blocks whose content is free text.
    fn skip_raw_block(&mut self) -> Result<(), ParseError> {
        debug_assert!(self.peeked.is_none());
        let mut depth = 1usize;
        loop {
            match self.bump() {
                None => {
                    return Err(self.err(self.line, self.col, "unterminated block"));
                }
                Some('(') => depth += 1,
                Some(')') => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Some(_) => {}
            }
        }
    }
}

struct Parser {
    scanner: Scanner,
    declared_vars: BTreeSet<String>,
    arities: BTreeMap<String, usize>,
    rules: Vec<Rule>,
}

impl Parser {
    fn expect(&mut self, want: &Tok, what: &str) -> Result<Spanned, ParseError> {
        match self.scanner.next()? {
            Some(t) if &t.tok == want => Ok(t),
            Some(t) => Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected {what}"),
            }),
            None => Err(ParseError::Syntax {
                line: self.scanner.line,
                col: self.scanner.col,
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    fn parse_spec(&mut self) -> Result<(), ParseError> {
        while let Some(t) = self.scanner.next()? {
            if t.tok != Tok::LParen {
                return Err(ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: "expected '(' starting a block".into(),
                });
            }
            let head = self.scanner.next()?;
            let (name, line, col) = match head {
                Some(Spanned {
                    tok: Tok::Ident(name),
                    line,
                    col,
                }) => (name, line, col),
                Some(t) => {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        msg: "expected a block name".into(),
                    })
                }
                None => {
                    return Err(ParseError::Syntax {
                        line: self.scanner.line,
                        col: self.scanner.col,
                        msg: "unexpected end of input inside a block".into(),
                    })
                }
            };
            match name.as_str() {
                "VAR" => self.parse_var_block()?,
                "RULES" => self.parse_rules_block()?,
                "THEORY" => {
                    return Err(ParseError::UnsupportedBlock {
                        line,
                        col,
                        name,
                        hint: "equational (e.g. AC) theories are not supported".into(),
                    })
                }
                "STRATEGY" => {
                    return Err(ParseError::UnsupportedBlock {
                        line,
                        col,
                        name,
                        hint: "strategy annotations (e.g. INNERMOST) are not supported".into(),
                    })
                }
                "EQUATIONS" => {
                    return Err(ParseError::UnsupportedBlock {
                        line,
                        col,
                        name,
                        hint: "equational systems are not supported".into(),
                    })
                }
                "CONDITIONTYPE" => {
                    return Err(ParseError::UnsupportedBlock {
                        line,
                        col,
                        name,
                        hint: "conditional rewriting is not supported".into(),
                    })
                }
                // COMMENT and any other block is free text; skip it.
                _ => self.scanner.skip_raw_block()?,
            }
        }
        Ok(())
    }

    fn parse_var_block(&mut self) -> Result<(), ParseError> {
        loop {
            match self.scanner.next()? {
                Some(Spanned {
                    tok: Tok::RParen, ..
                }) => return Ok(()),
                Some(Spanned {
                    tok: Tok::Ident(name),
                    ..
                }) => {
                    self.declared_vars.insert(name);
                }
                Some(t) => {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        msg: "expected a variable name or ')'".into(),
                    })
                }
                None => {
                    return Err(ParseError::Syntax {
                        line: self.scanner.line,
                        col: self.scanner.col,
                        msg: "unterminated VAR block".into(),
                    })
                }
            }
        }
    }

    fn parse_rules_block(&mut self) -> Result<(), ParseError> {
        loop {
            match self.scanner.peek()? {
                Some(Spanned {
                    tok: Tok::RParen, ..
                }) => {
                    self.scanner.next()?;
                    return Ok(());
                }
                None => {
                    return Err(ParseError::Syntax {
                        line: self.scanner.line,
                        col: self.scanner.col,
                        msg: "unterminated RULES block".into(),
                    })
                }
                Some(_) => {
                    let (line, col) = {
                        let t = self.scanner.peek()?.expect("peeked");
                        (t.line, t.col)
                    };
                    let lhs = self.parse_term()?;
                    self.expect(&Tok::Arrow, "'->'")?;
                    let rhs = self.parse_term()?;
                    let rule = Rule::new(lhs, rhs).map_err(|e| match e {
                        RuleError::VariableLhs => ParseError::VariableLhs { line, col },
                        RuleError::ExtraRhsVariable(name) => {
                            ParseError::ExtraRhsVariable { line, col, name }
                        }
                    })?;
                    self.rules.push(rule);
                }
            }
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let t = self.scanner.next()?;
        let (name, line, col) = match t {
            Some(Spanned {
                tok: Tok::Ident(name),
                line,
                col,
            }) => (name, line, col),
            Some(t) => {
                return Err(ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: "expected a term".into(),
                })
            }
            None => {
                return Err(ParseError::Syntax {
                    line: self.scanner.line,
                    col: self.scanner.col,
                    msg: "unexpected end of input, expected a term".into(),
                })
            }
        };
        let has_args = matches!(
            self.scanner.peek()?,
            Some(Spanned {
                tok: Tok::LParen,
                ..
            })
        );
        if self.declared_vars.contains(&name) {
            if has_args {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("variable '{name}' applied to arguments"),
                });
            }
            return Ok(Term::var(name));
        }
        let mut args = Vec::new();
        if has_args {
            self.scanner.next()?;
            if matches!(
                self.scanner.peek()?,
                Some(Spanned {
                    tok: Tok::RParen,
                    ..
                })
            ) {
                self.scanner.next()?;
            } else {
                loop {
                    args.push(self.parse_term()?);
                    match self.scanner.next()? {
                        Some(Spanned {
                            tok: Tok::Comma, ..
                        }) => continue,
                        Some(Spanned {
                            tok: Tok::RParen, ..
                        }) => break,
                        Some(t) => {
                            return Err(ParseError::Syntax {
                                line: t.line,
                                col: t.col,
                                msg: "expected ',' or ')' in an argument list".into(),
                            })
                        }
                        None => {
                            return Err(ParseError::Syntax {
                                line: self.scanner.line,
                                col: self.scanner.col,
                                msg: "unterminated argument list".into(),
                            })
                        }
                    }
                }
            }
        }
        let arity = args.len();
        if let Some(&known) = self.arities.get(&name) {
            if known != arity {
                return Err(ParseError::InconsistentArity {
                    line,
                    col,
                    name,
                    expected: known,
                    found: arity,
                });
            }
        } else {
            self.arities.insert(name.clone(), arity);
        }
        Ok(Term::app(Symbol::new(name, arity), args))
    }
}

/// Parses a TPDB-style `.trs` document into a rewrite system.
pub fn parse_trs(text: &str) -> Result<Trs, ParseError> {
    let mut parser = Parser {
        scanner: Scanner::new(text),
        declared_vars: BTreeSet::new(),
        arities: BTreeMap::new(),
        rules: Vec::new(),
    };
    parser.parse_spec()?;
    Trs::new(parser.rules).map_err(|e| ParseError::Syntax {
        line: 0,
        col: 0,
        msg: e.to_string(),
    })
}
