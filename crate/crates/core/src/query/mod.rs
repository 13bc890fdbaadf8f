//! A conjunctive query language over interpretation models.
//!
//! ```text
//! query    := conjunct (',' conjunct)* '.'?
//! conjunct := name '(' term (',' term)* ')'
//! term     := Variable | '_' | atom | number | string | '[' (term (',' term)*)? ']'
//! ```
//!
//! Variables start with an upper-case letter, `_` matches anything, atoms
//! start with a lower-case letter. Conjuncts are solved left to right and
//! share variables by name.

mod eval;
mod parser;
mod predicates;

pub use eval::{evaluate, solve, Binding, QueryResult, Solutions, SOLUTION_CAP};
pub use parser::{parse_query, parse_query_with};
pub use predicates::{PredicateFn, PredicateTable};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Atom(String),
    Str(String),
    Int(i64),
    Num(f64),
    List(Vec<Value>),
}

impl Value {
    pub fn atom(s: impl Into<String>) -> Self {
        Value::Atom(s.into())
    }

    pub fn ids<S: AsRef<str>>(ids: &[S]) -> Self {
        Value::List(ids.iter().map(|s| Value::atom(s.as_ref())).collect())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Num(x) => Some(*x),
            _ => None,
        }
    }

    /// Atom or string content.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Atom(s) | Value::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Equality used when joining: numbers compare by value, atoms and
    /// strings by text.
    pub fn unifies(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::List(a), Value::List(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.unifies(y))
            }
            (a, b) => match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => x == y,
                _ => matches!((a.as_text(), b.as_text()), (Some(x), Some(y)) if x == y),
            },
        }
    }

    /// Answer form: numbers with four decimals, lists bracketed.
    pub fn display(&self) -> String {
        match self {
            Value::Num(x) => format!("{x:.4}"),
            Value::List(items) => format!(
                "[{}]",
                items
                    .iter()
                    .map(Value::display)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            other => other.to_string(),
        }
    }
}

fn is_bare_atom(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str, quote: char) -> fmt::Result {
    write!(f, "{quote}")?;
    for c in s.chars() {
        match c {
            '\\' => write!(f, "\\\\")?,
            '\n' => write!(f, "\\n")?,
            '\t' => write!(f, "\\t")?,
            c if c == quote => write!(f, "\\{c}")?,
            c => write!(f, "{c}")?,
        }
    }
    write!(f, "{quote}")
}

/// Source form; parses back to the same value.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(s) if is_bare_atom(s) => write!(f, "{s}"),
            Value::Atom(s) => write_quoted(f, s, '\''),
            Value::Str(s) => write_quoted(f, s, '"'),
            Value::Int(i) => write!(f, "{i}"),
            Value::Num(x) => write!(f, "{x:?}"),
            Value::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Variable(String),
    Constant(Value),
    Wildcard,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => write!(f, "{v}"),
            Term::Constant(c) => write!(f, "{c}"),
            Term::Wildcard => write!(f, "_"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conjunct {
    pub name: String,
    pub args: Vec<Term>,
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(Term::to_string).collect();
        write!(f, "{}({})", self.name, args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryAst {
    pub conjuncts: Vec<Conjunct>,
}

impl QueryAst {
    /// Variable names in order of first appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in self.conjuncts.iter().flat_map(|c| &c.args) {
            if let Term::Variable(v) = t {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
        }
        out
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.conjuncts.iter().map(Conjunct::to_string).collect();
        write!(f, "{}.", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown predicate {name}/{arity}")]
    UnknownPredicate { name: String, arity: usize },
    #[error("{name} takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: String,
        found: usize,
    },
    #[error("predicate {name}/{arity} is already registered")]
    Duplicate { name: String, arity: usize },
}

impl QueryError {
    /// Two-line rendering of a syntax error: the offending source line and a
    /// caret under the column.
    pub fn caret(&self, text: &str) -> Option<String> {
        let QueryError::Syntax { line, column, .. } = self else {
            return None;
        };
        let src = text.lines().nth(line - 1).unwrap_or("");
        Some(format!("{src}\n{}^", " ".repeat(column.saturating_sub(1))))
    }
}
