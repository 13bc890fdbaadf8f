use super::{Conjunct, PredicateTable, QueryAst, QueryError, Term, Value};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Var(String),
    Wild,
    Int(i64),
    Num(f64),
    Str(String),
    Quoted(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Prompt,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Eof => "end of input".into(),
            Tok::Name(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Wild => "`_`".into(),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Num(x) => format!("`{x}`"),
            Tok::Str(_) | Tok::Quoted(_) => "quoted text".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Prompt => "`?-`".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> QueryError {
    QueryError::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, out: &mut String, f: impl Fn(char) -> bool) {
        while let Some(&c) = self.chars.peek() {
            if !f(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, QueryError> {
        let mut out = Vec::new();
        loop {
            while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
                self.bump();
            }
            let start = self.pos;
            let Some(&c) = self.chars.peek() else {
                out.push((Tok::Eof, start));
                return Ok(out);
            };
            let ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
            let tok = match c {
                '(' | ')' | '[' | ']' | ',' | '.' => {
                    self.bump();
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        ',' => Tok::Comma,
                        _ => Tok::Dot,
                    }
                }
                '?' => {
                    self.bump();
                    if self.chars.peek() != Some(&'-') {
                        return Err(syntax(start, "expected `?-`"));
                    }
                    self.bump();
                    Tok::Prompt
                }
                '_' => {
                    let mut s = String::new();
                    self.take_while(&mut s, ident);
                    Tok::Wild
                }
                c if c.is_ascii_uppercase() => {
                    let mut s = String::new();
                    self.take_while(&mut s, ident);
                    Tok::Var(s)
                }
                c if c.is_ascii_lowercase() => {
                    let mut s = String::new();
                    self.take_while(&mut s, ident);
                    Tok::Name(s)
                }
                c if c.is_ascii_digit() || c == '-' => self.number(start)?,
                '"' | '\'' => {
                    let s = self.quoted(c, start)?;
                    if c == '"' {
                        Tok::Str(s)
                    } else {
                        Tok::Quoted(s)
                    }
                }
                other => return Err(syntax(start, format!("unexpected character `{other}`"))),
            };
            out.push((tok, start));
        }
    }

    fn number(&mut self, start: Pos) -> Result<Tok, QueryError> {
        let mut s = String::new();
        if self.chars.peek() == Some(&'-') {
            s.push('-');
            self.bump();
        }
        self.take_while(&mut s, |c| c.is_ascii_digit());
        let mut is_float = false;
        // A '.' is only a decimal point when a digit follows; otherwise it
        // ends the query.
        let mut ahead = self.chars.clone();
        if ahead.next() == Some('.') && ahead.peek().is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            s.push('.');
            self.bump();
            self.take_while(&mut s, |c| c.is_ascii_digit());
        }
        if matches!(self.chars.peek(), Some('e' | 'E')) {
            is_float = true;
            s.push('e');
            self.bump();
            if let Some(&sign @ ('+' | '-')) = self.chars.peek() {
                s.push(sign);
                self.bump();
            }
            self.take_while(&mut s, |c| c.is_ascii_digit());
        }
        let bad = || syntax(start, format!("malformed number `{s}`"));
        if is_float {
            s.parse().map(Tok::Num).map_err(|_| bad())
        } else {
            s.parse().map(Tok::Int).map_err(|_| bad())
        }
    }

    fn quoted(&mut self, quote: char, start: Pos) -> Result<String, QueryError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(syntax(start, "unterminated quoted text")),
                Some(c) if c == quote => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c) => s.push(c),
                    None => return Err(syntax(start, "unterminated quoted text")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Pos) {
        &self.toks[self.at]
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Pos, QueryError> {
        let (tok, pos) = self.next();
        if tok == want {
            Ok(pos)
        } else {
            Err(syntax(
                pos,
                format!("expected {what}, found {}", tok.describe()),
            ))
        }
    }

    fn query(&mut self) -> Result<Vec<(Conjunct, Pos)>, QueryError> {
        // an interactive-style `?-` prompt is accepted and ignored
        if self.peek().0 == Tok::Prompt {
            self.next();
        }
        let mut out = vec![self.conjunct()?];
        while self.peek().0 == Tok::Comma {
            self.next();
            out.push(self.conjunct()?);
        }
        if self.peek().0 == Tok::Dot {
            self.next();
        }
        let (tok, pos) = self.next();
        if tok != Tok::Eof {
            return Err(syntax(
                pos,
                format!("expected `,` or end of query, found {}", tok.describe()),
            ));
        }
        Ok(out)
    }

    fn conjunct(&mut self) -> Result<(Conjunct, Pos), QueryError> {
        let (tok, pos) = self.next();
        let Tok::Name(name) = tok else {
            return Err(syntax(
                pos,
                format!("expected predicate name, found {}", tok.describe()),
            ));
        };
        let open = self.expect(Tok::LParen, "`(`")?;
        let unclosed = || syntax(open, "unclosed `(`");
        if self.peek().0 == Tok::Eof {
            return Err(unclosed());
        }
        let mut args = vec![self.term()?];
        loop {
            let (tok, p) = self.next();
            match tok {
                Tok::Comma if self.peek().0 == Tok::Eof => return Err(unclosed()),
                Tok::Comma => args.push(self.term()?),
                Tok::RParen => break,
                Tok::Eof => return Err(unclosed()),
                other => {
                    return Err(syntax(
                        p,
                        format!("expected `,` or `)`, found {}", other.describe()),
                    ))
                }
            }
        }
        Ok((Conjunct { name, args }, pos))
    }

    fn term(&mut self) -> Result<Term, QueryError> {
        let (tok, pos) = self.next();
        Ok(match tok {
            Tok::Var(v) => Term::Variable(v),
            Tok::Wild => Term::Wildcard,
            Tok::LBracket => Term::Constant(self.list(pos)?),
            other => Term::Constant(Self::constant(other, pos)?),
        })
    }

    fn constant(tok: Tok, pos: Pos) -> Result<Value, QueryError> {
        Ok(match tok {
            Tok::Name(s) | Tok::Quoted(s) => Value::Atom(s),
            Tok::Str(s) => Value::Str(s),
            Tok::Int(i) => Value::Int(i),
            Tok::Num(x) => Value::Num(x),
            Tok::Eof => return Err(syntax(pos, "unexpected end of input: expected a term")),
            other => {
                return Err(syntax(
                    pos,
                    format!("expected a term, found {}", other.describe()),
                ))
            }
        })
    }

    fn list(&mut self, open: Pos) -> Result<Value, QueryError> {
        let mut items = Vec::new();
        if self.peek().0 == Tok::RBracket {
            self.next();
            return Ok(Value::List(items));
        }
        loop {
            let (tok, pos) = self.next();
            items.push(match tok {
                Tok::LBracket => self.list(pos)?,
                Tok::Var(_) | Tok::Wild => {
                    return Err(syntax(pos, "list elements must be constants"))
                }
                other => Self::constant(other, pos)?,
            });
            let (tok, pos) = self.next();
            match tok {
                Tok::Comma => {}
                Tok::RBracket => return Ok(Value::List(items)),
                Tok::Eof => return Err(syntax(open, "unclosed `[`")),
                other => {
                    return Err(syntax(
                        pos,
                        format!("expected `,` or `]`, found {}", other.describe()),
                    ))
                }
            }
        }
    }
}

/// Parses against the standard predicate table.
pub fn parse_query(text: &str) -> Result<QueryAst, QueryError> {
    parse_query_with(text, &PredicateTable::standard())
}

pub fn parse_query_with(text: &str, table: &PredicateTable) -> Result<QueryAst, QueryError> {
    let toks = Lexer::new(text).tokens()?;
    let conjuncts = Parser { toks, at: 0 }.query()?;
    for (c, _) in &conjuncts {
        if table.get(&c.name, c.args.len()).is_none() {
            let arities = table.arities(&c.name);
            if arities.is_empty() {
                return Err(QueryError::UnknownPredicate {
                    name: c.name.clone(),
                    arity: c.args.len(),
                });
            }
            return Err(QueryError::Arity {
                name: c.name.clone(),
                expected: arities
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" or "),
                found: c.args.len(),
            });
        }
    }
    Ok(QueryAst {
        conjuncts: conjuncts.into_iter().map(|(c, _)| c).collect(),
    })
}
