//! Text format for presented modules.
//!
//! ```text
//! # the node
//! prime 32003;
//! vars x y;
//! gens 0;
//! rels x*y;
//! ```
//!
//! Statements end with `;` and may span lines; `#` starts a comment. `prime`
//! defaults to 32003 and `gens` to a single generator in degree 0. With more
//! than one generator every relation is a bracketed vector `[f_1, ..., f_s]`.
//! Polynomials use `+ - * ^` and parentheses; juxtaposition is not multiplication.

use crate::error::{Error, Result};
use crate::exactla::PrimeField;
use crate::graded::PresentedModule;
use crate::poly::{Monomial, Polynomial, RingSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<u64>()
                    .map_err(|_| parse_err(line, col, format!("integer {s} is too large")))?;
                out.push(Token {
                    tok: Tok::Int(v),
                    line,
                    col,
                });
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    col,
                });
            } else if "+-*^()[],;".contains(c) {
                out.push(Token {
                    tok: Tok::Sym(c),
                    line,
                    col,
                });
                i += 1;
            } else {
                return Err(parse_err(line, col, format!("unexpected character '{c}'")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], end: (usize, usize)) -> Self {
        Self { toks, pos: 0, end }
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.col))
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        parse_err(l, c, msg)
    }

    fn eat_sym(&mut self, s: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(c), .. }) if *c == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: char) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{s}'")))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expr(&mut self, ring: &RingSpec) -> Result<Polynomial> {
        let k = ring.field();
        let mut acc = self.term(ring)?;
        loop {
            if self.eat_sym('+') {
                acc = acc.add(k, &self.term(ring)?);
            } else if self.eat_sym('-') {
                acc = acc.sub(k, &self.term(ring)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, ring: &RingSpec) -> Result<Polynomial> {
        let k = ring.field();
        let mut acc = self.unary(ring)?;
        while self.eat_sym('*') {
            acc = acc.mul(k, &self.unary(ring)?);
        }
        if let Some(Token {
            tok: Tok::Ident(_) | Tok::Int(_),
            ..
        }) = self.peek()
        {
            return Err(self.err("implicit multiplication is not allowed; use '*'"));
        }
        if matches!(self.peek(), Some(Token { tok: Tok::Sym('('), .. })) {
            return Err(self.err("implicit multiplication is not allowed; use '*'"));
        }
        Ok(acc)
    }

    fn unary(&mut self, ring: &RingSpec) -> Result<Polynomial> {
        if self.eat_sym('-') {
            return Ok(self.unary(ring)?.neg(ring.field()));
        }
        let base = self.atom(ring)?;
        if self.eat_sym('^') {
            match self.peek().cloned() {
                Some(Token { tok: Tok::Int(e), .. }) => {
                    self.pos += 1;
                    let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
                    Ok(base.pow(ring.field(), e))
                }
                _ => Err(self.err("expected a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self, ring: &RingSpec) -> Result<Polynomial> {
        let n = ring.nvars();
        match self.peek().cloned() {
            Some(Token { tok: Tok::Int(v), .. }) => {
                self.pos += 1;
                let c = (v % ring.field().modulus() as u64) as i64;
                Ok(Polynomial::monomial(ring.field(), Monomial::one(n), c))
            }
            Some(Token {
                tok: Tok::Ident(name),
                ..
            }) => match ring.var_index(&name) {
                Some(t) => {
                    self.pos += 1;
                    Ok(ring.var(t))
                }
                None => Err(self.err(format!("unknown variable '{name}'"))),
            },
            Some(Token { tok: Tok::Sym('('), .. }) => {
                self.pos += 1;
                let e = self.expr(ring)?;
                self.expect_sym(')')?;
                Ok(e)
            }
            _ => Err(self.err("expected a number, a variable or '('")),
        }
    }
}

/// Splits the token stream into `;`-terminated statements.
fn statements(toks: &[Token]) -> Result<Vec<&[Token]>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        if t.tok == Tok::Sym(';') {
            out.push(&toks[start..i]);
            start = i + 1;
        }
    }
    if start < toks.len() {
        let t = &toks[start];
        return Err(parse_err(t.line, t.col, "statement is missing its terminating ';'"));
    }
    Ok(out)
}

fn int_value(t: &Token, negative: bool) -> Result<i64> {
    match t.tok {
        Tok::Int(v) => {
            let v = i64::try_from(v).map_err(|_| parse_err(t.line, t.col, "integer too large"))?;
            Ok(if negative { -v } else { v })
        }
        _ => Err(parse_err(t.line, t.col, "expected an integer")),
    }
}

pub fn parse_module_file(text: &str) -> Result<PresentedModule> {
    let toks = tokenize(text)?;
    let mut prime: Option<u32> = None;
    let mut names: Option<Vec<String>> = None;
    let mut twists: Option<Vec<i32>> = None;
    let mut rel_stmt: Option<&[Token]> = None;
    for stmt in statements(&toks)? {
        let Some(head) = stmt.first() else { continue };
        let Tok::Ident(kw) = &head.tok else {
            return Err(parse_err(head.line, head.col, "expected a keyword (prime, vars, gens, rels)"));
        };
        let args = &stmt[1..];
        let dup = |seen: bool| -> Result<()> {
            if seen {
                Err(parse_err(head.line, head.col, format!("duplicate '{kw}' statement")))
            } else {
                Ok(())
            }
        };
        match kw.as_str() {
            "prime" => {
                dup(prime.is_some())?;
                if args.len() != 1 {
                    return Err(parse_err(head.line, head.col, "prime takes one integer"));
                }
                let v = int_value(&args[0], false)?;
                let p = u32::try_from(v)
                    .ok()
                    .and_then(|p| PrimeField::new(p).ok())
                    .ok_or_else(|| parse_err(args[0].line, args[0].col, format!("{v} is not a supported prime")))?;
                prime = Some(p.modulus());
            }
            "vars" => {
                dup(names.is_some())?;
                let mut v = Vec::new();
                for t in args {
                    match &t.tok {
                        Tok::Ident(s) => {
                            if v.contains(s) {
                                return Err(parse_err(t.line, t.col, format!("duplicate variable '{s}'")));
                            }
                            v.push(s.clone());
                        }
                        _ => return Err(parse_err(t.line, t.col, "expected a variable name")),
                    }
                }
                if v.is_empty() {
                    return Err(parse_err(head.line, head.col, "vars needs at least one name"));
                }
                names = Some(v);
            }
            "gens" => {
                dup(twists.is_some())?;
                let mut v = Vec::new();
                let mut k = 0;
                while k < args.len() {
                    let neg = args[k].tok == Tok::Sym('-');
                    if neg {
                        k += 1;
                    }
                    let t = args.get(k).ok_or_else(|| parse_err(head.line, head.col, "dangling '-'"))?;
                    let a = int_value(t, neg)?;
                    v.push(i32::try_from(a).map_err(|_| parse_err(t.line, t.col, "twist out of range"))?);
                    k += 1;
                }
                if v.is_empty() {
                    return Err(parse_err(head.line, head.col, "gens needs at least one twist"));
                }
                twists = Some(v);
            }
            "rels" => {
                dup(rel_stmt.is_some())?;
                rel_stmt = Some(stmt);
            }
            other => {
                return Err(parse_err(head.line, head.col, format!("unknown keyword '{other}'")));
            }
        }
    }
    let names = names.ok_or_else(|| parse_err(1, 1, "missing 'vars' statement"))?;
    let field = PrimeField::new(prime.unwrap_or(PrimeField::DEFAULT_MODULUS))?;
    let ring = RingSpec::new(field, names)?;
    let twists = twists.unwrap_or_else(|| vec![0]);
    let mut columns = Vec::new();
    if let Some(stmt) = rel_stmt {
        let head = &stmt[0];
        let args = &stmt[1..];
        let end = args.last().map_or((head.line, head.col + 4), |t| (t.line, t.col + 1));
        let mut p = Parser::new(args, end);
        while !p.at_end() {
            let (line, col) = p.here();
            let col_entries = if p.eat_sym('[') {
                let mut v = vec![p.expr(&ring)?];
                while p.eat_sym(',') {
                    v.push(p.expr(&ring)?);
                }
                p.expect_sym(']')?;
                v
            } else {
                vec![p.expr(&ring)?]
            };
            if col_entries.len() != twists.len() {
                return Err(parse_err(
                    line,
                    col,
                    format!(
                        "relation has {} entries but there are {} generators",
                        col_entries.len(),
                        twists.len()
                    ),
                ));
            }
            PresentedModule::new(ring.clone(), twists.clone(), vec![col_entries.clone()])
                .map_err(|e| parse_err(line, col, e.to_string()))?;
            columns.push(col_entries);
            if !p.at_end() {
                p.expect_sym(',')?;
                if p.at_end() {
                    return Err(p.err("expected a relation after ','"));
                }
            }
        }
    }
    PresentedModule::new(ring, twists, columns)
}

/// Comma-separated homogeneous polynomials; the empty string is the empty sequence.
pub fn parse_sequence(text: &str, ring: &RingSpec) -> Result<Vec<Polynomial>> {
    let toks = tokenize(text)?;
    let end = (1, text.len() + 1);
    let mut p = Parser::new(&toks, end);
    let mut out = Vec::new();
    while !p.at_end() {
        let (line, col) = p.here();
        let f = p.expr(ring)?;
        if f.is_zero() || !f.is_homogeneous() {
            return Err(parse_err(line, col, "sequence elements must be nonzero and homogeneous"));
        }
        out.push(f);
        if !p.at_end() {
            p.expect_sym(',')?;
        }
    }
    Ok(out)
}

/// Prints `m` in the module-file format; parsing the output gives `m` back.
pub fn print_module_file(m: &PresentedModule) -> String {
    let ring = m.ring();
    let mut s = String::new();
    s.push_str(&format!("prime {};\n", ring.field().modulus()));
    s.push_str(&format!("vars {};\n", ring.names().join(" ")));
    let gens: Vec<String> = m.twists().iter().map(|a| a.to_string()).collect();
    s.push_str(&format!("gens {};\n", gens.join(" ")));
    let rels: Vec<String> = m
        .relations()
        .iter()
        .map(|c| {
            let entries: Vec<String> = c.entries.iter().map(|f| ring.show(f)).collect();
            if m.twists().len() == 1 {
                entries[0].clone()
            } else {
                format!("[{}]", entries.join(", "))
            }
        })
        .collect();
    if rels.is_empty() {
        s.push_str("rels;\n");
    } else {
        s.push_str(&format!("rels {};\n", rels.join(", ")));
    }
    s
}

/// One-line description used in reports.
pub fn describe(m: &PresentedModule) -> String {
    print_module_file(m).trim_end().replace('\n', " ")
}
