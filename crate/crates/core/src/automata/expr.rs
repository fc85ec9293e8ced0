//! Rational expressions: `|` union, juxtaposition or `.` concatenation, `*`
//! star, parentheses, `1` for ε. Letters are delimited by whitespace or
//! operator characters, so `(a b')*` and `a*b` both parse.

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, EPSILON};

use super::{Nfa, NfaBuilder, StateId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Epsilon,
    Letter(Letter),
    Concat(Vec<Expr>),
    Union(Vec<Expr>),
    Star(Box<Expr>),
}

impl Expr {
    pub fn node_count(&self) -> usize {
        match self {
            Expr::Epsilon | Expr::Letter(_) => 1,
            Expr::Concat(v) | Expr::Union(v) => 1 + v.iter().map(Expr::node_count).sum::<usize>(),
            Expr::Star(e) => 1 + e.node_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Bar,
    Star,
    Dot,
    Name(String),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let col = src[..i].chars().count() + 1;
        let single = match c {
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            '|' => Some(Tok::Bar),
            '*' => Some(Tok::Star),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            chars.next();
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == ',' {
            return Err(Error::parse(1, col, "unexpected `,`"));
        }
        let mut name = String::new();
        while let Some(&(_, c)) = chars.peek() {
            if c.is_whitespace() || "()|*.,".contains(c) {
                break;
            }
            name.push(c);
            chars.next();
        }
        out.push((Tok::Name(name), col));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    alphabet: &'a Alphabet,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut alts = vec![self.term()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            alts.push(self.term()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Expr::Union(alts) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Dot) if !parts.is_empty() => {
                    self.pos += 1;
                    parts.push(self.factor()?);
                }
                Some(Tok::Open) | Some(Tok::Name(_)) => parts.push(self.factor()?),
                _ => break,
            }
        }
        match parts.len() {
            0 => Err(Error::parse(1, self.col(), "expected a letter, `1` or `(`")),
            1 => Ok(parts.pop().unwrap()),
            _ => Ok(Expr::Concat(parts)),
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            if !matches!(e, Expr::Star(_)) {
                e = Expr::Star(Box::new(e));
            }
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.toks.get(self.pos).map(|t| t.0.clone()) {
            Some(Tok::Open) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(Error::parse(1, self.col(), "expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                if n == EPSILON {
                    return Ok(Expr::Epsilon);
                }
                match self.alphabet.lookup(&n) {
                    Some(l) => Ok(Expr::Letter(l)),
                    None => Err(Error::parse(1, col, format!("unknown letter `{n}`"))),
                }
            }
            _ => Err(Error::parse(1, col, "expected a letter, `1` or `(`")),
        }
    }
}

pub fn parse_expr(src: &str, alphabet: &Alphabet) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
        end_col: src.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::parse(1, p.col(), "unexpected token"));
    }
    Ok(e)
}

fn build(e: &Expr, b: &mut NfaBuilder) -> (StateId, StateId) {
    match e {
        Expr::Epsilon => {
            let s = b.add_state();
            (s, s)
        }
        Expr::Letter(l) => {
            let s = b.add_state();
            let t = b.add_state();
            b.add_edge(s, Some(*l), t);
            (s, t)
        }
        Expr::Concat(parts) => {
            let (start, mut end) = build(&parts[0], b);
            for p in &parts[1..] {
                let (s, t) = build(p, b);
                b.add_edge(end, None, s);
                end = t;
            }
            (start, end)
        }
        Expr::Union(alts) => {
            let s = b.add_state();
            let t = b.add_state();
            for a in alts {
                let (x, y) = build(a, b);
                b.add_edge(s, None, x);
                b.add_edge(y, None, t);
            }
            (s, t)
        }
        Expr::Star(inner) => {
            let s = b.add_state();
            let (x, y) = build(inner, b);
            b.add_edge(s, None, x);
            b.add_edge(y, None, s);
            (s, s)
        }
    }
}

/// Thompson-style construction; at most two states per node.
pub fn compile(e: &Expr, alphabet: &Alphabet) -> Nfa {
    let mut b = NfaBuilder::new(alphabet);
    let (s, t) = build(e, &mut b);
    b.set_initial(s);
    b.add_final(t);
    b.build()
}

pub fn compile_str(src: &str, alphabet: &Alphabet) -> Result<Nfa> {
    Ok(compile(&parse_expr(src, alphabet)?, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al() -> Alphabet {
        Alphabet::new(["a", "a'", "b", "b'"]).unwrap()
    }

    #[test]
    fn parses_operators_without_spaces() {
        let a = al();
        let e = parse_expr("a*b'", &a).unwrap();
        assert_eq!(
            e,
            Expr::Concat(vec![Expr::Star(Box::new(Expr::Letter(Letter(0)))), Expr::Letter(Letter(3))])
        );
        assert_eq!(parse_expr("a.b", &a).unwrap(), parse_expr("a b", &a).unwrap());
    }

    #[test]
    fn state_bound() {
        let a = al();
        for src in ["(a b)*", "a | b b", "((a|b')* a)*", "1", "a' a' a'"] {
            let e = parse_expr(src, &a).unwrap();
            assert!(compile(&e, &a).num_states() <= 2 * e.node_count(), "{src}");
        }
    }

    #[test]
    fn errors_carry_columns() {
        let a = al();
        match parse_expr("(a b", &a) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        match parse_expr("a c", &a) {
            Err(Error::Parse { column, message, .. }) => {
                assert_eq!(column, 3);
                assert!(message.contains("`c`"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("", &a).is_err());
        assert!(parse_expr("a |", &a).is_err());
        assert!(parse_expr("*", &a).is_err());
        assert!(parse_expr("a)", &a).is_err());
    }
}
