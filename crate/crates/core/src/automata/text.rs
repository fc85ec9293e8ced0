//! Line-based automaton format:
//!
//! ```text
//! alphabet: a a' b b'
//! states: 3
//! initial: 0
//! finals: 2
//! edge: 0 a 1
//! edge: 1 1 2
//! ```
//!
//! Edge label `1` is ε. Blank lines and `#` comments are ignored.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::words::{Alphabet, EPSILON};

use super::{Nfa, StateId};

pub fn parse_automaton(text: &str) -> Result<Nfa> {
    let mut alphabet: Option<Alphabet> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<StateId> = None;
    let mut finals: Vec<StateId> = Vec::new();
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            return Err(Error::parse(line_no, 1, "expected `key: value`"));
        };
        let col = raw.find(rest).map_or(1, |c| c + 1);
        let num = |tok: &str| -> Result<usize> {
            tok.parse()
                .map_err(|_| Error::parse(line_no, col, format!("expected a state number, got `{tok}`")))
        };
        match key.trim() {
            "alphabet" => {
                alphabet = Some(
                    Alphabet::new(rest.split_whitespace())
                        .map_err(|e| Error::parse(line_no, col, e.to_string()))?,
                )
            }
            "states" => states = Some(num(rest.trim())?),
            "initial" => initial = Some(num(rest.trim())?),
            "finals" => {
                for t in rest.split_whitespace() {
                    finals.push(num(t)?);
                }
            }
            "edge" => {
                let Some(a) = &alphabet else {
                    return Err(Error::parse(line_no, 1, "`edge` before `alphabet`"));
                };
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::parse(line_no, col, "edge needs `src label dst`"));
                }
                let label = if toks[1] == EPSILON {
                    None
                } else {
                    Some(a.lookup(toks[1]).ok_or_else(|| {
                        Error::parse(line_no, col, format!("unknown letter `{}`", toks[1]))
                    })?)
                };
                edges.push((num(toks[0])?, label, num(toks[2])?, line_no));
            }
            other => return Err(Error::parse(line_no, 1, format!("unknown key `{other}`"))),
        }
    }

    let alphabet = alphabet.ok_or_else(|| Error::parse(1, 1, "missing `alphabet:` line"))?;
    let n = states.ok_or_else(|| Error::parse(1, 1, "missing `states:` line"))?;
    let initial = initial.unwrap_or(0);
    for &(s, _, d, line) in &edges {
        if s >= n || d >= n {
            return Err(Error::parse(line, 1, format!("state out of range 0..{n}")));
        }
    }
    Nfa::new(
        &alphabet,
        n,
        initial,
        finals,
        edges.into_iter().map(|(s, l, d, _)| (s, l, d)),
    )
}

pub fn to_text(m: &Nfa) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "alphabet: {}", m.alphabet());
    let _ = writeln!(out, "states: {}", m.num_states());
    let _ = writeln!(out, "initial: {}", m.initial());
    let finals: Vec<String> = m.finals().iter().map(|f| f.to_string()).collect();
    if finals.is_empty() {
        out.push_str("finals:\n");
    } else {
        let _ = writeln!(out, "finals: {}", finals.join(" "));
    }
    for (s, l, d) in m.edges() {
        let name = l.map_or(EPSILON, |l| m.alphabet().name(l));
        let _ = writeln!(out, "edge: {s} {name} {d}");
    }
    out
}

pub fn to_dot(m: &Nfa) -> String {
    let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  start [shape=point];\n");
    for s in 0..m.num_states() {
        let shape = if m.is_final(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  q{s} [shape={shape}];");
    }
    let _ = writeln!(out, "  start -> q{};", m.initial());
    for (s, l, d) in m.edges() {
        let name = l.map_or("ε", |l| m.alphabet().name(l));
        let _ = writeln!(out, "  q{s} -> q{d} [label=\"{name}\"];");
    }
    out.push_str("}\n");
    out
}
