//! Context-free grammars: membership, emptiness, intersection with automata.

use std::collections::HashMap;
use std::fmt::Write;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::rid::RidLanguage;
use crate::words::{Alphabet, InvolutiveAlphabet, Letter, Word, EPSILON};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    T(Letter),
    N(usize),
}

#[derive(Clone, Debug)]
pub struct Cfg {
    terminals: Alphabet,
    nonterminals: Vec<String>,
    start: usize,
    productions: Vec<(usize, Vec<Symbol>)>,
}

impl Cfg {
    pub fn new(
        terminals: &Alphabet,
        nonterminals: Vec<String>,
        start: usize,
        productions: Vec<(usize, Vec<Symbol>)>,
    ) -> Result<Cfg> {
        let n = nonterminals.len();
        if start >= n {
            return Err(Error::Invalid("start symbol is not a nonterminal".into()));
        }
        for (a, rhs) in &productions {
            if *a >= n {
                return Err(Error::Invalid(format!("production head {a} undeclared")));
            }
            for s in rhs {
                match *s {
                    Symbol::N(b) if b >= n => {
                        return Err(Error::Invalid(format!("nonterminal {b} undeclared")))
                    }
                    Symbol::T(l) if !terminals.contains(l) => {
                        return Err(Error::AlphabetMismatch(format!("terminal {} undeclared", l.0)))
                    }
                    _ => {}
                }
            }
        }
        let mut productions = productions;
        productions.sort();
        productions.dedup();
        Ok(Cfg {
            terminals: terminals.clone(),
            nonterminals,
            start,
            productions,
        })
    }

    /// Right-linear grammar of an automaton: a nonterminal per state,
    /// `p → x q` per edge and `f → ε` per final state.
    pub fn from_nfa(m: &Nfa) -> Cfg {
        let names = (0..m.num_states()).map(|s| format!("Q{s}")).collect();
        let mut prods: Vec<(usize, Vec<Symbol>)> = m
            .edges()
            .map(|(s, l, d)| {
                let mut rhs: Vec<Symbol> = l.map(Symbol::T).into_iter().collect();
                rhs.push(Symbol::N(d));
                (s, rhs)
            })
            .collect();
        prods.extend(m.finals().iter().map(|&f| (f, vec![])));
        Cfg::new(m.alphabet(), names, m.initial(), prods).expect("automaton grammar is well formed")
    }

    pub fn terminals(&self) -> &Alphabet {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn productions(&self) -> &[(usize, Vec<Symbol>)] {
        &self.productions
    }

    /// Nonterminals deriving some terminal word.
    pub fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for (a, rhs) in &self.productions {
                if !prod[*a]
                    && rhs.iter().all(|s| match s {
                        Symbol::T(_) => true,
                        Symbol::N(b) => prod[*b],
                    })
                {
                    prod[*a] = true;
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    /// Nonterminals deriving ε.
    pub fn nullable(&self) -> Vec<bool> {
        let mut null = vec![false; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for (a, rhs) in &self.productions {
                if !null[*a] && rhs.iter().all(|s| matches!(s, Symbol::N(b) if null[*b])) {
                    null[*a] = true;
                    changed = true;
                }
            }
            if !changed {
                return null;
            }
        }
    }

    /// Keeps productive nonterminals reachable from the start through
    /// productive productions; renumbers with the start first.
    pub fn trim(&self) -> Cfg {
        let prod = self.productive();
        let useful = |rhs: &[Symbol]| {
            rhs.iter().all(|s| match s {
                Symbol::T(_) => true,
                Symbol::N(b) => prod[*b],
            })
        };
        let n = self.nonterminals.len();
        let mut by_head: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, (a, rhs)) in self.productions.iter().enumerate() {
            if prod[*a] && useful(rhs) {
                by_head[*a].push(i);
            }
        }
        let mut map = vec![usize::MAX; n];
        let mut order = vec![self.start];
        map[self.start] = 0;
        let mut k = 0;
        while k < order.len() {
            let a = order[k];
            k += 1;
            for &pi in &by_head[a] {
                for s in &self.productions[pi].1 {
                    if let Symbol::N(b) = *s {
                        if map[b] == usize::MAX {
                            map[b] = order.len();
                            order.push(b);
                        }
                    }
                }
            }
        }
        let names = order.iter().map(|&a| self.nonterminals[a].clone()).collect();
        let mut prods = Vec::new();
        for &a in &order {
            for &pi in &by_head[a] {
                let rhs = self.productions[pi]
                    .1
                    .iter()
                    .map(|s| match *s {
                        Symbol::N(b) => Symbol::N(map[b]),
                        t => t,
                    })
                    .collect();
                prods.push((map[a], rhs));
            }
        }
        Cfg::new(&self.terminals, names, 0, prods).expect("trimmed grammar is well formed")
    }

    /// Equivalent grammar with right-hand sides of length at most two.
    pub fn binarize(&self) -> Cfg {
        let mut names = self.nonterminals.clone();
        let mut prods = Vec::new();
        for (a, rhs) in &self.productions {
            if rhs.len() <= 2 {
                prods.push((*a, rhs.clone()));
                continue;
            }
            let mut head = *a;
            for (i, s) in rhs.iter().enumerate().take(rhs.len() - 2) {
                let fresh = names.len();
                names.push(format!("{}#{}", self.nonterminals[*a], i));
                prods.push((head, vec![*s, Symbol::N(fresh)]));
                head = fresh;
            }
            prods.push((head, rhs[rhs.len() - 2..].to_vec()));
        }
        Cfg::new(&self.terminals, names, self.start, prods).expect("binarized grammar is well formed")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "terminals: {}", self.terminals);
        let _ = writeln!(out, "nonterminals: {}", self.nonterminals.join(" "));
        let _ = writeln!(out, "start: {}", self.nonterminals[self.start]);
        for (a, rhs) in &self.productions {
            let body: Vec<&str> = rhs
                .iter()
                .map(|s| match *s {
                    Symbol::T(l) => self.terminals.name(l),
                    Symbol::N(b) => self.nonterminals[b].as_str(),
                })
                .collect();
            let body = if body.is_empty() { EPSILON.to_string() } else { body.join(" ") };
            let _ = writeln!(out, "prod: {} -> {}", self.nonterminals[*a], body);
        }
        out
    }
}

/// Parses `terminals:` / `nonterminals:` / `start:` / `prod: A -> x y` lines.
pub fn parse_cfg(text: &str) -> Result<Cfg> {
    let mut terminals: Option<Alphabet> = None;
    let mut names: Vec<String> = Vec::new();
    let mut start: Option<String> = None;
    let mut raw_prods: Vec<(usize, String, Vec<String>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            return Err(Error::parse(ln, 1, "expected `key: value`"));
        };
        match key.trim() {
            "terminals" => {
                terminals = Some(Alphabet::new(rest.split_whitespace()).map_err(|e| Error::parse(ln, 1, e.to_string()))?)
            }
            "nonterminals" => names = rest.split_whitespace().map(str::to_string).collect(),
            "start" => start = Some(rest.trim().to_string()),
            "prod" => {
                let Some((head, body)) = rest.split_once("->") else {
                    return Err(Error::parse(ln, 1, "production needs `->`"));
                };
                let body = body
                    .split_whitespace()
                    .filter(|t| *t != EPSILON)
                    .map(str::to_string)
                    .collect();
                raw_prods.push((ln, head.trim().to_string(), body));
            }
            other => return Err(Error::parse(ln, 1, format!("unknown key `{other}`"))),
        }
    }
    let terminals = terminals.ok_or_else(|| Error::parse(1, 1, "missing `terminals:`"))?;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    for n in &names {
        if terminals.lookup(n).is_some() {
            return Err(Error::Invalid(format!("`{n}` is both a terminal and a nonterminal")));
        }
    }
    let start = start.ok_or_else(|| Error::parse(1, 1, "missing `start:`"))?;
    let start = *index
        .get(start.as_str())
        .ok_or_else(|| Error::Invalid(format!("start `{start}` undeclared")))?;
    let mut prods = Vec::new();
    for (ln, head, body) in raw_prods {
        let a = *index
            .get(head.as_str())
            .ok_or_else(|| Error::parse(ln, 1, format!("undeclared nonterminal `{head}`")))?;
        let mut rhs = Vec::new();
        for t in body {
            if let Some(&b) = index.get(t.as_str()) {
                rhs.push(Symbol::N(b));
            } else if let Some(l) = terminals.lookup(&t) {
                rhs.push(Symbol::T(l));
            } else {
                return Err(Error::parse(ln, 1, format!("unknown symbol `{t}`")));
            }
        }
        prods.push((a, rhs));
    }
    Cfg::new(&terminals, names, start, prods)
}

/// Whether `start ⇒* w`: binarization, then a span table where each span is
/// closed under ε-padding and unit productions.
pub fn cfg_member(g: &Cfg, w: &Word) -> bool {
    let g = g.binarize();
    let n = g.nonterminals.len();
    let null = g.nullable();
    let len = w.len();
    if len == 0 {
        return null[g.start];
    }
    let letters = w.letters();
    // table[i][j]: nonterminals deriving w[i..j], for i < j
    let mut table = vec![vec![vec![false; n]; len + 1]; len + 1];
    let matches = |s: &Symbol, i: usize, j: usize, table: &Vec<Vec<Vec<bool>>>| -> bool {
        match *s {
            Symbol::T(l) => j == i + 1 && letters[i] == l,
            Symbol::N(b) => table[i][j][b],
        }
    };
    let nullsym = |s: &Symbol| matches!(s, Symbol::N(b) if null[*b]);
    for span in 1..=len {
        for i in 0..=(len - span) {
            let j = i + span;
            loop {
                let mut changed = false;
                for (a, rhs) in &g.productions {
                    if table[i][j][*a] {
                        continue;
                    }
                    let hit = match rhs.len() {
                        0 => false,
                        1 => matches(&rhs[0], i, j, &table),
                        _ => {
                            let (x, y) = (&rhs[0], &rhs[1]);
                            (i + 1..j).any(|k| matches(x, i, k, &table) && matches(y, k, j, &table))
                                || (nullsym(x) && matches(y, i, j, &table))
                                || (nullsym(y) && matches(x, i, j, &table))
                        }
                    };
                    if hit {
                        table[i][j][*a] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
    }
    table[0][len][g.start]
}

/// `L(g) ∩ L(m)` by the triple construction on the binarized grammar.
pub fn cfg_intersect_nfa(g: &Cfg, m: &Nfa) -> Result<Cfg> {
    g.terminals.ensure_same(m.alphabet(), "grammar intersection")?;
    let g = g.binarize();
    let q = m.num_states();
    let closure: Vec<Vec<bool>> = (0..q).map(|p| m.read_from(&[p], &[])).collect();
    // letter steps with ε-moves on both sides
    let mut step: HashMap<Letter, Vec<Vec<bool>>> = HashMap::new();
    for l in m.letters_used() {
        step.insert(l, (0..q).map(|p| m.read_from(&[p], &[l])).collect());
    }
    let nn = g.nonterminals.len();
    let triple = |p: usize, a: usize, r: usize| 1 + (p * nn + a) * q + r;
    let leaf_base = 1 + q * nn * q;
    let mut names: Vec<String> = Vec::new();
    names.push("S".into());
    for p in 0..q {
        for a in 0..nn {
            for r in 0..q {
                names.push(format!("[{p},{},{r}]", g.nonterminals[a]));
            }
        }
    }
    let letters: Vec<Letter> = step.keys().copied().collect();
    let mut leaf_index: HashMap<(usize, Letter, usize), usize> = HashMap::new();
    let mut prods: Vec<(usize, Vec<Symbol>)> = Vec::new();
    for &l in &letters {
        let st = &step[&l];
        for p in 0..q {
            for r in 0..q {
                if st[p][r] {
                    let id = leaf_base + leaf_index.len();
                    leaf_index.insert((p, l, r), id);
                    names.push(format!("[{p},{},{r}]", g.terminals.name(l)));
                    prods.push((id, vec![Symbol::T(l)]));
                }
            }
        }
    }
    let sym = |s: &Symbol, p: usize, r: usize| -> Option<Symbol> {
        match *s {
            Symbol::N(b) => Some(Symbol::N(triple(p, b, r))),
            Symbol::T(l) => leaf_index.get(&(p, l, r)).map(|&id| Symbol::N(id)),
        }
    };
    for (a, rhs) in &g.productions {
        match rhs.len() {
            0 => {
                for p in 0..q {
                    for r in (0..q).filter(|&r| closure[p][r]) {
                        prods.push((triple(p, *a, r), vec![]));
                    }
                }
            }
            1 => {
                for p in 0..q {
                    for r in 0..q {
                        if let Some(s) = sym(&rhs[0], p, r) {
                            prods.push((triple(p, *a, r), vec![s]));
                        }
                    }
                }
            }
            _ => {
                for p in 0..q {
                    for k in 0..q {
                        let Some(x) = sym(&rhs[0], p, k) else { continue };
                        for r in 0..q {
                            if let Some(y) = sym(&rhs[1], k, r) {
                                prods.push((triple(p, *a, r), vec![x, y]));
                            }
                        }
                    }
                }
            }
        }
    }
    for &f in m.finals() {
        prods.push((0, vec![Symbol::N(triple(m.initial(), g.start, f))]));
    }
    Ok(Cfg::new(&g.terminals, names, 0, prods)?.trim())
}

pub fn cfg_empty(g: &Cfg) -> bool {
    !g.productive()[g.start]
}

pub fn rid_cfg(g: &Cfg) -> RidLanguage {
    let g2 = g.clone();
    RidLanguage::new(g.terminals(), "context-free", move |r: &Nfa| {
        Ok(!cfg_empty(&cfg_intersect_nfa(&g2, r)?))
    })
}

/// `S → ε | S S | x S x'` for every letter `x`: the words reducing to 1.
pub fn free_word_problem_cfg(a: &InvolutiveAlphabet) -> Result<Cfg> {
    if !a.is_fixed_point_free() {
        return Err(Error::InvalidAlphabet("involution has fixed points".into()));
    }
    let mut prods = vec![(0, vec![]), (0, vec![Symbol::N(0), Symbol::N(0)])];
    for x in a.alphabet().letters() {
        prods.push((0, vec![Symbol::T(x), Symbol::N(0), Symbol::T(a.inverse(x))]));
    }
    Cfg::new(a.alphabet(), vec!["S".into()], 0, prods)
}
