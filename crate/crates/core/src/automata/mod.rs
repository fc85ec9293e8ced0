//! Nondeterministic finite automata and finite transducers.
//!
//! An [`Nfa`] has a single initial state and letter-or-ε edge labels. The edge
//! table sits behind an `Arc` so re-rooting (new initial state and finals) is
//! cheap; saturation relies on that heavily.

mod expr;
mod text;
mod transducer;

pub use expr::{compile, compile_str, parse_expr, Expr};
pub use text::{parse_automaton, to_dot, to_text};
pub use transducer::{transducer_image, transducer_preimage, Transducer, TransducerBuilder};

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Morphism, Word};

pub type StateId = usize;

/// `None` is ε.
pub type Label = Option<Letter>;

#[derive(Clone)]
pub struct Nfa {
    alphabet: Alphabet,
    edges: Arc<Vec<Vec<(Label, StateId)>>>,
    initial: StateId,
    finals: Vec<StateId>,
}

/// Incremental construction of an [`Nfa`].
pub struct NfaBuilder {
    alphabet: Alphabet,
    edges: Vec<Vec<(Label, StateId)>>,
    initial: StateId,
    finals: Vec<StateId>,
}

impl NfaBuilder {
    pub fn new(alphabet: &Alphabet) -> Self {
        NfaBuilder {
            alphabet: alphabet.clone(),
            edges: Vec::new(),
            initial: 0,
            finals: Vec::new(),
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    pub fn add_states(&mut self, n: usize) -> StateId {
        let first = self.edges.len();
        self.edges.resize_with(first + n, Vec::new);
        first
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, src: StateId, label: Label, dst: StateId) {
        self.edges[src].push((label, dst));
    }

    /// Adds a path spelling `word` from `src` to `dst`, with fresh inner states.
    pub fn add_word(&mut self, src: StateId, word: &[Letter], dst: StateId) {
        match word.len() {
            0 => self.add_edge(src, None, dst),
            1 => self.add_edge(src, Some(word[0]), dst),
            n => {
                let mut cur = src;
                for (i, &l) in word.iter().enumerate() {
                    let next = if i + 1 == n { dst } else { self.add_state() };
                    self.add_edge(cur, Some(l), next);
                    cur = next;
                }
            }
        }
    }

    pub fn set_initial(&mut self, s: StateId) {
        self.initial = s;
    }

    pub fn add_final(&mut self, s: StateId) {
        self.finals.push(s);
    }

    pub fn build(mut self) -> Nfa {
        if self.edges.is_empty() {
            self.edges.push(Vec::new());
        }
        for out in &mut self.edges {
            out.sort_unstable();
            out.dedup();
        }
        self.finals.sort_unstable();
        self.finals.dedup();
        Nfa {
            alphabet: self.alphabet,
            edges: Arc::new(self.edges),
            initial: self.initial,
            finals: self.finals,
        }
    }
}

impl Nfa {
    /// Validated constructor from an explicit edge list.
    pub fn new(
        alphabet: &Alphabet,
        num_states: usize,
        initial: StateId,
        finals: impl IntoIterator<Item = StateId>,
        edges: impl IntoIterator<Item = (StateId, Label, StateId)>,
    ) -> Result<Nfa> {
        if num_states == 0 {
            return Err(Error::Invalid("automaton needs at least one state".into()));
        }
        let check = |s: StateId| {
            if s < num_states {
                Ok(s)
            } else {
                Err(Error::Invalid(format!("state {s} out of range 0..{num_states}")))
            }
        };
        let mut b = NfaBuilder::new(alphabet);
        b.add_states(num_states);
        b.set_initial(check(initial)?);
        for f in finals {
            b.add_final(check(f)?);
        }
        for (s, l, d) in edges {
            if let Some(l) = l {
                if !alphabet.contains(l) {
                    return Err(Error::AlphabetMismatch(format!("edge label {} outside alphabet", l.0)));
                }
            }
            b.add_edge(check(s)?, l, check(d)?);
        }
        Ok(b.build())
    }

    /// The empty language.
    pub fn empty(alphabet: &Alphabet) -> Nfa {
        NfaBuilder::new(alphabet).build()
    }

    /// Exactly `{w}`.
    pub fn singleton(alphabet: &Alphabet, w: &Word) -> Nfa {
        let mut b = NfaBuilder::new(alphabet);
        let s = b.add_state();
        if w.is_empty() {
            b.add_final(s);
        } else {
            let f = b.add_state();
            b.add_word(s, w.letters(), f);
            b.add_final(f);
        }
        b.build()
    }

    /// The finite language given by `words`.
    pub fn from_words<'a>(alphabet: &Alphabet, words: impl IntoIterator<Item = &'a Word>) -> Nfa {
        let mut b = NfaBuilder::new(alphabet);
        let s = b.add_state();
        let f = b.add_state();
        for w in words {
            b.add_word(s, w.letters(), f);
        }
        b.add_final(f);
        b.build()
    }

    /// All words over the alphabet.
    pub fn universal(alphabet: &Alphabet) -> Nfa {
        Self::universal_over(alphabet, alphabet.letters())
    }

    /// All words over the given letters.
    pub fn universal_over(alphabet: &Alphabet, letters: impl IntoIterator<Item = Letter>) -> Nfa {
        let mut b = NfaBuilder::new(alphabet);
        let s = b.add_state();
        for l in letters {
            b.add_edge(s, Some(l), s);
        }
        b.add_final(s);
        b.build()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &[StateId] {
        &self.finals
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals.binary_search(&s).is_ok()
    }

    pub fn edges_from(&self, s: StateId) -> &[(Label, StateId)] {
        &self.edges[s]
    }

    pub fn edges(&self) -> impl Iterator<Item = (StateId, Label, StateId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |&(l, d)| (s, l, d)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, src: StateId, label: Label, dst: StateId) -> bool {
        self.edges[src].binary_search(&(label, dst)).is_ok()
    }

    /// Same edges, new initial state and finals.
    pub fn with_root(&self, initial: StateId, finals: impl IntoIterator<Item = StateId>) -> Nfa {
        let mut finals: Vec<StateId> = finals.into_iter().collect();
        finals.sort_unstable();
        finals.dedup();
        Nfa {
            alphabet: self.alphabet.clone(),
            edges: Arc::clone(&self.edges),
            initial,
            finals,
        }
    }

    /// Inserts an edge, copying the table if it is shared. Returns false if
    /// the edge was already present.
    pub(crate) fn insert_edge(&mut self, src: StateId, label: Label, dst: StateId) -> bool {
        let edges = Arc::make_mut(&mut self.edges);
        match edges[src].binary_search(&(label, dst)) {
            Ok(_) => false,
            Err(pos) => {
                edges[src].insert(pos, (label, dst));
                true
            }
        }
    }

    /// Adds every ε-successor of the marked states.
    pub fn eps_close(&self, set: &mut [bool]) {
        let mut stack: Vec<StateId> = (0..set.len()).filter(|&s| set[s]).collect();
        while let Some(s) = stack.pop() {
            for &(l, d) in &self.edges[s] {
                if l.is_some() {
                    break;
                }
                if !set[d] {
                    set[d] = true;
                    stack.push(d);
                }
            }
        }
    }

    fn step(&self, set: &[bool], letter: Letter) -> Vec<bool> {
        let mut next = vec![false; set.len()];
        for s in (0..set.len()).filter(|&s| set[s]) {
            for &(l, d) in &self.edges[s] {
                if l == Some(letter) {
                    next[d] = true;
                }
            }
        }
        self.eps_close(&mut next);
        next
    }

    /// States reachable from `from` by reading `w` (ε-moves free).
    pub fn read_from(&self, from: &[StateId], w: &[Letter]) -> Vec<bool> {
        let mut set = vec![false; self.num_states()];
        for &s in from {
            set[s] = true;
        }
        self.eps_close(&mut set);
        for &l in w {
            set = self.step(&set, l);
        }
        set
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let set = self.read_from(&[self.initial], w.letters());
        self.finals.iter().any(|&f| set[f])
    }

    /// States reachable from `s` along any edges.
    pub fn reachable_from(&self, starts: &[StateId]) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = Vec::new();
        for &s in starts {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for &(_, d) in &self.edges[s] {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen
    }

    /// States from which some state in `targets` is reachable.
    pub fn coreachable_to(&self, targets: &[StateId]) -> Vec<bool> {
        let rev = self.reverse_adjacency();
        let mut seen = vec![false; self.num_states()];
        let mut stack = Vec::new();
        for &t in targets {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
        while let Some(s) = stack.pop() {
            for &(_, p) in &rev[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    pub fn reverse_adjacency(&self) -> Vec<Vec<(Label, StateId)>> {
        let mut rev = vec![Vec::new(); self.num_states()];
        for (s, l, d) in self.edges() {
            rev[d].push((l, s));
        }
        rev
    }

    pub fn is_empty(&self) -> bool {
        if self.finals.is_empty() {
            return true;
        }
        let seen = self.reachable_from(&[self.initial]);
        !self.finals.iter().any(|&f| seen[f])
    }

    /// Restricts to accessible and co-accessible states (the initial state is
    /// always kept). State ids are renumbered in increasing order.
    pub fn trim(&self) -> Nfa {
        let acc = self.reachable_from(&[self.initial]);
        let co = self.coreachable_to(&self.finals);
        let keep: Vec<bool> = (0..self.num_states())
            .map(|s| s == self.initial || (acc[s] && co[s]))
            .collect();
        let mut map = vec![usize::MAX; self.num_states()];
        let mut b = NfaBuilder::new(&self.alphabet);
        for s in 0..self.num_states() {
            if keep[s] {
                map[s] = b.add_state();
            }
        }
        for (s, l, d) in self.edges() {
            if keep[s] && keep[d] {
                b.add_edge(map[s], l, map[d]);
            }
        }
        b.set_initial(map[self.initial]);
        for &f in &self.finals {
            if keep[f] {
                b.add_final(map[f]);
            }
        }
        b.build()
    }

    /// Drops every edge whose letter fails `keep` (ε-edges stay).
    pub fn restrict_letters(&self, keep: impl Fn(Letter) -> bool) -> Nfa {
        let edges = self
            .edges
            .iter()
            .map(|out| {
                out.iter()
                    .copied()
                    .filter(|(l, _)| l.map_or(true, &keep))
                    .collect()
            })
            .collect();
        Nfa {
            alphabet: self.alphabet.clone(),
            edges: Arc::new(edges),
            initial: self.initial,
            finals: self.finals.clone(),
        }
    }

    /// Letters that label some edge.
    pub fn letters_used(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = self.edges().filter_map(|(_, l, _)| l).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Successors of the product state `(p, q)`.
    fn product_moves(&self, other: &Nfa, p: StateId, q: StateId, out: &mut Vec<(Label, (StateId, StateId))>) {
        let (e1, e2) = (&self.edges[p], &other.edges[q]);
        let i0 = e1.partition_point(|(l, _)| l.is_none());
        let j0 = e2.partition_point(|(l, _)| l.is_none());
        for &(_, d) in &e1[..i0] {
            out.push((None, (d, q)));
        }
        for &(_, d) in &e2[..j0] {
            out.push((None, (p, d)));
        }
        // merge-join on letter labels; both lists are sorted
        let (mut i, mut j) = (i0, j0);
        while i < e1.len() && j < e2.len() {
            let (la, lb) = (e1[i].0, e2[j].0);
            if la < lb {
                i += 1;
            } else if lb < la {
                j += 1;
            } else {
                let i_end = i + e1[i..].iter().take_while(|(l, _)| *l == la).count();
                let j_end = j + e2[j..].iter().take_while(|(l, _)| *l == la).count();
                for a in &e1[i..i_end] {
                    for c in &e2[j..j_end] {
                        out.push((la, (a.1, c.1)));
                    }
                }
                i = i_end;
                j = j_end;
            }
        }
    }

    pub fn intersect(&self, other: &Nfa) -> Result<Nfa> {
        self.alphabet.ensure_same(&other.alphabet, "intersect")?;
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut b = NfaBuilder::new(&self.alphabet);
        let mut queue = VecDeque::new();
        let start = (self.initial, other.initial);
        index.insert(start, b.add_state());
        queue.push_back(start);
        let mut moves = Vec::new();
        while let Some((p, q)) = queue.pop_front() {
            let src = index[&(p, q)];
            if self.is_final(p) && other.is_final(q) {
                b.add_final(src);
            }
            moves.clear();
            self.product_moves(other, p, q, &mut moves);
            for &(l, pair) in &moves {
                let dst = match index.get(&pair) {
                    Some(&d) => d,
                    None => {
                        let d = b.add_state();
                        index.insert(pair, d);
                        queue.push_back(pair);
                        d
                    }
                };
                b.add_edge(src, l, dst);
            }
        }
        b.set_initial(0);
        Ok(b.build())
    }

    /// Whether the two languages share a word; stops at the first witness.
    pub fn meets(&self, other: &Nfa) -> Result<bool> {
        self.alphabet.ensure_same(&other.alphabet, "intersect")?;
        if self.finals.is_empty() || other.finals.is_empty() {
            return Ok(false);
        }
        let n2 = other.num_states();
        let mut seen = vec![false; self.num_states() * n2];
        let mut stack = vec![(self.initial, other.initial)];
        seen[self.initial * n2 + other.initial] = true;
        let mut moves = Vec::new();
        while let Some((p, q)) = stack.pop() {
            if self.is_final(p) && other.is_final(q) {
                return Ok(true);
            }
            moves.clear();
            self.product_moves(other, p, q, &mut moves);
            for &(_, (a, c)) in &moves {
                if !seen[a * n2 + c] {
                    seen[a * n2 + c] = true;
                    stack.push((a, c));
                }
            }
        }
        Ok(false)
    }

    /// For each state `q` of `self`: whether some word leads from `from` to
    /// `q` in `self` and from the initial state to a final state in `other`.
    pub fn meets_from(&self, from: StateId, other: &Nfa) -> Vec<bool> {
        let n2 = other.num_states();
        let mut hit = vec![false; self.num_states()];
        let mut seen = vec![false; self.num_states() * n2];
        let mut stack = vec![(from, other.initial)];
        seen[from * n2 + other.initial] = true;
        let mut moves = Vec::new();
        while let Some((p, q)) = stack.pop() {
            if other.is_final(q) {
                hit[p] = true;
            }
            moves.clear();
            self.product_moves(other, p, q, &mut moves);
            for &(_, (a, c)) in &moves {
                if !seen[a * n2 + c] {
                    seen[a * n2 + c] = true;
                    stack.push((a, c));
                }
            }
        }
        hit
    }

    /// Copies `self` into a builder, returning the state offset.
    fn copy_into(&self, b: &mut NfaBuilder) -> StateId {
        let off = b.add_states(self.num_states());
        for (s, l, d) in self.edges() {
            b.add_edge(s + off, l, d + off);
        }
        off
    }

    pub fn union(&self, other: &Nfa) -> Result<Nfa> {
        self.alphabet.ensure_same(&other.alphabet, "union")?;
        let mut b = NfaBuilder::new(&self.alphabet);
        let root = b.add_state();
        let o1 = self.copy_into(&mut b);
        let o2 = other.copy_into(&mut b);
        b.add_edge(root, None, self.initial + o1);
        b.add_edge(root, None, other.initial + o2);
        b.set_initial(root);
        for &f in &self.finals {
            b.add_final(f + o1);
        }
        for &f in &other.finals {
            b.add_final(f + o2);
        }
        Ok(b.build())
    }

    pub fn concat(&self, other: &Nfa) -> Result<Nfa> {
        self.alphabet.ensure_same(&other.alphabet, "concat")?;
        let mut b = NfaBuilder::new(&self.alphabet);
        let o1 = self.copy_into(&mut b);
        let o2 = other.copy_into(&mut b);
        for &f in &self.finals {
            b.add_edge(f + o1, None, other.initial + o2);
        }
        b.set_initial(self.initial + o1);
        for &f in &other.finals {
            b.add_final(f + o2);
        }
        Ok(b.build())
    }

    pub fn star(&self) -> Nfa {
        let mut b = NfaBuilder::new(&self.alphabet);
        let root = b.add_state();
        let o = self.copy_into(&mut b);
        b.add_edge(root, None, self.initial + o);
        for &f in &self.finals {
            b.add_edge(f + o, None, root);
        }
        b.set_initial(root);
        b.add_final(root);
        b.build()
    }

    /// `w · L`.
    pub fn left_translate(&self, w: &Word) -> Result<Nfa> {
        self.alphabet.check_word(w)?;
        if w.is_empty() {
            return Ok(self.clone());
        }
        let mut b = NfaBuilder::new(&self.alphabet);
        let root = b.add_state();
        let o = self.copy_into(&mut b);
        b.add_word(root, w.letters(), self.initial + o);
        b.set_initial(root);
        for &f in &self.finals {
            b.add_final(f + o);
        }
        Ok(b.build())
    }

    /// `L · w`.
    pub fn right_translate(&self, w: &Word) -> Result<Nfa> {
        self.alphabet.check_word(w)?;
        if w.is_empty() {
            return Ok(self.clone());
        }
        let mut b = NfaBuilder::new(&self.alphabet);
        let o = self.copy_into(&mut b);
        let hub = b.add_state();
        let end = b.add_state();
        for &f in &self.finals {
            b.add_edge(f + o, None, hub);
        }
        b.add_word(hub, w.letters(), end);
        b.set_initial(self.initial + o);
        b.add_final(end);
        Ok(b.build())
    }

    pub fn reverse(&self) -> Nfa {
        let mut b = NfaBuilder::new(&self.alphabet);
        let o = b.add_states(self.num_states());
        let root = b.add_state();
        for (s, l, d) in self.edges() {
            b.add_edge(d + o, l, s + o);
        }
        for &f in &self.finals {
            b.add_edge(root, None, f + o);
        }
        b.set_initial(root);
        b.add_final(self.initial + o);
        b.build()
    }

    /// `{ w : prefix · w · suffix ∈ L }`, by re-rooting.
    pub fn quotient(&self, prefix: &Word, suffix: &Word) -> Result<Nfa> {
        self.alphabet.check_word(prefix)?;
        self.alphabet.check_word(suffix)?;
        let n = self.num_states();
        let finals: Vec<StateId> = if suffix.is_empty() {
            self.finals.clone()
        } else {
            let rev = self.reverse();
            let rw: Vec<Letter> = suffix.letters().iter().rev().copied().collect();
            let set = rev.read_from(&[rev.initial], &rw);
            (0..n).filter(|&s| set[s]).collect()
        };
        if prefix.is_empty() {
            return Ok(self.with_root(self.initial, finals));
        }
        let set = self.read_from(&[self.initial], prefix.letters());
        let starts: Vec<StateId> = (0..n).filter(|&s| set[s]).collect();
        if starts.len() == 1 {
            return Ok(self.with_root(starts[0], finals));
        }
        let mut edges = (*self.edges).clone();
        edges.push(starts.iter().map(|&s| (None, s)).collect());
        Ok(Nfa {
            alphabet: self.alphabet.clone(),
            edges: Arc::new(edges),
            initial: n,
            finals,
        })
    }

    /// Image under a letter-to-word morphism.
    pub fn relabel(&self, h: &Morphism) -> Result<Nfa> {
        self.alphabet.ensure_same(h.source(), "relabel")?;
        let mut b = NfaBuilder::new(h.target());
        b.add_states(self.num_states());
        for (s, l, d) in self.edges() {
            match l {
                None => b.add_edge(s, None, d),
                Some(l) => b.add_word(s, h.image(l).letters(), d),
            }
        }
        b.set_initial(self.initial);
        for &f in &self.finals {
            b.add_final(f);
        }
        Ok(b.build())
    }

    /// Reinterprets the automaton over another alphabet via a letter map.
    pub fn recode(&self, target: &Alphabet, map: impl Fn(Letter) -> Letter) -> Nfa {
        let edges = self
            .edges
            .iter()
            .map(|out| {
                let mut v: Vec<(Label, StateId)> =
                    out.iter().map(|&(l, d)| (l.map(&map), d)).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        Nfa {
            alphabet: target.clone(),
            edges: Arc::new(edges),
            initial: self.initial,
            finals: self.finals.clone(),
        }
    }

    /// Every accepted word of length at most `max_len`, sorted shortlex.
    pub fn enumerate(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut frontier: Vec<(Vec<Letter>, Vec<bool>)> =
            vec![(Vec::new(), self.read_from(&[self.initial], &[]))];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (w, set) in frontier {
                if self.finals.iter().any(|&f| set[f]) {
                    out.push(Word(w.clone()));
                }
                if len == max_len || !set.iter().any(|&b| b) {
                    continue;
                }
                for l in self.alphabet.letters() {
                    let s2 = self.step(&set, l);
                    if s2.iter().any(|&b| b) {
                        let mut w2 = w.clone();
                        w2.push(l);
                        next.push((w2, s2));
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

impl std::fmt::Debug for Nfa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&to_text(self))
    }
}

pub fn accepts(m: &Nfa, w: &Word) -> bool {
    m.accepts(w)
}

pub fn is_empty(m: &Nfa) -> bool {
    m.is_empty()
}

pub fn intersect(m1: &Nfa, m2: &Nfa) -> Result<Nfa> {
    m1.intersect(m2)
}

pub fn quotient(m: &Nfa, prefix: &Word, suffix: &Word) -> Result<Nfa> {
    m.quotient(prefix, suffix)
}

pub fn relabel(m: &Nfa, h: &Morphism) -> Result<Nfa> {
    m.relabel(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn w(a: &Alphabet, s: &str) -> Word {
        a.parse_word(s).unwrap()
    }

    fn all_words(a: &Alphabet, max_len: usize) -> Vec<Word> {
        Nfa::universal(a).enumerate(max_len)
    }

    #[test]
    fn compile_examples() {
        let a = ab();
        let m = compile_str("(a b)*", &a).unwrap();
        assert!(m.accepts(&w(&a, "a b a b")));
        assert!(m.accepts(&w(&a, "1")));
        assert!(!m.accepts(&w(&a, "b a")));
        let e = compile_str("1", &a).unwrap();
        assert_eq!(e.enumerate(3), vec![Word::empty()]);
        let u = compile_str("a | b b", &a).unwrap();
        assert!(u.accepts(&w(&a, "b b")));
        assert!(!u.accepts(&w(&a, "a b")));
    }

    #[test]
    fn emptiness_examples() {
        let a = ab();
        assert!(!compile_str("a", &a).unwrap().is_empty());
        assert!(Nfa::new(&a, 1, 0, [], []).unwrap().is_empty());
        let unreachable = Nfa::new(&a, 2, 0, [1], []).unwrap();
        assert!(unreachable.is_empty());
    }

    #[test]
    fn intersect_examples() {
        let a = ab();
        let m = compile_str("(a b)*", &a).unwrap();
        let n = compile_str("a b", &a).unwrap();
        assert_eq!(m.intersect(&n).unwrap().enumerate(6), vec![w(&a, "a b")]);
        let eps = compile_str("1", &a).unwrap();
        assert_eq!(m.intersect(&eps).unwrap().enumerate(4), vec![Word::empty()]);
        let one_b = compile_str("(a|b)*", &a)
            .unwrap()
            .intersect(&compile_str("a* b a*", &a).unwrap())
            .unwrap();
        let b = a.letter("b").unwrap();
        for x in all_words(&a, 4) {
            let count = x.letters().iter().filter(|l| **l == b).count();
            assert_eq!(one_b.accepts(&x), count == 1, "{}", a.spell(&x));
        }
    }

    #[test]
    fn rational_op_examples() {
        let a = crate::words::InvolutiveAlphabet::from_generators(["a", "b"]).unwrap();
        let al = a.alphabet();
        let u = compile_str("a", al).unwrap().union(&compile_str("b", al).unwrap()).unwrap();
        assert!(u.accepts(&w(al, "a")) && u.accepts(&w(al, "b")) && !u.accepts(&Word::empty()));
        let t = compile_str("1", al).unwrap().left_translate(&w(al, "a b'")).unwrap();
        assert_eq!(t.enumerate(4), vec![w(al, "a b'")]);
        let s = compile_str("a a", al).unwrap().star();
        assert!(s.accepts(&w(al, "a a a a")));
        assert!(!s.accepts(&w(al, "a a a")));
        let r = compile_str("a b'", al).unwrap().right_translate(&w(al, "b")).unwrap();
        assert_eq!(r.enumerate(4), vec![w(al, "a b' b")]);
        let rev = compile_str("a b' b'", al).unwrap().reverse();
        assert_eq!(rev.enumerate(4), vec![w(al, "b' b' a")]);
        let c = compile_str("a", al).unwrap().concat(&compile_str("b*", al).unwrap()).unwrap();
        assert!(c.accepts(&w(al, "a b b")) && !c.accepts(&w(al, "b")));
    }

    #[test]
    fn quotient_examples() {
        let a = Alphabet::new(["a", "b", "y", "y'"]).unwrap();
        let m = compile_str("y a y'", &a).unwrap();
        let q = m.quotient(&w(&a, "y"), &w(&a, "y'")).unwrap();
        assert_eq!(q.enumerate(4), vec![w(&a, "a")]);
        let same = m.quotient(&Word::empty(), &Word::empty()).unwrap();
        assert_eq!(same.enumerate(4), m.enumerate(4));
        let m = compile_str("y (a|b b) y'", &a).unwrap();
        let q = m.quotient(&w(&a, "y"), &w(&a, "y'")).unwrap();
        assert_eq!(q.enumerate(3), vec![w(&a, "a"), w(&a, "b b")]);
    }

    #[test]
    fn relabel_examples() {
        let ys = Alphabet::new(["y"]).unwrap();
        let ts = Alphabet::new(["t"]).unwrap();
        let h = Morphism::from_spellings(&ys, &ts, &[("y", "t t")]).unwrap();
        let m = compile_str("y", &ys).unwrap().relabel(&h).unwrap();
        assert_eq!(m.enumerate(4), vec![w(&ts, "t t")]);
        let id = Morphism::identity(&ys);
        let s = compile_str("y*", &ys).unwrap();
        assert_eq!(s.relabel(&id).unwrap().enumerate(4), s.enumerate(4));
        let ev = s.relabel(&h).unwrap();
        for n in 0..=6 {
            assert_eq!(ev.accepts(&Word(vec![Letter(0); n])), n % 2 == 0);
        }
    }

    fn arb_nfa(max_states: usize) -> impl Strategy<Value = Nfa> {
        (1..=max_states).prop_flat_map(|n| {
            (
                prop::collection::vec((0..n, prop::option::weighted(0.85, 0u32..2), 0..n), 0..(3 * n)),
                prop::collection::vec(0..n, 0..=n),
            )
                .prop_map(move |(edges, finals)| {
                    let a = Alphabet::new(["a", "b"]).unwrap();
                    Nfa::new(
                        &a,
                        n,
                        0,
                        finals,
                        edges.into_iter().map(|(s, l, d)| (s, l.map(Letter), d)),
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn intersection_is_pointwise(m1 in arb_nfa(4), m2 in arb_nfa(4)) {
            let a = ab();
            let p = m1.intersect(&m2).unwrap();
            for x in all_words(&a, 6) {
                prop_assert_eq!(p.accepts(&x), m1.accepts(&x) && m2.accepts(&x));
            }
        }

        #[test]
        fn emptiness_matches_short_words(m in arb_nfa(5)) {
            let short = m.enumerate(m.num_states());
            prop_assert_eq!(m.is_empty(), short.is_empty());
        }

        #[test]
        fn quotient_is_pointwise(m in arb_nfa(4), p in prop::collection::vec(0u32..2, 0..3),
                                 s in prop::collection::vec(0u32..2, 0..3)) {
            let a = ab();
            let p = Word(p.into_iter().map(Letter).collect());
            let s = Word(s.into_iter().map(Letter).collect());
            let q = m.quotient(&p, &s).unwrap();
            for x in all_words(&a, 4) {
                prop_assert_eq!(q.accepts(&x), m.accepts(&p.concat(&x).concat(&s)));
            }
        }

        #[test]
        fn trim_preserves_language(m in arb_nfa(5)) {
            prop_assert_eq!(m.trim().enumerate(5), m.enumerate(5));
        }

        #[test]
        fn reverse_is_pointwise(m in arb_nfa(4)) {
            let r = m.reverse();
            for x in all_words(&ab(), 5) {
                let mut y = x.0.clone();
                y.reverse();
                prop_assert_eq!(r.accepts(&Word(y)), m.accepts(&x));
            }
        }
    }
}
