use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

use super::{Label, Nfa, NfaBuilder, StateId};

/// A finite transducer. Every edge reads at most one input letter and writes
/// an output word.
#[derive(Clone, Debug)]
pub struct Transducer {
    input: Alphabet,
    output: Alphabet,
    edges: Vec<Vec<(Label, Word, StateId)>>,
    initial: StateId,
    finals: Vec<StateId>,
}

pub struct TransducerBuilder {
    t: Transducer,
}

impl TransducerBuilder {
    pub fn new(input: &Alphabet, output: &Alphabet) -> Self {
        TransducerBuilder {
            t: Transducer {
                input: input.clone(),
                output: output.clone(),
                edges: Vec::new(),
                initial: 0,
                finals: Vec::new(),
            },
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.t.edges.push(Vec::new());
        self.t.edges.len() - 1
    }

    pub fn add_states(&mut self, n: usize) -> StateId {
        let first = self.t.edges.len();
        self.t.edges.resize_with(first + n, Vec::new);
        first
    }

    /// Adds an edge reading `input` and writing `output`. Inputs longer than
    /// one letter are split into a chain; the output goes on the first link.
    pub fn add_edge(&mut self, src: StateId, input: &Word, output: Word, dst: StateId) -> Result<()> {
        self.t.input.check_word(input)?;
        self.t.output.check_word(&output)?;
        let n = self.t.edges.len();
        if src >= n || dst >= n {
            return Err(Error::Invalid(format!("transducer state out of range 0..{n}")));
        }
        let letters = input.letters();
        if letters.len() <= 1 {
            self.t.edges[src].push((letters.first().copied(), output, dst));
            return Ok(());
        }
        let mut cur = src;
        let mut out = Some(output);
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() { dst } else { self.add_state() };
            self.t.edges[cur].push((Some(l), out.take().unwrap_or_default(), next));
            cur = next;
        }
        Ok(())
    }

    pub fn set_initial(&mut self, s: StateId) {
        self.t.initial = s;
    }

    pub fn add_final(&mut self, s: StateId) {
        self.t.finals.push(s);
    }

    pub fn build(mut self) -> Transducer {
        if self.t.edges.is_empty() {
            self.t.edges.push(Vec::new());
        }
        for out in &mut self.t.edges {
            out.sort();
            out.dedup();
        }
        self.t.finals.sort_unstable();
        self.t.finals.dedup();
        self.t
    }
}

impl Transducer {
    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
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

    pub fn edges(&self) -> impl Iterator<Item = (StateId, Label, &Word, StateId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |(l, w, d)| (s, *l, w, *d)))
    }

    /// Whether `(u, v)` is in the relation.
    pub fn relates(&self, u: &Word, v: &Word) -> bool {
        let m = Nfa::singleton(&self.input, u);
        match transducer_image(self, &m) {
            Ok(img) => img.accepts(v),
            Err(_) => false,
        }
    }

    /// Same relation, with every edge writing at most one letter.
    fn unit_outputs(&self) -> Transducer {
        let mut b = TransducerBuilder::new(&self.input, &self.output);
        b.add_states(self.num_states());
        for (s, l, w, d) in self.edges() {
            let letters = w.letters();
            if letters.len() <= 1 {
                b.t.edges[s].push((l, w.clone(), d));
                continue;
            }
            let mut cur = s;
            for (i, &c) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() { d } else { b.add_state() };
                let input = if i == 0 { l } else { None };
                b.t.edges[cur].push((input, Word(vec![c]), next));
                cur = next;
            }
        }
        b.t.initial = self.initial;
        b.t.finals = self.finals.clone();
        b.build()
    }

    /// The transducer of the composed relation: first `self`, then `next`.
    pub fn compose(&self, next: &Transducer) -> Result<Transducer> {
        self.output.ensure_same(&next.input, "compose")?;
        let first = self.unit_outputs();
        let mut b = TransducerBuilder::new(&self.input, &next.output);
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let start = (first.initial, next.initial);
        index.insert(start, b.add_state());
        queue.push_back(start);
        while let Some((p, q)) = queue.pop_front() {
            let src = index[&(p, q)];
            if first.finals.binary_search(&p).is_ok() && next.finals.binary_search(&q).is_ok() {
                b.add_final(src);
            }
            let mut moves: Vec<(Label, Word, (StateId, StateId))> = Vec::new();
            for (l, w, d) in &next.edges[q] {
                if l.is_none() {
                    moves.push((None, w.clone(), (p, *d)));
                }
            }
            for (l, v, d) in &first.edges[p] {
                match v.letters().first() {
                    None => moves.push((*l, Word::empty(), (*d, q))),
                    Some(&c) => {
                        for (l2, w, d2) in &next.edges[q] {
                            if *l2 == Some(c) {
                                moves.push((*l, w.clone(), (*d, *d2)));
                            }
                        }
                    }
                }
            }
            for (l, out, pair) in moves {
                let dst = match index.get(&pair) {
                    Some(&d) => d,
                    None => {
                        let d = b.add_state();
                        index.insert(pair, d);
                        queue.push_back(pair);
                        d
                    }
                };
                b.t.edges[src].push((l, out, dst));
            }
        }
        b.set_initial(0);
        Ok(b.build())
    }
}

/// `{ v : (u, v) ∈ rel(t), u ∈ L(m) }`.
pub fn transducer_image(t: &Transducer, m: &Nfa) -> Result<Nfa> {
    m.alphabet().ensure_same(&t.input, "transducer image")?;
    let mut b = NfaBuilder::new(&t.output);
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = (m.initial(), t.initial);
    index.insert(start, b.add_state());
    queue.push_back(start);
    while let Some((p, q)) = queue.pop_front() {
        let src = index[&(p, q)];
        if m.is_final(p) && t.finals.binary_search(&q).is_ok() {
            b.add_final(src);
        }
        let mut moves: Vec<(&[Letter], (StateId, StateId))> = Vec::new();
        for &(l, d) in m.edges_from(p) {
            if l.is_none() {
                moves.push((&[], (d, q)));
            }
        }
        for (l, w, d) in &t.edges[q] {
            match l {
                None => moves.push((w.letters(), (p, *d))),
                Some(a) => {
                    for &(l2, d2) in m.edges_from(p) {
                        if l2 == Some(*a) {
                            moves.push((w.letters(), (d2, *d)));
                        }
                    }
                }
            }
        }
        for (w, pair) in moves {
            let dst = match index.get(&pair) {
                Some(&d) => d,
                None => {
                    let d = b.add_state();
                    index.insert(pair, d);
                    queue.push_back(pair);
                    d
                }
            };
            b.add_word(src, w, dst);
        }
    }
    b.set_initial(0);
    Ok(b.build())
}

/// `{ u : (u, v) ∈ rel(t), v ∈ L(m) }`.
pub fn transducer_preimage(t: &Transducer, m: &Nfa) -> Result<Nfa> {
    m.alphabet().ensure_same(&t.output, "transducer preimage")?;
    let n = m.num_states();
    let mut b = NfaBuilder::new(&t.input);
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = (t.initial, m.initial());
    index.insert(start, b.add_state());
    queue.push_back(start);
    let mut reads: HashMap<(StateId, &[Letter]), Vec<StateId>> = HashMap::new();
    while let Some((q, r)) = queue.pop_front() {
        let src = index[&(q, r)];
        if m.is_final(r) && t.finals.binary_search(&q).is_ok() {
            b.add_final(src);
        }
        let mut moves: Vec<(Label, (StateId, StateId))> = Vec::new();
        for &(l, d) in m.edges_from(r) {
            if l.is_none() {
                moves.push((None, (q, d)));
            }
        }
        for (l, w, d) in &t.edges[q] {
            if w.is_empty() {
                moves.push((*l, (*d, r)));
                continue;
            }
            let targets = reads.entry((r, w.letters())).or_insert_with(|| {
                let set = m.read_from(&[r], w.letters());
                (0..n).filter(|&s| set[s]).collect()
            });
            for &r2 in targets.iter() {
                moves.push((*l, (*d, r2)));
            }
        }
        for (l, pair) in moves {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile_str;
    use proptest::prelude::*;

    fn single(input: &Alphabet, output: &Alphabet, from: &str, to: &str) -> Transducer {
        let mut b = TransducerBuilder::new(input, output);
        let s = b.add_state();
        let f = b.add_state();
        b.add_edge(s, &input.parse_word(from).unwrap(), output.parse_word(to).unwrap(), f)
            .unwrap();
        b.add_final(f);
        b.build()
    }

    #[test]
    fn image_examples() {
        let a = Alphabet::new(["a"]).unwrap();
        let x = Alphabet::new(["x"]).unwrap();
        let t = single(&a, &x, "a", "x x");
        let img = transducer_image(&t, &compile_str("a", &a).unwrap()).unwrap();
        assert_eq!(img.enumerate(4), vec![x.parse_word("x x").unwrap()]);
        let img = transducer_image(&t, &Nfa::empty(&a)).unwrap();
        assert!(img.is_empty());
    }

    #[test]
    fn preimage_examples() {
        let a = Alphabet::new(["a"]).unwrap();
        let x = Alphabet::new(["x"]).unwrap();
        let t = single(&a, &x, "a", "x x");
        let pre = transducer_preimage(&t, &compile_str("x x", &x).unwrap()).unwrap();
        assert_eq!(pre.enumerate(4), vec![a.parse_word("a").unwrap()]);
        let pre = transducer_preimage(&t, &compile_str("x", &x).unwrap()).unwrap();
        assert!(pre.is_empty());

        let t = single(&a, &x, "a", "x");
        let pre = transducer_preimage(&t, &compile_str("x", &x).unwrap()).unwrap();
        let back = transducer_image(&t, &pre).unwrap();
        assert!(back.accepts(&x.parse_word("x").unwrap()));
    }

    #[test]
    fn long_inputs_are_split() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let x = Alphabet::new(["x"]).unwrap();
        let t = single(&a, &x, "a b a", "x");
        assert!(t.edges().all(|(_, l, _, _)| l.is_some()));
        assert!(t.relates(&a.parse_word("a b a").unwrap(), &x.parse_word("x").unwrap()));
        assert!(!t.relates(&a.parse_word("a b").unwrap(), &x.parse_word("x").unwrap()));
    }

    fn arb_transducer() -> impl Strategy<Value = Transducer> {
        (1usize..=3).prop_flat_map(|n| {
            (
                prop::collection::vec(
                    (0..n, prop::option::of(0u32..2), prop::collection::vec(0u32..2, 0..3), 0..n),
                    0..6,
                ),
                prop::collection::vec(0..n, 1..=n),
            )
                .prop_map(move |(edges, finals)| {
                    let a = Alphabet::new(["a", "b"]).unwrap();
                    let x = Alphabet::new(["x", "y"]).unwrap();
                    let mut b = TransducerBuilder::new(&a, &x);
                    b.add_states(n);
                    for (s, l, out, d) in edges {
                        let input = Word(l.into_iter().map(Letter).collect());
                        let output = Word(out.into_iter().map(Letter).collect());
                        b.add_edge(s, &input, output, d).unwrap();
                    }
                    for f in finals {
                        b.add_final(f);
                    }
                    b.build()
                })
        })
    }

    fn arb_nfa() -> impl Strategy<Value = Nfa> {
        (1usize..=3).prop_flat_map(|n| {
            (
                prop::collection::vec((0..n, prop::option::weighted(0.8, 0u32..2), 0..n), 0..7),
                prop::collection::vec(0..n, 1..=n),
            )
                .prop_map(move |(edges, finals)| {
                    let a = Alphabet::new(["a", "b"]).unwrap();
                    Nfa::new(&a, n, 0, finals, edges.into_iter().map(|(s, l, d)| (s, l.map(Letter), d)))
                        .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn image_and_preimage_are_adjoint(t in arb_transducer(), m in arb_nfa()) {
            let x = t.output().clone();
            let img = transducer_image(&t, &m).unwrap();
            for v in Nfa::universal(&x).enumerate(3) {
                let pre = transducer_preimage(&t, &Nfa::singleton(&x, &v)).unwrap();
                let meets = !pre.intersect(&m).unwrap().is_empty();
                prop_assert_eq!(img.accepts(&v), meets);
            }
        }

        #[test]
        fn composition_matches_sequential_images(t1 in arb_transducer(), m in arb_nfa()) {
            // t2 maps x -> a, y -> b b over the original input alphabet
            let a = t1.input().clone();
            let x = t1.output().clone();
            let mut b = TransducerBuilder::new(&x, &a);
            let s = b.add_state();
            b.add_edge(s, &x.parse_word("x").unwrap(), a.parse_word("a").unwrap(), s).unwrap();
            b.add_edge(s, &x.parse_word("y").unwrap(), a.parse_word("b b").unwrap(), s).unwrap();
            b.add_final(s);
            let t2 = b.build();
            let composed = t1.compose(&t2).unwrap();
            let direct = transducer_image(&composed, &m).unwrap();
            let staged = transducer_image(&t2, &transducer_image(&t1, &m).unwrap()).unwrap();
            for v in Nfa::universal(&a).enumerate(4) {
                prop_assert_eq!(direct.accepts(&v), staged.accepts(&v));
            }
        }
    }
}
