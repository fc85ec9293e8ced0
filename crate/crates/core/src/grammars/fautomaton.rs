//! Automata over `F × Σ*` with `F` free, and their output languages.

use crate::error::{Error, Result};
use crate::words::{Alphabet, InvolutiveAlphabet, Word};

use super::cfg::{Cfg, Symbol};

#[derive(Clone, Debug)]
pub struct FAutomaton {
    group_alphabet: InvolutiveAlphabet,
    output_alphabet: Alphabet,
    num_states: usize,
    edges: Vec<(usize, Word, Word, usize)>,
    initial: usize,
    finals: Vec<usize>,
}

impl FAutomaton {
    pub fn new(
        group_alphabet: &InvolutiveAlphabet,
        output_alphabet: &Alphabet,
        num_states: usize,
        initial: usize,
        finals: Vec<usize>,
        edges: Vec<(usize, Word, Word, usize)>,
    ) -> Result<FAutomaton> {
        if initial >= num_states || finals.iter().any(|&f| f >= num_states) {
            return Err(Error::Invalid("state out of range".into()));
        }
        for (s, g, v, d) in &edges {
            if *s >= num_states || *d >= num_states {
                return Err(Error::Invalid("edge endpoint out of range".into()));
            }
            group_alphabet.alphabet().check_word(g)?;
            output_alphabet.check_word(v)?;
        }
        Ok(FAutomaton {
            group_alphabet: group_alphabet.clone(),
            output_alphabet: output_alphabet.clone(),
            num_states,
            edges,
            initial,
            finals,
        })
    }

    pub fn group_alphabet(&self) -> &InvolutiveAlphabet {
        &self.group_alphabet
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    pub fn edges(&self) -> &[(usize, Word, Word, usize)] {
        &self.edges
    }

    /// Splits group labels into single letters; outputs ride on the first piece.
    fn unit_labels(&self) -> (usize, Vec<(usize, Option<crate::words::Letter>, Word, usize)>) {
        let mut n = self.num_states;
        let mut out = Vec::new();
        for (s, g, v, d) in &self.edges {
            if g.len() <= 1 {
                out.push((*s, g.letters().first().copied(), v.clone(), *d));
                continue;
            }
            let mut cur = *s;
            for (i, &x) in g.letters().iter().enumerate() {
                let next = if i + 1 == g.len() {
                    *d
                } else {
                    n += 1;
                    n - 1
                };
                let emit = if i == 0 { v.clone() } else { Word::empty() };
                out.push((cur, Some(x), emit, next));
                cur = next;
            }
        }
        (n, out)
    }
}

/// Grammar for `{ v : (1, v) accepted }`.
///
/// `A_pq` derives the outputs of paths `p → q` whose group label reduces to
/// 1: either empty, or a first step with trivial label, or a first letter
/// `x` cancelled by a later `x'` with a balanced path in between.
pub fn fautomaton_to_cfg(p: &FAutomaton) -> Cfg {
    let (n, edges) = p.unit_labels();
    let inv = &p.group_alphabet;
    let nt = |a: usize, b: usize| 1 + a * n + b;
    let mut names = vec!["S".to_string()];
    for a in 0..n {
        for b in 0..n {
            names.push(format!("A{a}_{b}"));
        }
    }
    let term = |v: &Word| v.letters().iter().map(|&l| Symbol::T(l)).collect::<Vec<_>>();
    let mut prods: Vec<(usize, Vec<Symbol>)> = Vec::new();
    for a in 0..n {
        prods.push((nt(a, a), vec![]));
    }
    let mut by_letter: Vec<Vec<usize>> = vec![Vec::new(); inv.alphabet().len()];
    for (i, (s, x, v, d)) in edges.iter().enumerate() {
        match x {
            None => {
                for q in 0..n {
                    let mut rhs = term(v);
                    rhs.push(Symbol::N(nt(*d, q)));
                    prods.push((nt(*s, q), rhs));
                }
            }
            Some(x) => by_letter[x.index()].push(i),
        }
    }
    for (s, x, v1, d) in &edges {
        let Some(x) = x else { continue };
        for &j in &by_letter[inv.inverse(*x).index()] {
            let (s2, _, v2, d2) = &edges[j];
            for q in 0..n {
                let mut rhs = term(v1);
                rhs.push(Symbol::N(nt(*d, *s2)));
                rhs.extend(term(v2));
                rhs.push(Symbol::N(nt(*d2, q)));
                prods.push((nt(*s, q), rhs));
            }
        }
    }
    for &f in &p.finals {
        prods.push((0, vec![Symbol::N(nt(p.initial, f))]));
    }
    Cfg::new(&p.output_alphabet, names, 0, prods)
        .expect("balanced-path grammar is well formed")
        .trim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Nfa;
    use crate::grammars::cfg::cfg_member;
    use crate::words::{free_reduce, Letter};
    use proptest::prelude::*;
    use std::collections::{BTreeSet, HashSet, VecDeque};

    /// Outputs of length ≤ `max_out` reachable with trivial group element, by
    /// search over (state, reduced stack, output) with a stack cap.
    fn reference(p: &FAutomaton, max_out: usize) -> BTreeSet<Word> {
        let maxg = p.edges().iter().map(|e| e.1.len()).max().unwrap_or(0).max(1);
        let cap = p.num_states() * maxg * (max_out + 1);
        let inv = p.group_alphabet();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        let start = (p.initial(), Word::empty(), Word::empty());
        seen.insert(start.clone());
        queue.push_back(start);
        let mut out = BTreeSet::new();
        while let Some((s, stack, o)) = queue.pop_front() {
            if stack.is_empty() && p.finals().contains(&s) {
                out.insert(o.clone());
            }
            for (src, g, v, d) in p.edges() {
                if *src != s || o.len() + v.len() > max_out {
                    continue;
                }
                let ns = free_reduce(inv, &stack.concat(g));
                if ns.len() > cap {
                    continue;
                }
                let st = (*d, ns, o.concat(v));
                if seen.insert(st.clone()) {
                    queue.push_back(st);
                }
            }
        }
        out
    }

    fn setup() -> (InvolutiveAlphabet, Alphabet) {
        (
            InvolutiveAlphabet::from_generators(["a"]).unwrap(),
            Alphabet::new(["x", "y"]).unwrap(),
        )
    }

    #[test]
    fn loop_example_matches_reference() {
        let (g, o) = setup();
        let a = g.parse_word("a").unwrap();
        let ai = g.parse_word("a'").unwrap();
        let x = o.parse_word("x").unwrap();
        let y = o.parse_word("y").unwrap();
        let p = FAutomaton::new(&g, &o, 1, 0, vec![0], vec![(0, a, x, 0), (0, ai, y, 0)]).unwrap();
        let c = fautomaton_to_cfg(&p);
        let want = reference(&p, 4);
        for w in Nfa::universal(&o).enumerate(4) {
            assert_eq!(cfg_member(&c, &w), want.contains(&w), "{}", o.spell(&w));
        }
        assert!(cfg_member(&c, &o.parse_word("x y").unwrap()));
        // a' then a also cancels
        assert!(cfg_member(&c, &o.parse_word("y x").unwrap()));
    }

    #[test]
    fn single_edge_examples() {
        let (g, o) = setup();
        let x = o.parse_word("x").unwrap();
        let p = FAutomaton::new(&g, &o, 2, 0, vec![1], vec![(0, Word::empty(), x.clone(), 1)]).unwrap();
        let c = fautomaton_to_cfg(&p);
        let words: Vec<Word> = Nfa::universal(&o).enumerate(3).into_iter().filter(|w| cfg_member(&c, w)).collect();
        assert_eq!(words, vec![x.clone()]);
        let a = g.parse_word("a").unwrap();
        let p = FAutomaton::new(&g, &o, 2, 0, vec![1], vec![(0, a, x, 1)]).unwrap();
        assert!(crate::grammars::cfg::cfg_empty(&fautomaton_to_cfg(&p)));
    }

    #[test]
    fn long_labels_split() {
        let (g, o) = setup();
        let aa = g.parse_word("a a").unwrap();
        let back = g.parse_word("a' a'").unwrap();
        let x = o.parse_word("x").unwrap();
        let p = FAutomaton::new(&g, &o, 2, 0, vec![0], vec![(0, aa, x.clone(), 1), (1, back, Word::empty(), 0)]).unwrap();
        let c = fautomaton_to_cfg(&p);
        assert!(cfg_member(&c, &x.power(2)));
        assert!(!cfg_member(&c, &o.parse_word("y").unwrap()));
    }

    fn arb_fautomaton() -> impl Strategy<Value = FAutomaton> {
        (1usize..=3).prop_flat_map(|n| {
            let edge = (0..n, prop::option::of(0u32..4), prop::collection::vec(0u32..2, 0..=1), 0..n);
            (prop::collection::vec(edge, 0..=5), prop::collection::vec(0..n, 1..=2)).prop_map(move |(es, finals)| {
                let g = InvolutiveAlphabet::from_generators(["a", "b"]).unwrap();
                let o = Alphabet::new(["x", "y"]).unwrap();
                let edges = es
                    .into_iter()
                    .map(|(s, x, v, d)| {
                        (s, Word(x.map(Letter).into_iter().collect()), Word(v.into_iter().map(Letter).collect()), d)
                    })
                    .collect();
                FAutomaton::new(&g, &o, n, 0, finals, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn agrees_with_stack_search(p in arb_fautomaton()) {
            let c = fautomaton_to_cfg(&p);
            let want = reference(&p, 4);
            for w in Nfa::universal(p.output_alphabet()).enumerate(4) {
                prop_assert_eq!(cfg_member(&c, &w), want.contains(&w));
            }
        }
    }
}
