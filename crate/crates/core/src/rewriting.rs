//! Monadic rewriting systems `w → x` (|x| ≤ 1) whose rule sets are oracle
//! languages, and saturation computing the descendants of a regular language.

use crate::automata::{Label, Nfa, StateId};
use crate::error::{Error, Result};
use crate::rid::{rid_regular, rid_union, RidLanguage};
use crate::stats;
use crate::words::{Alphabet, InvolutiveAlphabet, Word};

/// Rules `Γ_x` for `x` a letter or ε. Absent entries mean `Γ_x = ∅`.
#[derive(Clone, Debug)]
pub struct MonadicSystem {
    alphabet: Alphabet,
    rules: Vec<(Label, RidLanguage)>,
}

impl MonadicSystem {
    pub fn new(alphabet: &Alphabet) -> Self {
        MonadicSystem {
            alphabet: alphabet.clone(),
            rules: Vec::new(),
        }
    }

    /// Adds `Γ_x`, taking the union with any rule set already present.
    pub fn add_rule(&mut self, x: Label, gamma: RidLanguage) -> Result<()> {
        self.alphabet.ensure_same(gamma.alphabet(), "rule set")?;
        if let Some(l) = x {
            if !self.alphabet.contains(l) {
                return Err(Error::AlphabetMismatch(format!("rule target {} outside alphabet", l.0)));
            }
        }
        match self.rules.binary_search_by(|(k, _)| k.cmp(&x)) {
            Ok(i) => self.rules[i].1 = rid_union(&self.rules[i].1, &gamma)?,
            Err(i) => self.rules.insert(i, (x, gamma)),
        }
        Ok(())
    }

    pub fn with_rule(mut self, x: Label, gamma: RidLanguage) -> Result<Self> {
        self.add_rule(x, gamma)?;
        Ok(self)
    }

    /// `Γ_ε = { x x' : x a letter }`.
    pub fn free_reduction(alpha: &InvolutiveAlphabet) -> Self {
        let pairs: Vec<Word> = alpha
            .alphabet()
            .letters()
            .map(|x| Word(vec![x, alpha.inverse(x)]))
            .collect();
        let gamma = rid_regular(&Nfa::from_words(alpha.alphabet(), &pairs)).with_description("free reduction");
        MonadicSystem::new(alpha.alphabet())
            .with_rule(None, gamma)
            .expect("same alphabet")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rule(&self, x: Label) -> Option<&RidLanguage> {
        self.rules
            .binary_search_by(|(k, _)| k.cmp(&x))
            .ok()
            .map(|i| &self.rules[i].1)
    }

    pub fn rules(&self) -> impl Iterator<Item = (Label, &RidLanguage)> {
        self.rules.iter().map(|(x, g)| (*x, g))
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SaturationOptions {
    /// Cap on rule-oracle invocations for a single saturation.
    pub oracle_budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SaturationStats {
    pub rounds: u64,
    pub edges_added: u64,
    pub oracle_calls: u64,
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn union_with(&mut self, other: &BitSet) -> bool {
        let mut changed = false;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            let n = *a | *b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

struct Saturator<'a> {
    m: Nfa,
    g: &'a MonadicSystem,
    budget: Option<u64>,
    stats: SaturationStats,
    reach: Vec<BitSet>,
    dirty: Vec<BitSet>,
    added_here: bool,
}

impl Saturator<'_> {
    fn new<'a>(m0: &Nfa, g: &'a MonadicSystem, opts: SaturationOptions) -> Saturator<'a> {
        let n = m0.num_states();
        let mut reach = Vec::with_capacity(n);
        for p in 0..n {
            let seen = m0.reachable_from(&[p]);
            let mut bs = BitSet::new(n);
            for q in (0..n).filter(|&q| seen[q]) {
                bs.set(q);
            }
            reach.push(bs);
        }
        let mut all = BitSet::new(n);
        for q in 0..n {
            all.set(q);
        }
        Saturator {
            m: m0.clone(),
            g,
            budget: opts.oracle_budget,
            stats: SaturationStats::default(),
            reach,
            dirty: vec![all; n],
            added_here: false,
        }
    }

    fn charge(&mut self) -> Result<()> {
        if let Some(limit) = self.budget {
            if self.stats.oracle_calls >= limit {
                return Err(Error::BudgetExhausted { what: "oracle", limit });
            }
        }
        self.stats.oracle_calls += 1;
        Ok(())
    }

    fn add_edge(&mut self, s: StateId, x: Label, t: StateId) {
        if !self.m.insert_edge(s, x, t) {
            return;
        }
        self.stats.edges_added += 1;
        self.added_here = true;
        let n = self.m.num_states();
        let rt = self.reach[t].clone();
        let sources: Vec<usize> = (0..n).filter(|&p| self.reach[p].get(s)).collect();
        for &p in &sources {
            self.reach[p].union_with(&rt);
        }
        let rt = self.reach[t].clone();
        for &p in &sources {
            self.dirty[p].union_with(&rt);
        }
    }

    /// States reachable from `p` along a path spelling `x` (ε-moves free).
    fn x_reach(&self, p: StateId, x: Label) -> Vec<bool> {
        match x {
            None => self.m.read_from(&[p], &[]),
            Some(l) => self.m.read_from(&[p], &[l]),
        }
    }

    fn group_test(&mut self, p: StateId, x: Label, gamma: &RidLanguage, cands: &[StateId]) -> Result<()> {
        self.charge()?;
        if !gamma.intersects(&self.m.with_root(p, cands.iter().copied()))? {
            return Ok(());
        }
        if cands.len() == 1 {
            self.add_edge(p, x, cands[0]);
            return Ok(());
        }
        let (a, b) = cands.split_at(cands.len() / 2);
        self.group_test(p, x, gamma, a)?;
        self.group_test(p, x, gamma, b)
    }

    fn process(&mut self, p: StateId, pending: &BitSet) -> Result<()> {
        let g = self.g;
        for (x, gamma) in g.rules() {
            let have = self.x_reach(p, x);
            let cands: Vec<StateId> = pending.ones().filter(|&q| !have[q]).collect();
            if cands.is_empty() {
                continue;
            }
            match gamma.regular() {
                Some(lang) => {
                    self.charge()?;
                    let hits = self.m.meets_from(p, lang);
                    for q in cands {
                        if hits[q] {
                            self.add_edge(p, x, q);
                        }
                    }
                }
                None => self.group_test(p, x, gamma, &cands)?,
            }
        }
        Ok(())
    }

    fn run(mut self, stop: Option<&dyn Fn(&Nfa) -> Result<bool>>) -> Result<(Nfa, SaturationStats)> {
        let n = self.m.num_states();
        let finish = |s: Saturator| {
            stats::record_saturation(s.stats.rounds, s.stats.edges_added, s.stats.oracle_calls);
            Ok((s.m, s.stats))
        };
        if self.g.is_empty() {
            return finish(self);
        }
        if let Some(stop) = stop {
            if stop(&self.m)? {
                return finish(self);
            }
        }
        loop {
            self.stats.rounds += 1;
            let before = self.stats.edges_added;
            for p in 0..n {
                if self.dirty[p].is_empty() {
                    continue;
                }
                let pending = std::mem::replace(&mut self.dirty[p], BitSet::new(n));
                self.added_here = false;
                self.process(p, &pending)?;
                if self.added_here {
                    if let Some(stop) = stop {
                        if stop(&self.m)? {
                            return finish(self);
                        }
                    }
                }
            }
            if self.stats.edges_added == before {
                return finish(self);
            }
        }
    }
}

/// The automaton for all descendants `L(m0)Γ`, on the same state set.
pub fn saturate(m0: &Nfa, g: &MonadicSystem) -> Result<Nfa> {
    Ok(saturate_with(m0, g, SaturationOptions::default())?.0)
}

pub fn saturate_with(m0: &Nfa, g: &MonadicSystem, opts: SaturationOptions) -> Result<(Nfa, SaturationStats)> {
    m0.alphabet().ensure_same(g.alphabet(), "saturate")?;
    Saturator::new(m0, g, opts).run(None)
}

/// Checks the fixpoint condition: every edge licensed by a rule is present
/// or already implied by an existing path with the same label.
pub fn is_saturated(m: &Nfa, g: &MonadicSystem) -> Result<bool> {
    let n = m.num_states();
    for p in 0..n {
        for (x, gamma) in g.rules() {
            let have = match x {
                None => m.read_from(&[p], &[]),
                Some(l) => m.read_from(&[p], &[l]),
            };
            for q in 0..n {
                if !have[q] && gamma.intersects(&m.with_root(p, [q]))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn descendants_contains(m0: &Nfa, g: &MonadicSystem, w: &Word) -> Result<bool> {
    Ok(saturate(m0, g)?.accepts(w))
}

/// The oracle for the ancestors `LΓ⁻¹`: `R` meets it iff `RΓ` meets `L`.
pub fn ancestors_rid(l: &RidLanguage, g: &MonadicSystem) -> Result<RidLanguage> {
    ancestors_rid_with(l, g, SaturationOptions::default())
}

pub fn ancestors_rid_with(l: &RidLanguage, g: &MonadicSystem, opts: SaturationOptions) -> Result<RidLanguage> {
    l.alphabet().ensure_same(g.alphabet(), "ancestors")?;
    let (inner, g) = (l.clone(), g.clone());
    let description = format!("ancestors({})", l.description());
    Ok(RidLanguage::new(l.alphabet(), description, move |r: &Nfa| {
        let sat = Saturator::new(r, &g, opts);
        match inner.regular() {
            // descendants only grow, so the first hit settles the answer
            Some(target) => {
                let stop = |m: &Nfa| m.meets(target);
                let (m, _) = sat.run(Some(&stop))?;
                m.meets(target)
            }
            None => {
                let (m, _) = sat.run(None)?;
                inner.intersects(&m)
            }
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile_str;
    use proptest::prelude::*;

    fn f1() -> InvolutiveAlphabet {
        InvolutiveAlphabet::from_generators(["a"]).unwrap()
    }

    fn f2() -> InvolutiveAlphabet {
        InvolutiveAlphabet::from_generators(["a", "b"]).unwrap()
    }

    fn c(src: &str, a: &Alphabet) -> Nfa {
        compile_str(src, a).unwrap()
    }

    #[test]
    fn saturate_examples() {
        let a = f1();
        let al = a.alphabet();
        let m0 = c("a a'", al);
        let g = MonadicSystem::new(al).with_rule(None, rid_regular(&c("a a'", al))).unwrap();
        let s = saturate(&m0, &g).unwrap();
        assert!(s.accepts(&Word::empty()));
        assert!(s.accepts(&al.parse_word("a a'").unwrap()));
        assert_eq!(s.num_states(), m0.num_states());

        let none = MonadicSystem::new(al);
        assert_eq!(saturate(&m0, &none).unwrap().enumerate(4), m0.enumerate(4));

        let b = f2();
        let bl = b.alphabet();
        let m0 = c("a b b' a'", bl);
        let g = MonadicSystem::new(bl).with_rule(None, rid_regular(&c("a a' | b b'", bl))).unwrap();
        assert!(descendants_contains(&m0, &g, &Word::empty()).unwrap());
    }

    #[test]
    fn descendants_examples() {
        let a = f2();
        let al = a.alphabet();
        let g = MonadicSystem::new(al).with_rule(None, rid_regular(&c("a a'", al))).unwrap();
        assert!(descendants_contains(&c("a a'", al), &g, &Word::empty()).unwrap());
        assert!(descendants_contains(&c("a", al), &g, &al.parse_word("a").unwrap()).unwrap());
        assert!(!descendants_contains(&c("a b", al), &g, &al.parse_word("b").unwrap()).unwrap());
    }

    #[test]
    fn ancestors_examples() {
        let a = f2();
        let al = a.alphabet();
        let g = MonadicSystem::free_reduction(&a);
        let eps = rid_regular(&c("1", al));
        let anc = ancestors_rid(&eps, &g).unwrap();
        assert!(anc.intersects(&c("a b b' a'", al)).unwrap());
        assert!(!anc.intersects(&c("a b", al)).unwrap());
        let plain = ancestors_rid(&rid_regular(&c("a b*", al)), &MonadicSystem::new(al)).unwrap();
        for q in ["a", "a b b", "b", "(a|b)*", "a' a"] {
            assert_eq!(
                plain.intersects(&c(q, al)).unwrap(),
                rid_regular(&c("a b*", al)).intersects(&c(q, al)).unwrap()
            );
        }
    }

    #[test]
    fn letter_rules_and_oracle_rules() {
        // Γ_b = { a a } given through a non-regular oracle handle
        let al = Alphabet::new(["a", "b"]).unwrap();
        let aa = c("a a", &al);
        let gamma = RidLanguage::new(&al, "aa", move |r: &Nfa| r.meets(&aa));
        let b = al.letter("b").unwrap();
        let g = MonadicSystem::new(&al).with_rule(Some(b), gamma).unwrap();
        let s = saturate(&c("a a a a", &al), &g).unwrap();
        for w in ["a a a a", "b a a", "a b a", "a a b", "b b"] {
            assert!(s.accepts(&al.parse_word(w).unwrap()), "{w}");
        }
        assert!(!s.accepts(&al.parse_word("b").unwrap()));
        assert!(is_saturated(&s, &g).unwrap());
    }

    #[test]
    fn budget_is_reported() {
        let a = f2();
        let al = a.alphabet();
        let inner = Nfa::from_words(al, &[al.parse_word("a a'").unwrap()]);
        let gamma = RidLanguage::new(al, "aa'", move |r: &Nfa| r.meets(&inner));
        let g = MonadicSystem::new(al).with_rule(None, gamma).unwrap();
        let err = saturate_with(&c("(a a')*", al), &g, SaturationOptions { oracle_budget: Some(1) });
        assert!(matches!(err, Err(Error::BudgetExhausted { what: "oracle", limit: 1 })));
    }

    #[test]
    fn stats_count_rounds() {
        let a = f2();
        let al = a.alphabet();
        let g = MonadicSystem::free_reduction(&a);
        let (_, st) = saturate_with(&c("a b b' a'", al), &g, SaturationOptions::default()).unwrap();
        assert!(st.rounds >= 2);
        assert!(st.edges_added >= 2);
    }

    fn arb_nfa() -> impl Strategy<Value = Nfa> {
        (1usize..=5).prop_flat_map(|n| {
            (
                prop::collection::vec((0..n, prop::option::weighted(0.85, 0u32..4), 0..n), 0..(2 * n + 2)),
                prop::collection::vec(0..n, 1..=n),
            )
                .prop_map(move |(edges, finals)| {
                    let a = InvolutiveAlphabet::from_generators(["a", "b"]).unwrap();
                    Nfa::new(a.alphabet(), n, 0, finals, edges.into_iter().map(|(s, l, d)| (s, l.map(crate::words::Letter), d)))
                        .unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn saturation_is_monotone_idempotent_and_state_preserving(m in arb_nfa()) {
            let a = f2();
            let g = MonadicSystem::free_reduction(&a);
            let s = saturate(&m, &g).unwrap();
            prop_assert_eq!(s.num_states(), m.num_states());
            for w in m.enumerate(5) {
                prop_assert!(s.accepts(&w));
            }
            let (s2, st) = saturate_with(&s, &g, SaturationOptions::default()).unwrap();
            prop_assert_eq!(st.edges_added, 0);
            prop_assert_eq!(s2.edge_count(), s.edge_count());
            prop_assert!(is_saturated(&s, &g).unwrap());
        }

        #[test]
        fn regular_and_oracle_rule_paths_agree(m in arb_nfa()) {
            let a = f2();
            let al = a.alphabet().clone();
            let g = MonadicSystem::free_reduction(&a);
            let pairs = g.rule(None).unwrap().regular().unwrap().clone();
            let opaque = RidLanguage::new(&al, "pairs", move |r: &Nfa| r.meets(&pairs));
            let h = MonadicSystem::new(&al).with_rule(None, opaque).unwrap();
            let s1 = saturate(&m, &g).unwrap();
            let s2 = saturate(&m, &h).unwrap();
            prop_assert_eq!(s1.enumerate(6), s2.enumerate(6));
        }
    }
}
