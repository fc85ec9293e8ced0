//! Finite-index overgroups via coset tables, and generator extensions.

use crate::automata::{Nfa, Transducer, TransducerBuilder};
use crate::error::{Error, Result};
use crate::rid::rid_transduction;
use crate::words::{invert_word, Alphabet, InvolutiveAlphabet, Letter, Morphism, Word};

use super::{decider_from_wp_rid, wp_rid, CheckReport, GroupDecider};

/// Right cosets `H g_1, …, H g_n` of a subgroup `H = ⟨Y⟩` in `G = ⟨X⟩`,
/// with `g_i x = w_{i,x} g_j` for `j = action(i, x)`.
#[derive(Clone, Debug)]
pub struct CosetTable {
    sub: InvolutiveAlphabet,
    over: InvolutiveAlphabet,
    reps: Vec<Word>,
    action: Vec<Vec<usize>>,
    rewrite: Vec<Vec<Word>>,
}

impl CosetTable {
    /// `action[i][x]` and `rewrite[i][x]` are indexed by coset and letter of
    /// `over`. Structural checks run here; [`CosetTable::coherence`] needs a
    /// subgroup decider.
    pub fn new(
        sub: &InvolutiveAlphabet,
        over: &InvolutiveAlphabet,
        reps: Vec<Word>,
        action: Vec<Vec<usize>>,
        rewrite: Vec<Vec<Word>>,
    ) -> Result<CosetTable> {
        let t = CosetTable::unchecked(sub, over, reps, action, rewrite);
        let failures: Vec<String> = t.structure_checks().into_iter().filter(|c| !c.passed).map(|c| c.name).collect();
        if !failures.is_empty() {
            return Err(Error::Invalid(format!("coset table: {}", failures.join("; "))));
        }
        Ok(t)
    }

    pub(crate) fn unchecked(
        sub: &InvolutiveAlphabet,
        over: &InvolutiveAlphabet,
        reps: Vec<Word>,
        action: Vec<Vec<usize>>,
        rewrite: Vec<Vec<Word>>,
    ) -> CosetTable {
        CosetTable {
            sub: sub.clone(),
            over: over.clone(),
            reps,
            action,
            rewrite,
        }
    }

    pub fn sub_generators(&self) -> &InvolutiveAlphabet {
        &self.sub
    }

    pub fn over_generators(&self) -> &InvolutiveAlphabet {
        &self.over
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[Word] {
        &self.reps
    }

    pub fn action(&self, i: usize, x: Letter) -> usize {
        self.action[i][x.index()]
    }

    pub fn rewrite(&self, i: usize, x: Letter) -> &Word {
        &self.rewrite[i][x.index()]
    }

    /// Named pass/fail results for the checks that need no decider.
    pub fn structure_checks(&self) -> Vec<CheckReport> {
        let n = self.reps.len();
        let k = self.over.len();
        let mut out = Vec::new();
        let shape = n > 0
            && self.action.len() == n
            && self.rewrite.len() == n
            && self.action.iter().all(|r| r.len() == k && r.iter().all(|&j| j < n))
            && self.rewrite.iter().all(|r| r.len() == k);
        out.push(CheckReport::new("table dimensions", shape));
        if !shape {
            return out;
        }
        out.push(CheckReport::new("first representative is empty", self.reps[0].is_empty()));
        let words_ok = self.reps.iter().all(|w| self.over.alphabet().check_word(w).is_ok())
            && self.rewrite.iter().flatten().all(|w| self.sub.alphabet().check_word(w).is_ok());
        out.push(CheckReport::new("words over declared alphabets", words_ok));
        for x in self.over.alphabet().letters() {
            let xi = self.over.inverse(x);
            let bij = (0..n).all(|i| self.action[self.action[i][x.index()]][xi.index()] == i);
            out.push(CheckReport::new(format!("action of `{}` is a bijection", self.over.alphabet().name(x)), bij));
        }
        if words_ok {
            let reach = self.reps.iter().enumerate().all(|(i, g)| self.walk(g).0 == i);
            out.push(CheckReport::new("representative g_i leads from coset 1 to coset i", reach));
        }
        out
    }

    /// Coset reached from coset 1 by `w`, and the accumulated `w_{i,x}` word.
    fn walk(&self, w: &Word) -> (usize, Word) {
        let mut i = 0;
        let mut h = Word::empty();
        for &x in w.letters() {
            h = h.concat(&self.rewrite[i][x.index()]);
            i = self.action[i][x.index()];
        }
        (i, h)
    }

    /// Checks decidable in `H`: reading a representative from coset 1
    /// rewrites to 1, and `w_{i,x} · w_{j,x'} = 1` for `j = action(i, x)`.
    pub fn coherence(&self, sub: &GroupDecider) -> Result<Vec<CheckReport>> {
        sub.alphabet().ensure_same(self.sub.alphabet(), "coset table subgroup")?;
        let mut out = Vec::new();
        let mut reps_ok = true;
        for g in &self.reps {
            reps_ok &= sub.is_identity(&self.walk(g).1)?;
        }
        out.push(CheckReport::new("representatives rewrite to 1", reps_ok));
        let mut inv_ok = true;
        for i in 0..self.index() {
            for x in self.over.alphabet().letters() {
                let j = self.action(i, x);
                let w = self.rewrite(i, x).concat(self.rewrite(j, self.over.inverse(x)));
                inv_ok &= sub.is_identity(&w)?;
            }
        }
        out.push(CheckReport::new("rewrites of x and x' cancel", inv_ok));
        Ok(out)
    }
}

/// `σ ⊆ Y* × X*` with edges `i –(w_{i,x}, x)→ action(i, x)`, so that
/// `W_X(G) = σ(W_Y(H))`.
pub fn coset_transducer(t: &CosetTable) -> Transducer {
    let mut b = TransducerBuilder::new(t.sub.alphabet(), t.over.alphabet());
    b.add_states(t.index());
    for i in 0..t.index() {
        for x in t.over.alphabet().letters() {
            b.add_edge(i, t.rewrite(i, x), Word(vec![x]), t.action(i, x))
                .expect("table words are validated");
        }
    }
    b.set_initial(0);
    b.add_final(0);
    b.build()
}

pub fn overgroup_decider(sub: &GroupDecider, t: &CosetTable) -> Result<GroupDecider> {
    sub.alphabet().ensure_same(t.sub.alphabet(), "overgroup")?;
    if let Some(c) = t.coherence(sub)?.into_iter().find(|c| !c.passed) {
        return Err(Error::Invalid(format!("coset table: {} fails", c.name)));
    }
    let wp = rid_transduction(&wp_rid(sub), &coset_transducer(t))?
        .with_description(format!("overgroup[index {}]({})", t.index(), sub.description()));
    decider_from_wp_rid(&wp, &t.over)
}

/// Adds generators `name ↦ word` and their inverses `name' ↦ word⁻¹`.
pub fn extend_generators(d: &GroupDecider, new_letters: &[(String, Word)]) -> Result<GroupDecider> {
    let old = d.generators();
    let mut names: Vec<String> = old.alphabet().names().to_vec();
    for (n, w) in new_letters {
        old.alphabet().check_word(w)?;
        names.push(n.clone());
        names.push(format!("{n}'"));
    }
    let alphabet = Alphabet::new(names.clone()).map_err(|e| match e {
        Error::InvalidAlphabet(m) => Error::InvalidAlphabet(format!("generator name collision: {m}")),
        e => e,
    })?;
    let k = old.len();
    let mut inv: Vec<Letter> = (0..k).map(|i| old.inverse(Letter(i as u32))).collect();
    let mut images: Vec<Word> = (0..k).map(|i| Word(vec![Letter(i as u32)])).collect();
    for (j, (_, w)) in new_letters.iter().enumerate() {
        let base = (k + 2 * j) as u32;
        inv.push(Letter(base + 1));
        inv.push(Letter(base));
        images.push(w.clone());
        images.push(invert_word(old, w));
    }
    let gens = InvolutiveAlphabet::with_involution(alphabet.clone(), inv)?;
    let h = Morphism::new(alphabet, old.alphabet().clone(), images)?;
    let inner = d.clone();
    let desc = format!("{}+{}", d.description(), new_letters.len());
    Ok(GroupDecider::new(&gens, desc, move |r: &Nfa, w: &Word| {
        inner.member(&r.relabel(&h)?, &h.apply(w)?)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::compile_str;
    use crate::groups::{abelian_group_decider_named, free_group_decider, Limits};

    /// ℤ = ⟨t⟩ over 2ℤ = ⟨u⟩ with representatives 1, t.
    fn z_over_2z() -> (CosetTable, InvolutiveAlphabet, InvolutiveAlphabet) {
        let y = InvolutiveAlphabet::from_generators(["u"]).unwrap();
        let x = InvolutiveAlphabet::from_generators(["t"]).unwrap();
        let w = |s: &str| y.parse_word(s).unwrap();
        // letters of x: t, t'
        let action = vec![vec![1, 1], vec![0, 0]];
        let rewrite = vec![vec![w(""), w("u'")], vec![w("u"), w("")]];
        let reps = vec![Word::empty(), x.parse_word("t").unwrap()];
        (CosetTable::new(&y, &x, reps, action, rewrite).unwrap(), y, x)
    }

    #[test]
    fn transducer_examples() {
        let (t, y, x) = z_over_2z();
        let s = coset_transducer(&t);
        assert!(s.relates(&Word::empty(), &x.parse_word("t t'").unwrap()));
        assert!(s.relates(&y.parse_word("u").unwrap(), &x.parse_word("t t").unwrap()));
        assert!(!s.relates(&Word::empty(), &x.parse_word("t t").unwrap()));
    }

    #[test]
    fn index_one_table_is_identity_like() {
        let x = InvolutiveAlphabet::from_generators(["t"]).unwrap();
        let y = InvolutiveAlphabet::from_generators(["s"]).unwrap();
        let w = |s: &str| y.parse_word(s).unwrap();
        let t = CosetTable::new(&y, &x, vec![Word::empty()], vec![vec![0, 0]], vec![vec![w("s"), w("s'")]]).unwrap();
        let s = coset_transducer(&t);
        assert!(s.relates(&Word::empty(), &Word::empty()));
        assert!(s.relates(&w("s' s"), &x.parse_word("t' t").unwrap()));
    }

    #[test]
    fn overgroup_examples() {
        let (t, y, x) = z_over_2z();
        let sub = free_group_decider(&y).unwrap();
        let d = overgroup_decider(&sub, &t).unwrap();
        let q = |s: &str| compile_str(s, x.alphabet()).unwrap();
        let w = |s: &str| x.parse_word(s).unwrap();
        assert!(d.member(&q("t t"), &w("t t")).unwrap());
        assert!(!d.member(&q("(t t)*"), &w("t")).unwrap());
        assert!(d.member(&q("(t t)*"), &w("t t t t")).unwrap());
        assert!(d.member(&q("t' t*"), &w("t t t' t")).unwrap());
    }

    #[test]
    fn broken_tables_are_rejected() {
        let y = InvolutiveAlphabet::from_generators(["u"]).unwrap();
        let x = InvolutiveAlphabet::from_generators(["t"]).unwrap();
        let w = |s: &str| y.parse_word(s).unwrap();
        // t maps both cosets to coset 1
        let bad = CosetTable::new(
            &y,
            &x,
            vec![Word::empty(), x.parse_word("t").unwrap()],
            vec![vec![1, 1], vec![1, 0]],
            vec![vec![w(""), w("u'")], vec![w("u"), w("")]],
        );
        assert!(bad.is_err());
        // structurally fine, but t·t' rewrites to u·u ≠ 1
        let t = CosetTable::new(
            &y,
            &x,
            vec![Word::empty(), x.parse_word("t").unwrap()],
            vec![vec![1, 1], vec![0, 0]],
            vec![vec![w(""), w("u")], vec![w("u"), w("")]],
        )
        .unwrap();
        let sub = free_group_decider(&y).unwrap();
        assert!(overgroup_decider(&sub, &t).is_err());
    }

    #[test]
    fn extend_examples() {
        let t = InvolutiveAlphabet::from_generators(["t"]).unwrap();
        let d = free_group_decider(&t).unwrap();
        let e = extend_generators(&d, &[("h".to_string(), t.parse_word("t t").unwrap())]).unwrap();
        let q = |s: &str| compile_str(s, e.alphabet()).unwrap();
        let w = |s: &str| e.alphabet().parse_word(s).unwrap();
        assert!(e.member(&q("h"), &w("t t")).unwrap());
        assert!(!e.member(&q("h*"), &w("t")).unwrap());
        assert!(e.member(&q("h'"), &w("t' t'")).unwrap());
        let same = extend_generators(&d, &[]).unwrap();
        for (r, x) in [("t*", "t t"), ("t*", "t'"), ("(t t')*", "")] {
            let rq = compile_str(r, t.alphabet()).unwrap();
            let xw = t.parse_word(x).unwrap();
            assert_eq!(same.member(&rq, &xw).unwrap(), d.member(&rq, &xw).unwrap());
        }
        assert!(extend_generators(&d, &[("t".to_string(), Word::empty())]).is_err());
    }

    #[test]
    fn generator_independence_on_abelian() {
        let z = abelian_group_decider_named(&["e1".to_string()], &[], Limits::default()).unwrap();
        let e = extend_generators(&z, &[("d".to_string(), z.alphabet().parse_word("e1 e1").unwrap())]).unwrap();
        let r = compile_str("(e1 | d)*", e.alphabet()).unwrap();
        for (a, b) in [("d", "e1 e1"), ("d d e1'", "e1 e1 e1"), ("d'", "e1' e1'")] {
            let (a, b) = (e.alphabet().parse_word(a).unwrap(), e.alphabet().parse_word(b).unwrap());
            assert_eq!(e.member(&r, &a).unwrap(), e.member(&r, &b).unwrap());
        }
    }
}
